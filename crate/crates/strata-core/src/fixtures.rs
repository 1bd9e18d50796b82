//! Shared fixtures for the unit tests: the two hand-worked foliation models.

use crate::residue::{Residue, ResidueModel, SymbolKind, SymbolTable};
use crate::structure::{IndexId, StrataStructure, Stratum};

/// Four divisor components x, y, z, x-1 in ambient dimension 3; the last
/// two never meet the first.
pub(crate) fn interrupted_structure() -> StrataStructure {
    let st = |ids: &[u32]| Stratum::from_ids(ids.iter().copied());
    StrataStructure::new(
        3,
        (0..4).map(IndexId),
        [
            Stratum::empty(),
            st(&[0]),
            st(&[1]),
            st(&[2]),
            st(&[3]),
            st(&[0, 1]),
            st(&[0, 2]),
            st(&[1, 2]),
            st(&[1, 3]),
            st(&[2, 3]),
            st(&[0, 1, 2]),
            st(&[1, 2, 3]),
        ],
    )
}

/// Residues 1, lambda, -mu, -alpha on the four components, alpha non-real:
/// the nodal block is interrupted, the separator set is empty.
pub(crate) fn interrupted_model() -> ResidueModel {
    let mut table = SymbolTable::new();
    let lambda = table.add("lambda", SymbolKind::RealPositive).unwrap();
    let mu = table.add("mu", SymbolKind::RealPositive).unwrap();
    let alpha = table.add("alpha", SymbolKind::NonReal).unwrap();
    let mut model = ResidueModel::new(table);
    model.assign(IndexId(0), Residue::of(SymbolTable::UNIT, 1, 1));
    model.assign(IndexId(1), Residue::of(lambda, 1, 1));
    model.assign(IndexId(2), Residue::of(mu, -1, 1));
    model.assign(IndexId(3), Residue::of(alpha, -1, 1));
    model
}

/// Residues 1, lambda, -mu on three pairwise-meeting components: one
/// separating block walling off the third component.
pub(crate) fn separating_model() -> ResidueModel {
    let mut table = SymbolTable::new();
    let lambda = table.add("lambda", SymbolKind::RealPositive).unwrap();
    let mu = table.add("mu", SymbolKind::RealPositive).unwrap();
    let mut model = ResidueModel::new(table);
    model.assign(IndexId(0), Residue::of(SymbolTable::UNIT, 1, 1));
    model.assign(IndexId(1), Residue::of(lambda, 1, 1));
    model.assign(IndexId(2), Residue::of(mu, -1, 1));
    model
}
