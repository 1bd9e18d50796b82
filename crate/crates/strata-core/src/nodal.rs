//! Data of nodal strata and separating blocks.
//!
//! A datum of nodal strata singles out the strata whose corner points are
//! nodal, each with a two-block sign partition, coherent under taking
//! subsets. Its size-2 part decomposes into nodal blocks (2-connected
//! components); a block all of whose members are uninterrupted is a
//! separating block. Removing the closure of the separator set from the
//! structure leaves the residual structure whose components the parity
//! machinery counts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::structure::{
    closure, k_connected_components, StrataStructure, Stratum,
};

/// The two-block sign partition of a nodal stratum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignPartition {
    plus: Stratum,
    minus: Stratum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionError {
    EmptySide,
    Overlap(Stratum),
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionError::EmptySide => write!(f, "both sides of a sign partition must be nonempty"),
            PartitionError::Overlap(j) => write!(f, "sides of a sign partition overlap in {}", j),
        }
    }
}

impl core::error::Error for PartitionError {}

impl SignPartition {
    pub fn new(plus: Stratum, minus: Stratum) -> Result<Self, PartitionError> {
        if plus.is_empty() || minus.is_empty() {
            return Err(PartitionError::EmptySide);
        }
        let overlap = plus.intersection(&minus);
        if !overlap.is_empty() {
            return Err(PartitionError::Overlap(overlap));
        }
        Ok(SignPartition { plus, minus })
    }

    pub fn plus(&self) -> &Stratum {
        &self.plus
    }

    pub fn minus(&self) -> &Stratum {
        &self.minus
    }

    /// The partitioned stratum, i.e. the union of the two sides.
    pub fn stratum(&self) -> Stratum {
        self.plus.union(&self.minus)
    }

    /// Equality as an unordered pair of sides.
    pub fn same_split(&self, other: &SignPartition) -> bool {
        (self.plus == other.plus && self.minus == other.minus)
            || (self.plus == other.minus && self.minus == other.plus)
    }

    /// The induced partition on a subset, when both sides stay inhabited.
    pub fn restrict(&self, j: &Stratum) -> Option<SignPartition> {
        let plus = j.intersection(&self.plus);
        let minus = j.intersection(&self.minus);
        if plus.is_empty() || minus.is_empty() {
            return None;
        }
        Some(SignPartition { plus, minus })
    }
}

/// A datum of nodal strata: the nodal set with one sign partition per member.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodalData {
    entries: BTreeMap<Stratum, SignPartition>,
}

impl NodalData {
    pub fn empty() -> Self {
        NodalData::default()
    }

    pub fn from_partitions(parts: impl IntoIterator<Item = SignPartition>) -> Self {
        let mut data = NodalData::empty();
        for p in parts {
            data.insert(p);
        }
        data
    }

    pub fn insert(&mut self, partition: SignPartition) {
        self.entries.insert(partition.stratum(), partition);
    }

    pub fn contains(&self, j: &Stratum) -> bool {
        self.entries.contains_key(j)
    }

    pub fn partition(&self, j: &Stratum) -> Option<&SignPartition> {
        self.entries.get(j)
    }

    pub fn strata(&self) -> impl Iterator<Item = &Stratum> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `N(2)`: the size-2 members, identified with the nodal components of
    /// the singular locus.
    pub fn level2(&self) -> BTreeSet<Stratum> {
        self.entries
            .keys()
            .filter(|j| j.len() == 2)
            .cloned()
            .collect()
    }
}

/// One violation of the nodal-strata axiom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodalViolation {
    StratumNotInStructure(Stratum),
    /// A subset meets both signs but is missing from the datum.
    SubsetShouldBeNodal { stratum: Stratum, subset: Stratum },
    /// A subset misses one sign but is present in the datum.
    SubsetShouldNotBeNodal { stratum: Stratum, subset: Stratum },
    /// A nodal subset carries a partition other than the restricted one.
    SubsetPartitionMismatch { stratum: Stratum, subset: Stratum },
}

impl fmt::Display for NodalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodalViolation::StratumNotInStructure(j) => {
                write!(f, "nodal stratum {} is not in the structure", j)
            }
            NodalViolation::SubsetShouldBeNodal { stratum, subset } => {
                write!(f, "subset {} of nodal {} meets both signs but is not nodal", subset, stratum)
            }
            NodalViolation::SubsetShouldNotBeNodal { stratum, subset } => {
                write!(f, "subset {} of nodal {} misses a sign but is marked nodal", subset, stratum)
            }
            NodalViolation::SubsetPartitionMismatch { stratum, subset } => {
                write!(f, "partition of {} does not restrict the one of {}", subset, stratum)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodalValidationReport {
    pub violations: Vec<NodalViolation>,
}

impl NodalValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the subset axiom of a datum of nodal strata against a structure
/// and reports all violations.
pub fn validate_nodal_data(s: &StrataStructure, n: &NodalData) -> NodalValidationReport {
    let mut violations = BTreeSet::new();
    for (j, partition) in &n.entries {
        if !s.contains(j) {
            violations.insert(NodalViolation::StratumNotInStructure(j.clone()));
            continue;
        }
        for subset in j.subsets() {
            if subset == *j {
                continue;
            }
            match (partition.restrict(&subset), n.partition(&subset)) {
                (Some(_), None) => {
                    violations.insert(NodalViolation::SubsetShouldBeNodal {
                        stratum: j.clone(),
                        subset,
                    });
                }
                (None, Some(_)) => {
                    violations.insert(NodalViolation::SubsetShouldNotBeNodal {
                        stratum: j.clone(),
                        subset,
                    });
                }
                (Some(restricted), Some(declared)) => {
                    if !restricted.same_split(declared) {
                        violations.insert(NodalViolation::SubsetPartitionMismatch {
                            stratum: j.clone(),
                            subset,
                        });
                    }
                }
                (None, None) => {}
            }
        }
    }
    NodalValidationReport {
        violations: violations.into_iter().collect(),
    }
}

/// `N*`: the nodal strata all of whose supersets in `H` are nodal. The
/// result is the biggest closed subset of `H` contained in `N`.
pub fn uninterrupted_set(s: &StrataStructure, n: &NodalData) -> BTreeSet<Stratum> {
    n.strata()
        .filter(|j| {
            s.strata()
                .filter(|h| j.is_subset_of(h))
                .all(|h| n.contains(h))
        })
        .cloned()
        .collect()
}

/// Partition of `N(2)` into nodal blocks: its 2-connected components in `H`.
pub fn nodal_blocks(s: &StrataStructure, n: &NodalData) -> Vec<BTreeSet<Stratum>> {
    let level2: BTreeSet<Stratum> = n.level2().into_iter().filter(|j| s.contains(j)).collect();
    k_connected_components(s, &level2, 2).expect("members are strata of size 2")
}

/// A nodal block together with its separating flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalBlock {
    pub strata: BTreeSet<Stratum>,
    pub separating: bool,
}

/// The full separator analysis of a structure with nodal data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorReport {
    pub blocks: Vec<NodalBlock>,
    /// The separator set: union of the separating blocks.
    pub separator_set: BTreeSet<Stratum>,
    /// The residual structure `H` minus the closure of the separator set.
    pub residual: StrataStructure,
}

impl SeparatorReport {
    pub fn separating_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.separating).count()
    }

    pub fn separating_blocks(&self) -> impl Iterator<Item = &NodalBlock> {
        self.blocks.iter().filter(|b| b.separating)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparatorError {
    InvalidNodalData(NodalValidationReport),
    /// The three separating-block conditions disagreed on a block, which
    /// means inconsistent nodal data slipped past validation.
    EquivalenceViolation { block: BTreeSet<Stratum> },
}

impl fmt::Display for SeparatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeparatorError::InvalidNodalData(r) => {
                write!(f, "invalid nodal data ({} violations)", r.violations.len())
            }
            SeparatorError::EquivalenceViolation { .. } => {
                write!(f, "separating-block conditions disagree")
            }
        }
    }
}

impl core::error::Error for SeparatorError {}

/// Finds the nodal blocks, marks the separating ones, and assembles the
/// separator set and the residual structure.
///
/// Each block is checked against all three equivalent characterizations of
/// a separating block; a disagreement is reported instead of silently
/// picking one.
pub fn separating_blocks(
    s: &StrataStructure,
    n: &NodalData,
) -> Result<SeparatorReport, SeparatorError> {
    let validation = validate_nodal_data(s, n);
    if !validation.is_valid() {
        return Err(SeparatorError::InvalidNodalData(validation));
    }
    let uninterrupted = uninterrupted_set(s, n);
    let mut blocks = Vec::new();
    let mut separator_set = BTreeSet::new();
    for strata in nodal_blocks(s, n) {
        let block_closure = closure(s, &strata).expect("blocks are strata");
        let inside_uninterrupted = strata.iter().all(|j| uninterrupted.contains(j));
        let closure_nodal = block_closure.iter().all(|j| n.contains(j));
        let closure_uninterrupted = block_closure.iter().all(|j| uninterrupted.contains(j));
        if inside_uninterrupted != closure_nodal || closure_nodal != closure_uninterrupted {
            return Err(SeparatorError::EquivalenceViolation { block: strata });
        }
        if inside_uninterrupted {
            separator_set.extend(strata.iter().cloned());
        }
        blocks.push(NodalBlock { strata, separating: inside_uninterrupted });
    }
    let separator_closure = closure(s, &separator_set).expect("separator strata");
    let residual = StrataStructure::new(
        s.dimension(),
        s.indices().iter().copied(),
        s.strata().filter(|j| !separator_closure.contains(j)).cloned(),
    );
    Ok(SeparatorReport { blocks, separator_set, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{validate_structure, StrataStructure};

    fn st(ids: &[u32]) -> Stratum {
        Stratum::from_ids(ids.iter().copied())
    }

    fn part(plus: &[u32], minus: &[u32]) -> SignPartition {
        SignPartition::new(st(plus), st(minus)).unwrap()
    }

    fn interrupted_structure() -> StrataStructure {
        crate::fixtures::interrupted_structure()
    }

    /// Nodal data of the four-component model: the third component opposes
    /// the first two, the last is blocked everywhere by a non-real residue.
    fn interrupted_nodal() -> NodalData {
        NodalData::from_partitions([
            part(&[0], &[2]),
            part(&[1], &[2]),
            part(&[0, 1], &[2]),
        ])
    }

    fn separating_structure() -> StrataStructure {
        StrataStructure::complete(3, 3)
    }

    fn separating_nodal() -> NodalData {
        NodalData::from_partitions([
            part(&[0], &[2]),
            part(&[1], &[2]),
            part(&[0, 1], &[2]),
        ])
    }

    #[test]
    fn coherent_data_on_the_full_triangle_validates() {
        let report = validate_nodal_data(&separating_structure(), &separating_nodal());
        assert!(report.is_valid());
    }

    #[test]
    fn missing_both_sign_subset_is_reported() {
        let s = separating_structure();
        let n = NodalData::from_partitions([part(&[0, 1], &[2])]);
        let report = validate_nodal_data(&s, &n);
        assert_eq!(
            report.violations,
            alloc::vec![
                NodalViolation::SubsetShouldBeNodal {
                    stratum: st(&[0, 1, 2]),
                    subset: st(&[0, 2]),
                },
                NodalViolation::SubsetShouldBeNodal {
                    stratum: st(&[0, 1, 2]),
                    subset: st(&[1, 2]),
                },
            ]
        );
    }

    #[test]
    fn empty_data_is_valid() {
        assert!(validate_nodal_data(&separating_structure(), &NodalData::empty()).is_valid());
    }

    #[test]
    fn uninterrupted_set_excludes_strata_with_nonnodal_supersets() {
        let s = interrupted_structure();
        let n = interrupted_nodal();
        assert_eq!(
            uninterrupted_set(&s, &n),
            BTreeSet::from([st(&[0, 2]), st(&[0, 1, 2])])
        );
    }

    #[test]
    fn uninterrupted_set_of_fully_nodal_data_is_everything() {
        let s = separating_structure();
        let n = separating_nodal();
        assert_eq!(
            uninterrupted_set(&s, &n),
            n.strata().cloned().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn uninterrupted_set_of_empty_data_is_empty() {
        assert!(uninterrupted_set(&separating_structure(), &NodalData::empty()).is_empty());
    }

    #[test]
    fn the_two_models_have_one_block() {
        let one = nodal_blocks(&interrupted_structure(), &interrupted_nodal());
        assert_eq!(one, alloc::vec![BTreeSet::from([st(&[0, 2]), st(&[1, 2])])]);
        let two = nodal_blocks(&separating_structure(), &separating_nodal());
        assert_eq!(two, alloc::vec![BTreeSet::from([st(&[0, 2]), st(&[1, 2])])]);
    }

    #[test]
    fn blocks_split_without_a_joining_triple() {
        let s = StrataStructure::new(
            2,
            (0..4).map(crate::structure::IndexId),
            [
                Stratum::empty(),
                st(&[0]),
                st(&[1]),
                st(&[2]),
                st(&[3]),
                st(&[0, 1]),
                st(&[2, 3]),
            ],
        );
        let n = NodalData::from_partitions([part(&[0], &[1]), part(&[2], &[3])]);
        let blocks = nodal_blocks(&s, &n);
        assert_eq!(blocks.len(), 2);
    }

    #[test]
    fn interrupted_block_is_not_separating() {
        let report = separating_blocks(&interrupted_structure(), &interrupted_nodal()).unwrap();
        assert_eq!(report.blocks.len(), 1);
        assert_eq!(report.separating_count(), 0);
        assert!(report.separator_set.is_empty());
        assert_eq!(report.residual, interrupted_structure());
    }

    #[test]
    fn fully_nodal_block_separates_and_shrinks_the_structure() {
        let report = separating_blocks(&separating_structure(), &separating_nodal()).unwrap();
        assert_eq!(report.separating_count(), 1);
        assert_eq!(
            report.separator_set,
            BTreeSet::from([st(&[0, 2]), st(&[1, 2])])
        );
        let expected = StrataStructure::new(
            3,
            (0..3).map(crate::structure::IndexId),
            [Stratum::empty(), st(&[0]), st(&[1]), st(&[2]), st(&[0, 1])],
        );
        assert_eq!(report.residual, expected);
        assert!(validate_structure(&report.residual).is_valid());
    }

    #[test]
    fn no_data_no_blocks() {
        let s = separating_structure();
        let report = separating_blocks(&s, &NodalData::empty()).unwrap();
        assert!(report.blocks.is_empty());
        assert!(report.separator_set.is_empty());
        assert_eq!(report.residual, s);
    }

    #[test]
    fn separator_is_the_level_two_part_of_its_closure() {
        let report = separating_blocks(&separating_structure(), &separating_nodal()).unwrap();
        let cl = closure(&separating_structure(), &report.separator_set).unwrap();
        let level2: BTreeSet<Stratum> = cl.into_iter().filter(|j| j.len() == 2).collect();
        assert_eq!(level2, report.separator_set);
    }

    #[test]
    fn residual_keeps_every_singleton() {
        let report = separating_blocks(&separating_structure(), &separating_nodal()).unwrap();
        for i in separating_structure().indices() {
            assert!(report.residual.contains(&Stratum::singleton(*i)));
        }
    }

    #[test]
    fn invalid_data_is_refused() {
        let s = separating_structure();
        let n = NodalData::from_partitions([part(&[0, 1], &[2])]);
        assert!(matches!(
            separating_blocks(&s, &n),
            Err(SeparatorError::InvalidNodalData(_))
        ));
    }
}
