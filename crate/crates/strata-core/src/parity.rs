//! Crossing parities and component counting.
//!
//! A 1-path crosses a nodal block each time a consecutive union lands in the
//! block. On a simply connected structure the crossing parity between two
//! components is independent of the path, so each separating block induces a
//! two-coloring of the dual graph. Collecting the colorings of all
//! separating blocks into one bit-vector per component cuts the residual
//! structure into its connected components: one more component than there
//! are separating blocks. A plain graph search over the residual structure
//! serves as the independent route to the same partition.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use crate::nodal::{separating_blocks, NodalData, NodalValidationReport, SeparatorReport};
use crate::structure::{IndexId, KPath, StrataStructure, Stratum};

/// Crossing-parity class of a divisor component relative to a block.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Even,
    Odd,
}

impl Side {
    fn flipped(self) -> Side {
        match self {
            Side::Even => Side::Odd,
            Side::Odd => Side::Even,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotAPath;

impl fmt::Display for NotAPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a 1-path of the structure")
    }
}

impl core::error::Error for NotAPath {}

/// Number of entries of the subsupport of `path` that belong to `block`.
pub fn crossing_count(
    s: &StrataStructure,
    block: &BTreeSet<Stratum>,
    path: &KPath,
) -> Result<usize, NotAPath> {
    if path.k() != 1 || !path.is_valid_in(s) {
        return Err(NotAPath);
    }
    Ok(path
        .subsupport()
        .iter()
        .filter(|e| block.contains(e))
        .count())
}

/// The two-coloring of the dual graph induced by a block, rooted at a base
/// component (which is always `Even`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityColoring {
    pub base: IndexId,
    pub block: BTreeSet<Stratum>,
    side: BTreeMap<IndexId, Side>,
}

impl ParityColoring {
    pub fn side(&self, i: IndexId) -> Option<Side> {
        self.side.get(&i).copied()
    }

    pub fn class(&self, side: Side) -> BTreeSet<IndexId> {
        self.side
            .iter()
            .filter(|(_, s)| **s == side)
            .map(|(i, _)| *i)
            .collect()
    }
}

/// Either a consistent coloring or the first edge contradicting one.
///
/// An inconsistency is data, not a crash: it can only arise when the
/// structure is not simply connected or the block does not come from valid
/// nodal data, and the caller may want to report exactly that.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringOutcome {
    Consistent(ParityColoring),
    Inconsistent { edge: Stratum },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringError {
    UnknownIndex(IndexId),
    NotConnected,
}

impl fmt::Display for ColoringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringError::UnknownIndex(i) => write!(f, "unknown component index {}", i),
            ColoringError::NotConnected => write!(f, "dual graph is not connected"),
        }
    }
}

impl core::error::Error for ColoringError {}

/// Breadth-first parity assignment over the dual graph, flipping the side
/// across every edge of `block`.
pub fn block_parity_coloring(
    s: &StrataStructure,
    block: &BTreeSet<Stratum>,
    base: IndexId,
) -> Result<ColoringOutcome, ColoringError> {
    if !s.has_index(base) {
        return Err(ColoringError::UnknownIndex(base));
    }
    let mut side = BTreeMap::from([(base, Side::Even)]);
    let mut queue = VecDeque::from([base]);
    while let Some(i) = queue.pop_front() {
        let here = side[&i];
        for j in s.neighbors(i) {
            let edge = Stratum::singleton(i).union(&Stratum::singleton(j));
            let expected = if block.contains(&edge) { here.flipped() } else { here };
            match side.get(&j) {
                None => {
                    side.insert(j, expected);
                    queue.push_back(j);
                }
                Some(&assigned) if assigned != expected => {
                    return Ok(ColoringOutcome::Inconsistent { edge });
                }
                Some(_) => {}
            }
        }
    }
    if side.len() != s.indices().len() {
        return Err(ColoringError::NotConnected);
    }
    Ok(ColoringOutcome::Consistent(ParityColoring {
        base,
        block: block.clone(),
        side,
    }))
}

/// The combined parity signature over the ordered separating blocks: one
/// side per block for every divisor component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiSignature {
    pub base: IndexId,
    pub blocks: Vec<BTreeSet<Stratum>>,
    pub table: BTreeMap<IndexId, Vec<Side>>,
}

/// Why the caller believes the structure is simply connected. The count
/// theorem needs simple connectedness; this records the claim instead of
/// re-proving it.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Built by a standard blow-up sequence, simply connected by construction.
    BlowupConstruction,
    CallerAsserted,
}

/// Component partition of the residual structure computed through parity
/// signatures.
#[derive(Clone, Debug)]
pub struct ParityComponentReport {
    pub separator: SeparatorReport,
    pub signature: PhiSignature,
    pub components: Vec<BTreeSet<IndexId>>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentsError {
    InvalidNodalData(NodalValidationReport),
    SeparatorInconsistent,
    ParityInconsistent { block: BTreeSet<Stratum>, edge: Stratum },
    NotConnected,
}

impl fmt::Display for ComponentsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentsError::InvalidNodalData(r) => {
                write!(f, "invalid nodal data ({} violations)", r.violations.len())
            }
            ComponentsError::SeparatorInconsistent => {
                write!(f, "separating-block conditions disagree")
            }
            ComponentsError::ParityInconsistent { edge, .. } => {
                write!(f, "parity contradiction at edge {}", edge)
            }
            ComponentsError::NotConnected => write!(f, "dual graph is not connected"),
        }
    }
}

impl core::error::Error for ComponentsError {}

/// Components of the residual structure via parity signatures: computes the
/// separating blocks, colors the dual graph once per block, and groups the
/// components by their signature vectors. On a simply connected structure
/// with valid nodal data the result has exactly one more component than
/// there are separating blocks.
pub fn components_by_parity(
    s: &StrataStructure,
    n: &NodalData,
    provenance: Provenance,
) -> Result<ParityComponentReport, ComponentsError> {
    let separator = separating_blocks(s, n).map_err(|e| match e {
        crate::nodal::SeparatorError::InvalidNodalData(r) => ComponentsError::InvalidNodalData(r),
        crate::nodal::SeparatorError::EquivalenceViolation { .. } => {
            ComponentsError::SeparatorInconsistent
        }
    })?;
    let blocks: Vec<BTreeSet<Stratum>> = separator
        .separating_blocks()
        .map(|b| b.strata.clone())
        .collect();
    let Some(&base) = s.indices().first() else {
        // No divisor components at all: nothing to partition.
        return Ok(ParityComponentReport {
            separator,
            signature: PhiSignature { base: IndexId(0), blocks, table: BTreeMap::new() },
            components: Vec::new(),
            provenance,
        });
    };
    let mut table: BTreeMap<IndexId, Vec<Side>> =
        s.indices().iter().map(|&i| (i, Vec::new())).collect();
    for block in &blocks {
        let outcome = block_parity_coloring(s, block, base).map_err(|e| match e {
            ColoringError::NotConnected => ComponentsError::NotConnected,
            ColoringError::UnknownIndex(_) => ComponentsError::NotConnected,
        })?;
        match outcome {
            ColoringOutcome::Consistent(coloring) => {
                for (i, sides) in table.iter_mut() {
                    sides.push(coloring.side(*i).expect("coloring is total"));
                }
            }
            ColoringOutcome::Inconsistent { edge } => {
                return Err(ComponentsError::ParityInconsistent { block: block.clone(), edge });
            }
        }
    }
    let mut fibers: BTreeMap<Vec<Side>, BTreeSet<IndexId>> = BTreeMap::new();
    for (i, signature) in &table {
        fibers.entry(signature.clone()).or_default().insert(*i);
    }
    let mut components: Vec<BTreeSet<IndexId>> = fibers.into_values().collect();
    components.sort_by_key(|c| c.first().copied());
    Ok(ParityComponentReport {
        separator,
        signature: PhiSignature { base, blocks, table },
        components,
        provenance,
    })
}

/// Plain breadth-first components of a structure's dual graph, used as the
/// independent route against [`components_by_parity`].
pub fn components_by_search(s: &StrataStructure) -> Vec<BTreeSet<IndexId>> {
    let mut seen: BTreeSet<IndexId> = BTreeSet::new();
    let mut components = Vec::new();
    for &start in s.indices() {
        if seen.contains(&start) {
            continue;
        }
        let mut component = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(i) = queue.pop_front() {
            for j in s.neighbors(i) {
                if seen.insert(j) {
                    component.insert(j);
                    queue.push_back(j);
                }
            }
        }
        components.push(component);
    }
    components
}
