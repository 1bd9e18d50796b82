//! Coverage of residual components by partial separatrices.
//!
//! A desingularized model carries trace singular components, each inside a
//! single divisor component; a partial separatrix is a connected component
//! of their adjacency graph and stands for one invariant hypersurface not
//! contained in the divisor. The checker asks, component by component of
//! the divisor minus the separator set, whether some partial separatrix
//! meets it — and enforces the locality law that a separatrix never
//! straddles two components.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::nodal::{separating_blocks, NodalData, SeparatorError};
use crate::parity::{components_by_parity, components_by_search, ComponentsError, Provenance};
use crate::residue::ResidueModel;
use crate::structure::{IndexId, StrataStructure, Stratum};

/// A trace-type singular component: it lives inside one divisor component
/// and may share trace points with other trace components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceComponent {
    pub id: String,
    pub host: IndexId,
    pub adjacent: BTreeSet<String>,
}

impl TraceComponent {
    pub fn new(
        id: &str,
        host: IndexId,
        adjacent: impl IntoIterator<Item = &'static str>,
    ) -> Self {
        TraceComponent {
            id: String::from(id),
            host,
            adjacent: adjacent.into_iter().map(String::from).collect(),
        }
    }
}

/// A model of a desingularized foliated space: the strata structure, its
/// nodal data (explicit or residue-derived), and trace annotations.
#[derive(Clone, Debug)]
pub struct FoliatedModel {
    pub structure: StrataStructure,
    pub nodal: NodalData,
    pub residues: Option<ResidueModel>,
    pub traces: Vec<TraceComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceError {
    DuplicateTraceId(String),
    DanglingAdjacency { from: String, to: String },
    AsymmetricAdjacency { from: String, to: String },
    UnknownHost { id: String, host: IndexId },
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceError::DuplicateTraceId(id) => write!(f, "duplicate trace id {}", id),
            TraceError::DanglingAdjacency { from, to } => {
                write!(f, "trace {} is adjacent to unknown trace {}", from, to)
            }
            TraceError::AsymmetricAdjacency { from, to } => {
                write!(f, "adjacency {} -> {} is not symmetric", from, to)
            }
            TraceError::UnknownHost { id, host } => {
                write!(f, "trace {} hosted on unknown component {}", id, host)
            }
        }
    }
}

impl core::error::Error for TraceError {}

/// Connected components of the trace adjacency graph, each a partial
/// separatrix, sorted by least trace id.
pub fn partial_separatrices(m: &FoliatedModel) -> Result<Vec<BTreeSet<String>>, TraceError> {
    let mut by_id: BTreeMap<&str, &TraceComponent> = BTreeMap::new();
    for t in &m.traces {
        if by_id.insert(&t.id, t).is_some() {
            return Err(TraceError::DuplicateTraceId(t.id.clone()));
        }
    }
    for t in &m.traces {
        if !m.structure.has_index(t.host) {
            return Err(TraceError::UnknownHost { id: t.id.clone(), host: t.host });
        }
        for other in &t.adjacent {
            let Some(o) = by_id.get(other.as_str()) else {
                return Err(TraceError::DanglingAdjacency {
                    from: t.id.clone(),
                    to: other.clone(),
                });
            };
            if !o.adjacent.contains(&t.id) {
                return Err(TraceError::AsymmetricAdjacency {
                    from: t.id.clone(),
                    to: other.clone(),
                });
            }
        }
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::new();
    for t in by_id.values() {
        if seen.contains(t.id.as_str()) {
            continue;
        }
        let mut component = BTreeSet::new();
        let mut queue = VecDeque::from([t.id.as_str()]);
        seen.insert(&t.id);
        while let Some(id) = queue.pop_front() {
            component.insert(String::from(id));
            for next in &by_id[id].adjacent {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        out.push(component);
    }
    out.sort_by(|a, b| a.first().cmp(&b.first()));
    Ok(out)
}

/// How to compute the residual components for [`component_map`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SeparationMode {
    /// Parity signatures with a graph-search cross-check; needs a simply
    /// connected structure.
    Parity(Provenance),
    /// Graph search only; no connectivity assumptions.
    BfsOnly,
}

/// The residual components with the membership map of every divisor
/// component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentMap {
    pub components: Vec<BTreeSet<IndexId>>,
    assignment: BTreeMap<IndexId, usize>,
}

impl ComponentMap {
    fn from_components(components: Vec<BTreeSet<IndexId>>) -> Self {
        let mut assignment = BTreeMap::new();
        for (c, members) in components.iter().enumerate() {
            for &i in members {
                assignment.insert(i, c);
            }
        }
        ComponentMap { components, assignment }
    }

    pub fn component_of(&self, i: IndexId) -> Option<usize> {
        self.assignment.get(&i).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentMapError {
    Separator(SeparatorError),
    Parity(ComponentsError),
    /// The parity route and the graph-search route disagreed, which means
    /// the simple-connectedness claim was wrong.
    OracleDisagreement,
}

impl fmt::Display for ComponentMapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentMapError::Separator(e) => write!(f, "{}", e),
            ComponentMapError::Parity(e) => write!(f, "{}", e),
            ComponentMapError::OracleDisagreement => {
                write!(f, "parity and graph-search components disagree")
            }
        }
    }
}

impl core::error::Error for ComponentMapError {}

/// Maps every divisor component to its component of the divisor minus the
/// separator set.
pub fn component_map(
    m: &FoliatedModel,
    mode: SeparationMode,
) -> Result<ComponentMap, ComponentMapError> {
    match mode {
        SeparationMode::BfsOnly => {
            let report = separating_blocks(&m.structure, &m.nodal)
                .map_err(ComponentMapError::Separator)?;
            Ok(ComponentMap::from_components(components_by_search(&report.residual)))
        }
        SeparationMode::Parity(provenance) => {
            let parity = components_by_parity(&m.structure, &m.nodal, provenance)
                .map_err(ComponentMapError::Parity)?;
            let searched = components_by_search(&parity.separator.residual);
            if parity.components != searched {
                return Err(ComponentMapError::OracleDisagreement);
            }
            Ok(ComponentMap::from_components(parity.components))
        }
    }
}

/// Coverage of one residual component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentCoverage {
    pub component: BTreeSet<IndexId>,
    /// Labels (least trace id) of the separatrices living in the component.
    pub covered_by: Vec<String>,
    pub pass: bool,
}

/// Per-component coverage verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub components: Vec<ComponentCoverage>,
}

impl CoverageReport {
    pub fn all_pass(&self) -> bool {
        self.components.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &ComponentCoverage> {
        self.components.iter().filter(|c| !c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverageError {
    Trace(TraceError),
    Map(ComponentMapError),
    /// A separatrix with hosts in two residual components: the model
    /// violates the locality of invariant hypersurfaces.
    SeparatrixSpansComponents {
        separatrix: BTreeSet<String>,
        components: Vec<BTreeSet<IndexId>>,
    },
}

impl fmt::Display for CoverageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverageError::Trace(e) => write!(f, "{}", e),
            CoverageError::Map(e) => write!(f, "{}", e),
            CoverageError::SeparatrixSpansComponents { separatrix, .. } => {
                write!(f, "separatrix ")?;
                for (t, id) in separatrix.iter().enumerate() {
                    if t > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{}", id)?;
                }
                write!(f, " spans several components")
            }
        }
    }
}

impl core::error::Error for CoverageError {}

/// Checks that every component of the divisor minus the separator set meets
/// at least one partial separatrix, and that no separatrix straddles the
/// separator.
pub fn camacho_sad_check(m: &FoliatedModel) -> Result<CoverageReport, CoverageError> {
    let separatrices = partial_separatrices(m).map_err(CoverageError::Trace)?;
    let map = component_map(m, SeparationMode::BfsOnly).map_err(CoverageError::Map)?;
    let host_of: BTreeMap<&str, IndexId> =
        m.traces.iter().map(|t| (t.id.as_str(), t.host)).collect();
    let mut covered: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for separatrix in &separatrices {
        let reached: BTreeSet<usize> = separatrix
            .iter()
            .map(|id| map.component_of(host_of[id.as_str()]).expect("hosts are components"))
            .collect();
        if reached.len() > 1 {
            return Err(CoverageError::SeparatrixSpansComponents {
                separatrix: separatrix.clone(),
                components: reached
                    .into_iter()
                    .map(|c| map.components[c].clone())
                    .collect(),
            });
        }
        let component = *reached.first().expect("separatrices are nonempty");
        let label = separatrix.first().expect("nonempty").clone();
        covered.entry(component).or_default().push(label);
    }
    let components = map
        .components
        .iter()
        .enumerate()
        .map(|(c, component)| {
            let covered_by = covered.remove(&c).unwrap_or_default();
            ComponentCoverage {
                component: component.clone(),
                pass: !covered_by.is_empty(),
                covered_by,
            }
        })
        .collect();
    Ok(CoverageReport { components })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutsideError {
    UnknownIndex(IndexId),
    NotAnEdge(Stratum),
}

impl fmt::Display for OutsideError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutsideError::UnknownIndex(i) => write!(f, "unknown component index {}", i),
            OutsideError::NotAnEdge(j) => write!(f, "{} is not a size-2 stratum", j),
        }
    }
}

impl core::error::Error for OutsideError {}

/// True iff a 1-path joins the two components without any subsupport entry
/// in `avoided ⊆ H(2)`.
pub fn connected_outside(
    s: &StrataStructure,
    avoided: &BTreeSet<Stratum>,
    i: IndexId,
    j: IndexId,
) -> Result<bool, OutsideError> {
    for e in avoided {
        if e.len() != 2 || !s.contains(e) {
            return Err(OutsideError::NotAnEdge(e.clone()));
        }
    }
    if !s.has_index(i) {
        return Err(OutsideError::UnknownIndex(i));
    }
    if !s.has_index(j) {
        return Err(OutsideError::UnknownIndex(j));
    }
    if i == j {
        return Ok(true);
    }
    let mut seen = BTreeSet::from([i]);
    let mut queue = VecDeque::from([i]);
    while let Some(v) = queue.pop_front() {
        for w in s.neighbors(v) {
            let e = Stratum::singleton(v).union(&Stratum::singleton(w));
            if avoided.contains(&e) {
                continue;
            }
            if w == j {
                return Ok(true);
            }
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    Ok(false)
}

fn components_avoiding(s: &StrataStructure, avoided: &BTreeSet<Stratum>) -> Vec<BTreeSet<IndexId>> {
    let mut seen: BTreeSet<IndexId> = BTreeSet::new();
    let mut out = Vec::new();
    for &start in s.indices() {
        if seen.contains(&start) {
            continue;
        }
        let mut component = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(v) = queue.pop_front() {
            for w in s.neighbors(v) {
                let e = Stratum::singleton(v).union(&Stratum::singleton(w));
                if avoided.contains(&e) {
                    continue;
                }
                if seen.insert(w) {
                    component.insert(w);
                    queue.push_back(w);
                }
            }
        }
        out.push(component);
    }
    out
}

/// Diagnostics for the equivalence "connected outside the nodal set iff
/// connected outside the separator set", together with the induced
/// correspondence of component partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub failing_pairs: Vec<(IndexId, IndexId)>,
    pub nod_components: Vec<BTreeSet<IndexId>>,
    pub sep_components: Vec<BTreeSet<IndexId>>,
    /// Pairs (nodal component, separator component containing it); present
    /// exactly when the correspondence is a bijection.
    pub bijection: Option<Vec<(usize, usize)>>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.failing_pairs.is_empty() && self.bijection.is_some()
    }
}

/// Compares connectivity outside the nodal set against connectivity outside
/// the separator set, for every pair of divisor components. Failures are
/// reported, not raised: the equivalence is a theorem for residue-derived
/// data but only a diagnostic for hand-made data.
pub fn nod_vs_sep_equivalence(
    s: &StrataStructure,
    n: &NodalData,
) -> Result<EquivalenceReport, SeparatorError> {
    let separator = separating_blocks(s, n)?;
    let nod2: BTreeSet<Stratum> = n.level2().into_iter().filter(|e| s.contains(e)).collect();
    let mut failing = Vec::new();
    for (a, &i) in s.indices().iter().enumerate() {
        for &j in s.indices().iter().skip(a + 1) {
            let outside_nod = connected_outside(s, &nod2, i, j).expect("validated inputs");
            let outside_sep =
                connected_outside(s, &separator.separator_set, i, j).expect("validated inputs");
            if outside_nod != outside_sep {
                failing.push((i, j));
            }
        }
    }
    let nod_components = components_avoiding(s, &nod2);
    let sep_components = components_avoiding(s, &separator.separator_set);
    let bijection = if nod_components.len() == sep_components.len() {
        Some(
            nod_components
                .iter()
                .enumerate()
                .map(|(c, component)| {
                    let representative = component.first().expect("nonempty");
                    let target = sep_components
                        .iter()
                        .position(|big| big.contains(representative))
                        .expect("partitions cover the indices");
                    (c, target)
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(EquivalenceReport { failing_pairs: failing, nod_components, sep_components, bijection })
}
