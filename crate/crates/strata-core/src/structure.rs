//! Combinatorial strata structures.
//!
//! A strata structure is a downward-closed family `H` of subsets of a finite
//! index set `I` that contains every singleton. Each member stands for a
//! nonempty intersection of divisor components; downward closure is the
//! combinatorial shadow of "an intersection is nonempty only if every
//! sub-intersection is". The module also carries the walk notions built on
//! such a family: k-paths, k-connected components, and the elementary
//! homotopies of 1-paths that generate combinatorial homotopy.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

/// Index of a divisor component.
///
/// Indices stay stable across blow-ups: fresh components are always given the
/// next unused index, so an index keeps naming the same strict transform
/// along a whole blow-up sequence.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexId(pub u32);

impl fmt::Display for IndexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A stratum: the set of component indices whose intersection it names.
///
/// Members are kept strictly sorted, so list equality is set equality and
/// the derived lexicographic `Ord` is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stratum {
    members: Vec<IndexId>,
}

/// Attempt to build a stratum from a list with a repeated index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuplicateMember(pub IndexId);

impl fmt::Display for DuplicateMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "duplicate index {} in stratum", self.0)
    }
}

impl core::error::Error for DuplicateMember {}

impl Stratum {
    pub fn empty() -> Self {
        Stratum { members: Vec::new() }
    }

    pub fn singleton(i: IndexId) -> Self {
        Stratum { members: alloc::vec![i] }
    }

    /// Builds a stratum from arbitrary order, rejecting duplicates.
    pub fn new(members: impl IntoIterator<Item = IndexId>) -> Result<Self, DuplicateMember> {
        let mut v: Vec<IndexId> = members.into_iter().collect();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(DuplicateMember(w[0]));
            }
        }
        Ok(Stratum { members: v })
    }

    /// Convenience constructor from raw ids; panics on duplicates.
    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        Stratum::new(ids.into_iter().map(IndexId)).expect("duplicate index")
    }

    pub fn members(&self) -> &[IndexId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: IndexId) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &Stratum) -> bool {
        self.members.iter().all(|i| other.contains(*i))
    }

    pub fn union(&self, other: &Stratum) -> Stratum {
        let mut v = self.members.clone();
        for i in &other.members {
            if !self.contains(*i) {
                v.push(*i);
            }
        }
        v.sort_unstable();
        Stratum { members: v }
    }

    pub fn intersection(&self, other: &Stratum) -> Stratum {
        Stratum {
            members: self
                .members
                .iter()
                .copied()
                .filter(|i| other.contains(*i))
                .collect(),
        }
    }

    /// The stratum with one extra index.
    pub fn with(&self, i: IndexId) -> Stratum {
        let mut v = self.members.clone();
        if !self.contains(i) {
            v.push(i);
            v.sort_unstable();
        }
        Stratum { members: v }
    }

    /// All subsets, in lexicographic bitmask order. Intended for the small
    /// strata of a structure (|J| bounded by the ambient dimension).
    pub fn subsets(&self) -> Vec<Stratum> {
        let n = self.members.len();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0u32..(1u32 << n) {
            let mut v = Vec::new();
            for (b, i) in self.members.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    v.push(*i);
                }
            }
            out.push(Stratum { members: v });
        }
        out
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (t, i) in self.members.iter().enumerate() {
            if t > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i)?;
        }
        write!(f, "}}")
    }
}

/// A combinatorial strata structure: the family `H` over the index set `I`
/// inside an ambient space of the given dimension.
///
/// Construction is permissive; [`validate_structure`] reports every violated
/// invariant of a candidate. All operations in this crate assume a valid
/// structure unless stated otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataStructure {
    dimension: usize,
    indices: Vec<IndexId>,
    strata: BTreeSet<Stratum>,
}

impl StrataStructure {
    pub fn new(
        dimension: usize,
        indices: impl IntoIterator<Item = IndexId>,
        strata: impl IntoIterator<Item = Stratum>,
    ) -> Self {
        let mut indices: Vec<IndexId> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        StrataStructure {
            dimension,
            indices,
            strata: strata.into_iter().collect(),
        }
    }

    /// The structure of the bare germ: no divisor yet, `I = ∅`, `H = {∅}`.
    /// It is the seed of every blow-up sequence.
    pub fn bare_germ(dimension: usize) -> Self {
        StrataStructure {
            dimension,
            indices: Vec::new(),
            strata: BTreeSet::from([Stratum::empty()]),
        }
    }

    /// All subsets of `{0, .., n_indices-1}` of size at most `dimension`.
    pub fn complete(dimension: usize, n_indices: u32) -> Self {
        let indices: Vec<IndexId> = (0..n_indices).map(IndexId).collect();
        let full = Stratum { members: indices.clone() };
        let strata = full
            .subsets()
            .into_iter()
            .filter(|j| j.len() <= dimension)
            .collect();
        StrataStructure { dimension, indices, strata }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn indices(&self) -> &[IndexId] {
        &self.indices
    }

    pub fn strata(&self) -> impl Iterator<Item = &Stratum> {
        self.strata.iter()
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn contains(&self, j: &Stratum) -> bool {
        self.strata.contains(j)
    }

    pub fn has_index(&self, i: IndexId) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// The level set `H(k)`: strata with exactly `k` members.
    pub fn level(&self, k: usize) -> impl Iterator<Item = &Stratum> {
        self.strata.iter().filter(move |j| j.len() == k)
    }

    pub fn max_stratum_size(&self) -> usize {
        self.strata.iter().map(Stratum::len).max().unwrap_or(0)
    }

    /// Edges of the dual graph (`H(2)`) incident to `i`.
    pub fn neighbors(&self, i: IndexId) -> Vec<IndexId> {
        let mut out: Vec<IndexId> = self
            .level(2)
            .filter(|e| e.contains(i))
            .flat_map(|e| e.members().iter().copied())
            .filter(|&j| j != i)
            .collect();
        out.sort_unstable();
        out
    }
}

/// One violated invariant of a candidate strata structure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StructureViolation {
    /// The ambient dimension must be a positive integer.
    DimensionZero,
    /// `∅` must always belong to `H`.
    EmptyStratumMissing,
    /// `{i}` must belong to `H` for every `i ∈ I`.
    SingletonMissing(IndexId),
    /// A stratum references an index outside `I`.
    UnknownIndex { stratum: Stratum, index: IndexId },
    /// A subset of a stratum is absent, so `H` is not downward closed.
    NotDownwardClosed { missing: Stratum, superset: Stratum },
    /// A stratum has more members than the ambient dimension allows.
    Oversize(Stratum),
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureViolation::DimensionZero => write!(f, "dimension must be positive"),
            StructureViolation::EmptyStratumMissing => write!(f, "empty stratum missing"),
            StructureViolation::SingletonMissing(i) => write!(f, "singleton {{{}}} missing", i),
            StructureViolation::UnknownIndex { stratum, index } => {
                write!(f, "stratum {} references unknown index {}", stratum, index)
            }
            StructureViolation::NotDownwardClosed { missing, superset } => {
                write!(f, "subset {} of {} missing", missing, superset)
            }
            StructureViolation::Oversize(j) => write!(f, "stratum {} exceeds dimension", j),
        }
    }
}

/// Everything [`validate_structure`] found wrong, in deterministic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<StructureViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural invariant and reports all violations.
pub fn validate_structure(s: &StrataStructure) -> ValidationReport {
    let mut violations = BTreeSet::new();
    if s.dimension == 0 {
        violations.insert(StructureViolation::DimensionZero);
    }
    if !s.contains(&Stratum::empty()) {
        violations.insert(StructureViolation::EmptyStratumMissing);
    }
    let missing_singletons: BTreeSet<IndexId> = s
        .indices
        .iter()
        .copied()
        .filter(|&i| !s.contains(&Stratum::singleton(i)))
        .collect();
    for &i in &missing_singletons {
        violations.insert(StructureViolation::SingletonMissing(i));
    }
    for j in &s.strata {
        for &i in j.members() {
            if !s.has_index(i) {
                violations.insert(StructureViolation::UnknownIndex {
                    stratum: j.clone(),
                    index: i,
                });
            }
        }
        if s.dimension > 0 && j.len() > s.dimension {
            violations.insert(StructureViolation::Oversize(j.clone()));
        }
        // Subset enumeration is exponential in the stratum size; strata
        // beyond any sensible ambient dimension are already flagged above.
        if j.len() > 20 {
            continue;
        }
        for sub in j.subsets() {
            if s.contains(&sub) {
                continue;
            }
            // A missing singleton of a known index is already reported above.
            if sub.len() == 1 && missing_singletons.contains(&sub.members()[0]) {
                continue;
            }
            violations.insert(StructureViolation::NotDownwardClosed {
                missing: sub,
                superset: j.clone(),
            });
        }
    }
    ValidationReport {
        violations: violations.into_iter().collect(),
    }
}

/// A member of the requested subset is not a stratum of the structure
/// (or not a stratum of the requested size).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberNotInStructure(pub Stratum);

impl fmt::Display for MemberNotInStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stratum {} is not in the structure", self.0)
    }
}

impl core::error::Error for MemberNotInStructure {}

/// `Cl_H(A)`: every stratum of `H` containing some member of `A`.
pub fn closure(
    s: &StrataStructure,
    seed: &BTreeSet<Stratum>,
) -> Result<BTreeSet<Stratum>, MemberNotInStructure> {
    for j in seed {
        if !s.contains(j) {
            return Err(MemberNotInStructure(j.clone()));
        }
    }
    Ok(s
        .strata()
        .filter(|h| seed.iter().any(|j| j.is_subset_of(h)))
        .cloned()
        .collect())
}

/// Keeps the strata of size at most `k`; the result is again a strata
/// structure over the same index set.
pub fn truncate(s: &StrataStructure, k: usize) -> StrataStructure {
    assert!(k >= 1, "truncation level must be at least 1");
    StrataStructure {
        dimension: s.dimension,
        indices: s.indices.clone(),
        strata: s.strata.iter().filter(|j| j.len() <= k).cloned().collect(),
    }
}

/// True iff `entries` is a k-path in `s`: every entry lies in `H(k)` and
/// every consecutive union lies in `H(k+1)`.
pub fn is_k_path(s: &StrataStructure, entries: &[Stratum], k: usize) -> bool {
    if entries.is_empty() {
        return false;
    }
    if entries.iter().any(|j| j.len() != k || !s.contains(j)) {
        return false;
    }
    entries.windows(2).all(|w| {
        let u = w[0].union(&w[1]);
        u.len() == k + 1 && s.contains(&u)
    })
}

/// Shape error when assembling a [`KPath`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KPathError {
    EmptyPath,
    WrongEntrySize { entry: Stratum, expected: usize },
    EndpointMismatch,
    LevelMismatch,
}

impl fmt::Display for KPathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KPathError::EmptyPath => write!(f, "a k-path needs at least one entry"),
            KPathError::WrongEntrySize { entry, expected } => {
                write!(f, "entry {} does not have size {}", entry, expected)
            }
            KPathError::EndpointMismatch => write!(f, "paths do not share an endpoint"),
            KPathError::LevelMismatch => write!(f, "paths have different levels"),
        }
    }
}

impl core::error::Error for KPathError {}

/// A k-path as a value: a nonempty sequence of size-k strata.
///
/// The type only enforces the shape; validity against a host structure
/// (membership of entries and of consecutive unions) is [`is_k_path`].
// A path always has at least one entry, so `len` is a step count and an
// `is_empty` would be constant.
#[allow(clippy::len_without_is_empty)]
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KPath {
    k: usize,
    entries: Vec<Stratum>,
}

impl KPath {
    pub fn new(k: usize, entries: Vec<Stratum>) -> Result<Self, KPathError> {
        if entries.is_empty() {
            return Err(KPathError::EmptyPath);
        }
        for e in &entries {
            if e.len() != k {
                return Err(KPathError::WrongEntrySize {
                    entry: e.clone(),
                    expected: k,
                });
            }
        }
        Ok(KPath { k, entries })
    }

    /// A 1-path through the given component indices.
    pub fn one_path(vertices: impl IntoIterator<Item = IndexId>) -> Result<Self, KPathError> {
        KPath::new(1, vertices.into_iter().map(Stratum::singleton).collect())
    }

    /// Convenience 1-path from raw ids; panics on an empty sequence.
    pub fn walk<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        KPath::one_path(ids.into_iter().map(IndexId)).expect("empty walk")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[Stratum] {
        &self.entries
    }

    pub fn start(&self) -> &Stratum {
        self.entries.first().expect("nonempty")
    }

    pub fn end(&self) -> &Stratum {
        self.entries.last().expect("nonempty")
    }

    /// Number of steps; a single-entry path has length zero.
    pub fn len(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn support(&self) -> BTreeSet<Stratum> {
        self.entries.iter().cloned().collect()
    }

    /// The sequence of consecutive unions, one entry per step.
    pub fn subsupport(&self) -> Vec<Stratum> {
        self.entries.windows(2).map(|w| w[0].union(&w[1])).collect()
    }

    pub fn reverse(&self) -> KPath {
        KPath {
            k: self.k,
            entries: self.entries.iter().rev().cloned().collect(),
        }
    }

    /// Composition with a path starting where this one ends.
    pub fn compose(&self, other: &KPath) -> Result<KPath, KPathError> {
        if self.k != other.k {
            return Err(KPathError::LevelMismatch);
        }
        if self.end() != other.start() {
            return Err(KPathError::EndpointMismatch);
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().skip(1).cloned());
        Ok(KPath { k: self.k, entries })
    }

    pub fn is_valid_in(&self, s: &StrataStructure) -> bool {
        is_k_path(s, &self.entries, self.k)
    }
}

/// Partition of `a ⊆ H(k)` into its k-connected components.
///
/// Two members are adjacent when their union has size k+1 and lies in `H`;
/// components are returned sorted by least member.
pub fn k_connected_components(
    s: &StrataStructure,
    a: &BTreeSet<Stratum>,
    k: usize,
) -> Result<Vec<BTreeSet<Stratum>>, MemberNotInStructure> {
    for j in a {
        if j.len() != k || !s.contains(j) {
            return Err(MemberNotInStructure(j.clone()));
        }
    }
    let members: Vec<&Stratum> = a.iter().collect();
    let mut seen = alloc::vec![false; members.len()];
    let mut components = Vec::new();
    for start in 0..members.len() {
        if seen[start] {
            continue;
        }
        let mut component = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(t) = queue.pop_front() {
            component.insert(members[t].clone());
            for (u, other) in members.iter().enumerate() {
                if seen[u] {
                    continue;
                }
                let joined = members[t].union(other);
                if joined.len() == k + 1 && s.contains(&joined) {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        components.push(component);
    }
    Ok(components)
}

/// 1-connectedness of a family taken as a structure over its own singletons.
///
/// Vertices are the singletons of `a`, edges its size-2 members. Vacuously
/// true without vertices.
pub fn is_one_connected_family(a: &BTreeSet<Stratum>) -> bool {
    let vertices: Vec<IndexId> = a
        .iter()
        .filter(|j| j.len() == 1)
        .map(|j| j.members()[0])
        .collect();
    if vertices.len() <= 1 {
        return true;
    }
    let mut seen = BTreeSet::from([vertices[0]]);
    let mut queue = VecDeque::from([vertices[0]]);
    while let Some(i) = queue.pop_front() {
        for e in a.iter().filter(|j| j.len() == 2 && j.contains(i)) {
            for &j in e.members() {
                if j != i && vertices.contains(&j) && seen.insert(j) {
                    queue.push_back(j);
                }
            }
        }
    }
    seen.len() == vertices.len()
}

/// One rewriting move on a 1-path. Positions refer to entries of the path
/// the move is applied to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomotopyMove {
    /// `(.., v, ..) -> (.., v, via, v, ..)`: inserts `via, v` after `pos`.
    InsertBacktrack { pos: usize, via: IndexId },
    /// `(.., a, b, a, ..) -> (.., a, ..)`: removes entries `pos+1, pos+2`.
    RemoveBacktrack { pos: usize },
    /// `(.., a, b, ..) -> (.., a, via, b, ..)` across a filled triangle.
    InsertVertex { pos: usize, via: IndexId },
    /// `(.., a, c, b, ..) -> (.., a, b, ..)` across a filled triangle.
    RemoveVertex { pos: usize },
}

/// Outcome of the bounded homotopy search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomotopyOutcome {
    /// A replayable move sequence transforming the first path into the second.
    Equivalent(Vec<HomotopyMove>),
    NotFoundWithinBudget { explored: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomotopyError {
    EndpointMismatch,
    NotAOnePath,
    SupportOutsideRegion,
    RegionNotVertices(Stratum),
}

impl fmt::Display for HomotopyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomotopyError::EndpointMismatch => write!(f, "paths join different endpoints"),
            HomotopyError::NotAOnePath => write!(f, "input is not a 1-path of the structure"),
            HomotopyError::SupportOutsideRegion => {
                write!(f, "path support leaves the allowed region")
            }
            HomotopyError::RegionNotVertices(j) => {
                write!(f, "region member {} is not a singleton stratum", j)
            }
        }
    }
}

impl core::error::Error for HomotopyError {}

/// Default node budget for [`elementary_homotopy_search`]. The word problem
/// is unbounded; the search is a desk-scale oracle only.
pub const DEFAULT_HOMOTOPY_BUDGET: usize = 100_000;

struct MoveTables {
    edges: BTreeSet<(IndexId, IndexId)>,
    triangles: BTreeSet<(IndexId, IndexId, IndexId)>,
    region: BTreeSet<IndexId>,
}

impl MoveTables {
    fn edge(&self, a: IndexId, b: IndexId) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn triangle(&self, a: IndexId, b: IndexId, c: IndexId) -> bool {
        let mut t = [a, b, c];
        t.sort_unstable();
        self.triangles.contains(&(t[0], t[1], t[2]))
    }
}

fn apply_move(
    tables: &MoveTables,
    path: &[IndexId],
    m: &HomotopyMove,
) -> Option<Vec<IndexId>> {
    match *m {
        HomotopyMove::InsertBacktrack { pos, via } => {
            let &v = path.get(pos)?;
            if via == v || !tables.region.contains(&via) || !tables.edge(v, via) {
                return None;
            }
            let mut next = path.to_vec();
            next.splice(pos + 1..pos + 1, [via, v]);
            Some(next)
        }
        HomotopyMove::RemoveBacktrack { pos } => {
            if pos + 2 >= path.len() || path[pos] != path[pos + 2] {
                return None;
            }
            let mut next = path.to_vec();
            next.drain(pos + 1..pos + 3);
            Some(next)
        }
        HomotopyMove::InsertVertex { pos, via } => {
            let &a = path.get(pos)?;
            let &b = path.get(pos + 1)?;
            if via == a
                || via == b
                || !tables.region.contains(&via)
                || !tables.edge(a, via)
                || !tables.edge(via, b)
                || !tables.triangle(a, via, b)
            {
                return None;
            }
            let mut next = path.to_vec();
            next.insert(pos + 1, via);
            Some(next)
        }
        HomotopyMove::RemoveVertex { pos } => {
            if pos + 2 >= path.len() {
                return None;
            }
            let (a, c, b) = (path[pos], path[pos + 1], path[pos + 2]);
            if a == b || !tables.edge(a, b) || !tables.triangle(a, c, b) {
                return None;
            }
            let mut next = path.to_vec();
            next.remove(pos + 1);
            Some(next)
        }
    }
}

fn candidate_moves(tables: &MoveTables, path: &[IndexId]) -> Vec<HomotopyMove> {
    let mut moves = Vec::new();
    for pos in 0..path.len().saturating_sub(2) {
        if path[pos] == path[pos + 2] {
            moves.push(HomotopyMove::RemoveBacktrack { pos });
        }
        moves.push(HomotopyMove::RemoveVertex { pos });
    }
    for pos in 0..path.len() {
        for &via in &tables.region {
            moves.push(HomotopyMove::InsertBacktrack { pos, via });
        }
    }
    for pos in 0..path.len().saturating_sub(1) {
        for &via in &tables.region {
            moves.push(HomotopyMove::InsertVertex { pos, via });
        }
    }
    moves
}

fn one_path_vertices(path: &KPath) -> Option<Vec<IndexId>> {
    if path.k() != 1 {
        return None;
    }
    Some(path.entries().iter().map(|j| j.members()[0]).collect())
}

/// Bounded breadth-first search for a sequence of elementary homotopies
/// turning `gamma1` into `gamma2`, with every intermediate support inside
/// `region ⊆ H(1)`. The budget counts explored path nodes.
pub fn elementary_homotopy_search(
    s: &StrataStructure,
    gamma1: &KPath,
    gamma2: &KPath,
    region: &BTreeSet<Stratum>,
    budget: usize,
) -> Result<HomotopyOutcome, HomotopyError> {
    let mut region_vertices = BTreeSet::new();
    for j in region {
        if j.len() != 1 || !s.contains(j) {
            return Err(HomotopyError::RegionNotVertices(j.clone()));
        }
        region_vertices.insert(j.members()[0]);
    }
    if !gamma1.is_valid_in(s) || !gamma2.is_valid_in(s) {
        return Err(HomotopyError::NotAOnePath);
    }
    let start = one_path_vertices(gamma1).ok_or(HomotopyError::NotAOnePath)?;
    let target = one_path_vertices(gamma2).ok_or(HomotopyError::NotAOnePath)?;
    if start.first() != target.first() || start.last() != target.last() {
        return Err(HomotopyError::EndpointMismatch);
    }
    for v in start.iter().chain(target.iter()) {
        if !region_vertices.contains(v) {
            return Err(HomotopyError::SupportOutsideRegion);
        }
    }

    let tables = MoveTables {
        edges: s
            .level(2)
            .map(|e| (e.members()[0], e.members()[1]))
            .collect(),
        triangles: s
            .level(3)
            .map(|t| (t.members()[0], t.members()[1], t.members()[2]))
            .collect(),
        region: region_vertices,
    };

    if start == target {
        return Ok(HomotopyOutcome::Equivalent(Vec::new()));
    }

    let mut parents: BTreeMap<Vec<IndexId>, (Vec<IndexId>, HomotopyMove)> = BTreeMap::new();
    let mut visited = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    let mut explored = 0usize;
    while let Some(current) = queue.pop_front() {
        explored += 1;
        if explored > budget {
            return Ok(HomotopyOutcome::NotFoundWithinBudget { explored: explored - 1 });
        }
        for m in candidate_moves(&tables, &current) {
            let Some(next) = apply_move(&tables, &current, &m) else {
                continue;
            };
            if !visited.insert(next.clone()) {
                continue;
            }
            parents.insert(next.clone(), (current.clone(), m));
            if next == target {
                let mut moves = Vec::new();
                let mut cursor = &next;
                while cursor != &start {
                    let (prev, mv) = parents.get(cursor).expect("recorded parent");
                    moves.push(mv.clone());
                    cursor = prev;
                }
                moves.reverse();
                return Ok(HomotopyOutcome::Equivalent(moves));
            }
            queue.push_back(next);
        }
    }
    Ok(HomotopyOutcome::NotFoundWithinBudget { explored })
}

/// Replays a recorded move sequence, validating every side condition, and
/// returns the resulting 1-path.
pub fn replay_homotopy(
    s: &StrataStructure,
    region: &BTreeSet<Stratum>,
    gamma: &KPath,
    moves: &[HomotopyMove],
) -> Result<KPath, HomotopyError> {
    let mut region_vertices = BTreeSet::new();
    for j in region {
        if j.len() != 1 || !s.contains(j) {
            return Err(HomotopyError::RegionNotVertices(j.clone()));
        }
        region_vertices.insert(j.members()[0]);
    }
    if !gamma.is_valid_in(s) {
        return Err(HomotopyError::NotAOnePath);
    }
    let tables = MoveTables {
        edges: s
            .level(2)
            .map(|e| (e.members()[0], e.members()[1]))
            .collect(),
        triangles: s
            .level(3)
            .map(|t| (t.members()[0], t.members()[1], t.members()[2]))
            .collect(),
        region: region_vertices,
    };
    let mut path = one_path_vertices(gamma).ok_or(HomotopyError::NotAOnePath)?;
    for m in moves {
        path = apply_move(&tables, &path, m).ok_or(HomotopyError::NotAOnePath)?;
    }
    KPath::one_path(path).map_err(|_| HomotopyError::NotAOnePath)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(ids: &[u32]) -> Stratum {
        Stratum::from_ids(ids.iter().copied())
    }

    fn structure(dimension: usize, n: u32, strata: &[&[u32]]) -> StrataStructure {
        StrataStructure::new(
            dimension,
            (0..n).map(IndexId),
            strata.iter().map(|j| st(j)),
        )
    }

    fn interrupted_structure() -> StrataStructure {
        crate::fixtures::interrupted_structure()
    }

    #[test]
    fn validate_accepts_full_square() {
        let s = structure(2, 2, &[&[], &[0], &[1], &[0, 1]]);
        assert!(validate_structure(&s).is_valid());
    }

    #[test]
    fn validate_reports_missing_singleton() {
        let s = structure(2, 2, &[&[], &[0], &[0, 1]]);
        let report = validate_structure(&s);
        assert_eq!(
            report.violations,
            alloc::vec![StructureViolation::SingletonMissing(IndexId(1))]
        );
    }

    #[test]
    fn validate_reports_every_missing_pair() {
        let s = structure(3, 3, &[&[], &[0], &[1], &[2], &[0, 1, 2]]);
        let report = validate_structure(&s);
        let missing: Vec<Stratum> = report
            .violations
            .iter()
            .map(|v| match v {
                StructureViolation::NotDownwardClosed { missing, .. } => missing.clone(),
                other => panic!("unexpected violation {:?}", other),
            })
            .collect();
        assert_eq!(missing, alloc::vec![st(&[0, 1]), st(&[0, 2]), st(&[1, 2])]);
    }

    #[test]
    fn validate_reports_oversize_and_unknown_index() {
        let s = StrataStructure::new(
            1,
            [IndexId(0)],
            [Stratum::empty(), st(&[0]), st(&[0, 7]), st(&[7])],
        );
        let report = validate_structure(&s);
        assert!(report
            .violations
            .contains(&StructureViolation::Oversize(st(&[0, 7]))));
        assert!(report.violations.iter().any(|v| matches!(
            v,
            StructureViolation::UnknownIndex { index: IndexId(7), .. }
        )));
    }

    #[test]
    fn closure_of_an_edge_collects_supersets() {
        let s = interrupted_structure();
        let got = closure(&s, &BTreeSet::from([st(&[1, 2])])).unwrap();
        assert_eq!(
            got,
            BTreeSet::from([st(&[1, 2]), st(&[0, 1, 2]), st(&[1, 2, 3])])
        );
    }

    #[test]
    fn closure_of_nothing_is_nothing() {
        let s = interrupted_structure();
        assert!(closure(&s, &BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn closure_of_a_maximal_stratum_is_itself() {
        let s = StrataStructure::complete(3, 3);
        let top = st(&[0, 1, 2]);
        assert_eq!(
            closure(&s, &BTreeSet::from([top.clone()])).unwrap(),
            BTreeSet::from([top])
        );
    }

    #[test]
    fn closure_rejects_outside_members() {
        let s = interrupted_structure();
        assert_eq!(
            closure(&s, &BTreeSet::from([st(&[0, 3])])),
            Err(MemberNotInStructure(st(&[0, 3])))
        );
    }

    #[test]
    fn truncate_drops_the_top_of_a_simplex() {
        let s = StrataStructure::complete(4, 4);
        let t = truncate(&s, 3);
        assert_eq!(t.len(), s.len() - 1);
        assert!(!t.contains(&st(&[0, 1, 2, 3])));
        assert!(validate_structure(&t).is_valid());
        assert_eq!(truncate(&t, 3), t);
    }

    #[test]
    fn truncate_below_max_size_is_identity() {
        let s = interrupted_structure();
        assert_eq!(truncate(&s, 3), s);
    }

    #[test]
    fn truncate_to_vertices() {
        let s = StrataStructure::complete(2, 2);
        let t = truncate(&s, 1);
        assert_eq!(
            t.strata().cloned().collect::<Vec<_>>(),
            alloc::vec![Stratum::empty(), st(&[0]), st(&[1])]
        );
    }

    #[test]
    fn two_paths_need_their_joining_stratum() {
        let s = StrataStructure::complete(3, 3);
        assert!(is_k_path(&s, &[st(&[0, 2]), st(&[1, 2])], 2));
        let boundary = structure(3, 3, &[&[], &[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]]);
        assert!(!is_k_path(&boundary, &[st(&[0, 1]), st(&[0, 2])], 2));
    }

    #[test]
    fn single_entry_is_a_path() {
        let s = StrataStructure::complete(2, 1);
        assert!(is_k_path(&s, &[st(&[0])], 1));
        assert!(!is_k_path(&s, &[], 1));
    }

    #[test]
    fn repeated_entry_is_not_a_step() {
        let s = StrataStructure::complete(2, 2);
        assert!(!is_k_path(&s, &[st(&[0]), st(&[0])], 1));
    }

    #[test]
    fn nodal_pair_is_two_connected_via_triple() {
        let s = interrupted_structure();
        let a = BTreeSet::from([st(&[0, 2]), st(&[1, 2])]);
        let comps = k_connected_components(&s, &a, 2).unwrap();
        assert_eq!(comps, alloc::vec![a]);
    }

    #[test]
    fn empty_subset_has_empty_partition() {
        let s = interrupted_structure();
        assert!(k_connected_components(&s, &BTreeSet::new(), 2)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn isolated_vertices_stay_apart() {
        let s = structure(2, 2, &[&[], &[0], &[1]]);
        let a: BTreeSet<Stratum> = s.level(1).cloned().collect();
        let comps = k_connected_components(&s, &a, 1).unwrap();
        assert_eq!(comps.len(), 2);
    }

    #[test]
    fn kpath_compose_and_reverse_stay_paths() {
        let s = StrataStructure::complete(3, 3);
        let left = KPath::walk([0, 1]);
        let right = KPath::walk([1, 2]);
        let both = left.compose(&right).unwrap();
        assert!(both.is_valid_in(&s));
        assert!(both.reverse().is_valid_in(&s));
        assert_eq!(both.subsupport(), alloc::vec![st(&[0, 1]), st(&[1, 2])]);
        assert_eq!(
            left.compose(&KPath::walk([2, 1])),
            Err(KPathError::EndpointMismatch)
        );
    }

    #[test]
    fn homotopy_finds_the_triangle_move() {
        let s = StrataStructure::complete(3, 3);
        let region: BTreeSet<Stratum> = s.level(1).cloned().collect();
        let gamma1 = KPath::walk([0, 1]);
        let gamma2 = KPath::walk([0, 2, 1]);
        let got = elementary_homotopy_search(&s, &gamma1, &gamma2, &region, 100).unwrap();
        match got {
            HomotopyOutcome::Equivalent(moves) => {
                assert_eq!(
                    moves,
                    alloc::vec![HomotopyMove::InsertVertex { pos: 0, via: IndexId(2) }]
                );
                let replayed = replay_homotopy(&s, &region, &gamma1, &moves).unwrap();
                assert_eq!(replayed, gamma2);
            }
            other => panic!("expected equivalence, got {:?}", other),
        }
    }

    #[test]
    fn homotopy_of_a_path_with_itself_is_empty() {
        let s = StrataStructure::complete(3, 3);
        let region: BTreeSet<Stratum> = s.level(1).cloned().collect();
        let gamma = KPath::walk([0, 1]);
        assert_eq!(
            elementary_homotopy_search(&s, &gamma, &gamma, &region, 10).unwrap(),
            HomotopyOutcome::Equivalent(Vec::new())
        );
    }

    #[test]
    fn hollow_triangle_defeats_the_search() {
        let s = structure(3, 3, &[&[], &[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]]);
        let region: BTreeSet<Stratum> = s.level(1).cloned().collect();
        let gamma1 = KPath::walk([0, 1]);
        let gamma2 = KPath::walk([0, 2, 1]);
        let got = elementary_homotopy_search(&s, &gamma1, &gamma2, &region, 10_000).unwrap();
        assert!(matches!(got, HomotopyOutcome::NotFoundWithinBudget { .. }));
    }

    #[test]
    fn homotopy_rejects_mismatched_endpoints() {
        let s = StrataStructure::complete(3, 3);
        let region: BTreeSet<Stratum> = s.level(1).cloned().collect();
        assert_eq!(
            elementary_homotopy_search(&s, &KPath::walk([0, 1]), &KPath::walk([0, 2]), &region, 10),
            Err(HomotopyError::EndpointMismatch)
        );
    }

    #[test]
    fn stratum_rejects_duplicates() {
        assert_eq!(
            Stratum::new([IndexId(1), IndexId(0), IndexId(1)]),
            Err(DuplicateMember(IndexId(1)))
        );
    }
}
