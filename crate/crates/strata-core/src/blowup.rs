//! Combinatorial standard blow-ups.
//!
//! Blowing up a center `Y` rewrites the strata structure with one fresh
//! index: the strata whose intersection sits inside `Y` disappear, and every
//! stratum meeting `Y` without being contained in it gains a copy joined to
//! the fresh exceptional component. Two center kinds cover the geometric
//! cases whose combinatorics is determined by the structure alone: a free
//! point inside an open stratum and a whole stratum closure `E_J`. An
//! explicit escape hatch lets callers encode other centers by supplying the
//! destroyed and boundary sets directly, validated against the structural
//! constraints.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::structure::{closure, is_one_connected_family, IndexId, StrataStructure, Stratum};

/// A blow-up center, described combinatorially.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlowupCenter {
    /// A closed point of the open stratum `S_host`, distinct from every
    /// deeper intersection. Requires `|host| < dimension`; a point with
    /// `|host| = dimension` is the stratum itself and must be given as a
    /// [`BlowupCenter::StratumCenter`].
    FreePoint { host: Stratum },
    /// The closed stratum `E_core`, with `|core| >= 2`.
    StratumCenter { core: Stratum },
    /// Caller-supplied destroyed (`Z`) and boundary (`B`) sets for centers
    /// whose combinatorics depends on analytic data.
    Explicit {
        destroyed: BTreeSet<Stratum>,
        boundary: BTreeSet<Stratum>,
    },
}

impl BlowupCenter {
    pub fn free_point(ids: impl IntoIterator<Item = u32>) -> Self {
        BlowupCenter::FreePoint { host: Stratum::from_ids(ids) }
    }

    pub fn stratum(ids: impl IntoIterator<Item = u32>) -> Self {
        BlowupCenter::StratumCenter { core: Stratum::from_ids(ids) }
    }
}

impl fmt::Display for BlowupCenter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn ids(f: &mut fmt::Formatter<'_>, j: &Stratum) -> fmt::Result {
            for (t, i) in j.members().iter().enumerate() {
                if t > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i)?;
            }
            Ok(())
        }
        match self {
            BlowupCenter::FreePoint { host } => {
                write!(f, "P[")?;
                ids(f, host)?;
                write!(f, "]")
            }
            BlowupCenter::StratumCenter { core } => {
                write!(f, "S[")?;
                ids(f, core)?;
                write!(f, "]")
            }
            BlowupCenter::Explicit { .. } => write!(f, "X[..]"),
        }
    }
}

/// Which of the three center cases applies inside the level-3 truncation:
/// no destroyed strata (`A`), a destroyed triple stratum (`B`), or a
/// destroyed double stratum (`C`).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    A,
    B,
    C,
}

/// Preview of a blow-up: the destroyed set `Z`, the boundary set `B`, the
/// level-≤2 contact set `A` and the case label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterData {
    pub z_set: BTreeSet<Stratum>,
    pub b_set: BTreeSet<Stratum>,
    pub a_set: BTreeSet<Stratum>,
    pub case: CaseLabel,
}

/// Result of one applied blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupOutcome {
    pub new_structure: StrataStructure,
    pub fresh_index: IndexId,
    pub z_set: BTreeSet<Stratum>,
    pub b_set: BTreeSet<Stratum>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CenterError {
    HostNotInStructure(Stratum),
    /// A free point whose host already has full dimension.
    FreePointHostFull(Stratum),
    /// Stratum centers need at least two components.
    CoreTooSmall(Stratum),
    ExplicitInvalid(ExplicitViolation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExplicitViolation {
    MemberNotInStructure(Stratum),
    Overlap(Stratum),
    DestroyedNotClosed { member: Stratum, missing: Stratum },
    BoundaryNotOpen { member: Stratum, missing: Stratum },
    EmptyStratumNotInBoundary,
    BoundaryMemberTooLarge(Stratum),
    ContactSetNotConnected,
}

impl fmt::Display for CenterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CenterError::HostNotInStructure(j) => write!(f, "center stratum {} not in structure", j),
            CenterError::FreePointHostFull(j) => {
                write!(f, "free point in {} would be the stratum itself", j)
            }
            CenterError::CoreTooSmall(j) => write!(f, "stratum center {} needs size >= 2", j),
            CenterError::ExplicitInvalid(v) => write!(f, "invalid explicit center: {:?}", v),
        }
    }
}

impl core::error::Error for CenterError {}

fn explicit_data(
    s: &StrataStructure,
    destroyed: &BTreeSet<Stratum>,
    boundary: &BTreeSet<Stratum>,
) -> Result<(BTreeSet<Stratum>, BTreeSet<Stratum>), CenterError> {
    use ExplicitViolation as V;
    let fail = |v: V| Err(CenterError::ExplicitInvalid(v));
    for j in destroyed.iter().chain(boundary.iter()) {
        if !s.contains(j) {
            return fail(V::MemberNotInStructure(j.clone()));
        }
    }
    if let Some(j) = destroyed.intersection(boundary).next() {
        return fail(V::Overlap(j.clone()));
    }
    for j in destroyed {
        for h in s.strata() {
            if j.is_subset_of(h) && !destroyed.contains(h) {
                return fail(V::DestroyedNotClosed { member: j.clone(), missing: h.clone() });
            }
        }
    }
    for j in boundary {
        if j.len() >= s.dimension() {
            return fail(V::BoundaryMemberTooLarge(j.clone()));
        }
        for sub in j.subsets() {
            if !boundary.contains(&sub) {
                return fail(V::BoundaryNotOpen { member: j.clone(), missing: sub });
            }
        }
    }
    if !boundary.contains(&Stratum::empty()) {
        return fail(V::EmptyStratumNotInBoundary);
    }
    let contact: BTreeSet<Stratum> = destroyed
        .iter()
        .chain(boundary.iter())
        .filter(|j| j.len() <= 2)
        .cloned()
        .collect();
    if !is_one_connected_family(&contact) {
        return fail(V::ContactSetNotConnected);
    }
    Ok((destroyed.clone(), boundary.clone()))
}

/// Computes the destroyed and boundary sets of a center without applying it.
pub fn compute_center_data(
    s: &StrataStructure,
    center: &BlowupCenter,
) -> Result<CenterData, CenterError> {
    let (z_set, b_set): (BTreeSet<Stratum>, BTreeSet<Stratum>) = match center {
        BlowupCenter::FreePoint { host } => {
            if !s.contains(host) {
                return Err(CenterError::HostNotInStructure(host.clone()));
            }
            if host.len() >= s.dimension() {
                return Err(CenterError::FreePointHostFull(host.clone()));
            }
            let b = host
                .subsets()
                .into_iter()
                .filter(|j| s.contains(j))
                .collect();
            (BTreeSet::new(), b)
        }
        BlowupCenter::StratumCenter { core } => {
            if !s.contains(core) {
                return Err(CenterError::HostNotInStructure(core.clone()));
            }
            if core.len() < 2 {
                return Err(CenterError::CoreTooSmall(core.clone()));
            }
            let z = closure(s, &BTreeSet::from([core.clone()])).expect("core is a stratum");
            let b = s
                .strata()
                .filter(|j| !z.contains(j) && s.contains(&j.union(core)))
                .cloned()
                .collect();
            (z, b)
        }
        BlowupCenter::Explicit { destroyed, boundary } => explicit_data(s, destroyed, boundary)?,
    };
    let a_set: BTreeSet<Stratum> = z_set
        .iter()
        .chain(b_set.iter())
        .filter(|j| j.len() <= 2)
        .cloned()
        .collect();
    let z3_min = z_set.iter().map(Stratum::len).filter(|&l| l <= 3).min();
    let case = match z3_min {
        None => CaseLabel::A,
        Some(3) => CaseLabel::B,
        Some(_) => CaseLabel::C,
    };
    Ok(CenterData { z_set, b_set, a_set, case })
}

/// Applies a blow-up: removes the destroyed strata and joins the boundary
/// strata to one fresh index.
pub fn apply_blowup(
    s: &StrataStructure,
    center: &BlowupCenter,
) -> Result<BlowupOutcome, CenterError> {
    let data = compute_center_data(s, center)?;
    let fresh = IndexId(s.indices().last().map_or(0, |i| i.0 + 1));
    let mut strata: BTreeSet<Stratum> = s
        .strata()
        .filter(|j| !data.z_set.contains(j))
        .cloned()
        .collect();
    for j in &data.b_set {
        let lifted = j.with(fresh);
        assert!(lifted.len() <= s.dimension(), "exceptional stratum exceeds dimension");
        strata.insert(lifted);
    }
    let indices: Vec<IndexId> = s.indices().iter().copied().chain([fresh]).collect();
    Ok(BlowupOutcome {
        new_structure: StrataStructure::new(s.dimension(), indices, strata),
        fresh_index: fresh,
        z_set: data.z_set,
        b_set: data.b_set,
    })
}

/// A blow-up sequence from the bare germ, with every intermediate result.
#[derive(Clone, Debug)]
pub struct BlowupTrace {
    dimension: usize,
    steps: Vec<(BlowupCenter, BlowupOutcome)>,
}

impl BlowupTrace {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn steps(&self) -> &[(BlowupCenter, BlowupOutcome)] {
        &self.steps
    }

    pub fn final_structure(&self) -> StrataStructure {
        self.steps
            .last()
            .map(|(_, o)| o.new_structure.clone())
            .unwrap_or_else(|| StrataStructure::bare_germ(self.dimension))
    }

    /// Every structure along the sequence, starting from the bare germ.
    pub fn structures(&self) -> Vec<StrataStructure> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(StrataStructure::bare_germ(self.dimension));
        out.extend(self.steps.iter().map(|(_, o)| o.new_structure.clone()));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceErrorKind {
    /// The first center must blow up the origin of the bare germ.
    FirstCenterMustBeOrigin,
    /// A later free point off the divisor would disconnect it.
    OriginRevisited,
    Center(CenterError),
}

/// A rejected step of a blow-up sequence, with its position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceError {
    pub step: usize,
    pub kind: SequenceErrorKind,
}

impl fmt::Display for SequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SequenceErrorKind::FirstCenterMustBeOrigin => {
                write!(f, "step {}: first center must be P[]", self.step)
            }
            SequenceErrorKind::OriginRevisited => {
                write!(f, "step {}: P[] is only valid as the first center", self.step)
            }
            SequenceErrorKind::Center(e) => write!(f, "step {}: {}", self.step, e),
        }
    }
}

impl core::error::Error for SequenceError {}

/// Runs a sequence of centers from the bare germ of the given dimension.
pub fn blowup_sequence(
    dimension: usize,
    centers: &[BlowupCenter],
) -> Result<BlowupTrace, SequenceError> {
    let mut current = StrataStructure::bare_germ(dimension);
    let mut steps = Vec::with_capacity(centers.len());
    for (step, center) in centers.iter().enumerate() {
        let is_origin = matches!(center, BlowupCenter::FreePoint { host } if host.is_empty());
        if step == 0 && !is_origin {
            return Err(SequenceError { step, kind: SequenceErrorKind::FirstCenterMustBeOrigin });
        }
        if step > 0 && is_origin {
            return Err(SequenceError { step, kind: SequenceErrorKind::OriginRevisited });
        }
        let outcome = apply_blowup(&current, center)
            .map_err(|e| SequenceError { step, kind: SequenceErrorKind::Center(e) })?;
        current = outcome.new_structure.clone();
        steps.push((center.clone(), outcome));
    }
    Ok(BlowupTrace { dimension, steps })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RandomSequenceError {
    DimensionTooSmall(usize),
    NoBlowups,
}

impl fmt::Display for RandomSequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RandomSequenceError::DimensionTooSmall(d) => {
                write!(f, "random sequences need dimension >= 2, got {}", d)
            }
            RandomSequenceError::NoBlowups => write!(f, "random sequences need n >= 1"),
        }
    }
}

impl core::error::Error for RandomSequenceError {}

/// Reproducible random blow-up sequence: after the initial origin blow-up,
/// each center is drawn uniformly from all valid free-point hosts and all
/// stratum centers of size at least two.
pub fn random_sequence(
    dimension: usize,
    n_blowups: usize,
    seed: u64,
) -> Result<BlowupTrace, RandomSequenceError> {
    if dimension < 2 {
        return Err(RandomSequenceError::DimensionTooSmall(dimension));
    }
    if n_blowups == 0 {
        return Err(RandomSequenceError::NoBlowups);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = Vec::with_capacity(n_blowups);
    centers.push(BlowupCenter::FreePoint { host: Stratum::empty() });
    let mut current = apply_blowup(&StrataStructure::bare_germ(dimension), &centers[0])
        .expect("origin blow-up is always valid")
        .new_structure;
    for _ in 1..n_blowups {
        let mut candidates: Vec<BlowupCenter> = Vec::new();
        for j in current.strata() {
            if !j.is_empty() && j.len() < dimension {
                candidates.push(BlowupCenter::FreePoint { host: j.clone() });
            }
            if j.len() >= 2 {
                candidates.push(BlowupCenter::StratumCenter { core: j.clone() });
            }
        }
        let center = candidates[rng.gen_range(0..candidates.len())].clone();
        current = apply_blowup(&current, &center)
            .expect("enumerated centers are valid")
            .new_structure;
        centers.push(center);
    }
    Ok(blowup_sequence(dimension, &centers).expect("replay of applied centers"))
}
