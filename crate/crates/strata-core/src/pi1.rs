//! Edge-path group presentations and simple-connectedness verdicts.
//!
//! Connectivity and simple connectedness of a strata structure only depend
//! on its strata of size at most three, so the fundamental group is the
//! edge-path group of a 2-complex: generators are the dual-graph edges
//! outside a spanning tree, with one relator per size-3 stratum. First
//! homology comes from the integer normal form of the relator matrix.
//! Triviality of a finite presentation is undecidable in general, so the
//! verdict is three-valued and every positive answer carries a replayable
//! certificate.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::parity::components_by_search;
use crate::snf::cokernel_invariant_factors;
use crate::structure::{truncate, IndexId, StrataStructure, Stratum};

/// A signed occurrence of a generator inside a relator word.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SignedGen {
    pub gen: usize,
    pub inverse: bool,
}

impl SignedGen {
    fn inverted(self) -> SignedGen {
        SignedGen { gen: self.gen, inverse: !self.inverse }
    }
}

/// Edge-path presentation of the fundamental group: generators are the
/// non-tree edges of the dual graph, relators come from the filled
/// triangles with tree edges elided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub base: IndexId,
    pub generators: Vec<Stratum>,
    pub tree_edges: Vec<Stratum>,
    pub relators: Vec<Vec<SignedGen>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresentationError {
    UnknownIndex(IndexId),
    NotConnected,
}

impl fmt::Display for PresentationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresentationError::UnknownIndex(i) => write!(f, "unknown component index {}", i),
            PresentationError::NotConnected => write!(f, "dual graph is not connected"),
        }
    }
}

impl core::error::Error for PresentationError {}

fn edge(a: IndexId, b: IndexId) -> Stratum {
    Stratum::singleton(a).union(&Stratum::singleton(b))
}

/// Builds the edge-path presentation with a deterministic spanning tree:
/// breadth-first from the base component, neighbors in ascending order.
pub fn edge_path_presentation(
    s: &StrataStructure,
    base: IndexId,
) -> Result<GroupPresentation, PresentationError> {
    if !s.has_index(base) {
        return Err(PresentationError::UnknownIndex(base));
    }
    let mut tree: Vec<Stratum> = Vec::new();
    let mut visited = alloc::collections::BTreeSet::from([base]);
    let mut queue = alloc::collections::VecDeque::from([base]);
    while let Some(i) = queue.pop_front() {
        for j in s.neighbors(i) {
            if visited.insert(j) {
                tree.push(edge(i, j));
                queue.push_back(j);
            }
        }
    }
    if visited.len() != s.indices().len() {
        return Err(PresentationError::NotConnected);
    }
    tree.sort();
    let generators: Vec<Stratum> = s
        .level(2)
        .filter(|e| tree.binary_search(e).is_err())
        .cloned()
        .collect();
    let generator_of: BTreeMap<&Stratum, usize> =
        generators.iter().enumerate().map(|(g, e)| (e, g)).collect();
    let mut relators = Vec::new();
    for triangle in s.level(3) {
        let [i, j, k] = triangle.members() else { unreachable!("size 3") };
        let mut word = Vec::new();
        // The boundary loop i -> j -> k -> i; the closing edge runs against
        // its min-to-max orientation.
        for (a, b, inverse) in [(i, j, false), (j, k, false), (i, k, true)] {
            let e = edge(*a, *b);
            if let Some(&gen) = generator_of.get(&e) {
                word.push(SignedGen { gen, inverse });
            }
        }
        relators.push(word);
    }
    Ok(GroupPresentation { base, generators, tree_edges: tree, relators })
}

/// Abelian invariant factors of the fundamental group: torsion factors in
/// divisibility order followed by one `0` per free factor. An empty list
/// means the abelianization is trivial.
pub fn h1_invariants(s: &StrataStructure) -> Result<Vec<BigInt>, PresentationError> {
    let Some(&base) = s.indices().first() else {
        return Ok(Vec::new());
    };
    let presentation = edge_path_presentation(s, base)?;
    Ok(h1_of_presentation(&presentation))
}

fn h1_of_presentation(p: &GroupPresentation) -> Vec<BigInt> {
    let cols = p.generators.len();
    let matrix: Vec<Vec<BigInt>> = p
        .relators
        .iter()
        .map(|word| {
            let mut row = alloc::vec![BigInt::ZERO; cols];
            for sg in word {
                row[sg.gen] += if sg.inverse { -1 } else { 1 };
            }
            row
        })
        .collect();
    cokernel_invariant_factors(matrix, cols)
}

/// Default rewriting budget for [`tietze_reduce`].
pub const DEFAULT_TIETZE_BUDGET: usize = 10_000;

/// One step of a Tietze simplification, replayable against the presentation
/// it was recorded from. Relator indices refer to the relator list at the
/// moment the step applies; generator ids are stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TietzeStep {
    /// Remove a relator whose normalized word is empty.
    DropRelator { relator: usize },
    /// Solve a relator for a generator occurring exactly once in it,
    /// substitute everywhere, and drop both.
    Eliminate { relator: usize, generator: usize },
}

/// A recorded simplification run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TietzeReduction {
    pub steps: Vec<TietzeStep>,
    pub rewrite_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TietzeOutcome {
    /// The presentation reduced to no generators and no relators.
    Trivialized(TietzeReduction),
    Stuck {
        reduction: TietzeReduction,
        generators_left: usize,
        relators_left: usize,
    },
}

struct TietzeState {
    live: Vec<bool>,
    relators: Vec<Vec<SignedGen>>,
    rewrites: usize,
}

impl TietzeState {
    fn new(p: &GroupPresentation) -> Self {
        TietzeState {
            live: alloc::vec![true; p.generators.len()],
            relators: p.relators.clone(),
            rewrites: 0,
        }
    }

    /// Free and cyclic reduction of one word.
    fn normalize(word: &mut Vec<SignedGen>, rewrites: &mut usize) {
        let mut reduced: Vec<SignedGen> = Vec::with_capacity(word.len());
        for sg in word.drain(..) {
            if reduced.last().is_some_and(|last| *last == sg.inverted()) {
                reduced.pop();
                *rewrites += 1;
            } else {
                reduced.push(sg);
            }
        }
        while reduced.len() >= 2
            && reduced.first().copied() == reduced.last().map(|sg| sg.inverted())
        {
            reduced.pop();
            reduced.remove(0);
            *rewrites += 1;
        }
        *word = reduced;
    }

    fn normalize_all(&mut self) {
        for word in &mut self.relators {
            Self::normalize(word, &mut self.rewrites);
        }
    }

    /// The word a single occurrence solves the generator to.
    fn solution(&self, relator: usize, generator: usize) -> Vec<SignedGen> {
        let word = &self.relators[relator];
        let pos = word
            .iter()
            .position(|sg| sg.gen == generator)
            .expect("occurrence");
        // Rotate the cyclic word so the occurrence leads: g^e * w ~ 1.
        let mut rest: Vec<SignedGen> = word[pos + 1..].to_vec();
        rest.extend_from_slice(&word[..pos]);
        if word[pos].inverse {
            // g^-1 w = 1  =>  g = w.
            rest
        } else {
            // g w = 1  =>  g = w^-1.
            rest.iter().rev().map(|sg| sg.inverted()).collect()
        }
    }

    fn substitute(&mut self, generator: usize, replacement: &[SignedGen], skip: usize) {
        let inverse_replacement: Vec<SignedGen> =
            replacement.iter().rev().map(|sg| sg.inverted()).collect();
        for (r, word) in self.relators.iter_mut().enumerate() {
            if r == skip || word.iter().all(|sg| sg.gen != generator) {
                continue;
            }
            let mut next = Vec::with_capacity(word.len() + replacement.len());
            for sg in word.iter() {
                if sg.gen != generator {
                    next.push(*sg);
                } else if sg.inverse {
                    next.extend_from_slice(&inverse_replacement);
                    self.rewrites += replacement.len().max(1);
                } else {
                    next.extend_from_slice(replacement);
                    self.rewrites += replacement.len().max(1);
                }
            }
            *word = next;
        }
    }
}

/// Bounded Tietze simplification: normalizes relators, drops empty ones,
/// and eliminates generators that occur exactly once in some relator,
/// shortest relators first.
pub fn tietze_reduce(p: &GroupPresentation, budget: usize) -> TietzeOutcome {
    let mut state = TietzeState::new(p);
    let mut steps = Vec::new();
    loop {
        state.normalize_all();
        if state.rewrites > budget {
            break;
        }
        if let Some(r) = state.relators.iter().position(Vec::is_empty) {
            steps.push(TietzeStep::DropRelator { relator: r });
            state.relators.remove(r);
            continue;
        }
        let mut candidate: Option<(usize, usize, usize)> = None;
        for (r, word) in state.relators.iter().enumerate() {
            for sg in word {
                let occurrences = word.iter().filter(|o| o.gen == sg.gen).count();
                if occurrences == 1 {
                    let key = (word.len(), r, sg.gen);
                    if candidate.is_none_or(|best| key < best) {
                        candidate = Some(key);
                    }
                }
            }
        }
        let Some((_, r, g)) = candidate else {
            break;
        };
        let replacement = state.solution(r, g);
        state.substitute(g, &replacement, r);
        state.relators.remove(r);
        state.live[g] = false;
        state.rewrites += 1;
        steps.push(TietzeStep::Eliminate { relator: r, generator: g });
        if state.rewrites > budget {
            break;
        }
    }
    let generators_left = state.live.iter().filter(|l| **l).count();
    let relators_left = state.relators.len();
    let reduction = TietzeReduction { steps, rewrite_steps: state.rewrites };
    if generators_left == 0 && relators_left == 0 {
        TietzeOutcome::Trivialized(reduction)
    } else {
        TietzeOutcome::Stuck { reduction, generators_left, relators_left }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TietzeReplayError {
    NoSuchRelator { step: usize },
    RelatorNotEmpty { step: usize },
    NotASingleOccurrence { step: usize },
    NotTrivialized,
}

impl fmt::Display for TietzeReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TietzeReplayError::NoSuchRelator { step } => write!(f, "step {}: no such relator", step),
            TietzeReplayError::RelatorNotEmpty { step } => {
                write!(f, "step {}: relator is not empty", step)
            }
            TietzeReplayError::NotASingleOccurrence { step } => {
                write!(f, "step {}: generator does not occur exactly once", step)
            }
            TietzeReplayError::NotTrivialized => {
                write!(f, "replay ended with a nonempty presentation")
            }
        }
    }
}

impl core::error::Error for TietzeReplayError {}

/// Replays a recorded reduction against its presentation, checking each
/// step's side condition and that the end state is the empty presentation.
pub fn replay_tietze(
    p: &GroupPresentation,
    steps: &[TietzeStep],
) -> Result<(), TietzeReplayError> {
    let mut state = TietzeState::new(p);
    for (t, step) in steps.iter().enumerate() {
        state.normalize_all();
        match *step {
            TietzeStep::DropRelator { relator } => {
                let word = state
                    .relators
                    .get(relator)
                    .ok_or(TietzeReplayError::NoSuchRelator { step: t })?;
                if !word.is_empty() {
                    return Err(TietzeReplayError::RelatorNotEmpty { step: t });
                }
                state.relators.remove(relator);
            }
            TietzeStep::Eliminate { relator, generator } => {
                let word = state
                    .relators
                    .get(relator)
                    .ok_or(TietzeReplayError::NoSuchRelator { step: t })?;
                if word.iter().filter(|sg| sg.gen == generator).count() != 1 {
                    return Err(TietzeReplayError::NotASingleOccurrence { step: t });
                }
                let replacement = state.solution(relator, generator);
                state.substitute(generator, &replacement, relator);
                state.relators.remove(relator);
                state.live[generator] = false;
            }
        }
    }
    state.normalize_all();
    if state.live.iter().any(|l| *l) || state.relators.iter().any(|w| !w.is_empty()) {
        return Err(TietzeReplayError::NotTrivialized);
    }
    Ok(())
}

/// Certificate attached to a positive verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pi1Certificate {
    Tietze(TietzeReduction),
    /// Simply connected because it is a structure of a standard blow-up
    /// sequence of the stated length.
    BlowupProvenance { blowups: usize },
}

/// Concrete evidence attached to a negative verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pi1Witness {
    Disconnected { components: usize },
    InvariantFactor(BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pi1Verdict {
    SimplyConnected(Pi1Certificate),
    NotSimplyConnected(Pi1Witness),
    Unknown { generators_left: usize, relators_left: usize },
}

impl Pi1Verdict {
    pub fn is_simply_connected(&self) -> bool {
        matches!(self, Pi1Verdict::SimplyConnected(_))
    }
}

/// A positive verdict carried by construction: every structure produced by
/// a standard blow-up sequence is simply connected, so a trace is itself a
/// certificate for its structures.
pub fn verdict_by_provenance(trace: &crate::blowup::BlowupTrace) -> Pi1Verdict {
    Pi1Verdict::SimplyConnected(Pi1Certificate::BlowupProvenance {
        blowups: trace.steps().len(),
    })
}

/// Decides simple connectedness where it can: connectivity first, then the
/// homology obstruction, then a budgeted Tietze simplification. `Unknown`
/// is the fallback when the presentation resists the budgeted heuristics.
pub fn simply_connected_verdict(s: &StrataStructure, budget: usize) -> Pi1Verdict {
    let s3 = truncate(s, 3);
    if s3.indices().len() <= 1 {
        return Pi1Verdict::SimplyConnected(Pi1Certificate::Tietze(TietzeReduction::default()));
    }
    let components = components_by_search(&s3);
    if components.len() > 1 {
        return Pi1Verdict::NotSimplyConnected(Pi1Witness::Disconnected {
            components: components.len(),
        });
    }
    let base = *s3.indices().first().expect("nonempty");
    let presentation = edge_path_presentation(&s3, base).expect("connected");
    let factors = h1_of_presentation(&presentation);
    if let Some(factor) = factors.first() {
        return Pi1Verdict::NotSimplyConnected(Pi1Witness::InvariantFactor(factor.clone()));
    }
    match tietze_reduce(&presentation, budget) {
        TietzeOutcome::Trivialized(reduction) => {
            Pi1Verdict::SimplyConnected(Pi1Certificate::Tietze(reduction))
        }
        TietzeOutcome::Stuck { generators_left, relators_left, .. } => {
            Pi1Verdict::Unknown { generators_left, relators_left }
        }
    }
}
