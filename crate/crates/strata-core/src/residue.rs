//! Exact symbolic residue models of linear logarithmic foliations.
//!
//! A residue is a nonzero rational multiple of a symbol. Symbols are
//! declared either positive real or non-real, jointly linearly independent
//! over the rationals, with every ratio involving a non-real symbol against
//! a different symbol non-real. These declared semantics make the three
//! predicates the corner classification needs exactly decidable: whether a
//! ratio of residues is real, whether it is negative, and whether a
//! nonnegative integer combination can vanish.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::nodal::{NodalData, SignPartition};
use crate::structure::{IndexId, StrataStructure, Stratum};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymbolKind {
    /// A positive real number, irrational and independent from the others.
    RealPositive,
    /// A non-real number whose ratio against any other symbol is non-real.
    NonReal,
}

/// Reference into a [`SymbolTable`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuplicateSymbol(pub String);

impl fmt::Display for DuplicateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "symbol {} already declared", self.0)
    }
}

impl core::error::Error for DuplicateSymbol {}

/// The declared symbols of a model. Symbol 0 is always the unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<(String, SymbolKind)>,
}

impl SymbolTable {
    pub const UNIT: SymbolId = SymbolId(0);

    pub fn new() -> Self {
        SymbolTable {
            symbols: alloc::vec![(String::from("one"), SymbolKind::RealPositive)],
        }
    }

    pub fn add(&mut self, name: &str, kind: SymbolKind) -> Result<SymbolId, DuplicateSymbol> {
        if self.lookup(name).is_some() {
            return Err(DuplicateSymbol(String::from(name)));
        }
        self.symbols.push((String::from(name), kind));
        Ok(SymbolId(self.symbols.len() - 1))
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|(n, _)| n == name).map(SymbolId)
    }

    pub fn kind(&self, id: SymbolId) -> SymbolKind {
        self.symbols[id.0].1
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.0].0
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &str, SymbolKind)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(n, (name, kind))| (SymbolId(n), name.as_str(), *kind))
    }
}

impl Default for SymbolTable {
    fn default() -> Self {
        SymbolTable::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroScale;

impl fmt::Display for ZeroScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "residue scales must be nonzero")
    }
}

impl core::error::Error for ZeroScale {}

/// A residue: `scale * symbol` with a nonzero rational scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue {
    symbol: SymbolId,
    scale: BigRational,
}

impl Residue {
    pub fn new(symbol: SymbolId, scale: BigRational) -> Result<Self, ZeroScale> {
        if scale.is_zero() {
            return Err(ZeroScale);
        }
        Ok(Residue { symbol, scale })
    }

    /// Convenience constructor from an integer ratio.
    pub fn of(symbol: SymbolId, numer: i64, denom: i64) -> Self {
        Residue::new(
            symbol,
            BigRational::new(BigInt::from(numer), BigInt::from(denom)),
        )
        .expect("nonzero scale")
    }

    pub fn symbol(&self) -> SymbolId {
        self.symbol
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }
}

/// A residue per divisor component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueModel {
    table: SymbolTable,
    assignment: BTreeMap<IndexId, Residue>,
}

impl ResidueModel {
    pub fn new(table: SymbolTable) -> Self {
        ResidueModel { table, assignment: BTreeMap::new() }
    }

    pub fn assign(&mut self, i: IndexId, residue: Residue) {
        self.assignment.insert(i, residue);
    }

    pub fn residue(&self, i: IndexId) -> Option<&Residue> {
        self.assignment.get(&i)
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn assignments(&self) -> impl Iterator<Item = (IndexId, &Residue)> {
        self.assignment.iter().map(|(i, r)| (*i, r))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnassignedComponent(pub IndexId);

impl fmt::Display for UnassignedComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "component {} has no residue", self.0)
    }
}

impl core::error::Error for UnassignedComponent {}

/// Classification of a stratum by the reality and sign pattern of its
/// residue ratios.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StratumClass {
    /// Strata of size at most one have no transversal ratios to classify.
    TooSmall,
    /// All ratios real and positive.
    RealSaddle,
    /// All ratios real with at least one negative: signs partition the
    /// stratum.
    NodalCorner(SignPartition),
    /// Some ratio is non-real.
    Complex,
}

/// Classifies a stratum. A ratio is real exactly when the two symbols
/// coincide or both are positive real; its sign is then the product of the
/// scale signs.
pub fn classify_stratum(
    m: &ResidueModel,
    j: &Stratum,
) -> Result<StratumClass, UnassignedComponent> {
    if j.len() <= 1 {
        return Ok(StratumClass::TooSmall);
    }
    let residues: Vec<(IndexId, &Residue)> = j
        .members()
        .iter()
        .map(|&i| m.residue(i).map(|r| (i, r)).ok_or(UnassignedComponent(i)))
        .collect::<Result<_, _>>()?;
    let all_real_positive = residues
        .iter()
        .all(|(_, r)| m.table().kind(r.symbol()) == SymbolKind::RealPositive);
    let all_same_symbol = residues
        .iter()
        .all(|(_, r)| r.symbol() == residues[0].1.symbol());
    if !all_real_positive && !all_same_symbol {
        return Ok(StratumClass::Complex);
    }
    let positive: Vec<IndexId> = residues
        .iter()
        .filter(|(_, r)| r.scale().is_positive())
        .map(|(i, _)| *i)
        .collect();
    let negative: Vec<IndexId> = residues
        .iter()
        .filter(|(_, r)| r.scale().is_negative())
        .map(|(i, _)| *i)
        .collect();
    if positive.is_empty() || negative.is_empty() {
        return Ok(StratumClass::RealSaddle);
    }
    let partition = SignPartition::new(
        Stratum::new(positive).expect("distinct indices"),
        Stratum::new(negative).expect("distinct indices"),
    )
    .expect("both sides inhabited");
    Ok(StratumClass::NodalCorner(partition))
}

/// Collects the nodal corners of a structure into a datum of nodal strata.
/// Sign coherence under restriction makes the subset axiom hold by
/// construction.
pub fn derive_nodal_data(
    s: &StrataStructure,
    m: &ResidueModel,
) -> Result<NodalData, UnassignedComponent> {
    for &i in s.indices() {
        if m.residue(i).is_none() {
            return Err(UnassignedComponent(i));
        }
    }
    let mut data = NodalData::empty();
    for j in s.strata() {
        if let StratumClass::NodalCorner(partition) = classify_stratum(m, j)? {
            data.insert(partition);
        }
    }
    Ok(data)
}

/// Outcome of the resonance test: either no nonnegative integer combination
/// of the residues vanishes, or a verified witness combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resonance {
    NonResonant,
    Resonant { witness: Vec<(IndexId, BigInt)> },
}

/// Looks for `m >= 0`, `m != 0`, with a vanishing combination of residues.
/// Under the declared rational independence of distinct symbols this is
/// solvable exactly when two components share a symbol with opposite scale
/// signs; the witness is built by cross-multiplying the two scales.
pub fn resonance_check(m: &ResidueModel, j: &Stratum) -> Result<Resonance, UnassignedComponent> {
    let mut by_symbol: BTreeMap<SymbolId, (Vec<IndexId>, Vec<IndexId>)> = BTreeMap::new();
    for &i in j.members() {
        let residue = m.residue(i).ok_or(UnassignedComponent(i))?;
        let entry = by_symbol.entry(residue.symbol()).or_default();
        if residue.scale().is_positive() {
            entry.0.push(i);
        } else {
            entry.1.push(i);
        }
    }
    for (_, (positive, negative)) in by_symbol {
        let (Some(&p), Some(&n)) = (positive.first(), negative.first()) else {
            continue;
        };
        let sp = m.residue(p).expect("assigned").scale();
        let sn = m.residue(n).expect("assigned").scale();
        // mp*sp + mn*sn = 0 with sp > 0 > sn.
        let mp = sn.numer().abs() * sp.denom();
        let mn = sp.numer() * sn.denom();
        debug_assert!(
            (BigRational::from(mp.clone()) * sp + BigRational::from(mn.clone()) * sn).is_zero()
        );
        return Ok(Resonance::Resonant { witness: alloc::vec![(p, mp), (n, mn)] });
    }
    Ok(Resonance::NonResonant)
}

/// Result of the simple-corner test, with a diagnostic when the model falls
/// outside the hypotheses that make the test meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleCornerCheck {
    pub simple: bool,
    pub resonance: Resonance,
    pub note: Option<&'static str>,
}

/// A corner is simple exactly when its residues are non-resonant; the
/// residual vector is nonzero by construction (scales are nonzero).
pub fn is_gh_simple_corner(
    m: &ResidueModel,
    j: &Stratum,
) -> Result<SimpleCornerCheck, UnassignedComponent> {
    let resonance = resonance_check(m, j)?;
    Ok(match resonance {
        Resonance::NonResonant => SimpleCornerCheck { simple: true, resonance, note: None },
        Resonance::Resonant { .. } => SimpleCornerCheck {
            simple: false,
            resonance,
            note: Some("resonant residues of radial/dicritical type: the corner equivalences do not apply"),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonPositiveEigenvalue;

impl fmt::Display for NonPositiveEigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "transversal eigenvalue must be positive")
    }
}

impl core::error::Error for NonPositiveEigenvalue {}

/// Number of blow-ups that turn a trace nodal component with transversal
/// eigenvalue `lambda > 0` into corners: the unique `k` with
/// `k-1 < lambda <= k`. Each blow-up lowers the eigenvalue by one; integer
/// inputs sit exactly on the boundary of the last step.
pub fn nodal_reduction_steps(lambda: &BigRational) -> Result<BigInt, NonPositiveEigenvalue> {
    if !lambda.is_positive() {
        return Err(NonPositiveEigenvalue);
    }
    Ok(lambda.ceil().to_integer())
}

/// A reproducible random model over the given components, biased towards
/// positive real symbols so nodal corners are common.
pub fn random_model(indices: &[IndexId], seed: u64) -> ResidueModel {
    let mut table = SymbolTable::new();
    let lambda = table.add("lambda", SymbolKind::RealPositive).expect("fresh");
    let mu = table.add("mu", SymbolKind::RealPositive).expect("fresh");
    let alpha = table.add("alpha", SymbolKind::NonReal).expect("fresh");
    let beta = table.add("beta", SymbolKind::NonReal).expect("fresh");
    let symbols = [
        SymbolTable::UNIT,
        SymbolTable::UNIT,
        lambda,
        lambda,
        mu,
        mu,
        alpha,
        beta,
    ];
    let magnitudes: [(i64, i64); 5] = [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = ResidueModel::new(table);
    for &i in indices {
        let symbol = symbols[rng.gen_range(0..symbols.len())];
        let (numer, denom) = magnitudes[rng.gen_range(0..magnitudes.len())];
        let sign = if rng.gen_range(0..2) == 0 { 1 } else { -1 };
        model.assign(i, Residue::of(symbol, sign * numer, denom));
    }
    model
}
