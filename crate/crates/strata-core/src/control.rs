//! Strict-tangent control invariants over exact rational arithmetic.
//!
//! The local control data of a hypersurface at a point consists of its
//! multiplicity, the dimension of the strict tangent space, and a third
//! slot measuring how the strict tangent space sits against the divisor
//! coordinates: dimensions of intersections with coordinate subspaces,
//! maximized lexicographically over all maximal chains of divisor index
//! sets. The three slots compare lexicographically; staying at or below
//! `(1, 2, 0)` is the locally-simple threshold.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_rational::BigRational;
use num_traits::Zero;

/// A spanning set for the orthogonal of the strict tangent space, together
/// with the ambient dimension and the number of divisor coordinates (the
/// first `e` coordinates carry the divisor equations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovectorSpace {
    ambient: usize,
    divisor_count: usize,
    rows: Vec<Vec<BigRational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceError {
    BadDivisorCount { divisor_count: usize, ambient: usize },
    RowLength { expected: usize, got: usize },
}

impl fmt::Display for SpaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceError::BadDivisorCount { divisor_count, ambient } => {
                write!(f, "divisor count {} not in 1..={}", divisor_count, ambient)
            }
            SpaceError::RowLength { expected, got } => {
                write!(f, "row of length {} in ambient dimension {}", got, expected)
            }
        }
    }
}

impl core::error::Error for SpaceError {}

fn rank_of(rows: &[Vec<BigRational>], cols: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = &m[r][col] / &m[rank][col];
                for c in col..cols {
                    let delta = &factor * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

impl CovectorSpace {
    pub fn new(
        ambient: usize,
        divisor_count: usize,
        rows: Vec<Vec<BigRational>>,
    ) -> Result<Self, SpaceError> {
        if divisor_count == 0 || divisor_count > ambient {
            return Err(SpaceError::BadDivisorCount { divisor_count, ambient });
        }
        for row in &rows {
            if row.len() != ambient {
                return Err(SpaceError::RowLength { expected: ambient, got: row.len() });
            }
        }
        Ok(CovectorSpace { ambient, divisor_count, rows })
    }

    /// Convenience constructor from integer rows.
    pub fn from_ints(ambient: usize, divisor_count: usize, rows: &[&[i64]]) -> Self {
        CovectorSpace::new(
            ambient,
            divisor_count,
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
        .expect("well-shaped rows")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn divisor_count(&self) -> usize {
        self.divisor_count
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    /// Rank of the spanning rows; rows may be redundant.
    pub fn rank(&self) -> usize {
        rank_of(&self.rows, self.ambient)
    }

    /// Dimension of the strict tangent space itself.
    pub fn tangent_dim(&self) -> usize {
        self.ambient - self.rank()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexOutOfRange(pub usize);

impl fmt::Display for IndexOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "divisor coordinate index {} out of range", self.0)
    }
}

impl core::error::Error for IndexOutOfRange {}

fn coordinate_row(ambient: usize, index_one_based: usize) -> Vec<BigRational> {
    let mut row = alloc::vec![BigRational::zero(); ambient];
    row[index_one_based - 1] = BigRational::from_integer(1.into());
    row
}

/// Dimension of the intersection of the row span with the span of the
/// coordinate covectors indexed by `j ⊆ {1..e}`, computed by the rank
/// formula `rank(U) + |J| - rank(U ∪ coords)`.
pub fn t_value(u: &CovectorSpace, j: &BTreeSet<usize>) -> Result<usize, IndexOutOfRange> {
    for &idx in j {
        if idx == 0 || idx > u.divisor_count {
            return Err(IndexOutOfRange(idx));
        }
    }
    let mut joined = u.rows.clone();
    for &idx in j {
        joined.push(coordinate_row(u.ambient, idx));
    }
    Ok(u.rank() + j.len() - rank_of(&joined, u.ambient))
}

/// The lexicographically maximal intersection-dimension sequence over all
/// maximal chains of divisor index sets, with one realizing chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSequence {
    pub values: Vec<usize>,
    pub chain: Vec<BTreeSet<usize>>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // Lexicographic order so the realizing chain is deterministic.
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut used = alloc::vec![false; n];
    fn recurse(
        n: usize,
        current: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 1..=n {
            if !used[v - 1] {
                used[v - 1] = true;
                current.push(v);
                recurse(n, current, used, out);
                current.pop();
                used[v - 1] = false;
            }
        }
    }
    recurse(n, &mut current, &mut used, &mut out);
    out
}

/// Brute-force chain maximization over all `e!` maximal chains
/// `{1..e} = J_1 ⊋ J_2 ⊋ ... ⊋ J_e`. Ties are broken towards the
/// lexicographically least realizing chain.
pub fn t_sequence(u: &CovectorSpace) -> TSequence {
    let e = u.divisor_count;
    let mut best: Option<TSequence> = None;
    for removal in permutations(e) {
        let mut chain = Vec::with_capacity(e);
        let mut current: BTreeSet<usize> = (1..=e).collect();
        let mut values = Vec::with_capacity(e);
        for &drop in &removal {
            chain.push(current.clone());
            values.push(t_value(u, &current).expect("indices in range"));
            current.remove(&drop);
        }
        if best
            .as_ref()
            .is_none_or(|b| values > b.values || (values == b.values && chain < b.chain))
        {
            best = Some(TSequence { values, chain });
        }
    }
    best.expect("at least one chain")
}

/// The first entry of the sequence: the intersection dimension with the
/// full divisor coordinate span.
pub fn theta(u: &CovectorSpace) -> usize {
    t_value(u, &(1..=u.divisor_count).collect()).expect("full set in range")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZetaError {
    /// A (tangent dimension, divisor count, sequence) combination outside
    /// the dimension-three case table.
    UnclassifiedTSequence {
        tangent_dim: usize,
        divisor_count: usize,
        values: Vec<usize>,
    },
}

impl fmt::Display for ZetaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ZetaError::UnclassifiedTSequence { tangent_dim, divisor_count, values } = self;
        write!(
            f,
            "no case for tangent dimension {}, divisor count {}, sequence {:?}",
            tangent_dim, divisor_count, values
        )
    }
}

impl core::error::Error for ZetaError {}

/// The four-valued slot of the control invariant, from the case table of
/// the three-dimensional setting. Combinations outside the table are an
/// error rather than an extrapolation.
pub fn zeta(u: &CovectorSpace) -> Result<u8, ZetaError> {
    let d = u.tangent_dim();
    if d <= 1 {
        return Ok(0);
    }
    let ts = t_sequence(u);
    let out_of_table = || ZetaError::UnclassifiedTSequence {
        tangent_dim: d,
        divisor_count: u.divisor_count,
        values: ts.values.clone(),
    };
    if d != 2 {
        return Err(out_of_table());
    }
    if ts.values[0] == 0 {
        return Ok(0);
    }
    match ts.values.as_slice() {
        [1, 0, 0] => Ok(1),
        [1, 0] | [1, 1, 0] => Ok(2),
        [1, 1] | [1, 1, 1] => Ok(3),
        _ => Err(out_of_table()),
    }
}

/// The lexicographic control invariant `(multiplicity, tangent dimension,
/// zeta)`. Field order carries the derived ordering.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ControlInvariant {
    pub multiplicity: u64,
    pub tangent_dim: usize,
    pub zeta: u8,
}

/// The locally-simple threshold: a point is locally simple exactly when its
/// invariant is at most this.
pub const LOCALLY_SIMPLE_THRESHOLD: ControlInvariant =
    ControlInvariant { multiplicity: 1, tangent_dim: 2, zeta: 0 };

/// Packages the invariant from a caller-supplied multiplicity and the
/// linear-algebra slots computed from the covector space.
pub fn control_invariant(
    multiplicity: u64,
    u: &CovectorSpace,
) -> Result<ControlInvariant, ZetaError> {
    Ok(ControlInvariant { multiplicity, tangent_dim: u.tangent_dim(), zeta: zeta(u)? })
}

/// Lexicographic comparison.
pub fn compare_invariants(a: &ControlInvariant, b: &ControlInvariant) -> Ordering {
    a.cmp(b)
}
