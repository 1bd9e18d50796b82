//! Integer Smith normal form, reduced to what homology needs: the diagonal.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

fn smallest_nonzero(m: &[Vec<BigInt>], from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(from) {
        for (j, v) in row.iter().enumerate().skip(from) {
            if v.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if v.abs() < m[bi][bj].abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// Diagonal `d1 | d2 | ...` of the Smith normal form, nonzero entries only.
pub(crate) fn smith_diagonal(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&m, t) else {
            break;
        };
        m.swap(t, pi);
        swap_cols(&mut m, t, pj);
        // Clear row and column t; a nonzero remainder becomes the smaller
        // pivot and the pass repeats.
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = &m[i][t] / &m[t][t];
                for j in t..cols {
                    let delta = &q * &m[t][j];
                    m[i][j] -= delta;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = &m[t][j] / &m[t][t];
                for i in t..rows {
                    let delta = &q * &m[i][t];
                    m[i][j] -= delta;
                }
                if !m[t][j].is_zero() {
                    swap_cols(&mut m, t, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        // Divisibility of the trailing block; folding an offending row into
        // row t re-enters the clearing pass with a smaller eventual pivot.
        let mut offender = None;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            for j in t..cols {
                let v = m[i][j].clone();
                m[t][j] += v;
            }
            continue;
        }
        diagonal.push(m[t][t].abs());
        t += 1;
    }
    diagonal
}

/// Invariant factors of `Z^cols` modulo the row space: the nontrivial
/// torsion factors in divisibility order, followed by one `0` per free rank.
pub(crate) fn cokernel_invariant_factors(m: Vec<Vec<BigInt>>, cols: usize) -> Vec<BigInt> {
    use num_traits::One;
    let diagonal = smith_diagonal(m);
    let rank = diagonal.len();
    let mut factors: Vec<BigInt> = diagonal.into_iter().filter(|d| !d.is_one()).collect();
    factors.resize(factors.len() + cols - rank, BigInt::zero());
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn diagonal_of_a_classic_example() {
        let m = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        assert_eq!(
            smith_diagonal(m),
            alloc::vec![BigInt::from(2), BigInt::from(2), BigInt::from(156)]
        );
    }

    #[test]
    fn zero_matrix_has_empty_diagonal() {
        assert!(smith_diagonal(big(&[&[0, 0], &[0, 0]])).is_empty());
    }

    #[test]
    fn cokernel_mixes_torsion_and_free_rank() {
        let factors = cokernel_invariant_factors(big(&[&[2, 0, 0]]), 3);
        assert_eq!(
            factors,
            alloc::vec![BigInt::from(2), BigInt::from(0), BigInt::from(0)]
        );
        let trivial = cokernel_invariant_factors(big(&[&[1, 0], &[0, 1]]), 2);
        assert!(trivial.is_empty());
    }
}
