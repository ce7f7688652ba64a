//! Exact integer linear algebra on small symmetric matrices.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Leading principal minors `D_1, .., D_n` by fraction-free elimination.
///
/// Returns `None` as soon as a pivot vanishes (the remaining minors are then
/// not produced by elimination without pivoting); the index of the zero minor
/// is returned in `Err`.
pub fn leading_minors(a: &[Vec<i64>]) -> Result<Vec<BigInt>, usize> {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = m[k][k].clone();
        if pivot.is_zero() {
            return Err(k + 1);
        }
        minors.push(pivot.clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &pivot * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    Ok(minors)
}

/// Determinant and adjugate by fraction-free Gauss-Jordan elimination.
///
/// The caller guarantees that every leading principal minor is nonzero, so no
/// pivoting is needed. The result satisfies `a * adj = det * I`.
#[allow(clippy::needless_range_loop)]
pub fn det_adjugate(a: &[Vec<i64>]) -> (BigInt, Vec<Vec<BigInt>>) {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = m[k][k].clone();
        assert!(!pivot.is_zero(), "zero pivot in fraction-free elimination");
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = m[i][k].clone();
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let v = &pivot * &m[i][j] - &factor * &m[k][j];
                debug_assert!((&v % &prev).is_zero());
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    // Row k now reads (0 .. D_k@k .. 0 | row k of D_k-scaled inverse); after the
    // last step every diagonal entry equals det.
    let det = prev;
    let adj = m.into_iter().map(|row| row[n..].to_vec()).collect();
    (det, adj)
}

/// Sign of the `k`-th leading minor required by negative definiteness.
pub fn negative_definite_sign_ok(k: usize, minor: &BigInt) -> bool {
    if k % 2 == 1 {
        minor.is_negative()
    } else {
        minor.is_positive()
    }
}
