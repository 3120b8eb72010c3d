//! Fraction-free (Bareiss) elimination over the integers.
//!
//! After each pivot step every live entry equals a minor of the original
//! matrix, so the division by the previous pivot is exact and entries grow
//! only linearly in bit length. The `i128` variants use checked arithmetic
//! and return `None` on overflow; callers fall back to the `BigInt` variants.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rank of an integer matrix, or `None` if an intermediate overflowed `i128`.
/// The matrix is consumed as scratch space.
pub fn rank_i128(a: &mut [Vec<i128>]) -> Option<usize> {
    Some(eliminate_i128(a)?.0)
}

/// Determinant of a square integer matrix, or `None` on overflow.
pub fn det_i128(a: &mut [Vec<i128>]) -> Option<i128> {
    let n = a.len();
    if n == 0 {
        return Some(1);
    }
    let (rank, swaps) = eliminate_i128(a)?;
    if rank < n {
        return Some(0);
    }
    let d = a[n - 1][n - 1];
    Some(if swaps % 2 == 1 { -d } else { d })
}

fn eliminate_i128(a: &mut [Vec<i128>]) -> Option<(usize, usize)> {
    let rows = a.len();
    if rows == 0 {
        return Some((0, 0));
    }
    let cols = a[0].len();
    let mut prev: i128 = 1;
    let mut r = 0;
    let mut swaps = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (top, rest) = a[r..].split_first_mut().unwrap();
        let piv = top[c];
        for row in rest.iter_mut() {
            let f = row[c];
            for j in c + 1..cols {
                let v = piv
                    .checked_mul(row[j])?
                    .checked_sub(f.checked_mul(top[j])?)?;
                row[j] = v / prev;
            }
            row[c] = 0;
        }
        prev = piv;
        r += 1;
    }
    Some((r, swaps))
}

/// Rank of an integer matrix with arbitrary-precision entries.
pub fn rank_bigint(a: &mut [Vec<BigInt>]) -> usize {
    eliminate_bigint(a).0
}

pub fn det_bigint(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let (rank, swaps) = eliminate_bigint(a);
    if rank < n {
        return BigInt::zero();
    }
    let d = a[n - 1][n - 1].clone();
    if swaps % 2 == 1 {
        -d
    } else {
        d
    }
}

fn eliminate_bigint(a: &mut [Vec<BigInt>]) -> (usize, usize) {
    let rows = a.len();
    if rows == 0 {
        return (0, 0);
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut swaps = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (top, rest) = a[r..].split_first_mut().unwrap();
        let piv = top[c].clone();
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = &piv * &row[j] - &f * &top[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = piv;
        r += 1;
    }
    (r, swaps)
}

/// Tries to narrow a BigInt matrix to `i128`.
pub fn to_i128(a: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    a.iter()
        .map(|row| row.iter().map(ToPrimitive::to_i128).collect())
        .collect()
}

/// Rank via the `i128` fast path when entries allow it.
pub fn rank_integer(a: &[Vec<BigInt>]) -> usize {
    // Entries above 2^60 leave little headroom for even one step.
    let small = a
        .iter()
        .all(|row| row.iter().all(|x| x.abs().bits() <= 60));
    if small {
        if let Some(mut m) = to_i128(a) {
            if let Some(r) = rank_i128(&mut m) {
                return r;
            }
        }
    }
    rank_bigint(&mut a.to_vec())
}

pub fn det_integer(a: &[Vec<BigInt>]) -> BigInt {
    let small = a
        .iter()
        .all(|row| row.iter().all(|x| x.abs().bits() <= 60));
    if small {
        if let Some(mut m) = to_i128(a) {
            if let Some(d) = det_i128(&mut m) {
                return BigInt::from(d);
            }
        }
    }
    det_bigint(&mut a.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank_integer(&big(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])), 3);
        assert_eq!(rank_integer(&big(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_integer(&big(&[&[0, 0], &[0, 0], &[0, 0], &[0, 0]])), 0);
        assert_eq!(rank_integer(&big(&[&[0, 1, 2], &[0, 2, 4], &[0, 0, 1]])), 2);
    }

    #[test]
    fn determinants_with_swaps() {
        assert_eq!(det_integer(&big(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(
            det_integer(&big(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])),
            BigInt::from(4)
        );
        assert_eq!(det_integer(&big(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn overflow_falls_back() {
        let huge = 1i64 << 62;
        let m = big(&[&[huge, 1, 3], &[1, huge, 5], &[7, 11, huge]]);
        let mut narrow = to_i128(&m).unwrap();
        assert_eq!(rank_i128(&mut narrow), None);
        assert_eq!(rank_integer(&m), 3);
        assert_eq!(rank_bigint(&mut m.clone()), 3);
    }
}
