//! Exact linear algebra over the rationals.
//!
//! Rank and determinants go through fraction-free elimination on
//! denominator-cleared rows; kernels and solves go through Gauss-Jordan over
//! `Q`. Pivoting is always "first nonzero in column order", so every result
//! here is reproducible.

pub mod bareiss;
mod rref;
mod scaled;
mod types;

use num_bigint::BigInt;
use num_traits::One;

pub use scaled::ScaledPoints;
pub use rref::{kernel_basis, rank_naive, rref, solve, Echelon};
pub use types::{
    format_rational, normalize_primitive, parse_rational, rat, ratio, DependenceWitness,
    RatMatrix, RatVector, Rational,
};

use crate::error::{precondition, Error, Result};

/// Exact rank over `Q`.
pub fn rank(m: &RatMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    bareiss::rank_integer(&m.integer_rows())
}

pub fn determinant(m: &RatMatrix) -> Result<Rational> {
    if m.rows() != m.cols() {
        return precondition(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        ));
    }
    let mut scale = BigInt::one();
    for i in 0..m.rows() {
        let l = m
            .row(i)
            .iter()
            .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        scale *= l;
    }
    let d = bareiss::det_integer(&m.integer_rows());
    Ok(Rational::new(d, scale))
}

pub fn is_nonsingular(m: &RatMatrix) -> bool {
    m.rows() == m.cols() && rank(m) == m.rows()
}

fn check_uniform(points: &[RatVector]) -> Result<usize> {
    let dim = points.first().map_or(0, RatVector::dim);
    for p in points {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
    }
    Ok(dim)
}

/// The `(dim+1) x k` matrix with a row of ones on top of the points as columns.
fn lifted(points: &[RatVector], dim: usize) -> RatMatrix {
    let k = points.len();
    let mut m = RatMatrix::zeros(dim + 1, k);
    for (j, p) in points.iter().enumerate() {
        m.set(0, j, Rational::one());
        for i in 0..dim {
            m.set(i + 1, j, p[i].clone());
        }
    }
    m
}

/// Affine rank of a multiset: the rank of the differences `s_i - s_1`.
pub fn affine_rank(points: &[RatVector]) -> Result<usize> {
    let dim = check_uniform(points)?;
    if points.len() < 2 {
        return Ok(0);
    }
    let diffs: Vec<RatVector> = points[1..].iter().map(|p| p.sub(&points[0])).collect();
    Ok(rank(&RatMatrix::from_columns(&diffs, dim)?))
}

/// Returns a witness iff the multiset of points is affinely dependent.
/// Repeated points count with multiplicity, so any duplicate makes the multiset dependent.
pub fn affinely_dependent(points: &[RatVector]) -> Result<Option<DependenceWitness>> {
    let dim = check_uniform(points)?;
    if points.is_empty() {
        return Ok(None);
    }
    if affine_rank(points)? == points.len() - 1 {
        return Ok(None);
    }
    let kernel = kernel_basis(&lifted(points, dim));
    let first = kernel
        .first()
        .ok_or_else(|| Error::Internal("rank-deficient lift with empty kernel".into()))?;
    let witness = DependenceWitness::new(normalize_primitive(first.entries()));
    debug_assert!(witness.certifies(points));
    Ok(Some(witness))
}

/// For linearly independent `vectors`, returns coordinate positions
/// (0-based, ascending) on which the restricted vectors stay independent.
/// Picks the lexicographically first such set of coordinates.
pub fn independent_row_restriction(vectors: &[RatVector]) -> Result<Vec<usize>> {
    let l = vectors.len();
    let dim = check_uniform(vectors)?;
    let mut echelon = Echelon::new();
    let mut chosen = Vec::with_capacity(l);
    for i in 0..dim {
        if chosen.len() == l {
            break;
        }
        let row: Vec<Rational> = vectors.iter().map(|v| v[i].clone()).collect();
        if echelon.insert(&row) {
            chosen.push(i);
        }
    }
    if chosen.len() < l {
        return precondition(format!(
            "{l} vectors are linearly dependent (rank {})",
            chosen.len()
        ));
    }
    Ok(chosen)
}

/// Rank of the span of a list of vectors.
pub fn span_rank(vectors: &[RatVector]) -> Result<usize> {
    let dim = check_uniform(vectors)?;
    if vectors.is_empty() {
        return Ok(0);
    }
    Ok(rank(&RatMatrix::from_columns(vectors, dim)?))
}

/// Whether `ker a == ker b` for two matrices with the same number of columns.
pub fn same_kernel(a: &RatMatrix, b: &RatMatrix) -> bool {
    if a.cols() != b.cols() {
        return false;
    }
    let kb = kernel_basis(b);
    let ka = kernel_basis(a);
    ka.len() == kb.len()
        && kb.iter().all(|v| a.mul_vec(v).map(|w| w.is_zero()).unwrap_or(false))
        && ka.iter().all(|v| b.mul_vec(v).map(|w| w.is_zero()).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use num_traits::Zero;

    fn m(rows: &[Vec<i64>]) -> RatMatrix {
        RatMatrix::from_int_rows(rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RatMatrix::identity(3)), 3);
        assert_eq!(rank(&m(&[vec![1, 2], vec![2, 4]])), 1);
        assert_eq!(rank(&RatMatrix::zeros(4, 2)), 0);
    }

    #[test]
    fn rank_with_fractions() {
        let a = RatMatrix::from_rows(
            vec![vec![ratio(1, 2), ratio(1, 3)], vec![ratio(3, 2), rat(1)]],
            2,
        )
        .unwrap();
        assert_eq!(rank(&a), 1);
        assert_eq!(determinant(&a).unwrap(), rat(0));
        let b = RatMatrix::from_rows(
            vec![vec![ratio(1, 2), rat(0)], vec![rat(0), ratio(2, 3)]],
            2,
        )
        .unwrap();
        assert_eq!(determinant(&b).unwrap(), ratio(1, 3));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(&[vec![1, 1], vec![1, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], RatVector::from_ints(&[-1, 1]));

        assert!(kernel_basis(&m(&[vec![2, 1], vec![1, 1]])).is_empty());

        let k = kernel_basis(&m(&[vec![1, 0, 0]]));
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v[0].is_zero());
        }
        assert_eq!(span_rank(&k).unwrap(), 2);
    }

    #[test]
    fn affine_dependence_examples() {
        let pts = |v: &[[i64; 2]]| v.iter().map(|p| RatVector::from_ints(p)).collect::<Vec<_>>();

        let w = affinely_dependent(&pts(&[[0, 0], [1, 1], [2, 2]])).unwrap().unwrap();
        assert_eq!(w.coefficients, vec![rat(1), rat(-2), rat(1)]);

        assert!(affinely_dependent(&pts(&[[0, 0], [1, 0], [0, 1]])).unwrap().is_none());

        let w = affinely_dependent(&pts(&[[1, 2], [1, 2]])).unwrap().unwrap();
        assert_eq!(w.coefficients, vec![rat(1), rat(-1)]);
    }

    #[test]
    fn affine_dependence_rejects_mixed_dimensions() {
        let err = affinely_dependent(&[RatVector::from_ints(&[1, 2]), RatVector::from_ints(&[1])]);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn single_point_is_independent() {
        assert!(affinely_dependent(&[RatVector::from_ints(&[3, 4])]).unwrap().is_none());
    }

    #[test]
    fn restriction_examples() {
        let e = |i: usize| {
            let mut v = vec![0; 4];
            v[i] = 1;
            RatVector::from_ints(&v)
        };
        assert_eq!(independent_row_restriction(&[e(0), e(1)]).unwrap(), vec![0, 1]);

        let v = [RatVector::from_ints(&[1, 1, 0]), RatVector::from_ints(&[0, 1, 1])];
        let idx = independent_row_restriction(&v).unwrap();
        assert_eq!(idx, vec![0, 1]);
        // every 2x2 minor of [[1,0],[1,1],[0,1]] is nonzero, so any pair would do
        let minors = [(0, 1), (0, 2), (1, 2)].map(|(a, b)| {
            let r = RatMatrix::from_rows(
                vec![
                    vec![v[0][a].clone(), v[1][a].clone()],
                    vec![v[0][b].clone(), v[1][b].clone()],
                ],
                2,
            )
            .unwrap();
            determinant(&r).unwrap()
        });
        assert!(minors.iter().all(|d| !d.is_zero()));

        assert_eq!(
            independent_row_restriction(&[RatVector::from_ints(&[0, 0, 5])]).unwrap(),
            vec![2]
        );
    }

    #[test]
    fn restriction_rejects_dependent() {
        let v = [RatVector::from_ints(&[1, 2]), RatVector::from_ints(&[2, 4])];
        assert!(matches!(
            independent_row_restriction(&v),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn solve_roundtrip() {
        let a = m(&[vec![2, 1], vec![1, 3]]);
        let x = solve(&a, &RatVector::from_ints(&[3, 5])).unwrap();
        assert_eq!(x, RatVector::new(vec![ratio(4, 5), ratio(7, 5)]));
        assert!(solve(&m(&[vec![1, 2], vec![2, 4]]), &RatVector::from_ints(&[1, 1])).is_none());
    }

    #[test]
    fn echelon_tracks_span() {
        let mut e = Echelon::new();
        assert!(e.insert(&[rat(1), rat(2), rat(0)]));
        assert!(e.insert(&[rat(0), rat(1), rat(1)]));
        assert!(!e.insert(&[rat(1), rat(3), rat(1)]));
        assert!(e.contains(&[rat(2), rat(5), rat(1)]));
        assert!(!e.contains(&[rat(0), rat(0), rat(1)]));
        assert_eq!(e.rank(), 2);
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = RatMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            prop::collection::vec(-9i64..=9, r * c).prop_map(move |v| {
                RatMatrix::new(r, c, v.into_iter().map(rat).collect()).unwrap()
            })
        })
    }

    fn rational_matrix(max: usize) -> impl Strategy<Value = RatMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            prop::collection::vec((-9i64..=9, 1i64..=5), r * c).prop_map(move |v| {
                RatMatrix::new(r, c, v.into_iter().map(|(n, d)| ratio(n, d)).collect()).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn fraction_free_matches_naive(a in small_matrix(8)) {
            prop_assert_eq!(rank(&a), rank_naive(&a));
        }

        #[test]
        fn rank_of_transpose(a in rational_matrix(6)) {
            prop_assert_eq!(rank(&a), rank(&a.transpose()));
        }

        #[test]
        fn rank_nullity(a in rational_matrix(6)) {
            let k = kernel_basis(&a);
            prop_assert_eq!(a.cols(), rank(&a) + k.len());
            for v in &k {
                prop_assert!(a.mul_vec(v).unwrap().is_zero());
            }
        }

        #[test]
        fn determinant_matches_rank(a in small_matrix(5)) {
            if a.rows() == a.cols() {
                let d = determinant(&a).unwrap();
                prop_assert_eq!(d.is_zero(), rank(&a) < a.rows());
            }
        }

        #[test]
        fn dependence_matches_lifted_rank(
            pts in (1usize..=4, 1usize..=6).prop_flat_map(|(dim, k)| {
                prop::collection::vec(prop::collection::vec(-3i64..=3, dim), k)
            })
        ) {
            let points: Vec<RatVector> = pts.iter().map(|p| RatVector::from_ints(p)).collect();
            let dim = points[0].dim();
            let lifted_rank = rank(&lifted(&points, dim));
            let w = affinely_dependent(&points).unwrap();
            prop_assert_eq!(w.is_some(), lifted_rank < points.len());
            if let Some(w) = w {
                prop_assert!(w.certifies(&points));
            }
        }
    }
}
