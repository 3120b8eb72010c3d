//! Point sets rescaled to a common integer lattice for fast subset rank tests.
//!
//! Multiplying every point by one positive integer leaves affine ranks
//! unchanged, so a subset's affine rank is the rank of the integer matrix of
//! differences `p_j - p_0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::bareiss::{rank_bigint, rank_i128};
use super::types::RatVector;

/// Entries up to this many bits take the `i128` path.
const SMALL_BITS: u64 = 62;

#[derive(Clone, Debug)]
pub struct ScaledPoints {
    dim: usize,
    big: Vec<Vec<BigInt>>,
    small: Option<Vec<Vec<i128>>>,
}

impl ScaledPoints {
    /// All points must share one dimension.
    pub fn new(points: &[RatVector]) -> Self {
        let dim = points.first().map_or(0, RatVector::dim);
        let lcm = points
            .iter()
            .flat_map(|p| p.entries())
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let big: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| p.entries().iter().map(|q| q.numer() * (&lcm / q.denom())).collect())
            .collect();
        let small = big
            .iter()
            .all(|p| p.iter().all(|x| x.abs().bits() <= SMALL_BITS))
            .then(|| {
                big.iter()
                    .map(|p| p.iter().map(|x| x.to_i128().unwrap_or_default()).collect())
                    .collect()
            });
        ScaledPoints { dim, big, small }
    }

    pub fn len(&self) -> usize {
        self.big.len()
    }

    pub fn is_empty(&self) -> bool {
        self.big.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Affine rank of the selected points (0 for a single point).
    pub fn affine_rank(&self, idx: &[usize]) -> usize {
        if idx.len() <= 1 {
            return 0;
        }
        if let Some(small) = &self.small {
            let base = &small[idx[0]];
            let mut rows: Vec<Vec<i128>> = (0..self.dim)
                .map(|i| idx[1..].iter().map(|&j| small[j][i] - base[i]).collect())
                .collect();
            if let Some(r) = rank_i128(&mut rows) {
                return r;
            }
        }
        let base = &self.big[idx[0]];
        let mut rows: Vec<Vec<BigInt>> = (0..self.dim)
            .map(|i| idx[1..].iter().map(|&j| &self.big[j][i] - &base[i]).collect())
            .collect();
        rank_bigint(&mut rows)
    }

    /// Whether the selected points form an affinely dependent multiset.
    pub fn dependent(&self, idx: &[usize]) -> bool {
        !idx.is_empty() && self.affine_rank(idx) + 1 < idx.len()
    }
}
