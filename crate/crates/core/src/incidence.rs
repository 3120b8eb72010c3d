//! Incidence of point tuples with respect to the family of coordinate-wise
//! powers of affine forms.
//!
//! A tuple `(x_0, ..., x_r)` with `r <= d` is incident exactly when every
//! choice of `r` monomials of degree `<= m` gives a singular matrix
//! `[f_i(x_j) - f_i(x_0)]`. That holds iff the full moment-difference matrix
//! (one row per monomial) has rank below `r`, which is what we test.
//! Tuples with at least `d + 2` points are always incident.

use std::collections::HashSet;

use num_traits::Zero;
use rand::Rng;

use crate::error::{precondition, Error, Result};
use crate::linalg::{self, rat, RatMatrix, RatVector, Rational};
use crate::monomial::{enumerate_monomials, FamilySpec, Monomial};

/// Non-empty ordered tuple of points of uniform dimension; index 0 is the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointTuple {
    points: Vec<RatVector>,
}

impl PointTuple {
    pub fn new(points: Vec<RatVector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return precondition("point tuple must be non-empty");
        };
        let dim = first.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(PointTuple { points })
    }

    pub fn from_ints(points: &[Vec<i64>]) -> Result<Self> {
        Self::new(points.iter().map(|p| RatVector::from_ints(p)).collect())
    }

    pub fn points(&self) -> &[RatVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn select(&self, idx: &[usize]) -> Result<PointTuple> {
        PointTuple::new(idx.iter().map(|&i| self.points[i].clone()).collect())
    }
}

/// `r` monomials whose matrix `[f_i(x_j) - f_i(x_0)]` over the tuple is nonsingular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialWitness {
    pub monomials: Vec<Monomial>,
}

impl MonomialWitness {
    /// The `r x r` matrix with entry `(i, j) = f_i(x_j) - f_i(x_0)`, `j = 1..=r`.
    pub fn matrix(&self, tuple: &PointTuple) -> Result<RatMatrix> {
        let r = tuple.len() - 1;
        if self.monomials.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: self.monomials.len(),
            });
        }
        let mut m = RatMatrix::zeros(r, r);
        for (i, f) in self.monomials.iter().enumerate() {
            let base = f.eval(&tuple.points[0])?;
            for j in 1..=r {
                m.set(i, j - 1, f.eval(&tuple.points[j])? - &base);
            }
        }
        Ok(m)
    }

    pub fn certifies(&self, tuple: &PointTuple) -> bool {
        self.matrix(tuple)
            .map(|m| linalg::is_nonsingular(&m))
            .unwrap_or(false)
    }

    pub fn to_text(&self) -> String {
        self.monomials
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Incidence {
    Incident,
    NotIncident(MonomialWitness),
}

impl Incidence {
    pub fn is_incident(&self) -> bool {
        matches!(self, Incidence::Incident)
    }

    pub fn witness(&self) -> Option<&MonomialWitness> {
        match self {
            Incidence::Incident => None,
            Incidence::NotIncident(w) => Some(w),
        }
    }
}

fn moment_matrix_with(tuple: &PointTuple, monomials: &[Monomial]) -> RatMatrix {
    let r = tuple.len() - 1;
    let mut m = RatMatrix::zeros(monomials.len(), r);
    for (i, f) in monomials.iter().enumerate() {
        let base = f.eval_unchecked(tuple.points[0].entries());
        for j in 1..=r {
            m.set(i, j - 1, f.eval_unchecked(tuple.points[j].entries()) - &base);
        }
    }
    m
}

/// Rows: every monomial of degree `<= m` in graded-lex order. Columns: `x_j - x_0` images, `j = 1..=r`.
pub fn moment_difference_matrix(tuple: &PointTuple, m: usize) -> RatMatrix {
    moment_matrix_with(tuple, &enumerate_monomials(tuple.dim(), m))
}

/// Decides incidence and, when the tuple is not incident, returns a verified witness.
pub fn is_incident(tuple: &PointTuple, spec: &FamilySpec) -> Result<Incidence> {
    Incidence::decide(tuple, spec, &enumerate_monomials(spec.n, spec.m))
}

impl Incidence {
    /// Same as [`is_incident`] with a precomputed monomial list for `spec`.
    pub fn decide(tuple: &PointTuple, spec: &FamilySpec, monomials: &[Monomial]) -> Result<Incidence> {
        if tuple.dim() != spec.n {
            return Err(Error::DimensionMismatch {
                expected: spec.n,
                found: tuple.dim(),
            });
        }
        if tuple.len() >= spec.d + 2 {
            return Ok(Incidence::Incident);
        }
        let r = tuple.len() - 1;
        let m = moment_matrix_with(tuple, monomials);
        if linalg::rank(&m) < r {
            return Ok(Incidence::Incident);
        }
        let columns: Vec<RatVector> = (0..r).map(|j| m.column(j)).collect();
        let rows = linalg::independent_row_restriction(&columns)?;
        let witness = MonomialWitness {
            monomials: rows.into_iter().map(|i| monomials[i].clone()).collect(),
        };
        if !witness.certifies(tuple) {
            return Err(Error::Internal("monomial witness failed verification".into()));
        }
        Ok(Incidence::NotIncident(witness))
    }
}

/// All index subsets of size `<= max_size` that are incident and have no
/// incident proper subset, ordered by size then lexicographically.
pub fn minimal_incident_subsets(tuple: &PointTuple, spec: &FamilySpec, max_size: usize) -> Result<Vec<Vec<usize>>> {
    let monomials = enumerate_monomials(spec.n, spec.m);
    let n = tuple.len();
    let mut minimal = Vec::new();
    // incident subsets of the previous size; incidence is closed under supersets
    let mut prev_incident: HashSet<Vec<usize>> = HashSet::new();
    for size in 1..=max_size.min(n) {
        let mut incident = HashSet::new();
        for subset in crate::combos::Combinations::new(n, size) {
            let has_incident_facet = size > 1
                && (0..size).any(|skip| {
                    let facet: Vec<usize> = subset
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    prev_incident.contains(&facet)
                });
            if has_incident_facet {
                incident.insert(subset);
                continue;
            }
            if Incidence::decide(&tuple.select(&subset)?, spec, &monomials)?.is_incident() {
                minimal.push(subset.clone());
                incident.insert(subset);
            }
        }
        prev_incident = incident;
    }
    Ok(minimal)
}

/// A member of the family itself: coordinate `i` is `(<x, u_i> + c_i)^l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub u: Vec<Vec<Rational>>,
    pub c: Vec<Rational>,
    pub l: u32,
}

impl FamilyMember {
    /// Integer parameters drawn uniformly from `[-bound, bound]`, exponent from `1..=m`.
    pub fn random<R: Rng>(spec: &FamilySpec, bound: i64, rng: &mut R) -> Self {
        let u = (0..spec.d)
            .map(|_| (0..spec.n).map(|_| rat(rng.gen_range(-bound..=bound))).collect())
            .collect();
        let c = (0..spec.d).map(|_| rat(rng.gen_range(-bound..=bound))).collect();
        FamilyMember {
            u,
            c,
            l: rng.gen_range(1..=spec.m as u32),
        }
    }

    pub fn eval(&self, x: &RatVector) -> RatVector {
        RatVector::new(
            self.u
                .iter()
                .zip(&self.c)
                .map(|(u, c)| {
                    let base = u
                        .iter()
                        .zip(x.entries())
                        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                        + c;
                    num_traits::pow(base, self.l as usize)
                })
                .collect(),
        )
    }
}

/// Incidence verdicts for subsets of one fixed ground set, without certificates.
///
/// Stores each point's vector of monomial values (degrees `1..=m`); a subset
/// is incident iff those vectors have affine rank below `|subset| - 1`.
#[derive(Clone, Debug)]
pub struct IncidenceOracle {
    spec: FamilySpec,
    moments: linalg::ScaledPoints,
}

impl IncidenceOracle {
    pub fn new(points: &[RatVector], spec: &FamilySpec) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.dim() != spec.n) {
            return Err(Error::DimensionMismatch {
                expected: spec.n,
                found: p.dim(),
            });
        }
        let monomials: Vec<Monomial> = enumerate_monomials(spec.n, spec.m)
            .into_iter()
            .filter(|f| !f.is_empty())
            .collect();
        let vectors: Vec<RatVector> = points
            .iter()
            .map(|p| RatVector::new(monomials.iter().map(|f| f.eval_unchecked(p.entries())).collect()))
            .collect();
        Ok(IncidenceOracle {
            spec: *spec,
            moments: linalg::ScaledPoints::new(&vectors),
        })
    }

    pub fn is_incident(&self, idx: &[usize]) -> bool {
        if idx.len() >= self.spec.d + 2 {
            return true;
        }
        idx.len() >= 2 && self.moments.affine_rank(idx) + 1 < idx.len()
    }
}
