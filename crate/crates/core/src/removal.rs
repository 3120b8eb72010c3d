//! Incidence removal functions and the grid and cube point-set constructions.
//!
//! Elements of the span of the power family are represented as coordinate-wise
//! polynomials of degree `<= m`. Every span element has that form, both
//! dependence identities (lines, combinatorial cubes) hold for any such map,
//! and independence of a fixed non-incident subset is an open condition, so a
//! random map is a valid candidate once it passes exhaustive verification.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combos::scan_first;
use crate::error::{precondition, Error, Result};
use crate::incidence::{is_incident, Incidence, IncidenceOracle, PointTuple};
use crate::linalg::{rat, RatVector, Rational, ScaledPoints};
use crate::monomial::{binomial, enumerate_monomials, FamilySpec, Monomial};

/// A map `R^N -> R^d` whose coordinates are polynomials of degree `<= m`,
/// stored sparsely (no zero coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    spec: FamilySpec,
    coords: Vec<BTreeMap<Monomial, Rational>>,
}

impl PolyMap {
    pub fn zero(spec: &FamilySpec) -> Self {
        PolyMap {
            spec: *spec,
            coords: vec![BTreeMap::new(); spec.d],
        }
    }

    pub fn new(spec: &FamilySpec, coords: Vec<BTreeMap<Monomial, Rational>>) -> Result<Self> {
        if coords.len() != spec.d {
            return Err(Error::DimensionMismatch {
                expected: spec.d,
                found: coords.len(),
            });
        }
        for f in coords.iter().flat_map(BTreeMap::keys) {
            if f.degree() > spec.m || f.max_index() as usize > spec.n {
                return precondition(format!("monomial {f} does not fit {spec}"));
            }
        }
        let coords = coords
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, a)| !a.is_zero()).collect())
            .collect();
        Ok(PolyMap { spec: *spec, coords })
    }

    /// Coordinate `i` is the `i`-th monomial (remaining coordinates zero).
    pub fn from_monomials(spec: &FamilySpec, monomials: &[Monomial]) -> Result<Self> {
        if monomials.len() > spec.d {
            return precondition(format!("{} monomials exceed d = {}", monomials.len(), spec.d));
        }
        let mut coords = vec![BTreeMap::new(); spec.d];
        for (c, f) in coords.iter_mut().zip(monomials) {
            c.insert(f.clone(), Rational::one());
        }
        PolyMap::new(spec, coords)
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn coords(&self) -> &[BTreeMap<Monomial, Rational>] {
        &self.coords
    }

    pub fn eval(&self, x: &RatVector) -> Result<RatVector> {
        if x.dim() != self.spec.n {
            return Err(Error::DimensionMismatch {
                expected: self.spec.n,
                found: x.dim(),
            });
        }
        Ok(RatVector::new(
            self.coords
                .iter()
                .map(|c| {
                    c.iter()
                        .fold(Rational::zero(), |acc, (f, a)| acc + a * f.eval_unchecked(x.entries()))
                })
                .collect(),
        ))
    }

    /// `self + lambda * other`.
    pub fn add_scaled(&self, other: &PolyMap, lambda: &Rational) -> PolyMap {
        let mut coords = self.coords.clone();
        for (c, o) in coords.iter_mut().zip(&other.coords) {
            for (f, a) in o {
                let e = c.entry(f.clone()).or_insert_with(Rational::zero);
                *e += a * lambda;
            }
            c.retain(|_, a| !a.is_zero());
        }
        PolyMap { spec: self.spec, coords }
    }
}

pub fn eval_polymap(f: &PolyMap, x: &RatVector) -> Result<RatVector> {
    f.eval(x)
}

/// Independent uniform integer coefficients in `[-bound, bound]` for every
/// monomial of degree `1..=m` (and degree 0 when `constant_terms`).
pub fn random_polymap_with<R: Rng>(spec: &FamilySpec, bound: i64, constant_terms: bool, rng: &mut R) -> Result<PolyMap> {
    if bound < 1 {
        return precondition("coefficient bound must be at least 1");
    }
    let monomials: Vec<Monomial> = enumerate_monomials(spec.n, spec.m)
        .into_iter()
        .filter(|f| constant_terms || !f.is_empty())
        .collect();
    let coords = (0..spec.d)
        .map(|_| {
            monomials
                .iter()
                .map(|f| (f.clone(), rat(rng.gen_range(-bound..=bound))))
                .collect()
        })
        .collect();
    PolyMap::new(spec, coords)
}

/// [`random_polymap_with`] driven by `ChaCha8Rng` seeded from `seed`, without constant terms.
pub fn random_polymap(spec: &FamilySpec, bound: i64, seed: u64) -> Result<PolyMap> {
    random_polymap_with(spec, bound, false, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemovalOptions {
    pub attempts: usize,
    pub seed: u64,
    pub bound: i64,
    pub workers: usize,
    pub constant_terms: bool,
}

impl Default for RemovalOptions {
    fn default() -> Self {
        RemovalOptions {
            attempts: 32,
            seed: 0,
            bound: 1 << 20,
            workers: 1,
            constant_terms: false,
        }
    }
}

/// Largest number of subsets a removal-function check will sweep.
pub const SUBSET_BUDGET: u128 = 400_000_000;

fn validate_ground_set(x: &[RatVector], spec: &FamilySpec) -> Result<()> {
    if let Some(p) = x.iter().find(|p| p.dim() != spec.n) {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            found: p.dim(),
        });
    }
    let mut seen = HashSet::new();
    if !x.iter().all(|p| seen.insert(p)) {
        return precondition("ground set points must be distinct");
    }
    let total: u128 = (2..=spec.d + 1).map(|k| binomial(x.len() as u64, k as u64)).sum();
    if total > SUBSET_BUDGET {
        return precondition(format!("{total} subsets exceed the verification budget"));
    }
    Ok(())
}

/// The first subset (by size, then lexicographically) whose image dependence
/// under `f` disagrees with its incidence. Covers sizes `2..=d+1`; size 2
/// is injectivity.
pub fn first_removal_violation(x: &[RatVector], spec: &FamilySpec, f: &PolyMap, workers: usize) -> Result<Option<Vec<usize>>> {
    let images = x.iter().map(|p| f.eval(p)).collect::<Result<Vec<_>>>()?;
    let images = ScaledPoints::new(&images);
    let oracle = IncidenceOracle::new(x, spec)?;
    for size in 2..=(spec.d + 1).min(x.len()) {
        let hit = scan_first(x.len(), size, workers, || (), |_, idx| {
            (images.dependent(idx) != oracle.is_incident(idx)).then_some(())
        });
        if let Some((idx, ())) = hit {
            return Ok(Some(idx));
        }
    }
    Ok(None)
}

/// A map in the span that is injective on `x` and sends every non-incident
/// subset of size `<= d+1` to an affinely independent multiset. Random
/// candidates are drawn and verified exhaustively.
pub fn incidence_removal_function(x: &[RatVector], spec: &FamilySpec, opts: &RemovalOptions) -> Result<PolyMap> {
    validate_ground_set(x, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut first_violation = None;
    for _ in 0..opts.attempts {
        let f = random_polymap_with(spec, opts.bound, opts.constant_terms, &mut rng)?;
        match first_removal_violation(x, spec, &f, opts.workers)? {
            None => return Ok(f),
            Some(idx) => {
                first_violation.get_or_insert(idx);
            }
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: opts.attempts,
        subset: first_violation.unwrap_or_default(),
    })
}

/// Safety cap on the number of halvings of `lambda` per correction.
const LAMBDA_HALVINGS: usize = 200;

/// The iterative construction: walk the non-incident subsets in order and,
/// whenever the current map collapses one, add `lambda` times a monomial
/// witness for it with `lambda = 1, 1/2, 1/4, ...` small enough to keep every
/// earlier subset independent.
pub fn deterministic_removal_function(x: &[RatVector], spec: &FamilySpec) -> Result<PolyMap> {
    validate_ground_set(x, spec)?;
    let oracle = IncidenceOracle::new(x, spec)?;
    let targets: Vec<Vec<usize>> = (2..=(spec.d + 1).min(x.len()))
        .flat_map(|k| crate::combos::Combinations::new(x.len(), k))
        .filter(|idx| !oracle.is_incident(idx))
        .collect();

    let images_under = |f: &PolyMap| -> Result<ScaledPoints> {
        Ok(ScaledPoints::new(&x.iter().map(|p| f.eval(p)).collect::<Result<Vec<_>>>()?))
    };
    let tuple = PointTuple::new(x.to_vec())?;
    let mut f = PolyMap::zero(spec);
    let mut images = images_under(&f)?;
    for (i, target) in targets.iter().enumerate() {
        if !images.dependent(target) {
            continue;
        }
        let witness = match is_incident(&tuple.select(target)?, spec)? {
            Incidence::NotIncident(w) => w,
            Incidence::Incident => return Err(Error::Internal(format!("subset {target:?} changed verdict"))),
        };
        let g = PolyMap::from_monomials(spec, &witness.monomials)?;
        let mut lambda = Rational::one();
        let mut fixed = false;
        for _ in 0..LAMBDA_HALVINGS {
            let h = f.add_scaled(&g, &lambda);
            let hi = images_under(&h)?;
            if targets[..=i].iter().all(|t| !hi.dependent(t)) {
                f = h;
                images = hi;
                fixed = true;
                break;
            }
            lambda /= rat(2);
        }
        if !fixed {
            return Err(Error::Internal(format!("no admissible lambda for subset {target:?}")));
        }
    }
    if let Some(idx) = first_removal_violation(x, spec, &f, 1)? {
        return Err(Error::Internal(format!("constructed map fails on subset {idx:?}")));
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// `[m+2]^N -> R^(m+1)`.
    Grid { m: usize, n: usize },
    /// `{0,1}^N -> R^d`.
    Cube { m: usize, d: usize, n: usize },
}

/// Image of a lattice under a removal function. `provenance[i]` is the lattice
/// point mapped to `points[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructedSet {
    pub points: Vec<RatVector>,
    pub provenance: Vec<Vec<i64>>,
    pub spec: FamilySpec,
    pub seed: u64,
    pub kind: Construction,
    pub map: PolyMap,
}

/// All points of `{lo, ..., lo+k-1}^n` in lexicographic order.
pub fn lattice(k: i64, n: usize, lo: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..lo + k).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn construct(source: Vec<Vec<i64>>, spec: FamilySpec, kind: Construction, opts: &RemovalOptions) -> Result<ConstructedSet> {
    let x: Vec<RatVector> = source.iter().map(|p| RatVector::from_ints(p)).collect();
    let map = incidence_removal_function(&x, &spec, opts)?;
    let points = x.iter().map(|p| map.eval(p)).collect::<Result<Vec<_>>>()?;
    Ok(ConstructedSet {
        points,
        provenance: source,
        spec,
        seed: opts.seed,
        kind,
        map,
    })
}

/// `f([m+2]^N) ⊂ R^(m+1)` for a removal function with spec `(N, m+1, m)`.
pub fn grid_construction(m: usize, n: usize, opts: &RemovalOptions) -> Result<ConstructedSet> {
    let spec = FamilySpec::new(n, m + 1, m)?;
    if (m as f64 + 2.0).powi(n as i32) > 1e6 {
        return precondition("lattice too large");
    }
    construct(lattice(m as i64 + 2, n, 1), spec, Construction::Grid { m, n }, opts)
}

/// Whether `2^(m+1) - 1 <= d <= 3 * 2^m - 3`.
pub fn cube_band_admits(m: usize, d: usize) -> bool {
    if m == 0 || m > 60 {
        return false;
    }
    let d = d as u128;
    (1u128 << (m + 1)) - 1 <= d && d + 3 <= 3u128 << m
}

/// `f({0,1}^N) ⊂ R^d` for a removal function with spec `(N, d, m)`.
pub fn cube_construction(m: usize, d: usize, n: usize, opts: &RemovalOptions) -> Result<ConstructedSet> {
    if !cube_band_admits(m, d) {
        return precondition(format!(
            "d = {d} is outside the admissible band for m = {m} (need 2^(m+1) - 1 <= d <= 3*2^m - 3)"
        ));
    }
    if n > 20 {
        return precondition("cube too large");
    }
    let spec = FamilySpec::new(n, d, m)?;
    construct(lattice(2, n, 0), spec, Construction::Cube { m, d, n }, opts)
}
