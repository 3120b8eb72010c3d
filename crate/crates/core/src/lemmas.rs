//! Randomized and exhaustive checks of the constructive lemmas. Every check
//! re-verifies results with Gauss-Jordan rank rather than the Bareiss path the
//! constructions use.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combos::Combinations;
use crate::error::{Error, Result};
use crate::incidence::{is_incident, FamilyMember, Incidence, PointTuple};
use crate::linalg::{
    affinely_dependent, kernel_basis, normalize_primitive, rank_naive, ratio, same_kernel, RatMatrix, RatVector,
    Rational,
};
use crate::monomial::{enumerate_monomials, FamilySpec, Monomial};
use crate::removal::{lattice, random_polymap};
use crate::sets::{
    construct_sets, construct_sets_nonempty, extend_sets, incidence_matrix, remove_rows_preserving_kernel, NullityMode,
    Set, SetFamily,
};
use crate::verify::{
    cube_alternating_sum, finite_difference_coeffs, identity_check_cube, line_alternating_sum, power_matrix,
};
use crate::witness::{construct_independent_functions, evaluation_matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    Witness,
    WitnessCollinear,
    Compression,
    CompressionNonempty,
    Extension,
    RowRemoval,
    CubeIdentity,
    LineIdentity,
    CubeSum,
    FiniteDifference,
    IncidenceSampling,
    UnionBound,
}

impl Lemma {
    pub const ALL: [Lemma; 12] = [
        Lemma::Witness,
        Lemma::WitnessCollinear,
        Lemma::Compression,
        Lemma::CompressionNonempty,
        Lemma::Extension,
        Lemma::RowRemoval,
        Lemma::CubeIdentity,
        Lemma::LineIdentity,
        Lemma::CubeSum,
        Lemma::FiniteDifference,
        Lemma::IncidenceSampling,
        Lemma::UnionBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Witness => "witness",
            Lemma::WitnessCollinear => "witness-collinear",
            Lemma::Compression => "compression",
            Lemma::CompressionNonempty => "compression-nonempty",
            Lemma::Extension => "extension",
            Lemma::RowRemoval => "row-removal",
            Lemma::CubeIdentity => "cube-identity",
            Lemma::LineIdentity => "line-identity",
            Lemma::CubeSum => "cube-sum",
            Lemma::FiniteDifference => "finite-difference",
            Lemma::IncidenceSampling => "incidence-sampling",
            Lemma::UnionBound => "union-bound",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("unknown lemma `{s}`"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "lemma={} trials={} failures={} pass={}",
            self.lemma,
            self.trials,
            self.failures,
            self.passed()
        )
    }
}

struct Tally {
    trials: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            trials: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    fn finish(self, lemma: Lemma) -> LemmaReport {
        LemmaReport {
            lemma,
            trials: self.trials,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

/// Runs `trials` instances of `lemma` from `seed` (exhaustive checks ignore `trials`).
pub fn run_lemma_check(lemma: Lemma, trials: usize, seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new();
    match lemma {
        Lemma::Witness => {
            for _ in 0..trials {
                let (ys, m) = witness_instance(&mut rng);
                let ok = match construct_independent_functions(&ys, m) {
                    Ok(fs) => witness_is_valid(&fs, &ys, m),
                    Err(_) => false,
                };
                t.record(ok, || format!("m={m} ys={}", show_vectors(&ys)));
            }
        }
        Lemma::WitnessCollinear => {
            for _ in 0..trials {
                let (ys, m) = collinear_instance(&mut rng);
                let ok = brute_force_witnesses(&ys, m) == 0;
                t.record(ok, || format!("m={m} ys={}", show_vectors(&ys)));
            }
        }
        Lemma::Compression => {
            for _ in 0..trials {
                for mode in [NullityMode::ExactZero, NullityMode::AtMostOne] {
                    let m = rng.gen_range(1..=3);
                    let r = rng.gen_range(1..mode.bound(m) as usize);
                    let x = random_family(&mut rng, 6, r, false);
                    let ok = match construct_sets(&x, m, mode) {
                        Ok(s) => s.len() == r && s.max_size() <= m && independent_nullity(&x, &s) <= mode.max_nullity(),
                        Err(_) => false,
                    };
                    t.record(ok, || format!("{mode:?} m={m} X={x}"));
                }
            }
        }
        Lemma::CompressionNonempty => {
            for _ in 0..trials {
                for mode in [NullityMode::ExactZero, NullityMode::AtMostOne] {
                    let m = rng.gen_range(1..=3);
                    let top = mode.bound(m) as usize - 1;
                    if top <= 1 {
                        continue;
                    }
                    let r = rng.gen_range(1..top);
                    let x = random_family(&mut rng, 6, r, true);
                    let ok = match construct_sets_nonempty(&x, m, mode) {
                        Ok(s) => {
                            s.len() == r
                                && s.max_size() <= m
                                && s.sets.iter().all(|a| !a.is_empty())
                                && independent_nullity(&x, &s) <= mode.max_nullity()
                        }
                        Err(_) => false,
                    };
                    t.record(ok, || format!("{mode:?} m={m} X={x}"));
                }
            }
        }
        Lemma::Extension => {
            for _ in 0..trials {
                let m = rng.gen_range(1..=3);
                let nonempty = rng.gen_bool(0.5);
                let top = NullityMode::AtMostOne.bound(m) as usize - usize::from(nonempty);
                let r = rng.gen_range(1..top);
                let x = random_family(&mut rng, 6, r, nonempty);
                let tmax = r.min(NullityMode::ExactZero.bound(m) as usize - 1 - usize::from(nonempty));
                let tlen = rng.gen_range(0..=tmax);
                let head = SetFamily::new(x.sets[..tlen].to_vec());
                let prefix = if nonempty {
                    construct_sets_nonempty(&head, m, NullityMode::ExactZero)?
                } else {
                    construct_sets(&head, m, NullityMode::ExactZero)?
                };
                let ok = match extend_sets(&x, &prefix, m, nonempty) {
                    Ok(ext) => {
                        let mut all = prefix.clone();
                        all.sets.extend(ext.sets.iter().cloned());
                        all.len() == r
                            && ext.max_size() <= m
                            && (!nonempty || ext.sets.iter().all(|a| !a.is_empty()))
                            && independent_nullity(&x, &all) <= 1
                    }
                    Err(_) => false,
                };
                t.record(ok, || format!("m={m} nonempty={nonempty} X={x} prefix={prefix}"));
            }
        }
        Lemma::RowRemoval => {
            for _ in 0..trials {
                let (m, protected) = row_removal_instance(&mut rng);
                let ok = match remove_rows_preserving_kernel(&m, protected) {
                    Ok(keep) => {
                        keep.len() == m.cols()
                            && (0..protected).all(|i| keep.contains(&i))
                            && same_kernel(&m, &m.select_rows(&keep))
                    }
                    Err(_) => false,
                };
                t.record(ok, || format!("t={protected} rows={:?}", m.row_vectors()));
            }
        }
        Lemma::CubeIdentity => {
            for _ in 0..trials {
                let m = rng.gen_range(1..=4);
                let a: Vec<Rational> = (0..m + 2).map(|_| random_rational(&mut rng)).collect();
                for l in 0..=m {
                    let ok = identity_check_cube(&a, l).map(|v| v.is_zero()).unwrap_or(false);
                    t.record(ok, || format!("m={m} l={l} a={a:?}"));
                }
            }
        }
        Lemma::LineIdentity | Lemma::CubeSum => {
            for _ in 0..trials {
                let n = rng.gen_range(1..=4);
                let m = rng.gen_range(1..=3);
                let spec = FamilySpec::new(n, rng.gen_range(1..=3), m)?;
                let f = random_polymap(&spec, 1000, rng.gen())?;
                let x = random_vector(&mut rng, n);
                let sum = if lemma == Lemma::LineIdentity {
                    line_alternating_sum(&f, &x, &random_vector(&mut rng, n))?
                } else {
                    let xs: Vec<RatVector> = (0..=m).map(|_| random_vector(&mut rng, n)).collect();
                    cube_alternating_sum(&f, &x, &xs)?
                };
                t.record(sum.is_zero(), || format!("spec={spec} x={x}"));
            }
        }
        Lemma::FiniteDifference => {
            for m in 0..=6 {
                let k = kernel_basis(&power_matrix(m));
                let ok = k.len() == 1 && normalize_primitive(k[0].entries()) == finite_difference_coeffs(m);
                t.record(ok, || format!("m={m}"));
            }
        }
        Lemma::IncidenceSampling => {
            let samples = trials.max(1);
            let grounds = [(lattice(2, 3, 0), 3usize), (lattice(3, 2, 1), 2)];
            for (ground, n) in grounds {
                let pts: Vec<RatVector> = ground.iter().map(|p| RatVector::from_ints(p)).collect();
                for m in 1..=2 {
                    let spec = FamilySpec::new(n, 3, m)?;
                    for size in 1..=(spec.d + 1).min(pts.len()) {
                        for idx in Combinations::new(pts.len(), size) {
                            let tuple = PointTuple::new(idx.iter().map(|&i| pts[i].clone()).collect())?;
                            let ok = sampling_agrees(&tuple, &spec, samples, &mut rng)?;
                            t.record(ok, || format!("spec={spec} tuple={idx:?}"));
                        }
                    }
                }
            }
        }
        Lemma::UnionBound => {
            for n in 1..=4 {
                let spec = FamilySpec::new(n, 3, 1)?;
                let pts: Vec<RatVector> = lattice(2, n, 0).iter().map(|p| RatVector::from_ints(p)).collect();
                let tuple = PointTuple::new(pts)?;
                let minimal = crate::incidence::minimal_incident_subsets(&tuple, &spec, 4)?;
                for (i, a) in minimal.iter().enumerate() {
                    for b in &minimal[i + 1..] {
                        let union: HashSet<usize> = a.iter().chain(b).copied().collect();
                        t.record(union.len() >= 6, || format!("N={n} {a:?} {b:?}"));
                    }
                }
            }
        }
    }
    Ok(t.finish(lemma))
}

fn show_vectors(v: &[RatVector]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(-50..=50), rng.gen_range(1..=12))
}

fn random_vector<R: Rng>(rng: &mut R, n: usize) -> RatVector {
    RatVector::new((0..n).map(|_| random_rational(rng)).collect())
}

/// Nullity of `I(X; S)` via Gauss-Jordan.
pub fn independent_nullity(x: &SetFamily, s: &SetFamily) -> usize {
    let m = incidence_matrix(x, s).matrix;
    m.cols() - rank_naive(&m)
}

/// `r` distinct random subsets of `[ground]`, optionally all non-empty.
pub fn random_family<R: Rng>(rng: &mut R, ground: u32, r: usize, nonempty: bool) -> SetFamily {
    let mut masks: Vec<u32> = (u32::from(nonempty)..1 << ground).collect();
    masks.shuffle(rng);
    SetFamily::new(
        masks[..r]
            .iter()
            .map(|&mask| (1..=ground).filter(|i| mask >> (i - 1) & 1 == 1).collect::<Set>())
            .collect(),
    )
}

/// Random vectors without zero coordinates meeting `rank + m - 1 >= r`.
pub fn witness_instance<R: Rng>(rng: &mut R) -> (Vec<RatVector>, usize) {
    loop {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=n);
        let basis: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let r = rng.gen_range(1..=k + m - 1);
        let ys: Vec<RatVector> = (0..r)
            .map(|_| {
                let c: Vec<i64> = (0..k).map(|_| rng.gen_range(-3..=3)).collect();
                RatVector::from_ints(&(0..n).map(|i| (0..k).map(|j| c[j] * basis[j][i]).sum()).collect::<Vec<_>>())
            })
            .collect();
        let distinct = ys.iter().collect::<HashSet<_>>().len() == r;
        let nonzero = ys.iter().all(|y| y.entries().iter().all(|q| !q.is_zero()));
        if !distinct || !nonzero {
            continue;
        }
        let rank = rank_naive(&RatMatrix::from_columns(&ys, n).expect("uniform dimension"));
        if rank + m > r {
            return (ys, m);
        }
    }
}

fn witness_is_valid(fs: &[Monomial], ys: &[RatVector], m: usize) -> bool {
    let n = ys[0].dim();
    fs.len() == ys.len()
        && fs.iter().all(|f| !f.is_empty() && f.degree() <= m && f.max_index() as usize <= n)
        && evaluation_matrix(fs, ys).is_ok_and(|e| rank_naive(&e) == ys.len())
}

/// `m + 1` distinct multiples of one vector with no zero coordinates.
pub fn collinear_instance<R: Rng>(rng: &mut R) -> (Vec<RatVector>, usize) {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let base: Vec<i64> = (0..n)
        .map(|_| rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    let mut scales: BTreeSet<i64> = BTreeSet::new();
    while scales.len() < m + 1 {
        let s = rng.gen_range(-6..=6);
        if s != 0 {
            scales.insert(s);
        }
    }
    let ys = scales
        .into_iter()
        .map(|s| RatVector::from_ints(&base.iter().map(|b| b * s).collect::<Vec<_>>()))
        .collect();
    (ys, m)
}

/// Number of `r`-sets of non-empty monomials of degree `<= m` with a nonsingular evaluation matrix.
pub fn brute_force_witnesses(ys: &[RatVector], m: usize) -> usize {
    let monos: Vec<Monomial> = enumerate_monomials(ys[0].dim(), m)
        .into_iter()
        .filter(|f| !f.is_empty())
        .collect();
    Combinations::new(monos.len(), ys.len())
        .filter(|c| {
            let fs: Vec<Monomial> = c.iter().map(|&i| monos[i].clone()).collect();
            evaluation_matrix(&fs, ys).is_ok_and(|e| rank_naive(&e) == ys.len())
        })
        .count()
}

/// `(r + t) x r` integer matrix whose first `t` rows are independent.
pub fn row_removal_instance<R: Rng>(rng: &mut R) -> (RatMatrix, usize) {
    loop {
        let r = rng.gen_range(1..=6);
        let t = rng.gen_range(0..=r);
        let mut rows: Vec<Vec<i64>> = (0..r + t).map(|_| (0..r).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        if r + t >= 2 && rng.gen_bool(0.3) {
            let j = rng.gen_range(t..r + t);
            let i = rng.gen_range(0..r + t);
            rows[j] = rows[i].clone();
        }
        let m = RatMatrix::from_int_rows(&rows).expect("rectangular");
        let head: Vec<usize> = (0..t).collect();
        if rank_naive(&m.select_rows(&head)) == t {
            return (m, t);
        }
    }
}

/// Incident tuples stay dependent under every sampled family member;
/// non-incident tuples carry a certified witness.
fn sampling_agrees<R: Rng>(tuple: &PointTuple, spec: &FamilySpec, samples: usize, rng: &mut R) -> Result<bool> {
    match is_incident(tuple, spec)? {
        Incidence::NotIncident(w) => Ok(w.certifies(tuple)),
        Incidence::Incident => {
            for _ in 0..samples {
                let f = FamilyMember::random(spec, 20, rng);
                let image: Vec<RatVector> = tuple.points().iter().map(|p| f.eval(p)).collect();
                if affinely_dependent(&image)?.is_none() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}
