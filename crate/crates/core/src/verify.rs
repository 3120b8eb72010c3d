//! Brute-force oracles: hyperplane scans, the maximum general-position
//! subset, combinatorial lines and subspaces, and the alternating-sum identities.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use crate::combos::scan_all;
use crate::error::{precondition, Error, Result};
use crate::linalg::{
    affinely_dependent, format_rational, kernel_basis, normalize_primitive, rat, DependenceWitness, RatMatrix,
    RatVector, Rational, ScaledPoints,
};
use crate::monomial::binomial;
use crate::removal::{ConstructedSet, Construction, PolyMap};

/// Hyperplane `<normal, p> = offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub normal: RatVector,
    pub offset: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub subset: Vec<usize>,
    pub witness: DependenceWitness,
    pub hyperplane: Option<Hyperplane>,
}

/// Stored violations are capped; `violation_count` is always exact.
pub const MAX_STORED_VIOLATIONS: usize = 1000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub subsets_checked: u128,
    pub max_dependent_size: usize,
    pub violation_count: u128,
    pub violations: Vec<Violation>,
    pub lines_checked: usize,
    pub subspaces_checked: usize,
    pub elapsed: Duration,
}

fn join(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }

    fn push(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_STORED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    /// One-line summary record; no timing, so equal inputs give equal text.
    pub fn summary(&self) -> String {
        format!(
            "violations={} subsets_checked={} max_dependent_size={} lines_checked={} subspaces_checked={} holds={}",
            self.violation_count,
            self.subsets_checked,
            self.max_dependent_size,
            self.lines_checked,
            self.subspaces_checked,
            self.holds()
        )
    }

    /// Summary line followed by one line per stored violation.
    pub fn render(&self) -> String {
        let mut out = self.summary();
        out.push('\n');
        for v in &self.violations {
            let idx: Vec<String> = v.subset.iter().map(ToString::to_string).collect();
            out.push_str(&format!("violation subset={} witness={}", idx.join(","), v.witness.to_text()));
            if let Some(h) = &v.hyperplane {
                out.push_str(&format!(" normal={} offset={}", join(h.normal.entries()), format_rational(&h.offset)));
            }
            out.push('\n');
        }
        out
    }
}

/// A hyperplane through all the points, if their affine hull is not everything.
pub fn common_hyperplane(points: &[RatVector]) -> Option<Hyperplane> {
    let dim = points.first()?.dim();
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| {
            let mut r = p.entries().to_vec();
            r.push(-Rational::one());
            r
        })
        .collect();
    let m = RatMatrix::from_rows(rows, dim + 1).ok()?;
    kernel_basis(&m).into_iter().find_map(|k| {
        let k = normalize_primitive(k.entries());
        let normal = RatVector::new(k[..dim].to_vec());
        (!normal.is_zero()).then(|| Hyperplane {
            normal,
            offset: k[dim].clone(),
        })
    })
}

/// Flags every `k`-subset lying on a common hyperplane: affine rank below
/// `min(k - 1, d)`. For `k <= d + 1` that is plain affine dependence.
pub fn scan_cohyperplanar(points: &[RatVector], k: usize, workers: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let dim = points.first().map_or(0, RatVector::dim);
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        });
    }
    let scaled = ScaledPoints::new(points);
    let threshold = (k.saturating_sub(1)).min(dim);
    let hits = scan_all(points.len(), k, workers, || (), |_, idx| {
        (scaled.affine_rank(idx) < threshold).then_some(())
    });
    let mut report = VerificationReport {
        subsets_checked: binomial(points.len() as u64, k as u64),
        ..VerificationReport::default()
    };
    for (idx, ()) in hits {
        let sel: Vec<RatVector> = idx.iter().map(|&i| points[i].clone()).collect();
        let witness = affinely_dependent(&sel)?
            .ok_or_else(|| Error::Internal(format!("subset {idx:?} flagged but independent")))?;
        report.max_dependent_size = k;
        report.push(Violation {
            hyperplane: common_hyperplane(&sel),
            subset: idx,
            witness,
        });
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Largest subset with no `d + 1` points on a hyperplane, and the
/// lexicographically first subset attaining it. At most 128 points.
pub fn max_general_position_subset(points: &[RatVector]) -> Result<(usize, Vec<usize>)> {
    let n = points.len();
    if n > 128 {
        return precondition("at most 128 points are supported");
    }
    let dim = points.first().map_or(0, RatVector::dim);
    let scaled = ScaledPoints::new(points);
    // forbidden masks grouped by their highest point
    let mut forbidden: Vec<Vec<u128>> = vec![Vec::new(); n];
    let mut add = |idx: &[usize]| {
        let mask = idx.iter().fold(0u128, |m, &i| m | (1u128 << i));
        forbidden[*idx.last().unwrap_or(&0)].push(mask);
    };
    for pair in crate::combos::Combinations::new(n, 2) {
        if points[pair[0]] == points[pair[1]] {
            add(&pair);
        }
    }
    if dim + 1 > 2 {
        for idx in crate::combos::Combinations::new(n, dim + 1) {
            if scaled.dependent(&idx) {
                add(&idx);
            }
        }
    }

    struct Search<'a> {
        n: usize,
        forbidden: &'a [Vec<u128>],
        best: Vec<usize>,
    }
    impl Search<'_> {
        fn go(&mut self, next: usize, mask: u128, chosen: &mut Vec<usize>) {
            if chosen.len() > self.best.len() {
                self.best = chosen.clone();
            }
            if chosen.len() + (self.n - next) <= self.best.len() {
                return;
            }
            for i in next..self.n {
                if chosen.len() + (self.n - i) <= self.best.len() {
                    return;
                }
                let with = mask | (1u128 << i);
                if self.forbidden[i].iter().all(|f| f & with != *f) {
                    chosen.push(i);
                    self.go(i + 1, with, chosen);
                    chosen.pop();
                }
            }
        }
    }
    let mut s = Search {
        n,
        forbidden: &forbidden,
        best: Vec::new(),
    };
    s.go(0, 0, &mut Vec::new());
    Ok((s.best.len(), s.best))
}

/// A combinatorial line in `[k]^N`: `None` marks a wildcard coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialLine {
    pub k: u32,
    pub template: Vec<Option<u32>>,
}

impl CombinatorialLine {
    /// The `k` points, wildcards set to `1, ..., k` in turn.
    pub fn points(&self) -> Vec<Vec<i64>> {
        (1..=self.k)
            .map(|s| self.template.iter().map(|t| i64::from(t.unwrap_or(s))).collect())
            .collect()
    }
}

/// All `(k+1)^N - k^N` combinatorial lines of `[k]^N`, ordered by their
/// templates read as base-`(k+1)` numerals with the wildcard as digit 0.
pub fn enumerate_lines(k: u32, n: usize) -> Result<Vec<CombinatorialLine>> {
    if k < 2 {
        return precondition("alphabet size must be at least 2");
    }
    let mut out = Vec::new();
    let mut digits = vec![0u32; n];
    loop {
        if digits.contains(&0) {
            out.push(CombinatorialLine {
                k,
                template: digits.iter().map(|&d| (d > 0).then_some(d)).collect(),
            });
        }
        let Some(pos) = (0..n).rev().find(|&i| digits[i] < k) else {
            break;
        };
        digits[pos] += 1;
        digits[pos + 1..].iter_mut().for_each(|d| *d = 0);
    }
    Ok(out)
}

/// Combinatorial subspace of `{0,1}^N`: fixed ones `base` plus disjoint
/// non-empty wildcard `blocks` (1-based coordinates), ordered by least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialSubspace {
    pub n: usize,
    pub base: BTreeSet<u32>,
    pub blocks: Vec<BTreeSet<u32>>,
}

impl CombinatorialSubspace {
    /// The `2^dim` points; point `I` (a bitmask over blocks) switches on the blocks in `I`.
    pub fn points(&self) -> Vec<Vec<i64>> {
        (0..1usize << self.blocks.len())
            .map(|mask| {
                let mut p = vec![0i64; self.n];
                for &c in &self.base {
                    p[c as usize - 1] = 1;
                }
                for (b, block) in self.blocks.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        for &c in block {
                            p[c as usize - 1] = 1;
                        }
                    }
                }
                p
            })
            .collect()
    }
}

/// All combinatorial subspaces of dimension `dim` in `{0,1}^N`.
pub fn enumerate_subspaces(n: usize, dim: usize) -> Vec<CombinatorialSubspace> {
    if dim > n || dim == 0 && n == 0 {
        return Vec::new();
    }
    // label 0/1: fixed value; label 2 + b: block b
    let radix = dim as u32 + 2;
    let mut labels = vec![0u32; n];
    let mut out = Vec::new();
    loop {
        let mut blocks = vec![BTreeSet::new(); dim];
        let mut base = BTreeSet::new();
        for (c, &l) in labels.iter().enumerate() {
            match l {
                0 => {}
                1 => {
                    base.insert(c as u32 + 1);
                }
                b => {
                    blocks[b as usize - 2].insert(c as u32 + 1);
                }
            }
        }
        let canonical = blocks.iter().all(|b| !b.is_empty())
            && blocks.windows(2).all(|w| w[0].first() < w[1].first());
        if canonical {
            out.push(CombinatorialSubspace { n, base, blocks });
        }
        let Some(pos) = (0..n).rev().find(|&i| labels[i] + 1 < radix) else {
            break;
        };
        labels[pos] += 1;
        labels[pos + 1..].iter_mut().for_each(|l| *l = 0);
    }
    out
}

/// `(-1)^i C(m+1, i)` for `i = 0..=m+1`.
pub fn finite_difference_coeffs(m: usize) -> Vec<Rational> {
    (0..=m + 1)
        .map(|i| {
            let c = Rational::from_integer(binomial(m as u64 + 1, i as u64).into());
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// The `(m+1) x (m+2)` matrix with entries `i^l`, `l = 0..=m`, `i = 0..=m+1`.
pub fn power_matrix(m: usize) -> RatMatrix {
    let mut a = RatMatrix::zeros(m + 1, m + 2);
    for l in 0..=m {
        for i in 0..=m + 1 {
            a.set(l, i, num_traits::pow(rat(i as i64), l));
        }
    }
    a
}

/// `Σ_{I ⊆ [m+1]} (-1)^|I| (a_0 + Σ_{i∈I} a_i)^l` with `a = (a_0, ..., a_{m+1})`.
pub fn alternating_cube_sum(a: &[Rational], l: usize) -> Rational {
    let t = a.len().saturating_sub(1);
    let mut total = Rational::zero();
    for mask in 0u64..1 << t {
        let s = (0..t)
            .filter(|i| mask >> i & 1 == 1)
            .fold(a[0].clone(), |acc, i| acc + &a[i + 1]);
        let term = num_traits::pow(s, l);
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// [`alternating_cube_sum`] restricted to `l <= m`, where it vanishes.
pub fn identity_check_cube(a: &[Rational], l: usize) -> Result<Rational> {
    if a.len() < 2 {
        return precondition("need a_0 and at least a_1");
    }
    let m = a.len() - 2;
    if l > m {
        return precondition(format!("exponent {l} exceeds m = {m}"));
    }
    Ok(alternating_cube_sum(a, l))
}

/// `Σ_i (-1)^i C(m+1,i) f(x + i y)` for `m` the degree bound of `f`.
pub fn line_alternating_sum(f: &PolyMap, x: &RatVector, y: &RatVector) -> Result<RatVector> {
    let coeffs = finite_difference_coeffs(f.spec().m);
    let mut acc = RatVector::zeros(f.spec().d);
    for (i, c) in coeffs.iter().enumerate() {
        let p = x.add(&y.scale(&rat(i as i64)));
        acc = acc.add(&f.eval(&p)?.scale(c));
    }
    Ok(acc)
}

/// `Σ_{I ⊆ [t]} (-1)^|I| f(x_0 + Σ_{i∈I} x_i)` for `xs = (x_1, ..., x_t)`.
pub fn cube_alternating_sum(f: &PolyMap, x0: &RatVector, xs: &[RatVector]) -> Result<RatVector> {
    let mut acc = RatVector::zeros(f.spec().d);
    for mask in 0u64..1 << xs.len() {
        let p = (0..xs.len())
            .filter(|i| mask >> i & 1 == 1)
            .fold(x0.clone(), |acc, i| acc.add(&xs[i]));
        let v = f.eval(&p)?;
        acc = if mask.count_ones() % 2 == 0 { acc.add(&v) } else { acc.sub(&v) };
    }
    Ok(acc)
}

/// Checks that every combinatorial line (grid) or `(m+1)`-dimensional
/// combinatorial subspace (cube) maps to a dependent multiset with the
/// explicit alternating witness. A violation is a structure whose image the
/// witness fails to certify.
pub fn verify_structured_images(c: &ConstructedSet) -> Result<VerificationReport> {
    verify_structure(&c.points, &c.provenance, c.kind)
}

/// [`verify_structured_images`] for points and provenance read back from files.
pub fn verify_structure(points: &[RatVector], provenance: &[Vec<i64>], kind: Construction) -> Result<VerificationReport> {
    let start = Instant::now();
    let index: HashMap<&[i64], usize> = provenance.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    if index.len() != points.len() || provenance.len() != points.len() {
        return Err(Error::Internal("provenance is not a bijection".into()));
    }
    let lookup = |p: &Vec<i64>| {
        index
            .get(p.as_slice())
            .copied()
            .ok_or_else(|| Error::Internal(format!("lattice point {p:?} missing from provenance")))
    };
    let mut report = VerificationReport::default();
    let check = |report: &mut VerificationReport, src: Vec<Vec<i64>>, coeffs: &[Rational]| -> Result<()> {
        let idx = src.iter().map(lookup).collect::<Result<Vec<_>>>()?;
        let sel: Vec<RatVector> = idx.iter().map(|&i| points[i].clone()).collect();
        let witness = DependenceWitness::new(coeffs.to_vec());
        report.max_dependent_size = report.max_dependent_size.max(idx.len());
        if !witness.certifies(&sel) {
            report.push(Violation {
                subset: idx,
                witness,
                hyperplane: None,
            });
        }
        Ok(())
    };
    match kind {
        Construction::Grid { m, n } => {
            let coeffs = finite_difference_coeffs(m);
            for line in enumerate_lines(m as u32 + 2, n)? {
                check(&mut report, line.points(), &coeffs)?;
                report.lines_checked += 1;
            }
        }
        Construction::Cube { m, n, .. } => {
            let coeffs: Vec<Rational> = (0u32..1 << (m + 1))
                .map(|mask| if mask.count_ones() % 2 == 0 { rat(1) } else { rat(-1) })
                .collect();
            for sub in enumerate_subspaces(n, m + 1) {
                check(&mut report, sub.points(), &coeffs)?;
                report.subspaces_checked += 1;
            }
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;
    use crate::removal::{cube_construction, grid_construction, lattice, RemovalOptions};

    fn pts(p: &[Vec<i64>]) -> Vec<RatVector> {
        p.iter().map(|q| RatVector::from_ints(q)).collect()
    }

    #[test]
    fn generic_points_have_no_violations() {
        let y = pts(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let r = scan_cohyperplanar(&y, 4, 1).unwrap();
        assert!(r.holds());
        assert_eq!(r.subsets_checked, 1);
    }

    #[test]
    fn planted_coplanar_subset_is_flagged() {
        let y = pts(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0], vec![2, 3, 5]]);
        let r = scan_cohyperplanar(&y, 4, 1).unwrap();
        assert_eq!(r.violation_count, 1);
        let v = &r.violations[0];
        assert_eq!(v.subset, vec![0, 1, 2, 3]);
        assert_eq!(v.witness.coefficients, vec![rat(1), rat(-1), rat(-1), rat(1)]);
        let h = v.hyperplane.as_ref().unwrap();
        assert_eq!(h.normal, RatVector::from_ints(&[0, 0, 1]));
        assert_eq!(h.offset, rat(0));
    }

    #[test]
    fn oversized_subsets_use_hyperplane_test() {
        // five points in R^2: always dependent, but only collinear ones count
        let y = pts(&[vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1], vec![5, 7]]);
        assert_eq!(scan_cohyperplanar(&y, 4, 1).unwrap().violation_count, 0);
        assert_eq!(scan_cohyperplanar(&y, 3, 1).unwrap().violation_count, 1);
        let mut y = y;
        y.push(RatVector::from_ints(&[3, 0]));
        assert_eq!(scan_cohyperplanar(&y, 4, 1).unwrap().violation_count, 1);
    }

    #[test]
    fn report_is_worker_independent() {
        let y = pts(&lattice(4, 2, 1));
        let a = scan_cohyperplanar(&y, 3, 1).unwrap();
        let b = scan_cohyperplanar(&y, 3, 4).unwrap();
        assert_eq!(a.render(), b.render());
        // 4x4 grid: 4 rows, 4 columns, 2 long diagonals with C(4,3) triples each,
        // and 4 short diagonals of length 3
        assert_eq!(a.violation_count, 10 * 4 + 4);
    }

    #[test]
    fn alpha_examples() {
        let collinear = pts(&[vec![0, 0], vec![1, 1], vec![2, 2], vec![3, 3]]);
        assert_eq!(max_general_position_subset(&collinear).unwrap().0, 2);

        let grid = pts(&lattice(3, 2, 1));
        let (size, subset) = max_general_position_subset(&grid).unwrap();
        assert_eq!(size, 6);
        assert!(scan_cohyperplanar(&subset.iter().map(|&i| grid[i].clone()).collect::<Vec<_>>(), 3, 1)
            .unwrap()
            .holds());

        let simplex = pts(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(max_general_position_subset(&simplex).unwrap(), (4, vec![0, 1, 2, 3]));
    }

    #[test]
    fn alpha_matches_exhaustive_search() {
        let grid = pts(&lattice(3, 2, 1));
        let best = (0u32..1 << 9)
            .filter(|mask| {
                let idx: Vec<usize> = (0..9).filter(|i| mask >> i & 1 == 1).collect();
                crate::combos::Combinations::new(idx.len(), 3).all(|t| {
                    let sel: Vec<RatVector> = t.iter().map(|&j| grid[idx[j]].clone()).collect();
                    affinely_dependent(&sel).unwrap().is_none()
                })
            })
            .map(u32::count_ones)
            .max()
            .unwrap();
        assert_eq!(best, 6);
    }

    #[test]
    fn line_counts() {
        assert_eq!(enumerate_lines(3, 1).unwrap().len(), 1);
        assert_eq!(enumerate_lines(3, 2).unwrap().len(), 7);
        assert_eq!(enumerate_lines(4, 3).unwrap().len(), 61);
        assert!(enumerate_lines(1, 2).is_err());
        let l = &enumerate_lines(3, 2).unwrap()[0];
        assert_eq!(l.points(), vec![vec![1, 1], vec![2, 2], vec![3, 3]]);
    }

    fn stirling2(n: usize, k: usize) -> u128 {
        match (n, k) {
            (0, 0) => 1,
            (_, 0) | (0, _) => 0,
            _ => k as u128 * stirling2(n - 1, k) + stirling2(n - 1, k - 1),
        }
    }

    #[test]
    fn subspace_counts_match_block_partitions() {
        for n in 1..=4 {
            for dim in 1..=n {
                let expected: u128 = (dim..=n)
                    .map(|j| binomial(n as u64, j as u64) * (1u128 << (n - j)) * stirling2(j, dim))
                    .sum();
                assert_eq!(enumerate_subspaces(n, dim).len() as u128, expected, "n={n} dim={dim}");
            }
        }
        assert_eq!(enumerate_subspaces(2, 2).len(), 1);
        assert_eq!(enumerate_subspaces(1, 1).len(), 1);
        assert_eq!(enumerate_subspaces(3, 3).len(), 1);
        assert!(enumerate_subspaces(2, 3).is_empty());
    }

    #[test]
    fn finite_differences() {
        assert_eq!(finite_difference_coeffs(1), vec![rat(1), rat(-2), rat(1)]);
        assert_eq!(finite_difference_coeffs(2), vec![rat(1), rat(-3), rat(3), rat(-1)]);
        assert_eq!(finite_difference_coeffs(3), vec![rat(1), rat(-4), rat(6), rat(-4), rat(1)]);
        for m in 0..=6 {
            let k = kernel_basis(&power_matrix(m));
            assert_eq!(k.len(), 1);
            assert_eq!(normalize_primitive(k[0].entries()), finite_difference_coeffs(m));
        }
    }

    #[test]
    fn cube_identity_examples() {
        assert_eq!(identity_check_cube(&[rat(5), rat(7), rat(11)], 1).unwrap(), rat(0));
        let a = [ratio(3, 7), ratio(-2, 5), ratio(9, 4), ratio(1, 3)];
        assert_eq!(identity_check_cube(&a, 2).unwrap(), rat(0));
        assert!(identity_check_cube(&[rat(1), rat(1), rat(1)], 2).is_err());
        // l = m + 1 with all ones: (-1)^(m+1) (m+1)!
        for m in 1..=4usize {
            let ones = vec![rat(1); m + 2];
            let fact: i64 = (1..=m as i64 + 1).product();
            let sign = if (m + 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(alternating_cube_sum(&ones, m + 1), rat(sign * fact));
        }
    }

    #[test]
    fn structured_images_of_small_constructions() {
        let opts = RemovalOptions::default();
        let g = grid_construction(1, 2, &opts).unwrap();
        let r = verify_structured_images(&g).unwrap();
        assert!(r.holds());
        assert_eq!(r.lines_checked, 7);

        let c = cube_construction(1, 3, 3, &opts).unwrap();
        let r = verify_structured_images(&c).unwrap();
        assert!(r.holds());
        assert_eq!(r.subspaces_checked, enumerate_subspaces(3, 2).len());
        assert_eq!(r.max_dependent_size, 4);
    }

    #[test]
    fn broken_structure_is_reported() {
        let mut g = grid_construction(1, 2, &RemovalOptions::default()).unwrap();
        g.points[4] = g.points[4].add(&RatVector::from_ints(&[1, 0]));
        let r = verify_structured_images(&g).unwrap();
        // the centre lies on the lines (*,2), (2,*) and (*,*)
        assert_eq!(r.violation_count, 3);
    }
}
