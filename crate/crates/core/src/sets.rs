//! Containment matrices of finite set systems and the compression
//! construction that makes them (almost) nonsingular.
//!
//! For families `A = (A_1..A_r)` and `B = (B_1..B_s)` the containment matrix
//! `I(A; B)` is `s x r` with entry `(i, j) = 1` iff `B_i ⊆ A_j`; `n(A; B)` is
//! its nullity.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{precondition, Error, Result};
use crate::incidence::PointTuple;
use crate::linalg::{self, RatMatrix, Rational};

pub type Set = BTreeSet<u32>;

/// Ordered list of finite subsets of the positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SetFamily {
    pub sets: Vec<Set>,
}

impl SetFamily {
    pub fn new(sets: Vec<Set>) -> Self {
        SetFamily { sets }
    }

    pub fn from_slices(sets: &[&[u32]]) -> Self {
        SetFamily {
            sets: sets.iter().map(|s| s.iter().copied().collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_distinct(&self) -> bool {
        let mut seen = HashSet::new();
        self.sets.iter().all(|s| seen.insert(s))
    }

    pub fn max_size(&self) -> usize {
        self.sets.iter().map(BTreeSet::len).max().unwrap_or(0)
    }
}

fn format_set(s: &Set) -> String {
    let inner: Vec<String> = s.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sets.iter().map(format_set).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for SetFamily {
    type Err = Error;

    /// One family per line: sets like `{1,2}` separated by `;`. An empty line is the empty family.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse { line: 1, message };
        let s = s.trim();
        if s.is_empty() {
            return Ok(SetFamily::default());
        }
        let sets = s
            .split(';')
            .map(|part| {
                let inner = part
                    .trim()
                    .strip_prefix('{')
                    .and_then(|t| t.strip_suffix('}'))
                    .ok_or_else(|| bad(format!("set must be wrapped in braces: `{}`", part.trim())))?;
                inner
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| match t.parse::<u32>() {
                        Ok(0) | Err(_) => Err(bad(format!("invalid element `{t}`"))),
                        Ok(v) => Ok(v),
                    })
                    .collect::<Result<Set>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SetFamily { sets })
    }
}

/// A 0/1 containment matrix together with its row and column labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidencePattern {
    pub matrix: RatMatrix,
    pub row_labels: SetFamily,
    pub col_labels: SetFamily,
}

/// `I(A; B)`: rows indexed by `B`, columns by `A`, entry 1 iff `B_i ⊆ A_j`.
pub fn incidence_matrix(a: &SetFamily, b: &SetFamily) -> IncidencePattern {
    IncidencePattern {
        matrix: containment(&a.sets, &b.sets),
        row_labels: b.clone(),
        col_labels: a.clone(),
    }
}

fn containment(cols: &[Set], rows: &[Set]) -> RatMatrix {
    let mut m = RatMatrix::zeros(rows.len(), cols.len());
    for (i, b) in rows.iter().enumerate() {
        for (j, a) in cols.iter().enumerate() {
            if b.is_subset(a) {
                m.set(i, j, Rational::one());
            }
        }
    }
    m
}

/// `n(A; B)`: number of columns minus the rank of `I(A; B)`.
pub fn nullity(a: &SetFamily, b: &SetFamily) -> usize {
    let m = containment(&a.sets, &b.sets);
    a.len() - linalg::rank(&m)
}

/// Target of the compression construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullityMode {
    /// `n = 0`, available while `r < 2^(m+1)`.
    ExactZero,
    /// `n <= 1`, available while `r < 3 * 2^m`.
    AtMostOne,
}

impl NullityMode {
    /// Exclusive upper bound on `r` for this mode at degree `m`.
    pub fn bound(self, m: usize) -> u128 {
        match self {
            NullityMode::ExactZero => 1u128 << (m + 1),
            NullityMode::AtMostOne => 3u128 << m,
        }
    }

    pub fn max_nullity(self) -> usize {
        match self {
            NullityMode::ExactZero => 0,
            NullityMode::AtMostOne => 1,
        }
    }
}

impl FromStr for NullityMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-zero" => Ok(NullityMode::ExactZero),
            "at-most-one" => Ok(NullityMode::AtMostOne),
            other => Err(Error::Parse {
                line: 1,
                message: format!("unknown mode `{other}`"),
            }),
        }
    }
}

/// Sets `S_1..S_r` of size `<= m` with `n(X; S) = 0` (exact-zero) or `<= 1` (at-most-one).
pub fn construct_sets(x: &SetFamily, m: usize, mode: NullityMode) -> Result<SetFamily> {
    if !x.is_distinct() {
        return precondition("the sets X_i must be distinct");
    }
    let r = x.len();
    if r as u128 >= mode.bound(m) {
        return precondition(format!(
            "r = {r} is not below the bound {} for m = {m}",
            mode.bound(m)
        ));
    }
    let mut s = SetFamily::new(compress(&x.sets, m, mode));
    if mode == NullityMode::AtMostOne {
        repair(x, &mut s, m);
    }
    check(x, &s, m, mode.max_nullity())?;
    Ok(s)
}

/// If `n(X; S) = 1` but some set `T ⊆ X_j` of size `<= m` has a row not
/// orthogonal to the kernel vector, swap `T` in for a dependent row of `S`.
/// Nullity 0 is reachable with sets of size `<= m` exactly when such a `T` exists.
fn repair(x: &SetFamily, s: &mut SetFamily, m: usize) {
    let matrix = containment(&x.sets, &s.sets);
    let kernel = linalg::kernel_basis(&matrix);
    let [v] = kernel.as_slice() else {
        return;
    };
    let pairing = |t: &Set| -> Rational {
        x.sets
            .iter()
            .zip(v.entries())
            .filter(|(a, _)| t.is_subset(a))
            .fold(Rational::zero(), |acc, (_, c)| acc + c)
    };
    let Some(t) = x
        .sets
        .iter()
        .flat_map(|a| subsets_up_to(a, m))
        .find(|t| !pairing(t).is_zero())
    else {
        return;
    };
    let full = linalg::rank(&matrix);
    let all: Vec<usize> = (0..s.len()).collect();
    if let Some(i) = all.iter().copied().find(|&i| {
        let rest: Vec<usize> = all.iter().copied().filter(|&j| j != i).collect();
        linalg::rank(&matrix.select_rows(&rest)) == full
    }) {
        s.sets[i] = t;
    }
}

/// Subsets of `a` with at most `m` elements, by size then lexicographically.
fn subsets_up_to(a: &Set, m: usize) -> Vec<Set> {
    let elems: Vec<u32> = a.iter().copied().collect();
    (0..=m.min(elems.len()))
        .flat_map(|k| crate::combos::Combinations::new(elems.len(), k))
        .map(|idx| idx.into_iter().map(|i| elems[i]).collect())
        .collect()
}

fn check(x: &SetFamily, s: &SetFamily, m: usize, max_nullity: usize) -> Result<()> {
    if s.len() != x.len() || s.max_size() > m {
        return Err(Error::Internal(format!(
            "constructed family has wrong shape ({} sets, max size {})",
            s.len(),
            s.max_size()
        )));
    }
    let n = nullity(x, s);
    if n > max_nullity {
        return Err(Error::Internal(format!(
            "constructed family has nullity {n} > {max_nullity}"
        )));
    }
    Ok(())
}

/// Induction on `Σ |X_i|`: split on the smallest element `x` present, recurse
/// on the sets with `x` removed (same degree) and on the sets whose copy with
/// `x` added is also present (degree `m - 1`, lifted by adjoining `x`).
fn compress(xs: &[Set], m: usize, mode: NullityMode) -> Vec<Set> {
    let r = xs.len();
    if r == 0 {
        return Vec::new();
    }
    if r == 1 || m == 0 {
        return vec![Set::new(); r];
    }
    let mode = if (r as u128) < NullityMode::ExactZero.bound(m) {
        NullityMode::ExactZero
    } else {
        mode
    };
    let Some(x) = xs.iter().filter_map(|s| s.iter().next()).min().copied() else {
        // r >= 2 distinct sets always include a non-empty one
        unreachable!("distinct family of size {r} with no elements");
    };

    // Y: distinct X_i \ {x}, first-appearance order. Classes hold one or two
    // original indices (with and without x).
    let mut ys: Vec<Set> = Vec::new();
    let mut class_size: Vec<usize> = Vec::new();
    for s in xs {
        let mut t = s.clone();
        t.remove(&x);
        match ys.iter().position(|y| *y == t) {
            Some(c) => class_size[c] += 1,
            None => {
                ys.push(t);
                class_size.push(1);
            }
        }
    }
    // Z: the x-free member of every two-element class, which equals Y_c.
    let zs: Vec<Set> = ys
        .iter()
        .zip(&class_size)
        .filter(|(_, &k)| k == 2)
        .map(|(y, _)| y.clone())
        .collect();

    let (u, v) = (ys.len(), zs.len());
    let (y_mode, z_mode) = match mode {
        NullityMode::ExactZero => (NullityMode::ExactZero, NullityMode::ExactZero),
        NullityMode::AtMostOne => (
            if (u as u128) < NullityMode::ExactZero.bound(m) {
                NullityMode::ExactZero
            } else {
                NullityMode::AtMostOne
            },
            if (v as u128) < NullityMode::ExactZero.bound(m - 1) {
                NullityMode::ExactZero
            } else {
                NullityMode::AtMostOne
            },
        ),
    };
    let mut out = compress(&ys, m, y_mode);
    out.extend(compress(&zs, m - 1, z_mode).into_iter().map(|mut s| {
        s.insert(x);
        s
    }));
    out
}

/// Non-empty sets `S_1..S_r` of size `<= m` for distinct non-empty `X_i`,
/// under the bounds `r < 2^(m+1) - 1` (exact-zero) or `r < 3 * 2^m - 1` (at-most-one).
pub fn construct_sets_nonempty(x: &SetFamily, m: usize, mode: NullityMode) -> Result<SetFamily> {
    if x.sets.iter().any(BTreeSet::is_empty) {
        return precondition("the sets X_i must be non-empty");
    }
    if !x.is_distinct() {
        return precondition("the sets X_i must be distinct");
    }
    let r = x.len();
    if r as u128 + 1 >= mode.bound(m) {
        return precondition(format!(
            "r = {r} is not below the bound {} for non-empty sets at m = {m}",
            mode.bound(m) - 1
        ));
    }
    if r == 0 {
        return Ok(SetFamily::default());
    }
    let mut with_empty = vec![Set::new()];
    with_empty.extend(x.sets.iter().cloned());
    let s_all = compress(&with_empty, m, mode);

    // Drop the empty sets, then trim or pad to r rows without losing rank.
    let mut rows: Vec<Set> = s_all.into_iter().filter(|s| !s.is_empty()).collect();
    if rows.len() > r {
        let m_rows = containment(&x.sets, &rows);
        let keep = drop_dependent_rows(&m_rows, 0, r)?;
        rows = keep.into_iter().map(|i| rows[i].clone()).collect();
    }
    let filler: Set = x.sets.iter().flat_map(|s| s.iter().copied()).min().into_iter().collect();
    while rows.len() < r {
        rows.push(filler.clone());
    }
    let s = SetFamily::new(rows);
    check(x, &s, m, mode.max_nullity())?;
    Ok(s)
}

/// Greedily removes unprotected rows lying in the span of the other kept
/// rows until `target` rows remain. Rows `0..protected` are never removed.
fn drop_dependent_rows(m: &RatMatrix, protected: usize, target: usize) -> Result<Vec<usize>> {
    let mut keep: Vec<usize> = (0..m.rows()).collect();
    while keep.len() > target {
        let full = linalg::rank(&m.select_rows(&keep));
        let pos = (0..keep.len())
            .filter(|&p| keep[p] >= protected)
            .find(|&p| {
                let mut rest = keep.clone();
                rest.remove(p);
                linalg::rank(&m.select_rows(&rest)) == full
            })
            .ok_or_else(|| Error::Internal("no removable row although rows exceed columns".into()))?;
        keep.remove(pos);
    }
    Ok(keep)
}

/// For an `(r + t) x r` matrix whose first `t` rows are independent, the
/// indices of `r` rows (including the first `t`) with the same kernel.
pub fn remove_rows_preserving_kernel(m: &RatMatrix, protected: usize) -> Result<Vec<usize>> {
    let r = m.cols();
    if protected > r {
        return precondition(format!("t = {protected} exceeds r = {r}"));
    }
    if m.rows() != r + protected {
        return Err(Error::DimensionMismatch {
            expected: r + protected,
            found: m.rows(),
        });
    }
    let head: Vec<usize> = (0..protected).collect();
    if linalg::rank(&m.select_rows(&head)) < protected {
        return precondition("the protected rows are linearly dependent");
    }
    drop_dependent_rows(m, protected, r)
}

/// Extends `S_1..S_t` (with `n(X_1..X_t; S_1..S_t) = 0`) by `r - t` sets of
/// size `<= m` so that `n(X; S) <= 1`; requires `r < 3 * 2^m`. With
/// `nonempty`, all `X_i` must be non-empty, `r < 3 * 2^m - 1`, and the new sets are non-empty.
pub fn extend_sets(x: &SetFamily, prefix: &SetFamily, m: usize, nonempty: bool) -> Result<SetFamily> {
    let (r, t) = (x.len(), prefix.len());
    if !x.is_distinct() {
        return precondition("the sets X_i must be distinct");
    }
    if t > r {
        return precondition(format!("prefix length {t} exceeds r = {r}"));
    }
    let bound = NullityMode::AtMostOne.bound(m) - u128::from(nonempty);
    if r as u128 >= bound {
        return precondition(format!("r = {r} is not below the bound {bound} for m = {m}"));
    }
    let head = SetFamily::new(x.sets[..t].to_vec());
    if nullity(&head, prefix) != 0 {
        return precondition("the prefix must have nullity 0 on the first t sets");
    }
    if t == r {
        return Ok(SetFamily::default());
    }
    let fresh = if nonempty {
        construct_sets_nonempty(x, m, NullityMode::AtMostOne)?
    } else {
        construct_sets(x, m, NullityMode::AtMostOne)?
    };
    let mut rows = prefix.sets.clone();
    rows.extend(fresh.sets.iter().cloned());
    let keep = remove_rows_preserving_kernel(&containment(&x.sets, &rows), t)?;
    let ext = SetFamily::new(keep.into_iter().filter(|&i| i >= t).map(|i| rows[i].clone()).collect());

    let mut all = prefix.clone();
    all.sets.extend(ext.sets.iter().cloned());
    if nullity(x, &all) > 1 {
        return Err(Error::Internal("extended family has nullity above 1".into()));
    }
    Ok(ext)
}

/// Reflects a tuple of 0/1 points so that `base` goes to the origin and
/// returns the supports of the other points.
pub fn tuple_to_setfamily(tuple: &PointTuple, base: usize) -> Result<SetFamily> {
    if base >= tuple.len() {
        return precondition(format!("base index {base} out of range"));
    }
    let support = |p: &crate::linalg::RatVector| -> Result<Set> {
        let mut s = Set::new();
        for (i, q) in p.entries().iter().enumerate() {
            if q.is_one() {
                s.insert(i as u32 + 1);
            } else if !q.is_zero() {
                return precondition(format!("coordinate {} is not 0 or 1", i + 1));
            }
        }
        Ok(s)
    };
    let supports = tuple.points().iter().map(support).collect::<Result<Vec<_>>>()?;
    let b = &supports[base];
    Ok(SetFamily::new(
        supports
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != base)
            .map(|(_, s)| s.symmetric_difference(b).copied().collect())
            .collect(),
    ))
}
