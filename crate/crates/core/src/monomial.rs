//! Monomials of degree at most `m` over coordinates `1..=N`.
//!
//! A function `f: A -> [N]` with `|A| <= m` acts on `x` as the product
//! `prod_{a in A} x_{f(a)}`, which only depends on the multiset of values of
//! `f`. A [`Monomial`] stores exactly that multiset, sorted, so quantifying
//! over all such functions becomes a loop over `C(N+m, m)` monomials.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::One;

use crate::error::{precondition, Error, Result};
use crate::linalg::{RatVector, Rational};

/// Sorted multiset of 1-based coordinate indices. The empty monomial evaluates to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut indices: Vec<u32>) -> Result<Self> {
        if indices.contains(&0) {
            return precondition("monomial indices are 1-based");
        }
        indices.sort_unstable();
        Ok(Monomial(indices))
    }

    pub fn empty() -> Self {
        Monomial(Vec::new())
    }

    pub fn single(index: u32) -> Self {
        assert!(index >= 1, "monomial indices are 1-based");
        Monomial(vec![index])
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_index(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    /// Multiset union, i.e. the product of monomials.
    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Monomial(v)
    }

    /// `self` with one more factor `x_index`.
    pub fn extended(&self, index: u32) -> Monomial {
        self.times(&Monomial::single(index))
    }

    /// The set of distinct indices.
    pub fn support(&self) -> BTreeSet<u32> {
        self.0.iter().copied().collect()
    }

    pub fn has_repeats(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1])
    }

    /// Multiset with repeats removed.
    pub fn dedup(&self) -> Monomial {
        let mut v = self.0.clone();
        v.dedup();
        Monomial(v)
    }

    pub fn eval(&self, x: &RatVector) -> Result<Rational> {
        if self.max_index() as usize > x.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.max_index() as usize,
                found: x.dim(),
            });
        }
        Ok(self.eval_unchecked(x.entries()))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::one();
        for &i in &self.0 {
            acc *= &x[i as usize - 1];
        }
        acc
    }

    /// Value at the 0/1 point with support `set`: `1` iff every index lies in `set`.
    pub fn eval_boolean(&self, set: &BTreeSet<u32>) -> u8 {
        u8::from(self.0.iter().all(|i| set.contains(i)))
    }
}

pub fn eval_monomial(f: &Monomial, x: &RatVector) -> Result<Rational> {
    f.eval(x)
}

pub fn eval_monomial_boolean(f: &Monomial, set: &BTreeSet<u32>) -> Result<u8> {
    if f.has_repeats() {
        return precondition("boolean evaluation takes monomials with distinct indices");
    }
    Ok(f.eval_boolean(set))
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 1, message: msg };
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| bad(format!("monomial must be wrapped in braces: `{s}`")))?;
        if inner.trim().is_empty() {
            return Ok(Monomial::empty());
        }
        let indices = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| bad(format!("invalid index `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Monomial::new(indices).map_err(|e| bad(e.to_string()))
    }
}

/// Parameters `(N, d, m)` of the family of maps `R^N -> R^d` whose coordinates
/// are powers `(<x, u_i> + c_i)^l` with `1 <= l <= m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    pub n: usize,
    pub d: usize,
    pub m: usize,
}

impl FamilySpec {
    pub fn new(n: usize, d: usize, m: usize) -> Result<Self> {
        if n == 0 || d == 0 || m == 0 {
            return precondition(format!("family parameters must be positive, got N={n} d={d} m={m}"));
        }
        Ok(FamilySpec { n, d, m })
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} d={} m={}", self.n, self.d, self.m)
    }
}

/// All monomials of degree `<= m` in `n` variables in graded lexicographic order.
pub fn enumerate_monomials(n: usize, m: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::empty()];
    if n == 0 {
        return out;
    }
    let mut layer = vec![Monomial::empty()];
    for _ in 0..m {
        let mut next = Vec::new();
        for mono in &layer {
            let start = mono.0.last().copied().unwrap_or(1);
            for i in start..=n as u32 {
                let mut v = mono.0.clone();
                v.push(i);
                next.push(Monomial(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `C(n, k)` as `u128`; panics on overflow, which only happens far outside desk scale.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
