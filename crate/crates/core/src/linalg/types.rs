use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Writes `n` for integers and `p/q` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `<int>` or `<int>/<posint>`.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("invalid integer `{num}`"))?;
    let den: BigInt = match den {
        Some(d) => {
            if d.starts_with(['+', '-']) {
                return Err(format!("denominator must be a positive integer, got `{d}`"));
            }
            d.parse().map_err(|_| format!("invalid denominator `{d}`"))?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(num, den))
}

/// A point or vector of `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVector(Vec<Rational>);

impl RatVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RatVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RatVector(vec![Rational::zero(); dim])
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RatVector(entries.iter().map(|&x| rat(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn sub(&self, other: &RatVector) -> RatVector {
        debug_assert_eq!(self.dim(), other.dim());
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &RatVector) -> RatVector {
        debug_assert_eq!(self.dim(), other.dim());
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &Rational) -> RatVector {
        RatVector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn dot(&self, other: &RatVector) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Keeps only the listed coordinates, in the given order.
    pub fn restrict(&self, coords: &[usize]) -> RatVector {
        RatVector(coords.iter().map(|&i| self.0[i].clone()).collect())
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl From<Vec<Rational>> for RatVector {
    fn from(v: Vec<Rational>) -> Self {
        RatVector(v)
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(q))?;
        }
        write!(f, ")")
    }
}

/// Dense row-major matrix over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed to shape a matrix with no rows.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(RatMatrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
            cols,
        )
    }

    /// Matrix whose columns are the given vectors (all of dimension `dim`).
    pub fn from_columns(columns: &[RatVector], dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
            for i in 0..dim {
                m.set(i, j, c[i].clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<RatVector> {
        (0..self.rows)
            .map(|i| RatVector::new(self.row(i).to_vec()))
            .collect()
    }

    pub fn column(&self, j: usize) -> RatVector {
        RatVector::new((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        RatMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn mul_vec(&self, v: &RatVector) -> Result<RatVector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.dim(),
            });
        }
        Ok(RatVector::new(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.entries())
                        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Rows scaled by the lcm of their denominators, as integer rows. Preserves rank.
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row
                    .iter()
                    .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
                row.iter()
                    .map(|q| q.numer() * (&l / q.denom()))
                    .collect()
            })
            .collect()
    }
}

/// Coefficients `λ` certifying that a multiset of points is affinely dependent:
/// not all zero, `Σ λ_i = 0` and `Σ λ_i s_i = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceWitness {
    pub coefficients: Vec<Rational>,
}

impl DependenceWitness {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        DependenceWitness { coefficients }
    }

    /// Checks the witness against `points` with exact arithmetic.
    pub fn certifies(&self, points: &[RatVector]) -> bool {
        if self.coefficients.len() != points.len() || points.is_empty() {
            return false;
        }
        if self.coefficients.iter().all(Zero::is_zero) {
            return false;
        }
        let total: Rational = self.coefficients.iter().sum();
        if !total.is_zero() {
            return false;
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return false;
        }
        (0..dim).all(|c| {
            self.coefficients
                .iter()
                .zip(points)
                .fold(Rational::zero(), |acc, (l, p)| acc + l * &p[c])
                .is_zero()
        })
    }

    pub fn to_text(&self) -> String {
        self.coefficients
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Rescales a nonzero vector to a primitive integer vector whose first nonzero entry is positive.
pub fn normalize_primitive(v: &[Rational]) -> Vec<Rational> {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let g = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter()
        .map(|x| Rational::from_integer(x * &sign / &g))
        .collect()
}
