//! Gauss-Jordan elimination directly over `Q`.
//!
//! Used for kernels and linear solves, and as the independent route against
//! which the fraction-free rank is checked.

use num_traits::{One, Zero};

use super::types::{RatMatrix, RatVector, Rational};

/// Reduced row echelon form and its pivot columns (first nonzero in column order).
pub fn rref(m: &RatMatrix) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<Rational>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = Rational::one() / &a[r][c];
        for x in a[r][c..].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= &f * p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank_naive(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

/// Basis of the right kernel: one vector per free column, with that free
/// variable set to 1 and the other free variables to 0.
pub fn kernel_basis(m: &RatMatrix) -> Vec<RatVector> {
    let cols = m.cols();
    let (a, pivots) = rref(m);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[row][free].clone();
            }
            RatVector::new(v)
        })
        .collect()
}

/// Unique solution of a square nonsingular system, `None` if singular.
pub fn solve(m: &RatMatrix, b: &RatVector) -> Option<RatVector> {
    let n = m.rows();
    if m.cols() != n || b.dim() != n {
        return None;
    }
    let mut aug = RatMatrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let (a, pivots) = rref(&aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(RatVector::new(a.iter().map(|row| row[n].clone()).collect()))
}

/// Incrementally maintained row space, kept in reduced echelon form.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Rational::one() / &w[p];
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&w) {
                *x -= &f * y;
            }
        }
        self.rows.push((p, w));
        true
    }
}
