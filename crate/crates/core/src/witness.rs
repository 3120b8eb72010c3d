//! Constructive choice of monomials with a nonsingular evaluation matrix.
//!
//! Given distinct vectors `y_1..y_r` with nonzero coordinates and
//! `rank{y} + m - 1 >= r`, builds monomials `f_1..f_r` of degree `<= m`
//! such that `[f_i(y_j)]` is nonsingular. Outer induction on `m`, inner on
//! `r`: a vector outside the span of the earlier ones gets a fresh linear
//! monomial; a vector inside it gets one of the degree `m - 1` monomials
//! multiplied by one more coordinate.

use std::collections::HashSet;

use crate::error::{precondition, Error, Result};
use crate::linalg::{self, Echelon, RatMatrix, RatVector, Rational};
use crate::monomial::Monomial;

/// The `r x r` matrix `[f_i(y_j)]`.
pub fn evaluation_matrix(functions: &[Monomial], ys: &[RatVector]) -> Result<RatMatrix> {
    let mut m = RatMatrix::zeros(functions.len(), ys.len());
    for (i, f) in functions.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            m.set(i, j, f.eval(y)?);
        }
    }
    Ok(m)
}

/// Monomials `f_1..f_r` of degree `<= m` with `[f_i(y_j)]` nonsingular.
/// The result is verified before it is returned.
pub fn construct_independent_functions(ys: &[RatVector], m: usize) -> Result<Vec<Monomial>> {
    if ys.is_empty() {
        return Ok(Vec::new());
    }
    if m == 0 {
        return precondition("degree bound must be at least 1");
    }
    let dim = ys[0].dim();
    if let Some(y) = ys.iter().find(|y| y.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: y.dim(),
        });
    }
    if let Some(j) = ys.iter().position(|y| y.entries().iter().any(num_traits::Zero::is_zero)) {
        return precondition(format!("vector {j} has a zero coordinate"));
    }
    let mut seen = HashSet::new();
    if let Some(j) = ys.iter().position(|y| !seen.insert(y)) {
        return precondition(format!("vector {j} is a duplicate"));
    }
    let rank = linalg::span_rank(ys)?;
    if rank + m - 1 < ys.len() {
        return precondition(format!(
            "rank condition fails: rank {rank} + m {m} - 1 < r {}",
            ys.len()
        ));
    }

    let ordered = span_first_order(ys);
    let functions = build(&ordered, m)?;
    if !linalg::is_nonsingular(&evaluation_matrix(&functions, ys)?) {
        return Err(Error::Internal("constructed evaluation matrix is singular".into()));
    }
    Ok(functions)
}

/// Vectors that enlarge the span come first (in input order), then the rest.
/// Every prefix then satisfies the rank condition the induction needs.
fn span_first_order(ys: &[RatVector]) -> Vec<RatVector> {
    let mut echelon = Echelon::new();
    let (mut head, mut tail) = (Vec::new(), Vec::new());
    for y in ys {
        if echelon.insert(y.entries()) {
            head.push(y.clone());
        } else {
            tail.push(y.clone());
        }
    }
    head.extend(tail);
    head
}

fn build(ys: &[RatVector], m: usize) -> Result<Vec<Monomial>> {
    let r = ys.len();
    if m == 1 {
        let coords = linalg::independent_row_restriction(ys)?;
        return Ok(coords.into_iter().map(|c| Monomial::single(c as u32 + 1)).collect());
    }
    if r == 1 {
        return Ok(vec![Monomial::single(1)]);
    }
    let (prefix, last) = (&ys[..r - 1], &ys[r - 1]);
    let mut span = Echelon::new();
    for y in prefix {
        span.insert(y.entries());
    }

    if !span.contains(last.entries()) {
        let mut fs = build(prefix, m)?;
        let lambda = relation(&fs, prefix, last)?;
        let c = (0..last.dim())
            .find(|&c| {
                let combo: Rational = prefix.iter().zip(lambda.entries()).map(|(y, l)| l * &y[c]).sum();
                combo != last[c]
            })
            .ok_or_else(|| Error::Internal("vector outside the span agrees with its projection".into()))?;
        fs.push(Monomial::single(c as u32 + 1));
        return Ok(fs);
    }

    let mut fs = build(prefix, m - 1)?;
    let lambda = relation(&fs, prefix, last)?;
    for i in 0..fs.len() {
        for c in 1..=last.dim() as u32 {
            let g = fs[i].extended(c);
            let lhs = g.eval(last)?;
            let rhs: Rational = prefix
                .iter()
                .zip(lambda.entries())
                .map(|(y, l)| g.eval(y).map(|v| l * v))
                .sum::<Result<Rational>>()?;
            if lhs != rhs {
                fs.push(g);
                return Ok(fs);
            }
        }
    }
    Err(Error::Internal("no single-coordinate extension breaks the linear relation".into()))
}

/// The unique `λ` with `f_i(last) = Σ λ_j f_i(y_j)` for all `i`.
fn relation(fs: &[Monomial], prefix: &[RatVector], last: &RatVector) -> Result<RatVector> {
    let a = evaluation_matrix(fs, prefix)?;
    let b = RatVector::new(fs.iter().map(|f| f.eval(last)).collect::<Result<Vec<_>>>()?);
    linalg::solve(&a, &b).ok_or_else(|| Error::Internal("inductive evaluation matrix is singular".into()))
}
