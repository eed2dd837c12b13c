//! Scaled monomial spaces on cells, faces and edges, their calculus, and
//! exact quadrature on star-shaped domains.

pub mod gauss;
mod monomials;
pub mod quadrature;
pub mod trace;

pub use monomials::{exponents, monomial_count, ScaledMonomials};
pub use quadrature::QuadratureRule;

use crate::{Result, VemError};
use nalgebra::DMatrix;

/// `H_{ab} = ∫ m_a m_b` with the given rule (which must be exact to `2k`).
pub fn mass_matrix<const D: usize>(basis: &ScaledMonomials<D>, rule: &QuadratureRule<D>) -> DMatrix<f64> {
    let n = basis.len();
    let mut h = DMatrix::zeros(n, n);
    for (p, w) in rule.iter() {
        let v = basis.values(p);
        for a in 0..n {
            let wa = w * v[a];
            for b in a..n {
                h[(a, b)] += wa * v[b];
            }
        }
    }
    symmetrize_upper(&mut h);
    h
}

/// `G_{ab} = ∫ ∇m_a · ∇m_b` with the given rule (exact to `2k - 2`).
pub fn stiffness_matrix<const D: usize>(basis: &ScaledMonomials<D>, rule: &QuadratureRule<D>) -> DMatrix<f64> {
    let n = basis.len();
    let mut g = DMatrix::zeros(n, n);
    for (p, w) in rule.iter() {
        let grads = basis.gradients(p);
        for a in 1..n {
            for b in a..n {
                let dot: f64 = (0..D).map(|i| grads[a][i] * grads[b][i]).sum();
                g[(a, b)] += w * dot;
            }
        }
    }
    symmetrize_upper(&mut g);
    g
}

fn symmetrize_upper(m: &mut DMatrix<f64>) {
    for a in 0..m.nrows() {
        for b in 0..a {
            m[(a, b)] = m[(b, a)];
        }
    }
}

/// Checks that a mass matrix is SPD (a failure means the quadrature was not
/// exact enough or the cell is degenerate).
pub fn check_spd(h: &DMatrix<f64>) -> Result<()> {
    if h.clone().cholesky().is_none() {
        return Err(VemError::NotSpd("polynomial mass matrix".into()));
    }
    Ok(())
}

/// Gram-Schmidt (via Cholesky) transform `T` with `Tᵀ H T = I`, in the
/// graded basis order. Columns of `T` are the coefficients of the
/// orthonormalized basis members.
pub fn orthonormal_transform(h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = h
        .clone()
        .cholesky()
        .ok_or_else(|| VemError::NotSpd("polynomial mass matrix".into()))?;
    let l = chol.l();
    let n = h.nrows();
    let linv = l
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| VemError::NotSpd("triangular factor".into()))?;
    Ok(linv.transpose())
}

/// 2-norm condition number of a symmetric positive definite matrix.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}
