//! Exact restrictions of cell polynomials to edges and faces.
//!
//! A trace is expressed through an affine parametrisation `x = origin + A ξ`
//! of the edge (`ξ ∈ [0,1]`) or face (`ξ` in face-local scaled coordinates).
//! Each scaled monomial is a product of affine forms in `ξ` and is expanded
//! exactly into the monomials of the lower-dimensional parameter.

use super::monomials::{exponents, monomial_count, ScaledMonomials};
use nalgebra::DMatrix;

/// Dense polynomial in `M` variables of total degree `<= degree`, stored in
/// the graded ordering of [`exponents`].
#[derive(Debug, Clone)]
struct Poly<const M: usize> {
    degree: usize,
    coeffs: Vec<f64>,
}

impl<const M: usize> Poly<M> {
    fn constant(degree: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; monomial_count(M, degree as isize)];
        coeffs[0] = c;
        Self { degree, coeffs }
    }

    fn mul(&self, other: &Self, table: &[[usize; M]]) -> Self {
        let degree = self.degree;
        let mut out = vec![0.0; self.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let e: [usize; M] = std::array::from_fn(|d| table[i][d] + table[j][d]);
                if e.iter().sum::<usize>() > degree {
                    continue;
                }
                let idx = table.iter().position(|t| *t == e).expect("exponent in table");
                out[idx] += a * b;
            }
        }
        Self { degree, coeffs: out }
    }
}

/// Coefficient map from the cell basis to plain monomials `ξ^β` of the
/// parameter, for the affine map `x = origin + sum_j ξ_j axes[j]`.
///
/// Row `β` (graded ordering in `M` variables), column `α` (cell basis index).
pub fn pullback<const D: usize, const M: usize>(
    basis: &ScaledMonomials<D>,
    origin: [f64; D],
    axes: [[f64; D]; M],
) -> DMatrix<f64> {
    let degree = basis.degree();
    let table = exponents::<M>(degree);
    // scaled coordinate i as an affine polynomial in ξ
    let coords: Vec<Poly<M>> = (0..D)
        .map(|i| {
            let mut p = Poly::<M>::constant(degree, (origin[i] - basis.center()[i]) / basis.scale());
            for (j, axis) in axes.iter().enumerate() {
                if degree >= 1 {
                    // linear monomial ξ_j sits at index 1 + j
                    p.coeffs[1 + j] = axis[i] / basis.scale();
                }
            }
            p
        })
        .collect();
    let mut out = DMatrix::zeros(table.len(), basis.len());
    for (col, e) in basis.exponents().iter().enumerate() {
        let mut acc = Poly::<M>::constant(degree, 1.0);
        for i in 0..D {
            for _ in 0..e[i] {
                acc = acc.mul(&coords[i], &table);
            }
        }
        for (row, c) in acc.coeffs.iter().enumerate() {
            out[(row, col)] = *c;
        }
    }
    out
}

/// Trace of the cell basis on the edge `a -> b`, as coefficients of `t^j`,
/// `t ∈ [0, 1]`, `x = a + t (b - a)`.
pub fn edge_trace<const D: usize>(basis: &ScaledMonomials<D>, a: [f64; D], b: [f64; D]) -> DMatrix<f64> {
    pullback::<D, 1>(basis, a, [std::array::from_fn(|i| b[i] - a[i])])
}

/// Normal derivative `n · ∇m_α` restricted to the edge `a -> b`, as
/// coefficients of `t^j` (degree `<= k - 1`).
pub fn normal_derivative_trace(basis: &ScaledMonomials<2>, a: [f64; 2], b: [f64; 2], normal: [f64; 2]) -> DMatrix<f64> {
    if basis.degree() == 0 {
        return DMatrix::zeros(1, basis.len());
    }
    let dx = basis.derivative_matrix(0);
    let dy = basis.derivative_matrix(1);
    let lower = ScaledMonomials::new(basis.center(), basis.scale(), basis.degree() - 1);
    let dn = dx * normal[0] + dy * normal[1];
    let trace = edge_trace(&lower, a, b);
    trace * dn
}

/// Trace of a 3D cell basis on a planar face with local frame
/// `x = origin + ξ e1 + η e2`, expressed in the face's own scaled monomials
/// centred at the frame origin with scale `face_scale`.
pub fn face_trace(
    basis: &ScaledMonomials<3>,
    origin: [f64; 3],
    e1: [f64; 3],
    e2: [f64; 3],
    face_scale: f64,
) -> DMatrix<f64> {
    // Face monomials are (ξ / h_F)^β, so substitute ξ = h_F ξ'.
    let s1: [f64; 3] = std::array::from_fn(|i| e1[i] * face_scale);
    let s2: [f64; 3] = std::array::from_fn(|i| e2[i] * face_scale);
    pullback::<3, 2>(basis, origin, [s1, s2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_traces_to_one() {
        let b = ScaledMonomials::new([0.5, 0.5], 2f64.sqrt(), 3);
        let t = edge_trace(&b, [0.0, 0.0], [1.0, 0.0]);
        assert_eq!(t[(0, 0)], 1.0);
        for r in 1..t.nrows() {
            assert_eq!(t[(r, 0)], 0.0);
        }
    }

    #[test]
    fn linear_on_axis_edge_has_length_over_h_slope() {
        let h = 2f64.sqrt();
        let b = ScaledMonomials::new([0.5, 0.5], h, 1);
        let t = edge_trace(&b, [0.0, 0.0], [1.0, 0.0]);
        // m_(1,0) = (x - .5)/h -> -0.5/h + t/h
        assert!((t[(0, 1)] + 0.5 / h).abs() < 1e-15);
        assert!((t[(1, 1)] - 1.0 / h).abs() < 1e-15);
    }

    #[test]
    fn trace_matches_pointwise_evaluation() {
        let b = ScaledMonomials::new([0.2, 0.1], 0.8, 4);
        let (a, c) = ([0.3, -0.4], [1.1, 0.7]);
        let t = edge_trace(&b, a, c);
        for &s in &[0.0, 0.3, 0.77, 1.0] {
            let x = [a[0] + s * (c[0] - a[0]), a[1] + s * (c[1] - a[1])];
            let v = b.values(x);
            for col in 0..b.len() {
                let p: f64 = (0..t.nrows()).map(|j| t[(j, col)] * s.powi(j as i32)).sum();
                assert!((p - v[col]).abs() < 1e-13);
            }
        }
    }
}
