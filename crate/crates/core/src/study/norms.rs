//! Error norms of a discrete solution against a closed-form one.

use crate::polybasis::gauss::lagrange;
use crate::system::{Discretization, Field, VirtualElement};
use nalgebra::DVector;
use nalgebra_sparse::CsrMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Piecewise errors of the two polynomial projections of `u_h`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProjectedErrors {
    /// `|u − Π∇u_h|_{h,1}`
    pub h1_nabla: f64,
    /// `|u − Π⁰u_h|_{h,1}`
    pub h1_zero: f64,
    /// `‖u − Π⁰u_h‖_{L2}`
    pub l2_zero: f64,
    /// `‖u − Π∇u_h‖_{L2}`
    pub l2_nabla: f64,
}

/// Quadrature degree used for the error integrals.
pub fn error_quadrature_degree(k: usize) -> usize {
    2 * k + 6
}

/// Broken H¹ and L² errors of `Π∇u_h` and `Π⁰u_h`, with cell integrals
/// exact to `degree` for polynomial integrands.
pub fn projected_errors_with<const D: usize, E: VirtualElement<D>>(
    disc: &Discretization<D, E>,
    uh: &DVector<f64>,
    u: Field<'_, D>,
    grad: &(dyn Fn([f64; D]) -> [f64; D] + Sync),
    degree: usize,
) -> ProjectedErrors {
    let cells: Vec<[f64; 4]> = (0..disc.n_cells())
        .into_par_iter()
        .map(|c| {
            let el = &disc.elements[c];
            let local = disc.local_dofs(c, uh);
            let pn = el.nabla_star() * &local;
            let pz = el.zero_star() * &local;
            let basis = el.poly_basis();
            let mut acc = [0.0; 4];
            for (x, w) in el.volume_rule(degree).iter() {
                let ux = u(x);
                let gx = grad(x);
                let gn = basis.evaluate_gradient(pn.as_slice(), x);
                let gz = basis.evaluate_gradient(pz.as_slice(), x);
                let sq = |a: [f64; D], b: [f64; D]| (0..D).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>();
                acc[0] += w * sq(gx, gn);
                acc[1] += w * sq(gx, gz);
                acc[2] += w * (ux - basis.evaluate(pz.as_slice(), x)).powi(2);
                acc[3] += w * (ux - basis.evaluate(pn.as_slice(), x)).powi(2);
            }
            acc
        })
        .collect();
    let mut sum = [0.0; 4];
    for acc in &cells {
        for i in 0..4 {
            sum[i] += acc[i];
        }
    }
    ProjectedErrors {
        h1_nabla: sum[0].sqrt(),
        h1_zero: sum[1].sqrt(),
        l2_zero: sum[2].sqrt(),
        l2_nabla: sum[3].sqrt(),
    }
}

/// [`projected_errors_with`] at the default quadrature degree `2k + 6`.
pub fn projected_errors<const D: usize, E: VirtualElement<D>>(
    disc: &Discretization<D, E>,
    uh: &DVector<f64>,
    u: Field<'_, D>,
    grad: &(dyn Fn([f64; D]) -> [f64; D] + Sync),
) -> ProjectedErrors {
    projected_errors_with(disc, uh, u, grad, error_quadrature_degree(disc.k))
}

/// Sample parameters on `[0, 1]`: both endpoints and `m` Chebyshev points.
pub fn edge_samples(m: usize) -> Vec<f64> {
    let mut t = vec![0.0, 1.0];
    t.extend((0..m).map(|i| 0.5 * (1.0 - ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos())));
    t
}

/// `max_e ‖u − u_h‖_{L∞(e)}` sampled at the endpoints and `samples`
/// Chebyshev points per edge. Edges shared by two cells are visited twice,
/// which does not change the maximum.
pub fn edge_linf_error_with<const D: usize, E: VirtualElement<D>>(
    disc: &Discretization<D, E>,
    uh: &DVector<f64>,
    u: Field<'_, D>,
    samples: usize,
) -> f64 {
    let ts = edge_samples(samples);
    (0..disc.n_cells())
        .into_par_iter()
        .map(|c| {
            let local = disc.local_dofs(c, uh);
            let mut worst = 0.0f64;
            for tr in disc.elements[c].edge_traces() {
                for &t in &ts {
                    let (l, _) = lagrange(&tr.params, t);
                    let vh: f64 = tr.dofs.iter().zip(&l).map(|(&d, li)| local[d] * li).sum();
                    let x = std::array::from_fn(|i| tr.start[i] + t * (tr.end[i] - tr.start[i]));
                    worst = worst.max((u(x) - vh).abs());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// [`edge_linf_error_with`] using `4k + 1` Chebyshev points.
pub fn edge_linf_error<const D: usize, E: VirtualElement<D>>(
    disc: &Discretization<D, E>,
    uh: &DVector<f64>,
    u: Field<'_, D>,
) -> f64 {
    edge_linf_error_with(disc, uh, u, 4 * disc.k + 1)
}

/// `sqrt(dᵀ A d)` for a dof difference `d` on the free dofs.
pub fn energy_error(a: &CsrMatrix<f64>, d: &DVector<f64>) -> f64 {
    let mut s = 0.0;
    for (i, j, v) in a.triplet_iter() {
        s += d[i] * v * d[j];
    }
    s.max(0.0).sqrt()
}
