//! Local 2D virtual element operators on a polygonal cell.
//!
//! Local dofs are ordered as: vertex values, then `k - 1` Gauss-Lobatto
//! nodes per edge (edge `i` runs from vertex `i` to vertex `i + 1`), then the
//! scaled moments `(1/|D|) ∫_D v m_α` for `|α| <= k - 2`.

mod layout;

pub use layout::DofLayout2;

use crate::mesh::{polygon_geometry, CellGeometry2};
use crate::polybasis::gauss::{gauss_legendre, lagrange, shifted_legendre_orthonormal};
use crate::polybasis::quadrature::polygon_rule;
use crate::polybasis::{mass_matrix, monomial_count, stiffness_matrix, QuadratureRule, ScaledMonomials};
use crate::vecops::{dist, lerp, sub};
use crate::{Point2, Result, VemError};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Choice of the stabilizing bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stabilization {
    /// Sum of products of boundary node values.
    S1,
    /// `h_D Σ_e ∫_e ∂_s w ∂_s v`.
    S2,
    /// As `S2` with the per-edge weight `h_e` in place of `h_D`.
    S2Tilde,
    /// The 3D form: scaled face moments plus face node values.
    #[serde(rename = "3d")]
    S3D,
}

impl FromStr for Stabilization {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Self::S1),
            "s2" => Ok(Self::S2),
            "s2tilde" | "s2~" => Ok(Self::S2Tilde),
            "3d" | "s3d" => Ok(Self::S3D),
            _ => Err(VemError::InvalidArgument(format!("unknown stabilization {s:?}"))),
        }
    }
}

impl fmt::Display for Stabilization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::S1 => "s1",
            Self::S2 => "s2",
            Self::S2Tilde => "s2tilde",
            Self::S3D => "3d",
        })
    }
}

/// Degree of the load projector: 1 for `k <= 2`, `k - 2` otherwise.
pub fn load_degree(k: usize) -> usize {
    if k <= 2 {
        1
    } else {
        k - 2
    }
}

/// Number of eigenvalues of a symmetric matrix below `1e-12 · trace`.
pub fn kernel_dimension(k: &DMatrix<f64>) -> usize {
    let trace = k.trace().abs();
    let eig = k.clone().symmetric_eigen();
    eig.eigenvalues.iter().filter(|&&l| l < 1e-12 * trace).count()
}

/// `Π*ᵀ G̃ Π* + (I − Π)ᵀ S (I − Π)` with `Π = D Π*`, symmetrized.
pub(crate) fn combine_stiffness(
    pi_star: &DMatrix<f64>,
    g_tilde: &DMatrix<f64>,
    d: &DMatrix<f64>,
    s: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = d.nrows();
    let consistency = pi_star.transpose() * g_tilde * pi_star;
    let residual = DMatrix::identity(n, n) - d * pi_star;
    let stab = residual.transpose() * s * &residual;
    let mut k = consistency + stab;
    symmetrize(&mut k);
    k
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Rejects a local stiffness whose kernel is wider than the constants.
pub(crate) fn check_kernel(k: &DMatrix<f64>) -> Result<()> {
    match kernel_dimension(k) {
        1 => Ok(()),
        d => Err(VemError::WideKernel(d)),
    }
}

/// Returns `(Π⁰*, C)` with `C = H Π⁰*`. `Π⁰v = Π∇v + r` with `r` of degree
/// `<= k - 2` chosen so that the low moments of `Π⁰v` are the moment dofs.
pub(crate) fn zero_projector(
    h: &DMatrix<f64>,
    pi_nabla_star: &DMatrix<f64>,
    measure: f64,
    n_low: usize,
    moment_offset: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if n_low == 0 {
        return Ok((pi_nabla_star.clone(), h * pi_nabla_star));
    }
    let mut target = -(h.rows(0, n_low) * pi_nabla_star);
    for g in 0..n_low {
        target[(g, moment_offset + g)] += measure;
    }
    let h_low = h.view((0, 0), (n_low, n_low)).into_owned();
    let r = h_low
        .cholesky()
        .ok_or_else(|| VemError::NotSpd("polynomial mass matrix".into()))?
        .solve(&target);
    let mut pi_zero = pi_nabla_star.clone();
    let mut low = pi_zero.rows_mut(0, n_low);
    low += &r;
    let mut c = h * &pi_zero;
    // the low moments are the dofs themselves; drop the round-off
    for g in 0..n_low {
        c.row_mut(g).fill(0.0);
        c[(g, moment_offset + g)] = measure;
    }
    Ok((pi_zero, c))
}

/// Coefficients of the load projection: `Ξ* = H_ξξ⁻¹ C[0..N_ξ]`.
pub(crate) fn load_projector(h: &DMatrix<f64>, zero_moments: &DMatrix<f64>, n_xi: usize) -> Result<DMatrix<f64>> {
    let moments = zero_moments.rows(0, n_xi).into_owned();
    let h_xi = h.view((0, 0), (n_xi, n_xi)).into_owned();
    let chol = h_xi
        .cholesky()
        .ok_or_else(|| VemError::NotSpd("load projector mass matrix".into()))?;
    Ok(chol.solve(&moments))
}

/// Virtual element of order `k` on one polygon.
#[derive(Debug, Clone)]
pub struct Element2 {
    layout: DofLayout2,
    vertices: Vec<Point2>,
    geometry: CellGeometry2,
    basis: ScaledMonomials<2>,
    nodes: Vec<Point2>,
    h: DMatrix<f64>,
    g_tilde: DMatrix<f64>,
    d: DMatrix<f64>,
    pi_nabla_star: DMatrix<f64>,
    pi_zero_star: DMatrix<f64>,
    zero_moments: DMatrix<f64>,
}

impl Element2 {
    /// Builds the projectors of the element on a counter-clockwise polygon.
    pub fn new(vertices: Vec<Point2>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(VemError::InvalidArgument("order k must be at least 1".into()));
        }
        let geometry = polygon_geometry(&vertices)?;
        let layout = DofLayout2::new(vertices.len(), k);
        let basis = ScaledMonomials::new(geometry.centroid, geometry.diameter, k);
        let rule = polygon_rule(&vertices, geometry.star_center, 2 * k);
        let h = mass_matrix(&basis, &rule);
        let g_tilde = stiffness_matrix(&basis, &rule);

        let params = layout.edge_params();
        let nv = vertices.len();
        let mut nodes = vertices.clone();
        for e in 0..nv {
            let (a, b) = (vertices[e], vertices[(e + 1) % nv]);
            for &t in &params[1..k] {
                nodes.push(lerp(a, b, t));
            }
        }

        let n_poly = basis.len();
        let n_low = layout.n_moments();
        let area = geometry.area;
        let mut d = DMatrix::zeros(layout.len(), n_poly);
        for (i, &p) in nodes.iter().enumerate() {
            for (beta, v) in basis.values(p).into_iter().enumerate() {
                d[(i, beta)] = v;
            }
        }
        for g in 0..n_low {
            for beta in 0..n_poly {
                d[(layout.moment(g), beta)] = h[(g, beta)] / area;
            }
        }

        let mut el = Self {
            layout,
            vertices,
            geometry,
            basis,
            nodes,
            h,
            g_tilde,
            d,
            pi_nabla_star: DMatrix::zeros(0, 0),
            pi_zero_star: DMatrix::zeros(0, 0),
            zero_moments: DMatrix::zeros(0, 0),
        };
        el.pi_nabla_star = el.build_pi_nabla()?;
        (el.pi_zero_star, el.zero_moments) =
            zero_projector(&el.h, &el.pi_nabla_star, area, n_low, el.layout.moment(0))?;
        Ok(el)
    }

    fn build_pi_nabla(&self) -> Result<DMatrix<f64>> {
        let k = self.layout.k();
        let n_poly = self.basis.len();
        let ndof = self.layout.len();
        let nv = self.vertices.len();
        let params = self.layout.edge_params();
        let (gp, gw) = gauss_legendre(k + 2);
        let perimeter = self.geometry.perimeter;

        let mut b = DMatrix::zeros(n_poly, ndof);
        for e in 0..nv {
            let (a, c) = (self.vertices[e], self.vertices[(e + 1) % nv]);
            let len = dist(a, c);
            let t = sub(c, a);
            let normal = [t[1] / len, -t[0] / len];
            let dofs = self.layout.edge_dofs(e);
            for (&s, &w) in gp.iter().zip(&gw) {
                let x = lerp(a, c, s);
                let (phi, _) = lagrange(&params, s);
                let grads = self.basis.gradients(x);
                for (j, &dof) in dofs.iter().enumerate() {
                    let wphi = w * len * phi[j];
                    b[(0, dof)] += wphi / perimeter;
                    for alpha in 1..n_poly {
                        let dn = grads[alpha][0] * normal[0] + grads[alpha][1] * normal[1];
                        b[(alpha, dof)] += wphi * dn;
                    }
                }
            }
        }
        if k >= 2 {
            let lap = self.basis.laplacian_matrix();
            for alpha in 0..n_poly {
                for gam in 0..lap.nrows() {
                    b[(alpha, self.layout.moment(gam))] -= lap[(gam, alpha)] * self.geometry.area;
                }
            }
        }
        // G = B D exactly in exact arithmetic; forming it this way keeps
        // Π∇* D = I to round-off on badly scaled monomials
        let g = &b * &self.d;
        g.lu().solve(&b).ok_or(VemError::SingularG)
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    pub fn layout(&self) -> &DofLayout2 {
        &self.layout
    }

    pub fn ndof(&self) -> usize {
        self.layout.len()
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn geometry(&self) -> &CellGeometry2 {
        &self.geometry
    }

    pub fn basis(&self) -> &ScaledMonomials<2> {
        &self.basis
    }

    /// Positions of the boundary nodes in dof order.
    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    /// Polynomial mass matrix `H`.
    pub fn mass(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Polynomial stiffness matrix `G̃`.
    pub fn poly_stiffness(&self) -> &DMatrix<f64> {
        &self.g_tilde
    }

    /// Dofs of the basis monomials, one column per monomial.
    pub fn dof_matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// Map from dofs to the coefficients of `Π∇v`.
    pub fn pi_nabla_star(&self) -> &DMatrix<f64> {
        &self.pi_nabla_star
    }

    /// Map from dofs to the dofs of `Π∇v`.
    pub fn pi_nabla(&self) -> DMatrix<f64> {
        &self.d * &self.pi_nabla_star
    }

    /// Map from dofs to the coefficients of `Π⁰v`.
    pub fn pi_zero_star(&self) -> &DMatrix<f64> {
        &self.pi_zero_star
    }

    /// Map from dofs to the coefficients of the load projection `Ξv`.
    pub fn xi_star(&self) -> Result<DMatrix<f64>> {
        load_projector(&self.h, &self.zero_moments, monomial_count(2, load_degree(self.k()) as isize))
    }

    /// Fan quadrature of the cell exact to `degree`.
    pub fn rule(&self, degree: usize) -> QuadratureRule<2> {
        polygon_rule(&self.vertices, self.geometry.star_center, degree)
    }

    /// Dofs of the polynomial with the given basis coefficients.
    pub fn poly_dofs(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.d * coeffs
    }

    /// Stabilization matrix acting on dofs (zero on the moment dofs).
    pub fn stabilization(&self, stab: Stabilization) -> Result<DMatrix<f64>> {
        let n = self.ndof();
        let mut s = DMatrix::zeros(n, n);
        match stab {
            Stabilization::S1 => {
                for i in 0..self.layout.n_boundary() {
                    s[(i, i)] = 1.0;
                }
            }
            Stabilization::S2 | Stabilization::S2Tilde => {
                let params = self.layout.edge_params();
                let k = self.k();
                let (gp, gw) = gauss_legendre(k + 1);
                let nv = self.vertices.len();
                for e in 0..nv {
                    let len = self.geometry.edge_lengths[e];
                    let weight = match stab {
                        Stabilization::S2 => self.geometry.diameter / len,
                        _ => 1.0,
                    };
                    let dofs = self.layout.edge_dofs(e);
                    for (&t, &w) in gp.iter().zip(&gw) {
                        let (_, dphi) = lagrange(&params, t);
                        for (a, &ia) in dofs.iter().enumerate() {
                            for (b, &ib) in dofs.iter().enumerate() {
                                s[(ia, ib)] += weight * w * dphi[a] * dphi[b];
                            }
                        }
                    }
                }
            }
            Stabilization::S3D => {
                return Err(VemError::InvalidArgument(
                    "the 3d stabilization does not apply to polygons".into(),
                ))
            }
        }
        Ok(s)
    }

    /// Consistency part `Π*ᵀ G̃ Π*` of the local stiffness.
    pub fn consistency(&self) -> DMatrix<f64> {
        self.pi_nabla_star.transpose() * &self.g_tilde * &self.pi_nabla_star
    }

    /// Local stiffness matrix; fails if its kernel is not exactly the constants.
    pub fn local_stiffness(&self, stab: Stabilization) -> Result<DMatrix<f64>> {
        let s = self.stabilization(stab)?;
        let k = combine_stiffness(&self.pi_nabla_star, &self.g_tilde, &self.d, &s);
        check_kernel(&k)?;
        Ok(k)
    }

    /// `F_i = ∫_D f Ξφ_i`, with `f` integrated exactly to degree `2k`.
    pub fn local_load(&self, f: &dyn Fn(Point2) -> f64) -> Result<DVector<f64>> {
        let xi = self.xi_star()?;
        let n_xi = xi.nrows();
        let mut fm = DVector::zeros(n_xi);
        for (p, w) in self.rule(2 * self.k()).iter() {
            let fv = f(p);
            if fv == 0.0 {
                continue;
            }
            let vals = self.basis.values(p);
            for a in 0..n_xi {
                fm[a] += w * fv * vals[a];
            }
        }
        Ok(xi.transpose() * fm)
    }

    /// Dofs of the interpolant: node values and quadrature moments.
    pub fn interpolate(&self, zeta: &dyn Fn(Point2) -> f64) -> DVector<f64> {
        let mut v = DVector::zeros(self.ndof());
        for (i, &p) in self.nodes.iter().enumerate() {
            v[i] = zeta(p);
        }
        let n_low = self.layout.n_moments();
        if n_low > 0 {
            let mut m = vec![0.0; n_low];
            for (p, w) in self.rule(2 * self.k() + 2).iter() {
                let z = zeta(p);
                let vals = self.basis.values(p);
                for (g, mg) in m.iter_mut().enumerate() {
                    *mg += w * z * vals[g];
                }
            }
            for (g, mg) in m.into_iter().enumerate() {
                v[self.layout.moment(g)] = mg / self.geometry.area;
            }
        }
        v
    }

    /// Value of the (polynomial) trace on edge `e` at parameter `t ∈ [0, 1]`.
    pub fn edge_value(&self, e: usize, dofs: &DVector<f64>, t: f64) -> f64 {
        let (phi, _) = lagrange(&self.layout.edge_params(), t);
        self.layout.edge_dofs(e).iter().zip(phi).map(|(&i, p)| dofs[i] * p).sum()
    }

    /// `sqrt(‖Π⁰_{k-2} v‖²_D + h_D Σ_e ‖Π⁰_{k-1,e} v‖²_e)`.
    pub fn seminorm_tbar(&self, dofs: &DVector<f64>) -> Result<f64> {
        let k = self.k();
        let n_low = self.layout.n_moments();
        let mut total = 0.0;
        if n_low > 0 {
            let area = self.geometry.area;
            let h_low = self.h.view((0, 0), (n_low, n_low)).into_owned();
            let d = dofs.rows(self.layout.moment(0), n_low).into_owned();
            let chol = h_low
                .cholesky()
                .ok_or_else(|| VemError::NotSpd("polynomial mass matrix".into()))?;
            total += area * area * d.dot(&chol.solve(&d));
        }
        let (gp, gw) = gauss_legendre(k + 1);
        for e in 0..self.vertices.len() {
            let len = self.geometry.edge_lengths[e];
            let mut edge = 0.0;
            for j in 0..k {
                let c: f64 = gp
                    .iter()
                    .zip(&gw)
                    .map(|(&t, &w)| w * self.edge_value(e, dofs, t) * shifted_legendre_orthonormal(j, t))
                    .sum();
                edge += c * c;
            }
            total += self.geometry.diameter * len * edge;
        }
        Ok(total.sqrt())
    }
}
