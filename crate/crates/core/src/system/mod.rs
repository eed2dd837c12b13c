//! Global dof numbering, Dirichlet elimination, sparse assembly and solves.

mod dofmap;
mod solve;

pub use dofmap::GlobalDofMap;
pub use solve::{reverse_cuthill_mckee, solve, solve_cg, solve_cholesky, SolveInfo, Solver, DIRECT_LIMIT};

use crate::element2d::{Element2, Stabilization};
use crate::element3d::{build_face_elements, Element3};
use crate::mesh::{PolygonalMesh, PolyhedralMesh};
use crate::polybasis::{QuadratureRule, ScaledMonomials};
use crate::{Result, VemError};
use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;

/// Scalar field on `D`-dimensional points, shareable across worker threads.
pub type Field<'a, const D: usize> = &'a (dyn Fn([f64; D]) -> f64 + Sync);

/// A polynomial trace along one element edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTrace<const D: usize> {
    pub start: [f64; D],
    pub end: [f64; D],
    /// Local dofs in parameter order (start vertex, interior nodes, end vertex).
    pub dofs: Vec<usize>,
    /// Node parameters on `[0, 1]`.
    pub params: Vec<f64>,
}

/// Operations the global system needs from a local element.
pub trait VirtualElement<const D: usize>: Send + Sync {
    fn ndof(&self) -> usize;
    fn stiffness(&self, stab: Stabilization) -> Result<DMatrix<f64>>;
    fn load(&self, f: &dyn Fn([f64; D]) -> f64) -> Result<DVector<f64>>;
    fn interpolant(&self, u: &dyn Fn([f64; D]) -> f64) -> DVector<f64>;
    fn poly_basis(&self) -> &ScaledMonomials<D>;
    fn nabla_star(&self) -> &DMatrix<f64>;
    fn zero_star(&self) -> &DMatrix<f64>;
    fn volume_rule(&self, degree: usize) -> QuadratureRule<D>;
    fn diameter(&self) -> f64;
    fn edge_traces(&self) -> Vec<EdgeTrace<D>>;
}

impl VirtualElement<2> for Element2 {
    fn ndof(&self) -> usize {
        Element2::ndof(self)
    }
    fn stiffness(&self, stab: Stabilization) -> Result<DMatrix<f64>> {
        self.local_stiffness(stab)
    }
    fn load(&self, f: &dyn Fn([f64; 2]) -> f64) -> Result<DVector<f64>> {
        self.local_load(f)
    }
    fn interpolant(&self, u: &dyn Fn([f64; 2]) -> f64) -> DVector<f64> {
        self.interpolate(u)
    }
    fn poly_basis(&self) -> &ScaledMonomials<2> {
        self.basis()
    }
    fn nabla_star(&self) -> &DMatrix<f64> {
        self.pi_nabla_star()
    }
    fn zero_star(&self) -> &DMatrix<f64> {
        self.pi_zero_star()
    }
    fn volume_rule(&self, degree: usize) -> QuadratureRule<2> {
        self.rule(degree)
    }
    fn diameter(&self) -> f64 {
        self.geometry().diameter
    }
    fn edge_traces(&self) -> Vec<EdgeTrace<2>> {
        let v = self.vertices();
        let n = v.len();
        let params = self.layout().edge_params();
        (0..n)
            .map(|e| EdgeTrace {
                start: v[e],
                end: v[(e + 1) % n],
                dofs: self.layout().edge_dofs(e),
                params: params.clone(),
            })
            .collect()
    }
}

impl VirtualElement<3> for Element3 {
    fn ndof(&self) -> usize {
        Element3::ndof(self)
    }
    fn stiffness(&self, stab: Stabilization) -> Result<DMatrix<f64>> {
        self.local_stiffness(stab)
    }
    fn load(&self, f: &dyn Fn([f64; 3]) -> f64) -> Result<DVector<f64>> {
        self.local_load(f)
    }
    fn interpolant(&self, u: &dyn Fn([f64; 3]) -> f64) -> DVector<f64> {
        self.interpolate(u)
    }
    fn poly_basis(&self) -> &ScaledMonomials<3> {
        self.basis()
    }
    fn nabla_star(&self) -> &DMatrix<f64> {
        self.pi_nabla_star()
    }
    fn zero_star(&self) -> &DMatrix<f64> {
        self.pi_zero_star()
    }
    fn volume_rule(&self, degree: usize) -> QuadratureRule<3> {
        self.rule(degree)
    }
    fn diameter(&self) -> f64 {
        self.geometry().diameter
    }
    fn edge_traces(&self) -> Vec<EdgeTrace<3>> {
        (0..self.edges().len())
            .map(|e| {
                let (dofs, params) = self.edge_dofs(e);
                let [a, b] = self.edges()[e];
                EdgeTrace {
                    start: self.nodes()[a],
                    end: self.nodes()[b],
                    dofs,
                    params,
                }
            })
            .collect()
    }
}

/// Assembled reduced system on the free dofs.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub matrix: CsrMatrix<f64>,
    pub rhs: DVector<f64>,
}

/// Local elements of a whole mesh with their global numbering.
#[derive(Debug, Clone)]
pub struct Discretization<const D: usize, E> {
    pub k: usize,
    pub dofmap: GlobalDofMap,
    pub elements: Vec<E>,
}

pub fn discretize_2d(mesh: &PolygonalMesh, k: usize) -> Result<Discretization<2, Element2>> {
    if k == 0 {
        return Err(VemError::InvalidArgument("order k must be at least 1".into()));
    }
    let elements = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| Element2::new(mesh.cell_points(c), k).map_err(|e| e.in_cell(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Discretization {
        k,
        dofmap: GlobalDofMap::new_2d(mesh, k),
        elements,
    })
}

pub fn discretize_3d(mesh: &PolyhedralMesh, k: usize) -> Result<Discretization<3, Element3>> {
    if k == 0 {
        return Err(VemError::InvalidArgument("order k must be at least 1".into()));
    }
    let faces = build_face_elements(mesh, k)?;
    let elements = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| Element3::new(mesh, c, &faces).map_err(|e| e.in_cell(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Discretization {
        k,
        dofmap: GlobalDofMap::new_3d(mesh, k),
        elements,
    })
}

impl<const D: usize, E: VirtualElement<D>> Discretization<D, E> {
    pub fn n_cells(&self) -> usize {
        self.elements.len()
    }

    /// Global dofs of the interpolant of `u` (shared dofs agree between cells).
    pub fn interpolate(&self, u: Field<'_, D>) -> DVector<f64> {
        let locals: Vec<DVector<f64>> = self.elements.par_iter().map(|el| el.interpolant(u)).collect();
        let mut v = DVector::zeros(self.dofmap.n_total());
        for (c, local) in locals.iter().enumerate() {
            for (i, &g) in self.dofmap.cell_dofs(c).iter().enumerate() {
                v[g] = local[i];
            }
        }
        v
    }

    /// Local stiffness matrices of all cells.
    pub fn local_matrices(&self, stab: Stabilization) -> Result<Vec<DMatrix<f64>>> {
        self.elements
            .par_iter()
            .enumerate()
            .map(|(c, el)| el.stiffness(stab).map_err(|e| e.in_cell(c)))
            .collect()
    }

    /// Assembles `a_h` and `(f, Ξ_h ·)` on the free dofs. When `boundary` is
    /// given, the fixed dofs take the interpolated boundary values and their
    /// contribution is moved to the right-hand side.
    pub fn assemble(&self, stab: Stabilization, f: Field<'_, D>, boundary: Option<Field<'_, D>>) -> Result<GlobalSystem> {
        let locals: Vec<(DMatrix<f64>, DVector<f64>)> = self
            .elements
            .par_iter()
            .enumerate()
            .map(|(c, el)| {
                let k = el.stiffness(stab).map_err(|e| e.in_cell(c))?;
                let l = el.load(f).map_err(|e| e.in_cell(c))?;
                Ok((k, l))
            })
            .collect::<Result<Vec<_>>>()?;
        let fixed_values = boundary.map(|g| self.interpolate(g));

        let n = self.dofmap.n_free();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut rhs = DVector::zeros(n);
        for (c, (km, fl)) in locals.iter().enumerate() {
            let dofs = self.dofmap.cell_dofs(c);
            for (i, &gi) in dofs.iter().enumerate() {
                let Some(ri) = self.dofmap.free_index(gi) else { continue };
                rhs[ri] += fl[i];
                for (j, &gj) in dofs.iter().enumerate() {
                    match self.dofmap.free_index(gj) {
                        Some(rj) => rows[ri].push((rj, km[(i, j)])),
                        None => {
                            if let Some(g) = &fixed_values {
                                rhs[ri] -= km[(i, j)] * g[gj];
                            }
                        }
                    }
                }
            }
        }
        let matrix = rows_to_csr(n, rows);
        Ok(GlobalSystem { matrix, rhs })
    }

    /// Assembles and solves; returns the global dof vector of `u_h`.
    pub fn solve(
        &self,
        stab: Stabilization,
        f: Field<'_, D>,
        boundary: Option<Field<'_, D>>,
        solver: Solver,
        tol: f64,
    ) -> Result<(DVector<f64>, GlobalSystem, SolveInfo)> {
        let system = self.assemble(stab, f, boundary)?;
        let (x, info) = solve(&system.matrix, &system.rhs, solver, tol)?;
        let mut u = match boundary {
            Some(g) => self.interpolate(g),
            None => DVector::zeros(self.dofmap.n_total()),
        };
        for (r, &g) in self.dofmap.free_dofs().iter().enumerate() {
            u[g] = x[r];
        }
        Ok((u, system, info))
    }

    /// Restriction of a global dof vector to one cell.
    pub fn local_dofs(&self, cell: usize, global: &DVector<f64>) -> DVector<f64> {
        let dofs = self.dofmap.cell_dofs(cell);
        DVector::from_iterator(dofs.len(), dofs.iter().map(|&g| global[g]))
    }

    /// Restriction of a global dof vector to the free dofs.
    pub fn free_part(&self, global: &DVector<f64>) -> DVector<f64> {
        let free = self.dofmap.free_dofs();
        DVector::from_iterator(free.len(), free.iter().map(|&g| global[g]))
    }
}

/// Sums duplicate entries of each row in insertion order, so the result is
/// bit-reproducible and exactly symmetric when the inputs are.
fn rows_to_csr(n: usize, rows: Vec<Vec<(usize, f64)>>) -> CsrMatrix<f64> {
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    offsets.push(0);
    for mut row in rows {
        row.sort_by_key(|&(j, _)| j);
        let mut iter = row.into_iter();
        if let Some((mut cj, mut cv)) = iter.next() {
            for (j, v) in iter {
                if j == cj {
                    cv += v;
                } else {
                    cols.push(cj);
                    vals.push(cv);
                    cj = j;
                    cv = v;
                }
            }
            cols.push(cj);
            vals.push(cv);
        }
        offsets.push(cols.len());
    }
    CsrMatrix::try_from_csr_data(n, n, offsets, cols, vals).expect("valid CSR structure")
}

/// Largest `|A_ij − A_ji|`.
pub fn asymmetry(a: &CsrMatrix<f64>) -> f64 {
    let t = a.transpose();
    let mut max = 0.0f64;
    for ((i, j, v), (ti, tj, tv)) in a.triplet_iter().zip(t.triplet_iter()) {
        if i != ti || j != tj {
            return f64::INFINITY;
        }
        max = max.max((v - tv).abs());
    }
    max
}

/// C-style `%.{precision}g` formatting.
pub fn format_g(x: f64, precision: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let strip = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip(mantissa), sign, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip(&format!("{:.*}", decimals, x))
    }
}

/// Writes the lower triangle of `A` in symmetric coordinate format:
/// 1-based `i j value` lines with values printed as `%.17g`.
pub fn dump_matrix(a: &CsrMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let lower = a.triplet_iter().filter(|&(i, j, _)| j <= i).count();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), lower)?;
    for (i, j, &v) in a.triplet_iter() {
        if j <= i {
            writeln!(out, "{} {} {}", i + 1, j + 1, format_g(v, 17))?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests;
