//! Local 3D virtual element operators on a polyhedral cell, built on 2D
//! elements living on the faces.
//!
//! Local dofs are ordered as: vertex values (vertices sorted by global id),
//! `k - 1` Gauss-Lobatto nodes per edge (edges sorted by global id, nodes
//! running from the lower to the higher vertex id), scaled face moments per
//! face of the cell (in the cell's face order), then scaled cell moments.


use crate::element2d::{
    check_kernel, combine_stiffness, load_degree, load_projector, zero_projector, Element2, Stabilization,
};
use crate::mesh::{CellGeometry3, PolyhedralMesh};
use crate::mesh::geometry::{face_area_vector, face_centroid};
use crate::polybasis::gauss::gauss_lobatto_interior;
use crate::polybasis::quadrature::polyhedron_rule;
use crate::polybasis::{mass_matrix, monomial_count, stiffness_matrix, QuadratureRule, ScaledMonomials};
use crate::vecops::{add, cross3, dot, lerp, norm, scale, sub};
use crate::{Point2, Point3, Result, VemError};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Orthonormal frame of a planar face: `x = origin + ξ e1 + η e2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFrame {
    pub origin: Point3,
    pub e1: Point3,
    pub e2: Point3,
    /// Unit normal of the stored face loop.
    pub normal: Point3,
}

impl FaceFrame {
    /// Frame at the face centroid with `e1` along the first edge and
    /// `e2 = n × e1`, so the loop is counter-clockwise in local coordinates.
    pub fn new(loop_pts: &[Point3]) -> Result<Self> {
        let area = face_area_vector(loop_pts);
        let a = norm(area);
        if !(a > 0.0) {
            return Err(VemError::InvalidMesh("degenerate face".into()));
        }
        let normal = scale(area, 1.0 / a);
        let t = sub(loop_pts[1], loop_pts[0]);
        // remove any normal component left by rounding
        let t = sub(t, scale(normal, dot(t, normal)));
        let e1 = scale(t, 1.0 / norm(t));
        let e2 = cross3(normal, e1);
        Ok(Self {
            origin: face_centroid(loop_pts),
            e1,
            e2,
            normal,
        })
    }

    pub fn to_local(&self, x: Point3) -> Point2 {
        let d = sub(x, self.origin);
        [dot(d, self.e1), dot(d, self.e2)]
    }

    pub fn to_global(&self, p: Point2) -> Point3 {
        add(self.origin, add(scale(self.e1, p[0]), scale(self.e2, p[1])))
    }
}

/// A 2D element on one global face, shared by the cells adjacent to it.
#[derive(Debug, Clone)]
pub struct FaceElement {
    pub frame: FaceFrame,
    pub element: Element2,
}

impl FaceElement {
    pub fn new(loop_pts: &[Point3], k: usize) -> Result<Self> {
        let frame = FaceFrame::new(loop_pts)?;
        let local: Vec<Point2> = loop_pts.iter().map(|&x| frame.to_local(x)).collect();
        let element = Element2::new(local, k)?;
        Ok(Self { frame, element })
    }

    /// Quadrature of the face in space, exact to `degree`.
    pub fn rule(&self, degree: usize) -> QuadratureRule<3> {
        let local = self.element.rule(degree);
        let mut rule = QuadratureRule::empty(degree);
        for (p, w) in local.iter() {
            rule.points.push(self.frame.to_global(p));
            rule.weights.push(w);
        }
        rule
    }

    /// Face dofs of the interpolant of `zeta`.
    pub fn interpolate(&self, zeta: &dyn Fn(Point3) -> f64) -> DVector<f64> {
        self.element.interpolate(&|p| zeta(self.frame.to_global(p)))
    }
}

/// Builds the face elements of every face of the mesh.
pub fn build_face_elements(mesh: &PolyhedralMesh, k: usize) -> Result<Vec<Arc<FaceElement>>> {
    use rayon::prelude::*;
    (0..mesh.faces().len())
        .into_par_iter()
        .map(|f| {
            FaceElement::new(&mesh.face_points(f), k)
                .map(Arc::new)
                .map_err(|e| e.in_face(f))
        })
        .collect()
}

/// Index map of the local dofs of a polyhedral cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofLayout3 {
    k: usize,
    n_vertices: usize,
    n_edges: usize,
    n_faces: usize,
}

impl DofLayout3 {
    pub fn new(n_vertices: usize, n_edges: usize, n_faces: usize, k: usize) -> Self {
        Self {
            k,
            n_vertices,
            n_edges,
            n_faces,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn face_moments(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    pub fn cell_moments(&self) -> usize {
        (self.k + 1) * self.k * (self.k - 1) / 6
    }

    /// Vertex and edge-node dofs.
    pub fn n_nodes(&self) -> usize {
        self.n_vertices + self.n_edges * (self.k - 1)
    }

    pub fn len(&self) -> usize {
        self.n_nodes() + self.n_faces * self.face_moments() + self.cell_moments()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertex(&self, i: usize) -> usize {
        i
    }

    pub fn edge_node(&self, e: usize, j: usize) -> usize {
        self.n_vertices + e * (self.k - 1) + j
    }

    pub fn face_moment(&self, f: usize, g: usize) -> usize {
        self.n_nodes() + f * self.face_moments() + g
    }

    pub fn cell_moment(&self, g: usize) -> usize {
        self.n_nodes() + self.n_faces * self.face_moments() + g
    }
}

/// Virtual element of order `k` on one polyhedron.
#[derive(Debug, Clone)]
pub struct Element3 {
    layout: DofLayout3,
    geometry: CellGeometry3,
    basis: ScaledMonomials<3>,
    faces: Vec<Arc<FaceElement>>,
    /// Outward orientation of each face relative to its stored normal.
    signs: Vec<f64>,
    /// Local cell dof of each local face dof, per face.
    face_maps: Vec<Vec<usize>>,
    /// Local endpoint vertices of each edge, lower global id first.
    edges: Vec<[usize; 2]>,
    nodes: Vec<Point3>,
    face_points: Vec<Vec<Point3>>,
    h: DMatrix<f64>,
    g_tilde: DMatrix<f64>,
    d: DMatrix<f64>,
    pi_nabla_star: DMatrix<f64>,
    pi_zero_star: DMatrix<f64>,
    zero_moments: DMatrix<f64>,
}

impl Element3 {
    /// Builds the element of `cell`; `faces` holds the face elements of all
    /// mesh faces (see [`build_face_elements`]).
    pub fn new(mesh: &PolyhedralMesh, cell: usize, faces: &[Arc<FaceElement>]) -> Result<Self> {
        let k = faces
            .first()
            .map(|f| f.element.k())
            .ok_or_else(|| VemError::InvalidArgument("no face elements".into()))?;
        let geometry = mesh.cell_geometry(cell)?;
        let cverts = mesh.cell_vertices(cell);
        let cedges = mesh.cell_edges(cell);
        let cfaces = &mesh.cells()[cell];
        let layout = DofLayout3::new(cverts.len(), cedges.len(), cfaces.len(), k);
        let basis = ScaledMonomials::new(geometry.centroid, geometry.diameter, k);

        let face_points = mesh.cell_face_points(cell);
        let rule = polyhedron_rule(&face_points, &geometry.face_centroids, geometry.star_center, 2 * k);
        let h = mass_matrix(&basis, &rule);
        let g_tilde = stiffness_matrix(&basis, &rule);

        let vx = mesh.vertices();
        let mut nodes: Vec<Point3> = cverts.iter().map(|&v| vx[v]).collect();
        let gl = gauss_lobatto_interior(k);
        let local_vertex = |v: usize| cverts.binary_search(&v).expect("vertex belongs to the cell");
        let local_edge = |e: usize| cedges.binary_search(&e).expect("face edge belongs to the cell");
        let mut edges = Vec::with_capacity(cedges.len());
        for &e in cedges {
            let [a, b] = mesh.edges()[e];
            edges.push([local_vertex(a), local_vertex(b)]);
            for &t in &gl {
                nodes.push(lerp(vx[a], vx[b], t));
            }
        }
        let mut face_maps = Vec::with_capacity(cfaces.len());
        let mut signs = Vec::with_capacity(cfaces.len());
        let mut cell_faces = Vec::with_capacity(cfaces.len());
        for (lf, &(f, sign)) in cfaces.iter().enumerate() {
            let fl = &mesh.faces()[f];
            let fe = &faces[f];
            let n = fl.len();
            let fl2 = fe.element.layout();
            let mut map = vec![0; fl2.len()];
            for i in 0..n {
                map[fl2.vertex(i)] = layout.vertex(local_vertex(fl[i]));
                let e = local_edge(mesh.face_edges(f)[i]);
                let forward = fl[i] < fl[(i + 1) % n];
                for j in 0..k - 1 {
                    let jj = if forward { j } else { k - 2 - j };
                    map[fl2.edge_node(i, j)] = layout.edge_node(e, jj);
                }
            }
            for g in 0..fl2.n_moments() {
                map[fl2.moment(g)] = layout.face_moment(lf, g);
            }
            face_maps.push(map);
            signs.push(sign as f64);
            cell_faces.push(Arc::clone(fe));
        }

        let n_poly = basis.len();
        let volume = geometry.volume;
        let mut d = DMatrix::zeros(layout.len(), n_poly);
        for (i, &p) in nodes.iter().enumerate() {
            for (beta, v) in basis.values(p).into_iter().enumerate() {
                d[(i, beta)] = v;
            }
        }
        for (lf, fe) in cell_faces.iter().enumerate() {
            let nm = layout.face_moments();
            if nm == 0 {
                break;
            }
            let area = fe.element.geometry().area;
            for (p, w) in fe.element.rule(2 * k).iter() {
                let mf = fe.element.basis().values(p);
                let mc = basis.values(fe.frame.to_global(p));
                for g in 0..nm {
                    for beta in 0..n_poly {
                        d[(layout.face_moment(lf, g), beta)] += w * mf[g] * mc[beta] / area;
                    }
                }
            }
        }
        for g in 0..layout.cell_moments() {
            for beta in 0..n_poly {
                d[(layout.cell_moment(g), beta)] = h[(g, beta)] / volume;
            }
        }

        let mut el = Self {
            layout,
            geometry,
            basis,
            faces: cell_faces,
            signs,
            face_maps,
            edges,
            nodes,
            face_points,
            h,
            g_tilde,
            d,
            pi_nabla_star: DMatrix::zeros(0, 0),
            pi_zero_star: DMatrix::zeros(0, 0),
            zero_moments: DMatrix::zeros(0, 0),
        };
        el.pi_nabla_star = el.build_pi_nabla()?;
        let n_low = el.layout.cell_moments();
        let offset = el.layout.cell_moment(0);
        (el.pi_zero_star, el.zero_moments) = zero_projector(&el.h, &el.pi_nabla_star, volume, n_low, offset)?;
        Ok(el)
    }

    fn build_pi_nabla(&self) -> Result<DMatrix<f64>> {
        let k = self.layout.k();
        let n_poly = self.basis.len();
        let ndof = self.layout.len();
        let surface = self.geometry.surface_area;
        let mut g = self.g_tilde.clone();
        let mut b = DMatrix::zeros(n_poly, ndof);
        g.row_mut(0).fill(0.0);
        for (lf, fe) in self.faces.iter().enumerate() {
            let normal = scale(fe.frame.normal, self.signs[lf]);
            let pz = fe.element.pi_zero_star();
            let map = &self.face_maps[lf];
            for (p, w) in fe.element.rule(2 * k).iter() {
                let x = fe.frame.to_global(p);
                let mf = fe.element.basis().values(p);
                // Π⁰_{k,F} of each face basis function at p
                let vals: Vec<f64> = (0..pz.ncols())
                    .map(|j| (0..mf.len()).map(|a| mf[a] * pz[(a, j)]).sum())
                    .collect();
                let mc = self.basis.values(x);
                let grads = self.basis.gradients(x);
                for beta in 0..n_poly {
                    g[(0, beta)] += w * mc[beta] / surface;
                }
                for (j, &dof) in map.iter().enumerate() {
                    let wv = w * vals[j];
                    b[(0, dof)] += wv / surface;
                    for alpha in 1..n_poly {
                        b[(alpha, dof)] += wv * dot(grads[alpha], normal);
                    }
                }
            }
        }
        if k >= 2 {
            let lap = self.basis.laplacian_matrix();
            for alpha in 0..n_poly {
                for gam in 0..lap.nrows() {
                    b[(alpha, self.layout.cell_moment(gam))] -= lap[(gam, alpha)] * self.geometry.volume;
                }
            }
        }
        g.lu().solve(&b).ok_or(VemError::SingularG)
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    pub fn layout(&self) -> &DofLayout3 {
        &self.layout
    }

    pub fn ndof(&self) -> usize {
        self.layout.len()
    }

    pub fn geometry(&self) -> &CellGeometry3 {
        &self.geometry
    }

    pub fn basis(&self) -> &ScaledMonomials<3> {
        &self.basis
    }

    pub fn faces(&self) -> &[Arc<FaceElement>] {
        &self.faces
    }

    /// Local cell dof of each local dof of face `lf`.
    pub fn face_map(&self, lf: usize) -> &[usize] {
        &self.face_maps[lf]
    }

    /// Vertex and edge-node positions in dof order.
    pub fn nodes(&self) -> &[Point3] {
        &self.nodes
    }

    /// Local endpoint vertices of each edge, in local edge order.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn poly_stiffness(&self) -> &DMatrix<f64> {
        &self.g_tilde
    }

    pub fn dof_matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn pi_nabla_star(&self) -> &DMatrix<f64> {
        &self.pi_nabla_star
    }

    pub fn pi_nabla(&self) -> DMatrix<f64> {
        &self.d * &self.pi_nabla_star
    }

    pub fn pi_zero_star(&self) -> &DMatrix<f64> {
        &self.pi_zero_star
    }

    pub fn xi_star(&self) -> Result<DMatrix<f64>> {
        load_projector(&self.h, &self.zero_moments, monomial_count(3, load_degree(self.k()) as isize))
    }

    pub fn rule(&self, degree: usize) -> QuadratureRule<3> {
        polyhedron_rule(&self.face_points, &self.geometry.face_centroids, self.geometry.star_center, degree)
    }

    pub fn poly_dofs(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.d * coeffs
    }

    /// Extracts the dofs of face `lf` from a cell dof vector.
    pub fn face_dofs(&self, lf: usize, dofs: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.face_maps[lf].len(), self.face_maps[lf].iter().map(|&i| dofs[i]))
    }

    /// `h_D Σ_F ( h_F⁻² ‖Π⁰_{k-2,F} v‖²_F + Σ_{p ∈ N_∂F} v(p)² )` as a matrix.
    /// Nodes shared by several faces are counted once per face.
    pub fn stabilization(&self) -> Result<DMatrix<f64>> {
        let n = self.ndof();
        let mut s = DMatrix::zeros(n, n);
        let h_d = self.geometry.diameter;
        for (lf, fe) in self.faces.iter().enumerate() {
            let map = &self.face_maps[lf];
            let fl = fe.element.layout();
            for i in 0..fl.n_boundary() {
                s[(map[i], map[i])] += h_d;
            }
            let nm = fl.n_moments();
            if nm > 0 {
                let fg = fe.element.geometry();
                let h_low = fe.element.mass().view((0, 0), (nm, nm)).into_owned();
                let inv = h_low
                    .try_inverse()
                    .ok_or_else(|| VemError::NotSpd("face mass matrix".into()))?;
                let c = h_d * fg.area * fg.area / (fg.diameter * fg.diameter);
                for a in 0..nm {
                    for b in 0..nm {
                        s[(map[fl.moment(a)], map[fl.moment(b)])] += c * inv[(a, b)];
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn consistency(&self) -> DMatrix<f64> {
        self.pi_nabla_star.transpose() * &self.g_tilde * &self.pi_nabla_star
    }

    pub fn local_stiffness(&self, stab: Stabilization) -> Result<DMatrix<f64>> {
        if stab != Stabilization::S3D {
            return Err(VemError::InvalidArgument(format!(
                "stabilization {stab} does not apply to polyhedra; use 3d"
            )));
        }
        let s = self.stabilization()?;
        let k = combine_stiffness(&self.pi_nabla_star, &self.g_tilde, &self.d, &s);
        check_kernel(&k)?;
        Ok(k)
    }

    pub fn local_load(&self, f: &dyn Fn(Point3) -> f64) -> Result<DVector<f64>> {
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

    /// Dofs of the interpolant; face dofs come from the face interpolants so
    /// that neighbouring cells agree.
    pub fn interpolate(&self, zeta: &dyn Fn(Point3) -> f64) -> DVector<f64> {
        let mut v = DVector::zeros(self.ndof());
        for (i, &p) in self.nodes.iter().enumerate() {
            v[i] = zeta(p);
        }
        for (lf, fe) in self.faces.iter().enumerate() {
            let fl = fe.element.layout();
            if fl.n_moments() == 0 {
                break;
            }
            let fv = fe.interpolate(zeta);
            for g in 0..fl.n_moments() {
                v[self.face_maps[lf][fl.moment(g)]] = fv[fl.moment(g)];
            }
        }
        let n_low = self.layout.cell_moments();
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
                v[self.layout.cell_moment(g)] = mg / self.geometry.volume;
            }
        }
        v
    }

    /// Dofs along local edge `e` in parameter order, with node parameters.
    pub fn edge_dofs(&self, e: usize) -> (Vec<usize>, Vec<f64>) {
        let k = self.k();
        let [a, b] = self.edges[e];
        let mut dofs = vec![self.layout.vertex(a)];
        dofs.extend((0..k - 1).map(|j| self.layout.edge_node(e, j)));
        dofs.push(self.layout.vertex(b));
        let mut t = vec![0.0];
        t.extend(gauss_lobatto_interior(k));
        t.push(1.0);
        (dofs, t)
    }
}
