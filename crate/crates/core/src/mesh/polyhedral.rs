use super::geometry::{face_area_vector, polyhedron_geometry, CellGeometry3};
use crate::vecops::{cross3, diameter, dot, norm, scale, sub};
use crate::{Point3, Result, VemError};
use std::collections::{BTreeSet, HashMap};

/// Planarity tolerance relative to the face diameter.
pub const PLANARITY_TOL: f64 = 1e-12;

/// Polyhedral mesh: planar polygonal faces, cells as signed face lists
/// (`+1` when the stored face normal points out of the cell).
#[derive(Debug, Clone)]
pub struct PolyhedralMesh {
    vertices: Vec<Point3>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Vec<(usize, i8)>>,
    edges: Vec<[usize; 2]>,
    face_edges: Vec<Vec<usize>>,
    face_cells: Vec<Vec<usize>>,
    boundary_face: Vec<bool>,
    boundary_edge: Vec<bool>,
    boundary_vertex: Vec<bool>,
    cell_vertices: Vec<Vec<usize>>,
    cell_edges: Vec<Vec<usize>>,
}

fn face_is_simple(pts: &[Point3]) -> bool {
    // project on the plane and test non-adjacent segment pairs
    let av = face_area_vector(pts);
    let n = scale(av, 1.0 / norm(av));
    let e1 = {
        let d = sub(pts[1], pts[0]);
        scale(d, 1.0 / norm(d))
    };
    let e2 = cross3(n, e1);
    let p2: Vec<[f64; 2]> = pts
        .iter()
        .map(|&p| {
            let d = sub(p, pts[0]);
            [dot(d, e1), dot(d, e2)]
        })
        .collect();
    let m = p2.len();
    let cr = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
    for i in 0..m {
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (a, b, c, d) = (p2[i], p2[(i + 1) % m], p2[j], p2[(j + 1) % m]);
            let o1 = cr([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
            let o2 = cr([b[0] - a[0], b[1] - a[1]], [d[0] - a[0], d[1] - a[1]]);
            let o3 = cr([d[0] - c[0], d[1] - c[1]], [a[0] - c[0], a[1] - c[1]]);
            let o4 = cr([d[0] - c[0], d[1] - c[1]], [b[0] - c[0], b[1] - c[1]]);
            if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                return false;
            }
        }
    }
    true
}

impl PolyhedralMesh {
    pub fn new(vertices: Vec<Point3>, faces: Vec<Vec<usize>>, cells: Vec<Vec<(usize, i8)>>) -> Result<Self> {
        let nv = vertices.len();
        let nf = faces.len();
        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut face_edges = Vec::with_capacity(nf);
        for (f, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(VemError::InvalidMesh(format!("face {f} has {} vertices", face.len())));
            }
            if let Some(&bad) = face.iter().find(|&&v| v >= nv) {
                return Err(VemError::InvalidMesh(format!("face {f} references vertex {bad}")));
            }
            let pts: Vec<Point3> = face.iter().map(|&v| vertices[v]).collect();
            let av = face_area_vector(&pts);
            let area = norm(av);
            if area <= 0.0 {
                return Err(VemError::InvalidMesh(format!("face {f} is degenerate")));
            }
            let nrm = scale(av, 1.0 / area);
            let hf = diameter(&pts);
            let off = dot(nrm, pts[0]);
            if pts.iter().any(|&p| (dot(nrm, p) - off).abs() > PLANARITY_TOL * hf) {
                return Err(VemError::InvalidMesh(format!("face {f} is not planar")));
            }
            if !face_is_simple(&pts) {
                return Err(VemError::InvalidMesh(format!("face {f} is self-intersecting")));
            }
            let n = face.len();
            let mut fe = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (face[i], face[(i + 1) % n]);
                let key = [a.min(b), a.max(b)];
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
                fe.push(id);
            }
            face_edges.push(fe);
        }

        let mut face_cells = vec![Vec::new(); nf];
        let mut cell_vertices = Vec::with_capacity(cells.len());
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            // every edge must be walked once in each direction by the oriented faces
            let mut directed: HashMap<[usize; 2], i32> = HashMap::new();
            let mut verts = BTreeSet::new();
            let mut cedges = BTreeSet::new();
            for &(f, sign) in cell {
                if f >= nf {
                    return Err(VemError::InvalidMesh(format!("cell {c} references face {f}")));
                }
                if sign != 1 && sign != -1 {
                    return Err(VemError::InvalidMesh(format!("cell {c} has face sign {sign}")));
                }
                face_cells[f].push(c);
                let face = &faces[f];
                let n = face.len();
                for i in 0..n {
                    let (mut a, mut b) = (face[i], face[(i + 1) % n]);
                    if sign < 0 {
                        std::mem::swap(&mut a, &mut b);
                    }
                    *directed.entry([a, b]).or_insert(0) += 1;
                    verts.insert(a);
                }
                cedges.extend(face_edges[f].iter().copied());
            }
            for (&[a, b], &count) in &directed {
                if count != 1 || directed.get(&[b, a]) != Some(&1) {
                    return Err(VemError::InvalidMesh(format!(
                        "cell {c} is not a closed oriented surface at edge ({a}, {b})"
                    )));
                }
            }
            cell_vertices.push(verts.into_iter().collect());
            cell_edges.push(cedges.into_iter().collect());
        }

        let mut boundary_face = vec![false; nf];
        let mut boundary_edge = vec![false; edges.len()];
        let mut boundary_vertex = vec![false; nv];
        for f in 0..nf {
            match face_cells[f].len() {
                1 => {
                    boundary_face[f] = true;
                    for &e in &face_edges[f] {
                        boundary_edge[e] = true;
                    }
                    for &v in &faces[f] {
                        boundary_vertex[v] = true;
                    }
                }
                2 => {}
                m => return Err(VemError::InvalidMesh(format!("face {f} is shared by {m} cells"))),
            }
        }

        let mesh = Self {
            vertices,
            faces,
            cells,
            edges,
            face_edges,
            face_cells,
            boundary_face,
            boundary_edge,
            boundary_vertex,
            cell_vertices,
            cell_edges,
        };
        // two-way volume agreement and star-shapedness
        for c in 0..mesh.n_cells() {
            mesh.cell_geometry(c)?;
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn cells(&self) -> &[Vec<(usize, i8)>] {
        &self.cells
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn face_edges(&self, face: usize) -> &[usize] {
        &self.face_edges[face]
    }

    pub fn face_cells(&self, face: usize) -> &[usize] {
        &self.face_cells[face]
    }

    pub fn cell_vertices(&self, cell: usize) -> &[usize] {
        &self.cell_vertices[cell]
    }

    pub fn cell_edges(&self, cell: usize) -> &[usize] {
        &self.cell_edges[cell]
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.boundary_face[f]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn face_points(&self, face: usize) -> Vec<Point3> {
        self.faces[face].iter().map(|&v| self.vertices[v]).collect()
    }

    /// Face loops of a cell, reversed where needed so normals point outward.
    pub fn cell_face_points(&self, cell: usize) -> Vec<Vec<Point3>> {
        self.cells[cell]
            .iter()
            .map(|&(f, sign)| {
                let mut pts = self.face_points(f);
                if sign < 0 {
                    pts.reverse();
                }
                pts
            })
            .collect()
    }

    pub fn cell_geometry(&self, cell: usize) -> Result<CellGeometry3> {
        if cell >= self.cells.len() {
            return Err(VemError::InvalidArgument(format!("cell id {cell} out of range")));
        }
        polyhedron_geometry(&self.cell_face_points(cell)).map_err(|e| e.in_cell(cell))
    }

    /// Ratio of the longest to the shortest edge of a face.
    pub fn face_edge_ratio(&self, face: usize) -> f64 {
        let pts = self.face_points(face);
        let n = pts.len();
        let lengths: Vec<f64> = (0..n).map(|i| norm(sub(pts[(i + 1) % n], pts[i]))).collect();
        let max = lengths.iter().cloned().fold(0.0, f64::max);
        let min = lengths.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn mesh_size(&self) -> Result<f64> {
        let mut h = 0.0f64;
        for c in 0..self.n_cells() {
            h = h.max(self.cell_geometry(c)?.diameter);
        }
        Ok(h)
    }
}
