use super::geometry::{polygon_geometry, signed_area, CellGeometry2};
use crate::vecops::{cross2, sub};
use crate::{Point2, Result, VemError};
use std::collections::HashMap;

/// A mesh edge. `vertices[0] < vertices[1]` fixes the global orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshEdge {
    pub vertices: [usize; 2],
    pub cells: Vec<usize>,
}

/// Conforming polygonal mesh. Hanging nodes are ordinary vertices that appear
/// in the loops of every cell they touch.
#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    vertices: Vec<Point2>,
    cells: Vec<Vec<usize>>,
    edges: Vec<MeshEdge>,
    /// `cell_edges[c][i]` is the edge between `cells[c][i]` and `cells[c][i+1]`.
    cell_edges: Vec<Vec<usize>>,
    boundary_edge: Vec<bool>,
    boundary_vertex: Vec<bool>,
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = cross2(sub(b, a), sub(c, a));
    let o2 = cross2(sub(b, a), sub(d, a));
    let o3 = cross2(sub(d, c), sub(a, c));
    let o4 = cross2(sub(d, c), sub(b, c));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

impl PolygonalMesh {
    /// Builds the edge tables and validates the mesh invariants.
    pub fn new(vertices: Vec<Point2>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let nv = vertices.len();
        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        // direction in which each cell walks the edge, to check consistency
        let mut walked: Vec<Vec<bool>> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let n = cell.len();
            if n < 3 {
                return Err(VemError::InvalidMesh(format!("cell {c} has {n} vertices")));
            }
            if let Some(&bad) = cell.iter().find(|&&v| v >= nv) {
                return Err(VemError::InvalidMesh(format!("cell {c} references vertex {bad}")));
            }
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != n {
                return Err(VemError::InvalidMesh(format!("cell {c} repeats a vertex")));
            }
            let pts: Vec<Point2> = cell.iter().map(|&v| vertices[v]).collect();
            if signed_area(&pts) <= 0.0 {
                return Err(VemError::InvalidMesh(format!("cell {c} is not counter-clockwise")));
            }
            for i in 0..n {
                for j in i + 2..n {
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    if segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                        return Err(VemError::InvalidMesh(format!("cell {c} is self-intersecting")));
                    }
                }
            }
            let mut ce = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (cell[i], cell[(i + 1) % n]);
                let key = [a.min(b), a.max(b)];
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(MeshEdge {
                        vertices: key,
                        cells: Vec::new(),
                    });
                    walked.push(Vec::new());
                    edges.len() - 1
                });
                edges[id].cells.push(c);
                walked[id].push(a < b);
                ce.push(id);
            }
            cell_edges.push(ce);
        }
        let mut boundary_edge = vec![false; edges.len()];
        let mut boundary_vertex = vec![false; nv];
        for (id, e) in edges.iter().enumerate() {
            match e.cells.len() {
                1 => {
                    boundary_edge[id] = true;
                    boundary_vertex[e.vertices[0]] = true;
                    boundary_vertex[e.vertices[1]] = true;
                }
                2 => {
                    if walked[id][0] == walked[id][1] {
                        return Err(VemError::InvalidMesh(format!(
                            "edge {:?} is walked in the same direction by both cells",
                            e.vertices
                        )));
                    }
                }
                m => {
                    return Err(VemError::InvalidMesh(format!(
                        "edge {:?} is shared by {m} cells",
                        e.vertices
                    )))
                }
            }
        }
        Ok(Self {
            vertices,
            cells,
            edges,
            cell_edges,
            boundary_edge,
            boundary_vertex,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn cell_edges(&self, cell: usize) -> &[usize] {
        &self.cell_edges[cell]
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_boundary_edge(&self, edge: usize) -> bool {
        self.boundary_edge[edge]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn cell_points(&self, cell: usize) -> Vec<Point2> {
        self.cells[cell].iter().map(|&v| self.vertices[v]).collect()
    }

    /// Geometry of one cell; `KernelEmpty` means the mesh must be rejected.
    pub fn cell_geometry(&self, cell: usize) -> Result<CellGeometry2> {
        if cell >= self.cells.len() {
            return Err(VemError::InvalidArgument(format!("cell id {cell} out of range")));
        }
        polygon_geometry(&self.cell_points(cell)).map_err(|e| e.in_cell(cell))
    }

    /// Largest cell diameter.
    pub fn mesh_size(&self) -> Result<f64> {
        let mut h = 0.0f64;
        for c in 0..self.n_cells() {
            h = h.max(self.cell_geometry(c)?.diameter);
        }
        Ok(h)
    }
}
