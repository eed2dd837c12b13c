use crate::mesh::{PolygonalMesh, PolyhedralMesh};

/// Global numbering: vertex dofs, edge nodes, face moments (3D), cell moments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDofMap {
    n_total: usize,
    cell_dofs: Vec<Vec<usize>>,
    fixed: Vec<bool>,
    free_index: Vec<Option<usize>>,
    free_dofs: Vec<usize>,
}

impl GlobalDofMap {
    fn finish(n_total: usize, cell_dofs: Vec<Vec<usize>>, fixed: Vec<bool>) -> Self {
        let mut free_index = vec![None; n_total];
        let mut free_dofs = Vec::new();
        for (i, &f) in fixed.iter().enumerate() {
            if !f {
                free_index[i] = Some(free_dofs.len());
                free_dofs.push(i);
            }
        }
        Self {
            n_total,
            cell_dofs,
            fixed,
            free_index,
            free_dofs,
        }
    }

    pub fn new_2d(mesh: &PolygonalMesh, k: usize) -> Self {
        let nv = mesh.vertices().len();
        let ne = mesh.edges().len();
        let per_edge = k - 1;
        let nm = k * (k - 1) / 2;
        let edge_offset = nv;
        let cell_offset = nv + ne * per_edge;
        let n_total = cell_offset + mesh.n_cells() * nm;

        let mut fixed = vec![false; n_total];
        for (v, f) in fixed.iter_mut().enumerate().take(nv) {
            *f = mesh.is_boundary_vertex(v);
        }
        for e in 0..ne {
            if mesh.is_boundary_edge(e) {
                for j in 0..per_edge {
                    fixed[edge_offset + e * per_edge + j] = true;
                }
            }
        }

        let cell_dofs = (0..mesh.n_cells())
            .map(|c| {
                let loop_ = &mesh.cells()[c];
                let n = loop_.len();
                let mut dofs = loop_.clone();
                for i in 0..n {
                    let e = mesh.cell_edges(c)[i];
                    let forward = mesh.edges()[e].vertices[0] == loop_[i];
                    for j in 0..per_edge {
                        let jj = if forward { j } else { per_edge - 1 - j };
                        dofs.push(edge_offset + e * per_edge + jj);
                    }
                }
                dofs.extend((0..nm).map(|g| cell_offset + c * nm + g));
                dofs
            })
            .collect();
        Self::finish(n_total, cell_dofs, fixed)
    }

    pub fn new_3d(mesh: &PolyhedralMesh, k: usize) -> Self {
        let nv = mesh.vertices().len();
        let ne = mesh.edges().len();
        let nf = mesh.faces().len();
        let per_edge = k - 1;
        let nmf = k * (k - 1) / 2;
        let nmc = (k + 1) * k * (k - 1) / 6;
        let edge_offset = nv;
        let face_offset = edge_offset + ne * per_edge;
        let cell_offset = face_offset + nf * nmf;
        let n_total = cell_offset + mesh.n_cells() * nmc;

        let mut fixed = vec![false; n_total];
        for (v, f) in fixed.iter_mut().enumerate().take(nv) {
            *f = mesh.is_boundary_vertex(v);
        }
        for e in 0..ne {
            if mesh.is_boundary_edge(e) {
                for j in 0..per_edge {
                    fixed[edge_offset + e * per_edge + j] = true;
                }
            }
        }
        for f in 0..nf {
            if mesh.is_boundary_face(f) {
                for g in 0..nmf {
                    fixed[face_offset + f * nmf + g] = true;
                }
            }
        }

        let cell_dofs = (0..mesh.n_cells())
            .map(|c| {
                let mut dofs = mesh.cell_vertices(c).to_vec();
                for &e in mesh.cell_edges(c) {
                    dofs.extend((0..per_edge).map(|j| edge_offset + e * per_edge + j));
                }
                for &(f, _) in &mesh.cells()[c] {
                    dofs.extend((0..nmf).map(|g| face_offset + f * nmf + g));
                }
                dofs.extend((0..nmc).map(|g| cell_offset + c * nmc + g));
                dofs
            })
            .collect();
        Self::finish(n_total, cell_dofs, fixed)
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn n_fixed(&self) -> usize {
        self.n_total - self.n_free()
    }

    /// Global dof of each local dof of `cell`.
    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        &self.cell_dofs[cell]
    }

    pub fn is_fixed(&self, dof: usize) -> bool {
        self.fixed[dof]
    }

    /// Position of a free dof in the reduced system.
    pub fn free_index(&self, dof: usize) -> Option<usize> {
        self.free_index[dof]
    }

    /// Global ids of the free dofs, in reduced-system order.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }
}
