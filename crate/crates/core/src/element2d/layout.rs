use crate::polybasis::gauss::gauss_lobatto_interior;

/// Index map of the local dofs of a polygon with `n_vertices` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofLayout2 {
    n_vertices: usize,
    k: usize,
}

impl DofLayout2 {
    pub fn new(n_vertices: usize, k: usize) -> Self {
        Self { n_vertices, k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Vertex and edge-node dofs: `k |E_D|`.
    pub fn n_boundary(&self) -> usize {
        self.n_vertices * self.k
    }

    /// Moment dofs: `k (k - 1) / 2`.
    pub fn n_moments(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    pub fn len(&self) -> usize {
        self.n_boundary() + self.n_moments()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertex(&self, i: usize) -> usize {
        i
    }

    /// The `j`-th interior node of edge `e`, counted from vertex `e`.
    pub fn edge_node(&self, e: usize, j: usize) -> usize {
        self.n_vertices + e * (self.k - 1) + j
    }

    pub fn moment(&self, g: usize) -> usize {
        self.n_boundary() + g
    }

    /// Dofs along edge `e` in parameter order: start vertex, interior nodes, end vertex.
    pub fn edge_dofs(&self, e: usize) -> Vec<usize> {
        let mut dofs = Vec::with_capacity(self.k + 1);
        dofs.push(self.vertex(e));
        dofs.extend((0..self.k - 1).map(|j| self.edge_node(e, j)));
        dofs.push(self.vertex((e + 1) % self.n_vertices));
        dofs
    }

    /// Node parameters on `[0, 1]` matching [`Self::edge_dofs`].
    pub fn edge_params(&self) -> Vec<f64> {
        let mut t = Vec::with_capacity(self.k + 1);
        t.push(0.0);
        t.extend(gauss_lobatto_interior(self.k));
        t.push(1.0);
        t
    }
}
