use super::{PolygonalMesh, PolyhedralMesh};
use crate::Result;
use serde::{Deserialize, Serialize};

/// Shape-regularity diagnostics of a mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshQualityReport {
    /// Kernel inscribed radius over diameter, per cell.
    pub rho: Vec<f64>,
    /// Longest over shortest edge, per cell (2D only; empty in 3D).
    pub tau_cells: Vec<f64>,
    /// Longest over shortest edge, per face (3D only; empty in 2D).
    pub tau_faces: Vec<f64>,
    /// `ln(1 + max τ_D)` over cells (2D).
    pub alpha_h: Option<f64>,
    /// `ln(1 + max τ_F)` over faces (3D).
    pub beta_h: Option<f64>,
}

impl MeshQualityReport {
    pub fn rho_min(&self) -> f64 {
        self.rho.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn tau_cells_max(&self) -> f64 {
        self.tau_cells.iter().cloned().fold(0.0, f64::max)
    }

    pub fn tau_faces_max(&self) -> f64 {
        self.tau_faces.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest edge ratio of the dimension-relevant entities (cells in 2D, faces in 3D).
    pub fn tau_max(&self) -> f64 {
        if self.tau_faces.is_empty() {
            self.tau_cells_max()
        } else {
            self.tau_faces_max()
        }
    }

    /// The logarithmic stability factor for the dimension (α_h in 2D, β_h in 3D).
    pub fn log_factor(&self) -> f64 {
        self.beta_h.or(self.alpha_h).unwrap_or(f64::NAN)
    }
}

pub fn quality_report_2d(mesh: &PolygonalMesh) -> Result<MeshQualityReport> {
    let mut rho = Vec::with_capacity(mesh.n_cells());
    let mut tau = Vec::with_capacity(mesh.n_cells());
    for c in 0..mesh.n_cells() {
        let g = mesh.cell_geometry(c)?;
        rho.push(g.rho());
        tau.push(g.edge_ratio());
    }
    let tau_max = tau.iter().cloned().fold(0.0, f64::max);
    Ok(MeshQualityReport {
        rho,
        tau_cells: tau,
        tau_faces: Vec::new(),
        alpha_h: Some((1.0 + tau_max).ln()),
        beta_h: None,
    })
}

pub fn quality_report_3d(mesh: &PolyhedralMesh) -> Result<MeshQualityReport> {
    let mut rho = Vec::with_capacity(mesh.n_cells());
    for c in 0..mesh.n_cells() {
        rho.push(mesh.cell_geometry(c)?.rho());
    }
    let tau_faces: Vec<f64> = (0..mesh.faces().len()).map(|f| mesh.face_edge_ratio(f)).collect();
    let tau_max = tau_faces.iter().cloned().fold(0.0, f64::max);
    Ok(MeshQualityReport {
        rho,
        tau_cells: Vec::new(),
        tau_faces,
        alpha_h: None,
        beta_h: Some((1.0 + tau_max).ln()),
    })
}
