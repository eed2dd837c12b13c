//! Polygonal and polyhedral meshes, generators and shape diagnostics.

mod generate;
pub mod geometry;
pub mod io;
mod polygonal;
mod polyhedral;
mod quality;

pub use generate::{generate_cube_mesh, generate_square_mesh, CubeFamily, SquareFamily};
pub use geometry::{polygon_geometry, polyhedron_geometry, CellGeometry2, CellGeometry3};
pub use io::Mesh;
pub use polygonal::{MeshEdge, PolygonalMesh};
pub use polyhedral::{PolyhedralMesh, PLANARITY_TOL};
pub use quality::{quality_report_2d, quality_report_3d, MeshQualityReport};
