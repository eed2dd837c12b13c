use thiserror::Error;

pub type Result<T> = std::result::Result<T, VemError>;

#[derive(Debug, Error)]
pub enum VemError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// The cell is not star-shaped with respect to any disc or ball.
    #[error("cell kernel is empty (not star-shaped)")]
    KernelEmpty,

    /// The constrained projector matrix could not be factored.
    #[error("constrained projector matrix is singular")]
    SingularG,

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("local stiffness kernel has dimension {0}, expected 1")]
    WideKernel(usize),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("cell {cell}: {source}")]
    Cell {
        cell: usize,
        #[source]
        source: Box<VemError>,
    },

    #[error("face {face}: {source}")]
    Face {
        face: usize,
        #[source]
        source: Box<VemError>,
    },

    #[error("level n={n}: {source}")]
    Level {
        n: usize,
        #[source]
        source: Box<VemError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl VemError {
    pub fn in_cell(self, cell: usize) -> Self {
        VemError::Cell {
            cell,
            source: Box::new(self),
        }
    }

    pub fn in_face(self, face: usize) -> Self {
        VemError::Face {
            face,
            source: Box::new(self),
        }
    }

    pub fn at_level(self, n: usize) -> Self {
        VemError::Level {
            n,
            source: Box::new(self),
        }
    }
}
