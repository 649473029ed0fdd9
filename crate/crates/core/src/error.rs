use thiserror::Error;

/// Failures raised by the numerical kernel, the model layer and the orbit geometry.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular at working precision (pivot {pivot} has norm {norm:.3e})")]
    SingularInput { pivot: usize, norm: f64 },

    #[error("least-squares residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NoSolution { residual: f64, tolerance: f64 },

    #[error("singular value decomposition did not converge")]
    NoConvergence,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("H not in the closed positive chamber: {0}")]
    NotInChamber(String),

    #[error("witness is not a rotation (orthogonality defect {defect:.3e})")]
    NotOrthogonal { defect: f64 },

    #[error("fiber displacement leaves the conjugated n(H) (residual {residual:.3e})")]
    FiberResidual { residual: f64 },

    #[error("nilpotent witness iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoNilpotentWitness { iterations: usize, residual: f64 },

    #[error("chart directions are dependent modulo z(H) (rank {rank} of {count})")]
    DegenerateChart { rank: usize, count: usize },

    #[error("vector is not tangent to the orbit (residual {residual:.3e})")]
    NotTangent { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
