use thiserror::Error;

/// Failures raised by the solver pipeline.
///
/// Every variant corresponds to a hypothesis of the existence construction
/// breaking (strain limit, ellipticity, smallness, contraction) or to an
/// input/configuration problem. Callers decide whether a failure is fatal.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SlvError {
    #[error("strain-sum {value} outside the admissible interval ({lower}, {upper}){}", node_suffix(*.node))]
    Domain {
        value: f64,
        lower: f64,
        upper: f64,
        node: Option<usize>,
    },

    #[error("field mean {mean:e} exceeds the mean-zero tolerance {tol:e}")]
    MeanZeroViolation { mean: f64, tol: f64 },

    #[error("ellipticity floor broken: min coefficient {min} < {floor} at node {node}")]
    Ellipticity { min: f64, floor: f64, node: usize },

    #[error("singular tridiagonal system (pivot {pivot:e} at row {row})")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("strain bound violated: |v_x| = {strain} > delta = {delta} at time level {level}")]
    StrainBound {
        strain: f64,
        delta: f64,
        level: usize,
    },

    #[error("Picard iteration stopped contracting at iteration {iteration}: {cause} (distances {distances:?})")]
    NoContraction {
        iteration: usize,
        cause: String,
        distances: Vec<f64>,
    },

    #[error("Picard iteration limit {limit} reached with distance {distance:e}")]
    IterationLimit { limit: usize, distance: f64 },

    #[error("time step {dt} exceeds the Courant limit {limit}")]
    CourantViolation { dt: f64, limit: f64 },

    #[error("initial data violates the smallness condition: norm {norm} > threshold {threshold}")]
    Smallness { norm: f64, threshold: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("non-finite value produced at time level {level}")]
    NonFinite { level: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Format(String),
}

fn node_suffix(node: Option<usize>) -> String {
    node.map(|n| format!(" at node {n}")).unwrap_or_default()
}

impl SlvError {
    /// Short machine-readable tag used in JSON error records.
    pub fn kind(&self) -> &'static str {
        match self {
            SlvError::Domain { .. } => "DomainError",
            SlvError::MeanZeroViolation { .. } => "MeanZeroViolation",
            SlvError::Ellipticity { .. } => "EllipticityError",
            SlvError::SingularSystem { .. } => "SingularSystem",
            SlvError::StrainBound { .. } => "StrainBoundError",
            SlvError::NoContraction { .. } => "NoContraction",
            SlvError::IterationLimit { .. } => "IterationLimit",
            SlvError::CourantViolation { .. } => "CourantViolation",
            SlvError::Smallness { .. } => "SmallnessViolation",
            SlvError::DegenerateInput(_) => "DegenerateInput",
            SlvError::NonFinite { .. } => "NonFinite",
            SlvError::Config(_) => "ConfigError",
            SlvError::GridMismatch(_) => "GridMismatch",
            SlvError::Io(_) => "IoError",
            SlvError::Format(_) => "FormatError",
        }
    }

    /// Attaches a node index to a domain error raised by a pointwise map.
    pub fn at_node(self, node: usize) -> SlvError {
        match self {
            SlvError::Domain {
                value,
                lower,
                upper,
                ..
            } => SlvError::Domain {
                value,
                lower,
                upper,
                node: Some(node),
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for SlvError {
    fn from(err: std::io::Error) -> Self {
        SlvError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SlvError>;
