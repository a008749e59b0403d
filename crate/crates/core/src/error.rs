use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing parameter `{0}`")]
    MissingKey(String),

    #[error("unknown parameter `{0}`")]
    UnknownKey(String),

    #[error("parameter `{0}` given more than once")]
    DuplicateKey(String),

    #[error("parameter `{key}` is not a finite number: {value}")]
    NonFinite { key: String, value: String },

    #[error("{0}")]
    InvalidValue(String),

    #[error("both `delta_c` and `Delta_c` supplied; the detuning is ambiguous")]
    AmbiguousDetuning,

    #[error("not cubic: leading coefficient is zero")]
    NotCubic,

    #[error("function value is not finite at x = {x}")]
    NonFiniteFunction { x: f64 },

    #[error("eigendecomposition failed for a {dim}x{dim} matrix with infinity norm {norm:e}")]
    EigenFailure { dim: usize, norm: f64 },

    #[error("no steady state found at delta_c = {delta_c}")]
    NoSteadyState { delta_c: f64 },

    #[error("theta = {theta} is outside the admissible set (photon number {photon_number} < 0)")]
    NonPhysical { theta: f64, photon_number: f64 },

    #[error("q = 0 is handled by the cavity-coupled matrix; use build_m")]
    ZeroQuasimomentum,

    #[error("no optomechanical nonlinearity: renormalized coupling is zero")]
    NoNonlinearity,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("profile has {profile} nodes but the grid has {grid}")]
    GridMismatch { profile: usize, grid: usize },

    #[error(
        "condensate does not vanish at the box wall (|psi| = {wall_amplitude:e}); enlarge the box"
    )]
    BoxTooSmall { wall_amplitude: f64 },

    #[error(
        "ground state not converged after {iterations} iterations \
         (|dmu| = {dmu:e}, |dalpha| = {dalpha:e}, residual = {residual:e})"
    )]
    NotConverged {
        iterations: usize,
        dmu: f64,
        dalpha: f64,
        residual: f64,
    },

    #[error("table column `{name}` has {len} rows, expected {expected}")]
    RaggedTable {
        name: String,
        len: usize,
        expected: usize,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
