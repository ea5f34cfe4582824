use thiserror::Error;

/// Errors raised by lattice construction, operators, and the verification harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("cube with anchor {anchor:?} and side {side} does not fit in a grid of {cells} cells per side")]
    CubeOutOfBounds {
        anchor: Vec<usize>,
        side: usize,
        cells: usize,
    },

    #[error("cell index {0} is outside the grid")]
    CellOutOfBounds(usize),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("non-finite value {value} at cell {cell}")]
    NonFinite { cell: usize, value: f64 },

    #[error("negative value {value} at cell {cell} in a nonnegative grid function")]
    Negative { cell: usize, value: f64 },

    #[error("Luxemburg average did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("alpha = {alpha} must lie in {range}")]
    AlphaOutOfRange { alpha: f64, range: String },

    #[error("exponent p_{slot} = {value} violates {constraint}")]
    InvalidExponent {
        slot: usize,
        value: f64,
        constraint: String,
    },

    #[error("CZ parameter a = {a} must exceed 2^(mn) = {bound}")]
    CzParameter { a: f64, bound: f64 },

    #[error("complementary sandwich t <= B^-1(t) B~^-1(t) <= 2t violated at t = {t} (ratio {ratio})")]
    SandwichViolation { t: f64, ratio: f64 },

    #[error("not a Young function: {0}")]
    NotYoung(String),

    #[error("phi is not essentially nondecreasing: probe constant {rho} exceeds {limit}")]
    PhiNotMonotone { rho: f64, limit: f64 },

    #[error("truncation level k = {k} is incompatible with the grid: {reason}")]
    Truncation { k: i32, reason: String },

    #[error("cannot parse `{input}`: {msg}")]
    Parse { input: String, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("failed to read fixture: {0}")]
    Fixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
