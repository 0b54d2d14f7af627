use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),
    #[error("axis sets overlap on `{0}`")]
    OverlappingAxes(String),
    #[error("duplicate axis name `{0}`")]
    DuplicateAxis(String),
    #[error("invalid alphabet `{name}`: {reason}")]
    InvalidAlphabet { name: String, reason: String },
    #[error("mass has {got} entries, axes require {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("pmf is not normalized: total mass {total}")]
    NotNormalized { total: f64 },
    #[error("negative or non-finite mass {value} at cell {cell}")]
    InvalidMass { cell: usize, value: f64 },
    #[error("kernel row {row} sums to {total}")]
    KernelNotStochastic { row: usize, total: f64 },
    #[error("absolute continuity violated: p > 0 where q = 0 at cell {cell}")]
    AbsoluteContinuityViolated { cell: usize },
    #[error("axis lists differ between operands")]
    AxisMismatch,
    #[error("empty axis set")]
    EmptyAxisSet,
    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("symbol {symbol} out of range for axis `{axis}` of size {size}")]
    SymbolOutOfRange {
        axis: String,
        symbol: usize,
        size: usize,
    },
    #[error("typicality slack must be positive, got {0}")]
    InvalidSlack(f64),
    #[error("hypothesis structure violated: {0}")]
    StructureViolated(String),
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("no feasible point found")]
    NoFeasiblePoint,
    #[error("broadcast channel is not given in degraded factorized form: {0}")]
    DegradednessUnverifiable(String),
    #[error("alpha_tilde {alpha} outside [-{rate}, 0]")]
    AlphaOutOfRange { alpha: f64, rate: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("work budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error("codebook too large: 2^{bits} codewords exceeds the budget of 2^{budget_bits}")]
    CodebookTooLarge { bits: u32, budget_bits: u32 },
    #[error("invalid scheme parameters: {0}")]
    InvalidScheme(String),
    #[error("message index {index} out of range (codebook size {size})")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("normalization error at `{path}`: {source}")]
    Normalization {
        path: String,
        #[source]
        source: Box<Error>,
    },
    #[error("simulation invariant violated: {0}")]
    Simulation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
