use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("arity mismatch for `{symbol}`: expected {expected}, got {got}")]
    Arity {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("malformed table for `{symbol}`: {msg}")]
    MalformedTable { symbol: String, msg: String },
    #[error("element {elem} out of range for algebra of size {size}")]
    OutOfRange { elem: usize, size: usize },
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("empty product")]
    EmptyProduct,
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error(
        "budget exceeded: {what} reached {reached} (budget {budget}); raise --budget or lower n"
    )]
    BudgetExceeded {
        what: String,
        reached: usize,
        budget: usize,
    },
    #[error("variable `{0}` is not a generator of this algebra")]
    UnknownVariable(String),
    #[error("unknown variety `{0}`")]
    UnknownVariety(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("identities are not unifiable")]
    NotUnifiable,
    #[error("clause is not admissible")]
    NotAdmissible,
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("invalid preorder: {0}")]
    InvalidPreorder(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
