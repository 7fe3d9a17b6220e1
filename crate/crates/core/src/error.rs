use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lambda horizon exceeded: index {index} requested, table covers 0..={last}")]
    LambdaHorizon { index: i64, last: usize },

    #[error("invalid lambda sequence: {0}")]
    InvalidLambda(String),

    #[error("index out of range for {op}: {detail}")]
    IndexRejected { op: &'static str, detail: String },

    #[error("not a triangle: entry ({n}, {k}) violates the triangle pattern")]
    NotTriangle { n: usize, k: usize },

    #[error("subset horizon too large: {requested} (maximum {max})")]
    SubsetHorizon { requested: usize, max: usize },

    #[error("unknown space id `{0}`")]
    UnknownSpace(String),

    #[error("unknown witness id `{0}`")]
    UnknownWitness(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("inadmissible class pair `{0}`")]
    InadmissibleClass(String),

    #[error("invalid exponent p = {0}: must be a rational >= 1")]
    InvalidExponent(String),

    #[error("cannot parse rational `{0}`")]
    BadRational(String),

    #[error("specification error: {0}")]
    Spec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
