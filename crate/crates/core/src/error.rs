use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("D = {0} must be a squarefree integer > 1")]
    InvalidDiscriminant(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("place {0} does not belong to the field")]
    InvalidPlace(String),
    #[error("place set: {0}")]
    InvalidPlaceSet(String),
    #[error("zero is not allowed here: {0}")]
    Zero(&'static str),
    #[error("{0} is not an S-unit")]
    NotSUnit(String),
    #[error("no principal generator of norm {p} found within search radius {radius}")]
    NonPrincipal { p: u64, radius: u64 },
    #[error("could not factor {0} by trial division")]
    FactorizationLimit(String),
    #[error("degenerate fundamental system (regulator determinant is zero)")]
    DegenerateSystem,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point lies on the closed subset (every generator vanishes)")]
    PointOnSubset,
    #[error("solver did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("missing injected constant `{0}`")]
    MissingConstant(&'static str),
    #[error("enumeration needs {needed} candidates, above the work limit {limit}")]
    WorkLimit { needed: u128, limit: u128 },
    #[error("not a solution: {0}")]
    NotASolution(String),
    #[error("report does not match the equation")]
    EquationMismatch,
    #[error("incidence data: {0}")]
    Incidence(String),
    #[error("parse error: {0}")]
    Parse(String),
}
