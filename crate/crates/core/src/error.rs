use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial has degree zero")]
    DegreeZero,
    #[error("polynomial degree {0} exceeds the root-finder cap of {cap}", cap = crate::poly::MAX_ROOT_DEGREE)]
    DegreeTooLarge(usize),
    #[error("Cohn step requires |a_n| < |a_0| (got |a_n| = {leading}, |a_0| = {constant})")]
    CohnInapplicable { leading: f64, constant: f64 },
    #[error("root with modulus {modulus} lies within the boundary guard band")]
    Borderline { modulus: f64 },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("evaluation hit a pole of a Blaschke factor")]
    PoleHit,
    #[error("(b, a) is not a pair: max ||a|^2 + |b|^2 - 1| = {max_defect:e}")]
    NotAPair { max_defect: f64 },
    #[error("function has a pole on or too near the unit circle")]
    PoleOnCircle,
    #[error("Fourier tail {tail:e} at the truncation order exceeds the accuracy bound")]
    TailTooLarge { tail: f64 },
    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("Gram matrix is numerically singular (min/max eigenvalue ratio {ratio:e})")]
    DegenerateGram { ratio: f64 },
    #[error("Clark atom at modulus {modulus} is off the unit circle")]
    RootOffCircle { modulus: f64 },
    #[error("boundary derivative {0:e} too small for a Clark mass")]
    DegenerateDerivative(f64),
    #[error("point with modulus {0} is too close to the boundary")]
    TooCloseToBoundary(f64),
    #[error("invariant violated: {what} (defect {defect:e} at {at})")]
    InvariantViolation { what: String, at: String, defect: f64 },
    #[error("vector not in H(b) at this truncation (companion residual {residual:e})")]
    NotInHb { residual: f64 },
    #[error("kernel has a non-removable pole at the requested point")]
    PoleAtPoint,
    #[error("order-{k} evaluation at this boundary point is unbounded on H(b): a vanishes there only to order {order}")]
    UnboundedEvaluation { k: usize, order: usize },
    #[error("the inner function must vanish at the origin")]
    RequiresIZeroAtOrigin,
    #[error("candidate is not outer in the selected mode")]
    NotOuter,
    #[error("Gram matrix condition number {cond:e} exceeds the stability bound at K = {k}")]
    IllConditioned { cond: f64, k: usize },
    #[error("linear algebra failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
