use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("variable x{index} out of range (expected x1..x{nvars})")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} is not a positive even number")]
    OddDimension(usize),

    #[error("not divisible by h: term {0} has h-power 0")]
    NotDivisible(String),

    #[error("graded commutator left an h-free term {0}")]
    CommutatorNotInHIdeal(String),

    #[error("wrong degree: {0}")]
    WrongDegree(String),

    #[error("Poisson matrix is not antisymmetric at entry ({row},{col})")]
    NotAntisymmetric { row: usize, col: usize },

    #[error("no polynomial inverse (determinant {determinant} is not a nonzero constant)")]
    NoPolynomialInverse { determinant: String },

    #[error("Jacobi identity fails for (x{0},x{1},x{2}): residue {3}")]
    Jacobi(usize, usize, usize, String),

    #[error("structure consistency check failed: {0}")]
    Inconsistent(String),

    #[error("christoffel data not totally symmetric at ({0},{1},{2})")]
    NotSymmetric(usize, usize, usize),

    #[error("connection has torsion at ({0},{1}): residue {2}")]
    Torsion(usize, usize, String),

    #[error("connection not parallel at ({0},{1},{2}): residue {3}")]
    NotParallel(usize, usize, usize, String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("iteration did not stabilise after {0} steps")]
    NonTermination(usize),

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("Poisson matrix is not constant")]
    NonConstantPoisson,

    #[error("invalid problem file: {0}")]
    Problem(String),
}
