use core::fmt;

/// Errors raised by the linear-algebra kernel, the semi-Hilbert calculus and
/// the certificate registry.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    NonSquare {
        rows: usize,
        cols: usize,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    EmptyMatrix,
    NonFinite,
    /// Relative symmetry residual `||M - M*||_F / max(1, ||M||_F)`.
    NotHermitian {
        residual: f64,
    },
    /// Most negative eigenvalue found, relative to the largest one.
    NotPsd {
        eigenvalue: f64,
    },
    InvalidTolerance(f64),
    /// The weight has no nonzero eigenvalue above the rank cutoff.
    ZeroWeight,
    /// `R(T* A)` is not contained in `R(A)`; the operator has no A-adjoint.
    NoAdjoint {
        residual: f64,
    },
    /// The compressed operator vanishes (`ATA = 0`), so the cosine infimum is empty.
    ZeroOperator,
    UnknownId(alloc::string::String),
    ArityMismatch {
        needed: usize,
        given: usize,
    },
    FamilyNeedsIdentityA,
    InvalidConfig(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonSquare { rows, cols } => write!(f, "matrix is not square ({rows}x{cols})"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::EmptyMatrix => f.write_str("matrix must have at least one row and one column"),
            Error::NonFinite => f.write_str("matrix contains NaN or infinite entries"),
            Error::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (relative residual {residual:e})")
            }
            Error::NotPsd { eigenvalue } => {
                write!(f, "matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")
            }
            Error::InvalidTolerance(t) => write!(f, "rank tolerance {t} outside [0, 1)"),
            Error::ZeroWeight => f.write_str("weight operator A has rank zero"),
            Error::NoAdjoint { residual } => {
                write!(f, "operator does not admit an A-adjoint (range residual {residual:e})")
            }
            Error::ZeroOperator => f.write_str("operator vanishes in the A-seminorm (ATA = 0)"),
            Error::UnknownId(id) => write!(f, "unknown inequality id `{id}`"),
            Error::ArityMismatch { needed, given } => {
                write!(f, "inequality needs {needed} operands, {given} given")
            }
            Error::FamilyNeedsIdentityA => f.write_str("classical families require A = I (rank equal to dimension)"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
