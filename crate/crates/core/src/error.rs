use thiserror::Error;

/// Every failure the toolkit can report.
///
/// Variants map one-to-one onto the stable error codes printed by the
/// command line front end (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("field of size {0} is too large")]
    FieldTooLarge(String),
    #[error("model is singular: gcd(f, f') is not constant")]
    SingularModel,
    #[error("polynomial degree {0} is too small for a hyperelliptic model")]
    DegreeTooSmall(usize),
    #[error("enumeration of {size} elements exceeds the cap {cap}")]
    CapExceeded { size: String, cap: u64 },
    #[error("even model has no rational Weierstrass point")]
    NoRationalWeierstrass,
    #[error("point count N_{0} violates the Weil bound")]
    WeilBoundViolated(u32),
    #[error("Newton recursion produced a non-integral coefficient at index {0}")]
    NonIntegralCoefficient(usize),
    #[error("polynomial roots do not all have modulus sqrt(q) (deviation {0:e})")]
    RootModulusViolated(f64),
    #[error("Jacobian arithmetic requires an odd-degree model")]
    ModelNotOdd,
    #[error("operands live over different fields or curves")]
    FieldMismatch,
    #[error("could not fully factor {0}")]
    FactorizationIncomplete(String),
    #[error("degree {0} is outside 0..=2")]
    DegreeOutOfRange(u32),
    #[error("numeric root separation too small to decide ({0:e})")]
    PrecisionInsufficient(f64),
    #[error("no base change of degree <= {0} kills all root-of-unity ratios")]
    BoundExceeded(u32),
    #[error("characteristics differ ({0} vs {1})")]
    CharacteristicMismatch(u64, u64),
    #[error("dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("invalid string entry {0}: entries must exceed 1 and be prime to p")]
    InvalidString(u64),
    #[error("excluded set covers every point")]
    EmptyComplement,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "NonPrime",
            Error::EvenCharacteristic => "EvenCharacteristic",
            Error::FieldTooLarge(_) => "FieldTooLarge",
            Error::SingularModel => "SingularModel",
            Error::DegreeTooSmall(_) => "DegreeTooSmall",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::NoRationalWeierstrass => "NoRationalWeierstrass",
            Error::WeilBoundViolated(_) => "WeilBoundViolated",
            Error::NonIntegralCoefficient(_) => "NonIntegralCoefficient",
            Error::RootModulusViolated(_) => "RootModulusViolated",
            Error::ModelNotOdd => "ModelNotOdd",
            Error::FieldMismatch => "FieldMismatch",
            Error::FactorizationIncomplete(_) => "FactorizationIncomplete",
            Error::DegreeOutOfRange(_) => "DegreeOutOfRange",
            Error::PrecisionInsufficient(_) => "PrecisionInsufficient",
            Error::BoundExceeded(_) => "BoundExceeded",
            Error::CharacteristicMismatch(..) => "CharacteristicMismatch",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::InvalidString(_) => "InvalidString",
            Error::EmptyComplement => "EmptyComplement",
            Error::Parse(_) => "Parse",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Whether the error stems from malformed input rather than from a
    /// computation on valid input.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::InvalidArgument(_)
                | Error::InvalidString(_)
                | Error::NonPrime(_)
                | Error::EvenCharacteristic
                | Error::SingularModel
                | Error::DegreeTooSmall(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
