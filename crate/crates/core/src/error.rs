use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A power or root was requested of an interval reaching below zero.
    NegativeBase,
    /// The exponent could not be certified to satisfy `p >= 1`.
    ExponentBelowOne,
    /// An exponent oracle could not be certified positive.
    NonPositiveExponent,
    /// A scalar that must have modulus one does not.
    NotUnimodular { index: usize },
    NotUnitVector { index: usize },
    SupportsOverlap { first: usize, second: usize, coordinate: usize },
    /// A complex coefficient was handed to a real-field presentation.
    FieldMismatch,
    /// A ball was handed to a map over a different presentation.
    PresentationMismatch { expected: String, found: String },
    /// An oracle refused, ran out of fuel, or returned inconsistent data.
    OracleFailure(String),
    /// An algorithm touched an access mode it did not declare.
    AccessViolation(&'static str),
    InvalidCeSet(String),
    InvalidDescriptor(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeBase => write!(f, "base interval reaches below zero"),
            Self::ExponentBelowOne => write!(f, "exponent is not certified >= 1"),
            Self::NonPositiveExponent => write!(f, "exponent is not certified positive"),
            Self::NotUnimodular { index } => write!(f, "scalar {index} is not unimodular"),
            Self::NotUnitVector { index } => write!(f, "image {index} is not a unit vector"),
            Self::SupportsOverlap { first, second, coordinate } => write!(
                f,
                "images {first} and {second} overlap at coordinate {coordinate}"
            ),
            Self::FieldMismatch => write!(f, "complex coefficient in a real-field presentation"),
            Self::PresentationMismatch { expected, found } => {
                write!(f, "ball over `{found}` given to a map expecting `{expected}`")
            }
            Self::OracleFailure(why) => write!(f, "oracle failure: {why}"),
            Self::AccessViolation(what) => write!(f, "undeclared oracle access: {what}"),
            Self::InvalidCeSet(why) => write!(f, "invalid c.e. set: {why}"),
            Self::InvalidDescriptor(why) => write!(f, "invalid isometry descriptor: {why}"),
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl core::error::Error for Error {}
