//! Exact rational functions in named parameters.

mod polynomial;
mod scalar;

use std::collections::BTreeMap;

use thiserror::Error;

pub use num_rational::BigRational as Rational;
pub use polynomial::{Monomial, Polynomial};
pub use scalar::Scalar;

/// Values for (some of) the parameters.
pub type Assignment = BTreeMap<String, Rational>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("denominator {denominator} vanishes at the given point")]
    DenominatorVanishes { denominator: String },
    #[error("no value for parameter `{0}`")]
    MissingParameter(String),
    #[error("division by zero")]
    DivisionByZero,
}

pub(crate) use polynomial::fmt_rational;

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(c: &Rational) -> String {
    fmt_rational(c)
}

/// Convenience constructor for assignments in tests and the catalog.
pub fn assignment<'a>(pairs: impl IntoIterator<Item = (&'a str, Rational)>) -> Assignment {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
