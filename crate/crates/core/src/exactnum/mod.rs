//! Exact arithmetic: rationals, quadratic surds, dense polynomials and
//! reduced rational functions in one variable `z`.
//!
//! Every value is immutable once built and every operation is exact. The
//! text renderings (`p/q`, `a + b*sqrt(r)`, `(num) / (den)`) double as the
//! exchange format used by the command-line tool and by JSON certificates.

pub(crate) mod bigint_serde;
mod poly;
mod rat;
mod ratfunc;
mod surd;

use num_bigint::BigInt;

pub use poly::Poly;
pub use rat::{q, Rat};
pub use ratfunc::{PartialFractions, Point, PoleTerms, RatFunc};
pub use surd::Surd;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("surds live in different quadratic fields (radicands {left} and {right})")]
    IncompatibleRadicands { left: BigInt, right: BigInt },
    #[error("supplied roots do not divide the denominator")]
    NonzeroRemainder,
    #[error("supplied roots do not account for every factor of the denominator")]
    IncompleteFactorization,
    #[error("denominator {den} does not split over the rationals")]
    IrrationalPoles { den: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?}: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

impl ParseError {
    pub(crate) fn new(input: &str, reason: &str) -> Self {
        ParseError {
            input: input.to_string(),
            reason: reason.to_string(),
        }
    }
}

/// Parses a comma-separated list of exact rationals such as `1,5/2,-7`.
pub fn parse_rat_list(s: &str) -> Result<Vec<Rat>, ParseError> {
    s.split(',').map(str::parse).collect()
}
