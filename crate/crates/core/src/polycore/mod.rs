//! Exact multivariate polynomials over the rationals.
//!
//! Everything symbolic in this crate bottoms out here: a structure check is
//! "compute some polynomial, ask whether it is the zero polynomial". With
//! rational coefficients and a canonical term store that question has an exact
//! answer.

mod parse;
mod polynomial;
mod space;

pub use parse::{parse_polynomial, parse_rational};
pub use polynomial::{Monomial, Polynomial};
pub use space::VarSpace;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Integer as a [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` as a reduced [`Rational`]. Panics when `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Render a rational as `n` or `n/d`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion used by the float-mode diagnostics.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
