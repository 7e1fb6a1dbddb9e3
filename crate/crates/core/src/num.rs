//! Exact score arithmetic and fixed-point rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Renders `value` with exactly `places` decimals, truncating toward zero
/// (13/6 renders as `2.16666`).
pub fn render_truncated(value: &Rational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = (value.numer() * &scale).div_rem(value.denom()).0;
    let negative = value.is_negative() && !scaled.is_zero();
    let digits = scaled.abs().to_string();
    let digits = if digits.len() <= places {
        format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (whole, frac) = digits.split_at(digits.len() - places);
    let sign = if negative { "-" } else { "" };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

/// `a/b` form, or just `a` for integers.
pub fn render_exact(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncates_instead_of_rounding() {
        assert_eq!(render_truncated(&ratio(13, 6), 5), "2.16666");
        assert_eq!(render_truncated(&ratio(25, 12), 5), "2.08333");
        assert_eq!(render_truncated(&ratio(321, 64), 5), "5.01562");
        assert_eq!(render_truncated(&int(2), 5), "2.00000");
        assert_eq!(render_truncated(&ratio(1, 64), 3), "0.015");
        assert_eq!(render_truncated(&ratio(-1, 3), 2), "-0.33");
        assert_eq!(render_truncated(&ratio(-1, 1000), 2), "0.00");
        assert_eq!(render_truncated(&ratio(7, 2), 0), "3");
    }

    #[test]
    fn exact_form() {
        assert_eq!(render_exact(&ratio(2, 4)), "1/2");
        assert_eq!(render_exact(&int(3)), "3");
    }
}
