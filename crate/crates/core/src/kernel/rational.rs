//! Exact rationals and the handful of dyadic helpers every construction needs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `2^-k`.
pub fn dyadic(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// `j / 2^k`.
pub fn dyadic_multiple(j: u64, k: u32) -> Rational {
    Rational::new(BigInt::from(j), BigInt::one() << k)
}

/// Parses `p/q` or a bare integer `p` (decimal digits, optional leading `-`).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p, q),
        None => (text, "1"),
    };
    let valid = |s: &str, signed: bool| {
        let digits = if signed { s.strip_prefix('-').unwrap_or(s) } else { s };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return None;
    }
    let p: BigInt = num.parse().ok()?;
    let q: BigInt = den.parse().ok()?;
    if q.is_zero() {
        return None;
    }
    Some(Rational::new(p, q))
}

/// Renders as `p/q` even when the value is an integer, so reports stay uniform.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Largest integer not exceeding `value`.
pub fn floor(value: &Rational) -> BigInt {
    value.numer().div_floor(value.denom())
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/4"), Some(ratio(3, 4)));
        assert_eq!(parse_rational("6/8"), Some(ratio(3, 4)));
        assert_eq!(parse_rational("2"), Some(int(2)));
        assert_eq!(parse_rational("-1/2"), Some(ratio(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(parse_rational(""), None);
        assert_eq!(parse_rational("/2"), None);
    }

    #[test]
    fn formats_integers_with_denominator() {
        assert_eq!(format_rational(&int(1)), "1/1");
        assert_eq!(format_rational(&Rational::zero()), "0/1");
        assert_eq!(format_rational(&ratio(2, 6)), "1/3");
    }

    #[test]
    fn dyadic_values() {
        assert_eq!(dyadic(0), int(1));
        assert_eq!(dyadic(3), ratio(1, 8));
        assert_eq!(dyadic_multiple(3, 2), ratio(3, 4));
        assert_eq!(floor(&ratio(-1, 2)), BigInt::from(-1));
        assert_eq!(floor(&ratio(7, 2)), BigInt::from(3));
    }
}
