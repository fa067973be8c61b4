//! Exact arithmetic and Cantor-space set algebra.

mod cylinder;
mod interval;
pub mod rational;
mod word;

pub use cylinder::CylinderSet;
pub use interval::RealInterval;
pub use rational::{dyadic, format_rational, parse_rational, Rational};
pub use word::{Word, WordError};

#[cfg(test)]
mod field_tests {
    use super::rational::Rational;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..1000).prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a + Rational::zero(), a.clone());
            prop_assert_eq!(&a * Rational::one(), a.clone());
            prop_assert_eq!(&a - &a, Rational::zero());
            if !a.is_zero() {
                prop_assert_eq!(&a * a.recip(), Rational::one());
            }
            // lowest terms with positive denominator
            prop_assert!(*a.denom() > BigInt::zero());
            prop_assert!(num_integer::Integer::gcd(a.numer(), a.denom()).is_one());
        }
    }
}
