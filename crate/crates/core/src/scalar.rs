//! Scalar abstraction shared by the float and exact-rational backends.

use std::fmt::Debug;
use std::ops::Neg;

use num::{BigInt, BigRational, Complex, Num, Zero};

/// A commutative field element usable by the generic projector and chain
/// kernels. Implemented for `f64`, `Complex<f64>` and `BigRational`.
pub trait Field: Num + Clone + Neg<Output = Self> + Debug + 'static {}

impl<T> Field for T where T: Num + Clone + Neg<Output = T> + Debug + 'static {}

/// `base^exp` for any signed exponent. `base` must be invertible when
/// `exp < 0`.
pub fn powi<T: Field>(base: &T, exp: i32) -> T {
    let p = num::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        T::one() / p
    } else {
        p
    }
}

/// Exact rational from a numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Complex scalar from its real part.
pub fn real<T: Clone + Zero>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Lossy conversion of an exact rational to `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_powers() {
        assert_eq!(powi(&2.0_f64, 3), 8.0);
        assert_eq!(powi(&2.0_f64, -2), 0.25);
        assert_eq!(powi(&ratio(2, 1), -3), ratio(1, 8));
        assert_eq!(powi(&ratio(5, 3), 0), ratio(1, 1));
    }
}
