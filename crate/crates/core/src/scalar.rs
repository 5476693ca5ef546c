use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the simulator is generic over.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    /// Relative tolerance used when checking that a ratio of rates is integral.
    #[inline]
    fn ratio_tolerance() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(16.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Returns `num / den` when it is a positive integer up to rounding.
pub fn integer_ratio<T: Scalar>(num: T, den: T) -> Option<usize> {
    if !(num.is_finite() && den.is_finite()) || den <= T::zero() || num <= T::zero() {
        return None;
    }
    let ratio = num / den;
    let rounded = ratio.round();
    if rounded < T::one() {
        return None;
    }
    if (ratio - rounded).abs() <= T::ratio_tolerance() * rounded {
        rounded.to_usize()
    } else {
        None
    }
}

/// Reduces a phase to `[0, 2π)`.
pub fn wrap_phase<T: Scalar>(phase: T) -> T {
    let tau = T::two_pi();
    let mut r = phase % tau;
    if r < T::zero() {
        r = r + tau;
    }
    if r >= tau {
        r = T::zero();
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_ratio_accepts_exact_and_rounded() {
        assert_eq!(integer_ratio(400e6_f64, 100e6), Some(4));
        assert_eq!(integer_ratio(100e6_f64 * 200e-9, 1.0), Some(20));
        assert_eq!(integer_ratio(150e6_f64, 100e6), None);
        assert_eq!(integer_ratio(50e6_f64, 100e6), None);
        assert_eq!(integer_ratio(1.0_f64, 0.0), None);
    }

    #[test]
    fn wrap_phase_range() {
        use std::f64::consts::PI;
        assert_eq!(wrap_phase(0.0_f64), 0.0);
        assert!((wrap_phase(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert!((wrap_phase(5.0 * PI) - PI).abs() < 1e-14);
        assert_eq!(wrap_phase(-1e-300_f64), 0.0);
        let w = wrap_phase(2.0 * PI);
        assert!((0.0..2.0 * PI).contains(&w));
    }
}
