use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `100 · RMS(detected − reference) / RMS(reference)`.
pub fn evm<T: Scalar>(detected: &[Complex<T>], reference: &[Complex<T>]) -> Result<T> {
    if detected.len() != reference.len() {
        return Err(Error::Contract(format!(
            "{} detected symbols for {} reference symbols",
            detected.len(),
            reference.len()
        )));
    }
    let ref_power = reference.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
    if !(ref_power > T::zero()) {
        return Err(Error::Domain("EVM reference has zero power".into()));
    }
    let err_power = detected
        .iter()
        .zip(reference)
        .fold(T::zero(), |a, (d, r)| a + (*d - *r).norm_sqr());
    Ok(T::lit(100.0) * (err_power / ref_power).sqrt())
}

/// Fraction of differing bits.
pub fn ber(detected: &[bool], reference: &[bool]) -> Result<f64> {
    if detected.len() != reference.len() {
        return Err(Error::Contract(format!(
            "{} detected bits for {} reference bits",
            detected.len(),
            reference.len()
        )));
    }
    if detected.is_empty() {
        return Err(Error::Contract("BER of an empty bit sequence".into()));
    }
    let errors = detected
        .iter()
        .zip(reference)
        .filter(|(a, b)| a != b)
        .count();
    Ok(errors as f64 / detected.len() as f64)
}
