use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniformly sampled complex baseband waveform around `carrier_freq`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope<T> {
    samples: Vec<Complex<T>>,
    sample_rate: T,
    carrier_freq: T,
    t0: T,
}

impl<T: Scalar> ComplexEnvelope<T> {
    pub fn new(samples: Vec<Complex<T>>, sample_rate: T, carrier_freq: T, t0: T) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > T::zero()) {
            return Err(Error::Domain(format!(
                "sample_rate must be a positive finite number, got {sample_rate}"
            )));
        }
        if !carrier_freq.is_finite() || !t0.is_finite() {
            return Err(Error::Domain("carrier_freq and t0 must be finite".into()));
        }
        Ok(Self {
            samples,
            sample_rate,
            carrier_freq,
            t0,
        })
    }

    /// Complex exponential at `offset_hz` from the carrier.
    ///
    /// The offset must lie strictly inside `(-fs/2, fs/2)`.
    pub fn tone(
        offset_hz: T,
        amplitude: T,
        sample_rate: T,
        carrier_freq: T,
        len: usize,
    ) -> Result<Self> {
        if offset_hz.abs() >= sample_rate / T::lit(2.0) {
            return Err(Error::Domain(format!(
                "tone offset {offset_hz} Hz is not representable at sample rate {sample_rate} Hz"
            )));
        }
        let cycles_per_sample = offset_hz / sample_rate;
        let samples = (0..len)
            .map(|k| {
                let turns = (T::from_usize_lossy(k) * cycles_per_sample).fract();
                Complex::from_polar(amplitude, T::two_pi() * turns)
            })
            .collect();
        Self::new(samples, sample_rate, carrier_freq, T::zero())
    }

    /// Same metadata, new samples.
    pub fn with_samples(&self, samples: Vec<Complex<T>>) -> Self {
        Self {
            samples,
            sample_rate: self.sample_rate,
            carrier_freq: self.carrier_freq,
            t0: self.t0,
        }
    }

    pub fn with_t0(mut self, t0: T) -> Self {
        self.t0 = t0;
        self
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn carrier_freq(&self) -> T {
        self.carrier_freq
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.samples.len()) / self.sample_rate
    }

    /// Mean of `|x[n]|^2`.
    pub fn mean_power(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        let sum = self
            .samples
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        sum / T::from_usize_lossy(self.samples.len())
    }

    /// True when rate, carrier and start time agree with `other`.
    pub fn same_timebase(&self, other: &Self) -> bool {
        let tol = T::ratio_tolerance();
        let close =
            |a: T, b: T| (a - b).abs() <= tol * a.abs().max(b.abs()).max(T::min_positive_value());
        close(self.sample_rate, other.sample_rate)
            && (self.carrier_freq == other.carrier_freq
                || close(self.carrier_freq, other.carrier_freq))
            && (self.t0 == other.t0 || close(self.t0, other.t0))
    }

    pub(crate) fn require_nonempty(&self, what: &str) -> Result<()> {
        if self.samples.is_empty() {
            Err(Error::Contract(format!("{what}: envelope has no samples")))
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rate() {
        assert!(ComplexEnvelope::<f64>::new(vec![], 0.0, 1.0, 0.0).is_err());
        assert!(ComplexEnvelope::<f64>::new(vec![], f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn tone_rejects_alias() {
        assert!(ComplexEnvelope::<f64>::tone(50.0, 1.0, 100.0, 0.0, 8).is_err());
        assert!(ComplexEnvelope::<f64>::tone(-50.0, 1.0, 100.0, 0.0, 8).is_err());
        assert!(ComplexEnvelope::<f64>::tone(49.0, 1.0, 100.0, 0.0, 8).is_ok());
    }

    #[test]
    fn tone_is_unit_power() {
        let env = ComplexEnvelope::<f64>::tone(12.5, 1.0, 100.0, 4.25e9, 64).unwrap();
        assert!((env.mean_power() - 1.0).abs() < 1e-14);
        assert!((env.duration() - 0.64).abs() < 1e-15);
        // quarter turn every two samples
        assert!((env.samples()[2] - Complex::new(0.0, 1.0)).norm() < 1e-15);
    }
}
