//! Periodograms and staircase harmonic bookkeeping.
//!
//! Spectra are rectangular-window periodograms normalised so that the bins
//! sum to the mean-square of the analysed samples. Scenarios pick durations
//! that hold an integer number of periods of every tone, so lines land on bin
//! centres and there is no leakage.

use num_complex::Complex;
use num_traits::Float;
use rustfft::{FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::model::ComplexEnvelope;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    freqs: Vec<T>,
    power: Vec<T>,
    resolution: T,
    sample_rate: T,
    carrier_freq: T,
}

impl<T: Scalar> Spectrum<T> {
    /// Bin frequencies relative to the carrier, ascending over `(-fs/2, fs/2]`.
    pub fn freqs(&self) -> &[T] {
        &self.freqs
    }

    pub fn power(&self) -> &[T] {
        &self.power
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn carrier_freq(&self) -> T {
        self.carrier_freq
    }

    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn total_power(&self) -> T {
        self.power.iter().fold(T::zero(), |a, &p| a + p)
    }

    /// Bin index holding `freq`, if `freq` is a bin centre.
    pub fn bin_of(&self, freq: T) -> Result<usize> {
        let n = self.len();
        let lowest = self.freqs[0];
        let x = (freq - lowest) / self.resolution;
        let idx = x.round();
        let tol = T::lit(1e-6).max(T::epsilon() * T::lit(64.0) * T::from_usize_lossy(n));
        if idx < T::zero() || idx >= T::from_usize_lossy(n) {
            return Err(Error::Domain(format!(
                "{freq} Hz lies outside the spectrum span"
            )));
        }
        if Float::abs(x - idx) > tol {
            return Err(Error::Domain(format!(
                "{freq} Hz is not a bin centre (resolution {} Hz)",
                self.resolution
            )));
        }
        Ok(idx.to_usize().expect("non-negative bin index"))
    }

    /// Frequency and power of the strongest bin (first one on ties).
    pub fn strongest_line(&self) -> (T, T) {
        let mut best = 0;
        for (i, p) in self.power.iter().enumerate() {
            if *p > self.power[best] {
                best = i;
            }
        }
        (self.freqs[best], self.power[best])
    }

    /// Bins `(freq, power)` sorted by descending power.
    pub fn ranked_lines(&self) -> Vec<(T, T)> {
        let mut lines: Vec<(T, T)> = self
            .freqs
            .iter()
            .copied()
            .zip(self.power.iter().copied())
            .collect();
        lines.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        lines
    }
}

/// Signed DFT index `k` in `(-N/2, N/2]` for ascending bin `j`.
fn signed_index(j: usize, n: usize) -> i64 {
    j as i64 + (n / 2) as i64 - n as i64 + 1
}

/// Forward DFT by the direct `O(N²)` sum, `X_k = Σ x_n e^{-j2πkn/N}`.
pub fn direct_dft<T: Scalar>(x: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = x.len();
    let nt = T::from_usize_lossy(n);
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (i, v)| {
                    let r = (k * i) % n;
                    let angle = -T::two_pi() * T::from_usize_lossy(r) / nt;
                    acc + *v * Complex::from_polar(T::one(), angle)
                })
        })
        .collect()
}

/// Forward DFT via FFT, same convention as [`direct_dft`].
pub fn fft<T: Scalar + FftNum>(x: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = x.to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn spectrum_from_bins<T: Scalar>(bins: &[Complex<T>], env: &ComplexEnvelope<T>) -> Spectrum<T> {
    let n = bins.len();
    let nt = T::from_usize_lossy(n);
    let scale = T::one() / (nt * nt);
    let resolution = env.sample_rate() / nt;
    let mut freqs = Vec::with_capacity(n);
    let mut power = Vec::with_capacity(n);
    for j in 0..n {
        let k = signed_index(j, n);
        let idx = k.rem_euclid(n as i64) as usize;
        freqs.push(T::lit(k as f64) * resolution);
        power.push(bins[idx].norm_sqr() * scale);
    }
    Spectrum {
        freqs,
        power,
        resolution,
        sample_rate: env.sample_rate(),
        carrier_freq: env.carrier_freq(),
    }
}

fn check_dft_length<T: Scalar>(env: &ComplexEnvelope<T>, dft_length: usize) -> Result<()> {
    if dft_length < 2 {
        return Err(Error::Domain(format!(
            "dft_length must be >= 2, got {dft_length}"
        )));
    }
    if dft_length > env.len() {
        return Err(Error::Domain(format!(
            "dft_length {dft_length} exceeds the {} available samples",
            env.len()
        )));
    }
    Ok(())
}

/// Rectangular-window periodogram of the first `dft_length` samples:
/// `|X_k|² / N²`, so a unit tone on a bin centre reads 1.
pub fn periodogram<T: Scalar + FftNum>(
    env: &ComplexEnvelope<T>,
    dft_length: usize,
) -> Result<Spectrum<T>> {
    check_dft_length(env, dft_length)?;
    let bins = fft(&env.samples()[..dft_length]);
    Ok(spectrum_from_bins(&bins, env))
}

/// [`periodogram`] computed with [`direct_dft`]. Reference path for tests.
pub fn periodogram_direct<T: Scalar>(
    env: &ComplexEnvelope<T>,
    dft_length: usize,
) -> Result<Spectrum<T>> {
    check_dft_length(env, dft_length)?;
    let bins = direct_dft(&env.samples()[..dft_length]);
    Ok(spectrum_from_bins(&bins, env))
}

/// Power in the bin centred on `freq` (relative to the carrier).
pub fn line_power<T: Scalar>(spectrum: &Spectrum<T>, freq: T) -> Result<T> {
    spectrum.bin_of(freq).map(|j| spectrum.power[j])
}

/// Magnitudes of the Fourier coefficients of an `L`-step staircase phasor.
///
/// Harmonic `q` sits at `q / T_meta` in the shift direction, so `q = 1` is the
/// desired line. One period of the staircase (`L` samples) is transformed with
/// [`direct_dft`]; bin `q mod L` gives the sampled-sequence coefficient, and
/// the zero-order hold multiplies it by `|sin(πq/L) / (πq/L)|`.
pub fn staircase_harmonics<T: Scalar>(steps: usize, indices: &[i64]) -> Result<Vec<T>> {
    if steps < 2 {
        return Err(Error::Config(format!(
            "staircase needs at least 2 steps, got {steps}"
        )));
    }
    let lt = T::from_usize_lossy(steps);
    // conjugate of one down-shift period; bin q then carries line q
    let period: Vec<Complex<T>> = (0..steps)
        .map(|k| Complex::from_polar(T::one(), T::two_pi() * T::from_usize_lossy(k) / lt))
        .collect();
    let dft = direct_dft(&period);
    Ok(indices
        .iter()
        .map(|&q| {
            let bin = q.rem_euclid(steps as i64) as usize;
            let discrete = dft[bin].norm() / lt;
            let discrete = if discrete < T::epsilon() * T::lit(16.0) {
                T::zero()
            } else {
                discrete
            };
            let x = T::PI() * T::lit(q as f64) / lt;
            let hold = if q == 0 {
                T::one()
            } else {
                Float::abs(x.sin() / x)
            };
            discrete * hold
        })
        .collect())
}

/// Folds `freq` into the envelope's Nyquist band `(-fs/2, fs/2]`.
pub fn fold_frequency<T: Scalar>(freq: T, sample_rate: T) -> T {
    let half = sample_rate / T::lit(2.0);
    let mut folded = freq - (freq / sample_rate).round() * sample_rate;
    if folded <= -half {
        folded = folded + sample_rate;
    }
    if folded > half {
        folded = folded - sample_rate;
    }
    folded
}

/// Frequency (relative to the input) of staircase harmonic `q`, folded into
/// `(-fs/2, fs/2]`.
pub fn harmonic_frequency<T: Scalar>(q: i64, shift_hz: T, sample_rate: T) -> T {
    fold_frequency(T::lit(q as f64) * shift_hz, sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(offset: f64, fs: f64, n: usize) -> ComplexEnvelope<f64> {
        ComplexEnvelope::tone(offset, 1.0, fs, 0.0, n).unwrap()
    }

    #[test]
    fn tone_on_bin() {
        let env = tone(3.0, 64.0, 64);
        let s = periodogram(&env, 64).unwrap();
        let j = s.bin_of(3.0).unwrap();
        assert!((s.power()[j] - 1.0).abs() < 1e-12);
        for (i, p) in s.power().iter().enumerate() {
            if i != j {
                assert!(*p < 1e-20, "bin {i}: {p}");
            }
        }
        assert_eq!(s.strongest_line().0, 3.0);
    }

    #[test]
    fn zero_signal() {
        let env = ComplexEnvelope::new(vec![Complex::new(0.0, 0.0); 32], 32.0, 0.0, 0.0).unwrap();
        let s = periodogram(&env, 32).unwrap();
        assert!(s.power().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn bin_layout() {
        let env = tone(0.0, 8.0, 8);
        let s = periodogram(&env, 8).unwrap();
        assert_eq!(s.freqs(), &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        let env = tone(0.0, 7.0, 7);
        let s = periodogram(&env, 7).unwrap();
        assert_eq!(s.freqs(), &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn bad_lengths() {
        let env = tone(0.0, 8.0, 8);
        assert!(matches!(periodogram(&env, 9), Err(Error::Domain(_))));
        assert!(matches!(periodogram(&env, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn line_power_off_bin_and_out_of_span() {
        let env = tone(1.0, 16.0, 16);
        let s = periodogram(&env, 16).unwrap();
        assert!(matches!(line_power(&s, 1.5), Err(Error::Domain(_))));
        assert!(matches!(line_power(&s, 100.0), Err(Error::Domain(_))));
        assert!((line_power(&s, 1.0).unwrap() - s.total_power()).abs() < 1e-12);
        assert!(line_power(&s, -4.0).unwrap() < 1e-20);
    }

    #[test]
    fn harmonics_closed_form() {
        let l2 = staircase_harmonics::<f64>(2, &[1, -1, 3, 0, 2]).unwrap();
        assert!((l2[0] - 2.0 / PI).abs() < 1e-12);
        assert!((l2[1] - 2.0 / PI).abs() < 1e-12);
        assert!((l2[2] - 2.0 / (3.0 * PI)).abs() < 1e-12);
        assert_eq!(l2[3], 0.0);
        assert_eq!(l2[4], 0.0);
        let l20 = staircase_harmonics::<f64>(20, &[1, -19, 2]).unwrap();
        let c1 = (PI / 20.0).sin() / (PI / 20.0);
        assert!((l20[0] - c1).abs() < 1e-12);
        assert!((l20[1] - c1 / 19.0).abs() < 1e-12);
        assert_eq!(l20[2], 0.0);
        assert!(staircase_harmonics::<f64>(1, &[1]).is_err());
    }

    #[test]
    fn folding() {
        assert_eq!(harmonic_frequency(1, -5e6, 1.6e9), -5e6);
        assert_eq!(harmonic_frequency(-19, -5e6, 1.6e9), 95e6);
        assert_eq!(harmonic_frequency(161, -5e6, 1.6e9), 795e6);
        assert_eq!(harmonic_frequency(-159, -5e6, 1.6e9), 795e6);
        assert_eq!(harmonic_frequency(160, -5e6, 1.6e9), 800e6);
    }
}
