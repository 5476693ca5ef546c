//! Unit-cell reflection and the control waveforms that drive it.
//!
//! A cell multiplies whatever reaches it by its current coefficient
//! `A·e^{jφ}`. Driving every cell with a phase that falls linearly by `2π`
//! each `T_meta` translates the incident wave by `-1/T_meta`; with a DAC the
//! ramp becomes an `L`-step staircase whose extra lines sit at harmonic
//! indices `q ≡ 1 (mod L)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{CoefficientSchedule, ComplexEnvelope, ReflectionCoefficient};
use crate::scalar::{integer_ratio, wrap_phase, Scalar};

/// Applies one coefficient to one incident sample.
#[inline]
pub fn reflect<T: Scalar>(
    coefficient: &ReflectionCoefficient<T>,
    incident: Complex<T>,
) -> Complex<T> {
    coefficient.to_complex() * incident
}

/// Multiplies `incident` sample-wise by the held coefficients of `cell`.
///
/// The schedule must already run at the envelope sample rate (see
/// [`CoefficientSchedule::resample_hold`]) and have the same length.
pub fn apply_schedule<T: Scalar>(
    incident: &ComplexEnvelope<T>,
    schedule: &CoefficientSchedule<T>,
    cell: usize,
) -> Result<ComplexEnvelope<T>> {
    incident.require_nonempty("apply_schedule")?;
    let coefficients = schedule.cell(cell).ok_or_else(|| {
        Error::Contract(format!(
            "cell {cell} not in schedule of {} cells",
            schedule.cell_count()
        ))
    })?;
    if integer_ratio(incident.sample_rate(), schedule.control_rate()) != Some(1) {
        return Err(Error::Contract(format!(
            "schedule rate {} Hz differs from envelope rate {} Hz; resample first",
            schedule.control_rate(),
            incident.sample_rate()
        )));
    }
    if coefficients.len() != incident.len() {
        return Err(Error::Contract(format!(
            "schedule length {} differs from envelope length {}",
            coefficients.len(),
            incident.len()
        )));
    }
    let samples = incident
        .samples()
        .iter()
        .zip(coefficients)
        .map(|(x, c)| reflect(c, *x))
        .collect();
    Ok(incident.with_samples(samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftDirection {
    /// Phase falls with time; translates by `-1/T_meta`.
    #[default]
    Down,
    /// Phase rises with time; translates by `+1/T_meta`.
    Up,
}

impl ShiftDirection {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            ShiftDirection::Down => -T::one(),
            ShiftDirection::Up => T::one(),
        }
    }
}

/// `L`-step phase staircase completing `2π` every `period` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaircaseRampSpec<T> {
    period: T,
    steps: usize,
    direction: ShiftDirection,
    amplitude: T,
}

impl<T: Scalar> StaircaseRampSpec<T> {
    pub fn new(period: T, steps: usize, direction: ShiftDirection, amplitude: T) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Config(format!(
                "staircase needs at least 2 steps, got {steps}"
            )));
        }
        if !(period.is_finite() && period > T::zero()) {
            return Err(Error::Config(format!(
                "ramp period must be > 0, got {period}"
            )));
        }
        if !(amplitude >= T::zero() && amplitude <= T::one()) {
            return Err(Error::Config(format!(
                "ramp amplitude must lie in [0, 1], got {amplitude}"
            )));
        }
        Ok(Self {
            period,
            steps,
            direction,
            amplitude,
        })
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn direction(&self) -> ShiftDirection {
        self.direction
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    /// Frequency translation of the desired line, `±1/T_meta`.
    pub fn shift_hz(&self) -> T {
        self.direction.sign::<T>() / self.period
    }

    /// DAC rate the staircase needs: `L / T_meta`.
    pub fn required_control_rate(&self) -> T {
        T::from_usize_lossy(self.steps) / self.period
    }

    /// Phase of step `k` (wrapped).
    pub fn step_phase(&self, k: usize) -> T {
        let l = self.steps;
        let idx = match self.direction {
            ShiftDirection::Down => (l - k % l) % l,
            ShiftDirection::Up => k % l,
        };
        T::two_pi() * T::from_usize_lossy(idx) / T::from_usize_lossy(l)
    }
}

/// Compiles a single-cell staircase schedule at `control_rate` lasting
/// `duration` seconds. Broadcast with [`CoefficientSchedule::broadcast`] or
/// [`broadcast_staircase`].
pub fn compile_staircase<T: Scalar>(
    spec: &StaircaseRampSpec<T>,
    control_rate: T,
    duration: T,
) -> Result<CoefficientSchedule<T>> {
    let sequence = staircase_sequence(spec, control_rate, duration)?;
    CoefficientSchedule::broadcast(sequence, 1, control_rate)
}

/// Staircase on every one of `cells` cells, sharing one stored sequence.
pub fn broadcast_staircase<T: Scalar>(
    spec: &StaircaseRampSpec<T>,
    control_rate: T,
    duration: T,
    cells: usize,
) -> Result<CoefficientSchedule<T>> {
    let sequence = staircase_sequence(spec, control_rate, duration)?;
    CoefficientSchedule::broadcast(sequence, cells, control_rate)
}

fn staircase_sequence<T: Scalar>(
    spec: &StaircaseRampSpec<T>,
    control_rate: T,
    duration: T,
) -> Result<Vec<ReflectionCoefficient<T>>> {
    let per_period = integer_ratio(control_rate * spec.period, T::one());
    if per_period != Some(spec.steps) {
        return Err(Error::Config(format!(
            "control_rate × period = {} must equal the step count {} (integer samples per period)",
            control_rate * spec.period,
            spec.steps
        )));
    }
    let len = integer_ratio(duration * control_rate, T::one()).ok_or_else(|| {
        Error::Config(format!(
            "duration {duration} s is not an integer number of control samples at {control_rate} Hz"
        ))
    })?;
    (0..len)
        .map(|k| ReflectionCoefficient::new(spec.amplitude, spec.step_phase(k)))
        .collect()
}

/// Ideal ramp sampled at every envelope sample: `A·e^{±j2πt/T_meta}` with
/// `t = k / sample_rate`, returned as a schedule at `sample_rate`.
pub fn continuous_ramp_schedule<T: Scalar>(
    period: T,
    direction: ShiftDirection,
    amplitude: T,
    sample_rate: T,
    len: usize,
    cells: usize,
) -> Result<CoefficientSchedule<T>> {
    if !(period.is_finite() && period > T::zero()) {
        return Err(Error::Config(format!(
            "ramp period must be > 0, got {period}"
        )));
    }
    if len == 0 {
        return Err(Error::Config("ramp must span at least one sample".into()));
    }
    let samples_per_period = sample_rate * period;
    let sign = direction.sign::<T>();
    let sequence = (0..len)
        .map(|k| {
            let turns = (T::from_usize_lossy(k) / samples_per_period).fract();
            ReflectionCoefficient::new(amplitude, wrap_phase(sign * T::two_pi() * turns))
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientSchedule::broadcast(sequence, cells, sample_rate)
}

/// Applies the ideal continuous ramp directly to an envelope.
pub fn apply_continuous_ramp<T: Scalar>(
    incident: &ComplexEnvelope<T>,
    period: T,
    direction: ShiftDirection,
    amplitude: T,
) -> Result<ComplexEnvelope<T>> {
    incident.require_nonempty("apply_continuous_ramp")?;
    let schedule = continuous_ramp_schedule(
        period,
        direction,
        amplitude,
        incident.sample_rate(),
        incident.len(),
        1,
    )?;
    apply_schedule(incident, &schedule, 0)
}

/// Finite-resolution control. `None` means continuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationModel<T> {
    phase_levels: Option<u32>,
    amplitude_levels: Option<u32>,
    phase_offset: T,
}

impl<T: Scalar> Default for QuantizationModel<T> {
    fn default() -> Self {
        Self::continuous()
    }
}

impl<T: Scalar> QuantizationModel<T> {
    pub fn continuous() -> Self {
        Self {
            phase_levels: None,
            amplitude_levels: None,
            phase_offset: T::zero(),
        }
    }

    /// Phase levels sit at `phase_offset + 2πk/L_φ`. Amplitude levels are
    /// `k/(L_A - 1)` for `L_A ≥ 2`; a single amplitude level means full
    /// reflection (`A = 1`).
    pub fn new(
        phase_levels: Option<u32>,
        amplitude_levels: Option<u32>,
        phase_offset: T,
    ) -> Result<Self> {
        if phase_levels == Some(0) || amplitude_levels == Some(0) {
            return Err(Error::Config(
                "quantization needs at least one level".into(),
            ));
        }
        if !phase_offset.is_finite() {
            return Err(Error::Config("phase offset must be finite".into()));
        }
        Ok(Self {
            phase_levels,
            amplitude_levels,
            phase_offset: wrap_phase(phase_offset),
        })
    }

    pub fn phase_levels(&self) -> Option<u32> {
        self.phase_levels
    }

    pub fn amplitude_levels(&self) -> Option<u32> {
        self.amplitude_levels
    }

    pub fn phase_offset(&self) -> T {
        self.phase_offset
    }

    pub fn is_continuous(&self) -> bool {
        self.phase_levels.is_none() && self.amplitude_levels.is_none()
    }
}

/// Snaps a coefficient to the nearest level of `model`. Phase uses circular
/// distance, amplitude linear distance; exact ties go to the lower level index.
pub fn quantize<T: Scalar>(
    coefficient: &ReflectionCoefficient<T>,
    model: &QuantizationModel<T>,
) -> ReflectionCoefficient<T> {
    let phase = match model.phase_levels {
        None => coefficient.phase(),
        Some(levels) => {
            let n = levels as usize;
            let step = T::two_pi() / T::from_usize_lossy(n);
            let x = wrap_phase(coefficient.phase() - model.phase_offset) / step;
            let below = x.floor();
            let frac = x - below;
            let below = below.to_usize().unwrap_or(0) % n;
            let above = (below + 1) % n;
            let half = T::lit(0.5);
            let k = if frac > half {
                above
            } else if frac < half {
                below
            } else {
                below.min(above)
            };
            wrap_phase(model.phase_offset + step * T::from_usize_lossy(k))
        }
    };
    let amplitude = match model.amplitude_levels {
        None => coefficient.amplitude(),
        Some(1) => T::one(),
        Some(levels) => {
            let span = T::from_usize_lossy(levels as usize - 1);
            let x = coefficient.amplitude() * span;
            let below = x.floor();
            let k = if x - below > T::lit(0.5) {
                below + T::one()
            } else {
                below
            };
            (k / span).min(T::one())
        }
    };
    ReflectionCoefficient::new(amplitude, phase).expect("quantized levels are valid coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rc(a: f64, p: f64) -> ReflectionCoefficient<f64> {
        ReflectionCoefficient::new(a, p).unwrap()
    }

    #[test]
    fn reflect_examples() {
        let one = Complex::new(1.0, 0.0);
        assert_eq!(reflect(&rc(1.0, 0.0), one), one);
        assert!((reflect(&rc(0.5, PI), one) - Complex::new(-0.5, 0.0)).norm() < 1e-15);
        assert!(
            (reflect(&rc(1.0, PI / 2.0), Complex::new(2.0, 0.0)) - Complex::new(0.0, 2.0)).norm()
                < 1e-15
        );
    }

    fn tone(len: usize) -> ComplexEnvelope<f64> {
        ComplexEnvelope::tone(1e6, 1.0, 16e6, 4.25e9, len).unwrap()
    }

    #[test]
    fn apply_identity_and_negation() {
        let env = tone(32);
        let unity = CoefficientSchedule::broadcast(vec![rc(1.0, 0.0); 32], 1, 16e6).unwrap();
        assert_eq!(apply_schedule(&env, &unity, 0).unwrap(), env);
        let flip = CoefficientSchedule::broadcast(vec![rc(1.0, PI); 32], 1, 16e6).unwrap();
        let out = apply_schedule(&env, &flip, 0).unwrap();
        for (a, b) in out.samples().iter().zip(env.samples()) {
            assert!((a + b).norm() < 1e-15);
        }
        assert_eq!(out.sample_rate(), env.sample_rate());
        assert_eq!(out.carrier_freq(), env.carrier_freq());
    }

    #[test]
    fn apply_rejects_mismatch() {
        let env = tone(32);
        let short = CoefficientSchedule::broadcast(vec![rc(1.0, 0.0); 16], 1, 16e6).unwrap();
        assert!(matches!(
            apply_schedule(&env, &short, 0),
            Err(Error::Contract(_))
        ));
        let slow = CoefficientSchedule::broadcast(vec![rc(1.0, 0.0); 32], 1, 8e6).unwrap();
        assert!(matches!(
            apply_schedule(&env, &slow, 0),
            Err(Error::Contract(_))
        ));
        let ok = CoefficientSchedule::broadcast(vec![rc(1.0, 0.0); 32], 1, 16e6).unwrap();
        assert!(matches!(
            apply_schedule(&env, &ok, 1),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn staircase_four_steps() {
        let spec = StaircaseRampSpec::new(4e-8, 4, ShiftDirection::Down, 1.0).unwrap();
        let s = compile_staircase(&spec, 100e6, 4e-8).unwrap();
        let phases: Vec<f64> = s.cell(0).unwrap().iter().map(|c| c.phase()).collect();
        let expected = [0.0, 1.5 * PI, PI, 0.5 * PI];
        for (p, e) in phases.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15, "{phases:?}");
        }
    }

    #[test]
    fn staircase_twenty_steps_is_five_mhz() {
        let spec = StaircaseRampSpec::new(200e-9, 20, ShiftDirection::Down, 1.0_f64).unwrap();
        assert!((spec.required_control_rate() - 100e6).abs() < 1e-3);
        assert!((spec.shift_hz() + 5e6).abs() < 1e-6);
        let s = compile_staircase(&spec, 100e6, 1e-6).unwrap();
        assert_eq!(s.len(), 100);
    }

    #[test]
    fn staircase_two_steps_square_wave() {
        let spec = StaircaseRampSpec::new(2e-8, 2, ShiftDirection::Down, 1.0).unwrap();
        let s = compile_staircase(&spec, 100e6, 1e-7).unwrap();
        for (k, c) in s.cell(0).unwrap().iter().enumerate() {
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((c.to_complex() - Complex::new(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn staircase_rejects_fractional_period() {
        let spec = StaircaseRampSpec::new(205e-9, 20, ShiftDirection::Down, 1.0).unwrap();
        assert!(matches!(
            compile_staircase(&spec, 100e6, 1e-6),
            Err(Error::Config(_))
        ));
        let spec = StaircaseRampSpec::new(200e-9, 20, ShiftDirection::Down, 1.0).unwrap();
        assert!(matches!(
            compile_staircase(&spec, 100e6, 1.005e-7),
            Err(Error::Config(_))
        ));
        assert!(StaircaseRampSpec::new(200e-9, 1, ShiftDirection::Down, 1.0_f64).is_err());
    }

    #[test]
    fn staircase_periodic() {
        let spec = StaircaseRampSpec::new(80e-9, 8, ShiftDirection::Up, 0.7).unwrap();
        let s = compile_staircase(&spec, 100e6, 800e-9).unwrap();
        let cell = s.cell(0).unwrap();
        for k in 8..cell.len() {
            assert_eq!(cell[k], cell[k - 8]);
        }
    }

    #[test]
    fn quantize_examples() {
        let cont = QuantizationModel::continuous();
        let x = rc(0.37, 1.234);
        assert_eq!(quantize(&x, &cont), x);

        let bpsk = QuantizationModel::new(Some(2), None, 0.0).unwrap();
        assert_eq!(quantize(&rc(1.0, 0.4 * PI), &bpsk).phase(), 0.0);
        assert_eq!(quantize(&rc(1.0, 0.6 * PI), &bpsk).phase(), PI);

        let qpsk = QuantizationModel::new(Some(4), None, 0.0).unwrap();
        assert_eq!(quantize(&rc(1.0, 0.25 * PI), &qpsk).phase(), 0.0);
        // tie across the wrap goes to index 0
        assert_eq!(quantize(&rc(1.0, 1.75 * PI), &qpsk).phase(), 0.0);
        assert!((quantize(&rc(1.0, 1.7 * PI), &qpsk).phase() - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn quantize_amplitude() {
        let m = QuantizationModel::new(None, Some(3), 0.0).unwrap();
        assert_eq!(quantize(&rc(0.2, 0.0), &m).amplitude(), 0.0);
        assert_eq!(quantize(&rc(0.25, 0.0), &m).amplitude(), 0.0);
        assert_eq!(quantize(&rc(0.3, 0.0), &m).amplitude(), 0.5);
        assert_eq!(quantize(&rc(0.9, 0.0), &m).amplitude(), 1.0);
        let single = QuantizationModel::new(Some(1), Some(1), 0.0).unwrap();
        assert_eq!(quantize(&rc(0.2, 2.0), &single), rc(1.0, 0.0));
        assert!(QuantizationModel::<f64>::new(Some(0), None, 0.0).is_err());
    }

    #[test]
    fn continuous_ramp_is_exact_phasor() {
        let env = ComplexEnvelope::tone(0.0, 1.0, 64e6, 0.0, 64).unwrap();
        let out = apply_continuous_ramp(&env, 1e-6 / 8.0, ShiftDirection::Down, 1.0).unwrap();
        for (k, z) in out.samples().iter().enumerate() {
            let expected = Complex::from_polar(1.0, -2.0 * PI * k as f64 / 8.0);
            assert!((z - expected).norm() < 1e-14);
        }
    }
}
