use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{integer_ratio, wrap_phase, Scalar};

/// Programmable reflection coefficient `A·e^{jφ}` of one unit cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCoefficient<T> {
    amplitude: T,
    phase: T,
}

impl<T: Scalar> ReflectionCoefficient<T> {
    /// `amplitude` must lie in `[0, 1]`; `phase` is reduced to `[0, 2π)`.
    pub fn new(amplitude: T, phase: T) -> Result<Self> {
        if !(amplitude >= T::zero() && amplitude <= T::one()) {
            return Err(Error::Domain(format!(
                "reflection amplitude must lie in [0, 1], got {amplitude}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::Domain("reflection phase must be finite".into()));
        }
        Ok(Self {
            amplitude,
            phase: wrap_phase(phase),
        })
    }

    pub fn unity() -> Self {
        Self {
            amplitude: T::one(),
            phase: T::zero(),
        }
    }

    /// Polar decomposition of `z`. Magnitudes within a few ulps above one are
    /// clamped to one; anything larger is rejected.
    pub fn from_complex(z: Complex<T>) -> Result<Self> {
        let mut amplitude = z.norm();
        if amplitude > T::one() {
            if amplitude - T::one() <= T::epsilon() * T::lit(8.0) {
                amplitude = T::one();
            } else {
                return Err(Error::Domain(format!(
                    "coefficient magnitude {amplitude} exceeds 1"
                )));
            }
        }
        let phase = if amplitude == T::zero() {
            T::zero()
        } else {
            z.arg()
        };
        Self::new(amplitude, phase)
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    pub fn to_complex(&self) -> Complex<T> {
        Complex::from_polar(self.amplitude, self.phase)
    }
}

/// Per-cell, zero-order-held coefficient sequences at `control_rate`.
///
/// Cells driven by the same DAC share one stored sequence; [`cell`] still
/// exposes a per-cell view.
///
/// [`cell`]: CoefficientSchedule::cell
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSchedule<T> {
    sequences: Vec<Vec<ReflectionCoefficient<T>>>,
    cell_sequence: Vec<usize>,
    control_rate: T,
}

impl<T: Scalar> CoefficientSchedule<T> {
    /// One independent sequence per cell.
    pub fn from_cells(cells: Vec<Vec<ReflectionCoefficient<T>>>, control_rate: T) -> Result<Self> {
        let n = cells.len();
        Self::shared(cells, (0..n).collect(), control_rate)
    }

    /// The same sequence on every one of `cells` cells.
    pub fn broadcast(
        sequence: Vec<ReflectionCoefficient<T>>,
        cells: usize,
        control_rate: T,
    ) -> Result<Self> {
        Self::shared(vec![sequence], vec![0; cells], control_rate)
    }

    /// Cell `c` plays `sequences[cell_sequence[c]]`.
    pub fn shared(
        sequences: Vec<Vec<ReflectionCoefficient<T>>>,
        cell_sequence: Vec<usize>,
        control_rate: T,
    ) -> Result<Self> {
        if !(control_rate.is_finite() && control_rate > T::zero()) {
            return Err(Error::Config(format!(
                "control_rate must be > 0, got {control_rate}"
            )));
        }
        if cell_sequence.is_empty() {
            return Err(Error::Config(
                "schedule must cover at least one cell".into(),
            ));
        }
        let len = sequences.first().map(Vec::len).unwrap_or(0);
        if len == 0 || sequences.iter().any(|s| s.len() != len) {
            return Err(Error::Config(
                "every cell sequence must be non-empty and of equal length".into(),
            ));
        }
        if let Some(bad) = cell_sequence.iter().find(|&&s| s >= sequences.len()) {
            return Err(Error::Config(format!(
                "cell references missing sequence {bad}"
            )));
        }
        Ok(Self {
            sequences,
            cell_sequence,
            control_rate,
        })
    }

    pub fn control_rate(&self) -> T {
        self.control_rate
    }

    pub fn cell_count(&self) -> usize {
        self.cell_sequence.len()
    }

    /// Samples per cell.
    pub fn len(&self) -> usize {
        self.sequences[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.len()) / self.control_rate
    }

    pub fn cell(&self, cell: usize) -> Option<&[ReflectionCoefficient<T>]> {
        self.cell_sequence
            .get(cell)
            .map(|&s| self.sequences[s].as_slice())
    }

    pub fn sequences(&self) -> &[Vec<ReflectionCoefficient<T>>] {
        &self.sequences
    }

    pub fn sequence_index(&self, cell: usize) -> Option<usize> {
        self.cell_sequence.get(cell).copied()
    }

    /// Cells grouped by the sequence they play, in sequence order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.sequences.len()];
        for (cell, &s) in self.cell_sequence.iter().enumerate() {
            groups[s].push(cell);
        }
        groups
    }

    /// Zero-order-hold upsampling to `target_rate`, which must be an integer
    /// multiple of the control rate.
    pub fn resample_hold(&self, target_rate: T) -> Result<Self> {
        let ratio = integer_ratio(target_rate, self.control_rate).ok_or_else(|| {
            Error::Config(format!(
                "target rate {target_rate} Hz is not an integer multiple of control rate {} Hz",
                self.control_rate
            ))
        })?;
        let sequences = self
            .sequences
            .iter()
            .map(|seq| {
                seq.iter()
                    .flat_map(|c| std::iter::repeat_n(*c, ratio))
                    .collect()
            })
            .collect();
        Ok(Self {
            sequences,
            cell_sequence: self.cell_sequence.clone(),
            control_rate: target_rate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rc(a: f64, p: f64) -> ReflectionCoefficient<f64> {
        ReflectionCoefficient::new(a, p).unwrap()
    }

    #[test]
    fn coefficient_invariants() {
        assert!(ReflectionCoefficient::new(1.5, 0.0).is_err());
        assert!(ReflectionCoefficient::new(-0.1, 0.0).is_err());
        assert!((rc(1.0, -PI / 2.0).phase() - 1.5 * PI).abs() < 1e-15);
        let z = Complex::new(0.6, -0.8);
        let c = ReflectionCoefficient::from_complex(z).unwrap();
        assert!((c.to_complex() - z).norm() < 1e-15);
        assert!(ReflectionCoefficient::from_complex(Complex::new(1.1, 0.0)).is_err());
    }

    #[test]
    fn resample_identity() {
        let s =
            CoefficientSchedule::from_cells(vec![vec![rc(1.0, 0.0), rc(0.5, 1.0)]], 100e6).unwrap();
        assert_eq!(s.resample_hold(100e6).unwrap(), s);
    }

    #[test]
    fn resample_doubles() {
        let s =
            CoefficientSchedule::from_cells(vec![vec![rc(1.0, 0.0), rc(0.5, 1.0)]], 100e6).unwrap();
        let r = s.resample_hold(200e6).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r.control_rate(), 200e6);
        assert_eq!(
            r.cell(0).unwrap(),
            &[rc(1.0, 0.0), rc(1.0, 0.0), rc(0.5, 1.0), rc(0.5, 1.0)]
        );
    }

    #[test]
    fn resample_staircase_plateaus() {
        let seq: Vec<_> = (0..20)
            .map(|k| rc(1.0, 2.0 * PI * k as f64 / 20.0))
            .collect();
        let s = CoefficientSchedule::broadcast(seq.clone(), 3, 100e6).unwrap();
        let r = s.resample_hold(400e6).unwrap();
        assert_eq!(r.len(), 80);
        let cell = r.cell(2).unwrap();
        for (k, c) in cell.iter().enumerate() {
            assert_eq!(*c, seq[k / 4]);
        }
        assert!((r.duration() - s.duration()).abs() < 1e-20);
    }

    #[test]
    fn resample_rejects_fraction() {
        let s = CoefficientSchedule::from_cells(vec![vec![rc(1.0, 0.0)]], 100e6).unwrap();
        assert!(matches!(s.resample_hold(150e6), Err(Error::Config(_))));
        assert!(matches!(s.resample_hold(50e6), Err(Error::Config(_))));
    }

    #[test]
    fn schedule_shape_checks() {
        assert!(CoefficientSchedule::from_cells(vec![vec![rc(1.0, 0.0)], vec![]], 1.0).is_err());
        assert!(CoefficientSchedule::from_cells(vec![vec![rc(1.0, 0.0)]], 0.0).is_err());
        assert!(CoefficientSchedule::shared(vec![vec![rc(1.0, 0.0)]], vec![0, 1], 1.0).is_err());
        let s = CoefficientSchedule::shared(
            vec![vec![rc(1.0, 0.0)], vec![rc(1.0, PI)]],
            vec![0, 1, 1, 0],
            1.0,
        )
        .unwrap();
        assert_eq!(s.groups(), vec![vec![0, 3], vec![1, 2]]);
        assert_eq!(s.cell(2).unwrap()[0], rc(1.0, PI));
    }
}
