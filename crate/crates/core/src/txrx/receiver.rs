use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::ComplexEnvelope;
use crate::scalar::{integer_ratio, Scalar};

use super::frame::{FramePayload, FrameSpec};
use super::linalg::CMatrix;
use super::metrics::{ber, evm};
use super::modulation::{demap_symbols, ModulationScheme};

#[derive(Debug, Clone, PartialEq)]
pub struct StreamMetrics<T> {
    pub evm_percent: T,
    pub ber: f64,
}

/// Outcome of one received frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport<T> {
    /// Zero-forced payload symbols, per stream.
    pub detected: Vec<Vec<Complex<T>>>,
    pub reference: Vec<Vec<Complex<T>>>,
    pub detected_bits: Vec<Vec<bool>>,
    /// Over all streams.
    pub evm_percent: T,
    pub ber: f64,
    pub per_stream: Vec<StreamMetrics<T>>,
    /// Antennas × streams.
    pub channel_estimate: CMatrix<T>,
    pub condition_number: f64,
    /// Tags of spectra recorded alongside this frame.
    pub spectra: Vec<String>,
}

/// Largest condition number the detector accepts, `1/√ε` of the scalar type.
fn max_condition<T: Scalar>() -> f64 {
    1.0 / T::epsilon().to_f64().unwrap_or(f64::EPSILON).sqrt()
}

/// Runs the receive chain on frame-aligned antenna envelopes.
///
/// Steps: derotate by `expected_shift` (Hz, the translation the signal has
/// undergone), average each symbol interval, estimate `H` by least squares on
/// the pilot block, detect the payload with `(HᴴH)⁻¹Hᴴ`, demap, and score
/// against `reference`.
pub fn receive_frame<T: Scalar>(
    rx: &[ComplexEnvelope<T>],
    frame: &FrameSpec<T>,
    scheme: ModulationScheme,
    expected_shift: T,
    reference: &FramePayload<T>,
) -> Result<LinkReport<T>> {
    let streams = frame.streams();
    let first = rx
        .first()
        .ok_or_else(|| Error::Contract("receive_frame needs at least one antenna".into()))?;
    if rx.len() < streams {
        return Err(Error::Contract(format!(
            "{} antennas cannot separate {streams} streams",
            rx.len()
        )));
    }
    if let Some(bad) = rx
        .iter()
        .position(|e| e.len() != first.len() || !first.same_timebase(e))
    {
        return Err(Error::Contract(format!(
            "antenna {bad} is not aligned with antenna 0"
        )));
    }
    if reference.symbols.len() != streams || reference.bits.len() != streams {
        return Err(Error::Framing(format!(
            "reference does not hold {streams} streams"
        )));
    }
    let sps = integer_ratio(first.sample_rate(), frame.symbol_rate()).ok_or_else(|| {
        Error::Config(format!(
            "envelope rate {} Hz is not an integer multiple of symbol rate {} Bd",
            first.sample_rate(),
            frame.symbol_rate()
        ))
    })?;
    let frame_len = frame.frame_length();
    if first.len() < frame_len * sps {
        return Err(Error::Framing(format!(
            "{} samples cannot hold a {frame_len}-symbol frame at {sps} samples per symbol",
            first.len()
        )));
    }

    // (1)+(2): derotate and integrate-and-dump
    let cycles_per_sample = expected_shift / first.sample_rate();
    let inv_sps = T::one() / T::from_usize_lossy(sps);
    let integrated: Vec<Vec<Complex<T>>> = rx
        .iter()
        .map(|env| {
            let s = env.samples();
            (0..frame_len)
                .map(|j| {
                    let acc = (j * sps..(j + 1) * sps).fold(
                        Complex::new(T::zero(), T::zero()),
                        |acc, k| {
                            let x = if expected_shift == T::zero() {
                                s[k]
                            } else {
                                let turns = (T::from_usize_lossy(k) * cycles_per_sample).fract();
                                s[k] * Complex::from_polar(T::one(), -T::two_pi() * turns)
                            };
                            acc + x
                        },
                    );
                    acc * inv_sps
                })
                .collect()
        })
        .collect();

    // (3): least squares on the pilot block, H = Y Xᴴ (X Xᴴ)⁻¹
    let pilot_len = frame.pilot_length();
    let pilots = CMatrix::from_rows(
        &frame
            .pilots()
            .iter()
            .map(|row| row.iter().map(|&p| Complex::new(p, T::zero())).collect())
            .collect::<Vec<_>>(),
    );
    let pilot_cond = pilots.adjoint().condition_number();
    if pilot_cond > max_condition::<T>() {
        return Err(Error::Detection {
            message: "pilot matrix is rank-deficient".into(),
            condition_number: pilot_cond,
        });
    }
    let received_pilots = CMatrix::from_rows(
        &integrated
            .iter()
            .map(|a| a[..pilot_len].to_vec())
            .collect::<Vec<_>>(),
    );
    let pilots_h = pilots.adjoint();
    let gram_inv = (&pilots * &pilots_h)
        .inverse()
        .ok_or_else(|| Error::Detection {
            message: "pilot Gram matrix is singular".into(),
            condition_number: f64::INFINITY,
        })?;
    let estimate = &(&received_pilots * &pilots_h) * &gram_inv;

    // (4): zero forcing
    let condition_number = estimate.condition_number();
    if !(condition_number <= max_condition::<T>()) {
        return Err(Error::Detection {
            message: "estimated channel is rank-deficient".into(),
            condition_number,
        });
    }
    let estimate_h = estimate.adjoint();
    let normal_inv = (&estimate_h * &estimate)
        .inverse()
        .ok_or_else(|| Error::Detection {
            message: "estimated channel is singular".into(),
            condition_number,
        })?;
    let zf = &normal_inv * &estimate_h;
    let mut detected = vec![Vec::with_capacity(frame.payload_length()); streams];
    for j in pilot_len..frame_len {
        let y: Vec<Complex<T>> = integrated.iter().map(|a| a[j]).collect();
        for (s, x) in zf.mul_vec(&y).into_iter().enumerate() {
            detected[s].push(x);
        }
    }

    // (5)+(6): demap and score
    let detected_bits: Vec<Vec<bool>> = detected.iter().map(|d| demap_symbols(d, scheme)).collect();
    let per_stream = (0..streams)
        .map(|s| {
            Ok(StreamMetrics {
                evm_percent: evm(&detected[s], &reference.symbols[s])?,
                ber: ber(&detected_bits[s], &reference.bits[s])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_detected: Vec<Complex<T>> = detected.iter().flatten().copied().collect();
    let all_reference: Vec<Complex<T>> = reference.symbols.iter().flatten().copied().collect();
    let all_bits: Vec<bool> = detected_bits.iter().flatten().copied().collect();
    let all_ref_bits: Vec<bool> = reference.bits.iter().flatten().copied().collect();

    Ok(LinkReport {
        evm_percent: evm(&all_detected, &all_reference)?,
        ber: ber(&all_bits, &all_ref_bits)?,
        detected,
        reference: reference.symbols.clone(),
        detected_bits,
        per_stream,
        channel_estimate: estimate,
        condition_number,
        spectra: Vec::new(),
    })
}
