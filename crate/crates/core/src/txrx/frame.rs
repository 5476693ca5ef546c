use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metasurface::{quantize, QuantizationModel};
use crate::model::{CoefficientSchedule, ComplexEnvelope, ReflectionCoefficient, SurfaceGeometry};
use crate::scalar::{integer_ratio, Scalar};

use super::modulation::{map_bits, ModulationScheme};

/// Assignment of every cell to exactly one stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePartition {
    assignment: Vec<usize>,
    streams: usize,
}

impl SurfacePartition {
    pub fn new(assignment: Vec<usize>, streams: usize) -> Result<Self> {
        if streams == 0 || assignment.is_empty() {
            return Err(Error::Config(
                "partition needs at least one stream and one cell".into(),
            ));
        }
        let mut used = vec![false; streams];
        for (cell, &s) in assignment.iter().enumerate() {
            if s >= streams {
                return Err(Error::Config(format!(
                    "cell {cell} assigned to missing stream {s}"
                )));
            }
            used[s] = true;
        }
        if let Some(empty) = used.iter().position(|u| !u) {
            return Err(Error::Config(format!("stream {empty} has no cells")));
        }
        Ok(Self {
            assignment,
            streams,
        })
    }

    /// Every cell on one stream.
    pub fn single(cells: usize) -> Result<Self> {
        Self::new(vec![0; cells], 1)
    }

    /// Contiguous column bands, left to right. Two bands give the left/right
    /// halves split.
    pub fn column_bands<T: Scalar>(geometry: &SurfaceGeometry<T>, streams: usize) -> Result<Self> {
        let cols = geometry.cols();
        if streams == 0 || streams > cols {
            return Err(Error::Config(format!(
                "cannot split {cols} columns into {streams} streams"
            )));
        }
        let assignment = (0..geometry.cell_count())
            .map(|i| geometry.cell_coords(i).1 * streams / cols)
            .collect();
        Self::new(assignment, streams)
    }

    pub fn halves<T: Scalar>(geometry: &SurfaceGeometry<T>) -> Result<Self> {
        Self::column_bands(geometry, 2)
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    pub fn cell_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn stream_of(&self, cell: usize) -> usize {
        self.assignment[cell]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cells_of(&self, stream: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == stream)
            .map(|(c, _)| c)
            .collect()
    }
}

/// `streams` orthogonal ±1 rows drawn from a Sylvester Hadamard matrix of
/// order `K = next_pow2(streams)`, tiled to the shortest multiple of `K` that
/// is at least `4 × streams`.
pub fn hadamard_pilots<T: Scalar>(streams: usize) -> Vec<Vec<T>> {
    let k = streams.next_power_of_two();
    let len = (4 * streams).div_ceil(k) * k;
    (0..streams)
        .map(|s| {
            (0..len)
                .map(|j| {
                    if (s & (j % k)).count_ones().is_multiple_of(2) {
                        T::one()
                    } else {
                        -T::one()
                    }
                })
                .collect()
        })
        .collect()
}

/// Frame layout shared by transmitter and receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec<T> {
    streams: usize,
    payload_length: usize,
    symbol_rate: T,
    samples_per_symbol: usize,
    pilots: Vec<Vec<T>>,
}

impl<T: Scalar> FrameSpec<T> {
    /// `control_rate` must be an integer multiple of `symbol_rate`.
    pub fn new(
        streams: usize,
        payload_length: usize,
        symbol_rate: T,
        control_rate: T,
    ) -> Result<Self> {
        if streams == 0 {
            return Err(Error::Config("frame needs at least one stream".into()));
        }
        if payload_length == 0 {
            return Err(Error::Config(
                "frame payload must hold at least one symbol".into(),
            ));
        }
        if !(symbol_rate.is_finite() && symbol_rate > T::zero()) {
            return Err(Error::Config(format!(
                "symbol rate must be > 0, got {symbol_rate}"
            )));
        }
        let samples_per_symbol = integer_ratio(control_rate, symbol_rate).ok_or_else(|| {
            Error::Config(format!(
                "control rate {control_rate} Hz is not an integer multiple of symbol rate {symbol_rate} Bd"
            ))
        })?;
        Ok(Self {
            streams,
            payload_length,
            symbol_rate,
            samples_per_symbol,
            pilots: hadamard_pilots(streams),
        })
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    pub fn payload_length(&self) -> usize {
        self.payload_length
    }

    pub fn symbol_rate(&self) -> T {
        self.symbol_rate
    }

    /// Control samples per symbol.
    pub fn samples_per_symbol(&self) -> usize {
        self.samples_per_symbol
    }

    pub fn control_rate(&self) -> T {
        self.symbol_rate * T::from_usize_lossy(self.samples_per_symbol)
    }

    pub fn pilots(&self) -> &[Vec<T>] {
        &self.pilots
    }

    pub fn pilot_length(&self) -> usize {
        self.pilots[0].len()
    }

    /// Pilot plus payload symbols per stream.
    pub fn frame_length(&self) -> usize {
        self.pilot_length() + self.payload_length
    }

    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.frame_length()) / self.symbol_rate
    }

    /// Raw bit rate over all streams.
    pub fn bit_rate(&self, scheme: ModulationScheme) -> T {
        self.symbol_rate * T::from_usize_lossy(self.streams * scheme.bits_per_symbol())
    }

    /// Prepends the pilot block to each stream's payload.
    pub fn frame_symbols(&self, payload: &[Vec<Complex<T>>]) -> Result<Vec<Vec<Complex<T>>>> {
        if payload.len() != self.streams {
            return Err(Error::Framing(format!(
                "{} payload streams for a {}-stream frame",
                payload.len(),
                self.streams
            )));
        }
        if let Some(bad) = payload.iter().position(|p| p.len() != self.payload_length) {
            return Err(Error::Framing(format!(
                "stream {bad} carries {} symbols, frame expects {}",
                payload[bad].len(),
                self.payload_length
            )));
        }
        Ok(self
            .pilots
            .iter()
            .zip(payload)
            .map(|(pilot, data)| {
                pilot
                    .iter()
                    .map(|&p| Complex::new(p, T::zero()))
                    .chain(data.iter().copied())
                    .collect()
            })
            .collect())
    }
}

/// Per-stream payload bits and the symbols they map to.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePayload<T> {
    pub bits: Vec<Vec<bool>>,
    pub symbols: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> FramePayload<T> {
    pub fn from_bits(bits: Vec<Vec<bool>>, scheme: ModulationScheme) -> Result<Self> {
        let symbols = bits
            .iter()
            .map(|b| map_bits(b, scheme))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bits, symbols })
    }

    /// Uniform random bits from a seeded ChaCha stream.
    pub fn random(frame: &FrameSpec<T>, scheme: ModulationScheme, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = frame.payload_length() * scheme.bits_per_symbol();
        let bits = (0..frame.streams())
            .map(|_| (0..n).map(|_| rng.random::<bool>()).collect())
            .collect();
        Self::from_bits(bits, scheme)
    }
}

/// Maps per-stream payload symbols onto the surface: every cell of stream
/// `s` holds `(|x|, arg x)` of the current symbol of `s` for
/// `samples_per_symbol` control samples, after quantisation. Pilots go first.
pub fn symbols_to_schedule<T: Scalar>(
    symbols: &[Vec<Complex<T>>],
    partition: &SurfacePartition,
    frame: &FrameSpec<T>,
    quant: &QuantizationModel<T>,
) -> Result<CoefficientSchedule<T>> {
    if partition.streams() != frame.streams() {
        return Err(Error::Framing(format!(
            "partition has {} streams, frame has {}",
            partition.streams(),
            frame.streams()
        )));
    }
    let framed = frame.frame_symbols(symbols)?;
    let hold = frame.samples_per_symbol();
    let sequences = framed
        .iter()
        .map(|stream| {
            let mut seq = Vec::with_capacity(stream.len() * hold);
            for z in stream {
                let c = quantize(&ReflectionCoefficient::from_complex(*z)?, quant);
                seq.extend(std::iter::repeat_n(c, hold));
            }
            Ok(seq)
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientSchedule::shared(
        sequences,
        partition.assignment().to_vec(),
        frame.control_rate(),
    )
}

/// Rectangular-pulse waveform of a symbol sequence, as radiated by a
/// conventional transmitter.
pub fn conventional_waveform<T: Scalar>(
    symbols: &[Complex<T>],
    symbol_rate: T,
    sample_rate: T,
    carrier_freq: T,
) -> Result<ComplexEnvelope<T>> {
    let sps = integer_ratio(sample_rate, symbol_rate).ok_or_else(|| {
        Error::Config(format!(
            "sample rate {sample_rate} Hz is not an integer multiple of symbol rate {symbol_rate} Bd"
        ))
    })?;
    let samples = symbols
        .iter()
        .flat_map(|z| std::iter::repeat_n(*z, sps))
        .collect();
    ComplexEnvelope::new(samples, sample_rate, carrier_freq, T::zero())
}

/// Expands a stream-level channel `h[point][stream]` into per-cell gains
/// `obs[cell][point] = h[point][stream(cell)] / |cells in stream|`, so the
/// cells of one stream add up to exactly `h`.
pub fn expand_stream_matrix<T: Scalar>(
    h: &[Vec<Complex<T>>],
    partition: &SurfacePartition,
) -> Result<Vec<Vec<Complex<T>>>> {
    let streams = partition.streams();
    if let Some(bad) = h.iter().position(|row| row.len() != streams) {
        return Err(Error::Config(format!(
            "channel row {bad} has {} entries, partition has {streams} streams",
            h[bad].len()
        )));
    }
    let counts: Vec<T> = (0..streams)
        .map(|s| T::from_usize_lossy(partition.cells_of(s).len()))
        .collect();
    Ok((0..partition.cell_count())
        .map(|c| {
            let s = partition.stream_of(c);
            h.iter().map(|row| row[s] / counts[s]).collect()
        })
        .collect())
}
