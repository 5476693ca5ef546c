//! Scenario execution: builds the core pipeline from a [`Scenario`] and runs
//! each surface segment.

use metasim_core::metasurface::{broadcast_staircase, continuous_ramp_schedule, quantize};
use metasim_core::propagation::{build_channels, observe};
use metasim_core::spectral::{fold_frequency, line_power, periodogram, staircase_harmonics};
use metasim_core::txrx::{conventional_waveform, receive_frame, symbols_to_schedule};
use metasim_core::{
    Channels, Envelope, Error, Frame, ModulationScheme, NoiseSpec, Payload, PointRole,
    PowerSpectrum, Quantization, Report, Schedule, SurfacePartition,
};

use crate::scenario::{InputKind, Mode, RampConfig, Scenario};

/// Noise stream of the receive-mode segment; transmit-side points use `1 + p`.
const RX_NOISE_STREAM: u64 = 1000;
/// Decorrelates the receive-mode payload from the transmit payload.
const RX_PAYLOAD_SALT: u64 = 0x5258_5041_594c_4f41;
const DEFAULT_DFT_LENGTH: usize = 65_536;
/// Harmonic table spans `q = 1 + mL` for `|m| <= HARMONIC_ORDERS`.
const HARMONIC_ORDERS: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceMode {
    /// Surface coefficients carry data on an air-fed carrier.
    Transmit,
    /// Surface runs the phase ramp and translates an incident wave.
    Receive,
}

impl SurfaceMode {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceMode::Transmit => "transmit",
            SurfaceMode::Receive => "receive",
        }
    }
}

/// Tone line measurements of a down-conversion segment.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSummary {
    pub input_offset_hz: f64,
    pub expected_shift_hz: f64,
    pub expected_line_hz: f64,
    pub dominant_line_hz: f64,
    pub measured_shift_hz: f64,
    pub bin_exact: bool,
    /// Desired-line power over total output power.
    pub desired_fraction: f64,
    pub predicted_fraction: f64,
    pub resolution_hz: f64,
}

impl LineSummary {
    pub fn fraction_relative_error(&self) -> f64 {
        (self.desired_fraction - self.predicted_fraction).abs() / self.predicted_fraction
    }
}

/// One row of the harmonic table; powers are fractions of total output power.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicRow {
    pub q: i64,
    /// Line position relative to the carrier, folded into the Nyquist band.
    pub offset_hz: f64,
    pub predicted: f64,
    pub measured: Option<f64>,
}

/// Envelope seen at one observation point.
#[derive(Debug, Clone)]
pub struct Observation {
    pub label: String,
    pub role: PointRole,
    pub envelope: Envelope,
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub tag: String,
    pub surface_mode: SurfaceMode,
    pub start_s: f64,
    /// Carrier (transmit) or incident wave (receive).
    pub input: Envelope,
    pub observations: Vec<Observation>,
    pub scheme: Option<ModulationScheme>,
    pub frame: Option<Frame>,
    pub report: Option<Report>,
    pub spectra: Vec<(String, PowerSpectrum)>,
    pub line: Option<LineSummary>,
    pub harmonics: Vec<HarmonicRow>,
}

impl Segment {
    pub fn duration_s(&self) -> f64 {
        self.input.duration()
    }
}

/// Everything a scenario run produced, before serialisation.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub scenario: Scenario,
    pub segments: Vec<Segment>,
}

impl Simulation {
    /// First segment that detected a frame.
    pub fn link(&self) -> Option<&Report> {
        self.segments.iter().find_map(|s| s.report.as_ref())
    }

    pub fn segment(&self, tag: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.tag == tag)
    }
}

/// Runs a validated scenario. No files are touched.
pub fn simulate(scenario: &Scenario) -> metasim_core::Result<Simulation> {
    let ctx = Context::new(scenario)?;
    let segments = match scenario.mode {
        Mode::TransmitLink => vec![ctx.transmit_segment(0.0)?],
        Mode::SpaceDownConversion => vec![ctx.down_conversion_segment()?],
        Mode::Integrated => {
            let tx = ctx.transmit_segment(0.0)?;
            let rx = ctx.receive_frame_segment("rx", tx.duration_s())?;
            vec![tx, rx]
        }
    };
    Ok(Simulation {
        scenario: scenario.clone(),
        segments,
    })
}

/// Illuminates the surface with `input` from the feed side and observes it at
/// every observation point of the scenario, in point order.
pub fn observe_points(
    scenario: &Scenario,
    input: &Envelope,
    schedule: &Schedule,
) -> metasim_core::Result<Vec<Envelope>> {
    let ctx = Context::new(scenario)?;
    ctx.observe_all(input, schedule)
}

struct Context<'a> {
    s: &'a Scenario,
    cells: usize,
    fs: f64,
    partition: Option<SurfacePartition>,
    channels: Channels,
    observers: Vec<PointRole>,
    quant: Quantization,
    scheme: Option<ModulationScheme>,
}

impl<'a> Context<'a> {
    fn new(s: &'a Scenario) -> metasim_core::Result<Self> {
        let geometry = s.geometry()?;
        let points = s.points();
        let partition = s.partition(&geometry)?;
        let channel = s.channel(partition.as_ref())?;
        let channels = build_channels(&geometry, &points, &channel)?;
        Ok(Self {
            s,
            cells: geometry.cell_count(),
            fs: s.sample_rate_hz(),
            partition,
            channels,
            observers: points
                .observation_points()
                .into_iter()
                .map(|(_, r)| r)
                .collect(),
            quant: s.quantization()?,
            scheme: s.modulation()?,
        })
    }

    fn scheme(&self) -> metasim_core::Result<ModulationScheme> {
        self.scheme
            .ok_or_else(|| Error::Config("modulation is required to send a frame".into()))
    }

    fn noise(&self, stream: u64) -> NoiseSpec<f64> {
        NoiseSpec::new(self.s.noise_variance, self.s.rng_seed, stream)
    }

    fn observe_all(
        &self,
        input: &Envelope,
        schedule: &Schedule,
    ) -> metasim_core::Result<Vec<Envelope>> {
        (0..self.observers.len())
            .map(|p| {
                observe(
                    input,
                    schedule,
                    self.channels.feed_gains(),
                    self.channels.point_gains(p),
                    &self.noise(1 + p as u64),
                )
            })
            .collect()
    }

    fn labelled(&self, envelopes: Vec<Envelope>) -> Vec<Observation> {
        let mut receive = 0;
        let mut probe = 0;
        envelopes
            .into_iter()
            .zip(&self.observers)
            .map(|(envelope, &role)| {
                let label = if role == PointRole::Probe {
                    probe += 1;
                    format!("probe{}", probe - 1)
                } else {
                    receive += 1;
                    format!("rx{}", receive - 1)
                };
                Observation {
                    label,
                    role,
                    envelope,
                }
            })
            .collect()
    }

    fn dft_length(&self, len: usize) -> usize {
        self.s
            .spectrum_dft_length
            .unwrap_or(DEFAULT_DFT_LENGTH)
            .min(len)
    }

    fn spectra(
        &self,
        tag: &str,
        observations: &[Observation],
    ) -> metasim_core::Result<Vec<(String, PowerSpectrum)>> {
        observations
            .iter()
            .map(|o| {
                let n = self.dft_length(o.envelope.len());
                Ok((format!("{tag}_{}", o.label), periodogram(&o.envelope, n)?))
            })
            .collect()
    }

    fn receive_envelopes(observations: &[Observation]) -> Vec<Envelope> {
        observations
            .iter()
            .filter(|o| o.role == PointRole::Receive)
            .map(|o| o.envelope.clone())
            .collect()
    }

    /// Surface modulates an unmodulated carrier with the frame symbols.
    fn transmit_segment(&self, start_s: f64) -> metasim_core::Result<Segment> {
        let scheme = self.scheme()?;
        let partition = self
            .partition
            .as_ref()
            .ok_or_else(|| Error::Config("partition is required to transmit".into()))?;
        let frame = self
            .s
            .frame(partition.streams())?
            .ok_or_else(|| Error::Config("frame is required to transmit".into()))?;
        let payload = Payload::random(&frame, scheme, self.s.rng_seed)?;
        let schedule = symbols_to_schedule(&payload.symbols, partition, &frame, &self.quant)?;
        let carrier = Envelope::tone(
            0.0,
            1.0,
            self.fs,
            self.s.carrier_freq_hz,
            schedule.len() * self.s.oversampling,
        )?
        .with_t0(start_s);
        let observations = self.labelled(self.observe_all(&carrier, &schedule)?);
        let spectra = self.spectra("tx", &observations)?;
        let mut report = receive_frame(
            &Self::receive_envelopes(&observations),
            &frame,
            scheme,
            0.0,
            &payload,
        )?;
        report.spectra = spectra.iter().map(|(t, _)| t.clone()).collect();
        Ok(Segment {
            tag: "tx".into(),
            surface_mode: SurfaceMode::Transmit,
            start_s,
            input: carrier,
            observations,
            scheme: Some(scheme),
            frame: Some(frame),
            report: Some(report),
            spectra,
            line: None,
            harmonics: Vec::new(),
        })
    }

    /// Phase ramp over the whole surface for an envelope of `len` samples.
    fn ramp_schedule(&self, len: usize) -> metasim_core::Result<Schedule> {
        let cfg = self
            .s
            .staircase
            .as_ref()
            .ok_or_else(|| Error::Config("staircase is required in receive mode".into()))?;
        let spec = self.s.staircase()?.expect("checked above");
        let schedule = match cfg.ramp {
            RampConfig::Staircase => {
                if !len.is_multiple_of(self.s.oversampling) {
                    return Err(Error::Contract(format!(
                        "{len} samples is not a whole number of control samples"
                    )));
                }
                let duration = (len / self.s.oversampling) as f64 / self.s.control_rate_hz;
                broadcast_staircase(&spec, self.s.control_rate_hz, duration, self.cells)?
            }
            RampConfig::Continuous => continuous_ramp_schedule(
                spec.period(),
                spec.direction(),
                spec.amplitude(),
                self.fs,
                len,
                self.cells,
            )?,
        };
        quantized(&schedule, &self.quant)
    }

    fn shift_hz(&self) -> metasim_core::Result<f64> {
        Ok(self.s.staircase()?.map(|s| s.shift_hz()).unwrap_or(0.0))
    }

    fn down_conversion_segment(&self) -> metasim_core::Result<Segment> {
        let input = self
            .s
            .input
            .as_ref()
            .ok_or_else(|| Error::Config("input is required for down-conversion".into()))?;
        match input.kind {
            InputKind::Frame => self.receive_frame_segment("sdc", 0.0),
            InputKind::Tone => {
                let duration = input
                    .duration_s
                    .ok_or_else(|| Error::Config("tone input needs duration_s".into()))?;
                let len =
                    (duration * self.s.control_rate_hz).round() as usize * self.s.oversampling;
                let tone = Envelope::tone(
                    input.offset_hz,
                    input.amplitude,
                    self.fs,
                    self.s.carrier_freq_hz,
                    len,
                )?;
                let schedule = self.ramp_schedule(len)?;
                let observations = self.labelled(self.observe_all(&tone, &schedule)?);
                let mut spectra = vec![(
                    "sdc_input".to_string(),
                    periodogram(&tone, self.dft_length(len))?,
                )];
                spectra.extend(self.spectra("sdc", &observations)?);
                let (line, harmonics) = match spectra.get(1) {
                    Some((_, spectrum)) => {
                        let (line, table) = self.tone_lines(spectrum, input.offset_hz)?;
                        (Some(line), table)
                    }
                    None => (None, Vec::new()),
                };
                Ok(Segment {
                    tag: "sdc".into(),
                    surface_mode: SurfaceMode::Receive,
                    start_s: 0.0,
                    input: tone,
                    observations,
                    scheme: None,
                    frame: None,
                    report: None,
                    spectra,
                    line,
                    harmonics,
                })
            }
        }
    }

    /// Powers of the staircase lines predicted for the configured ramp,
    /// as `(q, fraction of total power)`.
    fn predicted_lines(&self) -> metasim_core::Result<Vec<(i64, f64)>> {
        let cfg = self.s.staircase.as_ref().expect("receive mode has a ramp");
        Ok(match cfg.ramp {
            RampConfig::Continuous => vec![(1, 1.0)],
            RampConfig::Staircase => {
                let l = cfg.steps_per_period as i64;
                let qs: Vec<i64> = (-HARMONIC_ORDERS..=HARMONIC_ORDERS)
                    .map(|m| 1 + m * l)
                    .collect();
                let amps = staircase_harmonics::<f64>(cfg.steps_per_period, &qs)?;
                qs.into_iter().zip(amps).map(|(q, a)| (q, a * a)).collect()
            }
        })
    }

    fn tone_lines(
        &self,
        spectrum: &PowerSpectrum,
        offset_hz: f64,
    ) -> metasim_core::Result<(LineSummary, Vec<HarmonicRow>)> {
        let shift = self.shift_hz()?;
        let total = spectrum.total_power();
        let expected = fold_frequency(offset_hz + shift, self.fs);
        let (dominant, _) = spectrum.strongest_line();
        let bin_exact = spectrum.bin_of(expected).ok() == spectrum.bin_of(dominant).ok();
        let predicted = self.predicted_lines()?;
        let predicted_fraction = predicted
            .iter()
            .find(|(q, _)| *q == 1)
            .map(|(_, p)| *p)
            .unwrap_or(1.0);
        let line = LineSummary {
            input_offset_hz: offset_hz,
            expected_shift_hz: shift,
            expected_line_hz: expected,
            dominant_line_hz: dominant,
            measured_shift_hz: dominant - offset_hz,
            bin_exact,
            desired_fraction: line_power(spectrum, expected)? / total,
            predicted_fraction,
            resolution_hz: spectrum.resolution(),
        };
        let table = predicted
            .into_iter()
            .map(|(q, p)| {
                let f = fold_frequency(offset_hz + q as f64 * shift, self.fs);
                HarmonicRow {
                    q,
                    offset_hz: f,
                    predicted: p,
                    measured: line_power(spectrum, f).ok().map(|m| m / total),
                }
            })
            .collect();
        Ok((line, table))
    }

    /// A single-stream frame from a remote transmitter, translated by the
    /// ramp and detected at the receiving end.
    ///
    /// In down-conversion mode the wave arrives from the feed side and is
    /// observed at the receive points. In integrated mode the roles swap by
    /// reciprocity: the first receive point transmits and the feed receives.
    fn receive_frame_segment(&self, tag: &str, start_s: f64) -> metasim_core::Result<Segment> {
        let scheme = self.scheme()?;
        let frame = self
            .s
            .frame(1)?
            .ok_or_else(|| Error::Config("frame is required to send a frame".into()))?;
        let payload = Payload::random(&frame, scheme, self.s.rng_seed ^ RX_PAYLOAD_SALT)?;
        let symbols = frame.frame_symbols(&payload.symbols)?;
        let wave = conventional_waveform(
            &symbols[0],
            frame.symbol_rate(),
            self.fs,
            self.s.carrier_freq_hz,
        )?
        .with_t0(start_s);
        let schedule = self.ramp_schedule(wave.len())?;
        let shift = self.shift_hz()?;

        let observations = if self.s.mode == Mode::Integrated {
            let remote = self
                .observers
                .iter()
                .position(|r| *r == PointRole::Receive)
                .ok_or_else(|| Error::Config("integrated mode needs a receive point".into()))?;
            let noise = self.noise(RX_NOISE_STREAM);
            let env = observe(
                &wave,
                &schedule,
                self.channels.point_gains(remote),
                self.channels.feed_gains(),
                &noise,
            )?;
            vec![Observation {
                label: "feed".into(),
                role: PointRole::Receive,
                envelope: env,
            }]
        } else {
            self.labelled(self.observe_all(&wave, &schedule)?)
        };
        let spectra = self.spectra(tag, &observations)?;
        let mut report = receive_frame(
            &Self::receive_envelopes(&observations),
            &frame,
            scheme,
            shift,
            &payload,
        )?;
        report.spectra = spectra.iter().map(|(t, _)| t.clone()).collect();
        let harmonics = self
            .predicted_lines()?
            .into_iter()
            .map(|(q, p)| HarmonicRow {
                q,
                offset_hz: fold_frequency(q as f64 * shift, self.fs),
                predicted: p,
                measured: None,
            })
            .collect();
        Ok(Segment {
            tag: tag.into(),
            surface_mode: SurfaceMode::Receive,
            start_s,
            input: wave,
            observations,
            scheme: Some(scheme),
            frame: Some(frame),
            report: Some(report),
            spectra,
            line: None,
            harmonics,
        })
    }
}

/// Applies finite-resolution control to every stored sequence.
fn quantized(schedule: &Schedule, quant: &Quantization) -> metasim_core::Result<Schedule> {
    if quant.is_continuous() {
        return Ok(schedule.clone());
    }
    let sequences = schedule
        .sequences()
        .iter()
        .map(|seq| seq.iter().map(|c| quantize(c, quant)).collect())
        .collect();
    let map = (0..schedule.cell_count())
        .map(|c| schedule.sequence_index(c).expect("cell in range"))
        .collect();
    Schedule::shared(sequences, map, schedule.control_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use metasim_core::Coefficient;

    #[test]
    fn quantized_keeps_sharing() {
        let seq = vec![
            Coefficient::new(0.8, 0.1).unwrap(),
            Coefficient::new(0.3, 3.0).unwrap(),
        ];
        let sched = Schedule::broadcast(seq, 4, 1e6).unwrap();
        let q = quantized(&sched, &Quantization::new(Some(2), Some(1), 0.0).unwrap()).unwrap();
        assert_eq!(q.sequences().len(), 1);
        assert_eq!(q.cell_count(), 4);
        let phases: Vec<f64> = q.cell(3).unwrap().iter().map(|c| c.phase()).collect();
        assert_eq!(phases, vec![0.0, std::f64::consts::PI]);
        assert!(q.cell(0).unwrap().iter().all(|c| c.amplitude() == 1.0));
        let same = quantized(&sched, &Quantization::continuous()).unwrap();
        assert_eq!(same, sched);
    }

    #[test]
    fn probes_are_labelled_apart() {
        let mut s = Scenario::from_json_str(crate::bundled::get("sdc_5mhz").unwrap()).unwrap();
        s.oversampling = 4;
        s.points
            .push(serde_json::from_str(r#"{"role": "probe", "position_m": [0.5, 0, 1]}"#).unwrap());
        let sim = simulate(&s).unwrap();
        let labels: Vec<&str> = sim.segments[0]
            .observations
            .iter()
            .map(|o| o.label.as_str())
            .collect();
        assert_eq!(labels, ["probe0", "probe1"]);
        let tags: Vec<&str> = sim.segments[0]
            .spectra
            .iter()
            .map(|(t, _)| t.as_str())
            .collect();
        assert_eq!(tags, ["sdc_input", "sdc_probe0", "sdc_probe1"]);
    }
}
