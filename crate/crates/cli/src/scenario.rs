//! Declarative scenario files.
//!
//! Scenarios are JSON with units spelled out in field names. Parsing only
//! checks shape and types; [`Scenario::validate`] checks every semantic rule
//! and reports all violations at once.

use std::fmt;
use std::str::FromStr;

use metasim_core::scalar::integer_ratio;
use metasim_core::txrx::expand_stream_matrix;
use metasim_core::{
    Channel, ChannelKind, Frame, Geometry, ModulationScheme, Orientation, Point3, PointRole,
    Points, Quantization, ShiftDirection, Staircase, SurfacePartition, C64,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Surface modulates an air-fed carrier; remote antennas detect the frame.
    TransmitLink,
    /// Surface ramps its phase to translate an incident wave.
    SpaceDownConversion,
    /// Transmit frame, then switch the surface to down-conversion and receive.
    Integrated,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::TransmitLink => "transmit_link",
            Mode::SpaceDownConversion => "space_down_conversion",
            Mode::Integrated => "integrated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub mode: Mode,
    pub carrier_freq_hz: f64,
    /// DAC update rate driving the cells.
    pub control_rate_hz: f64,
    /// Envelope sample rate as a multiple of `control_rate_hz`.
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    #[serde(default)]
    pub rng_seed: u64,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub points: Vec<PointConfig>,
    pub channel: ChannelConfig,
    /// Complex-Gaussian variance per sample at every observation point.
    #[serde(default)]
    pub noise_variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub staircase: Option<StaircaseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputConfig>,
    #[serde(default)]
    pub quantization: QuantizationConfig,
    /// Samples per periodogram; defaults to `min(len, 65536)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_dft_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

fn default_oversampling() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub rows: usize,
    pub cols: usize,
    pub spacing_m: f64,
    #[serde(default)]
    pub origin_m: [f64; 3],
    #[serde(default)]
    pub orientation: OrientationConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationConfig {
    #[default]
    Xy,
    Xz,
    Yz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoleConfig {
    Feed,
    Receive,
    Probe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub role: RoleConfig,
    pub position_m: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKindConfig {
    Identity,
    FreeSpace,
    /// `matrix[cell][point]`.
    ExplicitMatrix,
    /// `matrix[point][stream]`, spread evenly over each stream's cells.
    ExplicitStreamMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKindConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_m: Option<f64>,
    /// Complex entries as `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feed_gains: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    Single,
    Halves,
    ColumnBands,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub kind: PartitionKind,
    /// Band count for `column_bands`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub streams: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub symbol_rate_baud: f64,
    pub payload_symbols: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionConfig {
    #[default]
    Down,
    Up,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampConfig {
    /// Held at the control rate, `steps_per_period` steps.
    #[default]
    Staircase,
    /// Ideal linear phase evaluated at every envelope sample.
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaircaseConfig {
    pub period_s: f64,
    pub steps_per_period: usize,
    #[serde(default)]
    pub direction: DirectionConfig,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub ramp: RampConfig,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Tone,
    Frame,
}

/// Wave arriving at the surface in down-conversion mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub kind: InputKind,
    #[serde(default)]
    pub offset_hz: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Tone length; frames last as long as their symbols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizationConfig {
    #[serde(default)]
    pub phase_levels: Option<u32>,
    #[serde(default)]
    pub amplitude_levels: Option<u32>,
    #[serde(default)]
    pub phase_offset_rad: f64,
}

/// One broken rule, named by its JSON field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Default)]
struct Violations(Vec<Violation>);

impl Violations {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, field: &str, value: f64) {
        if !(value.is_finite() && value > 0.0) {
            self.push(
                field,
                format!("must be a positive finite number, got {value}"),
            );
        }
    }
}

fn complex(z: [f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.control_rate_hz * self.oversampling as f64
    }

    pub fn geometry(&self) -> metasim_core::Result<Geometry> {
        let g = &self.geometry;
        let orientation = match g.orientation {
            OrientationConfig::Xy => Orientation::Xy,
            OrientationConfig::Xz => Orientation::Xz,
            OrientationConfig::Yz => Orientation::Yz,
        };
        let [x, y, z] = g.origin_m;
        Geometry::with_placement(
            g.rows,
            g.cols,
            g.spacing_m,
            Point3::new(x, y, z),
            orientation,
        )
    }

    pub fn points(&self) -> Points {
        Points::new(
            self.points
                .iter()
                .map(|p| {
                    let role = match p.role {
                        RoleConfig::Feed => PointRole::Feed,
                        RoleConfig::Receive => PointRole::Receive,
                        RoleConfig::Probe => PointRole::Probe,
                    };
                    let [x, y, z] = p.position_m;
                    (Point3::new(x, y, z), role)
                })
                .collect(),
        )
    }

    pub fn modulation(&self) -> metasim_core::Result<Option<ModulationScheme>> {
        self.modulation
            .as_deref()
            .map(ModulationScheme::from_str)
            .transpose()
    }

    pub fn partition(&self, geometry: &Geometry) -> metasim_core::Result<Option<SurfacePartition>> {
        let Some(p) = &self.partition else {
            return Ok(None);
        };
        let part = match p.kind {
            PartitionKind::Single => SurfacePartition::single(geometry.cell_count())?,
            PartitionKind::Halves => SurfacePartition::halves(geometry)?,
            PartitionKind::ColumnBands => {
                SurfacePartition::column_bands(geometry, p.streams.unwrap_or(1))?
            }
        };
        Ok(Some(part))
    }

    /// Frame for the transmit segment (all partition streams).
    pub fn frame(&self, streams: usize) -> metasim_core::Result<Option<Frame>> {
        self.frame
            .as_ref()
            .map(|f| {
                Frame::new(
                    streams,
                    f.payload_symbols,
                    f.symbol_rate_baud,
                    self.control_rate_hz,
                )
            })
            .transpose()
    }

    pub fn staircase(&self) -> metasim_core::Result<Option<Staircase>> {
        self.staircase
            .as_ref()
            .map(|s| {
                let direction = match s.direction {
                    DirectionConfig::Down => ShiftDirection::Down,
                    DirectionConfig::Up => ShiftDirection::Up,
                };
                Staircase::new(s.period_s, s.steps_per_period, direction, s.amplitude)
            })
            .transpose()
    }

    pub fn quantization(&self) -> metasim_core::Result<Quantization> {
        let q = &self.quantization;
        Quantization::new(q.phase_levels, q.amplitude_levels, q.phase_offset_rad)
    }

    /// Channel model for the core, expanding stream-level matrices over the
    /// partition.
    pub fn channel(&self, partition: Option<&SurfacePartition>) -> metasim_core::Result<Channel> {
        let c = &self.channel;
        let kind = match c.kind {
            ChannelKindConfig::Identity => ChannelKind::Identity,
            ChannelKindConfig::FreeSpace => ChannelKind::FreeSpace {
                wavelength: c.wavelength_m.unwrap_or(f64::NAN),
            },
            ChannelKindConfig::ExplicitMatrix | ChannelKindConfig::ExplicitStreamMatrix => {
                let rows: Vec<Vec<C64>> = c
                    .matrix
                    .as_ref()
                    .map(|m| {
                        m.iter()
                            .map(|r| r.iter().copied().map(complex).collect())
                            .collect()
                    })
                    .unwrap_or_default();
                let obs = if c.kind == ChannelKindConfig::ExplicitStreamMatrix {
                    let partition = partition.ok_or_else(|| {
                        metasim_core::Error::Config(
                            "explicit_stream_matrix needs a partition".into(),
                        )
                    })?;
                    expand_stream_matrix(&rows, partition)?
                } else {
                    rows
                };
                ChannelKind::ExplicitMatrix {
                    obs,
                    feed: c
                        .feed_gains
                        .as_ref()
                        .map(|f| f.iter().copied().map(complex).collect()),
                }
            }
        };
        Ok(Channel {
            kind,
            noise_psd: self.noise_variance,
        })
    }

    /// Every violated rule, or an empty list.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Violations::default();
        if self.name.trim().is_empty() {
            v.push("name", "must not be empty");
        }
        v.positive("carrier_freq_hz", self.carrier_freq_hz);
        v.positive("control_rate_hz", self.control_rate_hz);
        if self.oversampling == 0 {
            v.push(
                "oversampling",
                "must be >= 1 (envelope rate is oversampling × control_rate_hz)",
            );
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            v.push(
                "noise_variance",
                format!("must be >= 0, got {}", self.noise_variance),
            );
        }
        if let Some(n) = self.spectrum_dft_length {
            if n < 2 {
                v.push("spectrum_dft_length", format!("must be >= 2, got {n}"));
            }
        }
        if let Err(e) = self.quantization() {
            v.push("quantization", e.to_string());
        }

        let g = &self.geometry;
        if g.rows == 0 {
            v.push("geometry.rows", "must be >= 1");
        }
        if g.cols == 0 {
            v.push("geometry.cols", "must be >= 1");
        }
        if !(g.spacing_m.is_finite() && g.spacing_m > 0.0) {
            v.push(
                "geometry.spacing_m",
                format!("cell pitch must be > 0, got {}", g.spacing_m),
            );
        }
        let geometry = self.geometry().ok();
        let points = self.points();
        if let Some(geometry) = &geometry {
            if let Err(e) = points.validate_against(geometry) {
                v.push("points", e.to_string());
            }
        }

        let scheme = match self.modulation() {
            Ok(s) => s,
            Err(e) => {
                v.push("modulation", e.to_string());
                None
            }
        };
        let partition = match (&geometry, &self.partition) {
            (Some(geometry), Some(_)) => match self.partition(geometry) {
                Ok(p) => p,
                Err(e) => {
                    v.push("partition", e.to_string());
                    None
                }
            },
            _ => None,
        };

        self.validate_channel(&mut v, geometry.as_ref(), partition.as_ref(), &points);

        let needs_link = matches!(self.mode, Mode::TransmitLink | Mode::Integrated);
        let needs_ramp = matches!(self.mode, Mode::SpaceDownConversion | Mode::Integrated);
        let needs_frame = needs_link
            || self
                .input
                .as_ref()
                .is_some_and(|i| i.kind == InputKind::Frame);

        if needs_link {
            if self.partition.is_none() {
                v.push("partition", format!("required in {} mode", self.mode));
            }
            if let Some(p) = &partition {
                if points.receive_count() < p.streams() {
                    v.push(
                        "points",
                        format!(
                            "{} receive points cannot separate {} streams",
                            points.receive_count(),
                            p.streams()
                        ),
                    );
                }
            }
        }
        if needs_frame {
            if scheme.is_none() && self.modulation.is_none() {
                v.push(
                    "modulation",
                    format!("required in {} mode with a frame", self.mode),
                );
            }
            match &self.frame {
                None => v.push("frame", "required when a data frame is sent"),
                Some(f) => {
                    if f.payload_symbols == 0 {
                        v.push("frame.payload_symbols", "must be >= 1");
                    }
                    if !(f.symbol_rate_baud.is_finite() && f.symbol_rate_baud > 0.0) {
                        v.push(
                            "frame.symbol_rate_baud",
                            format!("must be > 0, got {}", f.symbol_rate_baud),
                        );
                    } else if self.control_rate_hz > 0.0
                        && integer_ratio(self.control_rate_hz, f.symbol_rate_baud).is_none()
                    {
                        v.push(
                            "frame.symbol_rate_baud",
                            format!(
                                "control_rate_hz / symbol_rate_baud = {} must be an integer",
                                self.control_rate_hz / f.symbol_rate_baud
                            ),
                        );
                    }
                }
            }
        }
        if needs_ramp {
            self.validate_ramp(&mut v);
        }
        match self.mode {
            Mode::SpaceDownConversion => self.validate_input(&mut v, &points),
            Mode::Integrated => {
                if points.feed().is_none() {
                    v.push(
                        "points",
                        "integrated mode needs a feed point (it receives in Rx mode)",
                    );
                }
                if self.input.is_some() {
                    v.push("input", "not used in integrated mode; the Rx frame comes from the first receive point");
                }
            }
            Mode::TransmitLink => {}
        }
        v.0
    }

    fn validate_channel(
        &self,
        v: &mut Violations,
        geometry: Option<&Geometry>,
        partition: Option<&SurfacePartition>,
        points: &Points,
    ) {
        let c = &self.channel;
        let observers = points.observation_points().len();
        match c.kind {
            ChannelKindConfig::Identity => {}
            ChannelKindConfig::FreeSpace => match c.wavelength_m {
                None => v.push("channel.wavelength_m", "required for free_space"),
                Some(w) if !(w.is_finite() && w > 0.0) => {
                    v.push("channel.wavelength_m", format!("must be > 0, got {w}"))
                }
                _ => {}
            },
            ChannelKindConfig::ExplicitMatrix => match (&c.matrix, geometry) {
                (None, _) => v.push("channel.matrix", "required for explicit_matrix"),
                (Some(m), Some(g))
                    if (m.len() != g.cell_count() || m.iter().any(|r| r.len() != observers)) =>
                {
                    v.push(
                        "channel.matrix",
                        format!(
                            "must be {} cells x {observers} observation points",
                            g.cell_count()
                        ),
                    );
                }
                _ => {}
            },
            ChannelKindConfig::ExplicitStreamMatrix => match (&c.matrix, partition) {
                (None, _) => v.push("channel.matrix", "required for explicit_stream_matrix"),
                (Some(_), None) => v.push("partition", "explicit_stream_matrix needs a partition"),
                (Some(m), Some(p)) => {
                    if m.len() != observers || m.iter().any(|r| r.len() != p.streams()) {
                        v.push(
                            "channel.matrix",
                            format!(
                                "must be {observers} observation points x {} streams",
                                p.streams()
                            ),
                        );
                    }
                }
            },
        }
        if let (Some(f), Some(g)) = (&c.feed_gains, geometry) {
            if f.len() != g.cell_count() {
                v.push(
                    "channel.feed_gains",
                    format!("must have {} entries", g.cell_count()),
                );
            }
            if !matches!(
                c.kind,
                ChannelKindConfig::ExplicitMatrix | ChannelKindConfig::ExplicitStreamMatrix
            ) {
                v.push(
                    "channel.feed_gains",
                    "only used with explicit channel kinds",
                );
            }
        }
    }

    fn validate_ramp(&self, v: &mut Violations) {
        let Some(s) = &self.staircase else {
            v.push("staircase", format!("required in {} mode", self.mode));
            return;
        };
        if !(s.period_s.is_finite() && s.period_s > 0.0) {
            v.push(
                "staircase.period_s",
                format!("must be > 0, got {}", s.period_s),
            );
            return;
        }
        if !(0.0..=1.0).contains(&s.amplitude) {
            v.push(
                "staircase.amplitude",
                format!("must lie in [0, 1], got {}", s.amplitude),
            );
        }
        if s.ramp == RampConfig::Staircase {
            if s.steps_per_period < 2 {
                v.push("staircase.steps_per_period", "must be >= 2");
            }
            let per_period = self.control_rate_hz * s.period_s;
            if integer_ratio(per_period, 1.0) != Some(s.steps_per_period) {
                v.push(
                    "staircase.period_s",
                    format!(
                        "control_rate_hz × period_s = {per_period} must equal steps_per_period = {} \
                         (integer-ratio rule: whole control samples per period)",
                        s.steps_per_period
                    ),
                );
            }
        }
        let fs = self.sample_rate_hz();
        if fs > 0.0 && 1.0 / s.period_s >= fs / 2.0 {
            v.push(
                "staircase.period_s",
                "shift 1/period_s must stay below half the envelope sample rate",
            );
        }
    }

    fn validate_input(&self, v: &mut Violations, points: &Points) {
        let Some(input) = &self.input else {
            v.push("input", "required in space_down_conversion mode");
            return;
        };
        if points.observation_points().is_empty() {
            v.push(
                "points",
                "at least one receive or probe point is needed to observe the output",
            );
        }
        let fs = self.sample_rate_hz();
        match input.kind {
            InputKind::Tone => {
                if !(0.0..=1.0).contains(&input.amplitude) {
                    v.push(
                        "input.amplitude",
                        format!("must lie in [0, 1], got {}", input.amplitude),
                    );
                }
                if fs > 0.0 && input.offset_hz.abs() >= fs / 2.0 {
                    v.push(
                        "input.offset_hz",
                        "must stay below half the envelope sample rate",
                    );
                }
                match input.duration_s {
                    None => v.push("input.duration_s", "required for a tone input"),
                    Some(d) if !(d.is_finite() && d > 0.0) => {
                        v.push("input.duration_s", format!("must be > 0, got {d}"))
                    }
                    Some(d) => {
                        if self.control_rate_hz > 0.0
                            && integer_ratio(d * self.control_rate_hz, 1.0).is_none()
                        {
                            v.push(
                                "input.duration_s",
                                "must hold a whole number of control samples",
                            );
                        }
                        if input.offset_hz != 0.0
                            && integer_ratio((input.offset_hz * d).abs(), 1.0).is_none()
                        {
                            v.push(
                                "input.duration_s",
                                "must hold a whole number of tone cycles so the line is bin-centred",
                            );
                        }
                        if let Some(s) = &self.staircase {
                            if s.period_s > 0.0 && integer_ratio(d, s.period_s).is_none() {
                                v.push(
                                    "input.duration_s",
                                    "must hold a whole number of ramp periods",
                                );
                            }
                        }
                    }
                }
            }
            InputKind::Frame => {
                if points.receive_count() == 0 {
                    v.push("points", "a frame input needs at least one receive point");
                }
                if input.duration_s.is_some() {
                    v.push("input.duration_s", "not used for frame inputs");
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Scenario {
        Scenario::from_json_str(
            r#"{
                "name": "t", "mode": "space_down_conversion",
                "carrier_freq_hz": 4.25e9, "control_rate_hz": 1e8, "oversampling": 4,
                "geometry": {"rows": 2, "cols": 2, "spacing_m": 0.035},
                "points": [{"role": "receive", "position_m": [0, 0, 1]}],
                "channel": {"kind": "identity"},
                "staircase": {"period_s": 2e-7, "steps_per_period": 20},
                "input": {"kind": "tone", "duration_s": 2e-6}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn base_is_valid() {
        assert_eq!(base().validate(), vec![]);
    }

    #[test]
    fn zero_spacing_named() {
        let mut s = base();
        s.geometry.spacing_m = 0.0;
        let v = s.validate();
        assert!(
            v.iter()
                .any(|x| x.field == "geometry.spacing_m" && x.message.contains("> 0")),
            "{v:?}"
        );
    }

    #[test]
    fn non_integer_staircase_named() {
        let mut s = base();
        s.staircase.as_mut().unwrap().period_s = 2.05e-7;
        let v = s.validate();
        assert!(
            v.iter()
                .any(|x| x.field == "staircase.period_s" && x.message.contains("integer-ratio")),
            "{v:?}"
        );
    }

    #[test]
    fn collects_every_violation() {
        let mut s = base();
        s.geometry.rows = 0;
        s.control_rate_hz = -1.0;
        s.noise_variance = -0.5;
        s.staircase = None;
        let fields: Vec<String> = s.validate().into_iter().map(|v| v.field).collect();
        for f in [
            "geometry.rows",
            "control_rate_hz",
            "noise_variance",
            "staircase",
        ] {
            assert!(fields.iter().any(|x| x == f), "missing {f} in {fields:?}");
        }
    }

    #[test]
    fn link_requirements() {
        let mut s = base();
        s.mode = Mode::TransmitLink;
        let fields: Vec<String> = s.validate().into_iter().map(|v| v.field).collect();
        assert!(fields.contains(&"partition".to_string()));
        assert!(fields.contains(&"frame".to_string()));
        assert!(fields.contains(&"modulation".to_string()));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(Scenario::from_json_str(r#"{"name": "x", "bogus": 1}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = base();
        assert_eq!(Scenario::from_json_str(&s.to_json_string()).unwrap(), s);
    }
}
