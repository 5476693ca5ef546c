//! CSV artifacts and `summary.json`.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) so baselines
//! round-trip exactly; column order is fixed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use metasim_core::{PowerSpectrum, Report};
use serde::Serialize;

use crate::runner::{HarmonicRow, LineSummary, Segment, Simulation};

/// Power floor for the dB column, so silent bins stay finite.
const DB_FLOOR: f64 = -300.0;

pub fn write_spectrum_csv(out: &mut impl Write, spectrum: &PowerSpectrum) -> io::Result<()> {
    writeln!(out, "freq_hz,power_linear,power_db")?;
    let carrier = spectrum.carrier_freq();
    for (f, p) in spectrum.freqs().iter().zip(spectrum.power()) {
        let db = if *p > 0.0 {
            (10.0 * p.log10()).max(DB_FLOOR)
        } else {
            DB_FLOOR
        };
        writeln!(out, "{:.16e},{:.16e},{:.16e}", carrier + f, p, db)?;
    }
    Ok(())
}

/// Detected payload symbols of one stream next to what was sent.
pub fn write_constellation_csv(
    out: &mut impl Write,
    report: &Report,
    stream: usize,
) -> io::Result<()> {
    writeln!(out, "symbol_index,i,q,ref_i,ref_q")?;
    for (k, (d, r)) in report.detected[stream]
        .iter()
        .zip(&report.reference[stream])
        .enumerate()
    {
        writeln!(
            out,
            "{k},{:.16e},{:.16e},{:.16e},{:.16e}",
            d.re, d.im, r.re, r.im
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub mode: String,
    pub rng_seed: u64,
    pub carrier_freq_hz: f64,
    pub sample_rate_hz: f64,
    /// From the first segment that detected a frame.
    pub evm_percent: Option<f64>,
    pub ber: Option<f64>,
    pub condition_number: Option<f64>,
    pub harmonic_table: Vec<HarmonicEntry>,
    pub segments: Vec<SegmentSummary>,
    pub timeline: Vec<TimelineEntry>,
}

#[derive(Debug, Serialize)]
pub struct SegmentSummary {
    pub tag: String,
    pub surface_mode: String,
    pub samples: usize,
    pub link: Option<LinkSummary>,
    pub spectral: Option<SpectralSummary>,
    pub harmonic_table: Vec<HarmonicEntry>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct LinkSummary {
    pub modulation: String,
    pub streams: usize,
    pub payload_symbols_per_stream: usize,
    pub pilot_symbols: usize,
    pub symbol_rate_baud: f64,
    pub bit_rate_bps: f64,
    pub evm_percent: f64,
    pub ber: f64,
    pub per_stream: Vec<StreamSummary>,
    pub condition_number: f64,
    /// `[antenna][stream]` as `[re, im]`.
    pub channel_estimate: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
pub struct StreamSummary {
    pub evm_percent: f64,
    pub ber: f64,
}

#[derive(Debug, Serialize)]
pub struct SpectralSummary {
    pub input_offset_hz: f64,
    pub expected_shift_hz: f64,
    pub expected_line_offset_hz: f64,
    pub dominant_line_offset_hz: f64,
    pub measured_shift_hz: f64,
    pub bin_exact: bool,
    pub resolution_hz: f64,
    pub desired_power_fraction: f64,
    pub predicted_power_fraction: f64,
    pub fraction_relative_error: f64,
}

#[derive(Debug, Serialize)]
pub struct HarmonicEntry {
    pub q: i64,
    pub offset_hz: f64,
    pub predicted_power_fraction: f64,
    pub measured_power_fraction: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct TimelineEntry {
    pub segment: String,
    pub surface_mode: String,
    pub start_s: f64,
    pub end_s: f64,
}

fn harmonic_entries(rows: &[HarmonicRow]) -> Vec<HarmonicEntry> {
    rows.iter()
        .map(|r| HarmonicEntry {
            q: r.q,
            offset_hz: r.offset_hz,
            predicted_power_fraction: r.predicted,
            measured_power_fraction: r.measured,
        })
        .collect()
}

fn spectral_summary(l: &LineSummary) -> SpectralSummary {
    SpectralSummary {
        input_offset_hz: l.input_offset_hz,
        expected_shift_hz: l.expected_shift_hz,
        expected_line_offset_hz: l.expected_line_hz,
        dominant_line_offset_hz: l.dominant_line_hz,
        measured_shift_hz: l.measured_shift_hz,
        bin_exact: l.bin_exact,
        resolution_hz: l.resolution_hz,
        desired_power_fraction: l.desired_fraction,
        predicted_power_fraction: l.predicted_fraction,
        fraction_relative_error: l.fraction_relative_error(),
    }
}

fn link_summary(seg: &Segment) -> Option<LinkSummary> {
    let (report, frame, scheme) = (seg.report.as_ref()?, seg.frame.as_ref()?, seg.scheme?);
    Some(LinkSummary {
        modulation: scheme.name().into(),
        streams: frame.streams(),
        payload_symbols_per_stream: frame.payload_length(),
        pilot_symbols: frame.pilot_length(),
        symbol_rate_baud: frame.symbol_rate(),
        bit_rate_bps: frame.bit_rate(scheme),
        evm_percent: report.evm_percent,
        ber: report.ber,
        per_stream: report
            .per_stream
            .iter()
            .map(|m| StreamSummary {
                evm_percent: m.evm_percent,
                ber: m.ber,
            })
            .collect(),
        condition_number: report.condition_number,
        channel_estimate: report
            .channel_estimate
            .to_rows()
            .iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    })
}

fn constellation_name(seg: &Segment, stream: usize) -> String {
    format!("constellation_{}_{stream}.csv", seg.tag)
}

fn spectrum_name(tag: &str) -> String {
    format!("spectrum_{tag}.csv")
}

fn artifact_names(seg: &Segment) -> Vec<String> {
    let streams = seg.report.as_ref().map_or(0, |r| r.detected.len());
    (0..streams)
        .map(|s| constellation_name(seg, s))
        .chain(seg.spectra.iter().map(|(t, _)| spectrum_name(t)))
        .collect()
}

pub fn summary(sim: &Simulation) -> Summary {
    let s = &sim.scenario;
    let link = sim.link();
    Summary {
        scenario: s.name.clone(),
        mode: s.mode.to_string(),
        rng_seed: s.rng_seed,
        carrier_freq_hz: s.carrier_freq_hz,
        sample_rate_hz: s.sample_rate_hz(),
        evm_percent: link.map(|r| r.evm_percent),
        ber: link.map(|r| r.ber),
        condition_number: link.map(|r| r.condition_number),
        harmonic_table: sim
            .segments
            .iter()
            .find(|g| !g.harmonics.is_empty())
            .map(|g| harmonic_entries(&g.harmonics))
            .unwrap_or_default(),
        segments: sim
            .segments
            .iter()
            .map(|g| SegmentSummary {
                tag: g.tag.clone(),
                surface_mode: g.surface_mode.name().into(),
                samples: g.input.len(),
                link: link_summary(g),
                spectral: g.line.as_ref().map(spectral_summary),
                harmonic_table: harmonic_entries(&g.harmonics),
                artifacts: artifact_names(g),
            })
            .collect(),
        timeline: sim
            .segments
            .iter()
            .map(|g| TimelineEntry {
                segment: g.tag.clone(),
                surface_mode: g.surface_mode.name().into(),
                start_s: g.start_s,
                end_s: g.start_s + g.duration_s(),
            })
            .collect(),
    }
}

fn create(dir: &Path, name: &str) -> io::Result<(PathBuf, io::BufWriter<fs::File>)> {
    let path = dir.join(name);
    let file = fs::File::create(&path)?;
    Ok((path, io::BufWriter::new(file)))
}

/// Writes every artifact into `dir` (created if needed) and returns the
/// paths written, `summary.json` last.
pub fn write_artifacts(sim: &Simulation, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for seg in &sim.segments {
        if let Some(report) = &seg.report {
            for stream in 0..report.detected.len() {
                let (path, mut out) = create(dir, &constellation_name(seg, stream))?;
                write_constellation_csv(&mut out, report, stream)?;
                out.flush()?;
                written.push(path);
            }
        }
        for (tag, spectrum) in &seg.spectra {
            let (path, mut out) = create(dir, &spectrum_name(tag))?;
            write_spectrum_csv(&mut out, spectrum)?;
            out.flush()?;
            written.push(path);
        }
    }
    let (path, mut out) = create(dir, "summary.json")?;
    serde_json::to_writer_pretty(&mut out, &summary(sim))?;
    writeln!(out)?;
    out.flush()?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use metasim_core::spectral::periodogram;
    use metasim_core::Envelope;

    #[test]
    fn spectrum_csv_layout() {
        let env = Envelope::tone(1.0, 1.0, 4.0, 100.0, 4).unwrap();
        let s = periodogram(&env, 4).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "freq_hz,power_linear,power_db");
        assert_eq!(lines.len(), 5);
        // absolute frequency, 17 significant digits, floored dB for empty bins
        let tone_row = lines
            .iter()
            .find(|l| l.starts_with("1.0100000000000000e2"))
            .unwrap();
        let cols: Vec<f64> = tone_row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[1] - 1.0).abs() < 1e-15);
        assert!(cols[2].abs() < 1e-12);
        assert!(text.contains("-3.0000000000000000e2"));
    }

    #[test]
    fn floats_round_trip() {
        let x = 0.1f64 + 0.2;
        let s = format!("{x:.16e}");
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}
