use std::path::Path;
use std::process::{Command, Output};

use metasim_cli::{bundled, parse_scenario, run_scenario, simulate, CliError};

fn metasim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metasim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const DEGENERATE: &str = r#"{
    "name": "degenerate", "mode": "transmit_link",
    "carrier_freq_hz": 4.25e9, "control_rate_hz": 1e8, "oversampling": 2,
    "geometry": {"rows": 1, "cols": 1, "spacing_m": 0.0353},
    "points": [{"role": "receive", "position_m": [0, 0, 1]}],
    "channel": {"kind": "identity"},
    "partition": {"kind": "single"}, "modulation": "qpsk",
    "frame": {"symbol_rate_baud": 1e7, "payload_symbols": 32},
    "quantization": {"phase_levels": 1, "amplitude_levels": 1}
}"#;

#[test]
fn list_scenarios() {
    let out = metasim(&["list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().collect::<Vec<_>>(), bundled::NAMES);
}

#[test]
fn validate_bundled_ok() {
    for name in bundled::NAMES {
        let out = metasim(&["validate", name]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn validate_reports_zero_spacing_and_integer_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: serde_json::Value = serde_json::from_str(bundled::get("sdc_5mhz").unwrap()).unwrap();
    v["geometry"]["spacing_m"] = 0.0.into();
    v["staircase"]["period_s"] = 2.05e-7.into();
    let path = write(dir.path(), "bad.json", &v.to_string());
    let out = metasim(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("geometry.spacing_m"), "{err}");
    assert!(err.contains("integer-ratio"), "{err}");
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(metasim(&["run", "no_such_scenario"]).status.code(), Some(1));
    let broken = write(dir.path(), "broken.json", "{ not json");
    assert_eq!(metasim(&["validate", &broken]).status.code(), Some(1));
    assert_eq!(
        metasim(&["run", "sdc_5mhz", "--override", "nonsense"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        metasim(&["run", "sdc_5mhz", "--override", "geometry.rows=0"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn runtime_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // rank-deficient channel passes validation but cannot be detected
    let out = metasim(&[
        "run",
        "mimo2x2_16qam",
        "--override",
        "channel.matrix=[[[1,0],[1,0]],[[1,0],[1,0]]]",
        "--override",
        "frame.payload_symbols=50",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("mimo2x2_16qam"));

    let blocker = write(dir.path(), "file", "");
    let out = metasim(&["run", "sdc_5mhz", "--out-dir", &format!("{blocker}/sub")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_artifacts_and_seed_matters() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    let common = [
        "--override",
        "frame.payload_symbols=100",
        "--override",
        "noise_variance=1e-2",
    ];
    for (d, seed) in [(&a, "1"), (&b, "1"), (&c, "2")] {
        let mut args = vec![
            "run",
            "mimo2x2_16qam",
            "--seed",
            seed,
            "--out-dir",
            d.to_str().unwrap(),
        ];
        args.extend(common);
        let out = metasim(&args);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let read = |d: &Path| std::fs::read(d.join("constellation_tx_0.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));

    let text = String::from_utf8(read(&a)).unwrap();
    assert_eq!(text.lines().next(), Some("symbol_index,i,q,ref_i,ref_q"));
    assert_eq!(text.lines().count(), 101);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["rng_seed"], 1);
    assert!(summary["evm_percent"].as_f64().unwrap() > 0.0);
    assert!(summary["condition_number"].as_f64().unwrap() >= 1.0);
    assert!(a.join("spectrum_tx_rx1.csv").is_file());
}

#[test]
fn degenerate_scenario_is_transparent() {
    let s = parse_scenario("inline", DEGENERATE, &[]).unwrap();
    let sim = simulate(&s).unwrap();
    let seg = &sim.segments[0];
    assert_eq!(seg.observations.len(), 1);
    assert_eq!(seg.observations[0].envelope.samples(), seg.input.samples());
}

#[test]
fn bundled_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let s = parse_scenario("sdc", bundled::get("sdc_5mhz").unwrap(), &[]).unwrap();
    let (_, files) = run_scenario(&s, dir.path()).unwrap();
    assert!(files.last().unwrap().ends_with("summary.json"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    let spectral = &summary["segments"][0]["spectral"];
    assert_eq!(spectral["measured_shift_hz"], -5e6);
    assert_eq!(spectral["bin_exact"], true);
    let table = summary["harmonic_table"].as_array().unwrap();
    assert!(table
        .iter()
        .all(|row| (row["q"].as_i64().unwrap() - 1).rem_euclid(20) == 0));

    let s = parse_scenario(
        "integrated",
        bundled::get("integrated_switch").unwrap(),
        &["frame.payload_symbols=300".into()],
    )
    .unwrap();
    let sim = simulate(&s).unwrap();
    let tags: Vec<&str> = sim.segments.iter().map(|g| g.tag.as_str()).collect();
    assert_eq!(tags, ["tx", "rx"]);
    assert_eq!(sim.segments[1].start_s, sim.segments[0].duration_s());
    for seg in &sim.segments {
        assert_eq!(seg.report.as_ref().unwrap().ber, 0.0, "{}", seg.tag);
    }
}

#[test]
fn validation_error_lists_everything() {
    let s = parse_scenario(
        "inline",
        DEGENERATE,
        &[
            "geometry.spacing_m=0".into(),
            "frame.payload_symbols=0".into(),
            "noise_variance=-1".into(),
        ],
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    match run_scenario(&s, dir.path()) {
        Err(e @ CliError::Validation { .. }) => {
            assert_eq!(e.exit_code(), 1);
            let text = e.to_string();
            for field in [
                "geometry.spacing_m",
                "frame.payload_symbols",
                "noise_variance",
            ] {
                assert!(text.contains(field), "{text}");
            }
        }
        other => panic!("expected validation error, got {other:?}"),
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
