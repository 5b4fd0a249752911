use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use cmcb::cli::{run_command, EXIT_ANALYSIS, EXIT_CONFIG, EXIT_OK, EXIT_USAGE};
use cmcb::CrossingEvent;
use serde_json::Value;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> i32 {
    run_command(std::iter::once("cmcb").chain(args.iter().copied()))
}

fn run_config(cmd: &str, config: &Path, out: &Path) -> i32 {
    run(&[
        cmd,
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_de_sitter() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config(
            "analyze",
            &configs().join("ds_schwarzschild.toml"),
            out.path()
        ),
        EXIT_OK
    );
    let report = json(&out.path().join("report.json"));
    assert_eq!(report["status"], "ok");
    assert_eq!(report["verdict"], "bifurcation_found");
    assert_eq!(report["crossings"].as_array().unwrap().len(), 3);
    assert_eq!(report["divergence"]["upper"]["class"], "divergent");
    for name in ["scan.csv", "crossings.json", "certificates.json"] {
        assert!(out.path().join(name).exists(), "{name}");
    }
    let c = &report["crossings"][0];
    assert_eq!(c["direction"], "up");
    assert_eq!(c["multiplicity"], 7);
    assert_eq!(c["eigenvalue"], 12.0);
}

#[test]
fn certify_anti_de_sitter() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config(
            "certify",
            &configs().join("ads_schwarzschild.toml"),
            out.path()
        ),
        EXIT_OK
    );
    let certs = json(&out.path().join("certificates.json"));
    let gap = &certs[0];
    assert_eq!(gap["criterion"], "warped_spectral_gap");
    assert_eq!(gap["verdict"], "certified");
    assert_eq!(gap["scope"], "sampled_grid");
    assert!((gap["margin"].as_f64().unwrap() - 0.03).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let missing = out.path().join("missing_file.toml");
    assert_eq!(run_config("analyze", &missing, out.path()), EXIT_CONFIG);
    assert_eq!(run(&[]), EXIT_USAGE);
    assert_eq!(run(&["frobnicate", "x.toml"]), EXIT_USAGE);
    assert_eq!(run(&["analyze"]), EXIT_USAGE);
    assert_eq!(run(&["--help"]), EXIT_OK);

    let bad = out.path().join("bad.toml");
    fs::write(&bad, "[model\nkind = 1").unwrap();
    assert_eq!(run_config("analyze", &bad, out.path()), EXIT_CONFIG);
    fs::write(&bad, "[model]\nkind = \"schwarzschild\"\nmass = 1.0\ncosmological = -1.0\n[scan]\nr_min = -3.0\nr_max = -0.5\npoints = 10\n")
        .unwrap();
    assert_eq!(run_config("scan", &bad, out.path()), EXIT_CONFIG);
    fs::write(&bad, "[model]\nkind = \"schwarzschild\"\nmass = 1.0\n").unwrap();
    assert_eq!(
        run_config("scan", &bad, out.path()),
        EXIT_CONFIG,
        "scan needs a [scan] section"
    );
}

#[test]
fn degenerate_family_exits_3_with_status() {
    let out = tempfile::tempdir().unwrap();
    let config = configs().join("hyperbolic_sinh.toml");
    assert_eq!(run_config("analyze", &config, out.path()), EXIT_ANALYSIS);
    let report = json(&out.path().join("report.json"));
    assert_eq!(report["status"], "degenerate");
    assert_eq!(report["verdict"], "degenerate");
    assert_eq!(run_config("certify", &config, out.path()), EXIT_ANALYSIS);
    let certs = json(&out.path().join("certificates.json"));
    assert!(certs
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["verdict"] == "inconclusive_degenerate"));
}

#[test]
fn exit_zero_iff_status_ok() {
    for name in [
        "ds_schwarzschild",
        "ads_schwarzschild",
        "desitter_cusp",
        "power_law",
        "hyperbolic_sinh",
    ] {
        let out = tempfile::tempdir().unwrap();
        let code = run_config(
            "analyze",
            &configs().join(format!("{name}.toml")),
            out.path(),
        );
        let status = json(&out.path().join("report.json"))["status"].clone();
        assert_eq!(
            code == EXIT_OK,
            status == "ok",
            "{name}: exit {code}, status {status}"
        );
    }
}

#[test]
fn scan_csv_shape() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("scan", &configs().join("ds_schwarzschild.toml"), out.path()),
        EXIT_OK
    );
    let text = fs::read_to_string(out.path().join("scan.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "r,h,alpha_sq,morse_index,level_2,level_6,level_12,level_20,level_30"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2000);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
    assert_eq!(rows[0][0], -1.45);
    assert_eq!(rows[1999][0], -0.21);
    // h = 2(1 - 3/r) and α² = r² exactly reproduced from the text
    for row in &rows {
        assert!((row[1] - 2.0 * (1.0 - 3.0 / row[0])).abs() < 1e-12 * row[1]);
        assert!((row[2] - row[0] * row[0]).abs() < 1e-15);
    }
}

#[test]
fn crossings_json_round_trips() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        run_config("crossings", &configs().join("power_law.toml"), out.path()),
        EXIT_OK
    );
    let text = fs::read_to_string(out.path().join("crossings.json")).unwrap();
    let events: Vec<CrossingEvent> = serde_json::from_str(&text).unwrap();
    assert!(events.len() >= 90);
    let again = serde_json::to_string_pretty(&events).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn index_and_spectrum_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("ds.toml");
    fs::write(
        &config,
        "[model]\nkind = \"schwarzschild\"\nK = 1.0\nE = -1.0\n\
         [scan]\nr_min = -1.4\nr_max = -0.25\npoints = 50\nspectrum_bound = 30.0\n\
         [output]\ndirectory = \"results\"\n",
    )
    .unwrap();
    let out = dir.path().join("results");
    assert_eq!(run(&["spectrum", config.to_str().unwrap()]), EXIT_OK);
    assert_eq!(
        fs::read_to_string(out.join("spectrum.csv")).unwrap(),
        "value,multiplicity\n0,1\n2,3\n6,5\n12,7\n20,9\n30,11\n"
    );
    assert_eq!(run(&["index", config.to_str().unwrap()]), EXIT_OK);
    let text = fs::read_to_string(out.join("index.csv")).unwrap();
    let idx: Vec<u64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(idx.len(), 50);
    assert!(idx.windows(2).all(|w| w[0] <= w[1]));
    // h(-0.25) = 26 lies between 20 and 30: 3 + 5 + 7 + 9.
    assert_eq!((idx[0], *idx.last().unwrap()), (8, 24));
}

#[test]
fn binary_matches_library_and_honours_thread_cap() {
    let bin = env!("CARGO_BIN_EXE_cmcb");
    let config = configs().join("ds_schwarzschild.toml");
    let lib_out = tempfile::tempdir().unwrap();
    assert_eq!(run_config("analyze", &config, lib_out.path()), EXIT_OK);

    for threads in ["1", "3"] {
        let out = tempfile::tempdir().unwrap();
        let status = Command::new(bin)
            .args([
                "analyze",
                config.to_str().unwrap(),
                "--out",
                out.path().to_str().unwrap(),
            ])
            .env("CMCB_THREADS", threads)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(EXIT_OK));
        for name in ["report.json", "scan.csv"] {
            assert_eq!(
                fs::read(out.path().join(name)).unwrap(),
                fs::read(lib_out.path().join(name)).unwrap()
            );
        }
    }

    let status = Command::new(bin)
        .arg("analyze")
        .arg("missing_file.toml")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_CONFIG));
}
