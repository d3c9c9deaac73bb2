//! End-to-end tests running the compiled binary: artifact layout, exit
//! codes, determinism, and the config/flag precedence chain.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gki::imaging::read_netpbm;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gki"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Writes an ASCII grayscale image with the given pixel values.
fn write_pgm(path: &Path, h: usize, w: usize, values: &[u8]) {
    assert_eq!(values.len(), h * w);
    let body: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    fs::write(path, format!("P2\n{w} {h}\n255\n{}\n", body.join(" "))).unwrap();
}

/// A deterministic smooth-ish test pattern.
fn gradient(h: usize, w: usize) -> Vec<u8> {
    (0..h * w)
        .map(|i| (((i / w) * 9 + (i % w) * 13) % 256) as u8)
        .collect()
}

/// Mask observing every pixel where `(r + 2c) % 3 != 0` (about two thirds).
fn write_partial_mask(path: &Path, h: usize, w: usize) {
    let values: Vec<u8> = (0..h * w)
        .map(|i| if ((i / w) + 2 * (i % w)) % 3 != 0 { 255 } else { 0 })
        .collect();
    write_pgm(path, h, w, &values);
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_writes_images_and_sidecars_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = run(&["synth", "--count", "2", "--r", "12", "--out-dir", s(out)]);
        assert!(res.status.success(), "{}", stderr_of(&res));
    }
    for name in ["synth_000.pgm", "synth_000.truth.txt", "synth_001.pgm", "synth_001.truth.txt"] {
        let bytes_a = fs::read(a.join(name)).unwrap();
        let bytes_b = fs::read(b.join(name)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{name} differs between identical runs");
    }
    let img = read_netpbm(&a.join("synth_001.pgm")).unwrap();
    assert_eq!((img.h(), img.w(), img.channels()), (12, 12, 1));
}

#[test]
fn inpaint_with_all_observed_mask_passes_input_through() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("in.pgm");
    let mask_path = dir.path().join("mask.pgm");
    write_pgm(&img_path, 6, 7, &gradient(6, 7));
    write_pgm(&mask_path, 6, 7, &[255; 42]);
    let out = dir.path().join("out");

    let res = run(&["inpaint", s(&img_path), "--mask", s(&mask_path), "--out-dir", s(&out)]);
    assert!(res.status.success(), "{}", stderr_of(&res));

    let estimate = read_netpbm(&out.join("estimate.pgm")).unwrap();
    assert_eq!(estimate.data(), &gradient(6, 7)[..]);
    let csv = fs::read_to_string(out.join("bands.v1.csv")).unwrap();
    assert_eq!(csv, "i,j,channel,estimate,lower,upper,width\n");
}

#[test]
fn inpaint_rejects_mismatched_mask_with_shape_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("in.pgm");
    let mask_path = dir.path().join("mask.pgm");
    write_pgm(&img_path, 6, 6, &gradient(6, 6));
    write_pgm(&mask_path, 4, 4, &[255; 16]);
    let out = dir.path().join("out");

    let res = run(&["inpaint", s(&img_path), "--mask", s(&mask_path), "--out-dir", s(&out)]);
    assert_eq!(res.status.code(), Some(1), "{}", stderr_of(&res));
    let err = stderr_of(&res);
    assert!(err.contains("shape mismatch"), "{err}");
    assert!(err.contains("6x6") && err.contains("4x4"), "{err}");
}

#[test]
fn inpaint_artifacts_are_deterministic_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("in.pgm");
    let mask_path = dir.path().join("mask.pgm");
    write_pgm(&img_path, 10, 10, &gradient(10, 10));
    write_partial_mask(&mask_path, 10, 10);

    let mut tables = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        let res = run(&["inpaint", s(&img_path), "--mask", s(&mask_path), "--out-dir", s(&out)]);
        assert!(res.status.success(), "{}", stderr_of(&res));
        tables.push(fs::read(out.join("bands.v1.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);

    let out = dir.path().join("a");
    for name in ["estimate.pgm", "lower.pgm", "upper.pgm", "uncertainty.pgm", "weights.pgm"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let csv = fs::read_to_string(out.join("bands.v1.csv")).unwrap();
    let rows = csv.lines().count() - 1;
    assert_eq!(rows, (0..100).filter(|i| ((i / 10) + 2 * (i % 10)) % 3 == 0).count());
}

#[test]
fn superres_doubles_dimensions_and_passes_observed_pixels_through() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("low.pgm");
    write_pgm(&img_path, 4, 6, &gradient(4, 6));
    let out = dir.path().join("out");

    let res = run(&["superres", s(&img_path), "--scale", "2", "--out-dir", s(&out)]);
    assert!(res.status.success(), "{}", stderr_of(&res));

    let estimate = read_netpbm(&out.join("estimate.pgm")).unwrap();
    assert_eq!((estimate.h(), estimate.w()), (8, 12));
    let low = gradient(4, 6);
    for r in 0..4 {
        for c in 0..6 {
            assert_eq!(
                estimate.get(2 * r, 2 * c, 0),
                low[r * 6 + c],
                "observed pixel ({r}, {c}) not passed through"
            );
        }
    }
}

#[test]
fn metrics_of_identical_images_report_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("img.pgm");
    write_pgm(&img_path, 8, 8, &gradient(8, 8));
    let out = dir.path().join("out");

    let res = run(&["metrics", s(&img_path), s(&img_path), "--out-dir", s(&out)]);
    assert!(res.status.success(), "{}", stderr_of(&res));
    let text = stdout_of(&res);
    assert!(text.contains("mse 0\n"), "{text}");
    assert!(text.contains("ssim 1\n"), "{text}");

    let csv = fs::read_to_string(out.join("metrics.v1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "reference,candidate,mse,psnr,ssim,nrmse,scale");
    assert!(lines[1].ends_with(",0,inf,1,0,255"), "{}", lines[1]);
}

#[test]
fn gauss_kernel_without_manual_bound_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("in.pgm");
    let mask_path = dir.path().join("mask.pgm");
    write_pgm(&img_path, 6, 6, &gradient(6, 6));
    write_partial_mask(&mask_path, 6, 6);
    let out = dir.path().join("out");

    let res = run(&[
        "inpaint", s(&img_path), "--kernel", "gauss",
        "--mask", s(&mask_path), "--out-dir", s(&out),
    ]);
    assert_eq!(res.status.code(), Some(2), "{}", stderr_of(&res));
    assert!(stderr_of(&res).contains("--kappa"), "{}", stderr_of(&res));
}

#[test]
fn config_file_overrides_defaults_and_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.conf");
    fs::write(&cfg_path, "eta = 30\nseed = 7 # fixed\n").unwrap();

    // The generator bakes eta into the truth sidecar, making the merged
    // value observable from outside.
    let from_file = dir.path().join("file");
    let res = run(&["synth", "--count", "1", "--r", "8",
        "--config", s(&cfg_path), "--out-dir", s(&from_file)]);
    assert!(res.status.success(), "{}", stderr_of(&res));
    let sidecar = fs::read_to_string(from_file.join("synth_000.truth.txt")).unwrap();
    assert!(sidecar.contains("eta 30\n"), "{sidecar}");

    let from_flag = dir.path().join("flag");
    let res = run(&["synth", "--count", "1", "--r", "8",
        "--config", s(&cfg_path), "--eta", "60", "--out-dir", s(&from_flag)]);
    assert!(res.status.success(), "{}", stderr_of(&res));
    let sidecar = fs::read_to_string(from_flag.join("synth_000.truth.txt")).unwrap();
    assert!(sidecar.contains("eta 60\n"), "{sidecar}");

    let bad = run(&["synth", "--config", s(&dir.path().join("missing.conf")), "--out-dir", s(&from_flag)]);
    assert_eq!(bad.status.code(), Some(1), "{}", stderr_of(&bad));
}

#[test]
fn bench_suites_write_versioned_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");

    let res = run(&["bench", "--suite", "inpaint-synth", "--count", "2", "--r", "24",
        "--out-dir", s(&out)]);
    assert!(res.status.success(), "{}", stderr_of(&res));
    let csv = fs::read_to_string(out.join("bench_inpaint_synth.v1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("method,count,r,observed"), "{}", lines[0]);
    assert!(lines[1].starts_with("gki,2,24,"), "{}", lines[1]);
    let md = fs::read_to_string(out.join("bench_inpaint_synth.v1.md")).unwrap();
    assert!(md.starts_with("| method | count | r | observed |"), "{md}");

    let res = run(&["bench", "--suite", "eta-sweep", "--count", "1", "--r", "16",
        "--out-dir", s(&out)]);
    assert!(res.status.success(), "{}", stderr_of(&res));
    let csv = fs::read_to_string(out.join("bench_eta_sweep.v1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7, "{csv}");
}
