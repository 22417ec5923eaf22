use std::path::Path;
use std::process::{Command, Output};

fn mpdct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpdct"))
        .args(args)
        .env_remove("MPDCT_CORPUS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn metric_row(args: &[&str]) -> Vec<String> {
    let out = mpdct(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("label,epsilon,mse,cg_db,eta_pct,adds,shifts")
    );
    lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect()
}

fn close(field: &str, want: f64) -> bool {
    (field.parse::<f64>().unwrap() - want).abs() < 1e-3
}

fn write_test_image(path: &Path, w: usize, h: usize) {
    let img =
        mpdct::codec::GrayImage::from_fn(w, h, |x, y| ((x * 5 + y * 3 + (x * y) % 7) % 256) as u8);
    img.write(path).unwrap();
}

#[test]
fn metrics_builtin_rows() {
    let row = metric_row(&["metrics", "--builtin", "rdct"]);
    assert!(
        close(&row[1], 1.7945)
            && close(&row[2], 0.0098)
            && close(&row[3], 8.1827)
            && close(&row[4], 87.4297)
    );
    assert_eq!(&row[5..], ["22", "0"]);

    let row = metric_row(&["metrics", "--builtin", "mrdct", "--size", "16"]);
    assert!(close(&row[1], 29.7486) && close(&row[4], 66.0681));
    assert_eq!(&row[5..], ["44", "0"]);

    let row = metric_row(&["metrics", "--builtin", "j7", "--size", "32"]);
    assert!(close(&row[1], 50.4638) && close(&row[3], 8.7429));
    assert_eq!(&row[5..], ["152", "16"]);

    let row = metric_row(&["metrics", "--builtin", "dct"]);
    assert_eq!(row[1], "0.000000");
    assert_eq!(&row[5..], ["", ""]);
}

#[test]
fn metrics_argument_errors() {
    assert!(!mpdct(&["metrics", "--builtin", "nope"]).status.success());
    assert!(!mpdct(&["metrics", "--builtin", "j7", "--size", "12"])
        .status
        .success());
    assert!(!mpdct(&["metrics"]).status.success());
    assert!(!mpdct(&["metrics", "--builtin", "j7", "--rho", "1"])
        .status
        .success());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kernel");
    std::fs::write(&bad, "size 8\nmatrix\n1 2\n").unwrap();
    let out = mpdct(&["metrics", "--kernel-file", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn search_writes_front_and_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("front");
    let out = mpdct(&[
        "search",
        "--rho",
        "0.95",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("catalogued optima on the front: 7/7"));
    assert!(text.contains("surplus: 3"));

    let csv = std::fs::read_to_string(out_dir.join("front.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.contains(",yes,")).count(), 7);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("front.json")).unwrap())
            .unwrap();
    assert_eq!(json["stats"]["orthogonal"], 169);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "search");
    assert_eq!(manifest["parameters"]["rho"], 0.95);

    let j7 = out_dir.join("kernels").join("j7.kernel");
    let row = metric_row(&[
        "metrics",
        "--kernel-file",
        j7.to_str().unwrap(),
        "--size",
        "16",
    ]);
    assert!(close(&row[1], 15.8124));
    assert_eq!(&row[5..], ["60", "8"]);

    let scan_dir = dir.path().join("scan");
    assert!(mpdct(&[
        "search",
        "--mode",
        "scan",
        "--workers",
        "2",
        "--out",
        scan_dir.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        std::fs::read_to_string(scan_dir.join("front.csv")).unwrap(),
        csv
    );
}

#[test]
fn search_rejects_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    for args in [["--rho", "1.5"], ["--mode", "fast"], ["--workers", "-1"]] {
        let mut full = vec!["search"];
        full.extend(args);
        full.extend(["--out", out.to_str().unwrap()]);
        assert!(!mpdct(&full).status.success(), "{args:?}");
    }
}

#[test]
fn compress_reports_scores_and_writes_image() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in.pgm");
    write_test_image(&src, 64, 64);
    let dst = dir.path().join("out.pgm");
    let out = mpdct(&[
        "compress",
        src.to_str().unwrap(),
        "--builtin",
        "j7",
        "--N",
        "8",
        "--r",
        "10",
        "--out",
        dst.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("psnr_db=") && text.contains("ssim="));
    assert!(dst.exists());
    assert!(dir.path().join("out.pgm.manifest.json").exists());

    let lossless = mpdct(&[
        "compress",
        src.to_str().unwrap(),
        "--builtin",
        "dct",
        "--N",
        "8",
        "--r",
        "64",
    ]);
    assert!(stdout(&lossless).contains("psnr_db=inf"));

    assert!(!mpdct(&[
        "compress",
        src.to_str().unwrap(),
        "--builtin",
        "j7",
        "--r",
        "0"
    ])
    .status
    .success());
    assert!(!mpdct(&[
        "compress",
        src.to_str().unwrap(),
        "--builtin",
        "j7",
        "--r",
        "65"
    ])
    .status
    .success());
    let junk = dir.path().join("junk.pgm");
    std::fs::write(&junk, b"P5 junk").unwrap();
    assert!(!mpdct(&[
        "compress",
        junk.to_str().unwrap(),
        "--builtin",
        "j7",
        "--r",
        "4"
    ])
    .status
    .success());
}

#[test]
fn compress_checks_block_multiples() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("odd.pgm");
    write_test_image(&src, 40, 24);
    let path = src.to_str().unwrap();
    assert!(!mpdct(&[
        "compress",
        path,
        "--builtin",
        "rdct",
        "--N",
        "16",
        "--r",
        "8"
    ])
    .status
    .success());
    assert!(mpdct(&[
        "compress",
        path,
        "--builtin",
        "rdct",
        "--N",
        "16",
        "--r",
        "8",
        "--pad"
    ])
    .status
    .success());
}

#[test]
fn curves_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    for i in 0..2 {
        write_test_image(&corpus.join(format!("{i}.pgm")), 32 + 16 * i, 32);
    }
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = mpdct(&[
            "curves",
            corpus.to_str().unwrap(),
            "--kernels",
            "mrdct,j7,dct",
            "--r-max",
            "12",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let mut lines = a.lines();
    assert_eq!(
        lines.next(),
        Some("kernel,N,r,rate,psnr_db,ssim,psnr_per_add,ssim_per_add")
    );
    assert_eq!(lines.count(), 3 * 12);
    assert!(dir.path().join("a.csv.manifest.json").exists());

    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let out = mpdct(&[
        "curves",
        empty.to_str().unwrap(),
        "--out",
        dir.path().join("c.csv").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty corpus"));
}

#[test]
fn curves_reads_corpus_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    write_test_image(&dir.path().join("a.pgm"), 16, 16);
    let out_csv = dir.path().join("env.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_mpdct"))
        .args([
            "curves",
            "--kernels",
            "rdct",
            "--r-max",
            "2",
            "--out",
            out_csv.to_str().unwrap(),
        ])
        .env("MPDCT_CORPUS", dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(std::fs::read_to_string(out_csv).unwrap().lines().count(), 3);
    assert!(!mpdct(&["curves", "--kernels", "rdct"]).status.success());
}
