use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lindblad-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn repo_file(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn temp_file(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("lindblad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

/// Data rows of a CSV document, split into fields.
fn csv_rows(text: &str) -> (String, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn roofline_table() {
    let out = bin(&["roofline", "--dims", "3,9,27"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# lindblad-bench roofline generated="));
    assert!(text
        .lines()
        .next()
        .unwrap()
        .contains("machine_profile=i9-13980HX"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, "d,d2,flops,bytes,ai,placement,ridge_dram,bound");
    let placement: Vec<&str> = rows.iter().map(|r| r[5].as_str()).collect();
    assert_eq!(placement, ["L1", "L2", "L3"]);
    assert_eq!(rows[0][3], "1584");
    assert_eq!(rows[2][3], "8526384");

    let one = stdout(&bin(&["roofline", "--dims", "1"]));
    assert_eq!(csv_rows(&one).1[0][4], "0.1667");
}

#[test]
fn custom_machine_profile() {
    let bundled = std::fs::read_to_string(repo_file("profiles/i9-13980HX.profile")).unwrap();
    let small = bundled
        .replace("cap_l1 = 49152", "cap_l1 = 1024")
        .replace("i9-13980HX", "tiny-l1");
    let path = temp_file("tiny.profile", &small);
    let out = bin(&["roofline", "--dims", "3", "--machine-profile", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("machine_profile=tiny-l1"));
    assert_eq!(csv_rows(&text).1[0][5], "L2");

    let broken = temp_file("broken.profile", "peak_gflops = 128\nbw_l1 = fast\n");
    assert_eq!(
        bin(&["roofline", "--machine-profile", &broken])
            .status
            .code(),
        Some(2)
    );
    let missing = temp_file("missing.profile", "peak_gflops = 128\n");
    assert_eq!(
        bin(&["roofline", "--machine-profile", &missing])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn json_is_a_single_document() {
    for args in [
        &["roofline", "--format", "json"][..],
        &[
            "bench",
            "--dims",
            "3",
            "--variants",
            "soa",
            "--reps",
            "2000",
            "--format",
            "json",
        ],
        &[
            "grape",
            "--segments",
            "2",
            "--steps-per-segment",
            "1",
            "--format",
            "json",
        ],
        &["verify", "--steps", "10", "--format", "json"],
        &["dump", "--format", "json"],
    ] {
        let out = bin(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert!(doc.is_object());
    }
}

#[test]
fn bench_single_cell() {
    let out = bin(&[
        "bench",
        "--dims",
        "3",
        "--variants",
        "soa",
        "--reps",
        "5000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header,
        "profile,dim,variant,reps,warmup,ns_per_step,gflops,gbs,checksum_re,checksum_im"
    );
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][1..5], ["3", "soa", "5000", "10"]);
    let ns: f64 = rows[0][5].parse().unwrap();
    let gbs: f64 = rows[0][7].parse().unwrap();
    assert!((gbs - 1584.0 / ns).abs() <= 1e-9 * gbs);
}

#[test]
fn bench_rows_are_dim_major() {
    let out = bin(&["bench", "--dims", "3,9", "--reps", "2000", "--warmup", "0"]);
    let code = out.status.code().unwrap();
    let (_, rows) = csv_rows(&stdout(&out));
    let cells: Vec<(String, String)> = rows.iter().map(|r| (r[1].clone(), r[2].clone())).collect();
    let failed = stdout(&out)
        .lines()
        .filter(|l| l.starts_with("# failed"))
        .count();
    assert_eq!(cells.len() + failed, 6);
    assert_eq!(code, if failed == 0 { 0 } else { 3 });
    let mut sorted = cells.clone();
    sorted.sort_by_key(|(d, v)| {
        (
            d.parse::<usize>().unwrap(),
            ["aos", "soa", "simd"].iter().position(|x| x == v),
        )
    });
    assert_eq!(cells, sorted);
}

#[test]
fn checksum_is_seed_determined() {
    let run = |seed: &str| {
        let out = bin(&[
            "bench",
            "--dims",
            "3",
            "--variants",
            "aos",
            "--reps",
            "3000",
            "--seed",
            seed,
        ]);
        let (_, rows) = csv_rows(&stdout(&out));
        (rows[0][8].clone(), rows[0][9].clone())
    };
    assert_eq!(run("9"), run("9"));
    assert_ne!(run("9"), run("10"));
}

#[test]
fn grape_row() {
    let out = bin(&[
        "grape",
        "--dim",
        "3",
        "--segments",
        "1",
        "--steps-per-segment",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, "d,segments,build_ms,chain_ms,points_per_s");
    let f: Vec<f64> = rows[0].iter().map(|x| x.parse().unwrap()).collect();
    assert_eq!((f[0], f[1]), (3.0, 1.0));
    assert!(f[2] > 0.0 && f[3] > 0.0);
    assert!((f[4] - 1000.0 / (f[2] + f[3])).abs() <= 1e-9 * f[4]);

    let synthetic = bin(&["grape", "--dim", "2", "--segments", "3"]);
    assert_eq!(synthetic.status.code(), Some(0));
    let model = repo_file("models/amplitude_damping.model");
    assert_eq!(
        bin(&["grape", "--dim", "3", "--model", &model])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin(&["grape", "--segments", "0"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let out = bin(&["verify", "--steps", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert!(header.starts_with("variant,steps,dt,trace_error"));
    assert_eq!(rows[0][7], "true");

    let zero = bin(&["verify", "--steps", "0", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&zero)).unwrap();
    assert_eq!(doc["trace_error"], 0.0);
    assert_eq!(doc["steps"], 0);

    let bad_h = temp_file(
        "bad_h.model",
        "dim = 2\nhamiltonian = complex-matrix 2 2\n0 0\n1 0\n0 0\n0 0\n",
    );
    assert_eq!(bin(&["verify", "--model", &bad_h]).status.code(), Some(2));

    let bad_rho = temp_file(
        "bad_rho.model",
        "dim = 1\nhamiltonian = complex-matrix 1 1\n0 0\ninitial = complex-matrix 1 1\n2 0\n",
    );
    assert_eq!(
        bin(&["verify", "--model", &bad_rho, "--steps", "5"])
            .status
            .code(),
        Some(1)
    );

    for variant in ["aos", "soa", "simd"] {
        let code = bin(&[
            "verify",
            "--model",
            &repo_file("models/amplitude_damping.model"),
            "--variant",
            variant,
        ])
        .status
        .code();
        if variant != "simd" || code != Some(2) {
            assert_eq!(code, Some(0), "{variant}");
        }
    }
}

#[test]
fn dump_amplitude_damping() {
    let model = repo_file("models/amplitude_damping.model");
    let out = bin(&["dump", "--model", &model, "--what", "lindbladian"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("complex-matrix 4 4\n"));
    let re: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    let want = [
        0.0, 0.0, 0.0, 1.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, -1.0,
    ];
    assert_eq!(re, want);

    let id = stdout(&bin(&[
        "dump",
        "--model",
        &model,
        "--what",
        "propagator",
        "--dt",
        "0",
    ]));
    let first: Vec<&str> = id.lines().skip(1).take(2).collect();
    assert_eq!(
        first,
        [
            "1.0000000000000000e0 0.0000000000000000e0",
            "0.0000000000000000e0 0.0000000000000000e0"
        ]
    );
}

#[test]
fn dump_hamiltonian_only_is_anti_hermitian() {
    let model = temp_file(
        "h_only.model",
        "dim = 2\nhamiltonian = complex-matrix 2 2\n1 0\n0.5 -0.25\n0.5 0.25\n-1 0\n",
    );
    let out = bin(&["dump", "--model", &model, "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let data: Vec<(f64, f64)> = doc["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect();
    for i in 0..4 {
        for j in 0..4 {
            let (a, b) = (data[i * 4 + j], data[j * 4 + i]);
            assert_eq!((a.0, a.1), (-b.0, b.1));
        }
    }
}

#[test]
fn input_errors_exit_2() {
    for args in [
        &["roofline", "--bogus"][..],
        &["roofline", "--dims", "0"],
        &["bench", "--variants", "neon"],
        &["bench", "--reps", "0"],
        &["verify", "--model", "/nonexistent/model"],
        &["verify", "--dt", "-1"],
        &["dump", "--format", "xml"],
    ] {
        assert_eq!(bin(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("lindblad-cli-out-{}.csv", std::process::id()));
    let out = bin(&["roofline", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .contains("memory_bound"));
    std::fs::remove_file(path).ok();
}
