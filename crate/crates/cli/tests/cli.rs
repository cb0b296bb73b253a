use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use weylscope::examples;
use weylscope::pencil::{hyperbolicity_check, DEFAULT_DIRECTIONS};
use weylscope::weyl::Gaussian;
use weylscope::MatrixTuple;
use weylscope_cli::run;
use weylscope_cli::tuple_file::{load_tuple, TupleFile};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

const FIXTURES: [&str; 6] = [
    "pauli",
    "diagpair",
    "nilpair",
    "example63",
    "pauli2",
    "skew",
];

fn ws(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["weylscope", "-o", out.to_str().unwrap()];
    argv.extend_from_slice(args);
    run(argv)
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn manifest(dir: &Path, prefix: &str) -> Value {
    serde_json::from_str(&read(dir.join(format!("{prefix}.manifest.json")))).unwrap()
}

fn same_matrices(a: &MatrixTuple, b: &MatrixTuple) -> bool {
    a.n() == b.n()
        && a.dim() == b.dim()
        && a.matrices().iter().zip(b.matrices()).all(|(x, y)| x == y)
}

#[test]
fn fixtures_round_trip_and_meet_expectations() {
    for name in FIXTURES {
        let text = read(PathBuf::from(fixture(name)));
        let file = TupleFile::from_json(&text).unwrap();
        assert_eq!(
            TupleFile::from_json(&file.to_json()).unwrap(),
            file,
            "{name}"
        );
        let a = file.to_tuple().unwrap();
        assert_eq!(
            TupleFile::from_tuple(&a, file.expected_properties),
            file,
            "{name}"
        );
        let report = hyperbolicity_check(&a, DEFAULT_DIRECTIONS, 1e-8);
        assert!(
            file.property_mismatches(&a, Some(&report)).is_empty(),
            "{name}"
        );
    }
}

#[test]
fn fixtures_hold_the_named_tuples() {
    let pairs = [
        ("pauli", examples::pauli()),
        ("diagpair", examples::diagpair()),
        ("nilpair", examples::nilpair()),
        ("example63", examples::example63()),
        ("pauli2", examples::pauli2([1.5, 0.5])),
    ];
    for (name, t) in pairs {
        let loaded = load_tuple(&fixture(name)).unwrap();
        assert!(same_matrices(&loaded.tuple, &t), "{name}");
        assert_eq!(loaded.stem, name);
        assert!(loaded.warnings.is_empty());
    }
    let b = load_tuple("builtin:pauli2(1.5,0.5)").unwrap();
    assert!(same_matrices(&b.tuple, &examples::pauli2([1.5, 0.5])));
}

#[test]
fn ragged_and_malformed_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = r#"{"n": 1, "N": 2, "matrices": [[[[1,0],[0,0]], [[0,0]]]]}"#;
    let err = TupleFile::from_json(ragged).unwrap_err().to_string();
    assert!(err.contains("matrices[0][1]"), "{err}");
    let bad_pair = r#"{"n": 1, "N": 1, "matrices": [[[[1]]]]}"#;
    let err = TupleFile::from_json(bad_pair).unwrap_err().to_string();
    assert!(err.contains("line 1"), "{err}");
    assert!(TupleFile::from_json(r#"{"n": 2, "N": 1, "matrices": [[[[1,0]]]]}"#).is_err());

    let path = dir.path().join("ragged.json");
    std::fs::write(&path, ragged).unwrap();
    assert_eq!(
        ws(dir.path(), &["check-hyperbolic", path.to_str().unwrap()]),
        1
    );
    assert_eq!(
        ws(dir.path(), &["check-hyperbolic", "/nonexistent/tuple.json"]),
        1
    );
}

#[test]
fn hermitian_flag_is_computed_not_trusted() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = TupleFile::from_tuple(&examples::nilpair(), None);
    file.name = Some("liar".into());
    file.expected_properties = Some(weylscope_cli::tuple_file::ExpectedProperties {
        hermitian: Some(true),
        hyperbolic: None,
    });
    let path = dir.path().join("liar.json");
    std::fs::write(&path, file.to_json()).unwrap();
    let loaded = load_tuple(path.to_str().unwrap()).unwrap();
    assert!(!loaded.tuple.is_hermitian());
    assert_eq!(loaded.warnings.len(), 1);
    assert_eq!(
        ws(dir.path(), &["check-hyperbolic", path.to_str().unwrap()]),
        0
    );
    let m = manifest(dir.path(), "liar.check-hyperbolic");
    assert!(m["warnings"][0].as_str().unwrap().contains("hermitian"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(ws(d, &["check-hyperbolic", &fixture("pauli")]), 0);
    let v: Value = serde_json::from_str(&read(d.join("pauli.check-hyperbolic.json"))).unwrap();
    assert_eq!(v["verdict"], "hyperbolic");

    assert_eq!(ws(d, &["check-hyperbolic", &fixture("skew")]), 0);
    let v: Value = serde_json::from_str(&read(d.join("skew.check-hyperbolic.json"))).unwrap();
    assert_eq!(v["verdict"], "not_hyperbolic");
    assert_eq!(
        ws(
            d,
            &[
                "weyl-apply",
                &fixture("skew"),
                "--fn",
                "builtin:gauss(0,0,0.3)"
            ]
        ),
        3
    );
    assert!(!d.join("skew.weyl-apply.csv").exists());

    assert_eq!(ws(d, &["kippenhahn", &fixture("nilpair")]), 3);
    assert_eq!(ws(d, &["kippenhahn", &fixture("pauli")]), 1);
    assert_eq!(ws(d, &["no-such-command"]), 1);
    assert_eq!(
        ws(
            d,
            &[
                "weyl-apply",
                &fixture("pauli"),
                "--fn",
                "builtin:gauss(0,0.3)"
            ]
        ),
        1
    );
    assert_eq!(
        ws(d, &["cauchy-scan", &fixture("pauli"), "--grid", "0:1"]),
        1
    );
    assert_eq!(
        ws(d, &["lacuna", "builtin:nosuch", "--grid", "-1:1:4x-1:1:4"]),
        1
    );
    assert_eq!(ws(d, &["--help"]), 0);
}

#[test]
fn outputs_reference_their_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        ws(
            d,
            &["kippenhahn", &fixture("example63"), "--theta-count", "32"]
        ),
        0
    );
    let m = manifest(d, "example63.kippenhahn");
    let hash = m["hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(m["outputs"][0], "example63.kippenhahn.csv");
    let csv = read(d.join("example63.kippenhahn.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), format!("# manifest {hash}"));
    assert_eq!(
        lines.next().unwrap(),
        "theta,branch,x1,x2,tangent_c,tangent_d,tangent_mu,flag"
    );
    assert_eq!(lines.count(), 32 * 3);

    // wall time differs between runs, the hash does not
    let again = tempfile::tempdir().unwrap();
    assert_eq!(
        ws(
            again.path(),
            &["kippenhahn", &fixture("example63"), "--theta-count", "32"]
        ),
        0
    );
    assert_eq!(manifest(again.path(), "example63.kippenhahn")["hash"], hash);
    assert_eq!(
        ws(
            again.path(),
            &["kippenhahn", &fixture("example63"), "--theta-count", "33"]
        ),
        0
    );
    assert_ne!(manifest(again.path(), "example63.kippenhahn")["hash"], hash);
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        ws(
            d,
            &[
                "numrange",
                &fixture("pauli"),
                "--samples",
                "50",
                "--seed",
                "5"
            ]
        ),
        0
    );
    let csv = read(d.join("pauli.numrange.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(&lines[1..4], &["# seed 5", "# M 50", "x_1,x_2,x_3"]);
    assert_eq!(lines.len(), 4 + 50);
    for line in &lines[4..] {
        let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let r: f64 = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
        // the Pauli range is the unit sphere
        assert!((r - 1.0).abs() < 1e-12);
        for v in line.split(',') {
            let mantissa = v.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(
                mantissa.chars().filter(char::is_ascii_digit).count(),
                17,
                "{v}"
            );
        }
    }
}

fn csv_bytes(threads: &str, args: &[&str], file: &str) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let mut argv = vec!["--threads", threads];
    argv.extend_from_slice(args);
    assert_eq!(ws(dir.path(), &argv), 0);
    std::fs::read(dir.path().join(file)).unwrap()
}

#[test]
fn identical_runs_give_identical_csv() {
    let cases: [(&[&str], &str); 3] = [
        (
            &[
                "numrange",
                "builtin:example63",
                "--samples",
                "2000",
                "--seed",
                "11",
            ],
            "example63.numrange.csv",
        ),
        (
            &[
                "cauchy-scan",
                "builtin:pauli_pair",
                "--grid",
                "-1.4:1.4:5x-1.4:1.4:5",
                "--eps-list",
                "0.2,0.1,0.05",
            ],
            "pauli_pair.cauchy-scan.csv",
        ),
        (
            &[
                "weyl-apply",
                "builtin:pauli",
                "--fn",
                "builtin:gauss(0.1,0,0,0.25)",
            ],
            "pauli.weyl-apply.csv",
        ),
    ];
    for (args, file) in cases {
        let one = csv_bytes("1", args, file);
        assert_eq!(one, csv_bytes("1", args, file), "{file}");
        assert_eq!(one, csv_bytes("3", args, file), "{file} with 3 threads");
    }
    let a = csv_bytes(
        "1",
        &[
            "numrange",
            "builtin:pauli",
            "--samples",
            "10",
            "--seed",
            "1",
        ],
        "pauli.numrange.csv",
    );
    let b = csv_bytes(
        "1",
        &[
            "numrange",
            "builtin:pauli",
            "--samples",
            "10",
            "--seed",
            "2",
        ],
        "pauli.numrange.csv",
    );
    assert_ne!(a, b);
}

#[test]
fn grid_file_matches_builtin_gauss() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = examples::pauli_pair();
    let g = Gaussian::new(vec![0.2, -0.1], 0.3).grid_for(&a).unwrap();
    let grid = serde_json::json!({
        "origin": g.origin,
        "spacing": g.spacing,
        "shape": g.shape,
        "values": g.values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    });
    let path = d.join("gauss.json");
    std::fs::write(&path, grid.to_string()).unwrap();
    let builtin = csv_bytes(
        "1",
        &[
            "weyl-apply",
            "builtin:pauli_pair",
            "--fn",
            "builtin:gauss(0.2,-0.1,0.3)",
        ],
        "pauli_pair.weyl-apply.csv",
    );
    assert_eq!(
        ws(
            d,
            &[
                "weyl-apply",
                "builtin:pauli_pair",
                "--fn",
                path.to_str().unwrap()
            ]
        ),
        0
    );
    let from_file = std::fs::read(d.join("pauli_pair.weyl-apply.csv")).unwrap();
    // only the manifest line differs
    let body = |b: &[u8]| {
        String::from_utf8(b.to_vec())
            .unwrap()
            .lines()
            .skip(1)
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&builtin), body(&from_file));
    let m = manifest(d, "pauli_pair.weyl-apply");
    assert!(m["results"]["error_estimate"].as_f64().unwrap() < 1e-6);
}

#[test]
fn lacuna_report_for_example63() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        ws(
            d,
            &[
                "lacuna",
                &fixture("example63"),
                "--grid",
                "-2:2:200x-2:2:200"
            ]
        ),
        0
    );
    let rep: Value = serde_json::from_str(&read(d.join("example63.lacuna.json"))).unwrap();
    let lacunas = rep["lacunas"].as_array().unwrap();
    assert!(!lacunas.is_empty());
    let m = manifest(d, "example63.lacuna");
    assert_eq!(rep["manifest"], m["hash"]);
    let csv = read(d.join("example63.lacuna.csv"));
    assert_eq!(
        csv.lines().nth(1).unwrap(),
        "x1,x2,inside_hull,classification"
    );
    assert_eq!(csv.lines().count(), 2 + 200 * 200);
    assert!(csv.contains(",true,vanishing"));
    assert!(csv.contains(",false,unscanned"));
}

#[test]
fn wavefront_of_example63_has_a_segment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(ws(d, &["wavefront", &fixture("example63")]), 0);
    let csv = read(d.join("example63.wavefront.csv"));
    let seg: Vec<&str> = csv.lines().filter(|l| l.contains(",segment,")).collect();
    assert!(seg.len() >= 2, "{}", seg.len());
}

#[test]
fn binary_honours_thread_env_and_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_weylscope");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let status = Command::new(exe)
        .args(["-o", d, "numrange", "builtin:pauli", "--samples", "10"])
        .env("WEYLSCOPE_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(manifest(dir.path(), "pauli.numrange")["threads"], 2);
    let status = Command::new(exe)
        .args([
            "-o",
            d,
            "--threads",
            "1",
            "numrange",
            "builtin:pauli",
            "--samples",
            "10",
        ])
        .env("WEYLSCOPE_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(manifest(dir.path(), "pauli.numrange")["threads"], 1);
    let out = Command::new(exe)
        .args(["-o", d, "numrange", "builtin:pauli"])
        .env("WEYLSCOPE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let out = Command::new(exe)
        .args([
            "-o",
            d,
            "weyl-apply",
            &fixture("skew"),
            "--fn",
            "builtin:gauss(0,0,0.3)",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not hyperbolic"));
}
