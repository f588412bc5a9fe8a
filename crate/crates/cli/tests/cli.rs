use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcausal::fixtures::{named_fixture, FIXTURE_NAMES};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcausal"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn classify_json(path: &Path) -> Value {
    let out = run(&["classify", path.to_str().unwrap(), "--json"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn certificate_kinds(report: &Value) -> Vec<String> {
    report["localizability"]["certificates"]
        .as_array()
        .map(|cs| {
            cs.iter()
                .map(|c| c["kind"].as_str().unwrap().to_string())
                .collect()
        })
        .unwrap_or_default()
}

/// Set `QCAUSAL_BLESS=1` to regenerate the bundled files.
#[test]
fn bundled_fixtures_are_current() {
    let bless = std::env::var_os("QCAUSAL_BLESS").is_some();
    for name in FIXTURE_NAMES {
        let expected = named_fixture(name).unwrap().to_json() + "\n";
        let path = fixture(name);
        if bless {
            std::fs::write(&path, &expected).unwrap();
        }
        let found = std::fs::read_to_string(&path).unwrap_or_default();
        assert!(
            found == expected,
            "{} is stale; rerun with QCAUSAL_BLESS=1",
            path.display()
        );
    }
}

#[test]
fn bundled_fixtures_classify_as_documented() {
    let validator = schema();
    let reports: Vec<(&str, Value)> = FIXTURE_NAMES
        .iter()
        .map(|n| (*n, classify_json(&fixture(n))))
        .collect();
    for (name, r) in &reports {
        if let Err(e) = validator.validate(r) {
            panic!("{name}: report violates schema: {e}");
        }
        let blocked = (
            r["bToA"]["semicausal"].as_bool().unwrap(),
            r["aToB"]["semicausal"].as_bool().unwrap(),
        );
        let status = r["localizability"]["status"].as_str().unwrap();
        match *name {
            "sorkin" => {
                assert!(r["tp"]["tp"].as_bool().unwrap());
                assert_eq!(blocked, (false, false));
                assert!(r["bToA"]["witness"].is_object() && r["aToB"]["witness"].is_object());
            }
            "bell_basis" | "bell_stabilizer" | "werner_twirl" => {
                assert_eq!(blocked, (true, true), "{name}");
                assert_eq!(status, "localizable-by-construction", "{name}");
            }
            "one_way_basis" => assert_eq!(blocked, (true, false)),
            "twisted_hadamard" => {
                assert!(r["causal"].as_bool().unwrap());
                assert!(certificate_kinds(r).contains(&"EigenstateClosure".into()));
            }
            "mismatch_basis" => {
                assert!(r["causal"].as_bool().unwrap());
                assert!(certificate_kinds(r).contains(&"ProjectiveGroup".into()));
            }
            "andbox" => {
                assert!(r["causal"].as_bool().unwrap());
                assert_eq!(certificate_kinds(r), ["game"]);
                assert_eq!(r["gameValue"].as_f64(), Some(1.0));
            }
            other => panic!("no documented verdict for {other}"),
        }
    }
}

#[test]
fn human_report_names_the_verdicts() {
    let out = run(&["classify", fixture("sorkin").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("Bob -> Alice  open"), "{text}");
    assert!(text.contains("witness"), "{text}");
    assert!(text.contains("causal        no"), "{text}");
}

#[test]
fn build_then_classify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str, bool); 6] = [
        (
            &["build", "stabilizer", "+XX", "+ZZ"],
            "localizable-by-construction",
            true,
        ),
        (&["build", "andbox"], "not-localizable", true),
        (
            &["build", "twisted-basis", "--u", "hadamard"],
            "not-localizable",
            true,
        ),
        (&["build", "mismatch"], "not-localizable", true),
        (&["build", "twirl"], "localizable-by-construction", true),
        (
            &["build", "twirl", "--group", "bell"],
            "localizable-by-construction",
            true,
        ),
    ];
    let validator = schema();
    for (k, (args, status, causal)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("artifact{k}.json"));
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", path.to_str().unwrap()]);
        let out = run(&full);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let r = classify_json(&path);
        assert!(validator.is_valid(&r), "{args:?}");
        assert_eq!(r["localizability"]["status"], *status, "{args:?}");
        assert_eq!(r["causal"].as_bool(), Some(*causal), "{args:?}");
    }
}

#[test]
fn untwisted_basis_has_no_obstruction() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("untwisted.json");
    let out = run(&[
        "build",
        "twisted-basis",
        "--u",
        "i",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = classify_json(&path);
    assert_ne!(r["localizability"]["status"], "not-localizable");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let half = r#"{"dimA": 1, "dimB": 1, "kraus": [{"rows": 1, "cols": 1, "data": [[0.5, 0.0]]}]}"#;
    let skewed = r#"{"dimA": 1, "dimB": 2, "vectors": [
        {"rows": 2, "cols": 1, "data": [[1.0, 0.0], [0.0, 0.0]]},
        {"rows": 2, "cols": 1, "data": [[0.6, 0.0], [0.8, 0.0]]}]}"#;
    let cases = [
        (write("half.json", half), 3),
        (write("skewed.json", skewed), 3),
        (write("broken.json", "{\"dimA\": "), 2),
        (write("neither.json", r#"{"dimA": 2, "dimB": 2}"#), 2),
        (dir.path().join("missing.json"), 2),
    ];
    for (path, code) in cases {
        let out = run(&["classify", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(code), "{}", path.display());
    }
    assert_eq!(run(&["demo", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["build", "stabilizer", "+XX", "+XZ"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["build", "stabilizer", "+QQ"]).status.code(), Some(2));
    assert_eq!(
        run(&["classify", "--tol", "-1", "x.json"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn chsh_demo_values() {
    let text = stdout(&run(&["demo", "chsh"]));
    assert!(text.contains("0.75"), "{text}");
    assert_eq!(text.matches("0.853553").count(), 2, "{text}");
}

#[test]
fn ip_demo_prints_the_inner_product() {
    for seed in ["0", "1", "2"] {
        let out = run(&["demo", "ip", "--x", "101", "--y", "110", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        assert!(text.lines().last().unwrap().ends_with(" 1"), "{text}");
    }
}

#[test]
fn one_way_demo_on_bundled_basis() {
    let path = fixture("bell_basis");
    let out = run(&[
        "demo",
        "theorem4",
        "--basis",
        path.to_str().unwrap(),
        "--samples",
        "400",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("\"commDirection\":\"AtoB\""), "{text}");
    assert!(!text.contains("\"commDirection\":\"BtoA\""), "{text}");
    let counted: u64 = text
        .lines()
        .skip_while(|l| !l.starts_with("outcome"))
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(counted, 400);

    let sorkin = fixture("sorkin");
    let out = run(&["demo", "theorem4", "--basis", sorkin.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let acausal = fixture("mismatch_basis");
    assert_eq!(
        run(&[
            "demo",
            "theorem4",
            "--basis",
            acausal.to_str().unwrap(),
            "--samples",
            "5"
        ])
        .status
        .code(),
        Some(0)
    );
}

#[test]
fn swap_and_twisted_demos_are_reproducible() {
    for args in [
        ["demo", "swap", "--seed", "4"],
        ["demo", "twisted", "--seed", "4"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
    let out = stdout(&run(&["demo", "swap", "--input", "01", "--json"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["ab"]["parity"], true);
}
