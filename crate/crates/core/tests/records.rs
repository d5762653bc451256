//! The example documents in `book/src/records` are exactly what the CLI
//! prints. Set `GENUSFORGE_BLESS=1` to rewrite them after a deliberate change.

use std::path::PathBuf;

use genusforge::cli::run_with;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root()
        .join("crates/core/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn record(name: &str) -> PathBuf {
    root().join("book/src/records").join(name)
}

fn cases() -> Vec<(&'static str, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        (
            "check-model.json",
            s(&["check-model", &fixture("reference.json")]),
        ),
        (
            "check-model-invalid.json",
            s(&["check-model", &fixture("asymmetric.json")]),
        ),
        (
            "represent.json",
            s(&["represent", "--a", "3", "--b", "5", "--m", "40"]),
        ),
        (
            "genus-witness.json",
            s(&[
                "witness",
                "--model",
                &fixture("reference.json"),
                "--genus",
                "1000",
            ]),
        ),
        (
            "nodal-witness.json",
            s(&["nodal", "--model", &fixture("plane.json"), "--genus", "100"]),
        ),
        (
            "sweep.json",
            s(&[
                "sweep", "--a", "3", "--b", "5", "--c", "-2", "--from", "0", "--to", "20",
            ]),
        ),
        (
            "g0.json",
            s(&["g0", "--model", &fixture("reference.json"), "--span", "200"]),
        ),
        (
            "verify.json",
            s(&[
                "verify",
                "--model",
                &fixture("reference.json"),
                "--record",
                &record("genus-witness.json").display().to_string(),
            ]),
        ),
    ]
}

fn render(args: &[String]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = ["genusforge".to_string(), "--json".to_string()]
        .into_iter()
        .chain(args.iter().cloned());
    let code = run_with(argv, &mut out, &mut err);
    (code, out)
}

#[test]
fn committed_records_match_cli_output() {
    let bless = std::env::var_os("GENUSFORGE_BLESS").is_some();
    for (name, args) in cases() {
        let (code, out) = render(&args);
        let expected_code = if name.ends_with("-invalid.json") {
            1
        } else {
            0
        };
        assert_eq!(code, expected_code, "{name}");
        let path = record(name);
        if bless {
            std::fs::write(&path, &out).unwrap();
            continue;
        }
        let committed = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(committed == out, "{name} differs from the CLI output");
    }
}

#[test]
fn output_is_deterministic() {
    for (name, args) in cases() {
        assert_eq!(render(&args), render(&args), "{name}");
    }
}

#[test]
fn book_includes_resolve() {
    let src = root().join("book/src");
    for entry in std::fs::read_dir(&src).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "md") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        for piece in text.split("{{#include ").skip(1) {
            let target = piece.split("}}").next().unwrap();
            assert!(
                src.join(target).is_file(),
                "{}: missing {target}",
                path.display()
            );
        }
    }
}
