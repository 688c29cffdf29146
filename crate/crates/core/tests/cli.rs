use std::path::PathBuf;
use std::process::Command;

use warpcurv::cli::specfile::{forms_from_text, load_spec_text, parse_spec_text};
use warpcurv::cli::{load_spec, run, shipped_example1, Loaded, PSI3_FORMS};
use warpcurv::theorems::example1::{base_metric, printed_forms, unit_psi, warped_spec};
use warpcurv::theorems::FormName;

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn spec(name: &str) -> String {
    specs().join(name).display().to_string()
}

fn no_files(name: &str) -> Result<(String, String), String> {
    Err(format!("no file {name}"))
}

fn load_err(text: &str) -> warpcurv::cli::SpecError {
    match load_spec_text("t.spec", text, &no_files) {
        Ok(_) => panic!("expected an error"),
        Err(e) => e,
    }
}

#[test]
fn shipped_base_spec_parses_to_the_example_base() {
    let loaded = load_spec(&specs().join("example1_base.spec")).unwrap();
    let Loaded::Metric(m) = loaded else { panic!("plain metric expected") };
    assert_eq!(m.chart().names().collect::<Vec<_>>(), ["x1", "x2", "x3"]);
    assert!(m.g().sub(base_metric().g()).is_exact_zero());
}

#[test]
fn shipped_warped_spec_matches_builder() {
    let (w, full) = shipped_example1().unwrap();
    let built = warped_spec();
    assert!(w.metric().g().sub(built.metric().g()).is_exact_zero());
    assert!(full.g().sub(built.metric().g()).is_exact_zero());
    let from_disk = load_spec(&specs().join("example1_warped.spec")).unwrap();
    assert!(matches!(from_disk, Loaded::Warped(_)));
}

#[test]
fn psi3_forms_equal_the_printed_family() {
    let chart = warped_spec().chart().clone();
    let shipped = forms_from_text("psi3.forms", PSI3_FORMS, &chart).unwrap().symbolic();
    let printed = printed_forms(&unit_psi(2)).symbolic();
    for n in FormName::ALL {
        assert_eq!(shipped.get(n), printed.get(n), "{}", n.as_str());
    }
}

#[test]
fn empty_metric_section_is_rejected() {
    let e = load_err("[chart]\nx y\n[metric]\n# nothing\n");
    assert!(e.message.contains("no components"), "{e}");
    assert_eq!(e.line, 3);
}

#[test]
fn conflicting_symmetric_assignment_is_rejected() {
    let e = load_err("[chart]\nx1 x2\n[metric]\ng11 = 1\ng22 = 1\ng12 = exp(x1)\ng21 = exp(x2)\n");
    assert!(e.message.contains("symmetry conflict"), "{e}");
    assert_eq!(e.line, 7);
}

#[test]
fn consistent_symmetric_assignment_is_accepted() {
    let text = "[chart]\nx1 x2\n[metric]\ng11 = 2\ng22 = 2\ng12 = exp(x1)/2\ng21 = 1/2*exp(x1)\n";
    let Loaded::Metric(m) = load_spec_text("t.spec", text, &no_files).unwrap() else { panic!() };
    assert_eq!(m.g().get(&[0, 1]), m.g().get(&[1, 0]));
    assert!(!m.g().get(&[0, 1]).is_zero());
}

#[test]
fn unknown_coordinate_is_reported_with_position() {
    let e = load_err("[chart]\nx y\n[metric]\ng11 = exp(z)\ng22 = 1\n");
    assert_eq!(e.line, 4);
    assert!(e.message.contains('z'), "{e}");
}

#[test]
fn syntax_error_points_at_column() {
    let e = load_err("[chart]\nx y\n[metric]\ng11 = exp(x\ng22 = 1\n");
    assert_eq!(e.line, 4);
    assert!(e.column >= 7, "{e}");
}

#[test]
fn named_indices_and_comments() {
    let text = "# flat\n[chart]\nx, y\n\n[metric]\ng_x_x = 1  # trailing\ng_y_y = 1\n";
    let Loaded::Metric(m) = load_spec_text("t.spec", text, &no_files).unwrap() else { panic!() };
    assert!(m.is_flat());
}

#[test]
fn squared_convention_is_rejected() {
    let text = "[warped]\nbase = b.spec\nfiber = f.spec\nf = exp(x1)\nconvention = squared\n";
    let e = load_err(text);
    assert!(e.message.contains("convention"), "{e}");
}

#[test]
fn unknown_section_is_a_syntax_error() {
    let e = parse_spec_text("t.spec", "[chart]\nx\n[metrc]\n").unwrap_err();
    assert_eq!((e.line, e.column), (3, 2));
}

#[test]
fn example1_exits_zero() {
    let out = run(["warpcurv", "example1"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    for needle in ["SGK4", "HGK4", "WGK4", "base K3", "S̄_11"] {
        assert!(out.stdout.contains(needle), "missing {needle}");
    }
}

#[test]
fn example1_json_has_schema_and_discrepancies() {
    let out = run(["warpcurv", "example1", "--format", "json"]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "example1");
    let verdict = |name: &str| -> String {
        v["verdicts"]
            .as_array()
            .unwrap()
            .iter()
            .find(|x| x["name"] == name)
            .map(|x| x["verdict"].as_str().unwrap().to_string())
            .unwrap_or_default()
    };
    assert_eq!(verdict("SGK4"), "Holds");
    assert_eq!(verdict("HGK4"), "Fails");
    assert_eq!(verdict("WGK4"), "Fails");
    assert_eq!(verdict("base K3"), "Holds");
    let q: Vec<&str> = v["paper_discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["quantity"].as_str().unwrap())
        .collect();
    assert!(q.contains(&"S̄_11") && q.contains(&"S̄_22"), "{q:?}");
    for key in ["tolerances", "residuals", "recovered_forms", "flags", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn classify_flat_is_vacuous_and_exits_zero() {
    let out = run(["warpcurv", "classify", &spec("flat3.spec"), "--format", "json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let verdicts = v["verdicts"].as_array().unwrap();
    assert!(!verdicts.is_empty());
    assert!(verdicts.iter().all(|x| x["verdict"] == "VacuouslyExcluded"));
}

#[test]
fn theorem41_on_shipped_files_holds() {
    let out = run([
        "warpcurv",
        "theorem41",
        &spec("example1_warped.spec"),
        "--forms",
        &spec("psi3.forms"),
        "--format",
        "json",
    ]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let verdicts = v["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 8);
    assert!(verdicts.iter().all(|x| x["verdict"].as_str().unwrap().starts_with("Holds")));
}

#[test]
fn failing_verdict_exits_one() {
    let out = run(["warpcurv", "classify", &spec("example1.spec"), "--structures", "hgk"]);
    assert_eq!(out.code, 1, "{}", out.stdout);
    let out = run(["warpcurv", "theorem41", &spec("example1_warped.spec"), "--forms", &spec("psi3.forms"), "--variant", "hgk"]);
    assert_eq!(out.code, 1, "{}", out.stdout);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(["warpcurv"]).code, 2);
    assert_eq!(run(["warpcurv", "frobnicate"]).code, 2);
    assert_eq!(run(["warpcurv", "curvature", "/nonexistent.spec"]).code, 2);
    assert_eq!(run(["warpcurv", "classify", &spec("flat3.spec"), "--structures", "xyz"]).code, 2);
    assert_eq!(run(["warpcurv", "warped-check", &spec("flat3.spec")]).code, 2);
    let out = run(["warpcurv", "theorem41", &spec("example1_warped.spec"), "--forms", &spec("example1.spec")]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("no [forms]"), "{}", out.stderr);
}

#[test]
fn json_reports_are_byte_identical() {
    let cases: Vec<Vec<String>> = vec![
        vec!["example1".into()],
        vec!["classify".into(), spec("example1.spec"), "--samples".into(), "6".into()],
        vec!["warped-check".into(), spec("example1_warped.spec")],
        vec!["roter".into(), spec("example1_base.spec"), "--samples".into(), "4".into()],
        vec!["curvature".into(), spec("example1_base.spec")],
    ];
    for c in cases {
        let mut args = vec!["warpcurv".to_string()];
        args.extend(c);
        args.extend(["--format".into(), "json".into()]);
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn seed_is_echoed() {
    let out = run(["warpcurv", "classify", &spec("example1.spec"), "--seed", "7", "--samples", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["tolerances"]["samples"], 4);
}

#[test]
fn curvature_lists_components() {
    let out = run(["warpcurv", "curvature", &spec("example1_base.spec"), "--format", "json"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let r = v["details"]["riemann"].as_array().unwrap();
    assert!(r.iter().any(|c| c["index"] == "1212"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_warpcurv");
    let st = Command::new(bin).args(["classify", &spec("flat3.spec")]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let st = Command::new(bin).args(["classify"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}
