use std::process::Command;

use serde_json::Value;
use z3orb::catalog::identities;
use z3orb::quotient::Status;
use z3orb_verify::*;

fn config(suite: Suite, max_weight: i64) -> SuiteConfig {
    SuiteConfig {
        suite,
        max_weight,
        ..SuiteConfig::default()
    }
}

fn item<'a>(r: &'a RunReport, id: &str) -> &'a Item {
    r.items.iter().find(|i| i.id == id).unwrap_or_else(|| panic!("no item {id}"))
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_z3orb-verify"));
    c.env_remove(CONFIG_ENV);
    c
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("z3orb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn quotient_at_weight_six() {
    let r = run_suite(&config(Suite::Quotient, 6));
    assert_eq!(item(&r, "2γ(6)").status, Status::Verified);
    assert_eq!(item(&r, "γ(2)^3").status, Status::Verified);
    assert_eq!(r.exit_code, 0);
    let ids: Vec<_> = r.items.iter().map(|i| i.id.clone()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn fusion_suite() {
    let r = run_suite(&config(Suite::Fusion, 14));
    assert_eq!(item(&r, "N_{3,3}^6 = 1").status, Status::Verified);
    assert_eq!(item(&r, "N_{3,6}^0 = 1").status, Status::Verified);
    assert_eq!(r.exit_code, 0);
}

#[test]
fn empty_catalog() {
    let r = run_catalog("all", &[]);
    assert!(r.items.is_empty());
    assert_eq!(r.exit_code, 0);
    let json = String::from_utf8(emit_report(&r, Format::Json)).unwrap();
    assert!(json.starts_with(r#"{"suite":"all","items":[],"exit_code":0,"elapsed_ms":"#), "{json}");
}

#[test]
fn refutation_carries_residual() {
    let cat: Vec<_> = identities(8).into_iter().filter(|i| i.id == "60γ(8)").collect();
    let r = run_catalog("quotient", &cat);
    assert_eq!(r.exit_code, 1);
    let it = &r.items[0];
    assert_eq!(it.status, Status::Refuted);
    let residual = it.payload["residual"].as_array().unwrap();
    assert!(!residual.is_empty());
    let v: Value = serde_json::from_slice(&emit_report(&r, Format::Json)).unwrap();
    assert_eq!(v["items"][0]["expectation"], "verify-or-report");
    assert_eq!(v["items"][0]["expected_source"], "paper");
}

#[test]
fn json_is_deterministic() {
    let cfg = config(Suite::All, 8);
    let strip = |mut r: RunReport| {
        r.elapsed_ms = 0;
        emit_report(&r, Format::Json)
    };
    let a = strip(run_suite(&cfg));
    let b = strip(run_suite(&cfg));
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["suite"], "all");
    assert!(v["items"].as_array().unwrap().iter().any(|i| i["id"] == "glue/scan[-30,30]"));
}

#[test]
fn text_table() {
    let r = run_suite(&config(Suite::Quotient, 10));
    let text = String::from_utf8(emit_report(&r, Format::Text)).unwrap();
    let line = text.lines().find(|l| l.starts_with("gamma4-matrix ")).unwrap();
    assert!(line.contains("refuted") && line.contains("X^2-69X-4608900"), "{line}");
    let width = text.lines().next().unwrap().find("status").unwrap();
    for l in text.lines().skip(2).filter(|l| !l.starts_with("suite ")) {
        let prefix: String = l.chars().take(width).collect();
        assert!(prefix.ends_with("  "), "{l}");
    }
    assert_eq!(r.exit_code, 1);
}

#[test]
fn invalid_config() {
    let mut cfg = config(Suite::Fock, 1);
    assert!(cfg.validate().is_err());
    assert_eq!(run_suite(&cfg).exit_code, 2);
    cfg.max_weight = 4;
    cfg.q_truncation = z3orb::scalar::int(0);
    assert_eq!(run_suite(&cfg).exit_code, 2);
}

#[test]
fn binary_exit_codes() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = bin().env(CONFIG_ENV, &bad).args(["--suite", "fusion"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let unknown = scratch("unknown.json");
    std::fs::write(&unknown, r#"{"max_wieght": 4}"#).unwrap();
    let out = bin().env(CONFIG_ENV, &unknown).args(["--suite", "fusion"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["--suite", "fock", "--max-weight", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["--suite", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["--suite", "glue", "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn binary_config_and_output_file() {
    let cfg = scratch("good.json");
    std::fs::write(&cfg, r#"{"suite": "quotient", "max_weight": 6, "format": "json"}"#).unwrap();
    let path = scratch("report.json");
    let out = bin().env(CONFIG_ENV, &cfg).arg("--out").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "quotient");
    assert_eq!(v["exit_code"], 0);

    let out = bin().env(CONFIG_ENV, &cfg).args(["--format", "text", "--suite", "fusion"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("N_{3,3}^6 = 1"));
}
