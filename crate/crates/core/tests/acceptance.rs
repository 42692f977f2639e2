//! End-to-end acceptance run: every verification suite through the `verify`
//! command, once on one thread and once on two. Prints one PASS/FAIL line
//! per criterion, then fails if any gating criterion failed.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;

use mcflab::cli::{run, Command, RunConfig, EXIT_OK};
use serde_json::Value;

const CRITERIA: [&str; 13] = [
    "kernel exactness",
    "Euclidean entropy baseline",
    "small-t limit",
    "area growth",
    "flow exactness",
    "static minimal surfaces",
    "first variation",
    "monotonicity",
    "almost-monotonicity",
    "equivalence",
    "Li-Yau scan",
    "minimal-limit diagnostics",
    "determinism",
];

/// Bypasses the test harness capture so the summary always shows.
fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn verify_in(dir: &std::path::Path, threads: usize) -> (i32, String, Vec<(String, String)>) {
    let overrides = vec![
        ("out_dir".to_string(), dir.to_str().unwrap().to_string()),
        ("threads".to_string(), threads.to_string()),
        ("seed".to_string(), "0".to_string()),
    ];
    let cfg = RunConfig::parse("", &overrides).unwrap();
    let manifest = run(Command::Verify, &cfg);
    let report = fs::read_to_string(dir.join("verify.jsonl")).unwrap_or_default();
    (manifest.exit_code, report, manifest.output_digests())
}

fn short(v: &Value) -> String {
    format!(
        "{} = {:.3e} ({} {})",
        v["name"].as_str().unwrap_or("?"),
        v["value"].as_f64().unwrap_or(f64::NAN),
        v["relation"].as_str().unwrap_or("?"),
        v["bound"].as_f64().unwrap_or(f64::NAN)
    )
}

#[test]
fn acceptance_criteria() {
    let one = tempfile::tempdir().unwrap();
    let two = tempfile::tempdir().unwrap();
    let (code, report, digests) = verify_in(one.path(), 1);
    let (code2, report2, digests2) = verify_in(two.path(), 2);

    let rows: Vec<Value> = report.lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect();
    let mut by_criterion: BTreeMap<u64, Vec<&Value>> = BTreeMap::new();
    let mut advisory = Vec::new();
    for row in &rows {
        match row["criterion"].as_u64() {
            Some(c) => by_criterion.entry(c).or_default().push(row),
            None if row["gating"] == Value::Bool(false) => advisory.push(row),
            None => by_criterion.entry(0).or_default().push(row),
        }
    }

    let mut failed = Vec::new();
    for (i, title) in CRITERIA.iter().enumerate() {
        let n = i as u64 + 1;
        let (pass, detail) = if n == 13 {
            let same = report == report2 && digests == digests2 && !report.is_empty();
            (same, format!("1 vs 2 threads: {} report bytes, identical = {same}", report.len()))
        } else {
            let rows = by_criterion.get(&n).map(Vec::as_slice).unwrap_or(&[]);
            let bad: Vec<&&Value> = rows.iter().filter(|r| r["pass"] != Value::Bool(true)).collect();
            let detail = match bad.first() {
                Some(b) => format!("{} of {} checks failed; first: {}", bad.len(), rows.len(), short(b)),
                None => format!("{} checks", rows.len()),
            };
            (!rows.is_empty() && bad.is_empty(), detail)
        };
        say(&format!("criterion {n:>2} {:<28} {}  {detail}", title, if pass { "PASS" } else { "FAIL" }));
        if !pass {
            failed.push(n);
        }
    }
    for row in by_criterion.get(&0).map(Vec::as_slice).unwrap_or(&[]) {
        let pass = row["pass"] == Value::Bool(true);
        say(&format!("supporting check {}  {}", if pass { "PASS" } else { "FAIL" }, short(row)));
        if !pass {
            failed.push(0);
        }
    }
    for row in &advisory {
        let pass = row["pass"] == Value::Bool(true);
        say(&format!("advisory   {}  {}", if pass { "ok  " } else { "warn" }, short(row)));
    }

    assert_eq!(code, code2);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    assert_eq!(code, EXIT_OK);
}
