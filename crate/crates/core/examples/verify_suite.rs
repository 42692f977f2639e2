//! Runs named verification suites and prints their JSON-lines results.
//!
//! cargo run --release --example verify_suite -- kernels harnack

use mcflab::verify::suites::{all_pass, run_suite, to_json_lines, SuiteOptions, SUITES};

fn main() -> mcflab::Result<()> {
    let names: Vec<String> = std::env::args().skip(1).collect();
    let names = if names.is_empty() { vec!["harnack".to_string()] } else { names };
    let mut ok = true;
    for name in &names {
        let a = run_suite(name, &SuiteOptions::default())?;
        ok &= all_pass(&a);
        print!("{}", to_json_lines(&a));
    }
    eprintln!("{} (available: {})", if ok { "all gating checks pass" } else { "gating failure" }, SUITES.join(", "));
    Ok(())
}
