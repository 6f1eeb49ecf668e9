//! Every catalog scenario runs to completion and reaches a passing verdict
//! at its desk-scale default parameters.

use weightlab::harness::report::Verdict;
use weightlab::harness::scenarios::{run_scenario, CATALOG, DEFAULT_SEED};

#[test]
fn every_scenario_passes_at_default_scale() {
    let mut failures = Vec::new();
    for entry in CATALOG {
        let report = match run_scenario(entry.name, DEFAULT_SEED) {
            Ok(report) => report,
            Err(err) => {
                println!("{:<20} ERROR {err}", entry.name);
                failures.push(format!("{}: {err}", entry.name));
                continue;
            }
        };
        println!(
            "{:<20} {:?} ({} ms)",
            entry.name, report.verdict, report.runtime_ms
        );
        if report.verdict != Verdict::Pass {
            failures.push(format!("{}: verdict {:?}", entry.name, report.verdict));
        }
    }
    assert!(failures.is_empty(), "failing scenarios: {failures:?}");
}
