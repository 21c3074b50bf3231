//! One pass/fail line per acceptance criterion, with measured and expected values.

use qrf::checks::{run_suite, SuiteConfig};

#[test]
fn acceptance_criteria() {
    let results = run_suite(&SuiteConfig::full());
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
