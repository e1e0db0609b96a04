//! The acceptance suite on the default desk-scale grid.

use jetstokes::harness::{verify_all, RunConfig};
use std::io::Write;

#[test]
fn acceptance_criteria() {
    let report = verify_all(&RunConfig::default()).unwrap();
    // written to the raw handle so the lines show even when output is captured
    let mut err = std::io::stderr().lock();
    for line in report.summary_lines() {
        writeln!(err, "{line}").unwrap();
    }
    assert_eq!(report.criteria.len(), 10);
    assert!(report.all_pass(), "failed: {:?}", report.failed());
}
