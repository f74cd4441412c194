use std::collections::BTreeMap;

use cr_core::catalog::{list, make, run_expected_checks, CheckOptions};

fn run(id: &str) -> cr_core::catalog::CheckReport {
    let e = make(id, &BTreeMap::new()).unwrap();
    let r = run_expected_checks(&e, &CheckOptions::default());
    for c in &r.results {
        println!("{id} {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.observed);
    }
    r
}

#[test]
fn all_entries_report() {
    for info in list() {
        let r = run(info.id);
        let failed: Vec<_> = r.results.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if info.id == "reinhardt" {
            assert_eq!(failed, vec!["degenerate-locus-|z|=|w|"]);
        } else {
            assert!(failed.is_empty(), "{}: {failed:?}", info.id);
        }
    }
}
