//! Acceptance criteria C1 to C9.
//!
//! The suite runs once; each criterion then gets its own test so a failure
//! names the criterion. `summary` prints one line per criterion.

use std::sync::OnceLock;

use adamsext::claims::{ClaimResult, FixtureSet, Status, Suite};
use adamsext::store::ResolutionStore;

fn results() -> &'static [ClaimResult] {
    static RESULTS: OnceLock<Vec<ClaimResult>> = OnceLock::new();
    RESULTS.get_or_init(|| {
        let fixtures = FixtureSet::builtin();
        let mut store = ResolutionStore::in_memory();
        Suite::new(&fixtures, &mut store).run()
    })
}

fn claim(id: &str) -> &'static ClaimResult {
    results()
        .iter()
        .find(|r| r.id == id)
        .unwrap_or_else(|| panic!("{id} missing from the suite"))
}

fn assert_pass(id: &str) {
    let r = claim(id);
    assert_eq!(r.status, Status::Pass, "\n{r}");
}

#[test]
fn summary() {
    let results = results();
    assert_eq!(results.len(), 9);
    for r in results {
        println!("{} {} {}", r.id, r.status, r.description);
        println!("    computed: {}", r.computed);
        println!("    expected: {}", r.expected);
    }
    assert!(results.iter().all(|r| r.status != Status::Error));
}

#[test]
fn c1_algebra_axioms() {
    assert_pass("C1");
}

#[test]
fn c2_fixture_integrity() {
    assert_pass("C2");
}

#[test]
fn c3_oracle_equivalence() {
    assert_pass("C3");
}

#[test]
fn c4_empty_minus_one_stem() {
    assert_pass("C4");
}

#[test]
fn c5_eight_stem() {
    assert_pass("C5");
}

#[test]
fn c6_h2_behavior() {
    assert_pass("C6");
}

#[test]
fn c7_tower_report() {
    let r = claim("C7");
    assert_eq!(r.status, Status::ReportOnly, "\n{r}");
    assert!(!r.computed.is_empty());
}

#[test]
fn c8_resolution_soundness() {
    assert_pass("C8");
}

#[test]
fn c9_sphere_sanity() {
    assert_pass("C9");
}
