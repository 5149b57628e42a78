//! One test per acceptance criterion, at the pinned tolerances. Each prints
//! its verdict line uncaptured.

use std::io::Write;

use rwcuckoo::harness::acceptance::CRITERIA;

fn check(id: u32) {
    let criterion = CRITERIA.iter().find(|c| c.id == id).expect("criterion exists");
    let verdict = (criterion.run)();
    // libtest captures eprintln!, not writes to the stderr handle
    #[allow(clippy::explicit_write)]
    writeln!(std::io::stderr(), "{verdict}").unwrap();
    assert!(verdict.passed, "{verdict}");
}

#[test]
fn criterion_01_threshold_reproduction() {
    check(1);
}

#[test]
fn criterion_02_peelability_phase_transition() {
    check(2);
}

#[test]
fn criterion_03_constant_amortised_insertion() {
    check(3);
}

#[test]
fn criterion_04_failure_above_load_threshold() {
    check(4);
}

#[test]
fn criterion_05_round_bound() {
    check(5);
}

#[test]
fn criterion_06_path_count_oracle() {
    check(6);
}

#[test]
fn criterion_07_path_count_inequality() {
    check(7);
}

#[test]
fn criterion_08_trajectory_match() {
    check(8);
}

#[test]
fn criterion_09_light_and_heavy_balls() {
    check(9);
}

#[test]
fn criterion_10_heavy_balls_vanish() {
    check(10);
}

#[test]
fn criterion_11_total_peel_linearity() {
    check(11);
}
