//! Acceptance suite: every identity the crate exists to uphold, checked
//! exactly (tolerance zero). One test per criterion; each prints its
//! pass/fail line.

use gerbe_gw::selftest::{run_criterion, CriterionResult};

fn check(id: usize) {
    let CriterionResult { name, passed, detail, .. } = run_criterion(id);
    println!("criterion {id}: {} — {name} ({detail})", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {id} failed: {detail}");
}

#[test]
fn criterion_1_counting_oracle_equivalence() {
    check(1);
}

#[test]
fn criterion_2_paper_special_cases() {
    check(2);
}

#[test]
fn criterion_3_psi_integrals() {
    check(3);
}

#[test]
fn criterion_4_character_tables() {
    check(4);
}

#[test]
fn criterion_5_twisted_algebra() {
    check(5);
}

#[test]
fn criterion_6_cohft_axioms() {
    check(6);
}

#[test]
fn criterion_7_decomposition_theorem() {
    check(7);
}

#[test]
fn criterion_8_product_theorem() {
    check(8);
}

#[test]
fn criterion_9_degree_formula_and_transforms() {
    check(9);
}
