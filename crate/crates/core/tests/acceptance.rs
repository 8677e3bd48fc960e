//! Acceptance gate: every registered verification suite at its full pinned
//! scope, one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use chainmorph::suites::{find, fixture_json, SuiteParams, GOLDEN_COUNTS};

fn run(criterion: &str, name: &str) {
    let suite = find(name).expect("registered suite");
    let rep = suite.run(&SuiteParams::default());
    let status = if rep.passed { "PASS" } else { "FAIL" };
    println!(
        "ACCEPTANCE {criterion} {name}: {status} ({} checks, {} failures)",
        rep.checks, rep.failure_count
    );
    for note in &rep.notes {
        println!("  note: {note}");
    }
    if !rep.passed {
        for f in &rep.failures {
            eprintln!("  counterexample: {f}");
        }
        panic!(
            "acceptance criterion {criterion} ({name}) failed with {} failures",
            rep.failure_count
        );
    }
}

#[test]
fn c01_closure() {
    run("1", "closure");
}

#[test]
fn c02_unique_ideal() {
    run("2", "unique-ideal");
}

#[test]
fn c03_zeta_soundness() {
    run("3", "zeta-soundness");
}

#[test]
fn c04_beta_soundness() {
    run("4", "beta-soundness");
}

#[test]
fn c05_q_criterion() {
    run("5", "q-criterion");
}

#[test]
fn c06_green_crossval() {
    run("6", "green-crossval");
}

#[test]
fn c07_canonical_bijection() {
    run("7", "canonical-bijection");
}

#[test]
fn c08_dj_witness() {
    run("8", "dj-witness");
}

#[test]
fn c09_golden_counts() {
    run("9", "golden-counts");
    // The committed fixture files must be byte-identical to what the library
    // renders for the same golden values.
    for (tag, counts) in GOLDEN_COUNTS {
        let rendered = fixture_json(&counts);
        let committed = match tag.name() {
            "PT" => include_str!("fixtures/counts_pt.json"),
            "T" => include_str!("fixtures/counts_t.json"),
            "I" => include_str!("fixtures/counts_i.json"),
            "O" => include_str!("fixtures/counts_o.json"),
            "PO" => include_str!("fixtures/counts_po.json"),
            "POI" => include_str!("fixtures/counts_poi.json"),
            "OP" => include_str!("fixtures/counts_op.json"),
            "POP" => include_str!("fixtures/counts_pop.json"),
            "POPI" => include_str!("fixtures/counts_popi.json"),
            other => panic!("no fixture for class {other}"),
        };
        assert_eq!(rendered, committed, "fixture drift for class {tag}");
    }
}

#[test]
fn c10_symbolic_beta() {
    run("10", "symbolic-beta");
}
