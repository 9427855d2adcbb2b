//! Full acceptance run. Prints every statistic, then one verdict per
//! criterion, and exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;

use common::{polygon_agreement, simplex_agreement};
use diminishing::verify::{self, CheckLine, CheckReport, Sizes};

const SEED: u64 = 20_240_601;
const ORACLE_TOL: f64 = 1e-10;
const ORACLE_STEPS: usize = 100;

const CRITERIA: [(u8, &str); 10] = [
    (1, "interval Weibull rate"),
    (2, "interval center law"),
    (3, "cube maximum of exponentials"),
    (4, "simplex Weibull law"),
    (5, "clipping against independent oracle"),
    (6, "pentagon limit structure"),
    (7, "pentagon survival envelope"),
    (8, "figure ranges"),
    (9, "rate discrimination"),
    (10, "structural invariants"),
];

fn oracle_lines() -> Vec<CheckLine> {
    let mut lines = Vec::new();
    let mut push = |name: String, worst: f64| {
        lines.push(CheckLine {
            criterion: 5,
            name,
            statistic: worst,
            threshold: format!("≤ {ORACLE_TOL}"),
            passed: worst <= ORACLE_TOL,
        });
    };
    for k in [5, 7, 8] {
        for seek in [false, true] {
            let a = polygon_agreement(k, ORACLE_STEPS, SEED + k as u64, seek);
            push(
                format!("k = {k} polygon vs oracle ({} changes)", a.changes),
                a.worst(),
            );
        }
    }
    for d in [2, 3] {
        for seek in [false, true] {
            let a = simplex_agreement(d, ORACLE_STEPS, SEED + d as u64, seek);
            push(
                format!("d = {d} simplex vs oracle ({} changes)", a.changes),
                a.worst(),
            );
        }
    }
    lines
}

fn run() -> diminishing::Result<CheckReport> {
    let sizes = Sizes::default();
    let mut rep = CheckReport::default();
    rep.extend(verify::interval_rate(&sizes, SEED)?);
    rep.extend(verify::interval_center(&sizes, SEED)?);
    rep.extend(verify::cube(&sizes, SEED)?);
    rep.extend(verify::simplex(&sizes, SEED)?);
    rep.lines.extend(oracle_lines());
    rep.extend(verify::pentagon_structure(&sizes, SEED)?);
    rep.extend(verify::pentagon_envelope(&sizes, SEED)?);
    rep.extend(verify::figures(&sizes, SEED)?);
    rep.extend(verify::rate_discrimination(&sizes, SEED)?);
    rep.add_invariant_summary(10);
    Ok(rep)
}

fn main() -> ExitCode {
    let rep = match run() {
        Ok(rep) => rep,
        Err(e) => {
            println!("acceptance run aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    print!("{rep}");
    println!();
    let mut all = true;
    for (c, name) in CRITERIA {
        let ok = rep.criterion_passed(c).unwrap_or(false);
        all &= ok;
        println!(
            "criterion {c:>2} {name}: {}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
