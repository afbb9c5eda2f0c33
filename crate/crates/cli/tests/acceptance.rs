//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Criteria 1 to 11 run in-process through the library; criterion 12 runs
//! `seqclust verify-all` twice and compares the bytes of both summaries.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use seqclust::harness::acceptance::{self, run_criterion, CRITERIA};

const SEED: u64 = 42;

// Pinned tolerances; the suite refuses to run if the library drifts.
const SIGMA_MULTIPLIER: f64 = 3.0;
const TRIALS: usize = 2000;
const BADCASE_BUDGET: u64 = 100_000;

fn time_limit(id: u8) -> Option<Duration> {
    match id {
        1 | 6 => Some(Duration::from_secs(120)),
        2 => Some(Duration::from_secs(60)),
        _ => None,
    }
}

fn verify_all_output() -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_seqclust"))
        .args(["verify-all", "--seed", &SEED.to_string()])
        .output()
        .map_err(|e| format!("cannot start seqclust: {e}"))?;
    if !out.status.success() {
        return Err(format!("verify-all exited with {}", out.status));
    }
    Ok(out.stdout)
}

fn main() -> ExitCode {
    let pinned = acceptance::SIGMA_MULTIPLIER == SIGMA_MULTIPLIER
        && acceptance::TRIALS == TRIALS
        && acceptance::BADCASE_BUDGET == BADCASE_BUDGET;
    if !pinned {
        println!("FAIL tolerances: library constants differ from the pinned values");
        return ExitCode::FAILURE;
    }
    println!(
        "acceptance seed={SEED} sigma_multiplier={SIGMA_MULTIPLIER} trials={TRIALS} badcase_budget={BADCASE_BUDGET}"
    );

    let mut failures = 0;
    for &(id, _) in CRITERIA.iter() {
        let start = Instant::now();
        let r = run_criterion(id, SEED);
        let elapsed = start.elapsed();
        let slow = time_limit(id).is_some_and(|limit| elapsed > limit);
        let ok = r.passed && !slow;
        failures += usize::from(!ok);
        println!(
            "{} criterion {:>2} {} ({:.2}s{}): {}",
            if ok { "PASS" } else { "FAIL" },
            id,
            r.name,
            elapsed.as_secs_f64(),
            if slow { ", over time limit" } else { "" },
            r.detail
        );
    }

    let start = Instant::now();
    let determinism = verify_all_output().and_then(|a| {
        let b = verify_all_output()?;
        if a == b {
            Ok(a.len())
        } else {
            Err("summaries differ".into())
        }
    });
    let elapsed = start.elapsed().as_secs_f64();
    match determinism {
        Ok(bytes) => println!(
            "PASS criterion 12 determinism ({elapsed:.2}s): two `verify-all --seed {SEED}` runs gave identical {bytes}-byte summaries"
        ),
        Err(e) => {
            failures += 1;
            println!("FAIL criterion 12 determinism ({elapsed:.2}s): {e}");
        }
    }

    println!("{}/12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
