//! Criteria 1 to 13 run in process; criterion 14 runs the built binary twice.

use finobs_core::verify::{run_criterion, DEFAULT_SEED};
use std::process::Command;
use std::time::{Duration, Instant};

const WALL_LIMIT: Duration = Duration::from_secs(180);

fn verify_all() -> (bool, Vec<u8>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_finobs"))
        .args(["verify", "--suite", "all", "--seed", "42"])
        .env_remove(finobs_cli::SEED_ENV)
        .output()
        .expect("binary runs");
    (out.status.success(), out.stdout, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn determinism() -> (bool, String) {
    let started = Instant::now();
    let (ok1, first, err1) = verify_all();
    let (ok2, second, err2) = verify_all();
    let elapsed = started.elapsed();
    let identical = first == second && !first.is_empty();
    let passed = ok1 && ok2 && identical && elapsed < WALL_LIMIT;
    let detail = format!(
        "runs passed: {ok1}/{ok2}, byte-identical: {identical}, wall {:.1}s{}{}",
        elapsed.as_secs_f64(),
        if err1.is_empty() { String::new() } else { format!(", stderr: {}", err1.trim()) },
        if err2.is_empty() { String::new() } else { format!(", stderr: {}", err2.trim()) },
    );
    (passed, detail)
}

fn main() {
    let mut failed = Vec::new();
    for id in 1..=13u8 {
        let started = Instant::now();
        let report = run_criterion(id, DEFAULT_SEED).expect("known criterion");
        println!(
            "criterion {id:>2}: {} | {} | cases={} failures={} worst error/bound={:.3e} | {:.2}s",
            if report.passed { "PASS" } else { "FAIL" },
            report.name,
            report.cases,
            report.failures,
            report.worst_ratio,
            started.elapsed().as_secs_f64()
        );
        for d in &report.details {
            println!("    {d}");
        }
        if !report.passed {
            failed.push(id);
        }
    }
    let (passed, detail) = determinism();
    println!(
        "criterion 14: {} | cli determinism | {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    if !passed {
        failed.push(14);
    }
    if failed.is_empty() {
        println!("acceptance: all 14 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
