//! Runs the joint search and prints the best bound per case.
//!
//! Usage: `cargo run --release --example search -- <d> <n> [restarts] [seed]`

use std::time::Instant;

use kappa_core::{joint_search, SearchConfig};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let (d, n) = (args.first().copied().unwrap_or(3), args.get(1).copied().unwrap_or(4));
    let mut cfg = SearchConfig::new(d, n);
    if let Some(&r) = args.get(2) {
        cfg.restarts = r;
    }
    if let Some(&s) = args.get(3) {
        cfg.seed = s as u64;
    }
    let start = Instant::now();
    let result = joint_search(&cfg).expect("valid config");
    let mut history = result.objective_history.clone();
    history.sort_by(f64::total_cmp);
    println!(
        "d={d} n={n} restarts={} bound={:.6} noise={:.2e} best_restart={} elapsed={:.1?}",
        cfg.restarts,
        result.report.kappa_bound,
        result.report.noise_threshold,
        result.best_restart,
        start.elapsed()
    );
    println!("sorted restart values: {:?}", &history[..history.len().min(10)]);
}
