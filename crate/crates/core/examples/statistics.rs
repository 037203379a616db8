//! Run summaries and the paired Wilcoxon signed-rank test on final IGD
//! values of paired canonical and memetic runs.
//!
//! ```text
//! cargo run --release --example statistics -- Rosenbrock2D 8
//! ```

use coevo_mog::harness::{run_variant, ExperimentConfig};
use coevo_mog::metrics::{summarize_runs, wilcoxon_signed_rank};
use coevo_mog::{Algorithm, GameVariant};

fn main() -> coevo_mog::Result<()> {
    let mut args = std::env::args().skip(1);
    let variant: GameVariant = args.next().as_deref().unwrap_or("Rosenbrock2D").parse()?;
    let runs = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let config = ExperimentConfig { variants: vec![variant], runs, generations: 30, ..Default::default() };
    let histories = run_variant(&config, variant)?;

    let finals = |a: Algorithm| -> Vec<f64> {
        histories.iter().filter(|h| h.algorithm == a).map(|h| h.final_snapshot().igd).collect()
    };
    let (c, m) = (finals(Algorithm::Canonical), finals(Algorithm::Memetic));
    for (name, v) in [("canonical", &c), ("memetic", &m)] {
        let s = summarize_runs(v)?;
        println!("{name:>9}: avg {:.5} min {:.5} max {:.5} std {:.5}", s.avg, s.min, s.max, s.std);
    }
    match wilcoxon_signed_rank(&c, &m) {
        Ok(r) => println!("W = {}, z = {:.3}, p = {:.4}", r.statistic, r.z, r.p_value),
        Err(e) => println!("no test: {e}"),
    }
    Ok(())
}
