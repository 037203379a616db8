//! A small end-to-end study written to disk: tables, convergence series,
//! significance tests and scatter plots.
//!
//! ```text
//! cargo run --release --example experiment -- /tmp/coevo-study
//! ```

use coevo_mog::harness::{run_experiment, ExperimentConfig};
use coevo_mog::GameVariant;

fn main() -> coevo_mog::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "coevo-study".into());
    let config = ExperimentConfig {
        variants: vec![GameVariant::Base, GameVariant::Rastrigin1D],
        runs: 6,
        population_size: 30,
        generations: 25,
        out_dir: out.into(),
        ..Default::default()
    };
    let report = run_experiment(&config)?;
    for v in &report.variants {
        println!("{}:", v.variant);
        for f in &v.files {
            println!("  {}", f.display());
        }
    }
    Ok(())
}
