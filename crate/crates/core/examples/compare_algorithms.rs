//! Paired canonical vs. memetic runs on one game, printing the mean IGD
//! every five generations.
//!
//! ```text
//! cargo run --release --example compare_algorithms -- Rastrigin1D 10 50 [epochs]
//! ```

use coevo_mog::coevolution::run_with_reference;
use coevo_mog::games::reference_pareto_layer;
use coevo_mog::surrogate::SurrogateParams;
use coevo_mog::{CoevoConfig, GameDefinition, GameVariant};
use rayon::prelude::*;

fn main() -> coevo_mog::Result<()> {
    let mut args = std::env::args().skip(1);
    let variant: GameVariant = args.next().as_deref().unwrap_or("Rastrigin1D").parse()?;
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let generations: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);

    let defaults = CoevoConfig::default();
    let epochs: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(defaults.surrogate.epochs);

    let game = GameDefinition::new(variant);
    let base = CoevoConfig {
        generations,
        surrogate: SurrogateParams { epochs, ..defaults.surrogate.clone() },
        ..defaults
    };
    let reference = reference_pareto_layer(&game, base.reference_resolution)?;

    let mean_series = |memetic: bool| -> coevo_mog::Result<Vec<f64>> {
        let runs = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let config = CoevoConfig { memetic, seed, ..base.clone() };
                run_with_reference(&config, &game, &reference).map(|h| h.igd_series())
            })
            .collect::<coevo_mog::Result<Vec<_>>>()?;
        Ok((0..=generations)
            .map(|g| runs.iter().map(|r| r[g]).sum::<f64>() / runs.len() as f64)
            .collect())
    };
    let canonical = mean_series(false)?;
    let memetic = mean_series(true)?;

    println!("{variant}: mean IGD over {seeds} seeds");
    println!("{:>10} {:>12} {:>12}", "generation", "canonical", "memetic");
    for g in (0..=generations).step_by(5) {
        println!("{g:>10} {:>12.5} {:>12.5}", canonical[g], memetic[g]);
    }
    Ok(())
}
