//! A memetic run on an extended game: IGD per generation together with the
//! share of each player's survivors that were bred in that generation.
//!
//! ```text
//! cargo run --release --example memetic_run -- Griewank2D 3
//! ```

use coevo_mog::evolution::Individual;
use coevo_mog::{run_memetic, CoevoConfig, GameDefinition, GameVariant};

fn newcomers(prev: &[Individual], next: &[Individual]) -> f64 {
    let newest = prev.iter().map(|i| i.strategy.id).max().unwrap();
    next.iter().filter(|i| i.strategy.id > newest).count() as f64 / next.len() as f64
}

fn main() -> coevo_mog::Result<()> {
    let mut args = std::env::args().skip(1);
    let variant: GameVariant = args.next().as_deref().unwrap_or("Griewank2D").parse()?;
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = CoevoConfig { generations: 30, memetic: true, seed, ..CoevoConfig::default() };
    let history = run_memetic(&config, &GameDefinition::new(variant))?;

    println!("{:>4} {:>9} {:>7} {:>7}", "gen", "igd", "new P1", "new P2");
    for pair in history.snapshots.windows(2).step_by(3) {
        let (prev, snap) = (&pair[0], &pair[1]);
        println!(
            "{:>4} {:>9.5} {:>7.2} {:>7.2}",
            snap.generation,
            snap.igd,
            newcomers(&prev.population_p1, &snap.population_p1),
            newcomers(&prev.population_p2, &snap.population_p2),
        );
    }
    Ok(())
}
