//! Canonical co-evolution on the base tug-of-war game. Player 1's angles
//! should drift into [π, 3π/2] and player 2's into [0, π/2].
//!
//! ```text
//! cargo run --release --example tug_of_war -- 7
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use coevo_mog::{run_canonical, CoevoConfig, GameDefinition, GameVariant};

fn share_in(values: &[f64], lo: f64, hi: f64) -> f64 {
    values.iter().filter(|v| (lo..=hi).contains(*v)).count() as f64 / values.len() as f64
}

fn main() -> coevo_mog::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = CoevoConfig { generations: 40, seed, ..CoevoConfig::default() };
    let history = run_canonical(&config, &GameDefinition::new(GameVariant::Base))?;

    println!("{:>4} {:>9} {:>8} {:>8}", "gen", "igd", "P1 in", "P2 in");
    for snap in history.snapshots.iter().step_by(5) {
        let t1: Vec<f64> = snap.population_p1.iter().map(|i| i.strategy.values[0]).collect();
        let t2: Vec<f64> = snap.population_p2.iter().map(|i| i.strategy.values[0]).collect();
        println!(
            "{:>4} {:>9.5} {:>8.2} {:>8.2}",
            snap.generation,
            snap.igd,
            share_in(&t1, PI, 3.0 * FRAC_PI_2),
            share_in(&t2, 0.0, FRAC_PI_2),
        );
    }
    println!("true evaluations: {}", history.final_snapshot().evaluations);
    Ok(())
}
