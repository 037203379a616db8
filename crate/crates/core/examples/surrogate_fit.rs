//! Trains the ideal-point surrogate on the survivors of a short canonical
//! run and compares its training error to the error of predicting the
//! batch mean.
//!
//! ```text
//! cargo run --release --example surrogate_fit -- Ackley2D 10 [learning_rate] [epochs]
//! ```

use coevo_mog::coevolution::run_canonical;
use coevo_mog::games::Player;
use coevo_mog::surrogate::{predict, train_surrogate, SurrogateParams};
use coevo_mog::{CoevoConfig, GameDefinition, GameVariant, PayoffVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mse(pred: &[PayoffVector], target: &[PayoffVector]) -> f64 {
    let total: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| p.iter().zip(t.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
        .sum();
    total / pred.len() as f64
}

fn main() -> coevo_mog::Result<()> {
    let mut args = std::env::args().skip(1);
    let variant: GameVariant = args.next().as_deref().unwrap_or("Ackley2D").parse()?;
    let generations: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let defaults = SurrogateParams::default();
    let params = SurrogateParams {
        learning_rate: args.next().and_then(|s| s.parse().ok()).unwrap_or(defaults.learning_rate),
        epochs: args.next().and_then(|s| s.parse().ok()).unwrap_or(defaults.epochs),
        ..defaults
    };
    let game = GameDefinition::new(variant);
    let config = CoevoConfig { generations, ..CoevoConfig::default() };
    let history = run_canonical(&config, &game)?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (player, population) in [
        (Player::One, &history.final_snapshot().population_p1),
        (Player::Two, &history.final_snapshot().population_p2),
    ] {
        let strategies: Vec<_> = population.iter().map(|i| i.strategy.clone()).collect();
        let targets: Vec<_> = population.iter().map(|i| i.ideal_point.clone().unwrap()).collect();
        let model = train_surrogate(&strategies, &targets, game.bounds(player), &params, &mut rng)?;
        let predictions = strategies
            .iter()
            .map(|s| predict(&model, s))
            .collect::<coevo_mog::Result<Vec<_>>>()?;

        let k = targets[0].len();
        let mean: Vec<f64> = (0..k)
            .map(|j| targets.iter().map(|t| t[j]).sum::<f64>() / targets.len() as f64)
            .collect();
        let baseline = vec![PayoffVector::new(mean)?; targets.len()];
        println!(
            "{player:?}: normalized loss {:.5}, MSE {:.6} (mean predictor {:.6})",
            model.final_loss,
            mse(&predictions, &targets),
            mse(&baseline, &targets)
        );
    }
    Ok(())
}
