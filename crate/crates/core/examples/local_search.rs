//! Bounded Nelder-Mead on a few classic functions, and random simplex
//! weights for scalarizing a vector objective.
//!
//! ```text
//! cargo run --example local_search
//! ```

use coevo_mog::localsearch::{nelder_mead, random_simplex_weights, NelderMeadParams};
use coevo_mog::StrategyBounds;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> coevo_mog::Result<()> {
    let params = NelderMeadParams { max_iterations: 500, ..Default::default() };

    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let rosenbrock = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
    let bounds = StrategyBounds::new(vec![-2.0; 2], vec![2.0; 2])?;
    for (name, start) in [("sphere", [1.5, -0.7]), ("rosenbrock", [-1.2, 1.0])] {
        let r = if name == "sphere" {
            nelder_mead(sphere, &start, &bounds, &params)?
        } else {
            nelder_mead(rosenbrock, &start, &bounds, &params)?
        };
        println!("{name:>10}: x = {:?}, f = {:.3e}, {} iterations", r.point, r.value, r.iterations);
    }

    // the minimizer of (x - 3)^2 lies outside [-1, 1]; clipping stops at the edge
    let narrow = StrategyBounds::new(vec![-1.0], vec![1.0])?;
    let r = nelder_mead(|x: &[f64]| (x[0] - 3.0).powi(2), &[0.0], &narrow, &params)?;
    println!("   clipped: x = {:?}", r.point);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        println!("weights: {:?}", random_simplex_weights(3, &mut rng)?.as_slice());
    }
    Ok(())
}
