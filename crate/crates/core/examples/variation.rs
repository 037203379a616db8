//! SBX crossover, polynomial mutation and NSGA-II survival on a toy
//! population of ideal points.
//!
//! ```text
//! cargo run --example variation
//! ```

use coevo_mog::evolution::{environmental_selection, polynomial_mutation, sbx_crossover, Individual, VariationParams};
use coevo_mog::games::IdSource;
use coevo_mog::{PayoffVector, Sense, Strategy, StrategyBounds};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> coevo_mog::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ids = IdSource::new();
    let bounds = StrategyBounds::new(vec![0.0; 2], vec![1.0; 2])?;
    let params = VariationParams::default();

    let p1 = Strategy::new(ids.next_id(), vec![0.2, 0.8]);
    let p2 = Strategy::new(ids.next_id(), vec![0.6, 0.3]);
    for _ in 0..3 {
        let (c1, c2) = sbx_crossover(&p1, &p2, &params, &bounds, &mut ids, &mut rng)?;
        let m = polynomial_mutation(&c1, &params, &bounds, &mut ids, &mut rng)?;
        println!("children {:?} {:?}, mutant {:?}", c1.values, c2.values, m.values);
    }

    // a pool whose ideal points are the strategies themselves
    let pool: Vec<Individual> = (0..12)
        .map(|_| {
            let v = vec![rng.random::<f64>(), rng.random::<f64>()];
            let mut ind = Individual::new(Strategy::new(ids.next_id(), v.clone()));
            ind.ideal_point = Some(PayoffVector::new(v)?);
            Ok(ind)
        })
        .collect::<coevo_mog::Result<_>>()?;
    for ind in environmental_selection(pool, 5, Sense::Minimize)? {
        println!("kept {:?} rank {:?} crowding {:?}", ind.strategy.values, ind.rank, ind.crowding);
    }
    Ok(())
}
