//! Worst-case comparison of two strategies through their anti-optimal
//! fronts and ideal points.
//!
//! ```text
//! cargo run --example domination
//! ```

use coevo_mog::domination::{dominates, ideal_point, non_dominated_front, worst_case_dominates};
use coevo_mog::{PayoffVector, Sense};

fn front(outcomes: &[PayoffVector]) -> Vec<PayoffVector> {
    // the opponent maximizes, so its best replies form the maximization front
    non_dominated_front(outcomes, Sense::Maximize)
        .unwrap()
        .into_iter()
        .map(|i| outcomes[i].clone())
        .collect()
}

fn main() -> coevo_mog::Result<()> {
    // outcomes of two minimizer strategies against the same three replies
    let a: Vec<PayoffVector> = vec![[1.0, 3.0].into(), [2.0, 1.0].into(), [0.0, 0.0].into()];
    let b: Vec<PayoffVector> = vec![[2.0, 3.5].into(), [2.5, 2.0].into(), [1.0, 1.0].into()];

    let (fa, fb) = (front(&a), front(&b));
    println!("anti-optimal front of a: {:?}", fa.iter().map(|p| p.as_slice()).collect::<Vec<_>>());
    println!("anti-optimal front of b: {:?}", fb.iter().map(|p| p.as_slice()).collect::<Vec<_>>());

    let (ia, ib) = (ideal_point(&fa, Sense::Maximize)?, ideal_point(&fb, Sense::Maximize)?);
    println!("ideal points: a {:?}, b {:?}", ia.as_slice(), ib.as_slice());
    println!("a worst-case dominates b: {}", worst_case_dominates(&fa, &fb, Sense::Minimize)?);
    println!("ideal point of a dominates that of b: {}", dominates(&ia, &ib, Sense::Minimize)?);
    Ok(())
}
