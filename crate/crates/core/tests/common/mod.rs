//! Brute-force oracles and random instance generators shared by the
//! integration tests and the acceptance binary.
#![allow(dead_code)]

use coevo_mog::domination::non_dominated_front;
use coevo_mog::{PayoffVector, Sense};
use rand::Rng;

/// Plain pairwise domination, written independently of the library.
pub fn oracle_dominates(f: &[f64], h: &[f64], sense: Sense) -> bool {
    let (better, worse): (Vec<bool>, Vec<bool>) = f
        .iter()
        .zip(h)
        .map(|(a, b)| match sense {
            Sense::Minimize => (a < b, a > b),
            Sense::Maximize => (a > b, a < b),
        })
        .unzip();
    better.iter().any(|b| *b) && !worse.iter().any(|w| *w)
}

/// Ranks by repeatedly peeling off the non-dominated layer.
pub fn peeling_ranks(points: &[PayoffVector], sense: Sense) -> Vec<usize> {
    let mut ranks = vec![usize::MAX; points.len()];
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut rank = 0;
    while !remaining.is_empty() {
        let layer: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining
                    .iter()
                    .any(|&j| oracle_dominates(points[j].as_slice(), points[i].as_slice(), sense))
            })
            .collect();
        for &i in &layer {
            ranks[i] = rank;
        }
        remaining.retain(|i| !layer.contains(i));
        rank += 1;
    }
    ranks
}

/// Indices of the points no other point dominates.
pub fn brute_front(points: &[PayoffVector], sense: Sense) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|q| oracle_dominates(q.as_slice(), points[i].as_slice(), sense))
        })
        .collect()
}

/// Per-coordinate extreme over a whole set.
pub fn extreme(points: &[PayoffVector], sense: Sense) -> Vec<f64> {
    let k = points[0].len();
    (0..k)
        .map(|c| {
            let it = points.iter().map(|p| p[c]);
            match sense {
                Sense::Maximize => it.fold(f64::NEG_INFINITY, f64::max),
                Sense::Minimize => it.fold(f64::INFINITY, f64::min),
            }
        })
        .collect()
}

/// Random points on a coarse grid, so ties and duplicates show up.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<PayoffVector> {
    (0..n)
        .map(|_| PayoffVector::new((0..k).map(|_| rng.random_range(0..8) as f64 * 0.5)).unwrap())
        .collect()
}

/// A random anti-optimal front (mutually non-dominated under maximization)
/// and a second front that it worst-case dominates for the minimizer.
pub fn dominated_front_pair<R: Rng>(rng: &mut R, k: usize) -> (Vec<PayoffVector>, Vec<PayoffVector>) {
    let n = rng.random_range(1..=12);
    let pts: Vec<PayoffVector> = (0..n)
        .map(|_| PayoffVector::new((0..k).map(|_| rng.random_range(-2.0..2.0))).unwrap())
        .collect();
    let upper: Vec<PayoffVector> = non_dominated_front(&pts, Sense::Maximize)
        .unwrap()
        .into_iter()
        .map(|i| pts[i].clone())
        .collect();
    let m = rng.random_range(1..=12);
    let lower_pts: Vec<PayoffVector> = (0..m)
        .map(|_| {
            let base = &upper[rng.random_range(0..upper.len())];
            let strict = rng.random_range(0..k);
            PayoffVector::new((0..k).map(|c| {
                let drop: f64 = if c == strict {
                    rng.random_range(0.01..1.0)
                } else if rng.random_bool(0.3) {
                    0.0
                } else {
                    rng.random_range(0.0..1.0)
                };
                base[c] - drop
            }))
            .unwrap()
        })
        .collect();
    let lower: Vec<PayoffVector> = non_dominated_front(&lower_pts, Sense::Maximize)
        .unwrap()
        .into_iter()
        .map(|i| lower_pts[i].clone())
        .collect();
    (lower, upper)
}
