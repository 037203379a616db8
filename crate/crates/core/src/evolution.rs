//! Real-coded variation operators and NSGA-II style environmental selection
//! on approximated ideal points.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domination::{dominates_unchecked, PayoffVector, Sense};
use crate::error::{check_dim, Error, Result};
use crate::games::{IdSource, Strategy, StrategyBounds};

/// A strategy together with the data produced by evaluation and ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub strategy: Strategy,
    pub ideal_point: Option<PayoffVector>,
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
}

impl Individual {
    pub fn new(strategy: Strategy) -> Self {
        Individual {
            strategy,
            ideal_point: None,
            rank: None,
            crowding: None,
        }
    }

    /// Drops evaluation and ranking data, e.g. after the strategy changed.
    pub fn reset(&mut self) {
        self.ideal_point = None;
        self.rank = None;
        self.crowding = None;
    }
}

/// Parameters of SBX crossover and polynomial mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationParams {
    pub eta_crossover: f64,
    pub eta_mutation: f64,
    pub p_crossover: f64,
    /// Per-variable mutation probability; `None` means `1 / N` for a
    /// strategy of length `N`.
    pub p_mutation_per_variable: Option<f64>,
}

impl Default for VariationParams {
    fn default() -> Self {
        VariationParams {
            eta_crossover: 20.0,
            eta_mutation: 20.0,
            p_crossover: 0.9,
            p_mutation_per_variable: None,
        }
    }
}

impl VariationParams {
    pub fn mutation_probability(&self, len: usize) -> f64 {
        self.p_mutation_per_variable
            .unwrap_or(1.0 / len.max(1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta_crossover > 0.0) {
            return Err(Error::config("variation.eta_crossover", "must be positive"));
        }
        if !(self.eta_mutation > 0.0) {
            return Err(Error::config("variation.eta_mutation", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p_crossover) {
            return Err(Error::config("variation.p_crossover", "must lie in [0, 1]"));
        }
        if let Some(p) = self.p_mutation_per_variable {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(
                    "variation.p_mutation_per_variable",
                    "must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }
}

/// SBX spread factor for a uniform draw `u`.
pub fn sbx_spread_factor(u: f64, eta: f64) -> f64 {
    let exponent = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(exponent)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(exponent)
    }
}

/// Unclipped SBX children of one variable for a given draw `u`.
pub fn sbx_pair(x1: f64, x2: f64, u: f64, eta: f64) -> (f64, f64) {
    // 0.5[(1±β)x1 + (1∓β)x2], arranged so β = 1 and x1 = x2 are exact
    let pull = 0.5 * (1.0 - sbx_spread_factor(u, eta));
    (x1 + pull * (x2 - x1), x2 + pull * (x1 - x2))
}

/// Simulated binary crossover. Each variable takes part with probability
/// one half, the two children swap their values for a variable with
/// probability one half, and results are clipped into `bounds`.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &Strategy,
    p2: &Strategy,
    params: &VariationParams,
    bounds: &StrategyBounds,
    ids: &mut IdSource,
    rng: &mut R,
) -> Result<(Strategy, Strategy)> {
    bounds.check(&p1.values)?;
    bounds.check(&p2.values)?;
    let mut c1 = p1.values.clone();
    let mut c2 = p2.values.clone();
    if rng.random::<f64>() < params.p_crossover {
        for (a, b) in c1.iter_mut().zip(c2.iter_mut()) {
            if rng.random_bool(0.5) {
                let u = rng.random::<f64>();
                let (x, y) = sbx_pair(*a, *b, u, params.eta_crossover);
                if rng.random_bool(0.5) {
                    (*a, *b) = (y, x);
                } else {
                    (*a, *b) = (x, y);
                }
            }
        }
        bounds.clip(&mut c1);
        bounds.clip(&mut c2);
    }
    Ok((Strategy::new(ids.next_id(), c1), Strategy::new(ids.next_id(), c2)))
}

/// Bounded polynomial perturbation of one variable for a draw `u`.
pub fn polynomial_perturbation(x: f64, lower: f64, upper: f64, u: f64, eta: f64) -> f64 {
    let range = upper - lower;
    let power = 1.0 / (eta + 1.0);
    let delta_q = if u < 0.5 {
        let xy = 1.0 - (x - lower) / range;
        let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
        val.powf(power) - 1.0
    } else {
        let xy = 1.0 - (upper - x) / range;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(power)
    };
    (x + delta_q * range).clamp(lower, upper)
}

/// Polynomial mutation applied independently to every variable.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    s: &Strategy,
    params: &VariationParams,
    bounds: &StrategyBounds,
    ids: &mut IdSource,
    rng: &mut R,
) -> Result<Strategy> {
    bounds.check(&s.values)?;
    let p = params.mutation_probability(s.len());
    let mut values = s.values.clone();
    for (i, v) in values.iter_mut().enumerate() {
        if rng.random::<f64>() < p {
            let u = rng.random::<f64>();
            *v = polynomial_perturbation(
                *v,
                bounds.lower()[i],
                bounds.upper()[i],
                u,
                params.eta_mutation,
            );
        }
    }
    Ok(Strategy::new(ids.next_id(), values))
}

fn uniform_dim(points: &[PayoffVector]) -> Result<usize> {
    let k = points
        .first()
        .ok_or_else(|| Error::domain("cannot rank an empty point set"))?
        .len();
    for p in points {
        check_dim(k, p.len())?;
    }
    Ok(k)
}

/// Non-domination rank of every point; rank 0 is the non-dominated set.
pub fn fast_nondominated_sort(points: &[PayoffVector], sense: Sense) -> Result<Vec<usize>> {
    uniform_dim(points)?;
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i].as_slice(), points[j].as_slice());
            if dominates_unchecked(a, b, sense) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates_unchecked(b, a, sense) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut ranks = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    let mut rank = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            ranks[i] = rank;
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        current = next;
        rank += 1;
    }
    Ok(ranks)
}

/// Crowding distance of every member of one front.
pub fn crowding_distance(front: &[PayoffVector]) -> Vec<f64> {
    let n = front.len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let k = front[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for m in 0..k {
        order.sort_by(|&a, &b| front[a][m].total_cmp(&front[b][m]).then(a.cmp(&b)));
        let lo = front[order[0]][m];
        let hi = front[order[n - 1]][m];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            let gap = front[w[2]][m] - front[w[0]][m];
            distance[w[1]] += gap / range;
        }
    }
    distance
}

/// Ranks `pool` on its ideal points and keeps the best `mu` individuals:
/// whole fronts by ascending rank, the last partially fitting front cut by
/// descending crowding distance, ties broken by creation id.
pub fn environmental_selection(
    mut pool: Vec<Individual>,
    mu: usize,
    sense: Sense,
) -> Result<Vec<Individual>> {
    if pool.is_empty() {
        return Ok(pool);
    }
    let points = pool
        .iter()
        .map(|ind| {
            ind.ideal_point.clone().ok_or_else(|| {
                Error::State(format!(
                    "individual {:?} has no ideal point",
                    ind.strategy.id
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    assign_rank_and_crowding(&mut pool, &points, sense)?;
    pool.sort_by(selection_order);
    pool.truncate(mu);
    Ok(pool)
}

fn assign_rank_and_crowding(
    pool: &mut [Individual],
    points: &[PayoffVector],
    sense: Sense,
) -> Result<()> {
    let ranks = fast_nondominated_sort(points, sense)?;
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    for r in 0..=max_rank {
        let members: Vec<usize> = (0..ranks.len()).filter(|&i| ranks[i] == r).collect();
        let front: Vec<PayoffVector> = members.iter().map(|&i| points[i].clone()).collect();
        let crowd = crowding_distance(&front);
        for (&i, c) in members.iter().zip(crowd) {
            pool[i].rank = Some(r);
            pool[i].crowding = Some(c);
        }
    }
    Ok(())
}

fn selection_order(a: &Individual, b: &Individual) -> Ordering {
    a.rank
        .cmp(&b.rank)
        .then_with(|| {
            let (ca, cb) = (a.crowding.unwrap_or(0.0), b.crowding.unwrap_or(0.0));
            cb.total_cmp(&ca)
        })
        .then_with(|| a.strategy.id.cmp(&b.strategy.id))
}
