//! Lamarckian refinement of offspring on the surrogate landscape: random
//! scalarization weights plus a bounded Nelder-Mead search.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::domination::Sense;
use crate::error::{check_dim, Error, Result};
use crate::evolution::Individual;
use crate::games::{IdSource, Strategy, StrategyBounds};
use crate::surrogate::SurrogateModel;

/// Non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, values: &[f64]) -> f64 {
        self.0.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// A point drawn uniformly from the (K-1)-simplex, built from normalized
/// independent exponential draws.
pub fn random_simplex_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<SimplexWeights> {
    if k < 1 {
        return Err(Error::domain("simplex weights need K >= 1"));
    }
    if k == 1 {
        return Ok(SimplexWeights(vec![1.0]));
    }
    let mut draws: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 {
        draws.iter_mut().for_each(|w| *w /= total);
    } else {
        draws.iter_mut().for_each(|w| *w = 1.0 / k as f64);
    }
    // fold the rounding residue into the largest entry
    let residue = 1.0 - draws.iter().sum::<f64>();
    let largest = (0..k)
        .max_by(|&a, &b| draws[a].total_cmp(&draws[b]))
        .unwrap_or(0);
    draws[largest] = (draws[largest] + residue).max(0.0);
    Ok(SimplexWeights(draws))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NelderMeadParams {
    /// Initial simplex edge as a fraction of each variable's range.
    pub initial_step: f64,
    pub max_iterations: usize,
    /// Stop once the spread of objective values over the simplex is at most
    /// this much...
    pub tolerance: f64,
    /// ...and every vertex lies within this distance (per coordinate) of
    /// the best one.
    pub x_tolerance: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        NelderMeadParams {
            initial_step: 0.05,
            max_iterations: 100,
            tolerance: 1e-6,
            x_tolerance: 1e-6,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

impl NelderMeadParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_step > 0.0 && self.initial_step < 1.0) {
            return Err(Error::config("local_search.initial_step", "must lie in (0, 1)"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("local_search.tolerance", "must be positive"));
        }
        if !(self.x_tolerance >= 0.0) {
            return Err(Error::config("local_search.x_tolerance", "must be non-negative"));
        }
        Ok(())
    }
}

/// Result of a Nelder-Mead search.
#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Minimizes `objective` from `start` inside `bounds`; every trial point is
/// clipped into the box. The best vertex never gets worse than the start.
pub fn nelder_mead<F>(
    mut objective: F,
    start: &[f64],
    bounds: &StrategyBounds,
    params: &NelderMeadParams,
) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> f64,
{
    bounds.check(start)?;
    let n = start.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let f0 = eval(start);
    if !f0.is_finite() {
        return Err(Error::domain(format!(
            "objective is not finite at the start point ({f0})"
        )));
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f0));
    for i in 0..n {
        let mut x = start.to_vec();
        let step = params.initial_step * bounds.range(i);
        x[i] = if x[i] + step <= bounds.upper()[i] {
            x[i] + step
        } else {
            x[i] - step
        };
        let f = eval(&x);
        simplex.push((x, f));
    }

    let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        let mut x: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
        bounds.clip(&mut x);
        x
    };

    let mut iterations = 0;
    while iterations < params.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread_x = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= params.tolerance && spread_x <= params.x_tolerance {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst_x = simplex[n].0.clone();
        let reflected = along(&centroid, &worst_x, -params.reflection);
        let f_reflected = eval(&reflected);

        if f_reflected < best {
            let expanded = along(&centroid, &reflected, params.expansion);
            let f_expanded = eval(&expanded);
            simplex[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[n - 1].1 {
            simplex[n] = (reflected, f_reflected);
            continue;
        }
        let (contracted, f_contracted, accept) = if f_reflected < worst {
            let x = along(&centroid, &reflected, params.contraction);
            let f = eval(&x);
            let ok = f <= f_reflected;
            (x, f, ok)
        } else {
            let x = along(&centroid, &worst_x, params.contraction);
            let f = eval(&x);
            let ok = f < worst;
            (x, f, ok)
        };
        if accept {
            simplex[n] = (contracted, f_contracted);
            continue;
        }
        let best_x = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = along(&best_x, &vertex.0, params.shrink);
            let f = eval(&x);
            *vertex = (x, f);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    Ok(NelderMeadResult {
        point,
        value,
        iterations,
        evaluations,
    })
}

/// Scalarized surrogate objective as minimized by the local search: the
/// weighted prediction for a minimizing player, its negation for a
/// maximizing one.
pub fn scalarized_objective<'a>(
    model: &'a SurrogateModel,
    weights: &'a SimplexWeights,
    player_sense: Sense,
) -> impl Fn(&[f64]) -> f64 + 'a {
    let sign = match player_sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    move |x: &[f64]| match model.predict_values(x) {
        Ok(y) => sign * weights.dot(&y),
        Err(_) => f64::INFINITY,
    }
}

/// Refines each offspring with probability `p_ls` by a Nelder-Mead search
/// on a randomly scalarized surrogate, writing the improved strategy back
/// under a fresh id. Unselected individuals pass through untouched.
#[allow(clippy::too_many_arguments)]
pub fn refine_population<R: Rng + ?Sized>(
    offspring: Vec<Individual>,
    model: &SurrogateModel,
    p_ls: f64,
    player_sense: Sense,
    bounds: &StrategyBounds,
    params: &NelderMeadParams,
    ids: &mut IdSource,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    check_dim(bounds.len(), model.input_dim())?;
    for ind in &offspring {
        check_dim(model.input_dim(), ind.strategy.len())?;
    }
    let k = model.output_dim();
    offspring
        .into_iter()
        .map(|ind| {
            if rng.random::<f64>() >= p_ls {
                return Ok(ind);
            }
            let weights = random_simplex_weights(k, rng)?;
            let objective = scalarized_objective(model, &weights, player_sense);
            let found = nelder_mead(&objective, &ind.strategy.values, bounds, params)?;
            Ok(Individual::new(Strategy::new(ids.next_id(), found.point)))
        })
        .collect()
}
