//! The tug-of-war game, its extended variants with an embedded synthetic
//! function, and the reference Pareto layer used for IGD scoring.
//!
//! Player 1 minimizes the final mass position `(x1, x2)`, player 2
//! maximizes it. In the base game each player picks an angle `θ`. In the
//! extended games a strategy is laid out as `[θ, F, z_1, .., z_n]`: the
//! pulling force `F ∈ [0, 1]` is damped by `1 + φ(z)`.

use std::collections::HashSet;
use std::f64::consts::{E, FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::smallvec;

use crate::domination::{PayoffVector, Sense};
use crate::error::{check_dim, Error, Result};

/// Unique identifier assigned to a strategy when it is created.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrategyId(pub u64);

/// Hands out strictly increasing strategy ids within one run.
#[derive(Debug, Default, Clone)]
pub struct IdSource {
    next: u64,
}

impl IdSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_id(&mut self) -> StrategyId {
        let id = StrategyId(self.next);
        self.next += 1;
        id
    }
}

/// A player's decision vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub id: StrategyId,
    pub values: Vec<f64>,
}

impl Strategy {
    pub fn new(id: StrategyId, values: Vec<f64>) -> Self {
        Strategy { id, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Box constraints on a decision vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl StrategyBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::domain("bounds need at least one variable"));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::domain(format!(
                    "variable {i}: lower bound {lo} must be finite and below upper bound {hi}"
                )));
            }
        }
        Ok(StrategyBounds { lower, upper })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn range(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.len()
            && values
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Clips every coordinate into its interval.
    pub fn clip(&self, values: &mut [f64]) {
        for (v, (lo, hi)) in values.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    /// Fails with a domain error unless `values` lies inside the box.
    pub fn check(&self, values: &[f64]) -> Result<()> {
        check_dim(self.len(), values.len())?;
        if self.contains(values) {
            Ok(())
        } else {
            Err(Error::domain(format!("strategy {values:?} violates bounds")))
        }
    }
}

/// Synthetic function family embedded into the extended games.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiFamily {
    Rosenbrock,
    Rastrigin,
    Griewank,
    Ackley,
}

impl PhiFamily {
    /// Search interval for every `z` coordinate.
    pub fn domain(self) -> (f64, f64) {
        match self {
            PhiFamily::Rosenbrock => (-2.048, 2.048),
            PhiFamily::Rastrigin => (-5.12, 5.12),
            PhiFamily::Griewank => (-600.0, 600.0),
            PhiFamily::Ackley => (-32.768, 32.768),
        }
    }

    /// The global minimizer coordinate (all coordinates equal).
    pub fn minimizer(self) -> f64 {
        match self {
            PhiFamily::Rosenbrock => 1.0,
            _ => 0.0,
        }
    }
}

/// A synthetic function family together with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhiKind {
    pub family: PhiFamily,
    pub dim: usize,
}

/// Evaluates the synthetic function `kind` at `z`.
pub fn phi(kind: PhiKind, z: &[f64]) -> Result<f64> {
    check_dim(kind.dim, z.len())?;
    Ok(phi_unchecked(kind.family, z))
}

fn phi_unchecked(family: PhiFamily, z: &[f64]) -> f64 {
    let n = z.len() as f64;
    match family {
        PhiFamily::Rosenbrock => z
            .windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
            .sum(),
        PhiFamily::Rastrigin => {
            10.0 * n
                + z.iter()
                    .map(|&v| v * v - 10.0 * (TAU * v).cos())
                    .sum::<f64>()
        }
        PhiFamily::Griewank => {
            let sum: f64 = z.iter().map(|v| v * v / 4000.0).sum();
            let prod: f64 = z
                .iter()
                .enumerate()
                .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                .product();
            sum - prod + 1.0
        }
        PhiFamily::Ackley => {
            let sq = z.iter().map(|v| v * v).sum::<f64>() / n;
            let cs = z.iter().map(|v| (TAU * v).cos()).sum::<f64>() / n;
            // grouped so that the minimum evaluates to exactly zero
            20.0 * (1.0 - (-0.2 * sq.sqrt()).exp()) + (E - cs.exp())
        }
    }
}

/// The benchmark games.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameVariant {
    Base,
    Rosenbrock2D,
    Rosenbrock3D,
    Rastrigin1D,
    Rastrigin2D,
    Rastrigin3D,
    Griewank1D,
    Griewank2D,
    Griewank3D,
    Ackley2D,
}

impl GameVariant {
    pub const ALL: [GameVariant; 10] = [
        GameVariant::Base,
        GameVariant::Rosenbrock2D,
        GameVariant::Rosenbrock3D,
        GameVariant::Rastrigin1D,
        GameVariant::Rastrigin2D,
        GameVariant::Rastrigin3D,
        GameVariant::Griewank1D,
        GameVariant::Griewank2D,
        GameVariant::Griewank3D,
        GameVariant::Ackley2D,
    ];

    /// The nine extended games of the benchmark study.
    pub const EXTENDED: [GameVariant; 9] = [
        GameVariant::Rosenbrock2D,
        GameVariant::Rosenbrock3D,
        GameVariant::Rastrigin1D,
        GameVariant::Rastrigin2D,
        GameVariant::Rastrigin3D,
        GameVariant::Griewank1D,
        GameVariant::Griewank2D,
        GameVariant::Griewank3D,
        GameVariant::Ackley2D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameVariant::Base => "Base",
            GameVariant::Rosenbrock2D => "Rosenbrock2D",
            GameVariant::Rosenbrock3D => "Rosenbrock3D",
            GameVariant::Rastrigin1D => "Rastrigin1D",
            GameVariant::Rastrigin2D => "Rastrigin2D",
            GameVariant::Rastrigin3D => "Rastrigin3D",
            GameVariant::Griewank1D => "Griewank1D",
            GameVariant::Griewank2D => "Griewank2D",
            GameVariant::Griewank3D => "Griewank3D",
            GameVariant::Ackley2D => "Ackley2D",
        }
    }

    /// Stable position of the variant in [`GameVariant::ALL`].
    pub fn index(self) -> usize {
        GameVariant::ALL.iter().position(|v| *v == self).unwrap()
    }

    /// The embedded synthetic function, `None` for the base game.
    pub fn phi_kind(self) -> Option<PhiKind> {
        use PhiFamily::*;
        let (family, dim) = match self {
            GameVariant::Base => return None,
            GameVariant::Rosenbrock2D => (Rosenbrock, 2),
            GameVariant::Rosenbrock3D => (Rosenbrock, 3),
            GameVariant::Rastrigin1D => (Rastrigin, 1),
            GameVariant::Rastrigin2D => (Rastrigin, 2),
            GameVariant::Rastrigin3D => (Rastrigin, 3),
            GameVariant::Griewank1D => (Griewank, 1),
            GameVariant::Griewank2D => (Griewank, 2),
            GameVariant::Griewank3D => (Griewank, 3),
            GameVariant::Ackley2D => (Ackley, 2),
        };
        Some(PhiKind { family, dim })
    }

    pub fn valid_names() -> String {
        GameVariant::ALL
            .iter()
            .map(|v| v.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GameVariant::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::config(
                    "variant",
                    format!(
                        "unknown variant `{s}`; valid names are: {}",
                        GameVariant::valid_names()
                    ),
                )
            })
    }
}

impl Serialize for GameVariant {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for GameVariant {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: Error| serde::de::Error::custom(e))
    }
}

/// A fully specified two-player game: player 1 minimizes, player 2
/// maximizes, both over K = 2 objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct GameDefinition {
    pub variant: GameVariant,
    pub bounds_p1: StrategyBounds,
    pub bounds_p2: StrategyBounds,
}

impl GameDefinition {
    pub const SENSE_P1: Sense = Sense::Minimize;
    pub const SENSE_P2: Sense = Sense::Maximize;
    pub const OBJECTIVES: usize = 2;

    pub fn new(variant: GameVariant) -> Self {
        let bounds = match variant.phi_kind() {
            None => StrategyBounds::new(vec![0.0], vec![TAU]),
            Some(kind) => {
                let (lo, hi) = kind.family.domain();
                let mut lower = vec![0.0, 0.0];
                let mut upper = vec![TAU, 1.0];
                lower.extend(std::iter::repeat_n(lo, kind.dim));
                upper.extend(std::iter::repeat_n(hi, kind.dim));
                StrategyBounds::new(lower, upper)
            }
        }
        .expect("built-in bounds are valid");
        GameDefinition {
            variant,
            bounds_p1: bounds.clone(),
            bounds_p2: bounds,
        }
    }

    pub fn sense(player: Player) -> Sense {
        match player {
            Player::One => Self::SENSE_P1,
            Player::Two => Self::SENSE_P2,
        }
    }

    pub fn bounds(&self, player: Player) -> &StrategyBounds {
        match player {
            Player::One => &self.bounds_p1,
            Player::Two => &self.bounds_p2,
        }
    }

    /// Strategy length for both players.
    pub fn strategy_len(&self) -> usize {
        self.bounds_p1.len()
    }

    /// Payoff of one interaction between raw decision vectors.
    pub fn payoff(&self, s1: &[f64], s2: &[f64]) -> Result<PayoffVector> {
        let n = self.strategy_len();
        check_dim(n, s1.len())?;
        check_dim(n, s2.len())?;
        match self.variant.phi_kind() {
            None => evaluate_base(s1[0], s2[0]),
            Some(kind) => {
                let pull1 = s1[1] / (1.0 + phi_unchecked(kind.family, &s1[2..]));
                let pull2 = s2[1] / (1.0 + phi_unchecked(kind.family, &s2[2..]));
                let (sin1, cos1) = s1[0].sin_cos();
                let (sin2, cos2) = s2[0].sin_cos();
                PayoffVector::new([pull1 * cos1 + pull2 * cos2, pull1 * sin1 + pull2 * sin2])
            }
        }
    }
}

/// Which side of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

/// Base tug-of-war payoff: `(cos θ1 + cos θ2, sin θ1 + sin θ2)`.
pub fn evaluate_base(theta1: f64, theta2: f64) -> Result<PayoffVector> {
    if !(theta1.is_finite() && theta2.is_finite()) {
        return Err(Error::domain(format!(
            "angles must be finite, got ({theta1}, {theta2})"
        )));
    }
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    Ok(PayoffVector::from_finite(smallvec![c1 + c2, s1 + s2]))
}

/// Payoff of `s1` against `s2` in `game`.
pub fn evaluate_extended(s1: &Strategy, s2: &Strategy, game: &GameDefinition) -> Result<PayoffVector> {
    game.payoff(&s1.values, &s2.values)
}

const DEDUP_SCALE: f64 = 1e12;

/// Representative sample of the payoffs reachable when both players pick
/// rationalizable angles: player 1 in `[π, 3π/2]`, player 2 in `[0, π/2]`,
/// full force and every `φ` at its global minimum. The grid has
/// `resolution × resolution` angle pairs; coincident payoffs are kept once.
pub fn reference_pareto_layer(game: &GameDefinition, resolution: usize) -> Result<Vec<PayoffVector>> {
    if resolution < 2 {
        return Err(Error::domain(format!(
            "reference resolution must be at least 2, got {resolution}"
        )));
    }
    let step = FRAC_PI_2 / (resolution - 1) as f64;
    let embed = |theta: f64| -> Vec<f64> {
        match game.variant.phi_kind() {
            None => vec![theta],
            Some(kind) => {
                let mut v = vec![theta, 1.0];
                v.extend(std::iter::repeat_n(kind.family.minimizer(), kind.dim));
                v
            }
        }
    };
    let mut seen = HashSet::new();
    let mut layer = Vec::new();
    for i in 0..resolution {
        let theta1 = PI + step * i as f64;
        let s1 = embed(theta1);
        for j in 0..resolution {
            let s2 = embed(step * j as f64);
            let p = game.payoff(&s1, &s2)?;
            // collapse round-off twins such as sin(π) ≈ 1.2e-16 onto one key
            let key: Vec<i64> = p.iter().map(|v| (v * DEDUP_SCALE).round() as i64).collect();
            if seen.insert(key) {
                layer.push(p);
            }
        }
    }
    Ok(layer)
}
