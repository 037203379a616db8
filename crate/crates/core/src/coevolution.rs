//! The canonical and memetic co-evolutionary loops.
//!
//! Each player owns a subpopulation. Every generation the parents and their
//! offspring play all pairwise interactions (served from a run-wide ledger
//! so no pair is ever evaluated twice), each strategy is summarized by the
//! ideal point of its anti-optimal front, and NSGA-II style survival keeps
//! `μ` strategies per player. The memetic loop additionally refines a random
//! subset of offspring on per-player surrogate models before evaluation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domination::{ideal_point, PayoffVector, Sense};
use crate::error::{Error, Result};
use crate::evolution::{environmental_selection, polynomial_mutation, sbx_crossover, Individual, VariationParams};
use crate::games::{reference_pareto_layer, GameDefinition, GameVariant, IdSource, Player, StrategyId};
use crate::localsearch::{refine_population, NelderMeadParams};
use crate::metrics::igd;
use crate::surrogate::{train_surrogate, SurrogateModel, SurrogateParams};

/// Cache of every interaction evaluated during one run.
#[derive(Debug, Default, Clone)]
pub struct InteractionLedger {
    payoffs: HashMap<(StrategyId, StrategyId), PayoffVector>,
    evaluations: u64,
}

impl InteractionLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of true game evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn get(&self, p1: StrategyId, p2: StrategyId) -> Option<&PayoffVector> {
        self.payoffs.get(&(p1, p2))
    }

    /// Returns the cached payoff or evaluates and records it.
    pub fn get_or_evaluate(
        &mut self,
        p1: StrategyId,
        p2: StrategyId,
        evaluate: impl FnOnce() -> Result<PayoffVector>,
    ) -> Result<&PayoffVector> {
        use std::collections::hash_map::Entry;
        match self.payoffs.entry((p1, p2)) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => {
                let p = evaluate()?;
                self.evaluations += 1;
                Ok(e.insert(p))
            }
        }
    }
}

/// Payoffs of all interactions: row `i` is player 1's strategy `i`,
/// column `j` is player 2's strategy `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<PayoffVector>,
}

impl PayoffMatrix {
    pub fn from_rows(rows: Vec<Vec<PayoffVector>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::domain("payoff matrix must be non-empty"));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::domain("payoff matrix rows differ in length"));
        }
        Ok(PayoffMatrix {
            rows: n_rows,
            cols: n_cols,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PayoffVector {
        &self.cells[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[PayoffVector] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<PayoffVector> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn cells(&self) -> &[PayoffVector] {
        &self.cells
    }
}

/// Plays every strategy of `s1` against every strategy of `s2`, evaluating
/// only pairs the ledger has not seen.
pub fn evaluate_interactions(
    s1: &[Individual],
    s2: &[Individual],
    game: &GameDefinition,
    ledger: &mut InteractionLedger,
) -> Result<PayoffMatrix> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::domain("both populations must be non-empty"));
    }
    let mut cells = Vec::with_capacity(s1.len() * s2.len());
    for a in s1 {
        for b in s2 {
            let p = ledger.get_or_evaluate(a.strategy.id, b.strategy.id, || {
                game.payoff(&a.strategy.values, &b.strategy.values)
            })?;
            cells.push(p.clone());
        }
    }
    Ok(PayoffMatrix {
        rows: s1.len(),
        cols: s2.len(),
        cells,
    })
}

/// Ideal point of the anti-optimal front of every strategy of `player`:
/// the opponent's component-wise extreme over that strategy's row (player
/// 1, maximizing opponent) or column (player 2, minimizing opponent).
pub fn approximate_ideal_points(matrix: &PayoffMatrix, player: Player) -> Result<Vec<PayoffVector>> {
    match player {
        Player::One => (0..matrix.rows())
            .map(|i| ideal_point(matrix.row(i), Sense::Maximize))
            .collect(),
        Player::Two => (0..matrix.cols())
            .map(|j| ideal_point(&matrix.column(j), Sense::Minimize))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Canonical,
    Memetic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Canonical, Algorithm::Memetic];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Canonical => "canonical",
            Algorithm::Memetic => "memetic",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Algorithm::Canonical),
            "memetic" => Ok(Algorithm::Memetic),
            other => Err(Error::config(
                "algorithms",
                format!("unknown algorithm `{other}`; expected `canonical` or `memetic`"),
            )),
        }
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: Error| serde::de::Error::custom(e))
    }
}

/// Settings of a single co-evolutionary run.
#[derive(Debug, Clone, PartialEq)]
pub struct CoevoConfig {
    pub population_size: usize,
    pub generations: usize,
    pub variation: VariationParams,
    pub memetic: bool,
    pub p_ls: f64,
    pub surrogate: SurrogateParams,
    pub local_search: NelderMeadParams,
    pub seed: u64,
    /// Grid resolution of the IGD reference layer.
    pub reference_resolution: usize,
}

impl Default for CoevoConfig {
    fn default() -> Self {
        CoevoConfig {
            population_size: 50,
            generations: 100,
            variation: VariationParams::default(),
            memetic: false,
            p_ls: 0.2,
            surrogate: SurrogateParams::default(),
            local_search: NelderMeadParams::default(),
            seed: 0,
            reference_resolution: 100,
        }
    }
}

impl CoevoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population_size", "must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.p_ls) {
            return Err(Error::config("p_ls", "must lie in [0, 1]"));
        }
        if self.reference_resolution < 2 {
            return Err(Error::config("reference_resolution", "must be at least 2"));
        }
        self.variation.validate()?;
        self.surrogate.validate()?;
        self.local_search.validate()
    }

    pub fn algorithm(&self) -> Algorithm {
        if self.memetic {
            Algorithm::Memetic
        } else {
            Algorithm::Canonical
        }
    }
}

/// State of both subpopulations after one generation (generation 0 is the
/// evaluated initial population).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSnapshot {
    pub generation: usize,
    pub population_p1: Vec<Individual>,
    pub population_p2: Vec<Individual>,
    /// IGD of the realized survivor-vs-survivor payoffs.
    pub igd: f64,
    /// Cumulative true game evaluations.
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub variant: GameVariant,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub snapshots: Vec<GenerationSnapshot>,
}

impl RunHistory {
    pub fn generations(&self) -> usize {
        self.snapshots.len().saturating_sub(1)
    }

    pub fn snapshot(&self, generation: usize) -> Option<&GenerationSnapshot> {
        self.snapshots.get(generation)
    }

    pub fn igd_series(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.igd).collect()
    }

    pub fn final_snapshot(&self) -> &GenerationSnapshot {
        self.snapshots.last().expect("a run history always holds the initial state")
    }
}

/// Realized payoffs of every survivor pairing, in row-major order.
pub fn realized_payoffs(
    s1: &[Individual],
    s2: &[Individual],
    game: &GameDefinition,
) -> Result<Vec<PayoffVector>> {
    let mut out = Vec::with_capacity(s1.len() * s2.len());
    for a in s1 {
        for b in s2 {
            out.push(game.payoff(&a.strategy.values, &b.strategy.values)?);
        }
    }
    Ok(out)
}

/// Canonical co-evolution; requires `config.memetic == false`.
pub fn run_canonical(config: &CoevoConfig, game: &GameDefinition) -> Result<RunHistory> {
    if config.memetic {
        return Err(Error::config("memetic", "run_canonical needs the memetic flag off"));
    }
    let reference = reference_pareto_layer(game, config.reference_resolution)?;
    run_with_reference(config, game, &reference)
}

/// Memetic co-evolution; requires `config.memetic == true`.
pub fn run_memetic(config: &CoevoConfig, game: &GameDefinition) -> Result<RunHistory> {
    if !config.memetic {
        return Err(Error::config("memetic", "run_memetic needs the memetic flag on"));
    }
    let reference = reference_pareto_layer(game, config.reference_resolution)?;
    run_with_reference(config, game, &reference)
}

// Independent random streams so that enabling refinement never shifts the
// draws used for initialization and variation.
const STREAM_INIT: u64 = 1;
const STREAM_VARIATION: u64 = 2;
const STREAM_SURROGATE: u64 = 3;
const STREAM_LOCAL_SEARCH: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs the algorithm selected by `config.memetic`, scoring IGD against a
/// precomputed reference layer.
pub fn run_with_reference(
    config: &CoevoConfig,
    game: &GameDefinition,
    reference: &[PayoffVector],
) -> Result<RunHistory> {
    config.validate()?;
    let mut runner = Runner::new(config, game, reference);
    runner.run()
}

struct Runner<'a> {
    config: &'a CoevoConfig,
    game: &'a GameDefinition,
    reference: &'a [PayoffVector],
    ledger: InteractionLedger,
    ids: IdSource,
    init_rng: ChaCha8Rng,
    variation_rng: ChaCha8Rng,
    surrogate_rng: ChaCha8Rng,
    ls_rng: ChaCha8Rng,
}

impl<'a> Runner<'a> {
    fn new(config: &'a CoevoConfig, game: &'a GameDefinition, reference: &'a [PayoffVector]) -> Self {
        let seed = config.seed;
        Runner {
            config,
            game,
            reference,
            ledger: InteractionLedger::new(),
            ids: IdSource::new(),
            init_rng: stream(seed, STREAM_INIT),
            variation_rng: stream(seed, STREAM_VARIATION),
            surrogate_rng: stream(seed, STREAM_SURROGATE),
            ls_rng: stream(seed, STREAM_LOCAL_SEARCH),
        }
    }

    fn random_population(&mut self, player: Player) -> Vec<Individual> {
        let bounds = self.game.bounds(player);
        (0..self.config.population_size)
            .map(|_| {
                let values = bounds
                    .lower()
                    .iter()
                    .zip(bounds.upper())
                    .map(|(lo, hi)| self.init_rng.random_range(*lo..*hi))
                    .collect();
                Individual::new(crate::games::Strategy::new(self.ids.next_id(), values))
            })
            .collect()
    }

    fn offspring(&mut self, parents: &[Individual], player: Player) -> Result<Vec<Individual>> {
        let bounds = self.game.bounds(player);
        let params = &self.config.variation;
        let mu = self.config.population_size;
        let mut children = Vec::with_capacity(mu + 1);
        while children.len() < mu {
            let i = self.variation_rng.random_range(0..parents.len());
            let mut j = self.variation_rng.random_range(0..parents.len() - 1);
            if j >= i {
                j += 1;
            }
            let (c1, c2) = sbx_crossover(
                &parents[i].strategy,
                &parents[j].strategy,
                params,
                bounds,
                &mut self.ids,
                &mut self.variation_rng,
            )?;
            for c in [c1, c2] {
                let m = polynomial_mutation(&c, params, bounds, &mut self.ids, &mut self.variation_rng)?;
                children.push(Individual::new(m));
            }
        }
        children.truncate(mu);
        Ok(children)
    }

    /// Evaluates both pools, attaches ideal points and keeps `μ` per player.
    fn evaluate_and_select(
        &mut self,
        pool1: Vec<Individual>,
        pool2: Vec<Individual>,
    ) -> Result<(Vec<Individual>, Vec<Individual>)> {
        let matrix = evaluate_interactions(&pool1, &pool2, self.game, &mut self.ledger)?;
        let ideal1 = approximate_ideal_points(&matrix, Player::One)?;
        let ideal2 = approximate_ideal_points(&matrix, Player::Two)?;
        let attach = |pool: Vec<Individual>, ideals: Vec<PayoffVector>| -> Vec<Individual> {
            pool.into_iter()
                .zip(ideals)
                .map(|(mut ind, p)| {
                    ind.reset();
                    ind.ideal_point = Some(p);
                    ind
                })
                .collect()
        };
        let mu = self.config.population_size;
        let s1 = environmental_selection(attach(pool1, ideal1), mu, GameDefinition::SENSE_P1)?;
        let s2 = environmental_selection(attach(pool2, ideal2), mu, GameDefinition::SENSE_P2)?;
        Ok((s1, s2))
    }

    fn snapshot(&self, generation: usize, s1: &[Individual], s2: &[Individual]) -> Result<GenerationSnapshot> {
        let mut realized = Vec::with_capacity(s1.len() * s2.len());
        for a in s1 {
            for b in s2 {
                let p = self.ledger.get(a.strategy.id, b.strategy.id).ok_or_else(|| {
                    Error::State("survivor pair missing from the interaction ledger".into())
                })?;
                realized.push(p.clone());
            }
        }
        Ok(GenerationSnapshot {
            generation,
            population_p1: s1.to_vec(),
            population_p2: s2.to_vec(),
            igd: igd(self.reference, &realized)?,
            evaluations: self.ledger.evaluations(),
        })
    }

    fn train(&mut self, population: &[Individual], player: Player) -> Result<SurrogateModel> {
        let strategies: Vec<_> = population.iter().map(|i| i.strategy.clone()).collect();
        let targets = population
            .iter()
            .map(|i| {
                i.ideal_point
                    .clone()
                    .ok_or_else(|| Error::State("surrogate target without ideal point".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        train_surrogate(
            &strategies,
            &targets,
            self.game.bounds(player),
            &self.config.surrogate,
            &mut self.surrogate_rng,
        )
    }

    fn refine(&mut self, offspring: Vec<Individual>, model: &SurrogateModel, player: Player) -> Result<Vec<Individual>> {
        refine_population(
            offspring,
            model,
            self.config.p_ls,
            GameDefinition::sense(player),
            self.game.bounds(player),
            &self.config.local_search,
            &mut self.ids,
            &mut self.ls_rng,
        )
    }

    fn run(&mut self) -> Result<RunHistory> {
        let init1 = self.random_population(Player::One);
        let init2 = self.random_population(Player::Two);
        let (mut s1, mut s2) = self.evaluate_and_select(init1, init2)?;
        let mut snapshots = Vec::with_capacity(self.config.generations + 1);
        snapshots.push(self.snapshot(0, &s1, &s2)?);

        let mut models = if self.config.memetic {
            Some((self.train(&s1, Player::One)?, self.train(&s2, Player::Two)?))
        } else {
            None
        };

        for generation in 1..=self.config.generations {
            let mut off1 = self.offspring(&s1, Player::One)?;
            let mut off2 = self.offspring(&s2, Player::Two)?;
            if let Some((m1, m2)) = &models {
                off1 = self.refine(off1, m1, Player::One)?;
                off2 = self.refine(off2, m2, Player::Two)?;
            }
            let pool1: Vec<Individual> = s1.into_iter().chain(off1).collect();
            let pool2: Vec<Individual> = s2.into_iter().chain(off2).collect();
            (s1, s2) = self.evaluate_and_select(pool1, pool2)?;
            if models.is_some() {
                models = Some((self.train(&s1, Player::One)?, self.train(&s2, Player::Two)?));
            }
            snapshots.push(self.snapshot(generation, &s1, &s2)?);
        }

        Ok(RunHistory {
            variant: self.game.variant,
            algorithm: self.config.algorithm(),
            seed: self.config.seed,
            snapshots,
        })
    }
}
