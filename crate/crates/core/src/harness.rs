//! Experiment orchestration: runs every (variant, algorithm, run) cell of a
//! study and writes the tables, convergence series, significance tests and
//! objective-space scatter plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coevolution::{realized_payoffs, run_with_reference, Algorithm, CoevoConfig, RunHistory};
use crate::domination::PayoffVector;
use crate::error::{Error, Result};
use crate::evolution::VariationParams;
use crate::games::{reference_pareto_layer, GameDefinition, GameVariant};
use crate::localsearch::NelderMeadParams;
use crate::metrics::{summarize_runs, wilcoxon_signed_rank, WilcoxonResult};
use crate::surrogate::SurrogateParams;

/// Generations plotted when the config does not list any.
pub const DEFAULT_SNAPSHOT_GENERATIONS: [usize; 6] = [1, 10, 15, 20, 25, 50];

/// Row spacing of the convergence table.
pub const TABLE_STRIDE: usize = 5;

/// Significance level of the per-variant Wilcoxon verdict.
pub const ALPHA: f64 = 0.05;

/// Scatter plots underlay a coarser reference layer than the IGD one.
const PLOT_REFERENCE_RESOLUTION: usize = 40;

/// A whole study, usually read from JSON. Every field is optional in the
/// file; missing ones take the defaults below.
///
/// ```json
/// {
///   "variants": ["Rastrigin1D", "Ackley2D"],
///   "algorithms": ["canonical", "memetic"],
///   "runs": 20,
///   "population_size": 50,
///   "generations": 100,
///   "p_ls": 0.2,
///   "seed": 1,
///   "out_dir": "results",
///   "snapshot_generations": [1, 10, 25]
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub variants: Vec<GameVariant>,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub population_size: usize,
    pub generations: usize,
    pub variation: VariationParams,
    pub p_ls: f64,
    pub surrogate: SurrogateParams,
    pub local_search: NelderMeadParams,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub reference_resolution: usize,
    /// `None` plots the default generations that do not exceed `generations`.
    pub snapshot_generations: Option<Vec<usize>>,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let run = CoevoConfig::default();
        ExperimentConfig {
            variants: GameVariant::EXTENDED.to_vec(),
            algorithms: Algorithm::ALL.to_vec(),
            runs: 20,
            population_size: run.population_size,
            generations: run.generations,
            variation: run.variation,
            p_ls: run.p_ls,
            surrogate: run.surrogate,
            local_search: run.local_search,
            seed: 0,
            out_dir: PathBuf::from("results"),
            reference_resolution: run.reference_resolution,
            snapshot_generations: None,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.variants.is_empty() {
            return Err(Error::config("variants", "must name at least one variant"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("algorithms", "must name at least one algorithm"));
        }
        for (i, v) in self.variants.iter().enumerate() {
            if self.variants[..i].contains(v) {
                return Err(Error::config("variants", format!("`{v}` listed twice")));
            }
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].contains(a) {
                return Err(Error::config("algorithms", format!("`{a}` listed twice")));
            }
        }
        if let Some(gens) = &self.snapshot_generations {
            if let Some(g) = gens.iter().find(|g| **g > self.generations) {
                return Err(Error::config(
                    "snapshot_generations",
                    format!("generation {g} exceeds generations = {}", self.generations),
                ));
            }
        }
        self.run_config(Algorithm::Memetic, 0).validate()
    }

    /// Settings of one run of `algorithm` with the given seed.
    pub fn run_config(&self, algorithm: Algorithm, seed: u64) -> CoevoConfig {
        CoevoConfig {
            population_size: self.population_size,
            generations: self.generations,
            variation: self.variation.clone(),
            memetic: algorithm == Algorithm::Memetic,
            p_ls: self.p_ls,
            surrogate: self.surrogate.clone(),
            local_search: self.local_search.clone(),
            seed,
            reference_resolution: self.reference_resolution,
        }
    }

    /// Generations that get a scatter plot, sorted and deduplicated.
    pub fn snapshot_generations(&self) -> Vec<usize> {
        let mut gens = match &self.snapshot_generations {
            Some(g) => g.clone(),
            None => DEFAULT_SNAPSHOT_GENERATIONS
                .iter()
                .copied()
                .filter(|g| *g <= self.generations)
                .collect(),
        };
        gens.sort_unstable();
        gens.dedup();
        gens
    }
}

/// Reads and validates a JSON config.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    config.validate()?;
    Ok(config)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of one cell. The algorithm does not enter the mix, so canonical
/// and memetic run `i` of a variant start from the same initial
/// populations and form a proper pair for the signed-rank test.
pub fn derive_seed(master: u64, variant: GameVariant, _algorithm: Algorithm, run: usize) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ variant.index() as u64);
    splitmix64(h ^ run as u64)
}

/// Runs every (algorithm, run) cell of one variant on the current rayon
/// pool. Histories come back grouped by algorithm in config order, then by
/// run index.
pub fn run_variant(config: &ExperimentConfig, variant: GameVariant) -> Result<Vec<RunHistory>> {
    let game = GameDefinition::new(variant);
    let reference = reference_pareto_layer(&game, config.reference_resolution)?;
    let cells: Vec<(Algorithm, usize)> = config
        .algorithms
        .iter()
        .flat_map(|a| (0..config.runs).map(move |r| (*a, r)))
        .collect();
    cells
        .par_iter()
        .map(|&(algorithm, run)| {
            let seed = derive_seed(config.seed, variant, algorithm, run);
            run_with_reference(&config.run_config(algorithm, seed), &game, &reference).map_err(|e| {
                Error::Run {
                    cell: format!("{variant}/{algorithm}/run {run} (seed {seed})"),
                    source: Box::new(e),
                }
            })
        })
        .collect()
}

/// Outcome of one variant of a study.
#[derive(Debug, Clone)]
pub struct VariantReport {
    pub variant: GameVariant,
    /// Final-generation IGD of every run, per algorithm.
    pub final_igd: BTreeMap<Algorithm, Vec<f64>>,
    /// Present when both algorithms ran; `Err` when too few pairs differ.
    pub wilcoxon: Option<std::result::Result<WilcoxonResult, String>>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub out_dir: PathBuf,
    pub variants: Vec<VariantReport>,
}

/// Runs the whole study and writes its outputs under `config.out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;

    let mut variants = Vec::with_capacity(config.variants.len());
    for &variant in &config.variants {
        let histories = pool.install(|| run_variant(config, variant))?;
        variants.push(write_variant_outputs(config, variant, &histories)?);
    }
    Ok(ExperimentReport {
        out_dir: config.out_dir.clone(),
        variants,
    })
}

fn write_variant_outputs(
    config: &ExperimentConfig,
    variant: GameVariant,
    histories: &[RunHistory],
) -> Result<VariantReport> {
    let dir = &config.out_dir;
    let mut files = vec![
        emit_convergence_table(histories, dir)?,
        emit_convergence_series(histories, dir)?,
    ];

    let mut final_igd: BTreeMap<Algorithm, Vec<f64>> = BTreeMap::new();
    for h in histories {
        final_igd.entry(h.algorithm).or_default().push(h.final_snapshot().igd);
    }
    let wilcoxon = match (final_igd.get(&Algorithm::Canonical), final_igd.get(&Algorithm::Memetic)) {
        (Some(c), Some(m)) => {
            let test = match wilcoxon_signed_rank(c, m) {
                Ok(r) => Ok(r),
                Err(Error::InsufficientData(msg)) => Err(msg),
                Err(e) => return Err(e),
            };
            let path = dir.join(format!("{variant}_wilcoxon.txt"));
            write_atomic(&path, wilcoxon_line(variant, c, m, &test).as_bytes())?;
            files.push(path);
            Some(test)
        }
        _ => None,
    };

    let game = GameDefinition::new(variant);
    let plot_reference = reference_pareto_layer(
        &game,
        config.reference_resolution.min(PLOT_REFERENCE_RESOLUTION),
    )?;
    let generations = config.snapshot_generations();
    // one scatter set per algorithm, taken from its first run
    for algorithm in &config.algorithms {
        if let Some(h) = histories.iter().find(|h| h.algorithm == *algorithm) {
            files.extend(emit_objective_scatter(h, &generations, &plot_reference, dir)?);
        }
    }

    Ok(VariantReport {
        variant,
        final_igd,
        wilcoxon,
        files,
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn wilcoxon_line(
    variant: GameVariant,
    canonical: &[f64],
    memetic: &[f64],
    test: &std::result::Result<WilcoxonResult, String>,
) -> String {
    let (c, m) = (mean(canonical), mean(memetic));
    match test {
        Ok(r) => {
            let verdict = if !r.significant(ALPHA) {
                "not significant".to_string()
            } else if m < c {
                "significant, memetic lower".to_string()
            } else {
                "significant, canonical lower".to_string()
            };
            format!(
                "variant={variant} pairs={} canonical_mean={c} memetic_mean={m} statistic={} z={} p_value={} alpha={ALPHA} verdict={verdict}\n",
                r.n, r.statistic, r.z, r.p_value
            )
        }
        Err(msg) => format!(
            "variant={variant} canonical_mean={c} memetic_mean={m} statistic=NA p_value=NA alpha={ALPHA} verdict=insufficient data ({msg})\n"
        ),
    }
}

type Grouped<'a> = (GameVariant, usize, Vec<(Algorithm, Vec<&'a RunHistory>)>);

fn group_by_algorithm(histories: &[RunHistory]) -> Result<Grouped<'_>> {
    let first = histories
        .first()
        .ok_or_else(|| Error::domain("need at least one run history"))?;
    let (variant, generations) = (first.variant, first.generations());
    for h in histories {
        if h.variant != variant {
            return Err(Error::domain(format!("histories mix variants {variant} and {}", h.variant)));
        }
        if h.generations() != generations {
            return Err(Error::domain(format!(
                "inconsistent generation counts {generations} and {}",
                h.generations()
            )));
        }
    }
    let groups = Algorithm::ALL
        .iter()
        .map(|a| (*a, histories.iter().filter(|h| h.algorithm == *a).collect::<Vec<_>>()))
        .filter(|(_, hs)| !hs.is_empty())
        .collect();
    Ok((variant, generations, groups))
}

/// Appendix-style table: one row per fifth generation with the average,
/// minimum, maximum and standard deviation of IGD across runs, canonical
/// block first.
pub fn convergence_table(histories: &[RunHistory]) -> Result<String> {
    let (_, generations, groups) = group_by_algorithm(histories)?;
    let mut out = String::from("generation");
    for (a, _) in &groups {
        for stat in ["avg", "min", "max", "std"] {
            let _ = write!(out, ",{a}_{stat}");
        }
    }
    out.push('\n');
    for g in (TABLE_STRIDE..=generations).step_by(TABLE_STRIDE) {
        let _ = write!(out, "{g}");
        for (_, hs) in &groups {
            let values: Vec<f64> = hs.iter().map(|h| h.snapshots[g].igd).collect();
            let s = summarize_runs(&values)?;
            let _ = write!(out, ",{},{},{},{}", s.avg, s.min, s.max, s.std);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes [`convergence_table`] to `<variant>_table.csv`.
pub fn emit_convergence_table(histories: &[RunHistory], dir: impl AsRef<Path>) -> Result<PathBuf> {
    let body = convergence_table(histories)?;
    let path = dir.as_ref().join(format!("{}_table.csv", histories[0].variant));
    write_atomic(&path, body.as_bytes())?;
    Ok(path)
}

/// Long-format IGD of every run at every generation.
pub fn convergence_series(histories: &[RunHistory]) -> Result<String> {
    let (_, _, groups) = group_by_algorithm(histories)?;
    let mut out = String::from("variant,algorithm,seed,generation,igd\n");
    for (_, hs) in groups {
        for h in hs {
            for s in &h.snapshots {
                let _ = writeln!(out, "{},{},{},{},{}", h.variant, h.algorithm, h.seed, s.generation, s.igd);
            }
        }
    }
    Ok(out)
}

/// Writes [`convergence_series`] to `<variant>_convergence.csv`.
pub fn emit_convergence_series(histories: &[RunHistory], dir: impl AsRef<Path>) -> Result<PathBuf> {
    let body = convergence_series(histories)?;
    let path = dir.as_ref().join(format!("{}_convergence.csv", histories[0].variant));
    write_atomic(&path, body.as_bytes())?;
    Ok(path)
}

const PLOT_SIZE: f64 = 480.0;
const PLOT_MARGIN: f64 = 40.0;
const PLOT_EXTENT: f64 = 2.2;

fn to_px(x: f64, y: f64) -> (f64, f64) {
    let span = PLOT_SIZE - 2.0 * PLOT_MARGIN;
    let px = PLOT_MARGIN + (x + PLOT_EXTENT) / (2.0 * PLOT_EXTENT) * span;
    let py = PLOT_MARGIN + (PLOT_EXTENT - y) / (2.0 * PLOT_EXTENT) * span;
    (px, py)
}

/// SVG scatter of realized outcomes over the reference layer, on the fixed
/// viewport [-2.2, 2.2]^2.
pub fn scatter_svg(title: &str, outcomes: &[PayoffVector], reference: &[PayoffVector]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_SIZE}" height="{PLOT_SIZE}" viewBox="0 0 {PLOT_SIZE} {PLOT_SIZE}">"#
    );
    s.push_str("<style>.reference{fill:#bbbbbb}.outcome{fill:#1f5fbf;fill-opacity:0.6}text{font:11px sans-serif}</style>\n");
    let _ = writeln!(s, r#"<rect width="{PLOT_SIZE}" height="{PLOT_SIZE}" fill="white"/>"#);
    let (x0, y0) = to_px(-PLOT_EXTENT, PLOT_EXTENT);
    let (x1, y1) = to_px(PLOT_EXTENT, -PLOT_EXTENT);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    let (ox, oy) = to_px(0.0, 0.0);
    let _ = writeln!(s, r##"<line x1="{x0}" y1="{oy}" x2="{x1}" y2="{oy}" stroke="#dddddd"/>"##);
    let _ = writeln!(s, r##"<line x1="{ox}" y1="{y0}" x2="{ox}" y2="{y1}" stroke="#dddddd"/>"##);
    for t in [-2, -1, 0, 1, 2] {
        let (tx, _) = to_px(t as f64, 0.0);
        let (_, ty) = to_px(0.0, t as f64);
        let _ = writeln!(s, r#"<text x="{tx}" y="{}" text-anchor="middle">{t}</text>"#, y1 + 14.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{t}</text>"#, x0 - 4.0, ty + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, PLOT_SIZE / 2.0);
    s.push_str("<g class=\"reference\">\n");
    for p in reference {
        let (px, py) = to_px(p[0], p[1]);
        let _ = writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="2" height="2"/>"#, px - 1.0, py - 1.0);
    }
    s.push_str("</g>\n<g class=\"outcome\">\n");
    for p in outcomes {
        let (px, py) = to_px(p[0], p[1]);
        let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="1.6"/>"#);
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// One `<variant>_<algorithm>_gen<g>.svg` per requested generation, each
/// holding all `μ x μ` realized payoffs of that generation's survivors.
pub fn emit_objective_scatter(
    history: &RunHistory,
    generations: &[usize],
    reference: &[PayoffVector],
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let game = GameDefinition::new(history.variant);
    let mut files = Vec::with_capacity(generations.len());
    for &g in generations {
        let snap = history.snapshot(g).ok_or_else(|| {
            Error::domain(format!(
                "no snapshot for generation {g}; the run has {} generations",
                history.generations()
            ))
        })?;
        let outcomes = realized_payoffs(&snap.population_p1, &snap.population_p2, &game)?;
        let title = format!("{} {} generation {g}", history.variant, history.algorithm);
        let path = dir
            .as_ref()
            .join(format!("{}_{}_gen{g}.svg", history.variant, history.algorithm));
        write_atomic(&path, scatter_svg(&title, &outcomes, reference).as_bytes())?;
        files.push(path);
    }
    Ok(files)
}

/// Reference layer as a two-column CSV.
pub fn reference_csv(reference: &[PayoffVector]) -> String {
    let mut out = String::from("f1,f2\n");
    for p in reference {
        let _ = writeln!(out, "{},{}", p[0], p[1]);
    }
    out
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::other("path has no file name")))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
