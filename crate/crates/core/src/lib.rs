//! Co-evolutionary solvers for two-player multi-objective games whose
//! players postpone their objective preferences.
//!
//! Each strategy is judged by the ideal point of its anti-optimal front:
//! the best outcome, objective by objective, that the opponent can force.
//! Ranking those ideal points with ordinary Pareto domination stands in for
//! the set-versus-set worst-case comparison. Two solvers are provided:
//!
//! * [`coevolution::run_canonical`]: plain two-population co-evolution with
//!   SBX crossover, polynomial mutation and NSGA-II survival.
//! * [`coevolution::run_memetic`]: the same loop with a per-player neural
//!   surrogate of the ideal point and Lamarckian Nelder-Mead refinement of
//!   a random subset of offspring on that surrogate.
//!
//! The [`games`] module ships the tug-of-war benchmark and its nine
//! extended variants, [`metrics`] the IGD indicator and the Wilcoxon
//! signed-rank test, and [`harness`] the experiment runner behind the
//! `coevomog` binary.

pub mod coevolution;
pub mod domination;
pub mod error;
pub mod evolution;
pub mod games;
pub mod harness;
pub mod localsearch;
pub mod metrics;
pub mod surrogate;

pub use coevolution::{run_canonical, run_memetic, Algorithm, CoevoConfig, RunHistory};
pub use domination::{PayoffVector, Sense};
pub use error::{Error, Result};
pub use games::{GameDefinition, GameVariant, Strategy, StrategyBounds};
