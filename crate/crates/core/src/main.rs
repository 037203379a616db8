use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coevo_mog::harness::{self, ExperimentConfig};
use coevo_mog::{Algorithm, Error, GameDefinition, GameVariant};

#[derive(Parser)]
#[command(name = "coevomog", version, about = "Co-evolutionary solvers for two-player multi-objective games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study; flags override values from the config file.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "variant")]
        variants: Vec<GameVariant>,
        #[arg(long = "algorithm")]
        algorithms: Vec<Algorithm>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the names accepted by --variant.
    ListVariants,
    /// Dump the reference Pareto layer of a game as CSV.
    Reference {
        #[arg(long)]
        variant: GameVariant,
        #[arg(long, default_value_t = 100)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(command: Command) -> coevo_mog::Result<()> {
    match command {
        Command::Run {
            config,
            variants,
            algorithms,
            runs,
            seed,
            out,
            workers,
        } => {
            let mut cfg = match config {
                Some(path) => harness::load_config(path)?,
                None => ExperimentConfig::default(),
            };
            if !variants.is_empty() {
                cfg.variants = variants;
            }
            if !algorithms.is_empty() {
                cfg.algorithms = algorithms;
            }
            cfg.runs = runs.unwrap_or(cfg.runs);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.out_dir = out.unwrap_or(cfg.out_dir);
            cfg.workers = workers.unwrap_or(cfg.workers);
            cfg.validate()?;

            let report = harness::run_experiment(&cfg)?;
            for v in &report.variants {
                let means: Vec<String> = v
                    .final_igd
                    .iter()
                    .map(|(a, igd)| format!("{a} {:.5}", igd.iter().sum::<f64>() / igd.len() as f64))
                    .collect();
                let test = match &v.wilcoxon {
                    Some(Ok(r)) => format!(", p = {:.4}", r.p_value),
                    Some(Err(_)) => ", p = n/a".to_string(),
                    None => String::new(),
                };
                println!("{}: final mean IGD {}{test}", v.variant, means.join(", "));
            }
            println!("outputs written to {}", report.out_dir.display());
            Ok(())
        }
        Command::ListVariants => {
            for v in GameVariant::ALL {
                println!("{v}");
            }
            Ok(())
        }
        Command::Reference { variant, resolution, out } => {
            let layer = coevo_mog::games::reference_pareto_layer(&GameDefinition::new(variant), resolution)?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.to_path_buf(),
                    source: e,
                })?;
            }
            harness::write_atomic(&out, harness::reference_csv(&layer).as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
