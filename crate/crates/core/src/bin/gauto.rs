//! Command-line front end. Exit status: 0 on success, 1 on runtime failure,
//! 2 on usage or configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use genetic_automata::automaton::{DEFAULT_ALPHA, DEFAULT_MAX_LEN};
use genetic_automata::cli::{self, AgentSource, EmergeRunConfig, IpdRunConfig};
use genetic_automata::ipd::DEFAULT_ROUNDS;
use genetic_automata::Result;

#[derive(Parser)]
#[command(
    name = "gauto",
    version,
    about = "Weighted automata, genetic evolution and IPD strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one match between two strategies (tft, vindictive, allc, alld, uniform, params:p1,..,p6).
    Play {
        a: String,
        b: String,
        #[arg(long, default_value_t = DEFAULT_ROUNDS)]
        rounds: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write run.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve IPD strategies against a fixed opponent.
    EvolveIpd {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evolve agents under the neighborhood fitness and report aggregations.
    Emerge {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Agent count (clustered initialization only).
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Vector distance and truncated behavior gap between two automata.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
        max_len: usize,
    },
    /// Print the evaluation matrix of an automaton.
    Eval { a: PathBuf },
}

fn config_or_default<T: Default + serde::de::DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    path.map_or_else(|| Ok(T::default()), cli::load_config)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Play {
            a,
            b,
            rounds,
            seed,
            out,
        } => {
            let record = cli::cmd_play(&a, &b, rounds, seed)?;
            print!("{}", record.render());
            if let Some(out) = out {
                cli::write_play(&out, &record)?;
            }
        }
        Command::EvolveIpd {
            config,
            seed,
            pop,
            generations,
            rounds,
            out,
        } => {
            let mut cfg: IpdRunConfig = config_or_default(config.as_deref())?;
            cfg.seed = seed.or(cfg.seed);
            cfg.pop = pop.unwrap_or(cfg.pop);
            cfg.generations = generations.unwrap_or(cfg.generations);
            cfg.rounds = rounds.unwrap_or(cfg.rounds);
            let record = cli::cmd_evolve_ipd(&cfg, Some(&out))?;
            if let Some(last) = record.stats.last() {
                println!(
                    "generation {}: fit_min {} fit_mean {} fit_max {} coop_rate {}",
                    last.generation, last.fit_min, last.fit_mean, last.fit_max, last.coop_rate
                );
            }
            println!("wrote {}", out.display());
        }
        Command::Emerge {
            config,
            seed,
            pop,
            generations,
            alpha,
            epsilon,
            out,
        } => {
            let mut cfg: EmergeRunConfig = config_or_default(config.as_deref())?;
            cfg.seed = seed.or(cfg.seed);
            cfg.generations = generations.unwrap_or(cfg.generations);
            cfg.alpha = alpha.unwrap_or(cfg.alpha);
            cfg.epsilon = epsilon.unwrap_or(cfg.epsilon);
            if let Some(n) = pop {
                match &mut cfg.agents {
                    AgentSource::Clustered { count, .. } => *count = n,
                    AgentSource::Explicit { .. } => {
                        return Err(genetic_automata::Error::Config(
                            "--pop only applies to clustered initialization".into(),
                        ))
                    }
                }
            }
            let record = cli::cmd_emerge(&cfg, Some(&out))?;
            if let Some(last) = record.stats.last() {
                println!(
                    "generation {}: fit_min {} fit_mean {} fit_max {} clusters {}",
                    last.generation, last.fit_min, last.fit_mean, last.fit_max, last.n_clusters
                );
            }
            for c in record.final_clusters.iter().flatten() {
                println!("cluster {c:?}");
            }
            println!("wrote {}", out.display());
        }
        Command::Distance {
            a,
            b,
            alpha,
            max_len,
        } => {
            let report = cli::cmd_distance(&a, &b, alpha, max_len)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Eval { a } => println!("{}", cli::cmd_eval(&a)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gauto: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
