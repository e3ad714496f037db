//! Batch runs behind the `gauto` binary: configuration, orchestration and
//! persistence of run records.
//!
//! Evolution commands write three artifacts into their output directory:
//!
//! * `run.json`: the [`RunRecord`] (configuration echo, per-generation
//!   statistics, final population).
//! * `stats.csv`: one row per generation including generation 0. Columns are
//!   `generation,fit_min,fit_mean,fit_max,coop_rate` for `evolve-ipd` and
//!   `generation,fit_min,fit_mean,fit_max,mean_within_nbhd_dist,n_clusters`
//!   for `emerge`.
//! * `population/NNN.json`: each final automaton in the automaton format.
//!
//! Wall-clock data goes to a separate `timing.json` so that the three files
//! above are byte-identical across runs with the same flags and seed. Every
//! file is written to a temporary sibling and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::automaton::{automaton_distance, behavior_gap, WeightedAutomaton};
use crate::emergence::{
    evaluate, evolve_emergent, Agent, AgentFitness, ClusteredInit, Composition, Criterion,
    EmergenceConfig, EmergenceGenerationStats, EvaluationMatrix,
};
use crate::error::{Error, Result};
use crate::genetics::{substream, GeneticConfig};
use crate::ipd::{
    evolve_ipd, expected_payoff, play_match, FitnessMode, IpdConfig, IpdGenerationStats,
    MatchResult, StrategyAutomaton, StrategySpec, DEFAULT_REPEATS, DEFAULT_ROUNDS,
};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reads a JSON configuration file.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| {
        Error::Config("a seed is required (--seed or \"seed\" in the config)".into())
    })
}

/// Configuration of `evolve-ipd`. The top-level seed replaces
/// `genetic.rng_seed`; mutation always runs in stochastic mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IpdRunConfig {
    pub seed: Option<u64>,
    pub pop: usize,
    pub generations: usize,
    pub rounds: usize,
    pub repeats: usize,
    pub s0: StrategySpec,
    pub fitness_mode: FitnessMode,
    pub genetic: GeneticConfig,
}

impl Default for IpdRunConfig {
    fn default() -> Self {
        IpdRunConfig {
            seed: None,
            pop: 32,
            generations: 60,
            rounds: DEFAULT_ROUNDS,
            repeats: DEFAULT_REPEATS,
            s0: StrategySpec::TitForTat,
            fitness_mode: FitnessMode::Sampled,
            genetic: GeneticConfig::stochastic(0),
        }
    }
}

impl IpdRunConfig {
    pub fn resolve(&self) -> Result<IpdConfig> {
        let seed = require_seed(self.seed)?;
        Ok(IpdConfig {
            pop_size: self.pop,
            generations: self.generations,
            s0: self.s0,
            rounds: self.rounds,
            repeats: self.repeats,
            fitness_mode: self.fitness_mode,
            genetic: GeneticConfig {
                rng_seed: seed,
                stochastic_mode: true,
                ..self.genetic.clone()
            },
        })
    }
}

/// Source of the initial agents of `emerge`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AgentSource {
    Clustered {
        count: usize,
        centers: usize,
        spread: f64,
    },
    Explicit {
        agents: Vec<Agent>,
    },
}

/// Problem-specific fitness: expected payoff against a fixed strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub s0: StrategySpec,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmergeRunConfig {
    pub seed: Option<u64>,
    pub generations: usize,
    pub agents: AgentSource,
    pub neighborhood: Criterion,
    pub epsilon: f64,
    pub alpha: f64,
    pub composition: Composition,
    pub problem: Option<ProblemSpec>,
    pub genetic: GeneticConfig,
}

impl Default for EmergeRunConfig {
    fn default() -> Self {
        let base = EmergenceConfig::default();
        EmergeRunConfig {
            seed: None,
            generations: base.generations,
            agents: AgentSource::Clustered {
                count: 32,
                centers: 2,
                spread: 0.05,
            },
            neighborhood: base.criterion,
            epsilon: base.epsilon,
            alpha: base.alpha,
            composition: base.composition,
            problem: None,
            genetic: base.genetic,
        }
    }
}

impl EmergeRunConfig {
    pub fn resolve(&self) -> Result<(Vec<Agent>, EmergenceConfig)> {
        let seed = require_seed(self.seed)?;
        let agents = match &self.agents {
            AgentSource::Clustered {
                count,
                centers,
                spread,
            } => {
                ClusteredInit {
                    count: *count,
                    centers: *centers,
                    spread: *spread,
                }
                .generate(seed)?
                .0
            }
            AgentSource::Explicit { agents } => agents.clone(),
        };
        let config = EmergenceConfig {
            generations: self.generations,
            criterion: self.neighborhood.clone(),
            epsilon: self.epsilon,
            alpha: self.alpha,
            composition: self.composition,
            genetic: GeneticConfig {
                rng_seed: seed,
                ..self.genetic.clone()
            },
        };
        Ok((agents, config))
    }
}

/// Everything persisted in `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord<C, S, P> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: C,
    pub stats: Vec<S>,
    pub final_population: Vec<P>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_clusters: Option<Vec<Vec<u64>>>,
}

pub type IpdRecord = RunRecord<IpdRunConfig, IpdGenerationStats, WeightedAutomaton>;
pub type EmergeRecord = RunRecord<EmergeRunConfig, EmergenceGenerationStats, Agent>;

impl<C, S, P> RunRecord<C, S, P> {
    fn new(command: &str, config: C, stats: Vec<S>, final_population: Vec<P>) -> Self {
        RunRecord {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config,
            stats,
            final_population,
            final_clusters: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct IpdCsvRow {
    generation: u64,
    fit_min: f64,
    fit_mean: f64,
    fit_max: f64,
    coop_rate: f64,
}

#[derive(Debug, Serialize)]
struct EmergeCsvRow {
    generation: u64,
    fit_min: AgentFitness,
    fit_mean: AgentFitness,
    fit_max: AgentFitness,
    mean_within_nbhd_dist: f64,
    n_clusters: usize,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn csv_bytes<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

#[derive(Debug, Serialize)]
struct Timing {
    started_unix_secs: u64,
    elapsed_secs: f64,
}

fn write_run<C: Serialize, S: Serialize, P: Serialize>(
    out: &Path,
    record: &RunRecord<C, S, P>,
    csv: Vec<u8>,
    population: &[&WeightedAutomaton],
    started: (SystemTime, Instant),
) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut json = serde_json::to_vec_pretty(record)?;
    json.push(b'\n');
    write_atomic(&out.join("run.json"), &json)?;
    write_atomic(&out.join("stats.csv"), &csv)?;
    let pop_dir = out.join("population");
    fs::create_dir_all(&pop_dir)?;
    for (i, a) in population.iter().enumerate() {
        let mut text = a.to_json()?.into_bytes();
        text.push(b'\n');
        write_atomic(&pop_dir.join(format!("{i:03}.json")), &text)?;
    }
    let timing = Timing {
        started_unix_secs: started
            .0
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        elapsed_secs: started.1.elapsed().as_secs_f64(),
    };
    write_atomic(
        &out.join("timing.json"),
        &serde_json::to_vec_pretty(&timing)?,
    )?;
    Ok(())
}

/// Record of a single `play` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayRecord {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub strategy_a: StrategySpec,
    pub strategy_b: StrategySpec,
    pub rounds: usize,
    pub seed: Option<u64>,
    pub result: MatchResult,
}

impl PlayRecord {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (t, (a, b)) in self.result.history.iter().enumerate() {
            s.push_str(&format!("{:>4}  {a} {b}\n", t + 1));
        }
        s.push_str(&format!(
            "total {} {}: {} / {}\n",
            self.strategy_a, self.strategy_b, self.result.payoff_a, self.result.payoff_b
        ));
        s
    }
}

/// Plays one match. Deterministic strategy pairs need no seed; any stochastic
/// strategy requires one.
pub fn cmd_play(a: &str, b: &str, rounds: usize, seed: Option<u64>) -> Result<PlayRecord> {
    let (spec_a, spec_b): (StrategySpec, StrategySpec) = (a.parse()?, b.parse()?);
    let (sa, sb) = (spec_a.build(), spec_b.build());
    if rounds == 0 {
        return Err(Error::Config("--rounds must be positive".into()));
    }
    if seed.is_none() && !(sa.is_deterministic() && sb.is_deterministic()) {
        return Err(Error::Config("stochastic strategies need --seed".into()));
    }
    let result = play_match(&sa, &sb, rounds, &mut substream(seed.unwrap_or(0), 0, 0))?;
    Ok(PlayRecord {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: "play".into(),
        strategy_a: spec_a,
        strategy_b: spec_b,
        rounds,
        seed,
        result,
    })
}

pub fn write_play(out: &Path, record: &PlayRecord) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut json = serde_json::to_vec_pretty(record)?;
    json.push(b'\n');
    write_atomic(&out.join("run.json"), &json)
}

pub fn cmd_evolve_ipd(config: &IpdRunConfig, out: Option<&Path>) -> Result<IpdRecord> {
    let started = (SystemTime::now(), Instant::now());
    let resolved = config.resolve()?;
    let run = evolve_ipd(&resolved)?;
    let echo = IpdRunConfig {
        genetic: resolved.genetic,
        ..config.clone()
    };
    let record = RunRecord::new("evolve-ipd", echo, run.stats, run.final_population);
    if let Some(out) = out {
        let csv = csv_bytes(record.stats.iter().map(|s| IpdCsvRow {
            generation: s.generation,
            fit_min: s.fit_min,
            fit_mean: s.fit_mean,
            fit_max: s.fit_max,
            coop_rate: s.coop_rate,
        }))?;
        let pop: Vec<&WeightedAutomaton> = record.final_population.iter().collect();
        write_run(out, &record, csv, &pop, started)?;
    }
    Ok(record)
}

pub fn cmd_emerge(config: &EmergeRunConfig, out: Option<&Path>) -> Result<EmergeRecord> {
    let started = (SystemTime::now(), Instant::now());
    let (agents, emergence) = config.resolve()?;
    let problem = config.problem.as_ref().map(|p| {
        let s0 = p.s0.build();
        let rounds = p.rounds.max(1);
        move |cand: &WeightedAutomaton| -> f64 {
            StrategyAutomaton::try_from(cand.clone())
                .and_then(|s| expected_payoff(&s, &s0, rounds))
                .map_or(0.0, |(own, _)| own)
        }
    });
    let run = evolve_emergent(
        agents,
        &emergence,
        problem
            .as_ref()
            .map(|f| f as &(dyn Fn(&WeightedAutomaton) -> f64 + Sync)),
    )?;
    let echo = EmergeRunConfig {
        genetic: emergence.genetic.clone(),
        ..config.clone()
    };
    let mut record = RunRecord::new("emerge", echo, run.stats, run.final_agents);
    record.final_clusters = Some(run.final_clusters);
    if let Some(out) = out {
        let csv = csv_bytes(record.stats.iter().map(|s| EmergeCsvRow {
            generation: s.generation,
            fit_min: s.fit_min,
            fit_mean: s.fit_mean,
            fit_max: s.fit_max,
            mean_within_nbhd_dist: s.mean_within_nbhd_dist,
            n_clusters: s.n_clusters,
        }))?;
        let pop: Vec<&WeightedAutomaton> = record
            .final_population
            .iter()
            .map(|a| &a.behavior)
            .collect();
        write_run(out, &record, csv, &pop, started)?;
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub alpha: f64,
    pub max_len: usize,
    pub automaton_distance: f64,
    pub behavior_gap: f64,
}

pub fn cmd_distance(a: &Path, b: &Path, alpha: f64, max_len: usize) -> Result<DistanceReport> {
    let (x, y) = (load_automaton(a)?, load_automaton(b)?);
    Ok(DistanceReport {
        alpha,
        max_len,
        automaton_distance: automaton_distance(&x, &y, alpha)?,
        behavior_gap: behavior_gap(&x, &y, max_len, alpha)?,
    })
}

pub fn cmd_eval(path: &Path) -> Result<EvaluationMatrix> {
    Ok(evaluate(&load_automaton(path)?))
}

/// Loads an automaton; parse failures are reported as configuration errors.
pub fn load_automaton(path: &Path) -> Result<WeightedAutomaton> {
    let text = fs::read_to_string(path)?;
    WeightedAutomaton::from_json(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
