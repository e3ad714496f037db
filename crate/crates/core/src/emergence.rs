//! Behavioral semi-distance between agents and aggregation-seeking evolution.
//!
//! Each agent's behavior automaton is summarized by an evaluation matrix whose
//! `(i, j)` entry is `entry(i) · P(i, j) · final(j)`, where `P(i, j)` sums the
//! weights of all simple paths from state `i` to state `j` in the letter-summed
//! transition graph `W = Σ_a μ(a)`. A path is simple when it visits no state
//! twice (start included), so the only contribution to `P(i, i)` is the empty
//! path, with weight one.
//!
//! Agents are compared with an entrywise Hölder norm of the difference of
//! their evaluation matrices. The neighborhood fitness
//! `f(x) = |V(x)| / Σ_{y ∈ V(x)} d(x, y)²` is infinite when the sum vanishes.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::automaton::{WeightedAutomaton, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::genetics::{
    evolve_generation, streams, substream, GeneticConfig, Population, StreamRng, TupleReport,
};
use crate::ipd::{build_strategy, StrategyParams};
use crate::semiring::{hoelder_norm, Matrix, SemiringKind};

/// Fitness value that may be infinite. Infinity compares above every finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentFitness {
    Finite(f64),
    Infinite,
}

impl AgentFitness {
    pub fn is_infinite(self) -> bool {
        matches!(self, AgentFitness::Infinite)
    }

    /// Maps `Infinite` to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            AgentFitness::Finite(v) => v,
            AgentFitness::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            AgentFitness::Finite(v) => Some(v),
            AgentFitness::Infinite => None,
        }
    }

    /// Arithmetic mean; infinite as soon as one value is.
    pub fn mean(values: &[AgentFitness]) -> AgentFitness {
        let mut sum = 0.0;
        for v in values {
            match v {
                AgentFitness::Infinite => return AgentFitness::Infinite,
                AgentFitness::Finite(x) => sum += x,
            }
        }
        AgentFitness::Finite(sum / values.len() as f64)
    }
}

impl PartialOrd for AgentFitness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (AgentFitness::Infinite, AgentFitness::Infinite) => Some(Ordering::Equal),
            (AgentFitness::Infinite, _) => Some(Ordering::Greater),
            (_, AgentFitness::Infinite) => Some(Ordering::Less),
            (AgentFitness::Finite(a), AgentFitness::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for AgentFitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentFitness::Finite(v) => write!(f, "{v}"),
            AgentFitness::Infinite => f.write_str("inf"),
        }
    }
}

/// Finite values serialize as numbers, infinity as the string `"inf"`.
impl Serialize for AgentFitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AgentFitness::Finite(v) => s.serialize_f64(*v),
            AgentFitness::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for AgentFitness {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(AgentFitness::Finite(v)),
            Raw::Text(t) if t == "inf" => Ok(AgentFitness::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid fitness {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Agent {
    pub id: u64,
    pub behavior: WeightedAutomaton,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
}

impl Agent {
    pub fn new(id: u64, behavior: WeightedAutomaton) -> Self {
        Agent {
            id,
            behavior,
            position: None,
        }
    }

    pub fn at(mut self, position: Vec<f64>) -> Self {
        self.position = Some(position);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationMatrix(Matrix);

impl EvaluationMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }
}

impl fmt::Display for EvaluationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Letter-summed one-step weights `W = Σ_a μ(a)`, row-major, as reals.
fn letter_sum(a: &WeightedAutomaton) -> Vec<f64> {
    let n = a.n();
    let mut w = vec![0.0; n * n];
    for m in a.transitions() {
        for (acc, v) in w.iter_mut().zip(m.as_slice()) {
            *acc += v;
        }
    }
    w
}

/// Sums of simple-path weights, `P[i][j]`, by depth-first search from each start.
/// Exponential in `n`.
fn simple_path_sums(w: &[f64], n: usize) -> Vec<f64> {
    fn walk(
        w: &[f64],
        n: usize,
        start: usize,
        at: usize,
        weight: f64,
        visited: &mut [bool],
        out: &mut [f64],
    ) {
        for next in 0..n {
            let step = w[at * n + next];
            if visited[next] || step == 0.0 {
                continue;
            }
            let reached = weight * step;
            out[start * n + next] += reached;
            visited[next] = true;
            walk(w, n, start, next, reached, visited, out);
            visited[next] = false;
        }
    }

    let mut out = vec![0.0; n * n];
    let mut visited = vec![false; n];
    for start in 0..n {
        out[start * n + start] = 1.0;
        visited[start] = true;
        walk(w, n, start, start, 1.0, &mut visited, &mut out);
        visited[start] = false;
    }
    out
}

/// Evaluation matrix `m[i][j] = entry(i) · P(i, j) · final(j)`, computed with
/// real arithmetic.
pub fn evaluate(a: &WeightedAutomaton) -> EvaluationMatrix {
    let n = a.n();
    let paths = simple_path_sums(&letter_sum(a), n);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = a.entry()[i] * paths[i * n + j] * a.final_costs()[j];
        }
    }
    EvaluationMatrix(Matrix::new(SemiringKind::Real, n, n, data).expect("n x n evaluation"))
}

/// Entrywise Hölder-`alpha` norm of the difference of two evaluation matrices.
pub fn evaluation_distance(x: &EvaluationMatrix, y: &EvaluationMatrix, alpha: f64) -> Result<f64> {
    if x.n() != y.n() {
        return Err(Error::Incomparable(format!(
            "evaluation matrices are {0}x{0} and {1}x{1}",
            x.n(),
            y.n()
        )));
    }
    let diff: Vec<f64> =
        x.0.as_slice()
            .iter()
            .zip(y.0.as_slice())
            .map(|(a, b)| a - b)
            .collect();
    hoelder_norm(&diff, alpha)
}

pub fn semi_distance(x: &Agent, y: &Agent, alpha: f64) -> Result<f64> {
    evaluation_distance(&evaluate(&x.behavior), &evaluate(&y.behavior), alpha)
}

/// `card / Σ d²`, or infinite when the sum is zero.
pub fn fitness_from_distances(distances: impl IntoIterator<Item = f64>) -> AgentFitness {
    let (mut count, mut sum) = (0usize, 0.0);
    for d in distances {
        count += 1;
        sum += d * d;
    }
    if sum == 0.0 {
        AgentFitness::Infinite
    } else {
        AgentFitness::Finite(count as f64 / sum)
    }
}

/// Neighborhood fitness of `x` against the given members (`x` itself excluded).
pub fn agent_fitness<'a>(
    x: &Agent,
    members: impl IntoIterator<Item = &'a Agent>,
    alpha: f64,
) -> Result<AgentFitness> {
    let ex = evaluate(&x.behavior);
    let distances = members
        .into_iter()
        .map(|y| evaluation_distance(&ex, &evaluate(&y.behavior), alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(fitness_from_distances(distances))
}

/// How a neighborhood is selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Criterion {
    /// Every other agent.
    #[default]
    All,
    /// Agents whose position lies within Euclidean distance `radius`.
    Spatial { radius: f64 },
    /// Explicit adjacency lists, indexed by agent position in the population.
    Graph { adjacency: Vec<Vec<usize>> },
}

/// Neighborhood of the agent at index `center`, as indices into the population.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub center: usize,
    pub members: Vec<usize>,
}

impl Criterion {
    pub fn validate(&self, agents: &[Agent]) -> Result<()> {
        match self {
            Criterion::All => Ok(()),
            Criterion::Spatial { radius } if radius.is_nan() || *radius < 0.0 => Err(
                Error::Config(format!("neighborhood radius must be >= 0, got {radius}")),
            ),
            Criterion::Spatial { .. } => Ok(()),
            Criterion::Graph { adjacency } => {
                if adjacency.len() != agents.len() {
                    return Err(Error::Config(format!(
                        "adjacency has {} lists for {} agents",
                        adjacency.len(),
                        agents.len()
                    )));
                }
                if adjacency.iter().flatten().any(|&j| j >= agents.len()) {
                    return Err(Error::Config("adjacency refers to a missing agent".into()));
                }
                Ok(())
            }
        }
    }

    pub fn neighborhood(&self, agents: &[Agent], center: usize) -> Neighborhood {
        let members = match self {
            Criterion::All => (0..agents.len()).filter(|&j| j != center).collect(),
            Criterion::Spatial { radius } => match &agents[center].position {
                None => Vec::new(),
                Some(here) => (0..agents.len())
                    .filter(|&j| j != center)
                    .filter(|&j| {
                        agents[j].position.as_ref().is_some_and(|there| {
                            let d2: f64 =
                                here.iter().zip(there).map(|(a, b)| (a - b) * (a - b)).sum();
                            here.len() == there.len() && d2.sqrt() <= *radius
                        })
                    })
                    .collect(),
            },
            Criterion::Graph { adjacency } => {
                let mut m: Vec<usize> = adjacency[center]
                    .iter()
                    .copied()
                    .filter(|&j| j != center)
                    .collect();
                m.sort_unstable();
                m.dedup();
                m
            }
        };
        Neighborhood { center, members }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Composition {
    #[default]
    Product,
    /// `w · f/(1+f) + (1-w) · f_problem`, with infinity normalized to 1.
    WeightedSum { w: f64 },
}

/// Combines the emergence fitness with a problem-specific score `f_problem >= 0`.
pub fn compose_fitness(
    f_emergent: AgentFitness,
    f_problem: f64,
    mode: Composition,
) -> Result<AgentFitness> {
    if !f_problem.is_finite() || f_problem < 0.0 {
        return Err(Error::Parameter(format!(
            "problem fitness must be finite and >= 0, got {f_problem}"
        )));
    }
    Ok(match mode {
        Composition::Product => match f_emergent {
            AgentFitness::Infinite if f_problem == 0.0 => AgentFitness::Finite(0.0),
            AgentFitness::Infinite => AgentFitness::Infinite,
            AgentFitness::Finite(f) => AgentFitness::Finite(f * f_problem),
        },
        Composition::WeightedSum { w } => {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::Parameter(format!(
                    "weight must lie in [0, 1], got {w}"
                )));
            }
            let normalized = match f_emergent {
                AgentFitness::Infinite => 1.0,
                AgentFitness::Finite(f) => f / (1.0 + f),
            };
            AgentFitness::Finite(w * normalized + (1.0 - w) * f_problem)
        }
    })
}

fn components(count: usize, mut linked: impl FnMut(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..count {
        for j in i + 1..count {
            if linked(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; count];
    for i in 0..count {
        let root = find(&mut parent, i);
        if group_of[root] == usize::MAX {
            group_of[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[root]].push(i);
    }
    groups
}

fn clusters_of(
    agents: &[Agent],
    evals: &[EvaluationMatrix],
    epsilon: f64,
    alpha: f64,
) -> Result<Vec<Vec<u64>>> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::Parameter(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    let mut err = None;
    let groups = components(agents.len(), |i, j| {
        match evaluation_distance(&evals[i], &evals[j], alpha) {
            Ok(d) => d <= epsilon,
            Err(e) => {
                err.get_or_insert(e);
                false
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut clusters: Vec<Vec<u64>> = groups
        .into_iter()
        .map(|g| {
            let mut ids: Vec<u64> = g.into_iter().map(|i| agents[i].id).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    clusters.sort_by_key(|c| c[0]);
    Ok(clusters)
}

/// Connected components of the "semi-distance ≤ epsilon" graph, as sorted id
/// lists ordered by smallest id.
pub fn detect_aggregations(agents: &[Agent], epsilon: f64, alpha: f64) -> Result<Vec<Vec<u64>>> {
    let evals: Vec<EvaluationMatrix> = agents.iter().map(|a| evaluate(&a.behavior)).collect();
    clusters_of(agents, &evals, epsilon, alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmergenceConfig {
    pub generations: usize,
    pub criterion: Criterion,
    /// Threshold used for per-generation cluster counts.
    pub epsilon: f64,
    pub alpha: f64,
    pub composition: Composition,
    pub genetic: GeneticConfig,
}

impl Default for EmergenceConfig {
    fn default() -> Self {
        EmergenceConfig {
            generations: 40,
            criterion: Criterion::All,
            epsilon: 0.1,
            alpha: DEFAULT_ALPHA,
            composition: Composition::Product,
            genetic: GeneticConfig::stochastic(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmergenceGenerationStats {
    pub generation: u64,
    pub fit_min: AgentFitness,
    pub fit_mean: AgentFitness,
    pub fit_max: AgentFitness,
    /// Mean over agents with a nonempty neighborhood of their mean semi-distance to it.
    pub mean_within_nbhd_dist: f64,
    pub n_clusters: usize,
}

#[derive(Debug, Clone)]
pub struct EmergenceRun {
    pub config: EmergenceConfig,
    pub stats: Vec<EmergenceGenerationStats>,
    pub initial_agents: Vec<Agent>,
    pub final_agents: Vec<Agent>,
    pub final_clusters: Vec<Vec<u64>>,
    pub selections: Vec<Vec<TupleReport>>,
}

/// Optional problem-specific score, composed with the emergence fitness.
pub type ProblemFitness<'a> = &'a (dyn Fn(&WeightedAutomaton) -> f64 + Sync);

struct Snapshot {
    evals: Vec<EvaluationMatrix>,
    neighborhoods: Vec<Neighborhood>,
}

impl Snapshot {
    fn of(agents: &[Agent], criterion: &Criterion) -> Snapshot {
        Snapshot {
            evals: agents.par_iter().map(|a| evaluate(&a.behavior)).collect(),
            neighborhoods: (0..agents.len())
                .map(|i| criterion.neighborhood(agents, i))
                .collect(),
        }
    }

    fn distances(&self, slot: usize, candidate: &EvaluationMatrix, alpha: f64) -> Result<Vec<f64>> {
        self.neighborhoods[slot]
            .members
            .iter()
            .map(|&j| evaluation_distance(candidate, &self.evals[j], alpha))
            .collect()
    }

    fn fitness(
        &self,
        slot: usize,
        candidate: &WeightedAutomaton,
        alpha: f64,
        composition: Composition,
        problem: Option<ProblemFitness<'_>>,
    ) -> Result<AgentFitness> {
        let base = fitness_from_distances(self.distances(slot, &evaluate(candidate), alpha)?);
        match problem {
            None => Ok(base),
            Some(p) => compose_fitness(base, p(candidate), composition),
        }
    }
}

fn check_agents(agents: &[Agent]) -> Result<()> {
    let mut ids = HashSet::new();
    for a in agents {
        if !ids.insert(a.id) {
            return Err(Error::Config(format!("duplicate agent id {}", a.id)));
        }
    }
    Ok(())
}

fn generation_stats(
    agents: &[Agent],
    snap: &Snapshot,
    config: &EmergenceConfig,
    problem: Option<ProblemFitness<'_>>,
    generation: u64,
) -> Result<EmergenceGenerationStats> {
    let fits = (0..agents.len())
        .map(|i| {
            snap.fitness(
                i,
                &agents[i].behavior,
                config.alpha,
                config.composition,
                problem,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut within = Vec::new();
    for i in 0..agents.len() {
        let d = snap.distances(i, &snap.evals[i], config.alpha)?;
        if !d.is_empty() {
            within.push(d.iter().sum::<f64>() / d.len() as f64);
        }
    }
    let pick = |ord: Ordering| {
        fits.iter()
            .copied()
            .reduce(|a, b| if b.partial_cmp(&a) == Some(ord) { b } else { a })
            .expect("nonempty population")
    };
    Ok(EmergenceGenerationStats {
        generation,
        fit_min: pick(Ordering::Less),
        fit_mean: AgentFitness::mean(&fits),
        fit_max: pick(Ordering::Greater),
        mean_within_nbhd_dist: if within.is_empty() {
            0.0
        } else {
            within.iter().sum::<f64>() / within.len() as f64
        },
        n_clusters: clusters_of(agents, &snap.evals, config.epsilon, config.alpha)?.len(),
    })
}

/// Evolves agent behaviors with the neighborhood fitness (optionally composed
/// with `problem`). Agents keep their slot, id and position; only behaviors
/// evolve. Neighborhoods and the reference evaluations are recomputed at the
/// start of every generation.
pub fn evolve_emergent(
    agents: Vec<Agent>,
    config: &EmergenceConfig,
    problem: Option<ProblemFitness<'_>>,
) -> Result<EmergenceRun> {
    check_agents(&agents)?;
    config.criterion.validate(&agents)?;
    crate::semiring::check_exponent(config.alpha)?;
    let mut pop = Population::new(agents.iter().map(|a| a.behavior.clone()).collect())?;

    let mut current = agents.clone();
    let mut snap = Snapshot::of(&current, &config.criterion);
    let mut stats = vec![generation_stats(&current, &snap, config, problem, 0)?];
    let mut selections = Vec::with_capacity(config.generations);

    for _ in 0..config.generations {
        let fitness = |slot: usize, cand: &WeightedAutomaton, _: &mut StreamRng| {
            snap.fitness(slot, cand, config.alpha, config.composition, problem)
                .map(AgentFitness::to_f64)
                .unwrap_or(f64::NEG_INFINITY)
        };
        let out = evolve_generation(&pop, &fitness, &config.genetic)?;
        pop = out.population;
        for (agent, behavior) in current.iter_mut().zip(pop.members()) {
            agent.behavior = behavior.clone();
        }
        snap = Snapshot::of(&current, &config.criterion);
        stats.push(generation_stats(
            &current,
            &snap,
            config,
            problem,
            pop.generation(),
        )?);
        selections.push(out.tuples);
    }
    let final_clusters = clusters_of(&current, &snap.evals, config.epsilon, config.alpha)?;
    Ok(EmergenceRun {
        config: config.clone(),
        stats,
        initial_agents: agents,
        final_agents: current,
        final_clusters,
        selections,
    })
}

/// Strategy-automaton agents whose parameters scatter around a few random centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteredInit {
    pub count: usize,
    pub centers: usize,
    /// Half-width of the uniform jitter applied to each parameter.
    pub spread: f64,
}

impl ClusteredInit {
    /// Agent `i` belongs to center `i % centers` and has id `i`. Draws come
    /// from the initialization stream of `seed`.
    pub fn generate(&self, seed: u64) -> Result<(Vec<Agent>, Vec<StrategyParams>)> {
        if self.centers == 0 || self.count == 0 {
            return Err(Error::Config(
                "clustered init needs agents and centers".into(),
            ));
        }
        let mut rng = substream(seed, streams::INIT_GENERATION, 1);
        let centers: Vec<StrategyParams> = (0..self.centers)
            .map(|_| StrategyParams::random(&mut rng))
            .collect();
        let agents = (0..self.count)
            .map(|i| {
                let c = centers[i % self.centers].0;
                let p = std::array::from_fn(|k| {
                    (c[k] + rng.random_range(-self.spread..=self.spread)).clamp(0.0, 1.0)
                });
                Ok(Agent::new(
                    i as u64,
                    build_strategy(StrategyParams(p))?.into_core(),
                ))
            })
            .collect::<Result<_>>()?;
        Ok((agents, centers))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipd::{make_tit_for_tat, make_uniform};

    fn strategy_agent(id: u64, p: [f64; 6]) -> Agent {
        Agent::new(id, build_strategy(StrategyParams(p)).unwrap().into_core())
    }

    #[test]
    fn unreachable_entries_vanish() {
        let a = WeightedAutomaton::from_rows(
            SemiringKind::Real,
            ["a"],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            &[vec![vec![0.3, 0.7], vec![0.4, 0.6]]],
        )
        .unwrap();
        let m = evaluate(&a);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert!((m.get(0, 1) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn uniform_strategy_evaluation() {
        let m = evaluate(make_uniform().core());
        assert_eq!(m.get(0, 1), 0.25);
        assert_eq!(m.get(0, 0), 0.25);
        assert_eq!(m.get(1, 0), 0.25);
        assert_eq!(m.get(1, 1), 0.25);
    }

    #[test]
    fn zero_entry_gives_zero_matrix() {
        let a = WeightedAutomaton::from_rows(
            SemiringKind::Real,
            ["a"],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            &[vec![vec![0.3, 0.7], vec![0.4, 0.6]]],
        )
        .unwrap();
        assert!(evaluate(&a).matrix().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn three_state_paths_by_hand() {
        // W = [[0,1,2],[0,0,3],[5,0,0]]: paths 0→1 (1), 0→2 (2), 0→1→2 (1·3).
        let a = WeightedAutomaton::from_rows(
            SemiringKind::Real,
            ["x"],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
            &[vec![
                vec![0.0, 1.0, 2.0],
                vec![0.0, 0.0, 3.0],
                vec![5.0, 0.0, 0.0],
            ]],
        )
        .unwrap();
        let m = evaluate(&a);
        assert_eq!(m.get(0, 2), 2.0 + 3.0);
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(2, 1), 5.0);
        assert_eq!(m.get(1, 0), 15.0);
        assert_eq!(m.get(1, 1), 1.0);
    }

    #[test]
    fn semi_distance_examples() {
        let x = strategy_agent(0, [0.2, 0.3, 0.4, 0.5, 0.6, 0.7]);
        assert_eq!(semi_distance(&x, &x, 2.0).unwrap(), 0.0);

        // Exchanging the two letter matrices keeps W, entry and final.
        let swapped = WeightedAutomaton::new(
            SemiringKind::Real,
            vec!["C".into(), "D".into()],
            x.behavior.entry().to_vec(),
            x.behavior.final_costs().to_vec(),
            vec![
                x.behavior.transitions()[1].clone(),
                x.behavior.transitions()[0].clone(),
            ],
        )
        .unwrap();
        assert_ne!(swapped, x.behavior);
        assert_eq!(
            semi_distance(&x, &Agent::new(1, swapped), 2.0).unwrap(),
            0.0
        );

        let y = strategy_agent(2, [0.9, 0.1, 0.4, 0.5, 0.6, 0.1]);
        assert_eq!(
            semi_distance(&x, &y, 2.0).unwrap(),
            semi_distance(&y, &x, 2.0).unwrap()
        );

        let three = Agent::new(
            3,
            WeightedAutomaton::from_rows(
                SemiringKind::Real,
                ["C"],
                vec![1.0; 3],
                vec![1.0; 3],
                &[vec![vec![0.0; 3]; 3]],
            )
            .unwrap(),
        );
        assert!(matches!(
            semi_distance(&x, &three, 2.0),
            Err(Error::Incomparable(_))
        ));
    }

    #[test]
    fn fitness_examples() {
        assert_eq!(
            fitness_from_distances([1.0, 1.0]),
            AgentFitness::Finite(1.0)
        );
        assert_eq!(fitness_from_distances([0.0, 0.0]), AgentFitness::Infinite);
        assert_eq!(fitness_from_distances([]), AgentFitness::Infinite);
        let base = fitness_from_distances([0.3, 0.7, 1.1]).finite().unwrap();
        let doubled = fitness_from_distances([0.6, 1.4, 2.2]).finite().unwrap();
        assert!((base / doubled - 4.0).abs() < 1e-12);

        let x = strategy_agent(0, [0.5; 6]);
        let twins = [strategy_agent(1, [0.5; 6]), strategy_agent(2, [0.5; 6])];
        assert_eq!(
            agent_fitness(&x, &twins, 2.0).unwrap(),
            AgentFitness::Infinite
        );
    }

    #[test]
    fn fitness_ignores_member_order() {
        let x = strategy_agent(0, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let ys: Vec<Agent> = (1..6)
            .map(|i| strategy_agent(i, [0.1 * i as f64, 0.5, 0.2, 0.9, 0.3, 0.05 * i as f64]))
            .collect();
        let forward = agent_fitness(&x, &ys, 2.0).unwrap();
        let backward = agent_fitness(&x, ys.iter().rev(), 2.0).unwrap();
        let f = forward.finite().unwrap();
        assert!((f - backward.finite().unwrap()).abs() <= 1e-12 * f);
    }

    #[test]
    fn infinity_orders_above_everything() {
        assert!(AgentFitness::Infinite > AgentFitness::Finite(f64::MAX));
        assert!(AgentFitness::Finite(1.0) < AgentFitness::Finite(2.0));
        assert_eq!(
            serde_json::to_string(&AgentFitness::Infinite).unwrap(),
            "\"inf\""
        );
        assert_eq!(
            serde_json::from_str::<AgentFitness>("\"inf\"").unwrap(),
            AgentFitness::Infinite
        );
        assert_eq!(
            serde_json::from_str::<AgentFitness>("2.5").unwrap(),
            AgentFitness::Finite(2.5)
        );
    }

    #[test]
    fn composition_examples() {
        assert_eq!(
            compose_fitness(AgentFitness::Infinite, 0.0, Composition::Product).unwrap(),
            AgentFitness::Finite(0.0)
        );
        assert_eq!(
            compose_fitness(AgentFitness::Infinite, 2.0, Composition::Product).unwrap(),
            AgentFitness::Infinite
        );
        assert_eq!(
            compose_fitness(AgentFitness::Finite(1.0), 5.0, Composition::Product).unwrap(),
            AgentFitness::Finite(5.0)
        );
        assert_eq!(
            compose_fitness(
                AgentFitness::Finite(1.0),
                1.0,
                Composition::WeightedSum { w: 0.5 }
            )
            .unwrap(),
            AgentFitness::Finite(0.75)
        );
        assert_eq!(
            compose_fitness(
                AgentFitness::Infinite,
                0.0,
                Composition::WeightedSum { w: 1.0 }
            )
            .unwrap(),
            AgentFitness::Finite(1.0)
        );
        assert!(compose_fitness(AgentFitness::Finite(1.0), -1.0, Composition::Product).is_err());
        assert!(compose_fitness(
            AgentFitness::Finite(1.0),
            1.0,
            Composition::WeightedSum { w: 1.5 }
        )
        .is_err());
    }

    #[test]
    fn clusters_use_transitive_closure() {
        // Distances along a line: only the diagonal evaluation entry differs.
        let line = |id: u64, e: f64| {
            Agent::new(
                id,
                WeightedAutomaton::from_rows(
                    SemiringKind::Real,
                    ["a"],
                    vec![e],
                    vec![1.0],
                    &[vec![vec![0.5]]],
                )
                .unwrap(),
            )
        };
        let agents = [line(1, 0.0), line(2, 0.1), line(3, 0.2)];
        assert_eq!(
            detect_aggregations(&agents, 0.15, 2.0).unwrap(),
            vec![vec![1, 2, 3]]
        );
        assert_eq!(
            detect_aggregations(&agents, 0.0, 2.0).unwrap(),
            vec![vec![1], vec![2], vec![3]]
        );
        assert_eq!(
            detect_aggregations(&agents, 10.0, 2.0).unwrap(),
            vec![vec![1, 2, 3]]
        );
        assert!(detect_aggregations(&agents, -1.0, 2.0).is_err());
    }

    #[test]
    fn clusters_are_ordered_by_smallest_id() {
        let line = |id: u64, e: f64| {
            Agent::new(
                id,
                WeightedAutomaton::from_rows(
                    SemiringKind::Real,
                    ["a"],
                    vec![e],
                    vec![1.0],
                    &[vec![vec![0.5]]],
                )
                .unwrap(),
            )
        };
        let agents = [line(9, 0.0), line(4, 5.0), line(2, 0.05), line(7, 5.01)];
        assert_eq!(
            detect_aggregations(&agents, 0.1, 2.0).unwrap(),
            vec![vec![2, 9], vec![4, 7]]
        );
    }

    #[test]
    fn neighborhoods_follow_their_criterion() {
        let agents: Vec<Agent> = (0..4)
            .map(|i| Agent::new(i, make_tit_for_tat().into_core()).at(vec![i as f64, 0.0]))
            .collect();
        assert_eq!(
            Criterion::All.neighborhood(&agents, 1).members,
            vec![0, 2, 3]
        );
        assert_eq!(
            Criterion::Spatial { radius: 1.0 }
                .neighborhood(&agents, 1)
                .members,
            vec![0, 2]
        );
        let graph = Criterion::Graph {
            adjacency: vec![vec![1], vec![0, 1, 3, 3], vec![], vec![1]],
        };
        graph.validate(&agents).unwrap();
        assert_eq!(graph.neighborhood(&agents, 1).members, vec![0, 3]);
        assert!(Criterion::Graph {
            adjacency: vec![vec![9]; 4]
        }
        .validate(&agents)
        .is_err());
    }

    #[test]
    fn zero_generations_echo_input() {
        let (agents, _) = ClusteredInit {
            count: 6,
            centers: 2,
            spread: 0.05,
        }
        .generate(3)
        .unwrap();
        let run = evolve_emergent(
            agents.clone(),
            &EmergenceConfig {
                generations: 0,
                ..EmergenceConfig::default()
            },
            None,
        )
        .unwrap();
        assert_eq!(run.final_agents, agents);
        assert_eq!(run.stats.len(), 1);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let a = strategy_agent(1, [0.5; 6]);
        assert!(matches!(
            evolve_emergent(vec![a.clone(), a], &EmergenceConfig::default(), None),
            Err(Error::Config(_))
        ));
    }
}
