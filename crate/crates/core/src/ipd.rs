//! Iterated prisoner's dilemma with two-state probabilistic strategy automata.
//!
//! A strategy is an automaton over the alphabet `(C, D)` with two states.
//! State 1 is the state entered by cooperating and state 2 the state entered
//! by betraying, so sampling the next state is the same as choosing the next
//! action. The letter read on each step is the opponent's previous action.
//! With parameters `p1..p6`:
//!
//! ```text
//! entry  = (p1, 1-p1)            final = (p6, 1-p6)ᵀ
//! T(C)   = [[p2, 1-p2],          T(D)  = [[1-p4, p4],
//!           [p3, 1-p3]]                   [1-p5, p5]]
//! ```
//!
//! The opening action is drawn from the entry vector. The final vector does
//! not influence play.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::genetics::{
    evolve_generation, streams, substream, GeneticConfig, Population, StreamRng, TupleReport,
};
use crate::semiring::SemiringKind;

pub const DEFAULT_ROUNDS: usize = 64;
pub const DEFAULT_REPEATS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// Cooperate.
    C,
    /// Betray.
    D,
}

impl Action {
    /// State index entered by playing this action; also the letter index.
    pub fn index(self) -> usize {
        match self {
            Action::C => 0,
            Action::D => 1,
        }
    }

    pub fn from_index(i: usize) -> Action {
        if i == 0 {
            Action::C
        } else {
            Action::D
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::C => "C",
            Action::D => "D",
        })
    }
}

/// Bimatrix of `(own, other)` points indexed by `(own action, other action)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    table: [[(f64, f64); 2]; 2],
}

impl Default for PayoffTable {
    fn default() -> Self {
        PayoffTable {
            table: [[(3.0, 3.0), (0.0, 5.0)], [(5.0, 0.0), (1.0, 1.0)]],
        }
    }
}

impl PayoffTable {
    pub fn new(table: [[(f64, f64); 2]; 2]) -> Self {
        PayoffTable { table }
    }

    pub fn payoff(&self, own: Action, other: Action) -> (f64, f64) {
        self.table[own.index()][other.index()]
    }
}

/// The six probabilities of the two-state strategy automaton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams(pub [f64; 6]);

impl StrategyParams {
    pub fn new(p: [f64; 6]) -> Result<Self> {
        for (i, &v) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Parameter(format!(
                    "p{} = {v} is outside [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(StrategyParams(p))
    }

    /// Each parameter uniform on `[0, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StrategyParams(std::array::from_fn(|_| rng.random::<f64>()))
    }

    /// Reads `p1..p6` back from a strategy-shaped automaton.
    pub fn from_automaton(a: &WeightedAutomaton) -> Self {
        let t = a.transitions();
        StrategyParams([
            a.entry()[0],
            t[0].get(0, 0),
            t[0].get(1, 0),
            t[1].get(0, 1),
            t[1].get(1, 1),
            a.final_costs()[0],
        ])
    }
}

/// A two-state stochastic automaton over `(C, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyAutomaton {
    core: WeightedAutomaton,
}

impl StrategyAutomaton {
    pub fn core(&self) -> &WeightedAutomaton {
        &self.core
    }

    pub fn into_core(self) -> WeightedAutomaton {
        self.core
    }

    pub fn params(&self) -> StrategyParams {
        StrategyParams::from_automaton(&self.core)
    }

    /// True when every transition and the opening are certain.
    pub fn is_deterministic(&self) -> bool {
        let k = Kernel::of(&self.core);
        std::iter::once(k.open_c)
            .chain(k.next_c.iter().flatten().copied())
            .all(|p| p == 0.0 || p == 1.0)
    }
}

impl TryFrom<WeightedAutomaton> for StrategyAutomaton {
    type Error = Error;

    fn try_from(core: WeightedAutomaton) -> Result<Self> {
        check_strategy_shape(&core)?;
        if !core.is_stochastic(crate::automaton::STOCHASTIC_TOLERANCE) {
            return Err(Error::Parameter(
                "strategy automaton must have stochastic entry and transition rows".into(),
            ));
        }
        Ok(StrategyAutomaton { core })
    }
}

fn check_strategy_shape(a: &WeightedAutomaton) -> Result<()> {
    if a.n() != 2 || a.alphabet() != ["C", "D"] || a.semiring() != SemiringKind::Real {
        return Err(Error::Parameter(
            "strategy automaton must be a 2-state real automaton over (C, D)".into(),
        ));
    }
    Ok(())
}

pub fn build_strategy(p: StrategyParams) -> Result<StrategyAutomaton> {
    let [p1, p2, p3, p4, p5, p6] = StrategyParams::new(p.0)?.0;
    let core = WeightedAutomaton::from_rows(
        SemiringKind::Real,
        ["C", "D"],
        vec![p1, 1.0 - p1],
        vec![p6, 1.0 - p6],
        &[
            vec![vec![p2, 1.0 - p2], vec![p3, 1.0 - p3]],
            vec![vec![1.0 - p4, p4], vec![1.0 - p5, p5]],
        ],
    )?;
    Ok(StrategyAutomaton { core })
}

fn fixed(p: [f64; 6]) -> StrategyAutomaton {
    build_strategy(StrategyParams(p)).expect("built-in parameters are probabilities")
}

/// Repeats the opponent's previous action; opens with cooperation.
pub fn make_tit_for_tat() -> StrategyAutomaton {
    fixed([1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
}

/// Cooperates until the first betrayal, then betrays forever.
pub fn make_vindictive() -> StrategyAutomaton {
    fixed([1.0, 1.0, 0.0, 1.0, 1.0, 1.0])
}

pub fn make_always_cooperate() -> StrategyAutomaton {
    fixed([1.0, 1.0, 1.0, 0.0, 0.0, 1.0])
}

pub fn make_always_defect() -> StrategyAutomaton {
    fixed([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
}

pub fn make_uniform() -> StrategyAutomaton {
    fixed([0.5; 6])
}

/// Named strategy: `tft`, `vindictive`, `allc`, `alld`, `uniform`, or
/// `params:p1,p2,p3,p4,p5,p6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategySpec {
    TitForTat,
    Vindictive,
    AlwaysCooperate,
    AlwaysDefect,
    Uniform,
    Params(StrategyParams),
}

impl StrategySpec {
    pub fn build(&self) -> StrategyAutomaton {
        match self {
            StrategySpec::TitForTat => make_tit_for_tat(),
            StrategySpec::Vindictive => make_vindictive(),
            StrategySpec::AlwaysCooperate => make_always_cooperate(),
            StrategySpec::AlwaysDefect => make_always_defect(),
            StrategySpec::Uniform => make_uniform(),
            StrategySpec::Params(p) => build_strategy(*p).expect("parsed parameters are validated"),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tft" => StrategySpec::TitForTat,
            "vindictive" => StrategySpec::Vindictive,
            "allc" => StrategySpec::AlwaysCooperate,
            "alld" => StrategySpec::AlwaysDefect,
            "uniform" => StrategySpec::Uniform,
            _ => {
                let list = s
                    .strip_prefix("params:")
                    .ok_or_else(|| Error::Config(format!("unknown strategy id {s:?}")))?;
                let values = list
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad probability {v:?} in {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let p: [f64; 6] = values
                    .try_into()
                    .map_err(|_| Error::Config(format!("{s:?} needs exactly six probabilities")))?;
                StrategySpec::Params(StrategyParams::new(p)?)
            }
        })
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::TitForTat => f.write_str("tft"),
            StrategySpec::Vindictive => f.write_str("vindictive"),
            StrategySpec::AlwaysCooperate => f.write_str("allc"),
            StrategySpec::AlwaysDefect => f.write_str("alld"),
            StrategySpec::Uniform => f.write_str("uniform"),
            StrategySpec::Params(p) => {
                let parts: Vec<String> = p.0.iter().map(f64::to_string).collect();
                write!(f, "params:{}", parts.join(","))
            }
        }
    }
}

impl Serialize for StrategySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StrategySpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-step cooperation probabilities of a strategy automaton.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    open_c: f64,
    /// `next_c[state][perceived]` is the probability of playing C next.
    next_c: [[f64; 2]; 2],
}

impl Kernel {
    fn of(a: &WeightedAutomaton) -> Kernel {
        let t = a.transitions();
        Kernel {
            open_c: a.entry()[0],
            next_c: [
                [t[0].get(0, 0), t[1].get(0, 0)],
                [t[0].get(1, 0), t[1].get(1, 0)],
            ],
        }
    }

    fn draw<R: Rng + ?Sized>(p_c: f64, rng: &mut R) -> Action {
        if rng.random::<f64>() < p_c {
            Action::C
        } else {
            Action::D
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub payoff_a: f64,
    pub payoff_b: f64,
    pub history: Vec<(Action, Action)>,
}

impl MatchResult {
    /// Fraction of rounds in which the first player cooperated.
    pub fn cooperation_rate_a(&self) -> f64 {
        let c = self.history.iter().filter(|(a, _)| *a == Action::C).count();
        c as f64 / self.history.len() as f64
    }
}

fn check_rounds(rounds: usize) -> Result<()> {
    if rounds == 0 {
        return Err(Error::Parameter("a match needs at least one round".into()));
    }
    Ok(())
}

fn play_cores<R: Rng + ?Sized>(
    table: &PayoffTable,
    a: &WeightedAutomaton,
    b: &WeightedAutomaton,
    rounds: usize,
    rng: &mut R,
) -> MatchResult {
    let (ka, kb) = (Kernel::of(a), Kernel::of(b));
    let mut history = Vec::with_capacity(rounds);
    let (mut pa, mut pb) = (0.0, 0.0);
    let mut act_a = Kernel::draw(ka.open_c, rng);
    let mut act_b = Kernel::draw(kb.open_c, rng);
    for round in 0..rounds {
        if round > 0 {
            let (prev_a, prev_b) = (act_a, act_b);
            act_a = Kernel::draw(ka.next_c[prev_a.index()][prev_b.index()], rng);
            act_b = Kernel::draw(kb.next_c[prev_b.index()][prev_a.index()], rng);
        }
        let (x, y) = table.payoff(act_a, act_b);
        pa += x;
        pb += y;
        history.push((act_a, act_b));
    }
    MatchResult {
        payoff_a: pa,
        payoff_b: pb,
        history,
    }
}

/// Exact per-round expectations of a match.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedPlay {
    pub payoff_a: f64,
    pub payoff_b: f64,
    /// Expected fraction of rounds in which each player cooperates.
    pub coop_a: f64,
    pub coop_b: f64,
    /// Joint distribution over `(action_a, action_b)` in each round.
    pub joint: Vec<[[f64; 2]; 2]>,
}

fn expect_cores(
    table: &PayoffTable,
    a: &WeightedAutomaton,
    b: &WeightedAutomaton,
    rounds: usize,
) -> ExpectedPlay {
    let (ka, kb) = (Kernel::of(a), Kernel::of(b));
    let prob = |p_c: f64, act: usize| if act == 0 { p_c } else { 1.0 - p_c };
    let mut joint = [[0.0; 2]; 2];
    for (sa, row) in joint.iter_mut().enumerate() {
        for (sb, cell) in row.iter_mut().enumerate() {
            *cell = prob(ka.open_c, sa) * prob(kb.open_c, sb);
        }
    }
    let mut out = ExpectedPlay {
        payoff_a: 0.0,
        payoff_b: 0.0,
        coop_a: 0.0,
        coop_b: 0.0,
        joint: Vec::with_capacity(rounds),
    };
    for round in 0..rounds {
        if round > 0 {
            let mut next = [[0.0; 2]; 2];
            for sa in 0..2 {
                for sb in 0..2 {
                    let mass = joint[sa][sb];
                    for (na, row) in next.iter_mut().enumerate() {
                        for (nb, cell) in row.iter_mut().enumerate() {
                            *cell +=
                                mass * prob(ka.next_c[sa][sb], na) * prob(kb.next_c[sb][sa], nb);
                        }
                    }
                }
            }
            joint = next;
        }
        for sa in 0..2 {
            for sb in 0..2 {
                let (x, y) = table.payoff(Action::from_index(sa), Action::from_index(sb));
                out.payoff_a += joint[sa][sb] * x;
                out.payoff_b += joint[sa][sb] * y;
            }
        }
        out.coop_a += joint[0][0] + joint[0][1];
        out.coop_b += joint[0][0] + joint[1][0];
        out.joint.push(joint);
    }
    out.coop_a /= rounds as f64;
    out.coop_b /= rounds as f64;
    out
}

impl PayoffTable {
    pub fn play_match<R: Rng + ?Sized>(
        &self,
        a: &StrategyAutomaton,
        b: &StrategyAutomaton,
        rounds: usize,
        rng: &mut R,
    ) -> Result<MatchResult> {
        check_rounds(rounds)?;
        Ok(play_cores(self, &a.core, &b.core, rounds, rng))
    }

    pub fn expected_play(
        &self,
        a: &StrategyAutomaton,
        b: &StrategyAutomaton,
        rounds: usize,
    ) -> Result<ExpectedPlay> {
        check_rounds(rounds)?;
        Ok(expect_cores(self, &a.core, &b.core, rounds))
    }
}

/// Plays `rounds` rounds under the standard payoff table.
pub fn play_match<R: Rng + ?Sized>(
    a: &StrategyAutomaton,
    b: &StrategyAutomaton,
    rounds: usize,
    rng: &mut R,
) -> Result<MatchResult> {
    PayoffTable::default().play_match(a, b, rounds, rng)
}

/// Exact expected cumulative payoffs, by forward propagation of the joint
/// action distribution.
pub fn expected_payoff(
    a: &StrategyAutomaton,
    b: &StrategyAutomaton,
    rounds: usize,
) -> Result<(f64, f64)> {
    let e = PayoffTable::default().expected_play(a, b, rounds)?;
    Ok((e.payoff_a, e.payoff_b))
}

/// Sum of `a`'s payoffs over `repeats` independent matches against `s0`.
pub fn tournament_fitness<R: Rng + ?Sized>(
    a: &StrategyAutomaton,
    s0: &StrategyAutomaton,
    rounds: usize,
    repeats: usize,
    rng: &mut R,
) -> Result<f64> {
    if repeats == 0 {
        return Err(Error::Parameter(
            "tournament needs at least one match".into(),
        ));
    }
    check_rounds(rounds)?;
    Ok((0..repeats)
        .map(|_| play_cores(&PayoffTable::default(), &a.core, &s0.core, rounds, rng).payoff_a)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FitnessMode {
    /// Payoffs of sampled matches.
    #[default]
    Sampled,
    /// Exact expected payoffs; deterministic.
    Expected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IpdConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub s0: StrategySpec,
    pub rounds: usize,
    pub repeats: usize,
    pub fitness_mode: FitnessMode,
    pub genetic: GeneticConfig,
}

impl Default for IpdConfig {
    fn default() -> Self {
        IpdConfig {
            pop_size: 32,
            generations: 60,
            s0: StrategySpec::TitForTat,
            rounds: DEFAULT_ROUNDS,
            repeats: DEFAULT_REPEATS,
            fitness_mode: FitnessMode::Sampled,
            genetic: GeneticConfig::stochastic(0),
        }
    }
}

impl IpdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "population size must be even and at least 2, got {}",
                self.pop_size
            )));
        }
        if self.rounds == 0 || self.repeats == 0 {
            return Err(Error::Config("rounds and repeats must be positive".into()));
        }
        self.genetic.validate(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpdGenerationStats {
    pub generation: u64,
    pub fit_min: f64,
    pub fit_mean: f64,
    pub fit_max: f64,
    /// Mean over the population of the cooperation rate against `s0`.
    pub coop_rate: f64,
    /// Population means of `p1..p6`.
    pub param_means: [f64; 6],
}

#[derive(Debug, Clone)]
pub struct IpdRun {
    pub config: IpdConfig,
    pub stats: Vec<IpdGenerationStats>,
    pub initial_population: Vec<WeightedAutomaton>,
    pub final_population: Vec<WeightedAutomaton>,
    /// Selection details, one entry per evolved generation.
    pub selections: Vec<Vec<TupleReport>>,
}

struct Evaluator<'a> {
    s0: &'a WeightedAutomaton,
    rounds: usize,
    repeats: usize,
    mode: FitnessMode,
}

impl Evaluator<'_> {
    /// (fitness, cooperation rate) of one candidate against `s0`.
    fn score(&self, cand: &WeightedAutomaton, rng: &mut StreamRng) -> (f64, f64) {
        let table = PayoffTable::default();
        match self.mode {
            FitnessMode::Expected => {
                let e = expect_cores(&table, cand, self.s0, self.rounds);
                (self.repeats as f64 * e.payoff_a, e.coop_a)
            }
            FitnessMode::Sampled => {
                let (mut fit, mut coop) = (0.0, 0.0);
                for _ in 0..self.repeats {
                    let m = play_cores(&table, cand, self.s0, self.rounds, rng);
                    fit += m.payoff_a;
                    coop += m.cooperation_rate_a();
                }
                (fit, coop / self.repeats as f64)
            }
        }
    }

    fn stats(
        &self,
        members: &[WeightedAutomaton],
        generation: u64,
        seed: u64,
    ) -> IpdGenerationStats {
        let scores: Vec<(f64, f64)> = members
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                self.score(
                    m,
                    &mut substream(seed, generation, streams::STATS + i as u64),
                )
            })
            .collect();
        let count = members.len() as f64;
        let fits = scores.iter().map(|s| s.0);
        let mut param_means = [0.0; 6];
        for m in members {
            for (acc, p) in param_means
                .iter_mut()
                .zip(StrategyParams::from_automaton(m).0)
            {
                *acc += p / count;
            }
        }
        IpdGenerationStats {
            generation,
            fit_min: fits.clone().fold(f64::INFINITY, f64::min),
            fit_mean: fits.clone().sum::<f64>() / count,
            fit_max: fits.fold(f64::NEG_INFINITY, f64::max),
            coop_rate: scores.iter().map(|s| s.1).sum::<f64>() / count,
            param_means,
        }
    }
}

/// Evolves a random population of strategies against the fixed opponent `s0`.
///
/// Mutation always runs in stochastic mode so members stay valid strategies.
/// The initial members are drawn from generation stream
/// [`streams::INIT_GENERATION`]; per-generation statistics replay each member
/// against `s0` on stream `STATS + slot`.
pub fn evolve_ipd(config: &IpdConfig) -> Result<IpdRun> {
    config.validate()?;
    let mut genetic = config.genetic.clone();
    genetic.stochastic_mode = true;
    let seed = genetic.rng_seed;

    let s0 = config.s0.build();
    let mut init_rng = substream(seed, streams::INIT_GENERATION, 0);
    let initial: Vec<WeightedAutomaton> = (0..config.pop_size)
        .map(|_| {
            build_strategy(StrategyParams::random(&mut init_rng)).map(StrategyAutomaton::into_core)
        })
        .collect::<Result<_>>()?;

    let eval = Evaluator {
        s0: s0.core(),
        rounds: config.rounds,
        repeats: config.repeats,
        mode: config.fitness_mode,
    };
    let fitness = |_: usize, cand: &WeightedAutomaton, rng: &mut StreamRng| eval.score(cand, rng).0;

    let mut pop = Population::new(initial.clone())?;
    let mut stats = vec![eval.stats(pop.members(), 0, seed)];
    let mut selections = Vec::with_capacity(config.generations);
    for _ in 0..config.generations {
        let out = evolve_generation(&pop, &fitness, &genetic)?;
        pop = out.population;
        stats.push(eval.stats(pop.members(), pop.generation(), seed));
        selections.push(out.tuples);
    }
    Ok(IpdRun {
        config: IpdConfig {
            genetic,
            ..config.clone()
        },
        stats,
        initial_population: initial,
        final_population: pop.into_members(),
        selections,
    })
}
