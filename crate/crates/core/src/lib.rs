//! Weighted finite automata over the Boolean and real semirings, genetic
//! operators on their transition matrices, iterated prisoner's dilemma
//! strategies encoded as two-state automata, and detection of behavioral
//! aggregations in populations of automaton agents.
//!
//! Runnable examples (`cargo run --example <name>`):
//!
//! * `word_weights`: build an automaton, weigh words, print a behavior table.
//! * `distances`: vector distance and truncated behavior gap between automata.
//! * `genetic_operators`: duplicate, crossover, mutate and one generation.
//! * `ipd_match`: named strategies playing sampled and expected matches.
//! * `evolve_ipd`: evolve stochastic strategies against tit-for-tat.
//! * `emergence`: evaluation matrices, neighborhood fitness and clustering.
//!
//! The `gauto` binary exposes the same capabilities as batch commands.

pub mod automaton;
pub mod cli;
pub mod emergence;
pub mod error;
pub mod genetics;
pub mod ipd;
pub mod semiring;

pub use automaton::{automaton_distance, behavior_gap, BehaviorTable, WeightedAutomaton, Word};
pub use emergence::{
    detect_aggregations, evaluate, evolve_emergent, Agent, AgentFitness, EvaluationMatrix,
};
pub use error::{Error, Result};
pub use genetics::{crossover, duplicate, evolve_generation, mutate, GeneticConfig, Population};
pub use ipd::{evolve_ipd, expected_payoff, play_match, StrategyAutomaton, StrategySpec};
pub use semiring::{Matrix, SemiringKind};
