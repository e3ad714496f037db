//! Coefficient distance and truncated behavior gap between nearby strategies.

use genetic_automata::ipd::{build_strategy, StrategyParams};
use genetic_automata::{automaton_distance, behavior_gap};

fn main() -> genetic_automata::Result<()> {
    // With final costs (0.5, 0.5) every word would weigh 0.5 and the gap vanish.
    let base_p = [0.5, 0.5, 0.5, 0.5, 0.5, 0.9];
    let base = build_strategy(StrategyParams(base_p))?.into_core();
    println!(
        "{:>8} {:>12} {:>12} {:>12}",
        "delta", "d_alpha=1", "d_alpha=2", "gap(L=4)"
    );
    for delta in [0.25, 0.1, 0.01, 0.001] {
        let mut p = base_p;
        p[1] += delta;
        let other = build_strategy(StrategyParams(p))?.into_core();
        println!(
            "{delta:>8} {:>12.6} {:>12.6} {:>12.6}",
            automaton_distance(&base, &other, 1.0)?,
            automaton_distance(&base, &other, 2.0)?,
            behavior_gap(&base, &other, 4, 1.0)?,
        );
    }
    Ok(())
}
