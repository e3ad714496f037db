//! Evolve stochastic two-state strategies against a fixed opponent.
//!
//! `cargo run --example evolve_ipd -- alld 3`

use genetic_automata::evolve_ipd;
use genetic_automata::ipd::{IpdConfig, StrategySpec};
use genetic_automata::GeneticConfig;

fn main() -> genetic_automata::Result<()> {
    let mut args = std::env::args().skip(1);
    let s0: StrategySpec = args.next().as_deref().unwrap_or("tft").parse()?;
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let config = IpdConfig {
        s0,
        genetic: GeneticConfig::stochastic(seed),
        ..IpdConfig::default()
    };
    let run = evolve_ipd(&config)?;
    println!("s0 = {s0}, seed = {seed}");
    println!(
        "{:>4} {:>8} {:>9} {:>8} {:>6}   mean p1..p6",
        "gen", "min", "mean", "max", "coop"
    );
    for s in run.stats.iter().step_by(10) {
        let p: Vec<String> = s.param_means.iter().map(|x| format!("{x:.2}")).collect();
        println!(
            "{:>4} {:>8.1} {:>9.2} {:>8.1} {:>6.3}   {}",
            s.generation,
            s.fit_min,
            s.fit_mean,
            s.fit_max,
            s.coop_rate,
            p.join(" ")
        );
    }
    Ok(())
}
