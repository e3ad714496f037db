//! Crossover, mutation and one elitist generation on stochastic automata.

use genetic_automata::genetics::{substream, Chromosome};
use genetic_automata::ipd::{build_strategy, StrategyParams};
use genetic_automata::{
    crossover, evolve_generation, mutate, GeneticConfig, Population, WeightedAutomaton,
};

fn show(label: &str, a: &WeightedAutomaton) {
    let c = Chromosome::of(a);
    let rows: Vec<String> = (0..a.alphabet().len())
        .map(|l| {
            format!(
                "{}:{:?}",
                a.alphabet()[l],
                (0..a.n()).map(|r| c.allele(l, r)).collect::<Vec<_>>()
            )
        })
        .collect();
    println!("{label:<8} {}", rows.join("  "));
}

fn main() -> genetic_automata::Result<()> {
    let a = build_strategy(StrategyParams([1.0, 1.0, 0.0, 0.0, 1.0, 1.0]))?.into_core();
    let b = build_strategy(StrategyParams([0.0, 0.5, 0.5, 0.5, 0.5, 0.0]))?.into_core();
    show("a", &a);
    show("b", &b);

    // Swap row 1 of every letter's matrix.
    let (c, d) = crossover(&a, &b, &[1])?;
    show("child c", &c);
    show("child d", &d);

    let cfg = GeneticConfig::stochastic(7);
    let m = mutate(&c, &cfg, &mut substream(7, 0, 0));
    show("mutant", &m);
    println!("mutant stays stochastic: {}", m.is_stochastic(1e-9));

    // Fitness: probability mass kept on cooperation after a cooperative move.
    let fitness = |_: usize, x: &WeightedAutomaton, _: &mut _| x.transitions()[0].get(0, 0);
    let pop = Population::new(vec![a, b, c, d])?;
    let next = evolve_generation(&pop, &fitness, &cfg)?;
    for t in &next.tuples {
        println!(
            "slots {:?} fitness {:?} survivors {:?}",
            t.slots, t.fitness, t.survivors
        );
    }
    println!("new fitness by slot: {:?}", next.survivor_fitness());
    Ok(())
}
