//! Evaluation matrices, neighborhood fitness, and aggregation of two
//! behavioral clusters under the emergence fitness.

use genetic_automata::emergence::{
    agent_fitness, evaluate, semi_distance, ClusteredInit, EmergenceConfig,
};
use genetic_automata::ipd::make_uniform;
use genetic_automata::{detect_aggregations, evolve_emergent, GeneticConfig};

fn main() -> genetic_automata::Result<()> {
    println!(
        "evaluation of the uniform strategy:\n{}\n",
        evaluate(make_uniform().core())
    );

    let seed = 4;
    let (agents, centers) = ClusteredInit {
        count: 16,
        centers: 2,
        spread: 0.05,
    }
    .generate(seed)?;
    println!(
        "centers: {:?}",
        centers.iter().map(|c| c.0).collect::<Vec<_>>()
    );
    println!(
        "d(agent 0, agent 1) = {:.4}",
        semi_distance(&agents[0], &agents[1], 2.0)?
    );
    println!(
        "f(agent 0 | all others) = {}",
        agent_fitness(&agents[0], &agents[1..], 2.0)?
    );

    let eps = 0.1;
    println!(
        "clusters at eps {eps}: {:?}",
        detect_aggregations(&agents, eps, 2.0)?
    );

    let config = EmergenceConfig {
        generations: 30,
        epsilon: eps,
        genetic: GeneticConfig::stochastic(seed),
        ..EmergenceConfig::default()
    };
    let run = evolve_emergent(agents, &config, None)?;
    for s in run.stats.iter().step_by(5) {
        println!(
            "gen {:>3}  mean within-neighborhood distance {:.4}  clusters {}",
            s.generation, s.mean_within_nbhd_dist, s.n_clusters
        );
    }
    println!("final clusters: {:?}", run.final_clusters);
    Ok(())
}
