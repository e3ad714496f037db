//! Named strategies playing sampled and expected iterated dilemma matches.

use genetic_automata::genetics::substream;
use genetic_automata::ipd::{expected_payoff, play_match, StrategySpec};

fn main() -> genetic_automata::Result<()> {
    let ids = ["tft", "vindictive", "allc", "alld", "uniform"];
    let rounds = 20;
    println!("expected payoff of row vs column over {rounds} rounds");
    print!("{:>11}", "");
    for id in ids {
        print!("{id:>11}");
    }
    println!();
    for a in ids {
        print!("{a:>11}");
        let sa = a.parse::<StrategySpec>()?.build();
        for b in ids {
            let sb = b.parse::<StrategySpec>()?.build();
            print!("{:>11.3}", expected_payoff(&sa, &sb, rounds)?.0);
        }
        println!();
    }

    let uniform = StrategySpec::Uniform.build();
    let tft = StrategySpec::TitForTat.build();
    let m = play_match(&uniform, &tft, 10, &mut substream(42, 0, 0))?;
    let moves: Vec<String> = m.history.iter().map(|(x, y)| format!("{x}{y}")).collect();
    println!("\nuniform vs tft, one sampled match: {}", moves.join(" "));
    println!("payoffs {} / {}", m.payoff_a, m.payoff_b);
    Ok(())
}
