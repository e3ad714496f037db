//! Weights of words and the truncated behavior of a small real automaton.

use genetic_automata::{SemiringKind, WeightedAutomaton, Word};

fn main() -> genetic_automata::Result<()> {
    // Counts occurrences of `b`: state 0 waits, state 1 has just seen a `b`.
    let a = WeightedAutomaton::from_rows(
        SemiringKind::Real,
        ["a", "b"],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        &[
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![1.0, 1.0], vec![0.0, 1.0]],
        ],
    )?;

    for w in ["", "a", "b", "abba", "bbb"] {
        let word = Word::from_chars(w);
        println!("weight({word}) = {}", a.word_weight(&word)?);
    }

    let table = a.behavior(3);
    println!("\n{} words up to length 3:", table.len());
    for (w, v) in table.iter() {
        println!("  {:>4}  {v}", w.to_string());
    }

    println!("\nas JSON:\n{}", a.to_json()?);
    Ok(())
}
