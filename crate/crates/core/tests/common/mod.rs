#![allow(dead_code)]

use genetic_automata::{SemiringKind, WeightedAutomaton};
use itertools::Itertools;
use rand::Rng;

/// Real automaton with entries in [0, 1]; each coefficient is zeroed with
/// probability `zero_prob`.
pub fn random_real<R: Rng>(rng: &mut R, n: usize, k: usize, zero_prob: f64) -> WeightedAutomaton {
    let mut draw = |len: usize| -> Vec<f64> {
        (0..len)
            .map(|_| {
                if rng.random::<f64>() < zero_prob {
                    0.0
                } else {
                    rng.random()
                }
            })
            .collect()
    };
    let entry = draw(n);
    let fin = draw(n);
    let trans: Vec<(String, Vec<Vec<f64>>)> = (0..k)
        .map(|l| {
            (
                ((b'a' + l as u8) as char).to_string(),
                (0..n).map(|_| draw(n)).collect(),
            )
        })
        .collect();
    let alphabet: Vec<String> = trans.iter().map(|(s, _)| s.clone()).collect();
    let mut coeffs = vec![];
    coeffs.extend(&entry);
    coeffs.extend(&fin);
    for (_, rows) in &trans {
        for r in rows {
            coeffs.extend(r);
        }
    }
    let a = WeightedAutomaton::from_vector(alphabet, n, &coeffs).unwrap();
    assert_eq!(a.semiring(), SemiringKind::Real);
    a
}

/// Evaluation matrix by explicit enumeration: every ordered choice of
/// distinct intermediate states is a simple path `i -> ... -> j`.
pub fn simple_path_oracle(a: &WeightedAutomaton) -> Vec<Vec<f64>> {
    let n = a.n();
    let w = |p: usize, q: usize| -> f64 { a.transitions().iter().map(|m| m.get(p, q)).sum() };
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let paths = if i == j {
                1.0
            } else {
                let others: Vec<usize> = (0..n).filter(|&s| s != i && s != j).collect();
                (0..=others.len())
                    .flat_map(|len| others.iter().copied().permutations(len))
                    .map(|mid| {
                        let mut walk = vec![i];
                        walk.extend(mid);
                        walk.push(j);
                        walk.windows(2).map(|e| w(e[0], e[1])).product::<f64>()
                    })
                    .sum()
            };
            out[i][j] = a.entry()[i] * paths * a.final_costs()[j];
        }
    }
    out
}

/// Entry sum and every transition row sum equal one within `tol`, all
/// coefficients nonnegative.
pub fn sums_to_one(a: &WeightedAutomaton, tol: f64) -> bool {
    let ok = |v: &[f64]| v.iter().all(|&x| x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() <= tol;
    ok(a.entry())
        && a.transitions()
            .iter()
            .all(|m| (0..m.rows()).all(|r| ok(m.row(r))))
}
