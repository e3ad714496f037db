//! Automata with multiplicities in matrix form.
//!
//! An automaton over alphabet `A` with `n` states is stored as the triplet of
//! an entry row-vector, one `n x n` transition matrix per letter, and a final
//! column-vector. The weight of a word `w = a₁…a_m` is
//! `entry · μ(a₁) ⋯ μ(a_m) · final`, with the empty word weighing
//! `entry · final`.
//!
//! The coefficient vector used for distances is laid out as
//! `[entry | final | μ(a₁) row-major | … | μ(a_k) row-major]`, letters in
//! declared alphabet order, for a total length of `k·n² + 2n`.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semiring::{self, hoelder_norm, Matrix, SemiringKind};

/// Exponent used whenever a norm is not otherwise specified.
pub const DEFAULT_ALPHA: f64 = 2.0;
/// Default truncation length for behavior comparisons.
pub const DEFAULT_MAX_LEN: usize = 6;
/// Tolerance for row-sum and entry-sum checks on probabilistic automata.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AutomatonDoc", into = "AutomatonDoc")]
pub struct WeightedAutomaton {
    semiring: SemiringKind,
    alphabet: Vec<String>,
    entry: Vec<f64>,
    final_costs: Vec<f64>,
    trans: Vec<Matrix>,
}

impl WeightedAutomaton {
    /// `trans[i]` is the transition matrix of `alphabet[i]`.
    pub fn new(
        semiring: SemiringKind,
        alphabet: Vec<String>,
        entry: Vec<f64>,
        final_costs: Vec<f64>,
        trans: Vec<Matrix>,
    ) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Alphabet(
                "alphabet must contain at least one letter".into(),
            ));
        }
        let mut seen = HashSet::new();
        for s in &alphabet {
            if !seen.insert(s.as_str()) {
                return Err(Error::Alphabet(format!("duplicate symbol {s:?}")));
            }
        }
        let n = entry.len();
        if n == 0 {
            return Err(Error::Shape("automaton needs at least one state".into()));
        }
        if final_costs.len() != n {
            return Err(Error::Shape(format!(
                "final vector has length {}, expected {n}",
                final_costs.len()
            )));
        }
        if trans.len() != alphabet.len() {
            return Err(Error::Shape(format!(
                "{} transition matrices for {} letters",
                trans.len(),
                alphabet.len()
            )));
        }
        for (letter, m) in alphabet.iter().zip(&trans) {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape(format!(
                    "matrix for {letter:?} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.semiring() != semiring {
                return Err(Error::SemiringMismatch {
                    left: semiring,
                    right: m.semiring(),
                });
            }
        }
        for &v in entry.iter().chain(&final_costs) {
            semiring.check(v)?;
        }
        Ok(WeightedAutomaton {
            semiring,
            alphabet,
            entry,
            final_costs,
            trans,
        })
    }

    /// Convenience constructor taking each transition matrix as a list of rows.
    pub fn from_rows<S: Into<String>>(
        semiring: SemiringKind,
        alphabet: impl IntoIterator<Item = S>,
        entry: Vec<f64>,
        final_costs: Vec<f64>,
        trans: &[Vec<Vec<f64>>],
    ) -> Result<Self> {
        let trans = trans
            .iter()
            .map(|rows| Matrix::from_rows(semiring, rows))
            .collect::<Result<Vec<_>>>()?;
        WeightedAutomaton::new(
            semiring,
            alphabet.into_iter().map(Into::into).collect(),
            entry,
            final_costs,
            trans,
        )
    }

    /// Rebuilds a real automaton from a coefficient vector laid out as by
    /// [`vectorize`](Self::vectorize).
    pub fn from_vector(alphabet: Vec<String>, n: usize, coefficients: &[f64]) -> Result<Self> {
        let k = alphabet.len();
        let expected = k * n * n + 2 * n;
        if coefficients.len() != expected {
            return Err(Error::Shape(format!(
                "coefficient vector has length {}, expected {expected}",
                coefficients.len()
            )));
        }
        let entry = coefficients[..n].to_vec();
        let final_costs = coefficients[n..2 * n].to_vec();
        let trans = coefficients[2 * n..]
            .chunks(n * n)
            .map(|c| Matrix::new(SemiringKind::Real, n, n, c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        WeightedAutomaton::new(SemiringKind::Real, alphabet, entry, final_costs, trans)
    }

    pub fn semiring(&self) -> SemiringKind {
        self.semiring
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.entry.len()
    }

    pub fn entry(&self) -> &[f64] {
        &self.entry
    }

    pub fn final_costs(&self) -> &[f64] {
        &self.final_costs
    }

    pub fn transitions(&self) -> &[Matrix] {
        &self.trans
    }

    pub(crate) fn transitions_mut(&mut self) -> &mut [Matrix] {
        &mut self.trans
    }

    pub fn letter_index(&self, symbol: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::Alphabet(format!("symbol {symbol:?} is not in the alphabet")))
    }

    pub fn transition(&self, symbol: &str) -> Result<&Matrix> {
        Ok(&self.trans[self.letter_index(symbol)?])
    }

    /// Same alphabet (in the same order), state count, and semiring.
    pub fn check_comparable(&self, other: &WeightedAutomaton) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::Incomparable(format!(
                "alphabets differ: {:?} vs {:?}",
                self.alphabet, other.alphabet
            )));
        }
        if self.n() != other.n() {
            return Err(Error::Incomparable(format!(
                "state counts differ: {} vs {}",
                self.n(),
                other.n()
            )));
        }
        if self.semiring != other.semiring {
            return Err(Error::Incomparable(format!(
                "semirings differ: {:?} vs {:?}",
                self.semiring, other.semiring
            )));
        }
        Ok(())
    }

    /// Entry vector sums to one and every transition row is a probability
    /// distribution, within `tol`.
    pub fn is_stochastic(&self, tol: f64) -> bool {
        let is_distribution =
            |v: &[f64]| v.iter().all(|&x| x >= -tol) && (v.iter().sum::<f64>() - 1.0).abs() <= tol;
        is_distribution(&self.entry)
            && self
                .trans
                .iter()
                .all(|m| (0..m.rows()).all(|r| is_distribution(m.row(r))))
    }

    fn word_indices(&self, w: &Word) -> Result<Vec<usize>> {
        w.symbols().iter().map(|s| self.letter_index(s)).collect()
    }

    fn weight_of_indices(&self, letters: &[usize]) -> f64 {
        let mut v = self.entry.clone();
        for &l in letters {
            v = self.trans[l]
                .left_mul(&v)
                .expect("transition matrices match the state count");
        }
        semiring::dot(self.semiring, &v, &self.final_costs)
    }

    /// `entry · μ(w) · final`.
    pub fn word_weight(&self, w: &Word) -> Result<f64> {
        let letters = self.word_indices(w)?;
        Ok(self.weight_of_indices(&letters))
    }

    /// `μ(w)` as a product of letter matrices; the identity for the empty word.
    pub fn word_matrix(&self, w: &Word) -> Result<Matrix> {
        let letters = self.word_indices(w)?;
        let mut acc = Matrix::identity(self.semiring, self.n())?;
        for l in letters {
            acc = acc.mat_mul(&self.trans[l])?;
        }
        Ok(acc)
    }

    /// Weights of every word of length at most `max_len`, in
    /// length-then-lexicographic order of the declared alphabet.
    pub fn behavior(&self, max_len: usize) -> BehaviorTable {
        let mut entries = Vec::new();
        // Each level keeps (word, entry · μ(word)) so a word costs one vector product.
        let mut level = vec![(Vec::<usize>::new(), self.entry.clone())];
        for len in 0..=max_len {
            for (letters, v) in &level {
                let weight = semiring::dot(self.semiring, v, &self.final_costs);
                let word = Word::new(letters.iter().map(|&l| self.alphabet[l].clone()));
                entries.push((word, weight));
            }
            if len == max_len {
                break;
            }
            level = level
                .iter()
                .flat_map(|(letters, v)| {
                    self.trans.iter().enumerate().map(move |(l, m)| {
                        let mut next = letters.clone();
                        next.push(l);
                        (next, m.left_mul(v).expect("square transitions"))
                    })
                })
                .collect();
        }
        BehaviorTable { max_len, entries }
    }

    /// Coefficient vector `[entry | final | μ(a₁) | … | μ(a_k)]`, matrices row-major.
    pub fn vectorize(&self) -> Vec<f64> {
        let n = self.n();
        let mut v = Vec::with_capacity(self.alphabet.len() * n * n + 2 * n);
        v.extend_from_slice(&self.entry);
        v.extend_from_slice(&self.final_costs);
        for m in &self.trans {
            v.extend_from_slice(m.as_slice());
        }
        v
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        WeightedAutomaton::from_json(&fs::read_to_string(path)?)
    }
}

impl fmt::Debug for WeightedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedAutomaton")
            .field("semiring", &self.semiring)
            .field("alphabet", &self.alphabet)
            .field("entry", &self.entry)
            .field("final", &self.final_costs)
            .field("trans", &self.trans)
            .finish()
    }
}

/// On-disk form. `trans` maps each letter to its list of rows.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonDoc {
    semiring: SemiringKind,
    alphabet: Vec<String>,
    n: usize,
    entry: Vec<f64>,
    #[serde(rename = "final")]
    final_costs: Vec<f64>,
    trans: IndexMap<String, Vec<Vec<f64>>>,
}

impl From<WeightedAutomaton> for AutomatonDoc {
    fn from(a: WeightedAutomaton) -> Self {
        let n = a.n();
        let trans = a
            .alphabet
            .iter()
            .cloned()
            .zip(a.trans.iter().map(Matrix::to_rows))
            .collect();
        AutomatonDoc {
            semiring: a.semiring,
            alphabet: a.alphabet,
            n,
            entry: a.entry,
            final_costs: a.final_costs,
            trans,
        }
    }
}

impl TryFrom<AutomatonDoc> for WeightedAutomaton {
    type Error = Error;

    fn try_from(mut doc: AutomatonDoc) -> Result<Self> {
        if doc.entry.len() != doc.n {
            return Err(Error::Shape(format!(
                "declared n = {} but entry has length {}",
                doc.n,
                doc.entry.len()
            )));
        }
        if doc.trans.len() != doc.alphabet.len() {
            return Err(Error::Alphabet(format!(
                "{} letters declared but {} transition matrices given",
                doc.alphabet.len(),
                doc.trans.len()
            )));
        }
        let mut trans = Vec::with_capacity(doc.alphabet.len());
        for letter in &doc.alphabet {
            let rows = doc.trans.swap_remove(letter).ok_or_else(|| {
                Error::Alphabet(format!("no transition matrix for letter {letter:?}"))
            })?;
            if rows.len() != doc.n {
                return Err(Error::Shape(format!(
                    "matrix for {letter:?} has {} rows, expected {}",
                    rows.len(),
                    doc.n
                )));
            }
            trans.push(Matrix::from_rows(doc.semiring, &rows)?);
        }
        WeightedAutomaton::new(
            doc.semiring,
            doc.alphabet,
            doc.entry,
            doc.final_costs,
            trans,
        )
    }
}

/// A finite word over an automaton's alphabet; possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<String>);

impl Word {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Self {
        Word(symbols.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// One symbol per character: `Word::from_chars("ab")` is `a` then `b`.
    pub fn from_chars(s: &str) -> Self {
        Word(s.chars().map(String::from).collect())
    }

    pub fn symbols(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word([self.0.as_slice(), other.0.as_slice()].concat())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let sep = if self.0.iter().all(|s| s.chars().count() == 1) {
            ""
        } else {
            "."
        };
        f.write_str(&self.0.join(sep))
    }
}

/// Truncated behavior: the weight of each word up to a length bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorTable {
    max_len: usize,
    entries: Vec<(Word, f64)>,
}

impl BehaviorTable {
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.entries.iter().map(|(w, v)| (w, *v))
    }

    pub fn get(&self, w: &Word) -> Option<f64> {
        self.entries.iter().find(|(x, _)| x == w).map(|(_, v)| *v)
    }

    /// Weights in enumeration order.
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, v)| *v).collect()
    }
}

/// Hölder-`alpha` norm of the difference of the two coefficient vectors.
pub fn automaton_distance(
    a1: &WeightedAutomaton,
    a2: &WeightedAutomaton,
    alpha: f64,
) -> Result<f64> {
    a1.check_comparable(a2)?;
    let diff: Vec<f64> = a1
        .vectorize()
        .iter()
        .zip(a2.vectorize())
        .map(|(x, y)| x - y)
        .collect();
    hoelder_norm(&diff, alpha)
}

/// Hölder-`alpha` norm of the difference of the behaviors truncated at `max_len`.
pub fn behavior_gap(
    a1: &WeightedAutomaton,
    a2: &WeightedAutomaton,
    max_len: usize,
    alpha: f64,
) -> Result<f64> {
    if a1.alphabet() != a2.alphabet() {
        return Err(Error::Incomparable(format!(
            "alphabets differ: {:?} vs {:?}",
            a1.alphabet(),
            a2.alphabet()
        )));
    }
    semiring::check_exponent(alpha)?;
    let diff: Vec<f64> = a1
        .behavior(max_len)
        .values()
        .iter()
        .zip(a2.behavior(max_len).values())
        .map(|(x, y)| x - y)
        .collect();
    hoelder_norm(&diff, alpha)
}
