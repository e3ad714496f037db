//! Genetic operators on the matrix representation of automata.
//!
//! The chromosome of an automaton is the ordered sequence of its transition
//! matrices; alleles are matrix rows. Entry and final vectors are not part of
//! the chromosome and are inherited verbatim.
//!
//! One generation pairs the population at random, produces two children per
//! pair by duplication, row crossover and row mutation, and keeps the two
//! fittest automata of each parent/child 4-uple.
//!
//! # Random streams
//!
//! Every random draw comes from a [`substream`] keyed by
//! `(seed, generation, stream id)`. Within generation `g`, the pairing uses
//! stream [`streams::PAIRING`]; pair `p` draws its crossover rows and mutations
//! from stream `8p` and evaluates the fitness of 4-uple member `m` (parents
//! first) on stream `8p + 1 + m`. Results are therefore independent of the
//! order in which pairs are processed.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::semiring::{Matrix, SemiringKind};

/// Random stream type handed to operators and fitness functions.
pub type StreamRng = ChaCha8Rng;

pub mod streams {
    /// Stream used to draw the pairing of a generation.
    pub const PAIRING: u64 = u64::MAX;
    /// Base of the streams used for per-member statistics.
    pub const STATS: u64 = 1 << 48;
    /// Pseudo-generation used for initial population sampling.
    pub const INIT_GENERATION: u64 = u64::MAX;

    pub fn pair_operators(pair: usize) -> u64 {
        8 * pair as u64
    }

    pub fn pair_fitness(pair: usize, member: usize) -> u64 {
        8 * pair as u64 + 1 + member as u64
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent random stream for `(seed, generation, stream)`.
pub fn substream(seed: u64, generation: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(generation)));
    rng.set_stream(stream);
    rng
}

/// Read-only genetic view of an automaton.
#[derive(Debug, Clone, Copy)]
pub struct Chromosome<'a> {
    owner: &'a WeightedAutomaton,
}

impl<'a> Chromosome<'a> {
    pub fn of(owner: &'a WeightedAutomaton) -> Self {
        Chromosome { owner }
    }

    pub fn owner(&self) -> &'a WeightedAutomaton {
        self.owner
    }

    /// Transition matrices in alphabet order.
    pub fn matrices(&self) -> &'a [Matrix] {
        self.owner.transitions()
    }

    pub fn allele(&self, letter: usize, row: usize) -> &'a [f64] {
        self.owner.transitions()[letter].row(row)
    }

    pub fn allele_count(&self) -> usize {
        self.owner.alphabet().len() * self.owner.n()
    }
}

/// How mutation draws a replacement row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RowSampler {
    /// Uniform over the admissible rows: the probability simplex in
    /// stochastic mode, i.i.d. entries otherwise (uniform on `[0,1]` for
    /// real automata, fair coins for boolean ones).
    #[default]
    Uniform,
    /// Always uniform on the probability simplex.
    Simplex,
    /// Redraws the current row unchanged; mutation has no effect.
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverRows {
    /// A uniformly random nonempty proper subset of the rows.
    #[default]
    Random,
    /// A uniformly random subset of exactly this many rows.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    PreferParents,
    PreferChildren,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneticConfig {
    pub mutation_row_sampler: RowSampler,
    pub stochastic_mode: bool,
    pub crossover_row_count: CrossoverRows,
    pub rng_seed: u64,
    pub selection_tiebreak: TieBreak,
}

impl Default for GeneticConfig {
    fn default() -> Self {
        GeneticConfig {
            mutation_row_sampler: RowSampler::Uniform,
            stochastic_mode: false,
            crossover_row_count: CrossoverRows::Random,
            rng_seed: 0,
            selection_tiebreak: TieBreak::PreferParents,
        }
    }
}

impl GeneticConfig {
    pub fn stochastic(seed: u64) -> Self {
        GeneticConfig {
            stochastic_mode: true,
            rng_seed: seed,
            ..GeneticConfig::default()
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if let CrossoverRows::Fixed(count) = self.crossover_row_count {
            if count > n {
                return Err(Error::Config(format!(
                    "crossover row count {count} exceeds state count {n}"
                )));
            }
        }
        Ok(())
    }

    /// Draws the row set exchanged by one crossover.
    pub fn draw_crossover_rows<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        match self.crossover_row_count {
            CrossoverRows::Fixed(count) => {
                let mut rows = index::sample(rng, n, count.min(n)).into_vec();
                rows.sort_unstable();
                rows
            }
            // A single row has no proper nonempty subset; swap it.
            CrossoverRows::Random if n == 1 => vec![0],
            CrossoverRows::Random => loop {
                let rows: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
                if !rows.is_empty() && rows.len() < n {
                    break rows;
                }
            },
        }
    }
}

/// Individuals of one generation. All members share alphabet, state count and semiring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    members: Vec<WeightedAutomaton>,
    generation: u64,
}

impl Population {
    pub fn new(members: Vec<WeightedAutomaton>) -> Result<Self> {
        Population::at_generation(members, 0)
    }

    pub fn at_generation(members: Vec<WeightedAutomaton>, generation: u64) -> Result<Self> {
        if members.len() < 2 || !members.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "population size must be even and at least 2, got {}",
                members.len()
            )));
        }
        for m in &members[1..] {
            members[0]
                .check_comparable(m)
                .map_err(|e| Error::Config(format!("heterogeneous population: {e}")))?;
        }
        Ok(Population {
            members,
            generation,
        })
    }

    pub fn members(&self) -> &[WeightedAutomaton] {
        &self.members
    }

    pub fn into_members(self) -> Vec<WeightedAutomaton> {
        self.members
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn duplicate(a: &WeightedAutomaton) -> WeightedAutomaton {
    a.clone()
}

/// Exchanges the rows listed in `rows` (0-based) between the analogous
/// matrices of `a` and `b`, for every letter.
pub fn crossover(
    a: &WeightedAutomaton,
    b: &WeightedAutomaton,
    rows: &[usize],
) -> Result<(WeightedAutomaton, WeightedAutomaton)> {
    a.check_comparable(b)?;
    if let Some(&bad) = rows.iter().find(|&&r| r >= a.n()) {
        return Err(Error::Parameter(format!(
            "crossover row {bad} out of range for {} states",
            a.n()
        )));
    }
    let mut child_a = duplicate(a);
    let mut child_b = duplicate(b);
    let mut rows = rows.to_vec();
    rows.sort_unstable();
    rows.dedup();
    for (ma, mb) in child_a
        .transitions_mut()
        .iter_mut()
        .zip(child_b.transitions_mut().iter_mut())
    {
        for &r in &rows {
            ma.swap_row_with(mb, r);
        }
    }
    Ok((child_a, child_b))
}

fn sample_row<R: Rng + ?Sized>(
    sampler: RowSampler,
    stochastic: bool,
    semiring: SemiringKind,
    current: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let n = current.len();
    match (sampler, stochastic, semiring) {
        (RowSampler::Keep, _, _) => current.to_vec(),
        (RowSampler::Simplex, _, _) | (RowSampler::Uniform, true, _) => {
            // Normalized i.i.d. exponentials are uniform on the simplex.
            let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = draws.iter().sum();
            if total > 0.0 {
                draws.iter().map(|d| d / total).collect()
            } else {
                vec![1.0 / n as f64; n]
            }
        }
        (RowSampler::Uniform, false, SemiringKind::Real) => {
            (0..n).map(|_| rng.random::<f64>()).collect()
        }
        (RowSampler::Uniform, false, SemiringKind::Boolean) => (0..n)
            .map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 })
            .collect(),
    }
}

/// Replaces one uniformly chosen row of each transition matrix with a fresh row.
pub fn mutate<R: Rng + ?Sized>(
    a: &WeightedAutomaton,
    cfg: &GeneticConfig,
    rng: &mut R,
) -> WeightedAutomaton {
    let mut out = duplicate(a);
    let n = out.n();
    let semiring = out.semiring();
    for m in out.transitions_mut() {
        let row = rng.random_range(0..n);
        let fresh = sample_row(
            cfg.mutation_row_sampler,
            cfg.stochastic_mode,
            semiring,
            m.row(row),
            rng,
        );
        m.set_row(row, &fresh)
            .expect("sampled rows have the matrix width and semiring");
    }
    out
}

/// Fitness scores and survivors of one parent/child 4-uple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleReport {
    /// Population slots of the two parents.
    pub slots: [usize; 2],
    /// Fitness of `[parent_a, parent_b, child_a, child_b]`.
    pub fitness: [f64; 4],
    /// Indices into the 4-uple of the survivors, best first.
    pub survivors: [usize; 2],
}

impl TupleReport {
    pub fn parent_max(&self) -> f64 {
        self.fitness[0].max(self.fitness[1])
    }

    pub fn survivor_max(&self) -> f64 {
        self.fitness[self.survivors[0]].max(self.fitness[self.survivors[1]])
    }
}

#[derive(Debug, Clone)]
pub struct Evolved {
    pub population: Population,
    pub tuples: Vec<TupleReport>,
}

impl Evolved {
    /// Fitness of each member of the new population, by slot, as measured
    /// during selection.
    pub fn survivor_fitness(&self) -> Vec<f64> {
        let mut out = vec![f64::NAN; self.population.len()];
        for t in &self.tuples {
            for (slot_pos, pick) in placement(t.survivors).into_iter().enumerate() {
                out[t.slots[slot_pos]] = t.fitness[pick];
            }
        }
        out
    }
}

fn rank(fitness: &[f64; 4], tiebreak: TieBreak) -> [usize; 2] {
    let mut order = match tiebreak {
        TieBreak::PreferParents => [0, 1, 2, 3],
        TieBreak::PreferChildren => [2, 3, 0, 1],
    };
    let key = |i: usize| {
        let f = fitness[i];
        if f.is_nan() {
            f64::NEG_INFINITY
        } else {
            f
        }
    };
    order.sort_by(|&x, &y| key(y).total_cmp(&key(x)));
    [order[0], order[1]]
}

/// Maps survivors onto the pair's two slots. Members of the 4-uple belong to
/// slot `index % 2` (a parent and the child derived from it share a slot);
/// when both survivors share a slot, the better one keeps it.
fn placement(survivors: [usize; 2]) -> [usize; 2] {
    let [best, second] = survivors;
    if best % 2 == 0 {
        [best, second]
    } else {
        [second, best]
    }
}

/// Runs one generation: random pairing, reproduction, and best-2-of-4 selection.
///
/// `fitness` receives the population slot the candidate competes for, the
/// candidate, and a dedicated random stream.
pub fn evolve_generation<F>(pop: &Population, fitness: &F, cfg: &GeneticConfig) -> Result<Evolved>
where
    F: Fn(usize, &WeightedAutomaton, &mut StreamRng) -> f64 + Sync,
{
    if pop.len() < 2 || !pop.len().is_multiple_of(2) {
        return Err(Error::Config(format!(
            "population size must be even and at least 2, got {}",
            pop.len()
        )));
    }
    let n = pop.members()[0].n();
    cfg.validate(n)?;
    let generation = pop.generation();
    let seed = cfg.rng_seed;

    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.shuffle(&mut substream(seed, generation, streams::PAIRING));
    let pairs: Vec<[usize; 2]> = order.chunks(2).map(|c| [c[0], c[1]]).collect();

    let results: Vec<(TupleReport, [WeightedAutomaton; 2])> = pairs
        .par_iter()
        .enumerate()
        .map(|(p, &[sa, sb])| {
            let a = &pop.members()[sa];
            let b = &pop.members()[sb];
            let mut ops = substream(seed, generation, streams::pair_operators(p));
            let rows = cfg.draw_crossover_rows(n, &mut ops);
            let (ca, cb) = crossover(&duplicate(a), &duplicate(b), &rows)?;
            let ca = mutate(&ca, cfg, &mut ops);
            let cb = mutate(&cb, cfg, &mut ops);

            let tuple = [a, b, &ca, &cb];
            let slot_of = [sa, sb, sa, sb];
            let mut scores = [0.0; 4];
            for (m, cand) in tuple.iter().enumerate() {
                let mut rng = substream(seed, generation, streams::pair_fitness(p, m));
                scores[m] = fitness(slot_of[m], cand, &mut rng);
            }
            let survivors = rank(&scores, cfg.selection_tiebreak);
            let [pa, pb] = placement(survivors);
            let report = TupleReport {
                slots: [sa, sb],
                fitness: scores,
                survivors,
            };
            Ok((report, [tuple[pa].clone(), tuple[pb].clone()]))
        })
        .collect::<Result<_>>()?;

    let mut members: Vec<Option<WeightedAutomaton>> = vec![None; pop.len()];
    let mut tuples = Vec::with_capacity(results.len());
    for (report, [x, y]) in results {
        members[report.slots[0]] = Some(x);
        members[report.slots[1]] = Some(y);
        tuples.push(report);
    }
    let members = members
        .into_iter()
        .map(|m| m.expect("pairing covers every slot"))
        .collect();
    Ok(Evolved {
        population: Population::at_generation(members, generation + 1)?,
        tuples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{automaton_distance, STOCHASTIC_TOLERANCE};
    use proptest::prelude::*;
    use rand::Rng;

    fn stochastic_automaton(seed: u64, n: usize, k: usize) -> WeightedAutomaton {
        let mut rng = substream(seed, 0, 0);
        let cfg = GeneticConfig::stochastic(seed);
        let row = |rng: &mut StreamRng| {
            sample_row(
                cfg.mutation_row_sampler,
                true,
                SemiringKind::Real,
                &vec![0.0; n],
                rng,
            )
        };
        let entry = row(&mut rng);
        let final_costs: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let trans: Vec<Vec<Vec<f64>>> = (0..k)
            .map(|_| (0..n).map(|_| row(&mut rng)).collect())
            .collect();
        let alphabet: Vec<String> = (0..k).map(|i| format!("l{i}")).collect();
        WeightedAutomaton::from_rows(SemiringKind::Real, alphabet, entry, final_costs, &trans)
            .unwrap()
    }

    fn two_state(t_c: [[f64; 2]; 2]) -> WeightedAutomaton {
        WeightedAutomaton::from_rows(
            SemiringKind::Real,
            ["C", "D"],
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            &[
                t_c.iter().map(|r| r.to_vec()).collect(),
                vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            ],
        )
        .unwrap()
    }

    #[test]
    fn duplicate_is_an_independent_copy() {
        let a = stochastic_automaton(1, 3, 2);
        let d = duplicate(&a);
        assert_eq!(automaton_distance(&a, &d, 2.0).unwrap(), 0.0);
        assert_eq!(
            a.vectorize()
                .iter()
                .map(|x| x.to_bits())
                .collect::<Vec<_>>(),
            d.vectorize()
                .iter()
                .map(|x| x.to_bits())
                .collect::<Vec<_>>()
        );
        let before = a.clone();
        let _mutated = mutate(&d, &GeneticConfig::stochastic(3), &mut substream(3, 0, 0));
        assert_eq!(a, before);
    }

    #[test]
    fn crossover_examples() {
        let a = two_state([[1.0, 0.0], [0.0, 1.0]]);
        let b = two_state([[0.0, 1.0], [1.0, 0.0]]);

        let (ca, cb) = crossover(&a, &b, &[0]).unwrap();
        assert_eq!(
            ca.transitions()[0].to_rows(),
            vec![vec![0.0, 1.0], vec![0.0, 1.0]]
        );
        assert_eq!(
            cb.transitions()[0].to_rows(),
            vec![vec![1.0, 0.0], vec![1.0, 0.0]]
        );

        let (ca, cb) = crossover(&a, &b, &[]).unwrap();
        assert_eq!((ca, cb), (a.clone(), b.clone()));

        let (ca, cb) = crossover(&a, &b, &[0, 1]).unwrap();
        assert_eq!(ca.transitions(), b.transitions());
        assert_eq!(cb.transitions(), a.transitions());
        assert_eq!(ca.entry(), a.entry());
        assert_eq!(cb.final_costs(), b.final_costs());
    }

    #[test]
    fn crossover_errors() {
        let a = two_state([[1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(crossover(&a, &a, &[2]), Err(Error::Parameter(_))));
        let other = stochastic_automaton(4, 3, 2);
        assert!(matches!(
            crossover(&a, &other, &[0]),
            Err(Error::Incomparable(_))
        ));
    }

    #[test]
    fn stochastic_mutation_rows_stay_on_simplex() {
        let cfg = GeneticConfig::stochastic(9);
        let mut rng = substream(9, 0, 0);
        let mut a = stochastic_automaton(5, 4, 3);
        for _ in 0..200 {
            a = mutate(&a, &cfg, &mut rng);
            assert!(a.is_stochastic(STOCHASTIC_TOLERANCE));
        }
    }

    #[test]
    fn mutation_changes_one_row_per_letter() {
        let cfg = GeneticConfig::stochastic(0);
        let a = stochastic_automaton(11, 4, 3);
        for seed in 0..50 {
            let b = mutate(&a, &cfg, &mut substream(seed, 0, 0));
            for (ma, mb) in a.transitions().iter().zip(b.transitions()) {
                let differing = (0..4).filter(|&r| ma.row(r) != mb.row(r)).count();
                assert_eq!(differing, 1);
            }
            assert_eq!(a.entry(), b.entry());
            assert_eq!(a.final_costs(), b.final_costs());
        }
    }

    #[test]
    fn mutation_is_reproducible() {
        let cfg = GeneticConfig::default();
        let a = stochastic_automaton(2, 3, 2);
        let x = mutate(&a, &cfg, &mut substream(77, 3, 5));
        let y = mutate(&a, &cfg, &mut substream(77, 3, 5));
        assert_eq!(
            x.vectorize()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>(),
            y.vectorize()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn keep_sampler_is_a_no_op() {
        let cfg = GeneticConfig {
            mutation_row_sampler: RowSampler::Keep,
            ..GeneticConfig::default()
        };
        let a = stochastic_automaton(2, 3, 2);
        assert_eq!(mutate(&a, &cfg, &mut substream(1, 0, 0)), a);
    }

    #[test]
    fn random_crossover_rows_are_proper_subsets() {
        let cfg = GeneticConfig::default();
        let mut rng = substream(0, 0, 0);
        for n in 2..6 {
            for _ in 0..100 {
                let rows = cfg.draw_crossover_rows(n, &mut rng);
                assert!(!rows.is_empty() && rows.len() < n);
                assert!(rows.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(cfg.draw_crossover_rows(1, &mut rng), vec![0]);
        let fixed = GeneticConfig {
            crossover_row_count: CrossoverRows::Fixed(2),
            ..cfg
        };
        assert_eq!(fixed.draw_crossover_rows(5, &mut rng).len(), 2);
        assert!(fixed.validate(1).is_err());
    }

    #[test]
    fn odd_population_is_rejected() {
        let a = stochastic_automaton(1, 2, 2);
        assert!(matches!(
            Population::new(vec![a.clone(), a.clone(), a]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn constant_fitness_keeps_parents() {
        let members: Vec<_> = (0..8).map(|s| stochastic_automaton(s, 3, 2)).collect();
        let pop = Population::new(members.clone()).unwrap();
        let out = evolve_generation(
            &pop,
            &|_, _: &WeightedAutomaton, _: &mut StreamRng| 1.0,
            &GeneticConfig::stochastic(5),
        )
        .unwrap();
        assert_eq!(out.population.members(), members.as_slice());
        assert_eq!(out.population.generation(), 1);
    }

    #[test]
    fn degenerate_operators_echo_population() {
        let a = stochastic_automaton(3, 2, 2);
        let pop = Population::new(vec![a.clone(), a.clone()]).unwrap();
        let cfg = GeneticConfig {
            mutation_row_sampler: RowSampler::Keep,
            ..GeneticConfig::stochastic(1)
        };
        let out = evolve_generation(
            &pop,
            &|_, x: &WeightedAutomaton, _: &mut StreamRng| x.entry()[0],
            &cfg,
        )
        .unwrap();
        assert_eq!(out.population.members(), pop.members());
    }

    #[test]
    fn prefer_children_replaces_parents_on_ties() {
        let members: Vec<_> = (0..4).map(|s| stochastic_automaton(s, 3, 2)).collect();
        let pop = Population::new(members.clone()).unwrap();
        let cfg = GeneticConfig {
            selection_tiebreak: TieBreak::PreferChildren,
            ..GeneticConfig::stochastic(5)
        };
        let out = evolve_generation(
            &pop,
            &|_, _: &WeightedAutomaton, _: &mut StreamRng| 0.0,
            &cfg,
        )
        .unwrap();
        for t in &out.tuples {
            assert_eq!(t.survivors, [2, 3]);
        }
        assert_ne!(out.population.members(), members.as_slice());
    }

    #[test]
    fn child_keeps_its_parents_slot() {
        // Survivors from different lineages go back to their own slot.
        assert_eq!(placement([3, 0]), [0, 3]);
        assert_eq!(placement([1, 2]), [2, 1]);
        // Same lineage: the better one keeps the slot.
        assert_eq!(placement([2, 0]), [2, 0]);
        assert_eq!(placement([1, 3]), [3, 1]);
    }

    #[test]
    fn survivor_fitness_follows_placement() {
        let members: Vec<_> = (0..6).map(|s| stochastic_automaton(s, 2, 2)).collect();
        let pop = Population::new(members).unwrap();
        let fit = |_: usize, a: &WeightedAutomaton, _: &mut StreamRng| a.transitions()[0].get(0, 0);
        let out = evolve_generation(&pop, &fit, &GeneticConfig::stochastic(8)).unwrap();
        let measured = out.survivor_fitness();
        for (m, f) in out.population.members().iter().zip(measured) {
            assert_eq!(m.transitions()[0].get(0, 0), f);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn operators_preserve_shape_and_stochasticity(seed in any::<u64>(), n in 1usize..5, k in 1usize..4, steps in 1usize..6) {
            let cfg = GeneticConfig::stochastic(seed);
            let mut rng = substream(seed, 0, 1);
            let mut a = stochastic_automaton(seed, n, k);
            let mut b = stochastic_automaton(seed.wrapping_add(1), n, k);
            for _ in 0..steps {
                let rows = cfg.draw_crossover_rows(n, &mut rng);
                let (x, y) = crossover(&a, &b, &rows).unwrap();
                a = mutate(&x, &cfg, &mut rng);
                b = mutate(&y, &cfg, &mut rng);
                for c in [&a, &b] {
                    prop_assert_eq!(c.n(), n);
                    prop_assert_eq!(c.alphabet().len(), k);
                    prop_assert_eq!(c.semiring(), SemiringKind::Real);
                    prop_assert!(c.is_stochastic(STOCHASTIC_TOLERANCE));
                }
            }
        }

        #[test]
        fn generations_are_elitist_and_deterministic(seed in any::<u64>()) {
            let members: Vec<_> = (0..8).map(|s| stochastic_automaton(seed ^ s, 3, 2)).collect();
            let cfg = GeneticConfig::stochastic(seed);
            let fit = |_: usize, a: &WeightedAutomaton, _: &mut StreamRng| a.transitions()[1].get(2, 0) - a.transitions()[0].get(0, 1);
            let mut pop = Population::new(members).unwrap();
            let best = |p: &Population| p.members().iter().map(|a| fit(0, a, &mut substream(0, 0, 0))).fold(f64::MIN, f64::max);
            for _ in 0..5 {
                let out = evolve_generation(&pop, &fit, &cfg).unwrap();
                let again = evolve_generation(&pop, &fit, &cfg).unwrap();
                prop_assert_eq!(&out.population, &again.population);
                for t in &out.tuples {
                    prop_assert!(t.survivor_max() >= t.parent_max());
                }
                prop_assert!(best(&out.population) >= best(&pop));
                pop = out.population;
            }
        }
    }
}
