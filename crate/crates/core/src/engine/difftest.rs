//! Differential testing of a program against a from-scratch oracle on
//! pseudorandom modification sequences.
//!
//! Randomness: sequence `i` of a run with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`, so sequences are
//! independent of each other and of the sequence count.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EngineError, Executor, ProgramState, UpdateKind};
use crate::logic::{static_eval, Formula};
use crate::structure::{tuples_over, Elem, ModKind, Modification, Schema, Structure, TupleSet};
use crate::DynamicProgram;

#[derive(Clone, Debug, PartialEq)]
pub struct DifftestConfig {
    /// Domain size.
    pub n: usize,
    pub sequences: usize,
    /// Modifications per sequence.
    pub length: usize,
    pub seed: u64,
    /// Probability that a tuple is present in the initial database.
    pub initial_density: f64,
    /// Probability that a modification repeats an earlier one of the same
    /// sequence.
    pub duplicate_rate: f64,
}

impl DifftestConfig {
    pub fn new(n: usize, sequences: usize, length: usize, seed: u64) -> Self {
        DifftestConfig {
            n,
            sequences,
            length,
            seed,
            initial_density: 0.1,
            duplicate_rate: 0.25,
        }
    }

    /// Start every sequence from the empty database.
    pub fn from_empty(mut self) -> Self {
        self.initial_density = 0.0;
        self
    }

    pub fn rng(&self, sequence: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(sequence as u64);
        rng
    }
}

/// The from-scratch answer a program is compared against.
pub trait Oracle {
    /// Called before each sequence.
    fn reset(&mut self) {}

    /// Expected query relation on the current input, or `None` to exclude
    /// this prefix from comparison.
    fn expected(&mut self, input: &Structure) -> Option<TupleSet>;

    /// Extra invariant on the reached state; an error counts as a mismatch.
    fn check_state(&mut self, _state: &ProgramState) -> Result<(), String> {
        Ok(())
    }
}

/// Compares a boolean query relation with the value of a sentence.
pub struct SentenceOracle {
    sentence: Formula,
}

impl SentenceOracle {
    pub fn new(sentence: Formula) -> Self {
        SentenceOracle { sentence }
    }
}

impl Oracle for SentenceOracle {
    fn expected(&mut self, input: &Structure) -> Option<TupleSet> {
        let mut out = TupleSet::new(input.size(), 0);
        if static_eval(input, &self.sentence).expect("sentence checked before the run") {
            out.insert(&[]);
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub sequence: usize,
    /// Number of modifications applied when the divergence was seen.
    pub prefix: usize,
    pub initial: Structure,
    pub modifications: Vec<Modification>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DifftestReport {
    pub sequences: usize,
    /// Prefixes compared against the oracle.
    pub checks: usize,
    /// Compared prefixes on which the expected query relation was non-empty.
    pub positives: usize,
    /// Prefixes the oracle excluded.
    pub excluded: usize,
    /// First mismatch of each failing sequence.
    pub mismatches: Vec<Mismatch>,
}

impl DifftestReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Plain-text report; mismatch inputs are listed with labels.
    pub fn render(&self) -> String {
        let mut out = format!(
            "sequences {}\nchecks {}\npositives {}\nexcluded {}\nmismatches {}\n",
            self.sequences,
            self.checks,
            self.positives,
            self.excluded,
            self.mismatches.len()
        );
        for m in &self.mismatches {
            out.push_str(&format!(
                "mismatch sequence {} prefix {}: {}\n",
                m.sequence, m.prefix, m.detail
            ));
            for (name, _) in m.initial.schema().relations() {
                let tuples: Vec<String> = m
                    .initial
                    .relation(name)
                    .unwrap()
                    .iter()
                    .map(|t| m.initial.render_tuple(&t))
                    .collect();
                out.push_str(&format!("  initial {name} = {{{}}}\n", tuples.join(", ")));
            }
            for (i, md) in m.modifications.iter().enumerate() {
                out.push_str(&format!("  {} {}\n", i + 1, md.render(&m.initial)));
            }
        }
        out
    }
}

/// A random database over `schema` with labels `a0, a1, ...`: every tuple is
/// present with probability `density`; constants are uniform.
pub fn random_database(schema: &Schema, n: usize, density: f64, rng: &mut impl Rng) -> Structure {
    let labels: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let mut s = Structure::new(schema.clone(), labels).expect("labels are distinct");
    let elems: Vec<Elem> = s.elements().collect();
    for (name, arity) in schema.relations() {
        for t in tuples_over(&elems, *arity) {
            if density > 0.0 && rng.gen_bool(density) {
                s.insert(name, &t).unwrap();
            }
        }
    }
    for (name, arity) in schema.functions() {
        for args in tuples_over(&elems, *arity) {
            let v = elems[rng.gen_range(0..n)];
            s.set_function(name, &args, v).unwrap();
        }
    }
    s
}

/// A random modification of a supported kind over `elems`.
///
/// With probability `duplicate_rate` an earlier modification from `history`
/// is repeated. Deletions prefer present tuples so that they usually take
/// effect.
pub fn random_modification(
    input: &Structure,
    supported: &[UpdateKind],
    elems: &[Elem],
    history: &[Modification],
    duplicate_rate: f64,
    rng: &mut impl Rng,
) -> Modification {
    if !history.is_empty() && rng.gen_bool(duplicate_rate) {
        return history.choose(rng).unwrap().clone();
    }
    let kind = supported.choose(rng).expect("program supports some kind");
    let arity = input.schema().relation(&kind.relation).unwrap().1;
    if kind.kind == ModKind::Del && rng.gen_bool(0.8) {
        let present: Vec<Vec<Elem>> = input
            .relation(&kind.relation)
            .unwrap()
            .iter()
            .filter(|t| t.iter().all(|e| elems.contains(e)))
            .collect();
        if let Some(t) = present.choose(rng) {
            return Modification::del(&kind.relation, t);
        }
    }
    let tuple: Vec<Elem> = (0..arity).map(|_| *elems.choose(rng).unwrap()).collect();
    Modification {
        kind: kind.kind,
        relation: kind.relation.clone(),
        tuple,
    }
}

/// Runs `cfg.sequences` random sequences and compares the query relation
/// with the oracle after every prefix, including the empty one.
///
/// `prepare` may adjust each freshly generated input database (e.g. to pin
/// a domain split) and returns the elements modifications may touch.
pub fn difftest_with(
    p: &DynamicProgram,
    oracle: &mut dyn Oracle,
    cfg: &DifftestConfig,
    prepare: &dyn Fn(&mut Structure, &mut ChaCha8Rng) -> Vec<Elem>,
) -> Result<DifftestReport, EngineError> {
    let ex = Executor::new(p)?;
    let mut report = DifftestReport {
        sequences: cfg.sequences,
        ..Default::default()
    };
    for seq in 0..cfg.sequences {
        let mut rng = cfg.rng(seq);
        let mut input = random_database(&p.input, cfg.n, cfg.initial_density, &mut rng);
        let elems = prepare(&mut input, &mut rng);
        let initial = input.clone();
        oracle.reset();
        let mut state = ex.init(&input)?;
        let mut history: Vec<Modification> = Vec::new();
        for prefix in 0..=cfg.length {
            if prefix > 0 {
                let current = state.input();
                let m = random_modification(
                    &current,
                    &p.supported,
                    &elems,
                    &history,
                    cfg.duplicate_rate,
                    &mut rng,
                );
                state = ex.step(&state, &m)?;
                history.push(m);
            }
            let detail = match oracle.check_state(&state) {
                Err(e) => Some(e),
                Ok(()) => match oracle.expected(&state.input()) {
                    None => {
                        report.excluded += 1;
                        None
                    }
                    Some(expected) => {
                        report.checks += 1;
                        if !expected.is_empty() {
                            report.positives += 1;
                        }
                        let actual = state.query_relation();
                        (*actual != expected).then(|| {
                            format!(
                                "expected {}, program has {}",
                                render_set(&initial, &expected),
                                render_set(&initial, actual)
                            )
                        })
                    }
                },
            };
            if let Some(detail) = detail {
                report.mismatches.push(Mismatch {
                    sequence: seq,
                    prefix,
                    initial: initial.clone(),
                    modifications: history.clone(),
                    detail,
                });
                break;
            }
        }
    }
    Ok(report)
}

fn render_set(s: &Structure, t: &TupleSet) -> String {
    if t.arity() == 0 {
        return t.contains(&[]).to_string();
    }
    let parts: Vec<String> = t.iter().map(|x| s.render_tuple(&x)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Differential test of a boolean program against a sentence over its
/// input schema.
pub fn difftest(
    p: &DynamicProgram,
    sentence: &Formula,
    cfg: &DifftestConfig,
) -> Result<DifftestReport, EngineError> {
    let probe = Structure::new(p.input.clone(), ["a0"]).map_err(EngineError::from)?;
    static_eval(&probe, sentence)?;
    if p.aux.relation(&p.query).map(|(_, a)| a) != Some(0) {
        return Err(EngineError::InvalidProgram(
            "difftest against a sentence needs a boolean query".into(),
        ));
    }
    let mut oracle = SentenceOracle::new(sentence.clone());
    difftest_with(p, &mut oracle, cfg, &|s, _| s.elements().collect())
}
