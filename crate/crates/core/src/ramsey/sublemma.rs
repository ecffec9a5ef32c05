//! Substructure-lemma checker for quantifier-free programs without
//! auxiliary functions, and the random instances it is exercised on.
//!
//! Claim under test: if the substructures induced by `A` in state `S` and
//! by `B` in state `T` are isomorphic via `π`, then after running
//! `π`-respecting modification sequences on `A` and `B` they are still
//! isomorphic via `π`, and boolean queries agree.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{
    random_database, EngineError, Executor, Initializer, ProgramState, UpdateKind, UpdateRule,
};
use crate::logic::{Formula, Term};
use crate::structure::{
    induced_substructure_with_map, is_isomorphism, Elem, Modification, Schema, Structure,
    StructureError,
};
use crate::DynamicProgram;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Debug, Error)]
pub enum SublemmaError {
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("sequences do not respect the bijection: {0}")]
    NotRespecting(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// One program step; the checker is generic in it so that faulty steppers
/// can serve as mutation controls.
pub type Stepper<'a> = dyn Fn(&ProgramState, &Modification) -> Result<ProgramState, EngineError> + 'a;

/// The bijection `a[i] -> b[i]`.
pub(crate) fn bijection(a: &[Elem], b: &[Elem]) -> Result<BTreeMap<Elem, Elem>, SublemmaError> {
    if a.len() != b.len() {
        return Err(SublemmaError::Hypothesis("the two subsets differ in size".into()));
    }
    let pi: BTreeMap<Elem, Elem> = a.iter().copied().zip(b.iter().copied()).collect();
    let image: BTreeSet<Elem> = pi.values().copied().collect();
    if pi.len() != a.len() || image.len() != b.len() {
        return Err(SublemmaError::Hypothesis("the subsets list repeated elements".into()));
    }
    Ok(pi)
}

/// Whether `pi` is an isomorphism between the substructures induced by its
/// domain in `s` and by its image in `t`.
pub fn restricted_isomorphism(
    s: &Structure,
    t: &Structure,
    pi: &BTreeMap<Elem, Elem>,
) -> Result<bool, StructureError> {
    let (sa, old_a) = induced_substructure_with_map(s, &pi.keys().copied().collect())?;
    let (tb, old_b) = induced_substructure_with_map(t, &pi.values().copied().collect())?;
    let pos: BTreeMap<Elem, Elem> = old_b.iter().enumerate().map(|(i, e)| (*e, Elem::from(i))).collect();
    let map: Vec<Elem> = old_a.iter().map(|e| pos[&pi[e]]).collect();
    Ok(is_isomorphism(&sa, &tb, &map))
}

pub(crate) fn check_respecting(
    pi: &BTreeMap<Elem, Elem>,
    alpha: &[Modification],
    beta: &[Modification],
) -> Result<(), SublemmaError> {
    if alpha.len() != beta.len() {
        return Err(SublemmaError::NotRespecting("sequences differ in length".into()));
    }
    for (i, (x, y)) in alpha.iter().zip(beta).enumerate() {
        let mapped: Option<Vec<Elem>> = x.tuple.iter().map(|e| pi.get(e).copied()).collect();
        let ok = x.kind == y.kind && x.relation == y.relation && mapped.as_deref() == Some(&y.tuple[..]);
        if !ok {
            return Err(SublemmaError::NotRespecting(format!("modification {} differs", i + 1)));
        }
    }
    Ok(())
}

pub(crate) fn run_with(
    stepper: &Stepper<'_>,
    state: &ProgramState,
    ms: &[Modification],
) -> Result<ProgramState, EngineError> {
    let mut s = state.clone();
    for m in ms {
        s = stepper(&s, m)?;
    }
    Ok(s)
}

fn query_bits(p: &DynamicProgram, s: &ProgramState, t: &ProgramState) -> Option<(bool, bool)> {
    (p.aux.relation(&p.query)?.1 == 0).then(|| (s.query_bit(), t.query_bit()))
}

/// Checks the substructure lemma on one instance with the reference
/// engine. `a[i]` is mapped to `b[i]`; both lists must include the
/// constants.
pub fn check_substructure_lemma(
    p: &DynamicProgram,
    s: &ProgramState,
    t: &ProgramState,
    a: &[Elem],
    b: &[Elem],
    alpha: &[Modification],
    beta: &[Modification],
) -> Result<Verdict, SublemmaError> {
    let ex = Executor::new(p)?;
    check_substructure_lemma_with(p, &|st, m| ex.step(st, m), s, t, a, b, alpha, beta)
}

/// [`check_substructure_lemma`] with an explicit stepper.
#[allow(clippy::too_many_arguments)]
pub fn check_substructure_lemma_with(
    p: &DynamicProgram,
    stepper: &Stepper<'_>,
    s: &ProgramState,
    t: &ProgramState,
    a: &[Elem],
    b: &[Elem],
    alpha: &[Modification],
    beta: &[Modification],
) -> Result<Verdict, SublemmaError> {
    if !p.is_dynprop() {
        return Err(SublemmaError::Hypothesis("program has auxiliary functions".into()));
    }
    let pi = bijection(a, b)?;
    if !restricted_isomorphism(s.structure(), t.structure(), &pi)? {
        return Err(SublemmaError::Hypothesis("substructures are not isomorphic via the bijection".into()));
    }
    check_respecting(&pi, alpha, beta)?;
    let s2 = run_with(stepper, s, alpha)?;
    let t2 = run_with(stepper, t, beta)?;
    if !restricted_isomorphism(s2.structure(), t2.structure(), &pi)? {
        return Ok(Verdict::Violated(format!(
            "after {} modifications the substructures are no longer isomorphic via the bijection",
            alpha.len()
        )));
    }
    if let Some((x, y)) = query_bits(p, &s2, &t2) {
        if x != y {
            return Ok(Verdict::Violated(format!("query bits differ: {x} vs {y}")));
        }
    }
    Ok(Verdict::Holds)
}

/// A deliberately faulty stepper: after a correct step, every auxiliary
/// relation is re-read with element indices shifted by one (mod n), so
/// that updates leak information from outside the modified substructure.
pub fn index_shifting_step(
    ex: &Executor<'_>,
    state: &ProgramState,
    m: &Modification,
) -> Result<ProgramState, EngineError> {
    let mut next = ex.step(state, m)?;
    let n = next.structure().size() as u32;
    let aux: Vec<String> = ex.program().aux.relations().iter().map(|(r, _)| r.clone()).collect();
    let before = next.structure().clone();
    let s = next.structure_mut();
    for r in aux {
        let tuples: Vec<Vec<Elem>> = before.relation(&r).unwrap().iter().collect();
        for t in &tuples {
            s.remove(&r, t)?;
        }
        for t in &tuples {
            let shifted: Vec<Elem> = t.iter().map(|e| Elem((e.0 + 1) % n)).collect();
            s.insert(&r, &shifted)?;
        }
    }
    Ok(next)
}

/// Shape of randomly generated programs.
#[derive(Clone, Debug)]
pub struct RandomProgramSpec {
    pub input: Schema,
    /// Arities of the auxiliary relations besides the 0-ary query `Q`.
    pub aux_arities: Vec<usize>,
    /// Nesting depth of the boolean connectives in update formulas.
    pub depth: usize,
    pub deletions: bool,
}

impl RandomProgramSpec {
    pub fn graph(aux_arities: &[usize]) -> Self {
        RandomProgramSpec {
            input: Schema::graph(),
            aux_arities: aux_arities.to_vec(),
            depth: 3,
            deletions: true,
        }
    }
}

/// Random quantifier-free formulas whose atoms draw their arguments from
/// `term`.
pub(crate) struct FormulaGen<'a> {
    pub schema: &'a Schema,
    pub term: &'a dyn Fn(&mut ChaCha8Rng) -> Term,
}

impl FormulaGen<'_> {
    pub fn atom(&self, rng: &mut ChaCha8Rng) -> Formula {
        let rels = self.schema.relations();
        if rels.is_empty() || rng.gen_bool(0.2) {
            return Formula::eq((self.term)(rng), (self.term)(rng));
        }
        let (name, arity) = &rels[rng.gen_range(0..rels.len())];
        Formula::rel(name, (0..*arity).map(|_| (self.term)(rng)).collect())
    }

    pub fn formula(&self, rng: &mut ChaCha8Rng, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            return self.atom(rng);
        }
        match rng.gen_range(0..3) {
            0 => Formula::not(self.formula(rng, depth - 1)),
            1 => Formula::And(vec![self.formula(rng, depth - 1), self.formula(rng, depth - 1)]),
            _ => Formula::Or(vec![self.formula(rng, depth - 1), self.formula(rng, depth - 1)]),
        }
    }
}

pub(crate) fn supported_kinds(input: &Schema, deletions: bool) -> Vec<UpdateKind> {
    let mut out = Vec::new();
    for (r, _) in input.relations() {
        out.push(UpdateKind::ins(r));
        if deletions {
            out.push(UpdateKind::del(r));
        }
    }
    out
}

pub(crate) fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// A random quantifier-free program with 0-ary query `Q` and auxiliary
/// relations `R1, R2, ...` of the given arities.
pub fn random_dynprop_program(spec: &RandomProgramSpec, rng: &mut ChaCha8Rng) -> DynamicProgram {
    let mut aux = Schema::new().with_relation("Q", 0);
    for (i, a) in spec.aux_arities.iter().enumerate() {
        aux.add_relation(&format!("R{}", i + 1), *a).unwrap();
    }
    let combined = spec.input.union(&aux).expect("aux names are fresh");
    let supported = supported_kinds(&spec.input, spec.deletions);
    let mut rules = Vec::new();
    for kind in &supported {
        let in_arity = spec.input.relation(&kind.relation).unwrap().1;
        let params = names("p", in_arity);
        for (sym, arity) in aux.relations() {
            let targets = names("y", *arity);
            let mut pool: Vec<Term> = params.iter().chain(&targets).map(|v| Term::var(v)).collect();
            pool.extend(spec.input.constants().map(Term::constant));
            if pool.is_empty() {
                pool.push(Term::var("p"));
            }
            let term = |r: &mut ChaCha8Rng| pool[r.gen_range(0..pool.len())].clone();
            let gen = FormulaGen { schema: &combined, term: &term };
            let body = gen.formula(rng, spec.depth);
            let p: Vec<&str> = params.iter().map(String::as_str).collect();
            let t: Vec<&str> = targets.iter().map(String::as_str).collect();
            rules.push(UpdateRule::formula(sym, kind.clone(), &p, &t, body));
        }
    }
    let p = DynamicProgram {
        input: spec.input.clone(),
        aux,
        rules,
        initializer: Initializer::Empty,
        query: "Q".into(),
        supported,
    };
    debug_assert!(p.validate().is_ok(), "{:?}", p.validate());
    p
}

/// A random state of `p` over `n` elements: every auxiliary and input
/// tuple present with probability `density`, functions uniform.
pub fn random_state(p: &DynamicProgram, n: usize, density: f64, rng: &mut impl Rng) -> ProgramState {
    let schema = p.combined_schema().expect("valid program");
    ProgramState::from_structure(p, random_database(&schema, n, density, rng)).expect("schema matches")
}

/// One random instance of the lemma's hypothesis.
#[derive(Clone, Debug)]
pub struct LemmaInstance {
    pub s: ProgramState,
    pub t: ProgramState,
    pub a: Vec<Elem>,
    pub b: Vec<Elem>,
    pub alpha: Vec<Modification>,
    pub beta: Vec<Modification>,
}

/// Random states `S`, `T`, subsets `A`, `B` (containing the constants)
/// whose induced substructures are made isomorphic via a random bijection,
/// and random respecting sequences of length at most `max_len`.
pub fn random_lemma_instance(p: &DynamicProgram, max_len: usize, rng: &mut impl Rng) -> LemmaInstance {
    let (ns, nt) = (rng.gen_range(3..=7), rng.gen_range(3..=7));
    let s = random_state(p, ns, 0.3, rng);
    let mut t = random_state(p, nt, 0.3, rng);
    let consts_s: BTreeSet<Elem> = s.structure().constant_values().into_iter().collect();
    let size = rng.gen_range(consts_s.len().max(1)..=ns.min(nt).max(consts_s.len()));
    let mut a: Vec<Elem> = consts_s.iter().copied().collect();
    let mut rest: Vec<Elem> = s.structure().elements().filter(|e| !consts_s.contains(e)).collect();
    rest.shuffle(rng);
    a.extend(rest.into_iter().take(size.saturating_sub(a.len())));
    a.shuffle(rng);
    let mut pool: Vec<Elem> = t.structure().elements().collect();
    pool.shuffle(rng);
    let b: Vec<Elem> = pool.into_iter().take(a.len()).collect();
    let pi: BTreeMap<Elem, Elem> = a.iter().copied().zip(b.iter().copied()).collect();
    let inv: BTreeMap<Elem, Elem> = pi.iter().map(|(x, y)| (*y, *x)).collect();
    {
        let schema = s.structure().schema().clone();
        let ts = t.structure_mut();
        for c in schema.constants() {
            ts.set_constant(c, pi[&s.structure().constant(c).unwrap()]).unwrap();
        }
        for (r, arity) in schema.relations() {
            for tuple in crate::structure::tuples_over(&b, *arity) {
                let pre: Vec<Elem> = tuple.iter().map(|e| inv[e]).collect();
                if s.structure().holds(r, &pre).unwrap() {
                    ts.insert(r, &tuple).unwrap();
                } else {
                    ts.remove(r, &tuple).unwrap();
                }
            }
        }
    }
    let len = rng.gen_range(0..=max_len);
    let mut alpha = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = p.supported.choose(rng).expect("some kind supported");
        let arity = p.input.relation(&kind.relation).unwrap().1;
        let tuple: Vec<Elem> = (0..arity).map(|_| *a.choose(rng).unwrap()).collect();
        alpha.push(Modification {
            kind: kind.kind,
            relation: kind.relation.clone(),
            tuple,
        });
    }
    let beta = alpha.iter().map(|m| m.map(|e| pi[&e])).collect();
    LemmaInstance { s, t, a, b, alpha, beta }
}

/// Outcome of a seeded campaign.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub trials: usize,
    pub holds: usize,
    /// `(trial, detail)` for each violation.
    pub violations: Vec<(usize, String)>,
}

impl SuiteReport {
    pub fn render(&self) -> String {
        let mut out = format!("trials {}\nholds {}\nviolations {}\n", self.trials, self.holds, self.violations.len());
        for (i, d) in &self.violations {
            out.push_str(&format!("violation trial {i}: {d}\n"));
        }
        out
    }
}

/// Which stepper a campaign uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepMode {
    Reference,
    IndexShifting,
}

fn random_spec(rng: &mut ChaCha8Rng) -> RandomProgramSpec {
    let mut input = Schema::graph();
    if rng.gen_bool(0.3) {
        input.add_relation("U", 1).unwrap();
    }
    if rng.gen_bool(0.3) {
        input.add_constant("s").unwrap();
    }
    let aux: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..=2)).collect();
    RandomProgramSpec {
        input,
        aux_arities: aux,
        depth: rng.gen_range(1..=3),
        deletions: rng.gen_bool(0.5),
    }
}

/// Runs `trials` random instances of the lemma; trial `i` draws from stream
/// `i` of `ChaCha8Rng::seed_from_u64(seed)`.
pub fn substructure_lemma_suite(trials: usize, seed: u64, mode: StepMode) -> SuiteReport {
    let mut report = SuiteReport {
        trials,
        ..Default::default()
    };
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let spec = random_spec(&mut rng);
        let p = random_dynprop_program(&spec, &mut rng);
        let inst = random_lemma_instance(&p, 8, &mut rng);
        let ex = Executor::new(&p).expect("generated programs are valid");
        let stepper = |st: &ProgramState, m: &Modification| match mode {
            StepMode::Reference => ex.step(st, m),
            StepMode::IndexShifting => index_shifting_step(&ex, st, m),
        };
        let verdict = check_substructure_lemma_with(
            &p, &stepper, &inst.s, &inst.t, &inst.a, &inst.b, &inst.alpha, &inst.beta,
        );
        match verdict {
            Ok(Verdict::Holds) => report.holds += 1,
            Ok(Verdict::Violated(d)) => report.violations.push((trial, d)),
            Err(e) => report.violations.push((trial, format!("checker error: {e}"))),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::builtins;

    #[test]
    fn empty_sequences_hold() {
        let p = builtins::three_clique();
        let g = Structure::graph(&["a", "b", "c", "d"], &[("a", "b")]).unwrap();
        let s = Executor::new(&p).unwrap().init(&g).unwrap();
        let v = check_substructure_lemma(&p, &s, &s, &[Elem(2), Elem(3)], &[Elem(3), Elem(2)], &[], &[]).unwrap();
        assert!(v.holds());
        // (a,b) carries an edge, (c,d) does not
        let err = check_substructure_lemma(&p, &s, &s, &[Elem(0), Elem(1)], &[Elem(2), Elem(3)], &[], &[]);
        assert!(matches!(err, Err(SublemmaError::Hypothesis(_))));
    }

    #[test]
    fn sequences_must_respect_the_bijection() {
        let p = builtins::three_clique();
        let g = Structure::graph(&["a", "b", "c", "d"], &[]).unwrap();
        let s = Executor::new(&p).unwrap().init(&g).unwrap();
        let alpha = [Modification::ins("E", &[Elem(0), Elem(1)])];
        let beta = [Modification::ins("E", &[Elem(3), Elem(2)])];
        let r = check_substructure_lemma(&p, &s, &s, &[Elem(0), Elem(1)], &[Elem(2), Elem(3)], &alpha, &beta);
        assert!(matches!(r, Err(SublemmaError::NotRespecting(_))));
    }

    #[test]
    fn generated_programs_are_valid_dynprop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let spec = random_spec(&mut rng);
            let p = random_dynprop_program(&spec, &mut rng);
            p.validate().unwrap();
            assert!(p.is_dynprop());
        }
    }

    #[test]
    fn small_campaign_holds_and_mutation_is_caught() {
        let ok = substructure_lemma_suite(60, 17, StepMode::Reference);
        assert!(ok.violations.is_empty(), "{}", ok.render());
        let bad = substructure_lemma_suite(60, 17, StepMode::IndexShifting);
        assert!(!bad.violations.is_empty());
    }
}
