//! Neighborhoods under auxiliary functions, m-similarity of tuples, the
//! search for large sets of pairwise m-similar ordered tuples, and the
//! substructure-lemma checker for programs with auxiliary functions.
//!
//! The m-neighborhood of a set `A` is the set of values of terms of
//! nesting depth at most `m` with variables ranging over `A`. Two tuples
//! `ā`, `b̄` are m-similar when mapping `t(ā)` to `t(b̄)` for every such
//! term is a well-defined bijection between the neighborhoods that
//! preserves all relations.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::sublemma::{
    bijection, check_respecting, names, run_with, supported_kinds, Stepper, SublemmaError, SuiteReport,
    Verdict,
};
use super::ordered_tau_clique_k;
use crate::engine::{Executor, Initializer, ProgramState, UpdateRule};
use crate::logic::{enumerate_terms, Formula, Term};
use crate::structure::{atomic_type, tuples_over, AtomicType, Elem, Modification, Schema, Structure};
use crate::DynamicProgram;

fn level_closure<T: Ord + Copy>(
    start: BTreeSet<T>,
    m: usize,
    apply: impl Fn(usize, &[T]) -> T,
    functions: &[(usize, usize)],
) -> BTreeSet<T> {
    let mut level = start;
    for _ in 0..m {
        let items: Vec<T> = level.iter().copied().collect();
        let mut next = level.clone();
        for &(fi, arity) in functions {
            for args in (0..arity).map(|_| items.iter().copied()).multi_cartesian_product() {
                next.insert(apply(fi, &args));
            }
        }
        if next.len() == level.len() {
            break;
        }
        level = next;
    }
    level
}

fn proper_function_slots(schema: &Schema) -> Vec<(usize, usize)> {
    schema
        .functions()
        .iter()
        .enumerate()
        .filter(|(_, (_, a))| *a > 0)
        .map(|(i, (_, a))| (i, *a))
        .collect()
}

/// The m-neighborhood of `a` in `s`: `a`, the constants, and everything
/// reachable by at most `m` nested function applications.
pub fn neighborhood(s: &Structure, a: &[Elem], m: usize) -> BTreeSet<Elem> {
    let mut start: BTreeSet<Elem> = a.iter().copied().collect();
    start.extend(s.constant_values());
    let fs = proper_function_slots(s.schema());
    level_closure(start, m, |fi, args| s.function_at(fi).get(args), &fs)
}

/// The bijection witnessing that `a` and `b` are m-similar in `s` and `t`
/// (mapping `a[i]` to `b[i]`), or `None`.
///
/// Pairs `(t^s(ā), t^t(b̄))` are generated level by level, which covers
/// exactly the terms of depth at most `m`; the pairs must form a bijection
/// that preserves every relation on the neighborhood.
pub fn m_similar(
    s: &Structure,
    t: &Structure,
    a: &[Elem],
    b: &[Elem],
    m: usize,
) -> Option<BTreeMap<Elem, Elem>> {
    if s.schema() != t.schema() || a.len() != b.len() {
        return None;
    }
    let mut start: BTreeSet<(Elem, Elem)> = a.iter().copied().zip(b.iter().copied()).collect();
    for c in s.schema().constants() {
        start.insert((s.constant(c).ok()?, t.constant(c).ok()?));
    }
    let fs = proper_function_slots(s.schema());
    let pairs = level_closure(
        start,
        m,
        |fi, args: &[(Elem, Elem)]| {
            let (xs, ys): (Vec<Elem>, Vec<Elem>) = args.iter().copied().unzip();
            (s.function_at(fi).get(&xs), t.function_at(fi).get(&ys))
        },
        &fs,
    );
    let mut pi = BTreeMap::new();
    let mut image = BTreeSet::new();
    for (x, y) in pairs {
        if pi.insert(x, y).is_some() || !image.insert(y) {
            return None;
        }
    }
    let dom: Vec<Elem> = pi.keys().copied().collect();
    for (ri, (_, arity)) in s.schema().relations().iter().enumerate() {
        let (rs, rt) = (s.relation_at(ri), t.relation_at(ri));
        for tuple in tuples_over(&dom, *arity) {
            let mapped: Vec<Elem> = tuple.iter().map(|e| pi[e]).collect();
            if rs.contains(&tuple) != rt.contains(&mapped) {
                return None;
            }
        }
    }
    Some(pi)
}

fn eval_plain(s: &Structure, t: &Term, x: Elem) -> Elem {
    match t {
        Term::Var(_) => x,
        Term::Const(c) => s.constant(c).expect("constant of the schema"),
        Term::App(f, args) => {
            let vals: Vec<Elem> = args.iter().map(|a| eval_plain(s, a, x)).collect();
            s.apply(f, &vals).expect("function of the schema")
        }
        Term::Ite(..) => unreachable!("enumerated terms have no ite"),
    }
}

/// The atomic type of the concatenated m-neighborhood vectors
/// `(c, t_1(c), ..., t_l(c))` of the entries of `tuple`, where `t_1..t_l`
/// enumerate the one-variable terms of depth at most `m`. Tuples with equal
/// similarity types are m-similar.
pub fn similarity_type(s: &Structure, tuple: &[Elem], m: usize) -> AtomicType {
    let terms = enumerate_terms(s.schema(), &["x"], m);
    let vector: Vec<Elem> = tuple
        .iter()
        .flat_map(|c| terms.iter().map(|t| eval_plain(s, t, *c)).collect::<Vec<_>>())
        .collect();
    atomic_type(s, &vector).expect("vector over the structure")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimilarityError {
    #[error("function `{0}` has arity {1}; only unary functions are supported")]
    NonUnaryFunction(String, usize),
}

/// A subset of size `l` (in `≺` order) all of whose `≺`-ordered k-tuples
/// are pairwise m-similar, k being the maximal relation arity (at least 1).
///
/// Builds the structure with one k-ary relation per similarity type,
/// holding the k-tuples of that type, and takes its ordered type clique.
/// The result is verified pairwise with [`m_similar`].
pub fn find_similar_tuples(
    s: &Structure,
    order: &[Elem],
    m: usize,
    l: usize,
) -> Result<Option<Vec<Elem>>, SimilarityError> {
    if let Some((f, a)) = s.schema().proper_functions().find(|(_, a)| *a > 1) {
        return Err(SimilarityError::NonUnaryFunction(f.to_string(), a));
    }
    let k = s.schema().max_relation_arity().max(1);
    let elems: Vec<Elem> = s.elements().collect();
    let typed: Vec<(Vec<Elem>, AtomicType)> = tuples_over(&elems, k)
        .map(|t| {
            let ty = similarity_type(s, &t, m);
            (t, ty)
        })
        .collect();
    let palette: Vec<&AtomicType> = typed.iter().map(|(_, ty)| ty).sorted().dedup().collect();
    let mut schema = Schema::new();
    for i in 0..palette.len() {
        schema.add_relation(&format!("T{i}"), k).unwrap();
    }
    let mut derived = Structure::new(schema, s.labels().iter().cloned()).expect("labels are distinct");
    for (t, ty) in &typed {
        let id = palette.binary_search(&ty).unwrap();
        derived.relation_at_mut(id).insert(t);
    }
    let Some(clique) = ordered_tau_clique_k(&derived, order, k, l) else {
        return Ok(None);
    };
    let tuples: Vec<Vec<Elem>> = clique.iter().copied().combinations(k).collect();
    for (x, y) in tuples.iter().tuple_combinations() {
        assert!(m_similar(s, s, x, y, m).is_some(), "tuples of one similarity type must be similar");
    }
    Ok(Some(clique))
}

/// Checks the substructure lemma for programs with auxiliary functions on
/// one instance: `a` and `b` must be m-similar via `a[i] -> b[i]`; after
/// respecting sequences they must still be 0-similar via the same map.
#[allow(clippy::too_many_arguments)]
pub fn check_substructure_lemma_qf(
    p: &DynamicProgram,
    s: &ProgramState,
    t: &ProgramState,
    a: &[Elem],
    b: &[Elem],
    m: usize,
    alpha: &[Modification],
    beta: &[Modification],
) -> Result<Verdict, SublemmaError> {
    let ex = Executor::new(p)?;
    check_substructure_lemma_qf_with(&|st, md| ex.step(st, md), s, t, a, b, m, alpha, beta)
}

/// [`check_substructure_lemma_qf`] with an explicit stepper.
#[allow(clippy::too_many_arguments)]
pub fn check_substructure_lemma_qf_with(
    stepper: &Stepper<'_>,
    s: &ProgramState,
    t: &ProgramState,
    a: &[Elem],
    b: &[Elem],
    m: usize,
    alpha: &[Modification],
    beta: &[Modification],
) -> Result<Verdict, SublemmaError> {
    let pi = bijection(a, b)?;
    if m_similar(s.structure(), t.structure(), a, b, m).is_none() {
        return Err(SublemmaError::Hypothesis(format!("the tuples are not {m}-similar")));
    }
    check_respecting(&pi, alpha, beta)?;
    let s2 = run_with(stepper, s, alpha)?;
    let t2 = run_with(stepper, t, beta)?;
    if m_similar(s2.structure(), t2.structure(), a, b, 0).is_none() {
        return Ok(Verdict::Violated(format!(
            "after {} modifications the tuples are no longer 0-similar",
            alpha.len()
        )));
    }
    Ok(Verdict::Holds)
}

/// Shape of randomly generated programs with unary auxiliary functions.
#[derive(Clone, Debug)]
pub struct RandomQfSpec {
    pub functions: usize,
    pub constant: bool,
    pub relation_arities: Vec<usize>,
    /// Nesting depth of update terms.
    pub term_depth: usize,
}

struct TermGen<'a> {
    schema: &'a Schema,
    pool: Vec<Term>,
    functions: Vec<String>,
}

impl TermGen<'_> {
    fn term(&self, rng: &mut ChaCha8Rng, depth: usize) -> Term {
        if depth == 0 || self.functions.is_empty() || rng.gen_bool(0.35) {
            return self.pool[rng.gen_range(0..self.pool.len())].clone();
        }
        if rng.gen_bool(0.25) {
            return Term::ite(self.atom(rng, depth - 1), self.term(rng, depth - 1), self.term(rng, depth - 1));
        }
        let f = &self.functions[rng.gen_range(0..self.functions.len())];
        Term::app(f, vec![self.term(rng, depth - 1)])
    }

    fn atom(&self, rng: &mut ChaCha8Rng, depth: usize) -> Formula {
        let rels = self.schema.relations();
        if rng.gen_bool(0.3) {
            return Formula::eq(self.term(rng, depth), self.term(rng, depth));
        }
        let (name, arity) = &rels[rng.gen_range(0..rels.len())];
        Formula::rel(name, (0..*arity).map(|_| self.term(rng, depth)).collect())
    }

    fn formula(&self, rng: &mut ChaCha8Rng, depth: usize, term_depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.3) {
            return self.atom(rng, term_depth);
        }
        match rng.gen_range(0..3) {
            0 => Formula::not(self.formula(rng, depth - 1, term_depth)),
            1 => Formula::And(vec![
                self.formula(rng, depth - 1, term_depth),
                self.formula(rng, depth - 1, term_depth),
            ]),
            _ => Formula::Or(vec![
                self.formula(rng, depth - 1, term_depth),
                self.formula(rng, depth - 1, term_depth),
            ]),
        }
    }
}

/// A random program over graphs with unary auxiliary functions `f1, ...`,
/// optionally an auxiliary constant `c`, auxiliary relations `R1, ...` and
/// 0-ary query `Q`; insertions and deletions are supported.
pub fn random_qf_program(spec: &RandomQfSpec, rng: &mut ChaCha8Rng) -> DynamicProgram {
    let input = Schema::graph();
    let mut aux = Schema::new().with_relation("Q", 0);
    for (i, a) in spec.relation_arities.iter().enumerate() {
        aux.add_relation(&format!("R{}", i + 1), *a).unwrap();
    }
    let functions = names("f", spec.functions);
    for f in &functions {
        aux.add_function(f, 1).unwrap();
    }
    if spec.constant {
        aux.add_constant("c").unwrap();
    }
    let combined = input.union(&aux).unwrap();
    let supported = supported_kinds(&input, true);
    let mut rules = Vec::new();
    for kind in &supported {
        let params = ["u", "v"];
        let mut symbols: Vec<(String, usize, bool)> =
            aux.relations().iter().map(|(r, a)| (r.clone(), *a, true)).collect();
        symbols.extend(aux.functions().iter().map(|(f, a)| (f.clone(), *a, false)));
        for (sym, arity, is_rel) in symbols {
            let targets = names("y", arity);
            let mut pool: Vec<Term> = params.iter().map(|v| Term::var(v)).collect();
            pool.extend(targets.iter().map(|v| Term::var(v)));
            if spec.constant {
                pool.push(Term::constant("c"));
            }
            let gen = TermGen {
                schema: &combined,
                pool,
                functions: functions.clone(),
            };
            let t: Vec<&str> = targets.iter().map(String::as_str).collect();
            if is_rel {
                let body = gen.formula(rng, 2, spec.term_depth);
                rules.push(UpdateRule::formula(&sym, kind.clone(), &params, &t, body));
            } else {
                let body = gen.term(rng, spec.term_depth);
                rules.push(UpdateRule::term(&sym, kind.clone(), &params, &t, body));
            }
        }
    }
    let p = DynamicProgram {
        input,
        aux,
        rules,
        initializer: Initializer::Empty,
        query: "Q".into(),
        supported,
    };
    debug_assert!(p.validate().is_ok(), "{:?}", p.validate());
    p
}

/// `s` with element `e` renamed to `sigma[e]` (labels are carried along).
pub fn permuted(s: &Structure, sigma: &[Elem]) -> Structure {
    let mut labels = vec![String::new(); s.size()];
    for e in s.elements() {
        labels[sigma[e.index()].index()] = s.label(e).to_string();
    }
    let mut out = Structure::new(s.schema().clone(), labels).expect("permuted labels stay distinct");
    let elems: Vec<Elem> = s.elements().collect();
    let map = |t: &[Elem]| -> Vec<Elem> { t.iter().map(|e| sigma[e.index()]).collect() };
    for (ri, _) in s.schema().relations().iter().enumerate() {
        for t in s.relation_at(ri).iter() {
            out.relation_at_mut(ri).insert(&map(&t));
        }
    }
    for (fi, (name, arity)) in s.schema().functions().iter().enumerate() {
        for args in tuples_over(&elems, *arity) {
            let v = sigma[s.function_at(fi).get(&args).index()];
            out.set_function(name, &map(&args), v).unwrap();
        }
    }
    out
}

/// One random instance for the lemma with functions.
#[derive(Clone, Debug)]
pub struct QfLemmaInstance {
    pub s: ProgramState,
    pub t: ProgramState,
    pub a: Vec<Elem>,
    pub b: Vec<Elem>,
    pub alpha: Vec<Modification>,
    pub beta: Vec<Modification>,
}

/// A random state `S`, a random tuple `ā`, and `T` obtained from `S` by a
/// random renaming followed by random changes that keep `ā` m-similar to
/// its image: relation tuples leaving the m-neighborhood and function values
/// outside the (m-1)-neighborhood are re-randomized.
pub fn random_qf_instance(p: &DynamicProgram, m: usize, max_len: usize, rng: &mut ChaCha8Rng) -> QfLemmaInstance {
    let n = rng.gen_range(6..=10);
    let mut s = super::sublemma::random_state(p, n, 0.3, rng);
    let funcs: Vec<String> = p.aux.proper_functions().map(|(f, _)| f.to_string()).collect();
    let elems: Vec<Elem> = s.structure().elements().collect();
    for f in &funcs {
        for e in &elems {
            if rng.gen_bool(0.5) {
                s.structure_mut().set_function(f, &[*e], *e).unwrap();
            }
        }
    }
    let size = rng.gen_range(1..=2);
    let mut shuffled = elems.clone();
    shuffled.shuffle(rng);
    let a: Vec<Elem> = shuffled[..size].to_vec();
    let mut sigma = elems.clone();
    sigma.shuffle(rng);
    let mut t_struct = permuted(s.structure(), &sigma);
    let b: Vec<Elem> = a.iter().map(|e| sigma[e.index()]).collect();
    let keep = neighborhood(&t_struct, &b, m);
    let keep_fun = if m == 0 { BTreeSet::new() } else { neighborhood(&t_struct, &b, m - 1) };
    let schema = t_struct.schema().clone();
    for (r, arity) in schema.relations() {
        for tuple in tuples_over(&elems, *arity) {
            if !tuple.iter().all(|e| keep.contains(e)) && rng.gen_bool(0.3) {
                if t_struct.holds(r, &tuple).unwrap() {
                    t_struct.remove(r, &tuple).unwrap();
                } else {
                    t_struct.insert(r, &tuple).unwrap();
                }
            }
        }
    }
    for f in &funcs {
        for e in &elems {
            if !keep_fun.contains(e) && rng.gen_bool(0.5) {
                t_struct.set_function(f, &[*e], elems[rng.gen_range(0..n)]).unwrap();
            }
        }
    }
    let t = ProgramState::from_structure(p, t_struct).unwrap();
    debug_assert!(m_similar(s.structure(), t.structure(), &a, &b, m).is_some());
    let len = rng.gen_range(0..=max_len);
    let mut alpha = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = p.supported.choose(rng).unwrap();
        let tuple = [*a.choose(rng).unwrap(), *a.choose(rng).unwrap()];
        alpha.push(Modification {
            kind: kind.kind,
            relation: kind.relation.clone(),
            tuple: tuple.to_vec(),
        });
    }
    let beta = alpha.iter().map(|md| md.map(|e| sigma[e.index()])).collect();
    QfLemmaInstance { s, t, a, b, alpha, beta }
}

fn random_qf_spec(rng: &mut ChaCha8Rng) -> RandomQfSpec {
    RandomQfSpec {
        functions: rng.gen_range(1..=2),
        constant: rng.gen_bool(0.5),
        relation_arities: (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(1..=2)).collect(),
        term_depth: rng.gen_range(1..=2),
    }
}

/// Runs `trials` random instances at similarity depth `m` with sequences
/// of length at most `max_len`. Trial `i` uses stream `i` of
/// `ChaCha8Rng::seed_from_u64(seed)` for the program and instance.
pub fn qf_lemma_suite(trials: usize, seed: u64, m: usize, max_len: usize) -> SuiteReport {
    let mut report = SuiteReport {
        trials,
        ..Default::default()
    };
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let spec = random_qf_spec(&mut rng);
        let p = random_qf_program(&spec, &mut rng);
        let inst = random_qf_instance(&p, m, max_len, &mut rng);
        match check_substructure_lemma_qf(&p, &inst.s, &inst.t, &inst.a, &inst.b, m, &inst.alpha, &inst.beta) {
            Ok(Verdict::Holds) => report.holds += 1,
            Ok(Verdict::Violated(d)) => report.violations.push((trial, d)),
            Err(e) => report.violations.push((trial, format!("checker error: {e}"))),
        }
    }
    report
}

/// Runs [`qf_lemma_suite`] for `m = 0, 1, ...` up to `max_m` and returns
/// the smallest `m` without violations (if any) with all reports so far.
pub fn smallest_passing_m(
    trials: usize,
    seed: u64,
    max_m: usize,
    max_len: usize,
) -> (Option<usize>, Vec<SuiteReport>) {
    let mut reports = Vec::new();
    for m in 0..=max_m {
        let r = qf_lemma_suite(trials, seed, m, max_len);
        let clean = r.violations.is_empty();
        reports.push(r);
        if clean {
            return (Some(m), reports);
        }
    }
    (None, reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramsey::ordered_tau_clique;

    fn cycle(n: usize) -> Structure {
        let labels: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let mut s = Structure::new(Schema::new().with_function("f", 1), labels).unwrap();
        for i in 0..n {
            s.set_function("f", &[Elem::from(i)], Elem::from((i + 1) % n)).unwrap();
        }
        s
    }

    #[test]
    fn neighborhoods_follow_the_function() {
        let s = cycle(4);
        assert_eq!(neighborhood(&s, &[Elem(0)], 0), BTreeSet::from([Elem(0)]));
        assert_eq!(neighborhood(&s, &[Elem(0)], 2), BTreeSet::from([Elem(0), Elem(1), Elem(2)]));
        let plain = Structure::new(Schema::new().with_relation("U", 1).with_constant("c"), ["a", "b", "d"]).unwrap();
        assert_eq!(neighborhood(&plain, &[Elem(1)], 5), BTreeSet::from([Elem(0), Elem(1)]));
    }

    #[test]
    fn neighborhood_equals_term_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let schema = Schema::new().with_function("f", 1).with_function("g", 1).with_constant("c");
        for _ in 0..30 {
            let s = crate::engine::random_database(&schema, 7, 0.0, &mut rng);
            let a = [Elem(rng.gen_range(0..7)), Elem(rng.gen_range(0..7))];
            for m in 0..3 {
                let via_terms: BTreeSet<Elem> = enumerate_terms(&schema, &["x"], m)
                    .iter()
                    .flat_map(|t| a.iter().map(|e| eval_plain(&s, t, *e)).collect::<Vec<_>>())
                    .collect();
                assert_eq!(neighborhood(&s, &a, m), via_terms);
            }
        }
    }

    #[test]
    fn identical_tuples_are_similar() {
        let s = cycle(5);
        let pi = m_similar(&s, &s, &[Elem(2)], &[Elem(2)], 3).unwrap();
        assert!(pi.iter().all(|(x, y)| x == y));
    }

    #[test]
    fn similarity_depth_on_a_marked_cycle() {
        // U marks a0 only: a2 and a3 look alike until a term reaches a0
        let mut s = cycle(6);
        let schema = s.schema().clone().with_relation("U", 1);
        let mut marked = Structure::new(schema, s.labels().iter().cloned()).unwrap();
        marked.overwrite_from(&s).unwrap();
        marked.insert("U", &[Elem(0)]).unwrap();
        s = marked;
        // f^3(a3) = a0 while f^3(a2) = a5
        assert!(m_similar(&s, &s, &[Elem(2)], &[Elem(3)], 2).is_some());
        assert!(m_similar(&s, &s, &[Elem(2)], &[Elem(3)], 3).is_none());
    }

    #[test]
    fn function_free_similarity_is_isomorphism() {
        let g = Structure::graph(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap();
        assert!(m_similar(&g, &g, &[Elem(0), Elem(1)], &[Elem(2), Elem(3)], 0).is_some());
        assert!(m_similar(&g, &g, &[Elem(0), Elem(1)], &[Elem(3), Elem(2)], 4).is_none());
    }

    #[test]
    fn similar_tuples_degenerate_to_type_cliques() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let schema = Schema::new().with_relation("U", 1).with_relation("V", 1);
        for _ in 0..20 {
            let s = crate::engine::random_database(&schema, 9, 0.4, &mut rng);
            let order: Vec<Elem> = s.elements().collect();
            for l in 1..5 {
                assert_eq!(find_similar_tuples(&s, &order, 2, l).unwrap(), ordered_tau_clique(&s, &order, l));
            }
        }
    }

    #[test]
    fn similar_tuples_with_a_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let schema = Schema::new().with_relation("U", 1).with_function("f", 1);
        for _ in 0..10 {
            let s = crate::engine::random_database(&schema, 8, 0.5, &mut rng);
            let order: Vec<Elem> = s.elements().collect();
            if let Some(c) = find_similar_tuples(&s, &order, 1, 2).unwrap() {
                for (x, y) in c.iter().tuple_combinations() {
                    assert!(m_similar(&s, &s, &[*x], &[*y], 1).is_some());
                }
            }
        }
        let binary = Schema::new().with_function("g", 2);
        let s = crate::engine::random_database(&binary, 3, 0.0, &mut rng);
        assert!(find_similar_tuples(&s, &[Elem(0)], 1, 1).is_err());
    }

    #[test]
    fn generated_qf_programs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let spec = random_qf_spec(&mut rng);
            let p = random_qf_program(&spec, &mut rng);
            p.validate().unwrap();
            assert!(p.is_quantifier_free());
            let inst = random_qf_instance(&p, 2, 3, &mut rng);
            assert!(m_similar(inst.s.structure(), inst.t.structure(), &inst.a, &inst.b, 2).is_some());
        }
    }
}
