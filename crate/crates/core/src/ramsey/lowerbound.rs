//! Gadgets behind the arity lower bound for k-clique and the ∃*∀* query.
//!
//! Over `A ⊎ C` with `C` holding one node `c_b` per (k+1)-subset `b` of
//! `A`, the graph has the edges `(c_b, b_i)` for `b` in `B`. Completing a
//! subset `b` (all edges among its members, or all edges `(b_i, t)`)
//! creates a witness exactly when `b ∈ B`. A program of too small arity
//! cannot tell a `b ∈ B` from a `b′ ∉ B` once both sit in an ordered
//! τ-clique, which the demo below exhibits at k = 1.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::sublemma::{check_substructure_lemma, random_dynprop_program, RandomProgramSpec, SublemmaError, Verdict};
use super::{color_by_type, find_monochromatic_clique, guaranteed_clique_size, ordered_tau_clique_k, search_antiramsey_coloring, HyperedgeColoring};
use crate::engine::builtins::{clique_sentence, three_clique};
use crate::engine::{EngineError, Executor, ProgramState};
use crate::logic::{parse_formula, static_eval, Formula, LogicError};
use crate::structure::{find_isomorphism, induced_substructure, Elem, Modification, Schema, Structure, StructureError};
use crate::DynamicProgram;

/// The ∃*∀* sentence separated by the constants variant.
pub const EAFO_SENTENCE: &str = "exists x. forall y. E(s,x) & (E(y,t) -> E(x,y))";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// (k+2)-clique.
    Clique,
    /// `∃x ∀y (E(s,x) ∧ (E(y,t) → E(x,y)))` with constants `s`, `t`.
    Eafo,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Clique => "clique",
            Variant::Eafo => "eafo",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "clique" => Ok(Variant::Clique),
            "eafo" => Ok(Variant::Eafo),
            _ => Err(format!("unknown variant `{s}` (expected clique or eafo)")),
        }
    }
}

impl Variant {
    /// The sentence whose answers the completion sequences separate.
    pub fn sentence(self, k: usize) -> Formula {
        match self {
            Variant::Clique => clique_sentence(k + 2),
            Variant::Eafo => parse_formula(EAFO_SENTENCE).expect("fixed sentence parses"),
        }
    }
}

#[derive(Debug, Error)]
pub enum LowerBoundError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("no 2-coloring of the {0}-subsets without monochromatic {1}-cliques found")]
    NoColoring(usize, usize),
    #[error("ordered type clique too small to contain subsets from both B and B'")]
    NoSeparatingPair,
    #[error(transparent)]
    Sublemma(#[from] SublemmaError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A generated lower-bound instance. Subsets are sorted positions in `a`,
/// which lists `A` in the order `≺`.
#[derive(Clone, Debug)]
pub struct LowerBoundInstance {
    pub k: usize,
    pub variant: Variant,
    pub a: Vec<Elem>,
    /// `(b, c_b)` for every (k+1)-subset, lexicographically.
    pub c: Vec<(Vec<usize>, Elem)>,
    pub b: Vec<Vec<usize>>,
    pub b_prime: Vec<Vec<usize>>,
    /// The input graph; the eafo variant has constants `s` and `t`.
    pub graph: Structure,
}

impl LowerBoundInstance {
    pub fn c_of(&self, subset: &[usize]) -> Option<Elem> {
        self.c.iter().find(|(b, _)| b == subset).map(|(_, e)| *e)
    }

    pub fn in_b(&self, subset: &[usize]) -> bool {
        self.b.iter().any(|b| b == subset)
    }

    /// `s` and `t` for the eafo variant, nothing otherwise.
    pub fn constants(&self) -> Vec<Elem> {
        match self.variant {
            Variant::Clique => Vec::new(),
            Variant::Eafo => vec![self.graph.constant("s").unwrap(), self.graph.constant("t").unwrap()],
        }
    }

    /// The edge list with labels, one `from to` pair per line.
    pub fn render_edges(&self) -> String {
        let e = self.graph.relation("E").unwrap();
        e.iter()
            .map(|t| format!("{} {}\n", self.graph.label(t[0]), self.graph.label(t[1])))
            .collect()
    }
}

/// Builds the instance over `A = {a1, ..., an}` for the set `b` of
/// (k+1)-subsets (0-based positions); `B′` is the complement of `B`.
pub fn build_lowerbound_instance(
    n: usize,
    b: &[Vec<usize>],
    k: usize,
    variant: Variant,
) -> Result<LowerBoundInstance, LowerBoundError> {
    let all: Vec<Vec<usize>> = (0..n).combinations(k + 1).collect();
    let chosen: BTreeSet<&Vec<usize>> = b.iter().collect();
    if chosen.len() != b.len() {
        return Err(LowerBoundError::Invalid("B lists a subset twice".into()));
    }
    if let Some(bad) = b.iter().find(|s| !all.contains(s)) {
        return Err(LowerBoundError::Invalid(format!(
            "{bad:?} is not a sorted {}-subset of 0..{n}",
            k + 1
        )));
    }
    let mut labels: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    labels.extend(
        all.iter()
            .map(|s| format!("c_{}", s.iter().map(|i| format!("a{}", i + 1)).join("_"))),
    );
    let mut schema = Schema::graph();
    if variant == Variant::Eafo {
        labels.push("s".into());
        labels.push("t".into());
        schema = schema.with_constant("s").with_constant("t");
    }
    let mut graph = Structure::new(schema, labels)?;
    if variant == Variant::Eafo {
        graph.set_constant("s", Elem::from(n + all.len()))?;
        graph.set_constant("t", Elem::from(n + all.len() + 1))?;
    }
    let a: Vec<Elem> = (0..n).map(Elem::from).collect();
    let c: Vec<(Vec<usize>, Elem)> = all.iter().enumerate().map(|(i, s)| (s.clone(), Elem::from(n + i))).collect();
    for (subset, cb) in &c {
        if !chosen.contains(subset) {
            continue;
        }
        for i in subset {
            graph.insert("E", &[*cb, a[*i]])?;
        }
        if variant == Variant::Eafo {
            let s = graph.constant("s")?;
            graph.insert("E", &[s, *cb])?;
        }
    }
    let b_prime = all.iter().filter(|s| !chosen.contains(s)).cloned().collect();
    Ok(LowerBoundInstance {
        k,
        variant,
        a,
        c,
        b: b.iter().sorted().cloned().collect(),
        b_prime,
        graph,
    })
}

/// The modifications completing `subset`: edges `(b_i, b_j)` for `i < j`
/// lexicographically (clique), or `(b_i, t)` in `≺` order (eafo).
pub fn completion_sequence(inst: &LowerBoundInstance, subset: &[usize]) -> Vec<Modification> {
    let elems: Vec<Elem> = subset.iter().map(|i| inst.a[*i]).collect();
    match inst.variant {
        Variant::Clique => elems
            .iter()
            .tuple_combinations()
            .map(|(x, y)| Modification::ins("E", &[*x, *y]))
            .collect(),
        Variant::Eafo => {
            let t = inst.graph.constant("t").unwrap();
            elems.iter().map(|x| Modification::ins("E", &[*x, t])).collect()
        }
    }
}

/// Everything the k = 1 demo computed.
#[derive(Clone, Debug)]
pub struct LowerBoundDemo {
    pub instance: LowerBoundInstance,
    pub coloring: HyperedgeColoring,
    /// Size of the ordered type clique guaranteed by exhaustive sweeps.
    pub guaranteed: usize,
    pub program: DynamicProgram,
    pub a_prime: Vec<Elem>,
    pub b: Vec<usize>,
    pub b_prime: Vec<usize>,
    /// Whether the substructures on `b̄` and `b̄′` (with constants) are
    /// isomorphic before the modifications.
    pub isomorphic_before: bool,
    pub answer_alpha: bool,
    pub answer_beta: bool,
    pub verdict: Verdict,
    /// Query bits `(after α, after β)` of the unary program.
    pub program_bits: (bool, bool),
    /// Query bits of the binary 3-clique program (clique variant only).
    pub binary_bits: Option<(bool, bool)>,
    pub trace: Vec<String>,
}

impl LowerBoundDemo {
    /// True when the run exhibits the separation: isomorphic starts,
    /// different true answers, equal answers of the unary program.
    pub fn separates(&self) -> bool {
        self.isomorphic_before
            && self.answer_alpha
            && !self.answer_beta
            && self.verdict.holds()
            && self.program_bits.0 == self.program_bits.1
    }

    pub fn render(&self) -> String {
        self.trace.iter().map(|l| format!("{l}\n")).collect()
    }
}

/// Runs the lower-bound construction at k = 1 end to end over `|A| = n`:
/// anti-Ramsey coloring of pairs, instance, a random unary program with a
/// random auxiliary state, the ordered type clique `A′`, a pair `b ∈ B` and
/// `b′ ∈ B′` inside `A′`, and both completion sequences.
pub fn run_lowerbound_demo(variant: Variant, n: usize, seed: u64) -> Result<LowerBoundDemo, LowerBoundError> {
    let k = 1;
    let l = k + 2;
    let coloring = search_antiramsey_coloring(n, k + 1, l, seed, 200_000).ok_or(LowerBoundError::NoColoring(k + 1, l))?;
    let b: Vec<Vec<usize>> = coloring.edges().filter(|(_, c)| *c == 0).map(|(e, _)| e).collect();
    let inst = build_lowerbound_instance(n, &b, k, variant)?;
    let mut trace = vec![
        format!("variant {variant}, k {k}, |A| {n}, |C| {}", inst.c.len()),
        format!("coloring of pairs without monochromatic {l}-cliques, seed {seed}"),
        format!("B  = {}", render_subsets(&inst, &inst.b)),
        format!("B' = {}", render_subsets(&inst, &inst.b_prime)),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let spec = RandomProgramSpec {
        input: inst.graph.schema().clone(),
        aux_arities: vec![1],
        depth: 2,
        deletions: false,
    };
    let program = random_dynprop_program(&spec, &mut rng);
    let combined = program.combined_schema()?;
    let mut st = Structure::new(combined, inst.graph.labels().iter().cloned())?;
    st.overwrite_from(&inst.graph)?;
    for e in st.elements().collect::<Vec<_>>() {
        if rng.gen_bool(0.5) {
            st.insert("R1", &[e])?;
        }
    }
    if rng.gen_bool(0.5) {
        st.insert("Q", &[])?;
    }
    let state = ProgramState::from_structure(&program, st)?;
    let u: Vec<&str> = inst.a.iter().filter(|e| state.structure().holds("R1", &[**e]).unwrap()).map(|e| inst.graph.label(*e)).collect();
    trace.push(format!("unary program with auxiliary R1; R1 initially on {{{}}}", u.join(", ")));

    let (types, palette) = color_by_type(state.structure(), &inst.a, k);
    let guaranteed = guaranteed_clique_size(k, palette.len() as u32, n);
    // both halves of the disparity at this size
    assert!(find_monochromatic_clique(&coloring, l).is_none());
    assert!(find_monochromatic_clique(&types, guaranteed).is_some());
    let a_prime = ordered_tau_clique_k(state.structure(), &inst.a, k, guaranteed).ok_or(LowerBoundError::NoSeparatingPair)?;
    trace.push(format!(
        "{} types of elements of A, guaranteed clique size {guaranteed}, A' = {{{}}}",
        palette.len(),
        a_prime.iter().map(|e| inst.graph.label(*e)).join(", ")
    ));
    let positions: Vec<usize> = a_prime.iter().map(|e| e.index()).collect();
    let subsets: Vec<Vec<usize>> = positions.iter().copied().combinations(k + 1).collect();
    let sb = subsets.iter().find(|s| inst.in_b(s)).ok_or(LowerBoundError::NoSeparatingPair)?.clone();
    let sbp = subsets.iter().find(|s| !inst.in_b(s)).ok_or(LowerBoundError::NoSeparatingPair)?.clone();

    let consts = inst.constants();
    let tuple_of = |s: &[usize]| -> Vec<Elem> { consts.iter().copied().chain(s.iter().map(|i| inst.a[*i])).collect() };
    let (tb, tbp) = (tuple_of(&sb), tuple_of(&sbp));
    let sub_b = induced_substructure(state.structure(), &tb.iter().copied().collect())?;
    let sub_bp = induced_substructure(state.structure(), &tbp.iter().copied().collect())?;
    let isomorphic_before = find_isomorphism(&sub_b, &sub_bp).is_some();
    trace.push(format!("b = {} in B, b' = {} in B'", render_subset(&inst, &sb), render_subset(&inst, &sbp)));
    trace.push(format!("substructures on b and b' isomorphic before: {isomorphic_before}"));

    let alpha = completion_sequence(&inst, &sb);
    let beta = completion_sequence(&inst, &sbp);
    trace.push(format!("alpha: {}", alpha.iter().map(|m| m.render(&inst.graph)).join("; ")));
    trace.push(format!("beta:  {}", beta.iter().map(|m| m.render(&inst.graph)).join("; ")));

    let ex = Executor::new(&program)?;
    let after_alpha = ex.run(&state, &alpha).map_err(|e| e.1)?;
    let after_beta = ex.run(&state, &beta).map_err(|e| e.1)?;
    let sentence = variant.sentence(k);
    let answer_alpha = static_eval(&after_alpha.input(), &sentence)?;
    let answer_beta = static_eval(&after_beta.input(), &sentence)?;
    trace.push(format!("query `{sentence}`: after alpha {answer_alpha}, after beta {answer_beta}"));
    let program_bits = (after_alpha.query_bit(), after_beta.query_bit());
    trace.push(format!(
        "unary program answers: after alpha {}, after beta {}",
        program_bits.0, program_bits.1
    ));
    let verdict = check_substructure_lemma(&program, &state, &state, &tb, &tbp, &alpha, &beta)?;
    trace.push(format!("substructure lemma on b, b': {}", verdict_text(&verdict)));

    let binary_bits = match variant {
        Variant::Clique => {
            let p3 = three_clique();
            let ex3 = Executor::new(&p3)?;
            let start = ex3.init(&inst.graph)?;
            let x = ex3.run(&start, &alpha).map_err(|e| e.1)?.query_bit();
            let y = ex3.run(&start, &beta).map_err(|e| e.1)?.query_bit();
            trace.push(format!("binary 3-clique program answers: after alpha {x}, after beta {y}"));
            Some((x, y))
        }
        Variant::Eafo => None,
    };

    Ok(LowerBoundDemo {
        instance: inst,
        coloring,
        guaranteed,
        program,
        a_prime,
        b: sb,
        b_prime: sbp,
        isomorphic_before,
        answer_alpha,
        answer_beta,
        verdict,
        program_bits,
        binary_bits,
        trace,
    })
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Holds => "holds".into(),
        Verdict::Violated(d) => format!("violated: {d}"),
    }
}

fn render_subset(inst: &LowerBoundInstance, s: &[usize]) -> String {
    format!("{{{}}}", s.iter().map(|i| inst.graph.label(inst.a[*i])).join(","))
}

fn render_subsets(inst: &LowerBoundInstance, ss: &[Vec<usize>]) -> String {
    ss.iter().map(|s| render_subset(inst, s)).join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::ModKind;

    fn edges(inst: &LowerBoundInstance) -> Vec<(String, String)> {
        inst.graph
            .relation("E")
            .unwrap()
            .iter()
            .map(|t| (inst.graph.label(t[0]).to_string(), inst.graph.label(t[1]).to_string()))
            .collect()
    }

    #[test]
    fn single_subset_instance() {
        let inst = build_lowerbound_instance(3, &[vec![0, 1]], 1, Variant::Clique).unwrap();
        assert_eq!(inst.c.len(), 3);
        assert_eq!(
            edges(&inst),
            vec![("c_a1_a2".to_string(), "a1".to_string()), ("c_a1_a2".into(), "a2".into())]
        );
        assert_eq!(inst.b_prime, vec![vec![0, 2], vec![1, 2]]);
        let empty = build_lowerbound_instance(4, &[], 1, Variant::Clique).unwrap();
        assert!(empty.graph.relation("E").unwrap().is_empty());
    }

    #[test]
    fn eafo_instance_links_s() {
        let inst = build_lowerbound_instance(3, &[vec![0, 1]], 1, Variant::Eafo).unwrap();
        let e = edges(&inst);
        assert_eq!(e.len(), 3);
        assert!(e.contains(&("s".into(), "c_a1_a2".into())));
        assert_eq!(inst.graph.label(inst.graph.constant("t").unwrap()), "t");
    }

    #[test]
    fn invalid_subsets_are_rejected() {
        assert!(build_lowerbound_instance(3, &[vec![1, 0]], 1, Variant::Clique).is_err());
        assert!(build_lowerbound_instance(3, &[vec![0, 1], vec![0, 1]], 1, Variant::Clique).is_err());
        assert!(build_lowerbound_instance(3, &[vec![0, 3]], 1, Variant::Clique).is_err());
    }

    #[test]
    fn completion_sequences() {
        let inst = build_lowerbound_instance(4, &[], 2, Variant::Clique).unwrap();
        let seq = completion_sequence(&inst, &[0, 1, 3]);
        let tuples: Vec<Vec<Elem>> = seq.iter().map(|m| m.tuple.clone()).collect();
        assert_eq!(tuples, vec![vec![Elem(0), Elem(1)], vec![Elem(0), Elem(3)], vec![Elem(1), Elem(3)]]);
        assert!(seq.iter().all(|m| m.kind == ModKind::Ins));
        assert!(completion_sequence(&inst, &[2]).is_empty());
        let eafo = build_lowerbound_instance(3, &[], 1, Variant::Eafo).unwrap();
        let t = eafo.graph.constant("t").unwrap();
        let seq = completion_sequence(&eafo, &[0, 2]);
        assert_eq!(seq, vec![Modification::ins("E", &[Elem(0), t]), Modification::ins("E", &[Elem(2), t])]);
    }

    #[test]
    fn completion_separates_b_from_its_complement() {
        for variant in [Variant::Clique, Variant::Eafo] {
            let b = vec![vec![0, 1], vec![1, 3], vec![2, 3]];
            let inst = build_lowerbound_instance(4, &b, 1, variant).unwrap();
            let sentence = variant.sentence(1);
            // without edges into t the eafo sentence holds vacuously via any c_b, b in B
            assert_eq!(static_eval(&inst.graph, &sentence).unwrap(), variant == Variant::Eafo);
            for s in (0..4).combinations(2) {
                let mut g = inst.graph.clone();
                for m in completion_sequence(&inst, &s) {
                    g = crate::structure::apply_modification(&g, &m).unwrap();
                }
                assert_eq!(static_eval(&g, &sentence).unwrap(), inst.in_b(&s), "{variant} {s:?}");
            }
        }
    }

    #[test]
    fn demos_separate() {
        for variant in [Variant::Clique, Variant::Eafo] {
            for seed in 0..3 {
                let demo = run_lowerbound_demo(variant, 5, seed).unwrap();
                assert!(demo.separates(), "{}", demo.render());
                if variant == Variant::Clique {
                    assert_eq!(demo.binary_bits, Some((true, false)));
                }
            }
        }
    }

    #[test]
    fn variant_names() {
        assert_eq!("eafo".parse::<Variant>().unwrap(), Variant::Eafo);
        assert_eq!(Variant::Clique.to_string(), "clique");
        assert!("x".parse::<Variant>().is_err());
    }
}
