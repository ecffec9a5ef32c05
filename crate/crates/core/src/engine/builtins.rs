//! Hand-written programs: triangle detection with one binary auxiliary
//! relation, and maximum outdegree with counter functions.

use std::collections::BTreeSet;

use super::{Definition, DynamicProgram, EngineError, Initializer, Oracle, ProgramState, UpdateKind, UpdateRule};
use crate::logic::{parse_formula, parse_term, Formula};
use crate::structure::{Elem, Schema, Structure, TupleSet};

/// `exists x y z` pairwise distinct and pairwise adjacent (either
/// direction).
pub const THREE_CLIQUE: &str =
    "exists x1 x2 x3. x1 != x2 & x1 != x3 & x2 != x3 & E{x1,x2} & E{x1,x3} & E{x2,x3}";

/// The `k`-clique sentence over variables `x1..xk`.
pub fn clique_sentence(k: usize) -> Formula {
    let vars: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let mut parts = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            parts.push(format!("{} != {}", vars[i], vars[j]));
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            parts.push(format!("E{{{},{}}}", vars[i], vars[j]));
        }
    }
    let body = if parts.is_empty() { "true".to_string() } else { parts.join(" & ") };
    let src = if k == 0 { body } else { format!("exists {}. {body}", vars.join(" ")) };
    parse_formula(&src).expect("generated sentence parses")
}

/// `R` holds the pairs of distinct nodes with a common neighbour, i.e. the
/// edges whose insertion would close a triangle; `Q` is the triangle bit.
/// Insertions only.
pub fn three_clique() -> DynamicProgram {
    let ins = UpdateKind::ins("E");
    let r_rule = parse_formula(
        "R(x,y) | (u != v & x != y & ((E{u,y} & v = x & y != u) | (E{u,x} & v = y & x != u) \
         | (E{v,y} & u = x & y != v) | (E{v,x} & u = y & x != v)))",
    )
    .unwrap();
    let q_rule = parse_formula("Q | R(u,v)").unwrap();
    DynamicProgram {
        input: Schema::graph(),
        aux: Schema::new().with_relation("Q", 0).with_relation("R", 2),
        rules: vec![
            UpdateRule::formula("Q", ins.clone(), &["u", "v"], &[], q_rule),
            UpdateRule::formula("R", ins.clone(), &["u", "v"], &["x", "y"], r_rule),
        ],
        initializer: Initializer::StaticBruteforce(vec![
            Definition::relation(
                "R",
                &["x", "y"],
                parse_formula("x != y & exists z. z != x & z != y & E{x,z} & E{y,z}").unwrap(),
            ),
            Definition::relation("Q", &[], parse_formula(THREE_CLIQUE).unwrap()),
        ]),
        query: "Q".into(),
        supported: vec![ins],
    }
}

fn max_outdegree_program(max_ins: &str) -> DynamicProgram {
    let ins = UpdateKind::ins("E");
    let del = UpdateKind::del("E");
    let aux = Schema::new()
        .with_relation("Q", 1)
        .with_function("Succ", 1)
        .with_function("Pred", 1)
        .with_function("#edges", 1)
        .with_function("#nodes", 1)
        .with_constant("Zero")
        .with_constant("One")
        .with_constant("Max");
    let edges_ins = "ite(!E(u,v) & x = u, Succ(#edges(x)), #edges(x))";
    let nodes_ins = "ite(!E(u,v) & x = #edges(u), Pred(#nodes(x)), \
                     ite(!E(u,v) & x = Succ(#edges(u)), Succ(#nodes(x)), #nodes(x)))";
    let edges_del = "ite(E(u,v) & x = u, Pred(#edges(x)), #edges(x))";
    let nodes_del = "ite(E(u,v) & x = #edges(u), Pred(#nodes(x)), \
                     ite(E(u,v) & x = Pred(#edges(u)), Succ(#nodes(x)), #nodes(x)))";
    let max_del = "ite(E(u,v) & Max = #edges(u) & #nodes(#edges(u)) = One, Pred(Max), Max)";
    let term = |src: &str| parse_term(src).unwrap();
    let mut rules = Vec::new();
    for (kind, edges, nodes, max) in [
        (&ins, edges_ins, nodes_ins, max_ins),
        (&del, edges_del, nodes_del, max_del),
    ] {
        let params = ["u", "v"];
        rules.push(UpdateRule::formula(
            "Q",
            kind.clone(),
            &params,
            &["x"],
            parse_formula(&format!("{edges} = {max}")).unwrap(),
        ));
        for f in ["Succ", "Pred"] {
            rules.push(UpdateRule::term(f, kind.clone(), &params, &["x"], term(&format!("{f}(x)"))));
        }
        rules.push(UpdateRule::term("#edges", kind.clone(), &params, &["x"], term(edges)));
        rules.push(UpdateRule::term("#nodes", kind.clone(), &params, &["x"], term(nodes)));
        for c in ["Zero", "One"] {
            rules.push(UpdateRule::term(c, kind.clone(), &params, &[], term(c)));
        }
        rules.push(UpdateRule::term("Max", kind.clone(), &params, &[], term(max)));
    }
    DynamicProgram {
        input: Schema::graph(),
        aux,
        rules,
        initializer: Initializer::MaxOutdegree,
        query: "Q".into(),
        supported: vec![ins, del],
    }
}

/// Nodes of maximal outdegree, maintained with unary counter functions
/// over the element order `0 < 1 < ... < n-1` (insertions and deletions).
/// Counters saturate at `n-1`.
pub fn max_outdegree() -> DynamicProgram {
    max_outdegree_program("ite(Max = #edges(u) & !E(u,v), Succ(Max), Max)")
}

/// The maximum-outdegree program with the `Max` insertion term applying
/// `Succ` to the node `u` instead of to `Max`. Kept as a negative exhibit:
/// it disagrees with the recomputed answer.
pub fn max_outdegree_as_written() -> DynamicProgram {
    max_outdegree_program("ite(Max = #edges(u) & !E(u,v), Succ(u), Max)")
}

fn outdegrees(s: &Structure) -> Vec<usize> {
    let mut deg = vec![0; s.size()];
    for t in s.relation("E").expect("graph input").iter() {
        deg[t[0].index()] += 1;
    }
    deg
}

/// Number `i` as an element, clamped to the last element.
fn number(n: usize, i: usize) -> Elem {
    Elem::from(i.min(n - 1))
}

pub(crate) fn init_max_outdegree(s: &mut Structure) -> Result<(), EngineError> {
    let n = s.size();
    if n == 0 {
        return Err(EngineError::Init("the counter program needs a non-empty domain".into()));
    }
    let deg = outdegrees(s);
    let max = deg.iter().copied().max().unwrap_or(0);
    for i in 0..n {
        let e = Elem::from(i);
        s.set_function("Succ", &[e], number(n, i + 1))?;
        s.set_function("Pred", &[e], number(n, i.saturating_sub(1)))?;
        s.set_function("#edges", &[e], number(n, deg[i]))?;
        let count = deg.iter().filter(|d| **d == i).count();
        s.set_function("#nodes", &[e], number(n, count))?;
        if deg[i] == max {
            s.insert("Q", &[e])?;
        }
    }
    s.set_constant("Zero", number(n, 0))?;
    s.set_constant("One", number(n, 1))?;
    s.set_constant("Max", number(n, max))?;
    Ok(())
}

/// Recomputes the nodes of maximal outdegree. Excludes every prefix from
/// the first one on which a counter the program relies on would need a
/// value of at least `n`: an outdegree of `n`, or all `n` nodes sharing a
/// positive outdegree.
#[derive(Default)]
pub struct MaxOutdegreeOracle {
    saturated: bool,
}

impl MaxOutdegreeOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Nodes of maximal outdegree, from scratch.
    pub fn answer(input: &Structure) -> BTreeSet<Elem> {
        let deg = outdegrees(input);
        let max = deg.iter().copied().max().unwrap_or(0);
        input.elements().filter(|e| deg[e.index()] == max).collect()
    }

    pub fn saturates(input: &Structure) -> bool {
        let n = input.size();
        let deg = outdegrees(input);
        deg.iter().any(|d| *d >= n) || (deg[0] > 0 && deg.iter().all(|d| *d == deg[0]))
    }
}

impl Oracle for MaxOutdegreeOracle {
    fn reset(&mut self) {
        self.saturated = false;
    }

    fn expected(&mut self, input: &Structure) -> Option<TupleSet> {
        self.saturated |= Self::saturates(input);
        if self.saturated {
            return None;
        }
        let mut out = TupleSet::new(input.size(), 1);
        for e in Self::answer(input) {
            out.insert(&[e]);
        }
        Some(out)
    }

    fn check_state(&mut self, state: &ProgramState) -> Result<(), String> {
        if self.saturated {
            return Ok(());
        }
        let s = state.structure();
        let deg = outdegrees(s);
        for e in s.elements() {
            let got = s.apply("#edges", &[e]).unwrap();
            if got != number(s.size(), deg[e.index()]) {
                return Err(format!("#edges({}) = {}, outdegree is {}", s.label(e), s.label(got), deg[e.index()]));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{aux_delta, Executor};
    use crate::logic::static_eval;
    use crate::Modification;

    fn e(i: u32) -> Elem {
        Elem(i)
    }

    fn pairs(s: &ProgramState, rel: &str) -> Vec<(String, String)> {
        let st = s.structure();
        st.relation(rel)
            .unwrap()
            .iter()
            .map(|t| (st.label(t[0]).to_string(), st.label(t[1]).to_string()))
            .collect()
    }

    #[test]
    fn insertion_adds_triangle_completing_edges() {
        let p = three_clique();
        let ex = Executor::new(&p).unwrap();
        let g = Structure::graph(
            &["a1", "a2", "a3", "a4", "a5"],
            &[("a2", "a3"), ("a3", "a4"), ("a1", "a5")],
        )
        .unwrap();
        let s0 = ex.init(&g).unwrap();
        let before = pairs(&s0, "R");
        assert_eq!(before, [("a2".into(), "a4".into()), ("a4".into(), "a2".into())]);
        let s1 = ex.step(&s0, &Modification::ins("E", &[e(1), e(4)])).unwrap();
        let after = pairs(&s1, "R");
        for (x, y) in [("a1", "a2"), ("a2", "a1"), ("a3", "a5"), ("a5", "a3"), ("a2", "a4")] {
            assert!(after.contains(&(x.into(), y.into())), "missing ({x},{y})");
        }
        assert_eq!(after.len(), 6);
        assert!(!s1.query_bit());
        assert_eq!(
            aux_delta(&p, &s0, &s1),
            ["+R(a1,a2)", "+R(a2,a1)", "+R(a3,a5)", "+R(a5,a3)"]
        );
    }

    #[test]
    fn query_flips_when_r_holds_for_the_inserted_edge() {
        let p = three_clique();
        let ex = Executor::new(&p).unwrap();
        let g = Structure::graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let s0 = ex.init(&g).unwrap();
        assert!(s0.structure().holds("R", &[e(0), e(2)]).unwrap());
        assert!(!s0.query_bit());
        assert!(ex.step(&s0, &Modification::ins("E", &[e(0), e(2)])).unwrap().query_bit());
        assert!(ex.step(&s0, &Modification::ins("E", &[e(2), e(0)])).unwrap().query_bit());
    }

    #[test]
    fn missing_triangle_edge_is_stored_both_ways() {
        let p = three_clique();
        let ex = Executor::new(&p).unwrap();
        let g = Structure::graph(&["a", "b", "c"], &[("a", "b"), ("c", "b")]).unwrap();
        let s0 = ex.init(&g).unwrap();
        assert_eq!(pairs(&s0, "R"), [("a".into(), "c".into()), ("c".into(), "a".into())]);
        let single = Structure::graph(&["a", "b"], &[("a", "b")]).unwrap();
        assert!(ex.init(&single).unwrap().structure().relation("R").unwrap().is_empty());
        let empty = Structure::graph(&["a", "b", "c"], &[]).unwrap();
        let s = ex.step(&ex.init(&empty).unwrap(), &Modification::ins("E", &[e(0), e(1)])).unwrap();
        assert!(s.structure().relation("R").unwrap().is_empty());
    }

    #[test]
    fn triangle_program_tracks_its_sentence() {
        let p = three_clique();
        let ex = Executor::new(&p).unwrap();
        let sentence = parse_formula(THREE_CLIQUE).unwrap();
        let mut s = ex.init(&Structure::graph(&["a", "b", "c"], &[]).unwrap()).unwrap();
        for (i, (a, b)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
            s = ex.step(&s, &Modification::ins("E", &[e(a), e(b)])).unwrap();
            assert_eq!(s.query_bit(), i == 2);
            assert_eq!(s.query_bit(), static_eval(&s.input(), &sentence).unwrap());
        }
    }

    #[test]
    fn clique_sentences() {
        assert_eq!(clique_sentence(3), parse_formula(THREE_CLIQUE).unwrap());
        let k4 = Structure::graph(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")],
        )
        .unwrap();
        assert!(static_eval(&k4, &clique_sentence(4)).unwrap());
        assert!(!static_eval(&k4, &clique_sentence(5)).unwrap());
    }

    fn counters(s: &ProgramState) -> (Vec<u32>, Vec<u32>, u32) {
        let st = s.structure();
        let edges = st.elements().map(|x| st.apply("#edges", &[x]).unwrap().0).collect();
        let nodes = st.elements().map(|x| st.apply("#nodes", &[x]).unwrap().0).collect();
        (edges, nodes, st.constant("Max").unwrap().0)
    }

    #[test]
    fn outdegree_counters_after_one_insertion() {
        let p = max_outdegree();
        assert!(p.validate().is_ok());
        let ex = Executor::new(&p).unwrap();
        let g = Structure::graph(&["0", "1", "2"], &[]).unwrap();
        let s0 = ex.init(&g).unwrap();
        // #nodes(0) would be 3, which does not exist; it saturates at 2
        assert_eq!(counters(&s0), (vec![0, 0, 0], vec![2, 0, 0], 0));
        let s1 = ex.step(&s0, &Modification::ins("E", &[e(1), e(2)])).unwrap();
        assert_eq!(counters(&s1), (vec![0, 1, 0], vec![1, 1, 0], 1));
        assert_eq!(s1.query_relation().iter().collect::<Vec<_>>(), vec![vec![e(1)]]);
        let again = ex.step(&s1, &Modification::ins("E", &[e(1), e(2)])).unwrap();
        assert_eq!(again.structure(), s1.structure());
    }

    #[test]
    fn outdegree_ties_and_deletions() {
        let p = max_outdegree();
        let ex = Executor::new(&p).unwrap();
        let g = Structure::graph(&["0", "1", "2", "3"], &[]).unwrap();
        let mods = [
            Modification::ins("E", &[e(0), e(1)]),
            Modification::ins("E", &[e(2), e(3)]),
        ];
        let s = ex.run(&ex.init(&g).unwrap(), &mods).unwrap();
        assert_eq!(s.query_relation().iter().collect::<Vec<_>>(), vec![vec![e(0)], vec![e(2)]]);
        let s = ex.step(&s, &Modification::del("E", &[e(0), e(1)])).unwrap();
        assert_eq!(s.query_relation().iter().collect::<Vec<_>>(), vec![vec![e(2)]]);
        let s = ex.step(&s, &Modification::del("E", &[e(2), e(3)])).unwrap();
        assert_eq!(s.query_relation().len(), 4);
        assert_eq!(s.structure().constant("Max").unwrap(), e(0));
    }

    #[test]
    fn succ_pred_clamp() {
        let p = max_outdegree();
        let ex = Executor::new(&p).unwrap();
        let s = ex.init(&Structure::graph(&["0", "1", "2"], &[]).unwrap()).unwrap();
        let t = parse_term("Succ(Pred(Zero))").unwrap();
        let v = crate::logic::eval_term(s.structure(), &t, &Default::default()).unwrap();
        assert_eq!(v, e(1));
        let last = crate::logic::eval_term(s.structure(), &parse_term("Succ(Succ(Succ(Zero)))").unwrap(), &Default::default()).unwrap();
        assert_eq!(last, e(2));
    }
}
