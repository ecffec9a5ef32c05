//! Compilation of semi-positive existential graph sentences into
//! insertion-only quantifier-free dynamic programs.
//!
//! Pipeline: union of conjunctive queries with inequalities, one disjunct
//! per equality type, one subgraph pattern per disjunct, and for each
//! pattern one auxiliary relation per partition `(ȳ, z̄)` with `z̄`
//! non-empty. `R_(ȳ,z̄)` holds the duplicate-free tuples `ā` that extend
//! to the pattern minus the edges inside `ȳ`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::engine::{Definition, DynamicProgram, Initializer, RuleBody, UpdateKind, UpdateRule};
use crate::logic::{Formula, LogicError, Term};
use crate::structure::{find_isomorphism, Elem, Schema, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("unsupported formula: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

type Result<T> = std::result::Result<T, CompileError>;

fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(CompileError::Unsupported(msg.into()))
}

/// `∃ vars` of a conjunction of edge atoms, equalities and inequalities.
/// Terms are variables or constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cq {
    pub vars: Vec<String>,
    pub edges: Vec<(Term, Term)>,
    pub eqs: Vec<(Term, Term)>,
    pub neqs: Vec<(Term, Term)>,
}

impl Cq {
    pub fn to_formula(&self) -> Formula {
        let mut parts: Vec<Formula> = Vec::new();
        parts.extend(self.neqs.iter().map(|(a, b)| Formula::neq(a.clone(), b.clone())));
        parts.extend(self.eqs.iter().map(|(a, b)| Formula::eq(a.clone(), b.clone())));
        parts.extend(
            self.edges
                .iter()
                .map(|(a, b)| Formula::rel("E", vec![a.clone(), b.clone()])),
        );
        let refs: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        Formula::exists(&refs, Formula::and(parts))
    }
}

#[derive(Clone, Debug)]
enum Lit {
    Edge(Term, Term),
    Eq(Term, Term),
    Neq(Term, Term),
}

/// Negation normal form with existentials pulled to the front (bound
/// variables renamed apart), returning the prefix and the matrix as a DNF
/// of literals.
struct Normalizer {
    prefix: Vec<String>,
    used: BTreeSet<String>,
}

impl Normalizer {
    fn fresh(&mut self, base: &str) -> String {
        if self.used.insert(base.to_string()) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|c| self.used.insert(c.clone()))
            .unwrap()
    }

    fn term(t: &Term, scope: &BTreeMap<String, String>) -> Result<Term> {
        match t {
            Term::Var(v) => Ok(match scope.get(v) {
                Some(r) => Term::Var(r.clone()),
                None => Term::Const(v.clone()),
            }),
            Term::Const(_) => Ok(t.clone()),
            _ => unsupported(format!("function term `{t}`")),
        }
    }

    /// DNF of `f` (negated if `positive` is false).
    fn dnf(
        &mut self,
        f: &Formula,
        positive: bool,
        scope: &mut BTreeMap<String, String>,
    ) -> Result<Vec<Vec<Lit>>> {
        Ok(match (f, positive) {
            (Formula::Bool(b), _) => {
                if *b == positive {
                    vec![vec![]]
                } else {
                    vec![]
                }
            }
            (Formula::Rel(r, args), true) => {
                if r != "E" || args.len() != 2 {
                    return unsupported(format!("atom `{f}` (only the binary edge relation E is allowed)"));
                }
                vec![vec![Lit::Edge(Self::term(&args[0], scope)?, Self::term(&args[1], scope)?)]]
            }
            (Formula::Rel(..), false) => return unsupported(format!("negated atom `{f}`")),
            (Formula::Eq(a, b), _) => {
                let (a, b) = (Self::term(a, scope)?, Self::term(b, scope)?);
                vec![vec![if positive { Lit::Eq(a, b) } else { Lit::Neq(a, b) }]]
            }
            (Formula::Not(g), _) => self.dnf(g, !positive, scope)?,
            (Formula::And(fs), true) | (Formula::Or(fs), false) => {
                let mut acc: Vec<Vec<Lit>> = vec![vec![]];
                for g in fs {
                    let d = self.dnf(g, positive, scope)?;
                    acc = acc
                        .iter()
                        .cartesian_product(d.iter())
                        .map(|(a, b)| a.iter().chain(b).cloned().collect())
                        .collect();
                }
                acc
            }
            (Formula::Or(fs), true) | (Formula::And(fs), false) => {
                let mut acc = Vec::new();
                for g in fs {
                    acc.extend(self.dnf(g, positive, scope)?);
                }
                acc
            }
            (Formula::Implies(a, b), _) => {
                let as_or = Formula::Or(vec![Formula::not((**a).clone()), (**b).clone()]);
                self.dnf(&as_or, positive, scope)?
            }
            (Formula::Exists(v, g), true) | (Formula::Forall(v, g), false) => {
                let renamed = self.fresh(v);
                self.prefix.push(renamed.clone());
                let shadowed = scope.insert(v.clone(), renamed);
                let out = self.dnf(g, positive, scope);
                match shadowed {
                    Some(s) => scope.insert(v.clone(), s),
                    None => scope.remove(v),
                };
                out?
            }
            (Formula::Forall(..), true) | (Formula::Exists(..), false) => {
                return unsupported(format!("universal quantification in `{f}`"))
            }
        })
    }
}

/// Rewrites a semi-positive existential sentence as a disjunction of
/// conjunctive queries with inequalities. Disjuncts are not deduplicated.
pub fn to_ucq_neq(sentence: &Formula) -> Result<Vec<Cq>> {
    let mut n = Normalizer {
        prefix: Vec::new(),
        used: BTreeSet::new(),
    };
    let dnf = n.dnf(sentence, true, &mut BTreeMap::new())?;
    Ok(dnf
        .into_iter()
        .map(|lits| {
            let mut cq = Cq {
                vars: n.prefix.clone(),
                ..Default::default()
            };
            for l in lits {
                match l {
                    Lit::Edge(a, b) => cq.edges.push((a, b)),
                    Lit::Eq(a, b) => cq.eqs.push((a, b)),
                    Lit::Neq(a, b) => cq.neqs.push((a, b)),
                }
            }
            cq
        })
        .collect())
}

/// All set partitions of `0..n` as block indices (restricted growth
/// strings), in lexicographic order.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            go(i + 1, n, cur, max.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// One disjunct per equality type of the variables consistent with the
/// query: variables in a block are merged into the block's first variable
/// and distinct blocks are made pairwise unequal. Contradictory queries
/// yield no disjunct.
pub fn expand_equality_types(cq: &Cq) -> Vec<Cq> {
    let index: BTreeMap<&str, usize> = cq
        .vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut out = Vec::new();
    for blocks in set_partitions(cq.vars.len()) {
        let block_of = |t: &Term| match t {
            Term::Var(v) => index.get(v.as_str()).map(|i| blocks[*i]),
            _ => None,
        };
        let rep: Vec<String> = (0..blocks.iter().copied().max().map_or(0, |m| m + 1))
            .map(|b| cq.vars[blocks.iter().position(|x| *x == b).unwrap()].clone())
            .collect();
        let merge = |t: &Term| match block_of(t) {
            Some(b) => Term::Var(rep[b].clone()),
            None => t.clone(),
        };
        let same = |a: &Term, b: &Term| match (block_of(a), block_of(b)) {
            (Some(x), Some(y)) => Some(x == y),
            _ if a == b => Some(true),
            _ => None,
        };
        if cq.neqs.iter().any(|(a, b)| same(a, b) == Some(true))
            || cq.eqs.iter().any(|(a, b)| same(a, b) == Some(false))
        {
            continue;
        }
        let mut merged = Cq {
            vars: rep.clone(),
            ..Default::default()
        };
        for (i, a) in rep.iter().enumerate() {
            for b in &rep[i + 1..] {
                merged.neqs.push((Term::Var(a.clone()), Term::Var(b.clone())));
            }
        }
        for (a, b) in &cq.neqs {
            if same(a, b).is_none() {
                merged.neqs.push((merge(a), merge(b)));
            }
        }
        for (a, b) in &cq.eqs {
            if same(a, b).is_none() {
                merged.eqs.push((merge(a), merge(b)));
            }
        }
        for (a, b) in &cq.edges {
            let e = (merge(a), merge(b));
            if !merged.edges.contains(&e) {
                merged.edges.push(e);
            }
        }
        out.push(merged);
    }
    out
}

/// A directed graph on named nodes; self-loops allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Pattern {
    pub fn new(nodes: &[&str], edges: &[(&str, &str)]) -> Self {
        let nodes: Vec<String> = nodes.iter().map(|s| s.to_string()).collect();
        let pos = |x: &str| nodes.iter().position(|n| n == x).expect("edge over listed nodes");
        let edges = edges.iter().map(|(a, b)| (pos(a), pos(b))).collect();
        Pattern { nodes, edges }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn as_structure(&self) -> Structure {
        let mut s = Structure::new(Schema::graph(), (0..self.len()).map(|i| i.to_string()))
            .expect("distinct labels");
        for (a, b) in &self.edges {
            s.insert("E", &[Elem::from(*a), Elem::from(*b)]).unwrap();
        }
        s
    }

    pub fn is_isomorphic(&self, other: &Pattern) -> bool {
        find_isomorphism(&self.as_structure(), &other.as_structure()).is_some()
    }

    /// The sentence "the graph contains this pattern" (not necessarily
    /// induced, nodes mapped injectively).
    pub fn sentence(&self) -> Formula {
        let mut parts = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                parts.push(Formula::neq(Term::var(&self.nodes[i]), Term::var(&self.nodes[j])));
            }
        }
        for (a, b) in &self.edges {
            parts.push(Formula::rel_vars("E", &[&self.nodes[*a], &self.nodes[*b]]));
        }
        let vars: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        Formula::exists(&vars, Formula::and(parts))
    }
}

/// The pattern of an all-distinct conjunctive query: its variables and edge
/// atoms.
pub fn pattern_of(cq: &Cq) -> Result<Pattern> {
    let pos = |t: &Term| -> Result<usize> {
        match t {
            Term::Var(v) => cq
                .vars
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| CompileError::Unsupported(format!("free variable `{v}`"))),
            other => unsupported(format!("constant `{other}` in a graph pattern")),
        }
    };
    if let Some((a, b)) = cq.eqs.first() {
        return unsupported(format!("equation `{a} = {b}` left after equality-type expansion"));
    }
    for (a, b) in &cq.neqs {
        pos(a)?;
        pos(b)?;
    }
    let mut edges = BTreeSet::new();
    for (a, b) in &cq.edges {
        edges.insert((pos(a)?, pos(b)?));
    }
    Ok(Pattern {
        nodes: cq.vars.clone(),
        edges,
    })
}

/// A split of the pattern's nodes into an ordered prefix `y` and the
/// remaining nodes `z` in pattern order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

impl Partition {
    pub fn new(h: &Pattern, y: &[usize]) -> Self {
        let z = (0..h.len()).filter(|i| !y.contains(i)).collect();
        Partition { y: y.to_vec(), z }
    }

    /// Partitions with the given nodes named in `y`, in order.
    pub fn named(h: &Pattern, y: &[&str]) -> Self {
        let idx: Vec<usize> = y
            .iter()
            .map(|n| h.nodes.iter().position(|x| x == n).expect("pattern node"))
            .collect();
        Partition::new(h, &idx)
    }
}

/// All partitions with `z` non-empty, by increasing `|y|`, then by `y`
/// lexicographically.
pub fn partitions(h: &Pattern) -> Vec<Partition> {
    let mut out = Vec::new();
    for l in 0..h.len() {
        for y in (0..h.len()).permutations(l) {
            out.push(Partition::new(h, &y));
        }
    }
    out
}

/// Whether `a` (duplicate-free) extends to the pattern minus the edges
/// inside `y`: some injective assignment of the `z` nodes to elements
/// outside `a` maps every remaining edge to an edge of `g`.
pub fn extends_to(g: &Structure, a: &[Elem], h: &Pattern, part: &Partition) -> bool {
    assert_eq!(a.len(), part.y.len());
    if a.iter().collect::<BTreeSet<_>>().len() != a.len() {
        return false;
    }
    let e = g.relation("E").expect("graph structure");
    let mut image: Vec<Option<Elem>> = vec![None; h.len()];
    for (node, el) in part.y.iter().zip(a) {
        image[*node] = Some(*el);
    }
    let inside_y = |p: usize, q: usize| part.y.contains(&p) && part.y.contains(&q);
    let free: Vec<Elem> = g.elements().filter(|x| !a.contains(x)).collect();
    for b in free.iter().copied().permutations(part.z.len()) {
        for (node, el) in part.z.iter().zip(&b) {
            image[*node] = Some(*el);
        }
        let ok = h.edges.iter().all(|&(p, q)| {
            inside_y(p, q) || e.contains(&[image[p].unwrap(), image[q].unwrap()])
        });
        if ok {
            return true;
        }
    }
    false
}

fn relation_name(prefix: &str, h: &Pattern, part: &Partition) -> String {
    let names = |xs: &[usize]| xs.iter().map(|i| h.nodes[*i].as_str()).join("_");
    let y = names(&part.y);
    let z = names(&part.z);
    match (y.is_empty(), z.is_empty()) {
        (true, _) => format!("{prefix}_y_z_{z}"),
        (false, _) => format!("{prefix}_y_{y}_z_{z}"),
    }
}

fn distinct(ts: &[Term]) -> Vec<Formula> {
    ts.iter()
        .tuple_combinations()
        .map(|(a, b)| Formula::neq(a.clone(), b.clone()))
        .collect()
}

/// `E(a,b)` after inserting `(u,v)`, simplified where the parameters are
/// literally `u` and `v`.
fn edge_after(a: &Term, b: &Term) -> Formula {
    let (u, v) = (Term::var("u"), Term::var("v"));
    let old = Formula::rel("E", vec![a.clone(), b.clone()]);
    let mut eqs = Vec::new();
    if *a != u {
        eqs.push(Formula::eq(a.clone(), u));
    }
    if *b != v {
        eqs.push(Formula::eq(b.clone(), v));
    }
    if eqs.is_empty() {
        return Formula::Bool(true);
    }
    Formula::Or(vec![old, Formula::and(eqs)])
}

/// Places `moved` (node, term) pairs at the given positions among the `y`
/// nodes and target terms.
fn interleave(
    ys: &[usize],
    targets: &[Term],
    moved: &[(usize, Term)],
    positions: &[usize],
) -> (Vec<usize>, Vec<Term>) {
    let total = ys.len() + moved.len();
    let (mut nodes, mut terms) = (Vec::with_capacity(total), Vec::with_capacity(total));
    let mut rest = ys.iter().zip(targets);
    for slot in 0..total {
        match positions.iter().position(|p| *p == slot) {
            Some(k) => {
                nodes.push(moved[k].0);
                terms.push(moved[k].1.clone());
            }
            None => {
                let (n, t) = rest.next().unwrap();
                nodes.push(*n);
                terms.push(t.clone());
            }
        }
    }
    (nodes, terms)
}

struct PatternCompiler<'h> {
    h: &'h Pattern,
    prefix: String,
}

impl PatternCompiler<'_> {
    fn name(&self, part: &Partition) -> String {
        relation_name(&self.prefix, self.h, part)
    }

    /// The case where the `moved` z-nodes are mapped to `u`/`v` and become
    /// part of `y`.
    fn case(&self, part: &Partition, targets: &[Term], moved: &[(usize, Term)], positions: &[usize]) -> Formula {
        let (ys, terms) = interleave(&part.y, targets, moved, positions);
        let new_part = Partition::new(self.h, &ys);
        let mut parts = Vec::new();
        if new_part.z.is_empty() {
            parts.extend(distinct(&terms));
        } else {
            parts.push(Formula::rel(&self.name(&new_part), terms.clone()));
        }
        for (_, w) in moved {
            for t in targets {
                parts.push(Formula::neq(w.clone(), t.clone()));
            }
        }
        if moved.len() == 2 {
            parts.push(Formula::neq(moved[0].1.clone(), moved[1].1.clone()));
        }
        let term_of = |node: usize| terms[ys.iter().position(|x| *x == node).unwrap()].clone();
        for &(p, q) in &self.h.edges {
            let touches = moved.iter().any(|(m, _)| *m == p || *m == q);
            if touches && ys.contains(&p) && ys.contains(&q) {
                parts.push(edge_after(&term_of(p), &term_of(q)));
            }
        }
        Formula::and(parts)
    }

    fn update_rule(&self, part: &Partition) -> Formula {
        let targets: Vec<Term> = (1..=part.y.len()).map(|i| Term::Var(format!("y{i}"))).collect();
        let (u, v) = (Term::var("u"), Term::var("v"));
        let l = part.y.len();
        let mut cases = Vec::new();
        for &zj in &part.z {
            for w in [&u, &v] {
                for pos in 0..=l {
                    cases.push(self.case(part, &targets, &[(zj, w.clone())], &[pos]));
                }
            }
        }
        for (&zu, &zv) in part.z.iter().tuple_combinations().flat_map(|(a, b)| [(a, b), (b, a)]) {
            for (pu, pv) in (0..l + 2).cartesian_product(0..l + 2) {
                if pu != pv {
                    cases.push(self.case(
                        part,
                        &targets,
                        &[(zu, u.clone()), (zv, v.clone())],
                        &[pu, pv],
                    ));
                }
            }
        }
        let mut guarded = distinct(&targets);
        guarded.push(Formula::or(cases));
        Formula::Or(vec![
            Formula::rel(&self.name(part), targets.clone()),
            Formula::and(guarded),
        ])
    }

    fn definition(&self, part: &Partition) -> Formula {
        let y: Vec<Term> = (1..=part.y.len()).map(|i| Term::Var(format!("y{i}"))).collect();
        let z: Vec<Term> = (1..=part.z.len()).map(|i| Term::Var(format!("z{i}"))).collect();
        let term_of = |node: usize| match part.y.iter().position(|x| *x == node) {
            Some(i) => y[i].clone(),
            None => z[part.z.iter().position(|x| *x == node).unwrap()].clone(),
        };
        let all: Vec<Term> = y.iter().chain(&z).cloned().collect();
        let mut body = distinct(&all);
        for &(p, q) in &self.h.edges {
            if !(part.y.contains(&p) && part.y.contains(&q)) {
                body.push(Formula::rel("E", vec![term_of(p), term_of(q)]));
            }
        }
        let zs: Vec<String> = (1..=part.z.len()).map(|i| format!("z{i}")).collect();
        let zrefs: Vec<&str> = zs.iter().map(String::as_str).collect();
        Formula::exists(&zrefs, Formula::and(body))
    }
}

struct Component {
    aux: Schema,
    rules: Vec<UpdateRule>,
    definitions: Vec<Definition>,
    query: String,
}

fn compile_component(h: &Pattern, prefix: &str) -> Component {
    let pc = PatternCompiler {
        h,
        prefix: prefix.to_string(),
    };
    let ins = UpdateKind::ins("E");
    let mut aux = Schema::new();
    let mut rules = Vec::new();
    let mut definitions = Vec::new();
    for part in partitions(h) {
        let name = pc.name(&part);
        aux.add_relation(&name, part.y.len()).expect("partition names are unique");
        let ys: Vec<String> = (1..=part.y.len()).map(|i| format!("y{i}")).collect();
        let yrefs: Vec<&str> = ys.iter().map(String::as_str).collect();
        rules.push(UpdateRule::formula(&name, ins.clone(), &["u", "v"], &yrefs, pc.update_rule(&part)));
        definitions.push(Definition::relation(&name, &yrefs, pc.definition(&part)));
    }
    let query = pc.name(&Partition::new(h, &[]));
    Component {
        aux,
        rules,
        definitions,
        query,
    }
}

fn constant_program(value: bool) -> DynamicProgram {
    let ins = UpdateKind::ins("E");
    DynamicProgram {
        input: Schema::graph(),
        aux: Schema::new().with_relation("Q", 0),
        rules: vec![UpdateRule::formula("Q", ins.clone(), &["u", "v"], &[], Formula::Bool(value))],
        initializer: Initializer::StaticBruteforce(vec![Definition::relation("Q", &[], Formula::Bool(value))]),
        query: "Q".into(),
        supported: vec![ins],
    }
}

/// The insertion-only program for "the graph contains `h`". Its query is
/// the 0-ary relation of the partition with empty `y`; auxiliary relations
/// are named `R_y_<y nodes>_z_<z nodes>`. The empty pattern yields a
/// constant-true program.
pub fn compile_pattern(h: &Pattern) -> DynamicProgram {
    if h.is_empty() {
        return constant_program(true);
    }
    let c = compile_component(h, "R");
    DynamicProgram {
        input: Schema::graph(),
        aux: c.aux,
        rules: c.rules,
        initializer: Initializer::StaticBruteforce(c.definitions),
        query: c.query,
        supported: vec![UpdateKind::ins("E")],
    }
}

/// The patterns of a sentence, one per isomorphism class, in order of
/// first appearance.
pub fn patterns_of(sentence: &Formula) -> Result<Vec<Pattern>> {
    let free = sentence.free_variables();
    if !free.is_empty() {
        return unsupported(format!(
            "only sentences are compiled; free variables or constants: {}",
            free.iter().join(", ")
        ));
    }
    let mut out: Vec<Pattern> = Vec::new();
    for cq in to_ucq_neq(sentence)? {
        for d in expand_equality_types(&cq) {
            let h = pattern_of(&d)?;
            if !out.iter().any(|g| g.is_isomorphic(&h)) {
                out.push(h);
            }
        }
    }
    Ok(out)
}

/// The insertion-only program for a semi-positive existential sentence over
/// `{E}`: the disjoint union of the pattern programs (relations prefixed
/// `H0`, `H1`, ...) plus a 0-ary `Q` updated by the disjunction of the
/// components' query rules.
pub fn compile_semipositive(sentence: &Formula) -> Result<DynamicProgram> {
    let patterns = patterns_of(sentence)?;
    if patterns.is_empty() {
        return Ok(constant_program(false));
    }
    if patterns.iter().any(Pattern::is_empty) {
        return Ok(constant_program(true));
    }
    let ins = UpdateKind::ins("E");
    let mut aux = Schema::new().with_relation("Q", 0);
    let mut rules = Vec::new();
    let mut definitions = Vec::new();
    let mut query_rules = Vec::new();
    let mut query_atoms = Vec::new();
    for (i, h) in patterns.iter().enumerate() {
        let c = compile_component(h, &format!("H{i}"));
        for (name, arity) in c.aux.relations() {
            aux.add_relation(name, *arity).expect("component prefixes are distinct");
        }
        for r in &c.rules {
            if r.symbol == c.query {
                let RuleBody::Formula(f) = &r.body else { unreachable!() };
                query_rules.push(f.clone());
            }
        }
        rules.extend(c.rules);
        definitions.extend(c.definitions);
        query_atoms.push(Formula::rel(&c.query, vec![]));
    }
    rules.insert(0, UpdateRule::formula("Q", ins.clone(), &["u", "v"], &[], Formula::or(query_rules)));
    definitions.push(Definition::relation("Q", &[], Formula::or(query_atoms)));
    let p = DynamicProgram {
        input: Schema::graph(),
        aux,
        rules,
        initializer: Initializer::StaticBruteforce(definitions),
        query: "Q".into(),
        supported: vec![ins],
    };
    debug_assert!(p.is_dynprop());
    Ok(p)
}

/// Number of quantified variables of a sentence in prenex position after
/// normalization.
pub fn quantifier_count(sentence: &Formula) -> Result<usize> {
    Ok(to_ucq_neq(sentence)?.first().map_or(0, |cq| cq.vars.len()))
}

/// A four-node pattern (a 2-path `x3 -> x1 -> x2` with shortcut
/// `x3 -> x2` and tail `x2 -> x4`) as a sentence.
pub const EXTENSION_SENTENCE: &str = "exists x1 x2 x3 x4. x1 != x2 & x1 != x3 & x1 != x4 & x2 != x3 & x2 != x4 & x3 != x4 & E(x3,x1) & E(x1,x2) & E(x3,x2) & E(x2,x4)";

/// The pattern of [`EXTENSION_SENTENCE`] and a graph on `a1..a5` in which
/// `(a1,a2,a3)` extends to the pattern with `y = (x1,x2,x3)` while `(a1,a2)`
/// extends with `y = (x1,x2)` only once `(a3,a1)` is inserted.
pub fn extension_example() -> (Pattern, Structure) {
    let h = Pattern::new(
        &["x1", "x2", "x3", "x4"],
        &[("x3", "x1"), ("x1", "x2"), ("x3", "x2"), ("x2", "x4")],
    );
    let g = Structure::graph(
        &["a1", "a2", "a3", "a4", "a5"],
        &[("a1", "a2"), ("a3", "a2"), ("a2", "a4"), ("a5", "a4")],
    )
    .expect("well-formed graph");
    (h, g)
}

/// Sentences the compiler is exercised on, by name.
pub fn sentence_corpus() -> Vec<(&'static str, Formula)> {
    let parse = |src: &str| crate::logic::parse_formula(src).expect("corpus sentence parses");
    vec![
        ("3-clique", crate::engine::builtins::clique_sentence(3)),
        ("4-clique", crate::engine::builtins::clique_sentence(4)),
        ("extension-pattern", parse(EXTENSION_SENTENCE)),
        ("self-loop", parse("exists x. E(x,x)")),
        ("some-edge", parse("exists x y. E(x,y)")),
        ("2-path", parse("exists x y z. x != y & y != z & x != z & E(x,y) & E(y,z)")),
    ]
}
