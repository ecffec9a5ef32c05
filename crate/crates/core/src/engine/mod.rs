//! Dynamic programs: update rules for auxiliary relations and functions,
//! initialization, and simultaneous one-step execution.

pub mod builtins;
mod difftest;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{CompiledFormula, CompiledTerm, Formula, LogicError, Term};
use crate::structure::{
    apply_in_place, tuples_over, Elem, FunctionTable, ModKind, Modification, Schema,
    Structure, StructureError, TupleSet,
};

pub use difftest::{
    difftest, difftest_with, random_database, random_modification, DifftestConfig,
    DifftestReport, Mismatch, Oracle, SentenceOracle,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("rule for `{symbol}` on {kind}: {source}")]
    Rule {
        symbol: String,
        kind: UpdateKind,
        source: LogicError,
    },
    #[error("initialization failed: {0}")]
    Init(String),
    #[error("unsupported modification: {0}")]
    Unsupported(String),
    #[error("modification touches non-modifiable element `{0}`")]
    OutsideModifiable(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A modification kind: `ins_S` or `del_S` for an input relation `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpdateKind {
    pub kind: ModKind,
    pub relation: String,
}

impl UpdateKind {
    pub fn ins(relation: &str) -> Self {
        UpdateKind {
            kind: ModKind::Ins,
            relation: relation.to_string(),
        }
    }

    pub fn del(relation: &str) -> Self {
        UpdateKind {
            kind: ModKind::Del,
            relation: relation.to_string(),
        }
    }

    pub fn of(m: &Modification) -> Self {
        UpdateKind {
            kind: m.kind,
            relation: m.relation.clone(),
        }
    }
}

impl fmt::Display for UpdateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.relation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleBody {
    Formula(Formula),
    Term(Term),
}

impl fmt::Display for RuleBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleBody::Formula(g) => write!(f, "{g}"),
            RuleBody::Term(t) => write!(f, "{t}"),
        }
    }
}

/// `symbol(targets) := body` after a modification of kind `on` with the
/// modified tuple bound to `params`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateRule {
    pub symbol: String,
    pub on: UpdateKind,
    pub params: Vec<String>,
    pub targets: Vec<String>,
    pub body: RuleBody,
}

impl UpdateRule {
    pub fn formula(symbol: &str, on: UpdateKind, params: &[&str], targets: &[&str], body: Formula) -> Self {
        UpdateRule {
            symbol: symbol.to_string(),
            on,
            params: params.iter().map(|s| s.to_string()).collect(),
            targets: targets.iter().map(|s| s.to_string()).collect(),
            body: RuleBody::Formula(body),
        }
    }

    pub fn term(symbol: &str, on: UpdateKind, params: &[&str], targets: &[&str], body: Term) -> Self {
        UpdateRule {
            symbol: symbol.to_string(),
            on,
            params: params.iter().map(|s| s.to_string()).collect(),
            targets: targets.iter().map(|s| s.to_string()).collect(),
            body: RuleBody::Term(body),
        }
    }

    fn bound_names(&self) -> Vec<&str> {
        self.params
            .iter()
            .chain(&self.targets)
            .map(String::as_str)
            .collect()
    }

    /// True if the rule leaves its symbol unchanged by its shape alone,
    /// e.g. `R(y1,y2) := R(y1,y2)`.
    pub fn is_identity(&self) -> bool {
        let target_terms: Vec<Term> = self.targets.iter().map(|t| Term::Var(t.clone())).collect();
        let shadowed = self.targets.iter().any(|t| self.params.contains(t));
        if shadowed {
            return false;
        }
        match &self.body {
            RuleBody::Formula(Formula::Rel(r, args)) => *r == self.symbol && *args == target_terms,
            RuleBody::Term(Term::App(f, args)) => *f == self.symbol && *args == target_terms,
            RuleBody::Term(Term::Const(c)) | RuleBody::Term(Term::Var(c)) => {
                *c == self.symbol && self.targets.is_empty() && !self.params.contains(c)
            }
            _ => false,
        }
    }
}

/// Definition of one auxiliary symbol from the initial input, evaluated by
/// exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub symbol: String,
    pub params: Vec<String>,
    pub body: RuleBody,
}

impl Definition {
    pub fn relation(symbol: &str, params: &[&str], body: Formula) -> Self {
        Definition {
            symbol: symbol.to_string(),
            params: params.iter().map(|s| s.to_string()).collect(),
            body: RuleBody::Formula(body),
        }
    }
}

/// Which boolean graph property the padding initializer tabulates, and
/// over how many modifiable elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddingInit {
    pub variant: crate::padding::PaddingVariant,
    pub plus: usize,
    /// Truth table over all graphs on the modifiable elements, indexed by
    /// the row-major adjacency encoding, packed little-endian into bytes and
    /// written in hex.
    pub truth_table: String,
}

/// How the auxiliary database is computed from the initial input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Initializer {
    /// All auxiliary relations empty, all functions constant to the first
    /// element.
    Empty,
    /// Exhaustive evaluation of one definition per symbol, in order; later
    /// definitions may refer to earlier ones. Symbols without a definition
    /// stay empty.
    StaticBruteforce(Vec<Definition>),
    /// Counters of the maximum-outdegree program.
    MaxOutdegree,
    /// Lookup tables of a padding program.
    Padding(PaddingInit),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicProgram {
    pub input: Schema,
    pub aux: Schema,
    pub rules: Vec<UpdateRule>,
    pub initializer: Initializer,
    pub query: String,
    pub supported: Vec<UpdateKind>,
}

impl DynamicProgram {
    /// Input symbols first, then auxiliary symbols.
    pub fn combined_schema(&self) -> Result<Schema, EngineError> {
        self.input
            .union(&self.aux)
            .map_err(|e| EngineError::InvalidProgram(e.to_string()))
    }

    pub fn rule(&self, symbol: &str, on: &UpdateKind) -> Option<&UpdateRule> {
        self.rules.iter().find(|r| r.symbol == symbol && r.on == *on)
    }

    pub fn supports(&self, on: &UpdateKind) -> bool {
        self.supported.contains(on)
    }

    /// Maximal arity of an auxiliary relation.
    pub fn arity(&self) -> usize {
        self.aux.max_relation_arity()
    }

    /// Quantifier-free rules and no auxiliary functions or constants.
    pub fn is_dynprop(&self) -> bool {
        self.aux.functions().is_empty() && self.is_quantifier_free()
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.rules.iter().all(|r| match &r.body {
            RuleBody::Formula(f) => f.is_quantifier_free(),
            RuleBody::Term(t) => t.is_quantifier_free(),
        })
    }

    /// Checks the structural invariants: exactly one rule per auxiliary
    /// symbol and supported kind, matching parameter and target counts, all
    /// rules resolvable against the combined schema, and a relational query
    /// symbol.
    pub fn validate(&self) -> Result<(), EngineError> {
        let combined = self.combined_schema()?;
        let invalid = |m: String| Err(EngineError::InvalidProgram(m));
        match self.aux.relation(&self.query) {
            Some(_) => {}
            None => return invalid(format!("query symbol `{}` is not an auxiliary relation", self.query)),
        }
        for kind in &self.supported {
            if self.input.relation(&kind.relation).is_none() {
                return invalid(format!("supported kind `{kind}` names no input relation"));
            }
        }
        let mut seen = BTreeSet::new();
        for r in &self.rules {
            if !self.supports(&r.on) {
                return invalid(format!("rule for `{}` on unsupported kind `{}`", r.symbol, r.on));
            }
            if !seen.insert((r.symbol.clone(), r.on.clone())) {
                return invalid(format!("two rules for `{}` on `{}`", r.symbol, r.on));
            }
            let (_, in_arity) = self.input.relation(&r.on.relation).unwrap();
            if r.params.len() != in_arity {
                return invalid(format!(
                    "rule for `{}` on `{}` binds {} parameters, relation has arity {in_arity}",
                    r.symbol,
                    r.on,
                    r.params.len()
                ));
            }
            let arity = match (&r.body, self.aux.relation(&r.symbol), self.aux.function(&r.symbol)) {
                (RuleBody::Formula(_), Some((_, a)), _) => a,
                (RuleBody::Term(_), _, Some((_, a))) => a,
                _ => return invalid(format!("`{}` is not an auxiliary symbol of the rule's kind", r.symbol)),
            };
            if r.targets.len() != arity {
                return invalid(format!("rule for `{}` has {} targets, symbol has arity {arity}", r.symbol, r.targets.len()));
            }
            compile_rule(&combined, r)?;
        }
        for kind in &self.supported {
            for (name, _) in self.aux.relations().iter().chain(self.aux.functions()) {
                if !seen.contains(&(name.clone(), kind.clone())) {
                    return invalid(format!("no rule for `{name}` on `{kind}`"));
                }
            }
        }
        Ok(())
    }
}

enum Compiled {
    Relation(CompiledFormula),
    Function(CompiledTerm),
}

fn compile_rule(schema: &Schema, r: &UpdateRule) -> Result<Compiled, EngineError> {
    let names = r.bound_names();
    let wrap = |source| EngineError::Rule {
        symbol: r.symbol.clone(),
        kind: r.on.clone(),
        source,
    };
    Ok(match &r.body {
        RuleBody::Formula(f) => Compiled::Relation(CompiledFormula::new(schema, f, &names).map_err(wrap)?),
        RuleBody::Term(t) => Compiled::Function(CompiledTerm::new(schema, t, &names).map_err(wrap)?),
    })
}

/// A program state: the domain, the current input database and the
/// auxiliary database, stored as one structure over the combined schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramState {
    structure: Structure,
    input: Arc<Schema>,
    query: String,
    modifiable: Option<BTreeSet<Elem>>,
}

impl ProgramState {
    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// The current input database.
    pub fn input(&self) -> Structure {
        self.structure
            .reduct(self.input.clone())
            .expect("state contains its input schema")
    }

    pub fn input_schema(&self) -> &Schema {
        &self.input
    }

    pub fn query_relation(&self) -> &TupleSet {
        self.structure.relation(&self.query).expect("query relation present")
    }

    /// The query bit of a boolean program.
    pub fn query_bit(&self) -> bool {
        self.query_relation().contains(&[])
    }

    /// Elements that modifications may touch; `None` means all.
    pub fn modifiable(&self) -> Option<&BTreeSet<Elem>> {
        self.modifiable.as_ref()
    }

    pub fn set_modifiable(&mut self, elems: Option<BTreeSet<Elem>>) {
        self.modifiable = elems;
    }

    /// Mutable access for tests that build states by hand.
    pub fn structure_mut(&mut self) -> &mut Structure {
        &mut self.structure
    }

    /// A state from an explicit structure over the combined schema.
    pub fn from_structure(p: &DynamicProgram, structure: Structure) -> Result<Self, EngineError> {
        if *structure.schema() != p.combined_schema()? {
            return Err(EngineError::Init("structure is not over the program's schema".into()));
        }
        Ok(ProgramState {
            structure,
            input: Arc::new(p.input.clone()),
            query: p.query.clone(),
            modifiable: None,
        })
    }
}

/// A program with its rules resolved, ready to run.
pub struct Executor<'p> {
    program: &'p DynamicProgram,
    schema: Arc<Schema>,
    rules: BTreeMap<UpdateKind, Vec<StepRule>>,
}

struct StepRule {
    symbol: SymbolSlot,
    code: Compiled,
    arity: usize,
}

#[derive(Clone, Copy)]
enum SymbolSlot {
    Relation(usize),
    Function(usize),
}

impl<'p> Executor<'p> {
    pub fn new(program: &'p DynamicProgram) -> Result<Self, EngineError> {
        program.validate()?;
        let schema = Arc::new(program.combined_schema()?);
        let mut rules: BTreeMap<UpdateKind, Vec<StepRule>> = BTreeMap::new();
        for r in &program.rules {
            if r.is_identity() {
                continue;
            }
            let code = compile_rule(&schema, r)?;
            let (symbol, arity) = match &code {
                Compiled::Relation(_) => {
                    let (i, a) = schema.relation(&r.symbol).unwrap();
                    (SymbolSlot::Relation(i), a)
                }
                Compiled::Function(_) => {
                    let (i, a) = schema.function(&r.symbol).unwrap();
                    (SymbolSlot::Function(i), a)
                }
            };
            rules.entry(r.on.clone()).or_default().push(StepRule { symbol, code, arity });
        }
        for k in &program.supported {
            rules.entry(k.clone()).or_default();
        }
        Ok(Executor { program, schema, rules })
    }

    pub fn program(&self) -> &DynamicProgram {
        self.program
    }

    /// Computes the initial state for an input database.
    pub fn init(&self, input: &Structure) -> Result<ProgramState, EngineError> {
        let p = self.program;
        if *input.schema() != p.input {
            return Err(EngineError::Init("input is not over the program's input schema".into()));
        }
        let mut structure = Structure::new(self.schema.clone(), input.labels().iter().cloned())
            .map_err(|e| EngineError::Init(e.to_string()))?;
        structure.overwrite_from(input)?;
        let mut state = ProgramState {
            structure,
            input: Arc::new(p.input.clone()),
            query: p.query.clone(),
            modifiable: None,
        };
        match &p.initializer {
            Initializer::Empty => {}
            Initializer::StaticBruteforce(defs) => {
                for d in defs {
                    apply_definition(&mut state.structure, d)?;
                }
            }
            Initializer::MaxOutdegree => builtins::init_max_outdegree(&mut state.structure)?,
            Initializer::Padding(init) => crate::padding::initialize(&mut state, init)?,
        }
        Ok(state)
    }

    /// One simultaneous update: every rule is evaluated in the old state,
    /// then the input database is modified.
    pub fn step(&self, state: &ProgramState, m: &Modification) -> Result<ProgramState, EngineError> {
        let kind = UpdateKind::of(m);
        let Some(rules) = self.rules.get(&kind) else {
            return Err(EngineError::Unsupported(format!(
                "`{kind}` is not supported by this program"
            )));
        };
        if self.program.input.relation(&m.relation).is_none() {
            return Err(EngineError::Unsupported(format!("`{}` is not an input relation", m.relation)));
        }
        if let Some(allowed) = &state.modifiable {
            if let Some(e) = m.tuple.iter().find(|e| !allowed.contains(e)) {
                return Err(EngineError::OutsideModifiable(
                    state.structure.labels().get(e.index()).cloned().unwrap_or_default(),
                ));
            }
        }
        let old = &state.structure;
        let mut next = old.clone();
        let elems: Vec<Elem> = old.elements().collect();
        let k = m.tuple.len();
        for rule in rules {
            match (&rule.code, rule.symbol) {
                (Compiled::Relation(f), SymbolSlot::Relation(i)) => {
                    let mut env = f.env();
                    env.slots_mut()[..k].copy_from_slice(&m.tuple);
                    let mut set = TupleSet::new(old.size(), rule.arity);
                    for t in tuples_over(&elems, rule.arity) {
                        env.slots_mut()[k..k + rule.arity].copy_from_slice(&t);
                        if f.eval(old, &mut env) {
                            set.insert(&t);
                        }
                    }
                    next.set_relation_at(i, set);
                }
                (Compiled::Function(t), SymbolSlot::Function(i)) => {
                    let mut env = t.env();
                    env.slots_mut()[..k].copy_from_slice(&m.tuple);
                    let mut table = FunctionTable::new(old.size(), rule.arity);
                    for args in tuples_over(&elems, rule.arity) {
                        env.slots_mut()[k..k + rule.arity].copy_from_slice(&args);
                        table.set(&args, t.eval(old, &mut env));
                    }
                    next.set_function_at(i, table);
                }
                _ => unreachable!("rule kinds match symbol kinds after validation"),
            }
        }
        apply_in_place(&mut next, m)?;
        Ok(ProgramState {
            structure: next,
            input: state.input.clone(),
            query: state.query.clone(),
            modifiable: state.modifiable.clone(),
        })
    }

    /// Left fold of [`Executor::step`]; on failure reports the index of the
    /// offending modification.
    pub fn run(
        &self,
        state: &ProgramState,
        ms: &[Modification],
    ) -> Result<ProgramState, (usize, EngineError)> {
        let mut s = state.clone();
        for (i, m) in ms.iter().enumerate() {
            s = self.step(&s, m).map_err(|e| (i, e))?;
        }
        Ok(s)
    }
}

fn apply_definition(s: &mut Structure, d: &Definition) -> Result<(), EngineError> {
    let names: Vec<&str> = d.params.iter().map(String::as_str).collect();
    let elems: Vec<Elem> = s.elements().collect();
    match &d.body {
        RuleBody::Formula(f) => {
            let (i, arity) = s
                .schema()
                .relation(&d.symbol)
                .ok_or_else(|| EngineError::Init(format!("`{}` is not a relation", d.symbol)))?;
            if arity != names.len() {
                return Err(EngineError::Init(format!("definition of `{}` has wrong arity", d.symbol)));
            }
            let code = CompiledFormula::new(s.schema(), f, &names)?;
            let mut set = TupleSet::new(s.size(), arity);
            for t in tuples_over(&elems, arity) {
                if code.eval_with(s, &t) {
                    set.insert(&t);
                }
            }
            s.set_relation_at(i, set);
        }
        RuleBody::Term(t) => {
            let (i, arity) = s
                .schema()
                .function(&d.symbol)
                .ok_or_else(|| EngineError::Init(format!("`{}` is not a function", d.symbol)))?;
            if arity != names.len() {
                return Err(EngineError::Init(format!("definition of `{}` has wrong arity", d.symbol)));
            }
            let code = CompiledTerm::new(s.schema(), t, &names)?;
            let mut table = FunctionTable::new(s.size(), arity);
            for args in tuples_over(&elems, arity) {
                table.set(&args, code.eval_with(s, &args));
            }
            s.set_function_at(i, table);
        }
    }
    Ok(())
}

/// Initial state of `p` on `input`.
pub fn init_state(p: &DynamicProgram, input: &Structure) -> Result<ProgramState, EngineError> {
    Executor::new(p)?.init(input)
}

pub fn step(p: &DynamicProgram, s: &ProgramState, m: &Modification) -> Result<ProgramState, EngineError> {
    Executor::new(p)?.step(s, m)
}

pub fn run(
    p: &DynamicProgram,
    s: &ProgramState,
    ms: &[Modification],
) -> Result<ProgramState, (usize, EngineError)> {
    Executor::new(p).map_err(|e| (0, e))?.run(s, ms)
}

/// Changes to auxiliary symbols between two states over the same program,
/// rendered as `+R(a,b)`, `-R(a,b)` and `f(a)=b` (new value), in schema
/// order.
pub fn aux_delta(p: &DynamicProgram, before: &ProgramState, after: &ProgramState) -> Vec<String> {
    let (a, b) = (&before.structure, &after.structure);
    let mut out = Vec::new();
    for (name, _) in p.aux.relations() {
        let (ra, rb) = (a.relation(name).unwrap(), b.relation(name).unwrap());
        if ra == rb {
            continue;
        }
        let old: BTreeSet<Vec<Elem>> = ra.iter().collect();
        let new: BTreeSet<Vec<Elem>> = rb.iter().collect();
        for t in new.difference(&old) {
            out.push(format!("+{name}{}", render_args(a, t)));
        }
        for t in old.difference(&new) {
            out.push(format!("-{name}{}", render_args(a, t)));
        }
    }
    for (name, arity) in p.aux.functions() {
        let (fa, fb) = (a.function_table(name).unwrap(), b.function_table(name).unwrap());
        if fa == fb {
            continue;
        }
        if *arity == 0 {
            out.push(format!("{name}={}", b.label(fb.get(&[]))));
            continue;
        }
        let mut points: BTreeSet<Vec<Elem>> = fa.exceptions().into_iter().map(|(k, _)| k).collect();
        points.extend(fb.exceptions().into_iter().map(|(k, _)| k));
        for args in points {
            let (va, vb) = (fa.get(&args), fb.get(&args));
            if va != vb {
                out.push(format!("{name}{}={}", a.render_tuple(&args), b.label(vb)));
            }
        }
    }
    out
}

fn render_args(s: &Structure, t: &[Elem]) -> String {
    if t.is_empty() {
        String::new()
    } else {
        s.render_tuple(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn swap_program() -> DynamicProgram {
        let aux = Schema::new().with_relation("A", 0).with_relation("B", 0);
        let ins = UpdateKind::ins("E");
        DynamicProgram {
            input: Schema::graph(),
            aux,
            rules: vec![
                UpdateRule::formula("A", ins.clone(), &["u", "v"], &[], parse_formula("B").unwrap()),
                UpdateRule::formula("B", ins.clone(), &["u", "v"], &[], parse_formula("A").unwrap()),
            ],
            initializer: Initializer::StaticBruteforce(vec![Definition::relation(
                "A",
                &[],
                Formula::Bool(true),
            )]),
            query: "A".into(),
            supported: vec![ins],
        }
    }

    #[test]
    fn updates_are_simultaneous() {
        let p = swap_program();
        let ex = Executor::new(&p).unwrap();
        let g = Structure::graph(&["a", "b"], &[]).unwrap();
        let s0 = ex.init(&g).unwrap();
        assert!(s0.query_bit());
        let m = Modification::ins("E", &[Elem(0), Elem(1)]);
        let s1 = ex.step(&s0, &m).unwrap();
        assert!(!s1.query_bit());
        assert!(s1.structure().holds("B", &[]).unwrap());
        let s2 = ex.step(&s1, &m).unwrap();
        assert!(s2.query_bit());
        assert!(!s2.structure().holds("B", &[]).unwrap());
    }

    #[test]
    fn unsupported_kinds_are_refused() {
        let p = swap_program();
        let ex = Executor::new(&p).unwrap();
        let s0 = ex.init(&Structure::graph(&["a"], &[]).unwrap()).unwrap();
        let err = ex.step(&s0, &Modification::del("E", &[Elem(0), Elem(0)])).unwrap_err();
        assert!(matches!(err, EngineError::Unsupported(_)));
        let err = ex
            .run(&s0, &[Modification::ins("E", &[Elem(0), Elem(0)]), Modification::del("E", &[Elem(0), Elem(0)])])
            .unwrap_err();
        assert_eq!(err.0, 1);
    }

    #[test]
    fn empty_run_is_identity() {
        let p = swap_program();
        let ex = Executor::new(&p).unwrap();
        let s0 = ex.init(&Structure::graph(&["a"], &[]).unwrap()).unwrap();
        assert_eq!(ex.run(&s0, &[]).unwrap(), s0);
    }

    #[test]
    fn validation_catches_missing_and_malformed_rules() {
        let mut p = swap_program();
        p.rules.pop();
        assert!(matches!(p.validate(), Err(EngineError::InvalidProgram(_))));
        let mut p = swap_program();
        p.rules[0].params.pop();
        assert!(p.validate().is_err());
        let mut p = swap_program();
        p.rules[0].body = RuleBody::Formula(parse_formula("E(u,w)").unwrap());
        assert!(matches!(p.validate(), Err(EngineError::Rule { .. })));
        let mut p = swap_program();
        p.query = "E".into();
        assert!(p.validate().is_err());
    }

    #[test]
    fn identity_rules_are_recognized() {
        let r = UpdateRule::formula("R", UpdateKind::ins("E"), &["u", "v"], &["x"], parse_formula("R(x)").unwrap());
        assert!(r.is_identity());
        let r = UpdateRule::formula("R", UpdateKind::ins("E"), &["u", "v"], &["x"], parse_formula("R(u)").unwrap());
        assert!(!r.is_identity());
        let r = UpdateRule::term("p", UpdateKind::ins("E"), &["u", "v"], &[], Term::var("p"));
        assert!(r.is_identity());
    }
}
