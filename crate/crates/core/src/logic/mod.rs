//! First-order formulas and function terms with if-then-else.
//!
//! Text syntax (see `parser`):
//!
//! ```text
//! formula := implication
//! implication := disjunction ("->" implication)?
//! disjunction := conjunction ("|" conjunction)*
//! conjunction := unary ("&" unary)*
//! unary := "!" unary | ("exists" | "forall") ident+ "." formula | atom
//! atom := "true" | "false" | "(" formula ")"
//!       | ident "{" term "," term "}"          (symmetric sugar)
//!       | ident ("(" terms ")")?               (relation atom)
//!       | term ("=" | "!=") term
//! term := "ite" "(" formula "," term "," term ")" | ident ("(" terms ")")?
//! ```
//!
//! A bare identifier in term position is a variable unless it is unbound and
//! names a constant of the schema it is evaluated against.

mod eval;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::structure::Schema;

pub use eval::{
    eval_formula, eval_term, static_eval, Assignment, CompiledFormula, CompiledTerm, Env,
};
pub use parser::{parse_formula, parse_term, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
    Ite(Box<Formula>, Box<Term>, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bool(bool),
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` is a relation, used as a function")]
    NotAFunction(String),
    #[error("`{0}` is a function, used as a relation")]
    NotARelation(String),
    #[error("symbol `{symbol}` has arity {expected}, got {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("sentence has free variables: {0}")]
    FreeVariables(String),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    pub fn ite(cond: Formula, then: Term, otherwise: Term) -> Term {
        Term::Ite(Box::new(cond), Box::new(then), Box::new(otherwise))
    }

    /// Nesting depth: variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Ite(_, a, b) => a.depth().max(b.depth()),
        }
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Term::Ite(c, a, b) => {
                c.collect_free(bound, out);
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    /// Turns unbound variables that name constants of `schema` into
    /// constants.
    pub fn resolve_constants(&self, schema: &Schema) -> Term {
        self.resolve(schema, &mut Vec::new())
    }

    fn resolve(&self, schema: &Schema, bound: &mut Vec<String>) -> Term {
        match self {
            Term::Var(v) if !bound.contains(v) && schema.is_constant(v) => Term::Const(v.clone()),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(f, args) if args.is_empty() && schema.is_constant(f) => {
                Term::Const(f.clone())
            }
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.resolve(schema, bound)).collect())
            }
            Term::Ite(c, a, b) => Term::ite(
                c.resolve(schema, bound),
                a.resolve(schema, bound),
                b.resolve(schema, bound),
            ),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_quantifier_free),
            Term::Ite(c, a, b) => c.is_quantifier_free() && a.is_quantifier_free() && b.is_quantifier_free(),
        }
    }

    /// Replaces free occurrences of variables.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Term>) -> Term {
        self.subst(map, &mut Vec::new())
    }

    fn subst(&self, map: &dyn Fn(&str) -> Option<Term>, bound: &mut Vec<String>) -> Term {
        match self {
            Term::Var(v) if !bound.contains(v) => map(v).unwrap_or_else(|| self.clone()),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.subst(map, bound)).collect())
            }
            Term::Ite(c, a, b) => {
                Term::ite(c.subst(map, bound), a.subst(map, bound), b.subst(map, bound))
            }
        }
    }
}

impl Formula {
    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(name.to_string(), args)
    }

    /// `R(x1,...,xn)` over variables.
    pub fn rel_vars(name: &str, vars: &[&str]) -> Formula {
        Formula::Rel(name.to_string(), vars.iter().map(|v| Term::var(v)).collect())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::Eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; the empty conjunction is `true` and singletons are
    /// unwrapped.
    pub fn and(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::Bool(true),
            1 => fs.pop().unwrap(),
            _ => Formula::And(fs),
        }
    }

    /// Disjunction; the empty disjunction is `false` and singletons are
    /// unwrapped.
    pub fn or(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::Bool(false),
            1 => fs.pop().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(vars: &[&str], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::Exists(v.to_string(), Box::new(acc)))
    }

    pub fn forall(vars: &[&str], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::Forall(v.to_string(), Box::new(acc)))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Bool(_) => true,
            Formula::Rel(_, args) => args.iter().all(Term::is_quantifier_free),
            Formula::Eq(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Variables with a free occurrence. Constants written as bare
    /// identifiers are reported too unless resolved first.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Bool(_) => {}
            Formula::Rel(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Formula::Eq(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn resolve_constants(&self, schema: &Schema) -> Formula {
        self.resolve(schema, &mut Vec::new())
    }

    fn resolve(&self, schema: &Schema, bound: &mut Vec<String>) -> Formula {
        match self {
            Formula::Bool(_) => self.clone(),
            Formula::Rel(r, args) => {
                Formula::Rel(r.clone(), args.iter().map(|a| a.resolve(schema, bound)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(a.resolve(schema, bound), b.resolve(schema, bound)),
            Formula::Not(f) => Formula::not(f.resolve(schema, bound)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.resolve(schema, bound)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.resolve(schema, bound)).collect()),
            Formula::Implies(a, b) => {
                Formula::implies(a.resolve(schema, bound), b.resolve(schema, bound))
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                let body = Box::new(f.resolve(schema, bound));
                bound.pop();
                match self {
                    Formula::Exists(..) => Formula::Exists(v.clone(), body),
                    _ => Formula::Forall(v.clone(), body),
                }
            }
        }
    }

    /// Replaces free occurrences of variables. Bound variables are not
    /// renamed, so the caller must avoid capture.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Term>) -> Formula {
        self.subst(map, &mut Vec::new())
    }

    fn subst(&self, map: &dyn Fn(&str) -> Option<Term>, bound: &mut Vec<String>) -> Formula {
        match self {
            Formula::Bool(_) => self.clone(),
            Formula::Rel(r, args) => {
                Formula::Rel(r.clone(), args.iter().map(|a| a.subst(map, bound)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(a.subst(map, bound), b.subst(map, bound)),
            Formula::Not(f) => Formula::not(f.subst(map, bound)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.subst(map, bound)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.subst(map, bound)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.subst(map, bound), b.subst(map, bound)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                let body = Box::new(f.subst(map, bound));
                bound.pop();
                match self {
                    Formula::Exists(..) => Formula::Exists(v.clone(), body),
                    _ => Formula::Forall(v.clone(), body),
                }
            }
        }
    }

    /// Relation symbols occurring in the formula (including inside terms).
    pub fn relation_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_relations(&mut |r| {
            out.insert(r.to_string());
        });
        out
    }

    fn walk_relations(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Formula::Bool(_) => {}
            Formula::Rel(r, args) => {
                f(r);
                args.iter().for_each(|a| a.walk_relations(f));
            }
            Formula::Eq(a, b) => {
                a.walk_relations(f);
                b.walk_relations(f);
            }
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.walk_relations(f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.walk_relations(f)),
            Formula::Implies(a, b) => {
                a.walk_relations(f);
                b.walk_relations(f);
            }
        }
    }
}

impl Term {
    fn walk_relations(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Term::Var(_) | Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.walk_relations(f)),
            Term::Ite(c, a, b) => {
                c.walk_relations(f);
                a.walk_relations(f);
                b.walk_relations(f);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Ite(c, a, b) => write!(f, "ite({c}, {a}, {b})"),
        }
    }
}

/// Prints every binary connective and quantifier in parentheses so that the
/// output parses back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Bool(b) => write!(f, "{b}"),
            Formula::Rel(r, args) if args.is_empty() => f.write_str(r),
            Formula::Rel(r, args) => write!(f, "{}", Term::App(r.clone(), args.clone())),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Eq(a, b) => write!(f, "{a} != {b}"),
                other => write!(f, "!{other}"),
            },
            Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => {
                write!(f, "{}", matches!(self, Formula::And(_)))
            }
            Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => write!(f, "{}", fs[0]),
            Formula::And(fs) | Formula::Or(fs) => {
                let sep = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str(")")
            }
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Exists(..) | Formula::Forall(..) => {
                let is_exists = matches!(self, Formula::Exists(..));
                let mut vars = Vec::new();
                let mut body = self;
                while let (Formula::Exists(v, b), true) | (Formula::Forall(v, b), false) = (body, is_exists) {
                    vars.push(v.as_str());
                    body = b;
                }
                let q = if is_exists { "exists" } else { "forall" };
                write!(f, "({q} {}. {body})", vars.join(" "))
            }
        }
    }
}

/// All ite-free terms of nesting depth at most `m` over `vars`, the
/// constants and the function symbols of `schema`.
///
/// Order: depth-0 terms (variables, then constants in schema order), then
/// for each depth d = 1..=m, each function in schema order applied to every
/// argument tuple (lexicographic in the position of the arguments in this
/// list) whose maximal argument depth is exactly d-1.
pub fn enumerate_terms(schema: &Schema, vars: &[&str], m: usize) -> Vec<Term> {
    let mut terms: Vec<(Term, usize)> = vars.iter().map(|v| (Term::var(v), 0)).collect();
    terms.extend(schema.constants().map(|c| (Term::constant(c), 0)));
    for d in 1..=m {
        let prev = terms.len();
        for (f, arity) in schema.proper_functions() {
            let idx: Vec<crate::Elem> = (0..prev).map(crate::Elem::from).collect();
            for args in crate::structure::tuples_over(&idx, arity) {
                let depth = args.iter().map(|i| terms[i.index()].1).max().unwrap_or(0);
                if depth + 1 != d {
                    continue;
                }
                let t = Term::app(f, args.iter().map(|i| terms[i.index()].0.clone()).collect());
                terms.push((t, d));
            }
        }
    }
    terms.into_iter().map(|(t, _)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_depth_zero_and_one() {
        let schema = Schema::new().with_constant("c").with_function("f", 1);
        let names: Vec<String> = enumerate_terms(&schema, &["x"], 1)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(names, ["x", "c", "f(x)", "f(c)"]);
        assert_eq!(enumerate_terms(&schema, &["x"], 0).len(), 2);
    }

    #[test]
    fn enumerate_counts_nested_unary_terms() {
        let schema = Schema::new().with_function("f", 1);
        let names: Vec<String> = enumerate_terms(&schema, &["x"], 2)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(names, ["x", "f(x)", "f(f(x))"]);
    }

    #[test]
    fn enumeration_is_monotone_in_depth() {
        let schema = Schema::new()
            .with_constant("c")
            .with_function("f", 1)
            .with_function("g", 2);
        for m in 0..3 {
            let small = enumerate_terms(&schema, &["x", "y"], m);
            let big = enumerate_terms(&schema, &["x", "y"], m + 1);
            assert_eq!(&big[..small.len()], &small[..]);
            assert!(small.iter().all(|t| t.depth() <= m));
            let distinct: BTreeSet<_> = big.iter().collect();
            assert_eq!(distinct.len(), big.len());
        }
    }

    #[test]
    fn printer_uses_inequality_and_groups_quantifiers() {
        let f = Formula::exists(
            &["x", "y"],
            Formula::and(vec![
                Formula::neq(Term::var("x"), Term::var("y")),
                Formula::rel_vars("E", &["x", "y"]),
            ]),
        );
        assert_eq!(f.to_string(), "(exists x y. (x != y & E(x,y)))");
    }

    #[test]
    fn free_variables_respect_binders() {
        let f = parse_formula("exists x. E(x,y) & R(z)").unwrap();
        let free: Vec<String> = f.free_variables().into_iter().collect();
        assert_eq!(free, ["y", "z"]);
    }

    #[test]
    fn resolve_turns_schema_constants_into_constants() {
        let schema = Schema::graph().with_constant("s");
        let f = parse_formula("exists x. E(s,x)").unwrap().resolve_constants(&schema);
        assert!(f.free_variables().is_empty());
    }
}
