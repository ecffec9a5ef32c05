//! Evaluation. Formulas are first resolved against a schema into a
//! slot-based form, so repeated evaluation (update rules run once per
//! target tuple) avoids name lookups.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use super::{Formula, LogicError, Term};
use crate::structure::{Elem, Schema, Structure};

pub type Assignment = BTreeMap<String, Elem>;

type Args = SmallVec<[Elem; 4]>;

#[derive(Clone, Debug)]
enum CTerm {
    Slot(usize),
    Func(usize, Vec<CTerm>),
    Ite(Box<CFormula>, Box<CTerm>, Box<CTerm>),
}

#[derive(Clone, Debug)]
enum CFormula {
    Bool(bool),
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<CFormula>),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Exists(usize, Box<CFormula>),
    Forall(usize, Box<CFormula>),
}

/// Variable slots: the first `params` slots are the free variables in the
/// order given at compile time, the rest belong to quantifiers.
pub struct Env {
    slots: Vec<Elem>,
}

impl Env {
    pub fn set(&mut self, slot: usize, e: Elem) {
        self.slots[slot] = e;
    }

    pub fn slots_mut(&mut self) -> &mut [Elem] {
        &mut self.slots
    }
}

struct Compiler<'s> {
    schema: &'s Schema,
    scope: Vec<(String, usize)>,
    next_slot: usize,
}

impl Compiler<'_> {
    fn lookup_var(&self, v: &str) -> Option<usize> {
        self.scope.iter().rev().find(|(n, _)| n == v).map(|(_, s)| *s)
    }

    fn function(&self, name: &str, found: usize) -> Result<usize, LogicError> {
        match self.schema.function(name) {
            Some((i, a)) if a == found => Ok(i),
            Some((_, a)) => Err(LogicError::ArityMismatch {
                symbol: name.into(),
                expected: a,
                found,
            }),
            None if self.schema.relation(name).is_some() => {
                Err(LogicError::NotAFunction(name.into()))
            }
            None => Err(LogicError::UnknownSymbol(name.into())),
        }
    }

    fn term(&mut self, t: &Term) -> Result<CTerm, LogicError> {
        Ok(match t {
            Term::Var(v) => match self.lookup_var(v) {
                Some(s) => CTerm::Slot(s),
                None if self.schema.is_constant(v) => CTerm::Func(self.function(v, 0)?, vec![]),
                None => return Err(LogicError::UnboundVariable(v.clone())),
            },
            Term::Const(c) => CTerm::Func(self.function(c, 0)?, vec![]),
            Term::App(f, args) => {
                let i = self.function(f, args.len())?;
                CTerm::Func(
                    i,
                    args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?,
                )
            }
            Term::Ite(c, a, b) => CTerm::Ite(
                Box::new(self.formula(c)?),
                Box::new(self.term(a)?),
                Box::new(self.term(b)?),
            ),
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula, LogicError> {
        Ok(match f {
            Formula::Bool(b) => CFormula::Bool(*b),
            Formula::Rel(r, args) => {
                let i = match self.schema.relation(r) {
                    Some((i, a)) if a == args.len() => i,
                    Some((_, a)) => {
                        return Err(LogicError::ArityMismatch {
                            symbol: r.clone(),
                            expected: a,
                            found: args.len(),
                        })
                    }
                    None if self.schema.function(r).is_some() => {
                        return Err(LogicError::NotARelation(r.clone()))
                    }
                    None => return Err(LogicError::UnknownSymbol(r.clone())),
                };
                CFormula::Rel(
                    i,
                    args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?,
                )
            }
            Formula::Eq(a, b) => CFormula::Eq(self.term(a)?, self.term(b)?),
            Formula::Not(g) => CFormula::Not(Box::new(self.formula(g)?)),
            Formula::And(fs) => {
                CFormula::And(fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?)
            }
            Formula::Or(fs) => {
                CFormula::Or(fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?)
            }
            Formula::Implies(a, b) => {
                CFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?))
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let slot = self.next_slot;
                self.next_slot += 1;
                self.scope.push((v.clone(), slot));
                let body = Box::new(self.formula(g)?);
                self.scope.pop();
                if matches!(f, Formula::Exists(..)) {
                    CFormula::Exists(slot, body)
                } else {
                    CFormula::Forall(slot, body)
                }
            }
        })
    }
}

fn eval_t(s: &Structure, t: &CTerm, env: &mut [Elem]) -> Elem {
    match t {
        CTerm::Slot(i) => env[*i],
        CTerm::Func(f, args) => {
            let vals: Args = args.iter().map(|a| eval_t(s, a, env)).collect();
            s.function_at(*f).get(&vals)
        }
        CTerm::Ite(c, a, b) => {
            if eval_f(s, c, env) {
                eval_t(s, a, env)
            } else {
                eval_t(s, b, env)
            }
        }
    }
}

fn eval_f(s: &Structure, f: &CFormula, env: &mut [Elem]) -> bool {
    match f {
        CFormula::Bool(b) => *b,
        CFormula::Rel(r, args) => {
            let vals: Args = args.iter().map(|a| eval_t(s, a, env)).collect();
            s.relation_at(*r).contains(&vals)
        }
        CFormula::Eq(a, b) => eval_t(s, a, env) == eval_t(s, b, env),
        CFormula::Not(g) => !eval_f(s, g, env),
        CFormula::And(fs) => fs.iter().all(|g| eval_f(s, g, env)),
        CFormula::Or(fs) => fs.iter().any(|g| eval_f(s, g, env)),
        CFormula::Implies(a, b) => !eval_f(s, a, env) || eval_f(s, b, env),
        CFormula::Exists(slot, g) => (0..s.size()).any(|e| {
            env[*slot] = Elem::from(e);
            eval_f(s, g, env)
        }),
        CFormula::Forall(slot, g) => (0..s.size()).all(|e| {
            env[*slot] = Elem::from(e);
            eval_f(s, g, env)
        }),
    }
}

/// A formula resolved against a schema, with its free variables bound to
/// parameter slots `0..params.len()`.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    code: CFormula,
    slots: usize,
}

impl CompiledFormula {
    pub fn new(schema: &Schema, f: &Formula, params: &[&str]) -> Result<Self, LogicError> {
        let mut c = Compiler {
            schema,
            scope: params
                .iter()
                .enumerate()
                .map(|(i, p)| (p.to_string(), i))
                .collect(),
            next_slot: params.len(),
        };
        let code = c.formula(f)?;
        Ok(CompiledFormula {
            code,
            slots: c.next_slot,
        })
    }

    pub fn env(&self) -> Env {
        Env {
            slots: vec![Elem(0); self.slots],
        }
    }

    /// Evaluates with the parameter slots of `env` already filled.
    pub fn eval(&self, s: &Structure, env: &mut Env) -> bool {
        eval_f(s, &self.code, &mut env.slots)
    }

    pub fn eval_with(&self, s: &Structure, params: &[Elem]) -> bool {
        let mut env = self.env();
        env.slots[..params.len()].copy_from_slice(params);
        self.eval(s, &mut env)
    }
}

#[derive(Clone, Debug)]
pub struct CompiledTerm {
    code: CTerm,
    slots: usize,
}

impl CompiledTerm {
    pub fn new(schema: &Schema, t: &Term, params: &[&str]) -> Result<Self, LogicError> {
        let mut c = Compiler {
            schema,
            scope: params
                .iter()
                .enumerate()
                .map(|(i, p)| (p.to_string(), i))
                .collect(),
            next_slot: params.len(),
        };
        let code = c.term(t)?;
        Ok(CompiledTerm {
            code,
            slots: c.next_slot,
        })
    }

    pub fn env(&self) -> Env {
        Env {
            slots: vec![Elem(0); self.slots],
        }
    }

    pub fn eval(&self, s: &Structure, env: &mut Env) -> Elem {
        eval_t(s, &self.code, &mut env.slots)
    }

    pub fn eval_with(&self, s: &Structure, params: &[Elem]) -> Elem {
        let mut env = self.env();
        env.slots[..params.len()].copy_from_slice(params);
        self.eval(s, &mut env)
    }

    /// True if the term is a parameter slot, i.e. `f(x̄) := x̄_i`-style
    /// identity candidates are detectable by the caller.
    pub fn as_slot(&self) -> Option<usize> {
        match self.code {
            CTerm::Slot(i) => Some(i),
            _ => None,
        }
    }
}

fn split(a: &Assignment) -> (Vec<&str>, Vec<Elem>) {
    a.iter().map(|(k, v)| (k.as_str(), *v)).unzip()
}

/// Truth value of `f` in `s` under `a`; quantifiers range over the domain.
pub fn eval_formula(s: &Structure, f: &Formula, a: &Assignment) -> Result<bool, LogicError> {
    let (names, values) = split(a);
    check_range(s, &values)?;
    Ok(CompiledFormula::new(s.schema(), f, &names)?.eval_with(s, &values))
}

/// Value of `t` in `s` under `a`. An `ite` evaluates its condition and then
/// only the chosen branch.
pub fn eval_term(s: &Structure, t: &Term, a: &Assignment) -> Result<Elem, LogicError> {
    let (names, values) = split(a);
    check_range(s, &values)?;
    Ok(CompiledTerm::new(s.schema(), t, &names)?.eval_with(s, &values))
}

fn check_range(s: &Structure, values: &[Elem]) -> Result<(), LogicError> {
    match values.iter().find(|e| e.index() >= s.size()) {
        Some(e) => Err(LogicError::UnboundVariable(format!(
            "assignment value {} outside the domain",
            e.index()
        ))),
        None => Ok(()),
    }
}

/// Evaluates a sentence from scratch. Bare identifiers that name constants
/// of the schema count as constants; any other free variable is an error.
pub fn static_eval(s: &Structure, sentence: &Formula) -> Result<bool, LogicError> {
    let free: Vec<String> = sentence
        .free_variables()
        .into_iter()
        .filter(|v| !s.schema().is_constant(v))
        .collect();
    if !free.is_empty() {
        return Err(LogicError::FreeVariables(free.join(", ")));
    }
    eval_formula(s, sentence, &Assignment::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::logic::parse_term;

    fn assign(pairs: &[(&str, u32)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), Elem(*v))).collect()
    }

    #[test]
    fn ite_picks_a_branch() {
        let g = Structure::graph(&["e1", "e2"], &[]).unwrap();
        let t = parse_term("ite(true, x, y)").unwrap();
        assert_eq!(eval_term(&g, &t, &assign(&[("x", 0), ("y", 1)])).unwrap(), Elem(0));
        let t = parse_term("ite(x = y, x, y)").unwrap();
        assert_eq!(eval_term(&g, &t, &assign(&[("x", 0), ("y", 1)])).unwrap(), Elem(1));
    }

    #[test]
    fn equality_of_identical_assignment() {
        let g = Structure::graph(&["e"], &[]).unwrap();
        let f = parse_formula("x = y").unwrap();
        assert!(eval_formula(&g, &f, &assign(&[("x", 0), ("y", 0)])).unwrap());
    }

    #[test]
    fn unbound_variables_are_errors() {
        let g = Structure::graph(&["a"], &[]).unwrap();
        let f = parse_formula("E(x,y)").unwrap();
        assert_eq!(
            eval_formula(&g, &f, &assign(&[("x", 0)])),
            Err(LogicError::UnboundVariable("y".into()))
        );
        assert!(matches!(static_eval(&g, &f), Err(LogicError::FreeVariables(_))));
    }

    #[test]
    fn arity_and_kind_errors() {
        let g = Structure::graph(&["a"], &[]).unwrap();
        let f = parse_formula("E(x)").unwrap();
        assert!(matches!(
            eval_formula(&g, &f, &assign(&[("x", 0)])),
            Err(LogicError::ArityMismatch { .. })
        ));
        let f = parse_formula("F(x)").unwrap();
        assert!(matches!(
            eval_formula(&g, &f, &assign(&[("x", 0)])),
            Err(LogicError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn loops_and_triangles() {
        let path = Structure::graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let tri = Structure::graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let has_loop = parse_formula("exists x. E(x,x)").unwrap();
        assert!(!static_eval(&path, &has_loop).unwrap());
        let triangle = parse_formula(
            "exists x1 x2 x3. x1 != x2 & x1 != x3 & x2 != x3 & E{x1,x2} & E{x1,x3} & E{x2,x3}",
        )
        .unwrap();
        assert!(static_eval(&tri, &triangle).unwrap());
        assert!(!static_eval(&path, &triangle).unwrap());
    }

    #[test]
    fn constants_resolve_inside_sentences() {
        let schema = Schema::graph().with_constant("s");
        let mut st = Structure::new(schema, ["a", "b"]).unwrap();
        st.set_constant("s", Elem(1)).unwrap();
        st.insert("E", &[Elem(1), Elem(0)]).unwrap();
        assert!(static_eval(&st, &parse_formula("exists x. E(s,x)").unwrap()).unwrap());
        // a bound variable shadows the constant
        assert!(!static_eval(&st, &parse_formula("forall s. exists x. E(s,x)").unwrap()).unwrap());
    }

    #[test]
    fn forall_and_implication() {
        let g = Structure::graph(&["a", "b"], &[("a", "b"), ("b", "b")]).unwrap();
        let f = parse_formula("forall x. exists y. E(x,y) -> E(y,y)").unwrap();
        assert!(static_eval(&g, &f).unwrap());
    }
}
