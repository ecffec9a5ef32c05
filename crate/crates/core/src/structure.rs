//! Finite structures: schemas, interpretations, modifications, induced
//! substructures, atomic types and isomorphism search.
//!
//! Elements are dense indices into a domain; the index order is the
//! creation order and doubles as the default linear order wherever an
//! ordering of the domain is required.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A domain element, identified by its position in the domain.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Elem {
    fn from(i: usize) -> Self {
        Elem(i as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("symbol `{symbol}` has arity {expected}, got {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element index {0} out of range")]
    ElementOutOfRange(usize),
    #[error("subset is not closed: {0}")]
    NotClosed(String),
    #[error("malformed modification: {0}")]
    MalformedModification(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("functions and constants need a non-empty domain")]
    EmptyDomain,
}

pub type Result<T, E = StructureError> = std::result::Result<T, E>;

/// Where a symbol lives inside a [`Schema`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SymbolRef {
    Relation(usize),
    Function(usize),
}

/// Relation, constant and function symbols with arities.
///
/// Constants are stored as 0-ary functions; [`Schema::constants`] lists them
/// separately for display and serialization.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schema {
    relations: Vec<(String, usize)>,
    functions: Vec<(String, usize)>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    /// The schema `{E}` with one binary relation.
    pub fn graph() -> Self {
        Schema::new().with_relation("E", 2)
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Self {
        self.add_relation(name, arity).expect("duplicate symbol");
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.add_constant(name).expect("duplicate symbol");
        self
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.add_function(name, arity).expect("duplicate symbol");
        self
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<()> {
        self.check_fresh(name)?;
        self.relations.push((name.to_string(), arity));
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) -> Result<()> {
        self.add_function(name, 0)
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<()> {
        self.check_fresh(name)?;
        self.functions.push((name.to_string(), arity));
        Ok(())
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.lookup(name).is_some() {
            return Err(StructureError::DuplicateSymbol(name.to_string()));
        }
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolRef> {
        if let Some(i) = self.relations.iter().position(|(n, _)| n == name) {
            return Some(SymbolRef::Relation(i));
        }
        self.functions
            .iter()
            .position(|(n, _)| n == name)
            .map(SymbolRef::Function)
    }

    /// Index and arity of a relation symbol.
    pub fn relation(&self, name: &str) -> Option<(usize, usize)> {
        self.relations
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| (i, self.relations[i].1))
    }

    /// Index and arity of a function symbol (constants included).
    pub fn function(&self, name: &str) -> Option<(usize, usize)> {
        self.functions
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| (i, self.functions[i].1))
    }

    pub fn is_constant(&self, name: &str) -> bool {
        matches!(self.function(name), Some((_, 0)))
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    /// All function symbols, constants included.
    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> + '_ {
        self.functions
            .iter()
            .filter(|(_, a)| *a == 0)
            .map(|(n, _)| n.as_str())
    }

    /// Function symbols of arity at least one.
    pub fn proper_functions(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.functions
            .iter()
            .filter(|(_, a)| *a > 0)
            .map(|(n, a)| (n.as_str(), *a))
    }

    pub fn max_relation_arity(&self) -> usize {
        self.relations.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }

    pub fn max_function_arity(&self) -> usize {
        self.functions.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty() && self.functions.is_empty()
    }

    /// Disjoint union; `self`'s symbols come first.
    pub fn union(&self, other: &Schema) -> Result<Schema> {
        let mut out = self.clone();
        for (n, a) in &other.relations {
            out.add_relation(n, *a)?;
        }
        for (n, a) in &other.functions {
            out.add_function(n, *a)?;
        }
        Ok(out)
    }

    /// True if every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subschema_of(&self, other: &Schema) -> bool {
        self.relations
            .iter()
            .all(|(n, a)| other.relation(n).map(|(_, b)| b) == Some(*a))
            && self
                .functions
                .iter()
                .all(|(n, a)| other.function(n).map(|(_, b)| b) == Some(*a))
    }
}

fn checked_pow(n: usize, arity: usize) -> Option<usize> {
    let mut size: usize = 1;
    for _ in 0..arity {
        size = size.checked_mul(n)?;
    }
    Some(size)
}

const DENSE_RELATION_LIMIT: usize = 1 << 22;
const DENSE_FUNCTION_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
enum TupleRepr {
    Dense(Vec<u64>),
    Sparse(BTreeSet<Vec<Elem>>),
}

/// The interpretation of one relation symbol: a set of tuples over a domain
/// of size `n`.
///
/// Small relations are stored as a bitset indexed by the mixed-radix
/// encoding of the tuple (first coordinate most significant), so iteration
/// order is lexicographic in both representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleSet {
    arity: usize,
    n: usize,
    repr: TupleRepr,
}

impl TupleSet {
    pub fn new(n: usize, arity: usize) -> Self {
        let repr = match checked_pow(n, arity) {
            Some(size) if size <= DENSE_RELATION_LIMIT => {
                TupleRepr::Dense(vec![0; size.div_ceil(64)])
            }
            _ => TupleRepr::Sparse(BTreeSet::new()),
        };
        TupleSet { arity, n, repr }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn encode(&self, tuple: &[Elem]) -> usize {
        tuple
            .iter()
            .fold(0usize, |acc, e| acc * self.n + e.index())
    }

    fn decode(&self, mut code: usize) -> Vec<Elem> {
        let mut out = vec![Elem(0); self.arity];
        for slot in out.iter_mut().rev() {
            *slot = Elem((code % self.n) as u32);
            code /= self.n;
        }
        out
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        debug_assert_eq!(tuple.len(), self.arity);
        match &self.repr {
            TupleRepr::Dense(bits) => {
                let i = self.encode(tuple);
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            TupleRepr::Sparse(set) => set.contains(tuple),
        }
    }

    /// Returns true if the tuple was newly inserted.
    pub fn insert(&mut self, tuple: &[Elem]) -> bool {
        debug_assert_eq!(tuple.len(), self.arity);
        let i = self.encode(tuple);
        match &mut self.repr {
            TupleRepr::Dense(bits) => {
                let was = bits[i / 64] >> (i % 64) & 1 == 1;
                bits[i / 64] |= 1 << (i % 64);
                !was
            }
            TupleRepr::Sparse(set) => set.insert(tuple.to_vec()),
        }
    }

    /// Returns true if the tuple was present.
    pub fn remove(&mut self, tuple: &[Elem]) -> bool {
        let i = self.encode(tuple);
        match &mut self.repr {
            TupleRepr::Dense(bits) => {
                let was = bits[i / 64] >> (i % 64) & 1 == 1;
                bits[i / 64] &= !(1 << (i % 64));
                was
            }
            TupleRepr::Sparse(set) => set.remove(tuple),
        }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            TupleRepr::Dense(bits) => bits.iter().map(|w| w.count_ones() as usize).sum(),
            TupleRepr::Sparse(set) => set.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tuples in lexicographic order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = Vec<Elem>> + '_> {
        match &self.repr {
            TupleRepr::Dense(bits) => Box::new(bits.iter().enumerate().flat_map(
                move |(w, word)| {
                    let mut word = *word;
                    std::iter::from_fn(move || {
                        if word == 0 {
                            return None;
                        }
                        let b = word.trailing_zeros() as usize;
                        word &= word - 1;
                        Some(self.decode(w * 64 + b))
                    })
                },
            )),
            TupleRepr::Sparse(set) => Box::new(set.iter().cloned()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum FunctionRepr {
    Dense(Vec<Elem>),
    /// Points not listed map to `Elem(0)`.
    Sparse(BTreeMap<Vec<Elem>, Elem>),
}

/// A total function `domain^arity -> domain`.
///
/// Large tables are sparse: unlisted points map to the first domain element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    arity: usize,
    n: usize,
    repr: FunctionRepr,
}

impl FunctionTable {
    /// The function that maps every point to the first domain element.
    pub fn new(n: usize, arity: usize) -> Self {
        let repr = match checked_pow(n, arity) {
            Some(size) if size <= DENSE_FUNCTION_LIMIT => FunctionRepr::Dense(vec![Elem(0); size]),
            _ => FunctionRepr::Sparse(BTreeMap::new()),
        };
        FunctionTable { arity, n, repr }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn encode(&self, args: &[Elem]) -> usize {
        args.iter().fold(0usize, |acc, e| acc * self.n + e.index())
    }

    pub fn get(&self, args: &[Elem]) -> Elem {
        debug_assert_eq!(args.len(), self.arity);
        match &self.repr {
            FunctionRepr::Dense(v) => v[self.encode(args)],
            FunctionRepr::Sparse(m) => m.get(args).copied().unwrap_or(Elem(0)),
        }
    }

    pub fn set(&mut self, args: &[Elem], value: Elem) {
        let i = self.encode(args);
        match &mut self.repr {
            FunctionRepr::Dense(v) => v[i] = value,
            FunctionRepr::Sparse(m) => {
                if value == Elem(0) {
                    m.remove(args);
                } else {
                    m.insert(args.to_vec(), value);
                }
            }
        }
    }

    /// Points whose value differs from the first domain element, in
    /// lexicographic order.
    pub fn exceptions(&self) -> Vec<(Vec<Elem>, Elem)> {
        match &self.repr {
            FunctionRepr::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, e)| **e != Elem(0))
                .map(|(i, e)| {
                    let mut code = i;
                    let mut args = vec![Elem(0); self.arity];
                    for slot in args.iter_mut().rev() {
                        *slot = Elem((code % self.n) as u32);
                        code /= self.n;
                    }
                    (args, *e)
                })
                .collect(),
            FunctionRepr::Sparse(m) => m.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }

    /// Number of points of the function, if it fits in a `usize`.
    pub fn points(&self) -> Option<usize> {
        checked_pow(self.n, self.arity)
    }
}

/// A finite structure: a labelled domain plus an interpretation of every
/// symbol of its schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    schema: Arc<Schema>,
    labels: Vec<String>,
    relations: Vec<TupleSet>,
    functions: Vec<FunctionTable>,
}

impl Structure {
    /// Empty relations; every function (and constant) maps to the first
    /// element.
    pub fn new<S: Into<String>>(
        schema: impl Into<Arc<Schema>>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let schema = schema.into();
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(StructureError::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        if n == 0 && !schema.functions().is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        let relations = schema
            .relations()
            .iter()
            .map(|(_, a)| TupleSet::new(n, *a))
            .collect();
        let functions = schema
            .functions()
            .iter()
            .map(|(_, a)| FunctionTable::new(n, *a))
            .collect();
        Ok(Structure {
            schema,
            labels,
            relations,
            functions,
        })
    }

    /// A structure over `{E}` with elements named `labels` and the given
    /// edges (by label).
    pub fn graph(labels: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let mut s = Structure::new(Schema::graph(), labels.iter().copied())?;
        for (a, b) in edges {
            let t = [s.elem(a)?, s.elem(b)?];
            s.insert("E", &t)?;
        }
        Ok(s)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.labels.len() as u32).map(Elem)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: Elem) -> &str {
        &self.labels[e.index()]
    }

    pub fn elem(&self, label: &str) -> Result<Elem> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(Elem::from)
            .ok_or_else(|| StructureError::UnknownElement(label.to_string()))
    }

    fn check_elems(&self, tuple: &[Elem]) -> Result<()> {
        match tuple.iter().find(|e| e.index() >= self.size()) {
            Some(e) => Err(StructureError::ElementOutOfRange(e.index())),
            None => Ok(()),
        }
    }

    fn relation_index(&self, name: &str, arity: usize) -> Result<usize> {
        let (i, a) = self
            .schema
            .relation(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        if a != arity {
            return Err(StructureError::ArityMismatch {
                symbol: name.to_string(),
                expected: a,
                found: arity,
            });
        }
        Ok(i)
    }

    fn function_index(&self, name: &str, arity: usize) -> Result<usize> {
        let (i, a) = self
            .schema
            .function(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        if a != arity {
            return Err(StructureError::ArityMismatch {
                symbol: name.to_string(),
                expected: a,
                found: arity,
            });
        }
        Ok(i)
    }

    pub fn relation(&self, name: &str) -> Option<&TupleSet> {
        self.schema.relation(name).map(|(i, _)| &self.relations[i])
    }

    pub fn relation_at(&self, index: usize) -> &TupleSet {
        &self.relations[index]
    }

    pub fn relation_at_mut(&mut self, index: usize) -> &mut TupleSet {
        &mut self.relations[index]
    }

    pub fn set_relation_at(&mut self, index: usize, set: TupleSet) {
        assert_eq!(set.arity(), self.relations[index].arity());
        self.relations[index] = set;
    }

    pub fn function_at(&self, index: usize) -> &FunctionTable {
        &self.functions[index]
    }

    pub fn set_function_at(&mut self, index: usize, table: FunctionTable) {
        assert_eq!(table.arity(), self.functions[index].arity());
        self.functions[index] = table;
    }

    pub fn function_table(&self, name: &str) -> Option<&FunctionTable> {
        self.schema.function(name).map(|(i, _)| &self.functions[i])
    }

    pub fn holds(&self, name: &str, tuple: &[Elem]) -> Result<bool> {
        let i = self.relation_index(name, tuple.len())?;
        self.check_elems(tuple)?;
        Ok(self.relations[i].contains(tuple))
    }

    pub fn insert(&mut self, name: &str, tuple: &[Elem]) -> Result<bool> {
        let i = self.relation_index(name, tuple.len())?;
        self.check_elems(tuple)?;
        Ok(self.relations[i].insert(tuple))
    }

    pub fn remove(&mut self, name: &str, tuple: &[Elem]) -> Result<bool> {
        let i = self.relation_index(name, tuple.len())?;
        self.check_elems(tuple)?;
        Ok(self.relations[i].remove(tuple))
    }

    pub fn apply(&self, name: &str, args: &[Elem]) -> Result<Elem> {
        let i = self.function_index(name, args.len())?;
        self.check_elems(args)?;
        Ok(self.functions[i].get(args))
    }

    pub fn set_function(&mut self, name: &str, args: &[Elem], value: Elem) -> Result<()> {
        let i = self.function_index(name, args.len())?;
        self.check_elems(args)?;
        self.check_elems(&[value])?;
        self.functions[i].set(args, value);
        Ok(())
    }

    pub fn constant(&self, name: &str) -> Result<Elem> {
        self.apply(name, &[])
    }

    pub fn set_constant(&mut self, name: &str, value: Elem) -> Result<()> {
        self.set_function(name, &[], value)
    }

    /// Interpretations of all constants, in schema order.
    pub fn constant_values(&self) -> Vec<Elem> {
        self.schema
            .functions()
            .iter()
            .zip(&self.functions)
            .filter(|((_, a), _)| *a == 0)
            .map(|(_, t)| t.get(&[]))
            .collect()
    }

    /// The same domain and the interpretations of `schema`'s symbols, which
    /// must all occur in `self`.
    pub fn reduct(&self, schema: impl Into<Arc<Schema>>) -> Result<Structure> {
        let schema = schema.into();
        let mut out = Structure::new(schema.clone(), self.labels.iter().cloned())?;
        for (i, (name, arity)) in schema.relations().iter().enumerate() {
            let j = self.relation_index(name, *arity)?;
            out.relations[i] = self.relations[j].clone();
        }
        for (i, (name, arity)) in schema.functions().iter().enumerate() {
            let j = self.function_index(name, *arity)?;
            out.functions[i] = self.functions[j].clone();
        }
        Ok(out)
    }

    /// Copies every symbol of `other` (same domain) into `self`.
    pub fn overwrite_from(&mut self, other: &Structure) -> Result<()> {
        if other.labels != self.labels {
            return Err(StructureError::SchemaMismatch(
                "structures have different domains".into(),
            ));
        }
        for (i, (name, arity)) in other.schema.relations().iter().enumerate() {
            let j = self.relation_index(name, *arity)?;
            self.relations[j] = other.relations[i].clone();
        }
        for (i, (name, arity)) in other.schema.functions().iter().enumerate() {
            let j = self.function_index(name, *arity)?;
            self.functions[j] = other.functions[i].clone();
        }
        Ok(())
    }

    /// Renders a tuple with element labels, e.g. `(a1,a2)`.
    pub fn render_tuple(&self, tuple: &[Elem]) -> String {
        let parts: Vec<&str> = tuple.iter().map(|e| self.label(*e)).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {}", self.labels.join(" "))?;
        for (i, (name, _)) in self.schema.relations().iter().enumerate() {
            let tuples: Vec<String> = self.relations[i]
                .iter()
                .map(|t| self.render_tuple(&t))
                .collect();
            writeln!(f, "{name} = {{{}}}", tuples.join(", "))?;
        }
        for (i, (name, arity)) in self.schema.functions().iter().enumerate() {
            if *arity == 0 {
                writeln!(f, "{name} = {}", self.label(self.functions[i].get(&[])))?;
            } else {
                let entries: Vec<String> = self.functions[i]
                    .exceptions()
                    .iter()
                    .map(|(a, v)| format!("{}->{}", self.render_tuple(a), self.label(*v)))
                    .collect();
                writeln!(
                    f,
                    "{name} = {{{}}} (else {})",
                    entries.join(", "),
                    self.labels[0]
                )?;
            }
        }
        Ok(())
    }
}

/// Insertion or deletion.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModKind {
    Ins,
    Del,
}

impl fmt::Display for ModKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModKind::Ins => "ins",
            ModKind::Del => "del",
        })
    }
}

/// Insertion or deletion of one tuple of a named input relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Modification {
    pub kind: ModKind,
    pub relation: String,
    pub tuple: Vec<Elem>,
}

impl Modification {
    pub fn ins(relation: &str, tuple: &[Elem]) -> Self {
        Modification {
            kind: ModKind::Ins,
            relation: relation.to_string(),
            tuple: tuple.to_vec(),
        }
    }

    pub fn del(relation: &str, tuple: &[Elem]) -> Self {
        Modification {
            kind: ModKind::Del,
            relation: relation.to_string(),
            tuple: tuple.to_vec(),
        }
    }

    /// `ins E a b` with labels taken from `s`.
    pub fn render(&self, s: &Structure) -> String {
        let mut out = format!("{} {}", self.kind, self.relation);
        for e in &self.tuple {
            out.push(' ');
            out.push_str(s.label(*e));
        }
        out
    }

    /// Image under an element map.
    pub fn map(&self, pi: impl Fn(Elem) -> Elem) -> Modification {
        Modification {
            kind: self.kind,
            relation: self.relation.clone(),
            tuple: self.tuple.iter().map(|e| pi(*e)).collect(),
        }
    }
}

/// Applies one modification to a database. Inserting a present tuple and
/// deleting an absent one leave the database unchanged.
pub fn apply_modification(db: &Structure, m: &Modification) -> Result<Structure> {
    let mut out = db.clone();
    apply_in_place(&mut out, m)?;
    Ok(out)
}

pub(crate) fn apply_in_place(db: &mut Structure, m: &Modification) -> Result<()> {
    let (i, arity) = db.schema.relation(&m.relation).ok_or_else(|| {
        StructureError::MalformedModification(format!("unknown relation `{}`", m.relation))
    })?;
    if arity != m.tuple.len() {
        return Err(StructureError::MalformedModification(format!(
            "`{}` has arity {arity}, tuple has {} elements",
            m.relation,
            m.tuple.len()
        )));
    }
    db.check_elems(&m.tuple)
        .map_err(|e| StructureError::MalformedModification(e.to_string()))?;
    match m.kind {
        ModKind::Ins => db.relations[i].insert(&m.tuple),
        ModKind::Del => db.relations[i].remove(&m.tuple),
    };
    Ok(())
}

/// The substructure induced by `subset`, with the elements renumbered in
/// their original order. Also returns, for each new element, the original
/// element it came from.
pub fn induced_substructure_with_map(
    s: &Structure,
    subset: &BTreeSet<Elem>,
) -> Result<(Structure, Vec<Elem>)> {
    s.check_elems(&subset.iter().copied().collect::<Vec<_>>())?;
    let old: Vec<Elem> = subset.iter().copied().collect();
    let mut new_of: HashMap<Elem, Elem> = HashMap::new();
    for (i, e) in old.iter().enumerate() {
        new_of.insert(*e, Elem::from(i));
    }
    for c in s.schema.constants() {
        let v = s.constant(c)?;
        if !subset.contains(&v) {
            return Err(StructureError::NotClosed(format!(
                "constant `{c}` = {} is outside the subset",
                s.label(v)
            )));
        }
    }
    let labels: Vec<String> = old.iter().map(|e| s.label(*e).to_string()).collect();
    let mut out = Structure::new(s.schema.clone(), labels)?;
    for (ri, rel) in s.relations.iter().enumerate() {
        for t in rel.iter() {
            if let Some(mapped) = t
                .iter()
                .map(|e| new_of.get(e).copied())
                .collect::<Option<Vec<_>>>()
            {
                out.relations[ri].insert(&mapped);
            }
        }
    }
    for (fi, (name, arity)) in s.schema.functions().iter().enumerate() {
        let table = &s.functions[fi];
        for args in tuples_over(&old, *arity) {
            let v = table.get(&args);
            let Some(nv) = new_of.get(&v) else {
                return Err(StructureError::NotClosed(format!(
                    "`{name}{}` = {} is outside the subset",
                    s.render_tuple(&args),
                    s.label(v)
                )));
            };
            let nargs: Vec<Elem> = args.iter().map(|e| new_of[e]).collect();
            out.functions[fi].set(&nargs, *nv);
        }
    }
    Ok((out, old))
}

/// The substructure induced by `subset`. The subset must contain every
/// constant and be closed under every function.
pub fn induced_substructure(s: &Structure, subset: &BTreeSet<Elem>) -> Result<Structure> {
    induced_substructure_with_map(s, subset).map(|(st, _)| st)
}

/// All tuples of length `arity` over `elems`, lexicographically.
pub fn tuples_over(elems: &[Elem], arity: usize) -> impl Iterator<Item = Vec<Elem>> + '_ {
    let total = checked_pow(elems.len(), arity).unwrap_or(usize::MAX);
    (0..total).map(move |mut code| {
        let mut t = vec![Elem(0); arity];
        for slot in t.iter_mut().rev() {
            *slot = elems[code % elems.len()];
            code /= elems.len();
        }
        t
    })
}

/// A position in an atomic formula: a tuple variable (0-based) or a
/// constant symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeArg {
    Var(usize),
    Const(String),
}

impl fmt::Display for TypeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeArg::Var(i) => write!(f, "x{}", i + 1),
            TypeArg::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Rel(String, Vec<TypeArg>),
    Eq(TypeArg, TypeArg),
    /// `f(args) = value`
    Fun(String, Vec<TypeArg>, TypeArg),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |args: &[TypeArg]| {
            args.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Atom::Rel(r, args) => write!(f, "{r}({})", join(args)),
            Atom::Eq(a, b) => write!(f, "{a}={b}"),
            Atom::Fun(g, args, v) => write!(f, "{g}({})={v}", join(args)),
        }
    }
}

/// The satisfied atoms of a tuple, drawn from a fixed enumeration:
/// relation atoms and function-graph atoms over the tuple variables and
/// constants, and equalities between any two of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicType {
    pub arity: usize,
    pub atoms: Vec<Atom>,
}

impl AtomicType {
    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.binary_search(atom).is_ok()
    }
}

impl fmt::Display for AtomicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn atomic_type(s: &Structure, tuple: &[Elem]) -> Result<AtomicType> {
    s.check_elems(tuple)?;
    let mut args: Vec<(TypeArg, Elem)> = tuple
        .iter()
        .enumerate()
        .map(|(i, e)| (TypeArg::Var(i), *e))
        .collect();
    for c in s.schema.constants() {
        args.push((TypeArg::Const(c.to_string()), s.constant(c)?));
    }
    let values: Vec<Elem> = args.iter().map(|(_, e)| *e).collect();
    let positions: Vec<Elem> = (0..args.len()).map(Elem::from).collect();

    let mut atoms = Vec::new();
    for (ri, (name, arity)) in s.schema.relations().iter().enumerate() {
        for pos in tuples_over(&positions, *arity) {
            let t: Vec<Elem> = pos.iter().map(|p| values[p.index()]).collect();
            if s.relations[ri].contains(&t) {
                atoms.push(Atom::Rel(
                    name.clone(),
                    pos.iter().map(|p| args[p.index()].0.clone()).collect(),
                ));
            }
        }
    }
    for i in 0..args.len() {
        for j in i + 1..args.len() {
            if values[i] == values[j] {
                atoms.push(Atom::Eq(args[i].0.clone(), args[j].0.clone()));
            }
        }
    }
    for (fi, (name, arity)) in s.schema.functions().iter().enumerate() {
        if *arity == 0 {
            continue;
        }
        for pos in tuples_over(&positions, *arity) {
            let t: Vec<Elem> = pos.iter().map(|p| values[p.index()]).collect();
            let v = s.functions[fi].get(&t);
            for (arg, value) in &args {
                if *value == v {
                    atoms.push(Atom::Fun(
                        name.clone(),
                        pos.iter().map(|p| args[p.index()].0.clone()).collect(),
                        arg.clone(),
                    ));
                }
            }
        }
    }
    atoms.sort();
    Ok(AtomicType {
        arity: tuple.len(),
        atoms,
    })
}

/// Checks that `pi` (indexed by elements of `a`) is an isomorphism from `a`
/// onto `b`.
pub fn is_isomorphism(a: &Structure, b: &Structure, pi: &[Elem]) -> bool {
    if a.schema != b.schema || a.size() != b.size() || pi.len() != a.size() {
        return false;
    }
    let mut seen = vec![false; b.size()];
    for e in pi {
        if e.index() >= b.size() || std::mem::replace(&mut seen[e.index()], true) {
            return false;
        }
    }
    let map = |t: &[Elem]| -> Vec<Elem> { t.iter().map(|e| pi[e.index()]).collect() };
    for (ri, rel) in a.relations.iter().enumerate() {
        if rel.len() != b.relations[ri].len() {
            return false;
        }
        if !rel.iter().all(|t| b.relations[ri].contains(&map(&t))) {
            return false;
        }
    }
    let elems: Vec<Elem> = a.elements().collect();
    for (fi, table) in a.functions.iter().enumerate() {
        for args in tuples_over(&elems, table.arity()) {
            if pi[table.get(&args).index()] != b.functions[fi].get(&map(&args)) {
                return false;
            }
        }
    }
    true
}

/// Searches for an isomorphism from `a` onto `b`. Returns the
/// lexicographically least one (as the image sequence of `a`'s elements in
/// order), or `None` if the structures are not isomorphic or have different
/// schemas.
pub fn find_isomorphism(a: &Structure, b: &Structure) -> Option<Vec<Elem>> {
    if a.schema != b.schema || a.size() != b.size() {
        return None;
    }
    if a
        .relations
        .iter()
        .zip(&b.relations)
        .any(|(x, y)| x.len() != y.len())
    {
        return None;
    }
    let n = a.size();
    // forced images of constants
    let mut forced: Vec<Option<Elem>> = vec![None; n];
    for c in a.schema.constants() {
        let (ea, eb) = (a.constant(c).ok()?, b.constant(c).ok()?);
        match forced[ea.index()] {
            Some(prev) if prev != eb => return None,
            _ => forced[ea.index()] = Some(eb),
        }
    }
    let mut search = IsoSearch {
        a,
        b,
        forced,
        image: Vec::with_capacity(n),
        used: vec![false; n],
    };
    if search.extend() {
        debug_assert!(is_isomorphism(a, b, &search.image));
        Some(search.image)
    } else {
        None
    }
}

struct IsoSearch<'s> {
    a: &'s Structure,
    b: &'s Structure,
    forced: Vec<Option<Elem>>,
    image: Vec<Elem>,
    used: Vec<bool>,
}

impl IsoSearch<'_> {
    fn extend(&mut self) -> bool {
        let i = self.image.len();
        if i == self.a.size() {
            return is_isomorphism(self.a, self.b, &self.image);
        }
        let candidates: Vec<Elem> = match self.forced[i] {
            Some(e) => vec![e],
            None => self.b.elements().collect(),
        };
        for cand in candidates {
            if self.used[cand.index()] {
                continue;
            }
            self.image.push(cand);
            self.used[cand.index()] = true;
            if self.consistent() && self.extend() {
                return true;
            }
            self.used[cand.index()] = false;
            self.image.pop();
        }
        false
    }

    /// Checks every relation tuple over the assigned prefix that mentions
    /// the newest element, in both directions, and function values that
    /// land inside the prefix.
    fn consistent(&self) -> bool {
        let k = self.image.len();
        let newest = Elem::from(k - 1);
        let assigned: Vec<Elem> = (0..k).map(Elem::from).collect();
        for (ri, rel) in self.a.relations.iter().enumerate() {
            for t in tuples_over(&assigned, rel.arity()) {
                if !t.contains(&newest) && rel.arity() > 0 {
                    continue;
                }
                let mapped: Vec<Elem> = t.iter().map(|e| self.image[e.index()]).collect();
                if rel.contains(&t) != self.b.relations[ri].contains(&mapped) {
                    return false;
                }
            }
        }
        for (fi, table) in self.a.functions.iter().enumerate() {
            for args in tuples_over(&assigned, table.arity()) {
                if table.arity() > 0 && !args.contains(&newest) {
                    continue;
                }
                let v = table.get(&args);
                if v.index() < k {
                    let mapped: Vec<Elem> = args.iter().map(|e| self.image[e.index()]).collect();
                    if self.image[v.index()] != self.b.functions[fi].get(&mapped) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: u32) -> Elem {
        Elem(i)
    }

    #[test]
    fn insertion_is_idempotent_and_deletion_inverts() {
        let g = Structure::graph(&["a", "b"], &[]).unwrap();
        let m = Modification::ins("E", &[e(0), e(1)]);
        let g1 = apply_modification(&g, &m).unwrap();
        assert!(g1.holds("E", &[e(0), e(1)]).unwrap());
        assert_eq!(g1.relation("E").unwrap().len(), 1);
        let g2 = apply_modification(&g1, &m).unwrap();
        assert_eq!(g1, g2);
        let g3 = apply_modification(&g2, &Modification::del("E", &[e(0), e(1)])).unwrap();
        assert_eq!(g3, g);
        // deleting an absent tuple is a no-op
        let g4 = apply_modification(&g3, &Modification::del("E", &[e(1), e(0)])).unwrap();
        assert_eq!(g4, g);
    }

    #[test]
    fn malformed_modifications_are_rejected() {
        let g = Structure::graph(&["a", "b"], &[]).unwrap();
        let bad_arity = Modification::ins("E", &[e(0)]);
        assert!(matches!(
            apply_modification(&g, &bad_arity),
            Err(StructureError::MalformedModification(_))
        ));
        let bad_rel = Modification::ins("F", &[e(0), e(1)]);
        assert!(matches!(
            apply_modification(&g, &bad_rel),
            Err(StructureError::MalformedModification(_))
        ));
        let bad_elem = Modification::ins("E", &[e(0), e(7)]);
        assert!(apply_modification(&g, &bad_elem).is_err());
    }

    #[test]
    fn induced_substructure_intersects_relations() {
        let g = Structure::graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let sub = induced_substructure(&g, &[e(0), e(1)].into()).unwrap();
        assert_eq!(sub.labels(), &["a", "b"]);
        assert_eq!(sub.relation("E").unwrap().iter().collect::<Vec<_>>(), vec![vec![e(0), e(1)]]);
        let whole = induced_substructure(&g, &g.elements().collect()).unwrap();
        assert_eq!(whole, g);
    }

    #[test]
    fn induced_substructure_requires_constants() {
        let schema = Schema::graph().with_constant("s").with_constant("t");
        let mut st = Structure::new(schema, ["a", "s", "t"]).unwrap();
        st.set_constant("s", e(1)).unwrap();
        st.set_constant("t", e(2)).unwrap();
        assert!(matches!(
            induced_substructure(&st, &[e(0), e(2)].into()),
            Err(StructureError::NotClosed(_))
        ));
        assert!(induced_substructure(&st, &[e(1), e(2)].into()).is_ok());
    }

    #[test]
    fn induced_substructure_requires_function_closure() {
        let schema = Schema::new().with_function("f", 1);
        let mut st = Structure::new(schema, ["a", "b", "c"]).unwrap();
        st.set_function("f", &[e(0)], e(1)).unwrap();
        st.set_function("f", &[e(1)], e(0)).unwrap();
        st.set_function("f", &[e(2)], e(0)).unwrap();
        assert!(induced_substructure(&st, &[e(0), e(1)].into()).is_ok());
        assert!(matches!(
            induced_substructure(&st, &[e(1), e(2)].into()),
            Err(StructureError::NotClosed(_))
        ));
    }

    #[test]
    fn atomic_type_of_an_edge() {
        let g = Structure::graph(&["a", "b"], &[("a", "b")]).unwrap();
        let ty = atomic_type(&g, &[e(0), e(1)]).unwrap();
        let x1 = TypeArg::Var(0);
        let x2 = TypeArg::Var(1);
        assert!(ty.contains(&Atom::Rel("E".into(), vec![x1.clone(), x2.clone()])));
        assert!(!ty.contains(&Atom::Rel("E".into(), vec![x2.clone(), x1.clone()])));
        assert!(!ty.contains(&Atom::Eq(x1.clone(), x2.clone())));
        let loopy = atomic_type(&g, &[e(0), e(0)]).unwrap();
        assert!(loopy.contains(&Atom::Eq(x1, x2)));
    }

    #[test]
    fn isomorphism_between_single_edges() {
        let a = Structure::graph(&["a", "b"], &[("a", "b")]).unwrap();
        let b = Structure::graph(&["x", "y"], &[("y", "x")]).unwrap();
        assert_eq!(find_isomorphism(&a, &b), Some(vec![e(1), e(0)]));
    }

    #[test]
    fn triangle_is_not_a_path() {
        let tri = Structure::graph(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "c"), ("c", "a")],
        )
        .unwrap();
        let path = Structure::graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(find_isomorphism(&tri, &path), None);
    }

    #[test]
    fn isomorphism_respects_constants_and_functions() {
        let schema = Schema::new().with_constant("c").with_function("f", 1);
        let mut a = Structure::new(schema.clone(), ["p", "q"]).unwrap();
        a.set_constant("c", e(1)).unwrap();
        a.set_function("f", &[e(0)], e(1)).unwrap();
        a.set_function("f", &[e(1)], e(1)).unwrap();
        let mut b = Structure::new(schema, ["p", "q"]).unwrap();
        b.set_constant("c", e(0)).unwrap();
        b.set_function("f", &[e(0)], e(0)).unwrap();
        b.set_function("f", &[e(1)], e(0)).unwrap();
        assert_eq!(find_isomorphism(&a, &b), Some(vec![e(1), e(0)]));
        b.set_function("f", &[e(1)], e(1)).unwrap();
        assert_eq!(find_isomorphism(&a, &b), None);
    }

    #[test]
    fn sparse_and_dense_tuple_sets_iterate_lexicographically() {
        let mut dense = TupleSet::new(3, 2);
        let mut sparse = TupleSet {
            arity: 2,
            n: 3,
            repr: TupleRepr::Sparse(BTreeSet::new()),
        };
        for t in [[2, 0], [0, 1], [1, 2], [0, 0]] {
            let t = [e(t[0]), e(t[1])];
            dense.insert(&t);
            sparse.insert(&t);
        }
        assert_eq!(dense.iter().collect::<Vec<_>>(), sparse.iter().collect::<Vec<_>>());
        assert_eq!(dense.len(), 4);
        assert!(dense.remove(&[e(0), e(0)]));
        assert!(!dense.contains(&[e(0), e(0)]));
    }

    #[test]
    fn zero_ary_relations_hold_one_bit() {
        let mut q = TupleSet::new(5, 0);
        assert!(!q.contains(&[]));
        q.insert(&[]);
        assert!(q.contains(&[]));
        assert_eq!(q.iter().collect::<Vec<_>>(), vec![Vec::<Elem>::new()]);
    }

    #[test]
    fn sparse_function_tables_normalize_defaults() {
        let mut f = FunctionTable::new(600, 3);
        assert!(matches!(f.repr, FunctionRepr::Sparse(_)));
        f.set(&[e(1), e(2), e(3)], e(4));
        assert_eq!(f.get(&[e(1), e(2), e(3)]), e(4));
        f.set(&[e(1), e(2), e(3)], e(0));
        assert_eq!(f, FunctionTable::new(600, 3));
    }
}
