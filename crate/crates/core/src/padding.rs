//! Programs that maintain an arbitrary boolean graph property on a small
//! modifiable part of the domain by following pointers through lookup
//! tables stored on a large non-modifiable part.
//!
//! Layout of the domain for `m` modifiable elements `v0..v{m-1}`:
//! the modifiable elements come first, then one element `g{G}` per graph
//! `G` over them, numbered by the row-major adjacency bits (`(a,b)` is bit
//! `a*m + b`). The binary variant then adds, for every graph `G` and
//! modifiable `a`, the intermediates `g{G}_v{a}_ins` and `g{G}_v{a}_del`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{
    difftest_with, DifftestConfig, DifftestReport, DynamicProgram, EngineError, Initializer,
    Oracle, PaddingInit, ProgramState, UpdateKind, UpdateRule,
};
use crate::logic::{parse_formula, parse_term};
use crate::structure::{Elem, ModKind, Schema, Structure, TupleSet};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum PaddingVariant {
    /// Ternary lookup functions `f_ins(a,b,c_G)`.
    Ternary,
    /// Binary functions through an intermediate element per node and kind.
    Binary,
}

impl fmt::Display for PaddingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PaddingVariant::Ternary => "ternary",
            PaddingVariant::Binary => "binary",
        })
    }
}

impl FromStr for PaddingVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ternary" => Ok(PaddingVariant::Ternary),
            "binary" => Ok(PaddingVariant::Binary),
            other => Err(format!("unknown padding variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PaddingError {
    #[error("domain of size {found} does not split for {plus} modifiable elements ({variant} needs {expected})")]
    Split {
        variant: PaddingVariant,
        plus: usize,
        expected: usize,
        found: usize,
    },
    #[error("{0} modifiable elements need too large a domain")]
    TooLarge(usize),
    #[error("truth table has {found} entries, expected {expected}")]
    TruthTable { expected: usize, found: usize },
    #[error("malformed truth table: {0}")]
    Hex(String),
}

/// The split of the domain into modifiable and non-modifiable elements.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SplitDomain {
    pub variant: PaddingVariant,
    /// Number of modifiable elements.
    pub plus: usize,
}

impl SplitDomain {
    pub fn new(variant: PaddingVariant, plus: usize) -> Result<Self, PaddingError> {
        if plus * plus > 20 {
            return Err(PaddingError::TooLarge(plus));
        }
        Ok(SplitDomain { variant, plus })
    }

    /// Number of graphs over the modifiable elements.
    pub fn graphs(&self) -> usize {
        1 << (self.plus * self.plus)
    }

    /// Number of non-modifiable elements.
    pub fn minus(&self) -> usize {
        match self.variant {
            PaddingVariant::Ternary => self.graphs(),
            PaddingVariant::Binary => self.graphs() * (1 + 2 * self.plus),
        }
    }

    pub fn size(&self) -> usize {
        self.plus + self.minus()
    }

    pub fn modifiable(&self) -> BTreeSet<Elem> {
        (0..self.plus).map(Elem::from).collect()
    }

    pub fn graph_elem(&self, g: usize) -> Elem {
        Elem::from(self.plus + g)
    }

    /// The intermediate `c_{G,a,kind}` of the binary variant.
    pub fn intermediate(&self, g: usize, a: usize, kind: ModKind) -> Elem {
        let k = match kind {
            ModKind::Ins => 0,
            ModKind::Del => 1,
        };
        Elem::from(self.plus + self.graphs() + (g * self.plus + a) * 2 + k)
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = (0..self.plus).map(|i| format!("v{i}")).collect();
        out.extend((0..self.graphs()).map(|g| format!("g{g}")));
        if self.variant == PaddingVariant::Binary {
            for g in 0..self.graphs() {
                for a in 0..self.plus {
                    out.push(format!("g{g}_v{a}_ins"));
                    out.push(format!("g{g}_v{a}_del"));
                }
            }
        }
        out
    }

    pub fn bit(&self, a: Elem, b: Elem) -> usize {
        a.index() * self.plus + b.index()
    }

    /// Number of the graph formed by the edges among modifiable elements.
    pub fn encode(&self, s: &Structure) -> usize {
        s.relation("E")
            .expect("graph input")
            .iter()
            .filter(|t| t[0].index() < self.plus && t[1].index() < self.plus)
            .fold(0, |g, t| g | 1 << self.bit(t[0], t[1]))
    }

    fn check(&self, n: usize) -> Result<(), PaddingError> {
        if n != self.size() {
            return Err(PaddingError::Split {
                variant: self.variant,
                plus: self.plus,
                expected: self.size(),
                found: n,
            });
        }
        Ok(())
    }
}

/// Packs a truth table into hex, little-endian within each byte.
pub fn encode_truth_table(bits: &[bool]) -> String {
    let bytes: Vec<u8> = bits
        .chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |b, (i, x)| b | (u8::from(*x) << i)))
        .collect();
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn decode_truth_table(hex: &str, len: usize) -> Result<Vec<bool>, PaddingError> {
    if hex.len() != len.div_ceil(8) * 2 {
        return Err(PaddingError::TruthTable {
            expected: len,
            found: hex.len() * 4,
        });
    }
    let mut out = Vec::with_capacity(len);
    for i in 0..hex.len() / 2 {
        let byte = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16)
            .map_err(|e| PaddingError::Hex(e.to_string()))?;
        for j in 0..8 {
            if out.len() < len {
                out.push(byte >> j & 1 == 1);
            }
        }
    }
    Ok(out)
}

/// The program for `property` (one entry per graph number).
pub fn build_padding_program(
    property: &[bool],
    split: SplitDomain,
) -> Result<DynamicProgram, PaddingError> {
    if property.len() != split.graphs() {
        return Err(PaddingError::TruthTable {
            expected: split.graphs(),
            found: property.len(),
        });
    }
    let ins = UpdateKind::ins("E");
    let del = UpdateKind::del("E");
    let mut aux = Schema::new()
        .with_relation("Q", 0)
        .with_relation("R_Q", 1)
        .with_constant("p");
    let fun_arity = match split.variant {
        PaddingVariant::Ternary => 3,
        PaddingVariant::Binary => 2,
    };
    let mut tables = vec!["f_ins", "f_del"];
    aux.add_function("f_ins", fun_arity).unwrap();
    aux.add_function("f_del", fun_arity).unwrap();
    if split.variant == PaddingVariant::Binary {
        aux.add_function("s_ins", 2).unwrap();
        aux.add_function("s_del", 2).unwrap();
        tables.extend(["s_ins", "s_del"]);
    }
    let mut rules = Vec::new();
    for (kind, tag) in [(&ins, "ins"), (&del, "del")] {
        let params = ["u", "v"];
        let target = match split.variant {
            PaddingVariant::Ternary => format!("f_{tag}(u,v,p)"),
            PaddingVariant::Binary => format!("s_{tag}(v,f_{tag}(u,p))"),
        };
        rules.push(UpdateRule::term("p", kind.clone(), &params, &[], parse_term(&target).unwrap()));
        rules.push(UpdateRule::formula(
            "Q",
            kind.clone(),
            &params,
            &[],
            parse_formula(&format!("R_Q({target})")).unwrap(),
        ));
        rules.push(UpdateRule::formula("R_Q", kind.clone(), &params, &["x"], parse_formula("R_Q(x)").unwrap()));
        let xs: Vec<String> = (1..=fun_arity).map(|i| format!("x{i}")).collect();
        for t in &tables {
            let arity = if t.starts_with('s') { 2 } else { fun_arity };
            let args = &xs[..arity];
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let body = parse_term(&format!("{t}({})", args.join(","))).unwrap();
            rules.push(UpdateRule::term(t, kind.clone(), &params, &refs, body));
        }
    }
    Ok(DynamicProgram {
        input: Schema::graph(),
        aux,
        rules,
        initializer: Initializer::Padding(PaddingInit {
            variant: split.variant,
            plus: split.plus,
            truth_table: encode_truth_table(property),
        }),
        query: "Q".into(),
        supported: vec![ins, del],
    })
}

/// Fills the lookup tables, `R_Q`, the pointer `p` and the query bit, and
/// restricts modifications to the modifiable elements.
pub(crate) fn initialize(state: &mut ProgramState, init: &PaddingInit) -> Result<(), EngineError> {
    let err = |e: PaddingError| EngineError::Init(e.to_string());
    let split = SplitDomain::new(init.variant, init.plus).map_err(err)?;
    let property = decode_truth_table(&init.truth_table, split.graphs()).map_err(err)?;
    let s = state.structure_mut();
    split.check(s.size()).map_err(err)?;
    if s.relation("E")
        .unwrap()
        .iter()
        .any(|t| t.iter().any(|e| e.index() >= split.plus))
    {
        return Err(EngineError::Init("initial edges must lie among the modifiable elements".into()));
    }
    let m = split.plus;
    for (g, &holds) in property.iter().enumerate() {
        let cg = split.graph_elem(g);
        if holds {
            s.insert("R_Q", &[cg])?;
        }
        for a in 0..m {
            for b in 0..m {
                let (ea, eb) = (Elem::from(a), Elem::from(b));
                let bit = 1 << split.bit(ea, eb);
                let (with, without) = (split.graph_elem(g | bit), split.graph_elem(g & !bit));
                match split.variant {
                    PaddingVariant::Ternary => {
                        s.set_function("f_ins", &[ea, eb, cg], with)?;
                        s.set_function("f_del", &[ea, eb, cg], without)?;
                    }
                    PaddingVariant::Binary => {
                        let ci = split.intermediate(g, a, ModKind::Ins);
                        let cd = split.intermediate(g, a, ModKind::Del);
                        s.set_function("f_ins", &[ea, cg], ci)?;
                        s.set_function("f_del", &[ea, cg], cd)?;
                        s.set_function("s_ins", &[eb, ci], with)?;
                        s.set_function("s_del", &[eb, cd], without)?;
                    }
                }
            }
        }
    }
    let g0 = split.encode(s);
    s.set_constant("p", split.graph_elem(g0))?;
    if property[g0] {
        s.insert("Q", &[])?;
    }
    state.set_modifiable(Some(split.modifiable()));
    Ok(())
}

/// Compares `Q` with the truth table and checks that `p` points to the
/// element of the current graph.
pub struct PaddingOracle {
    split: SplitDomain,
    property: Vec<bool>,
}

impl PaddingOracle {
    pub fn new(split: SplitDomain, property: Vec<bool>) -> Self {
        PaddingOracle { split, property }
    }
}

impl Oracle for PaddingOracle {
    fn expected(&mut self, input: &Structure) -> Option<TupleSet> {
        let mut out = TupleSet::new(input.size(), 0);
        if self.property[self.split.encode(input)] {
            out.insert(&[]);
        }
        Some(out)
    }

    fn check_state(&mut self, state: &ProgramState) -> Result<(), String> {
        let s = state.structure();
        let g = self.split.encode(s);
        let p = s.constant("p").unwrap();
        if p != self.split.graph_elem(g) {
            return Err(format!("p points to {}, current graph is g{g}", s.label(p)));
        }
        Ok(())
    }
}

/// A pseudorandom property: one fair coin per graph from
/// `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_property(split: SplitDomain, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..split.graphs()).map(|_| rng.gen_bool(0.5)).collect()
}

/// Differential test of the padding program for a random property on
/// random insertion/deletion sequences over the modifiable elements.
pub fn difftest_padding(
    split: SplitDomain,
    property_seed: u64,
    sequences: usize,
    length: usize,
    seed: u64,
) -> Result<DifftestReport, EngineError> {
    let property = random_property(split, property_seed);
    let p = build_padding_program(&property, split).map_err(|e| EngineError::InvalidProgram(e.to_string()))?;
    let mut oracle = PaddingOracle::new(split, property);
    let cfg = DifftestConfig::new(split.size(), sequences, length, seed).from_empty();
    difftest_with(&p, &mut oracle, &cfg, &|s, rng| {
        for a in 0..split.plus {
            for b in 0..split.plus {
                if rng.gen_bool(0.3) {
                    s.insert("E", &[Elem::from(a), Elem::from(b)]).unwrap();
                }
            }
        }
        split.modifiable().into_iter().collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Executor;
    use crate::Modification;

    #[test]
    fn split_sizes() {
        let t = SplitDomain::new(PaddingVariant::Ternary, 2).unwrap();
        assert_eq!(t.minus(), 16);
        let b = SplitDomain::new(PaddingVariant::Binary, 2).unwrap();
        assert_eq!(b.minus(), 16 * 5);
        assert_eq!(SplitDomain::new(PaddingVariant::Ternary, 3).unwrap().minus(), 512);
        assert_eq!(b.labels().len(), b.size());
    }

    #[test]
    fn truth_tables_round_trip() {
        let bits: Vec<bool> = (0..16).map(|i| i % 3 == 0).collect();
        let hex = encode_truth_table(&bits);
        assert_eq!(hex.len(), 4);
        assert_eq!(decode_truth_table(&hex, 16).unwrap(), bits);
        assert!(decode_truth_table("zz", 8).is_err());
    }

    fn run_one(variant: PaddingVariant) {
        let split = SplitDomain::new(variant, 2).unwrap();
        let property = random_property(split, 7);
        let p = build_padding_program(&property, split).unwrap();
        let ex = Executor::new(&p).unwrap();
        let input = Structure::new(Schema::graph(), split.labels()).unwrap();
        let s0 = ex.init(&input).unwrap();
        assert_eq!(s0.structure().constant("p").unwrap(), split.graph_elem(0));
        let s1 = ex.step(&s0, &Modification::ins("E", &[Elem(0), Elem(1)])).unwrap();
        let g = 1 << split.bit(Elem(0), Elem(1));
        assert_eq!(s1.structure().constant("p").unwrap(), split.graph_elem(g));
        assert_eq!(s1.query_bit(), property[g]);
        let err = ex.step(&s1, &Modification::ins("E", &[Elem(0), Elem(5)])).unwrap_err();
        assert!(matches!(err, EngineError::OutsideModifiable(_)));
    }

    #[test]
    fn ternary_pointer_follows_insertions() {
        run_one(PaddingVariant::Ternary);
    }

    #[test]
    fn binary_pointer_follows_insertions() {
        run_one(PaddingVariant::Binary);
    }

    #[test]
    fn wrong_domain_size_is_a_split_error() {
        let split = SplitDomain::new(PaddingVariant::Ternary, 2).unwrap();
        let p = build_padding_program(&random_property(split, 1), split).unwrap();
        let ex = Executor::new(&p).unwrap();
        let input = Structure::new(Schema::graph(), (0..19).map(|i| i.to_string())).unwrap();
        assert!(matches!(ex.init(&input), Err(EngineError::Init(_))));
    }

    #[test]
    fn emitted_schemas_respect_arity_bounds() {
        for variant in [PaddingVariant::Ternary, PaddingVariant::Binary] {
            let split = SplitDomain::new(variant, 2).unwrap();
            let p = build_padding_program(&random_property(split, 1), split).unwrap();
            assert!(p.aux.max_relation_arity() <= 1);
            let bound = if variant == PaddingVariant::Ternary { 3 } else { 2 };
            assert_eq!(p.aux.max_function_arity(), bound);
            assert!(p.is_quantifier_free());
        }
    }
}
