//! JSON documents for structures and programs, and line-based modification
//! scripts.
//!
//! Schemas list symbols as `name/arity`; constants are functions of arity
//! 0. Structures list tuples by element label. Function tables list
//! `[args..., value]` only where the value differs from the first domain
//! element, which is the value of every unlisted point. Formulas and terms
//! are written in the logic grammar and re-resolved against the program's
//! schema on reading.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    Definition, DynamicProgram, EngineError, Initializer, PaddingInit, RuleBody, UpdateKind, UpdateRule,
};
use crate::logic::{parse_formula, parse_term, ParseError};
use crate::structure::{Elem, ModKind, Modification, Schema, Structure, StructureError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        IoError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

fn in_text(what: &str, e: ParseError) -> IoError {
    IoError::Invalid(format!("in {what}: {e}"))
}

#[derive(Serialize, Deserialize, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    functions: Vec<String>,
}

fn symbol_entry(name: &str, arity: usize) -> String {
    format!("{name}/{arity}")
}

fn parse_symbol(entry: &str) -> Result<(String, usize), IoError> {
    let (name, arity) = entry
        .rsplit_once('/')
        .ok_or_else(|| IoError::Invalid(format!("symbol `{entry}` lacks `/arity`")))?;
    let arity = arity
        .parse()
        .map_err(|_| IoError::Invalid(format!("symbol `{entry}` has a bad arity")))?;
    Ok((name.to_string(), arity))
}

impl SchemaDoc {
    fn of(s: &Schema) -> Self {
        SchemaDoc {
            relations: s.relations().iter().map(|(n, a)| symbol_entry(n, *a)).collect(),
            functions: s.functions().iter().map(|(n, a)| symbol_entry(n, *a)).collect(),
        }
    }

    fn to_schema(&self) -> Result<Schema, IoError> {
        let mut s = Schema::new();
        for r in &self.relations {
            let (n, a) = parse_symbol(r)?;
            s.add_relation(&n, a)?;
        }
        for f in &self.functions {
            let (n, a) = parse_symbol(f)?;
            s.add_function(&n, a)?;
        }
        Ok(s)
    }
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    schema: SchemaDoc,
    domain: Vec<String>,
    #[serde(default)]
    constants: BTreeMap<String, String>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    functions: BTreeMap<String, Vec<Vec<String>>>,
}

fn structure_doc(s: &Structure) -> StructureDoc {
    let schema = s.schema();
    let labels = |t: &[Elem]| -> Vec<String> { t.iter().map(|e| s.label(*e).to_string()).collect() };
    let constants = schema
        .constants()
        .map(|c| (c.to_string(), s.label(s.constant(c).unwrap()).to_string()))
        .collect();
    let relations = schema
        .relations()
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.clone(), s.relation_at(i).iter().map(|t| labels(&t)).collect()))
        .collect();
    let functions = schema
        .functions()
        .iter()
        .enumerate()
        .filter(|(_, (_, a))| *a > 0)
        .map(|(i, (n, _))| {
            let points = s
                .function_at(i)
                .exceptions()
                .into_iter()
                .map(|(args, v)| {
                    let mut row = labels(&args);
                    row.push(s.label(v).to_string());
                    row
                })
                .collect();
            (n.clone(), points)
        })
        .collect();
    StructureDoc {
        schema: SchemaDoc::of(schema),
        domain: s.labels().to_vec(),
        constants,
        relations,
        functions,
    }
}

fn elems_of(s: &Structure, labels: &[String]) -> Result<Vec<Elem>, IoError> {
    labels.iter().map(|l| s.elem(l).map_err(IoError::from)).collect()
}

fn structure_from_doc(doc: &StructureDoc) -> Result<Structure, IoError> {
    let schema = doc.schema.to_schema()?;
    let mut s = Structure::new(schema.clone(), doc.domain.iter().cloned())?;
    for (c, v) in &doc.constants {
        if !schema.is_constant(c) {
            return Err(IoError::Invalid(format!("`{c}` is not a constant of the schema")));
        }
        let e = s.elem(v)?;
        s.set_constant(c, e)?;
    }
    for (r, tuples) in &doc.relations {
        let (_, arity) = schema
            .relation(r)
            .ok_or_else(|| IoError::Invalid(format!("`{r}` is not a relation of the schema")))?;
        for t in tuples {
            if t.len() != arity {
                return Err(IoError::Invalid(format!("tuple {t:?} of `{r}` has the wrong length")));
            }
            let t = elems_of(&s, t)?;
            s.insert(r, &t)?;
        }
    }
    for (f, points) in &doc.functions {
        let arity = match schema.function(f) {
            Some((_, a)) if a > 0 => a,
            _ => return Err(IoError::Invalid(format!("`{f}` is not a function of the schema"))),
        };
        for row in points {
            if row.len() != arity + 1 {
                return Err(IoError::Invalid(format!("point {row:?} of `{f}` has the wrong length")));
            }
            let row = elems_of(&s, row)?;
            s.set_function(f, &row[..arity], row[arity])?;
        }
    }
    Ok(s)
}

/// Pretty-printed JSON with a trailing newline.
pub fn structure_to_json(s: &Structure) -> String {
    let mut out = serde_json::to_string_pretty(&structure_doc(s)).expect("documents serialize");
    out.push('\n');
    out
}

pub fn structure_from_json(text: &str) -> Result<Structure, IoError> {
    structure_from_doc(&serde_json::from_str(text)?)
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    symbol: String,
    on: String,
    #[serde(default)]
    params: Vec<String>,
    #[serde(default)]
    targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    term: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct DefinitionDoc {
    symbol: String,
    #[serde(default)]
    params: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    term: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum InitializerDoc {
    Empty,
    StaticBruteforce { definitions: Vec<DefinitionDoc> },
    MaxOutdegree,
    Padding { variant: String, plus: usize, truth_table: String },
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct ProgramDoc {
    input: SchemaDoc,
    aux: SchemaDoc,
    query: String,
    supported: Vec<String>,
    initializer: InitializerDoc,
    rules: Vec<RuleDoc>,
}

fn kind_text(k: &UpdateKind) -> String {
    format!("{} {}", k.kind, k.relation)
}

fn parse_kind(text: &str) -> Result<UpdateKind, IoError> {
    match text.split_whitespace().collect::<Vec<_>>()[..] {
        ["ins", r] => Ok(UpdateKind::ins(r)),
        ["del", r] => Ok(UpdateKind::del(r)),
        _ => Err(IoError::Invalid(format!("bad modification kind `{text}` (expected `ins R` or `del R`)"))),
    }
}

fn body_texts(body: &RuleBody) -> (Option<String>, Option<String>) {
    match body {
        RuleBody::Formula(f) => (Some(f.to_string()), None),
        RuleBody::Term(t) => (None, Some(t.to_string())),
    }
}

fn parse_body(what: &str, formula: &Option<String>, term: &Option<String>, schema: &Schema) -> Result<RuleBody, IoError> {
    match (formula, term) {
        (Some(f), None) => Ok(RuleBody::Formula(
            parse_formula(f).map_err(|e| in_text(what, e))?.resolve_constants(schema),
        )),
        (None, Some(t)) => Ok(RuleBody::Term(
            parse_term(t).map_err(|e| in_text(what, e))?.resolve_constants(schema),
        )),
        _ => Err(IoError::Invalid(format!("{what} needs exactly one of `formula` and `term`"))),
    }
}

fn program_doc(p: &DynamicProgram) -> ProgramDoc {
    let rules = p
        .rules
        .iter()
        .map(|r| {
            let (formula, term) = body_texts(&r.body);
            RuleDoc {
                symbol: r.symbol.clone(),
                on: kind_text(&r.on),
                params: r.params.clone(),
                targets: r.targets.clone(),
                formula,
                term,
            }
        })
        .collect();
    let initializer = match &p.initializer {
        Initializer::Empty => InitializerDoc::Empty,
        Initializer::MaxOutdegree => InitializerDoc::MaxOutdegree,
        Initializer::StaticBruteforce(defs) => InitializerDoc::StaticBruteforce {
            definitions: defs
                .iter()
                .map(|d| {
                    let (formula, term) = body_texts(&d.body);
                    DefinitionDoc {
                        symbol: d.symbol.clone(),
                        params: d.params.clone(),
                        formula,
                        term,
                    }
                })
                .collect(),
        },
        Initializer::Padding(pi) => InitializerDoc::Padding {
            variant: pi.variant.to_string(),
            plus: pi.plus,
            truth_table: pi.truth_table.clone(),
        },
    };
    ProgramDoc {
        input: SchemaDoc::of(&p.input),
        aux: SchemaDoc::of(&p.aux),
        query: p.query.clone(),
        supported: p.supported.iter().map(kind_text).collect(),
        initializer,
        rules,
    }
}

fn program_from_doc(doc: &ProgramDoc) -> Result<DynamicProgram, IoError> {
    let input = doc.input.to_schema()?;
    let aux = doc.aux.to_schema()?;
    let combined = input.union(&aux)?;
    let mut rules = Vec::with_capacity(doc.rules.len());
    for (i, r) in doc.rules.iter().enumerate() {
        let what = format!("rule {} ({} on {})", i + 1, r.symbol, r.on);
        rules.push(UpdateRule {
            symbol: r.symbol.clone(),
            on: parse_kind(&r.on)?,
            params: r.params.clone(),
            targets: r.targets.clone(),
            body: parse_body(&what, &r.formula, &r.term, &combined)?,
        });
    }
    let initializer = match &doc.initializer {
        InitializerDoc::Empty => Initializer::Empty,
        InitializerDoc::MaxOutdegree => Initializer::MaxOutdegree,
        InitializerDoc::StaticBruteforce { definitions } => Initializer::StaticBruteforce(
            definitions
                .iter()
                .map(|d| {
                    Ok(Definition {
                        symbol: d.symbol.clone(),
                        params: d.params.clone(),
                        body: parse_body(&format!("definition of {}", d.symbol), &d.formula, &d.term, &combined)?,
                    })
                })
                .collect::<Result<_, IoError>>()?,
        ),
        InitializerDoc::Padding {
            variant,
            plus,
            truth_table,
        } => Initializer::Padding(PaddingInit {
            variant: variant.parse().map_err(IoError::Invalid)?,
            plus: *plus,
            truth_table: truth_table.clone(),
        }),
    };
    let p = DynamicProgram {
        input,
        aux,
        rules,
        initializer,
        query: doc.query.clone(),
        supported: doc.supported.iter().map(|k| parse_kind(k)).collect::<Result<_, _>>()?,
    };
    p.validate()?;
    Ok(p)
}

pub fn program_to_json(p: &DynamicProgram) -> String {
    let mut out = serde_json::to_string_pretty(&program_doc(p)).expect("documents serialize");
    out.push('\n');
    out
}

/// Reads and validates a program.
pub fn program_from_json(text: &str) -> Result<DynamicProgram, IoError> {
    program_from_doc(&serde_json::from_str(text)?)
}

/// One `ins R a b` / `del R a b` line per modification, labels from `s`.
pub fn script_to_text(s: &Structure, ms: &[Modification]) -> String {
    ms.iter().map(|m| format!("{}\n", m.render(s))).collect()
}

/// Parses a modification script against the labels and schema of `s`.
/// Blank lines and `#` comments are skipped.
pub fn script_from_text(s: &Structure, text: &str) -> Result<Vec<Modification>, IoError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        // (column, word) pairs, columns 1-based
        let mut words: Vec<(usize, &str)> = Vec::new();
        let mut start = None;
        for (j, ch) in line.char_indices().chain([(line.len(), ' ')]) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(j),
                (true, Some(b)) => {
                    words.push((b + 1, &line[b..j]));
                    start = None;
                }
                _ => {}
            }
        }
        if words.is_empty() {
            continue;
        }
        let err = |column: usize, message: String| IoError::Syntax {
            line: i + 1,
            column,
            message,
        };
        let (c0, w0) = words[0];
        let kind = match w0 {
            "ins" => ModKind::Ins,
            "del" => ModKind::Del,
            w => return Err(err(c0, format!("expected `ins` or `del`, found `{w}`"))),
        };
        let Some(&(c1, relation)) = words.get(1) else {
            return Err(err(c0 + w0.len(), "missing relation name".into()));
        };
        let (_, arity) = s
            .schema()
            .relation(relation)
            .ok_or_else(|| err(c1, format!("unknown relation `{relation}`")))?;
        if words.len() - 2 != arity {
            return Err(err(c1, format!("`{relation}` takes {arity} elements, found {}", words.len() - 2)));
        }
        let tuple = words[2..]
            .iter()
            .map(|(c, l)| s.elem(l).map_err(|_| err(*c, format!("unknown element `{l}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(Modification {
            kind,
            relation: relation.to_string(),
            tuple,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::builtins;

    #[test]
    fn structure_document_shape() {
        let mut s = Structure::new(
            Schema::graph().with_constant("s").with_function("f", 1),
            ["a", "b", "c"],
        )
        .unwrap();
        s.insert("E", &[Elem(0), Elem(2)]).unwrap();
        s.set_constant("s", Elem(1)).unwrap();
        s.set_function("f", &[Elem(2)], Elem(1)).unwrap();
        let text = structure_to_json(&s);
        assert!(text.contains("\"E/2\""));
        assert!(text.contains("\"s/0\""));
        let back = structure_from_json(&text).unwrap();
        assert_eq!(structure_to_json(&back), text);
        assert_eq!(back.apply("f", &[Elem(2)]).unwrap(), Elem(1));
        assert_eq!(back.apply("f", &[Elem(1)]).unwrap(), Elem(0));
    }

    #[test]
    fn builtin_programs_round_trip() {
        for p in [builtins::three_clique(), builtins::max_outdegree()] {
            let text = program_to_json(&p);
            let back = program_from_json(&text).unwrap();
            // hand-built programs may leave constants as unresolved variables
            assert_eq!(program_to_json(&back), text);
            assert_eq!(program_from_json(&program_to_json(&back)).unwrap(), back);
        }
    }

    #[test]
    fn json_errors_have_positions() {
        match structure_from_json("{\n  \"domain\": [1,\n") {
            Err(IoError::Syntax { line, .. }) => assert!(line >= 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            structure_from_json(r#"{"schema": {"relations": ["E/2"]}, "domain": ["a"], "relations": {"E": [["a", "z"]]}}"#),
            Err(IoError::Structure(_))
        ));
    }

    #[test]
    fn scripts() {
        let g = Structure::graph(&["a1", "a2", "a3"], &[]).unwrap();
        let ms = script_from_text(&g, "# warm-up\nins E a1 a2\n\n  del E a2 a3  # gone\n").unwrap();
        assert_eq!(ms, vec![Modification::ins("E", &[Elem(0), Elem(1)]), Modification::del("E", &[Elem(1), Elem(2)])]);
        assert_eq!(script_to_text(&g, &ms), "ins E a1 a2\ndel E a2 a3\n");
        match script_from_text(&g, "ins E a1 a2\n   ins E a1 a9\n") {
            Err(IoError::Syntax { line, column, message }) => {
                assert_eq!((line, column), (2, 13));
                assert!(message.contains("a9"));
            }
            other => panic!("{other:?}"),
        }
        assert!(script_from_text(&g, "ins E a1").is_err());
        assert!(script_from_text(&g, "upd E a1 a2").is_err());
    }
}
