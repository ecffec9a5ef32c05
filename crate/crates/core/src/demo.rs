//! Replays of the worked examples with their stated facts checked.
//!
//! Each demo produces a trace (one line per modification: index,
//! modification, query, auxiliary changes) and a list of named checks.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::compiler::{compile_pattern, extends_to, extension_example, Partition};
use crate::engine::builtins::{max_outdegree, three_clique, MaxOutdegreeOracle};
use crate::engine::{aux_delta, EngineError, Executor, ProgramState};
use crate::padding::{build_padding_program, random_property, PaddingVariant, SplitDomain};
use crate::structure::{apply_modification, Elem, Modification, Structure};
use crate::DynamicProgram;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Demo {
    ThreeClique,
    Extension,
    MaxOutdegree,
    Padding,
}

impl Demo {
    pub const ALL: [Demo; 4] = [Demo::ThreeClique, Demo::Extension, Demo::MaxOutdegree, Demo::Padding];
}

impl fmt::Display for Demo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Demo::ThreeClique => "three-clique",
            Demo::Extension => "extension",
            Demo::MaxOutdegree => "max-outdegree",
            Demo::Padding => "padding",
        })
    }
}

impl FromStr for Demo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Demo::ALL
            .into_iter()
            .find(|d| d.to_string() == s)
            .ok_or_else(|| format!("unknown demo `{s}` (expected one of: {})", Demo::ALL.iter().join(", ")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DemoReport {
    pub trace: Vec<String>,
    pub checks: Vec<(String, bool)>,
}

impl DemoReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.trace {
            out.push_str(l);
            out.push('\n');
        }
        for (what, ok) in &self.checks {
            out.push_str(&format!("check {}: {what}\n", if *ok { "ok" } else { "FAILED" }));
        }
        out
    }
}

/// The query as text: `true`/`false` for 0-ary queries, else the set of
/// tuples.
pub fn render_query(p: &DynamicProgram, s: &ProgramState) -> String {
    let q = s.query_relation();
    if p.aux.relation(&p.query).map(|(_, a)| a) == Some(0) {
        return q.contains(&[]).to_string();
    }
    let st = s.structure();
    format!("{{{}}}", q.iter().map(|t| st.render_tuple(&t)).join(","))
}

/// One trace record: `index modification Q=... [deltas]`.
pub fn trace_line(p: &DynamicProgram, index: usize, m: &Modification, before: &ProgramState, after: &ProgramState) -> String {
    let delta = aux_delta(p, before, after);
    format!(
        "{index} {} Q={} [{}]",
        m.render(before.structure()),
        render_query(p, after),
        delta.join(" ")
    )
}

pub fn run_demo(d: Demo) -> Result<DemoReport, EngineError> {
    match d {
        Demo::ThreeClique => three_clique_demo(),
        Demo::Extension => extension_demo(),
        Demo::MaxOutdegree => max_outdegree_demo(),
        Demo::Padding => padding_demo(),
    }
}

fn pair(s: &Structure, x: &str, y: &str) -> [Elem; 2] {
    [s.elem(x).unwrap(), s.elem(y).unwrap()]
}

/// The triangle program on `a1..a5` with edges `a2-a3`, `a3-a4`, `a1-a5`;
/// inserting `(a2,a5)` makes `(a1,a2)` triangle-completing.
fn three_clique_demo() -> Result<DemoReport, EngineError> {
    let p = three_clique();
    let ex = Executor::new(&p)?;
    let g = Structure::graph(&["a1", "a2", "a3", "a4", "a5"], &[("a2", "a3"), ("a3", "a4"), ("a1", "a5")])?;
    let s0 = ex.init(&g)?;
    let m = Modification::ins("E", &pair(&g, "a2", "a5"));
    let s1 = ex.step(&s0, &m)?;
    let mut r = DemoReport::default();
    r.trace.push(format!("initial Q={} R={}", render_query(&p, &s0), render_relation(&s0, "R")));
    r.trace.push(trace_line(&p, 1, &m, &s0, &s1));
    let holds = |s: &ProgramState, x, y| s.structure().holds("R", &pair(&g, x, y)).unwrap();
    r.check("R lacks (a1,a2) before ins E a2 a5", !holds(&s0, "a1", "a2"));
    r.check("R gains (a1,a2) on ins E a2 a5", holds(&s1, "a1", "a2"));
    r.check("R gains (a2,a1) on ins E a2 a5", holds(&s1, "a2", "a1"));
    r.check("no triangle yet", !s1.query_bit());
    let m2 = Modification::ins("E", &pair(&g, "a1", "a2"));
    let s2 = ex.step(&s1, &m2)?;
    r.trace.push(trace_line(&p, 2, &m2, &s1, &s2));
    r.check("inserting (a1,a2) completes a triangle", s2.query_bit());
    Ok(r)
}

fn render_relation(s: &ProgramState, name: &str) -> String {
    let st = s.structure();
    format!("{{{}}}", st.relation(name).unwrap().iter().map(|t| st.render_tuple(&t)).join(","))
}

/// The four-node pattern: `(a1,a2,a3)` extends to the part with
/// `y = (x1,x2,x3)`; `(a1,a2)` extends to the part with `y = (x1,x2)` only
/// after inserting `(a3,a1)`. Checked both directly and on the compiled
/// program's auxiliary relations.
fn extension_demo() -> Result<DemoReport, EngineError> {
    let (h, g) = extension_example();
    let e = |l: &str| g.elem(l).unwrap();
    let three = Partition::named(&h, &["x1", "x2", "x3"]);
    let two = Partition::named(&h, &["x1", "x2"]);
    let m = Modification::ins("E", &[e("a3"), e("a1")]);
    let after = apply_modification(&g, &m)?;
    let mut r = DemoReport::default();
    r.trace.push(format!(
        "pattern {} on graph {}",
        h.edges.iter().map(|(a, b)| format!("{}->{}", h.nodes[*a], h.nodes[*b])).join(" "),
        g.relation("E").unwrap().iter().map(|t| g.render_tuple(&t)).join(" ")
    ));
    let abc = [e("a1"), e("a2"), e("a3")];
    let ab = [e("a1"), e("a2")];
    r.check("(a1,a2,a3) extends with y=(x1,x2,x3) before", extends_to(&g, &abc, &h, &three));
    r.check("(a1,a2) does not extend with y=(x1,x2) before", !extends_to(&g, &ab, &h, &two));
    r.check("(a1,a2) extends with y=(x1,x2) after ins E a3 a1", extends_to(&after, &ab, &h, &two));

    let p = compile_pattern(&h);
    let ex = Executor::new(&p)?;
    let s0 = ex.init(&g)?;
    let s1 = ex.step(&s0, &m)?;
    r.trace.push(trace_line(&p, 1, &m, &s0, &s1));
    let holds = |s: &ProgramState, rel: &str, t: &[Elem]| s.structure().holds(rel, t).unwrap();
    r.check("compiled R_y_x1_x2_x3_z_x4 holds (a1,a2,a3) before", holds(&s0, "R_y_x1_x2_x3_z_x4", &abc));
    r.check("compiled R_y_x1_x2_z_x3_x4 lacks (a1,a2) before", !holds(&s0, "R_y_x1_x2_z_x3_x4", &ab));
    r.check("compiled R_y_x1_x2_z_x3_x4 gains (a1,a2)", holds(&s1, "R_y_x1_x2_z_x3_x4", &ab));
    Ok(r)
}

/// A fixed insertion/deletion sequence on four nodes; after every step `Q`
/// is compared with the nodes of maximal outdegree.
fn max_outdegree_demo() -> Result<DemoReport, EngineError> {
    let p = max_outdegree();
    let ex = Executor::new(&p)?;
    let g = Structure::graph(&["n1", "n2", "n3", "n4"], &[])?;
    let script = [
        ("ins", "n1", "n2"),
        ("ins", "n2", "n3"),
        ("ins", "n1", "n3"),
        ("ins", "n1", "n3"),
        ("ins", "n3", "n1"),
        ("ins", "n2", "n4"),
        ("del", "n1", "n2"),
        ("del", "n1", "n3"),
        ("ins", "n4", "n4"),
        ("del", "n2", "n1"),
    ];
    let mut r = DemoReport::default();
    let mut s = ex.init(&g)?;
    r.trace.push(format!("initial Q={}", render_query(&p, &s)));
    for (i, (k, a, b)) in script.iter().enumerate() {
        let t = pair(&g, a, b);
        let m = if *k == "ins" { Modification::ins("E", &t) } else { Modification::del("E", &t) };
        let next = ex.step(&s, &m)?;
        r.trace.push(trace_line(&p, i + 1, &m, &s, &next));
        let expected = MaxOutdegreeOracle::answer(&next.input());
        let got: std::collections::BTreeSet<Elem> = next.query_relation().iter().map(|t| t[0]).collect();
        r.check(format!("step {}: Q is the set of nodes of maximal outdegree", i + 1), got == expected);
        s = next;
    }
    Ok(r)
}

/// The ternary padding program over two modifiable nodes for a seeded
/// random property; `p` must name the current graph after every step.
fn padding_demo() -> Result<DemoReport, EngineError> {
    let split = SplitDomain::new(PaddingVariant::Ternary, 2).map_err(|e| EngineError::InvalidProgram(e.to_string()))?;
    let property = random_property(split, 1);
    let p = build_padding_program(&property, split).map_err(|e| EngineError::InvalidProgram(e.to_string()))?;
    let ex = Executor::new(&p)?;
    let g = Structure::new(p.input.clone(), split.labels())?;
    let mut s = ex.init(&g)?;
    let mut r = DemoReport::default();
    r.trace.push(format!(
        "|D+| = {}, |D-| = {}, property table {}",
        split.plus,
        split.minus(),
        crate::padding::encode_truth_table(&property)
    ));
    let e = |i: usize| Elem::from(i);
    let script = [
        Modification::ins("E", &[e(0), e(1)]),
        Modification::ins("E", &[e(1), e(1)]),
        Modification::del("E", &[e(0), e(1)]),
        Modification::ins("E", &[e(1), e(0)]),
        Modification::ins("E", &[e(0), e(0)]),
    ];
    for (i, m) in script.iter().enumerate() {
        let next = ex.step(&s, m)?;
        r.trace.push(trace_line(&p, i + 1, m, &s, &next));
        let code = split.encode(next.structure());
        let pointer = next.structure().constant("p")?;
        r.check(format!("step {}: p points to the current graph", i + 1), pointer == split.graph_elem(code));
        r.check(format!("step {}: Q is the property of the current graph", i + 1), next.query_bit() == property[code]);
        s = next;
    }
    let outside = Modification::ins("E", &[e(0), e(split.plus)]);
    r.check(
        "modifications outside D+ are rejected",
        matches!(ex.step(&s, &outside), Err(EngineError::OutsideModifiable(_))),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_demos_pass() {
        for d in Demo::ALL {
            let r = run_demo(d).unwrap();
            assert!(r.passed(), "{d}:\n{}", r.render());
            assert_eq!(d.to_string().parse::<Demo>().unwrap(), d);
        }
    }

    #[test]
    fn three_clique_trace() {
        let r = run_demo(Demo::ThreeClique).unwrap();
        assert_eq!(r.trace[1], "1 ins E a2 a5 Q=false [+R(a1,a2) +R(a2,a1) +R(a3,a5) +R(a5,a3)]");
    }
}
