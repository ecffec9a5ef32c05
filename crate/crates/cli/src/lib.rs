//! The `dynprop` command line: argument parsing, file handling, run
//! manifests and exit codes. All computation lives in `dynprop-core`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use dynprop::compiler::compile_semipositive;
use dynprop::demo::{render_query, run_demo, trace_line, Demo};
use dynprop::engine::{difftest, DifftestConfig, EngineError, Executor};
use dynprop::io::{
    program_from_json, program_to_json, script_from_text, structure_from_json, structure_to_json, IoError,
};
use dynprop::logic::parse_formula;
use dynprop::ramsey::lowerbound::{build_lowerbound_instance, run_lowerbound_demo, LowerBoundInstance, Variant};
use dynprop::ramsey::similarity::{find_similar_tuples, m_similar, qf_lemma_suite, smallest_passing_m};
use dynprop::ramsey::sublemma::{substructure_lemma_suite, StepMode, SuiteReport};
use dynprop::ramsey::{
    exhaustive_sweep, find_monochromatic_clique, search_antiramsey_coloring, HyperedgeColoring,
};
use dynprop::{ProgramState, Structure};

#[derive(Parser, Debug)]
#[command(name = "dynprop", version, about = "Workbench for quantifier-free dynamic programs")]
pub struct Cli {
    /// Directory for artifacts and their manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a semi-positive existential sentence into a program.
    Compile { sentence: PathBuf },
    /// Initial state of a program on an input structure.
    Init { program: PathBuf, structure: PathBuf },
    /// Run a modification script and print the trace.
    Run {
        program: PathBuf,
        /// Input structure, or a full state over the program's schema.
        structure: PathBuf,
        script: PathBuf,
    },
    /// Compare a program with a sentence on random modification sequences.
    Difftest {
        program: PathBuf,
        sentence: PathBuf,
        #[command(flatten)]
        params: DifftestArgs,
    },
    /// Monochromatic clique search: one seeded random coloring, or an
    /// exhaustive sweep over all colorings.
    RamseyClique {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 2)]
        colors: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sweep: bool,
    },
    /// Search for a 2-coloring of k-subsets without monochromatic l-cliques.
    RamseyAnticolor {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Generate a lower-bound instance.
    LbGen {
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Size of A.
        #[arg(long)]
        a: usize,
        /// `antiramsey` (color-0 subsets of a seeded anti-Ramsey coloring),
        /// `random` (each subset with probability 1/2), or an explicit list
        /// such as `1-2,2-3` (1-based).
        #[arg(long, default_value = "antiramsey")]
        b: String,
        #[arg(long, default_value = "clique")]
        variant: Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The k = 1 lower-bound construction end to end.
    LbDemo {
        #[arg(long, default_value = "clique")]
        variant: Variant,
        #[arg(long, default_value_t = 5)]
        a: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Find elements whose ordered tuples are pairwise m-similar.
    Similar {
        structure: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: usize,
    },
    /// Seeded substructure-lemma campaigns.
    SublemmaSuite {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the index-shifting stepper; succeeds iff violations are found.
        #[arg(long)]
        mutation: bool,
        /// Programs with unary auxiliary functions, at similarity depth m.
        #[arg(long)]
        functions: Option<usize>,
        /// With --functions: report the smallest m up to this value that
        /// passes, instead of checking one m.
        #[arg(long)]
        search_m: bool,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Replay a worked example and check its stated facts.
    Demo { name: Demo },
}

#[derive(Args, Debug, Clone)]
pub struct DifftestArgs {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub sequences: usize,
    #[arg(long, default_value_t = 12)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Exit status with a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn violation(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        usage(e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        violation(e.to_string())
    }
}

/// Provenance of one run. Reruns with equal manifests write identical
/// artifacts; the digests of those artifacts are recorded here.
#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub parameters: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What a command produced: the text for stdout, named artifacts and the
/// exit status.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub artifacts: Vec<(String, String)>,
    pub code: u8,
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, String>,
}

impl Outcome {
    fn artifact(&mut self, name: &str, content: String) {
        self.artifacts.push((name.to_string(), content));
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Compile { .. } => "compile",
        Command::Init { .. } => "init",
        Command::Run { .. } => "run",
        Command::Difftest { .. } => "difftest",
        Command::RamseyClique { .. } => "ramsey-clique",
        Command::RamseyAnticolor { .. } => "ramsey-anticolor",
        Command::LbGen { .. } => "lb-gen",
        Command::LbDemo { .. } => "lb-demo",
        Command::Similar { .. } => "similar",
        Command::SublemmaSuite { .. } => "sublemma-suite",
        Command::Demo { .. } => "demo",
    }
}

/// Runs a parsed command line. `args` are the raw arguments after the
/// program name, recorded in the manifest without `--out`.
pub fn execute(cli: &Cli, args: &[String]) -> Result<Outcome, Failure> {
    let mut out = dispatch(&cli.command)?;
    if let Some(dir) = &cli.out {
        let mut parameters = Vec::new();
        let mut skip = false;
        for a in args {
            if skip {
                skip = false;
            } else if a == "--out" {
                skip = true;
            } else if !a.starts_with("--out=") {
                parameters.push(a.clone());
            }
        }
        fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
        let mut outputs = BTreeMap::new();
        for (name, content) in &out.artifacts {
            fs::write(dir.join(name), content).map_err(|e| usage(format!("{name}: {e}")))?;
            outputs.insert(name.clone(), sha256_hex(content.as_bytes()));
        }
        let manifest = RunManifest {
            command: command_name(&cli.command).to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: out.seed,
            parameters,
            inputs: out.inputs.clone(),
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(dir.join("manifest.json"), &text).map_err(|e| usage(format!("manifest.json: {e}")))?;
        out.stdout.push_str(&format!("artifacts written to {}\n", dir.display()));
    }
    Ok(out)
}

fn dispatch(c: &Command) -> Result<Outcome, Failure> {
    let mut o = Outcome::default();
    match c {
        Command::Compile { sentence } => {
            let text = o.read(sentence)?;
            let f = parse_formula(&text).map_err(|e| usage(format!("{}:{e}", sentence.display())))?;
            let p = compile_semipositive(&f).map_err(|e| violation(e.to_string()))?;
            let json = program_to_json(&p);
            o.stdout = json.clone();
            o.artifact("program.json", json);
        }
        Command::Init { program, structure } => {
            let p = program_from_json(&o.read(program)?)?;
            let s = structure_from_json(&o.read(structure)?)?;
            let state = Executor::new(&p)?.init(&s)?;
            let json = structure_to_json(state.structure());
            o.stdout = json.clone();
            o.artifact("state.json", json);
        }
        Command::Run { program, structure, script } => run_script(&mut o, program, structure, script)?,
        Command::Difftest { program, sentence, params } => {
            let p = program_from_json(&o.read(program)?)?;
            let text = o.read(sentence)?;
            let f = parse_formula(&text).map_err(|e| usage(format!("{}:{e}", sentence.display())))?;
            let cfg = DifftestConfig::new(params.n, params.sequences, params.length, params.seed);
            let report = difftest(&p, &f, &cfg)?;
            o.seed = Some(params.seed);
            o.stdout = report.render();
            o.artifact("report.txt", o.stdout.clone());
            if !report.is_clean() {
                o.code = 1;
            }
        }
        Command::RamseyClique { n, k, l, colors, seed, sweep } => {
            if *k == 0 || k > n || *colors == 0 {
                return Err(usage("need 1 <= k <= n and at least one color"));
            }
            if *sweep {
                let r = exhaustive_sweep(*n, *k, *colors, *l);
                o.stdout = format!(
                    "colorings {}\nwith monochromatic {l}-clique {}\nfirst avoiding ordinal {}\n",
                    r.colorings,
                    r.with_clique,
                    r.first_avoiding.map_or("none".into(), |x| x.to_string())
                );
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let c = HyperedgeColoring::from_fn(*n, *k, |_| rng.gen_range(0..*colors));
                o.seed = Some(*seed);
                o.stdout = render_coloring(&c);
                o.stdout.push_str(&match find_monochromatic_clique(&c, *l) {
                    Some(cl) => format!("clique {}\n", render_nodes(&cl)),
                    None => "clique none\n".into(),
                });
            }
            o.artifact("report.txt", o.stdout.clone());
        }
        Command::RamseyAnticolor { n, k, l, seed, budget } => {
            if *k == 0 || k > n {
                return Err(usage("need 1 <= k <= n"));
            }
            o.seed = Some(*seed);
            o.stdout = match search_antiramsey_coloring(*n, *k, *l, *seed, *budget) {
                Some(c) => format!("{}verified: no monochromatic {l}-clique\n", render_coloring(&c)),
                None => "none found within budget\n".into(),
            };
            o.artifact("report.txt", o.stdout.clone());
        }
        Command::LbGen { k, a, b, variant, seed } => {
            let inst = lb_instance(*k, *a, b, *variant, *seed)?;
            o.seed = Some(*seed);
            let graph = structure_to_json(&inst.graph);
            o.stdout = graph.clone();
            o.artifact("instance.json", graph);
            o.artifact("instance-sidecar.json", lb_sidecar(&inst, *seed));
        }
        Command::LbDemo { variant, a, seed } => {
            let demo = run_lowerbound_demo(*variant, *a, *seed).map_err(|e| violation(e.to_string()))?;
            o.seed = Some(*seed);
            o.stdout = demo.render();
            o.stdout.push_str(&format!("separation {}\n", if demo.separates() { "shown" } else { "NOT shown" }));
            o.artifact("trace.txt", o.stdout.clone());
            o.artifact("instance.json", structure_to_json(&demo.instance.graph));
            o.artifact("instance-sidecar.json", lb_sidecar(&demo.instance, *seed));
            if !demo.separates() {
                o.code = 1;
            }
        }
        Command::Similar { structure, m, l } => {
            let s = structure_from_json(&o.read(structure)?)?;
            let order: Vec<_> = s.elements().collect();
            let found = find_similar_tuples(&s, &order, *m, *l).map_err(|e| usage(e.to_string()))?;
            o.stdout = match found {
                Some(c) => {
                    let all_similar = c
                        .iter()
                        .enumerate()
                        .all(|(i, x)| c[i + 1..].iter().all(|y| m_similar(&s, &s, &[*x], &[*y], *m).is_some()));
                    format!(
                        "subset {{{}}}\nelementwise {m}-similar: {all_similar}\n",
                        c.iter().map(|e| s.label(*e)).collect::<Vec<_>>().join(",")
                    )
                }
                None => "none\n".into(),
            };
            o.artifact("report.txt", o.stdout.clone());
        }
        Command::SublemmaSuite { trials, seed, mutation, functions, search_m, max_len } => {
            o.seed = Some(*seed);
            match functions {
                None => {
                    let mode = if *mutation { StepMode::IndexShifting } else { StepMode::Reference };
                    let r = substructure_lemma_suite(*trials, *seed, mode);
                    o.stdout = r.render();
                    let caught = !r.violations.is_empty();
                    if *mutation {
                        o.stdout.push_str(&format!("mutation control {}\n", if caught { "detected" } else { "NOT detected" }));
                    }
                    if caught != *mutation {
                        o.code = 1;
                    }
                }
                Some(m) if *search_m => {
                    let (best, reports) = smallest_passing_m(*trials, *seed, *m, *max_len);
                    for (i, r) in reports.iter().enumerate() {
                        o.stdout.push_str(&format!("m {i}: {} of {} trials hold\n", r.holds, r.trials));
                    }
                    o.stdout.push_str(&format!(
                        "smallest passing m: {}\n",
                        best.map_or("none".into(), |b| b.to_string())
                    ));
                }
                Some(m) => {
                    let r: SuiteReport = qf_lemma_suite(*trials, *seed, *m, *max_len);
                    o.stdout = r.render();
                    if !r.violations.is_empty() {
                        o.code = 1;
                    }
                }
            }
            o.artifact("report.txt", o.stdout.clone());
        }
        Command::Demo { name } => {
            let r = run_demo(*name)?;
            o.stdout = r.render();
            o.artifact("trace.txt", o.stdout.clone());
            if !r.passed() {
                o.code = 1;
            }
        }
    }
    Ok(o)
}

fn run_script(o: &mut Outcome, program: &Path, structure: &Path, script: &Path) -> Result<(), Failure> {
    let p = program_from_json(&o.read(program)?)?;
    let s = structure_from_json(&o.read(structure)?)?;
    let ex = Executor::new(&p)?;
    let state = if s.schema() == &p.input {
        ex.init(&s)?
    } else {
        ProgramState::from_structure(&p, s)?
    };
    let script_text = o.read(script)?;
    let ms = script_from_text(state.structure(), &script_text)
        .map_err(|e| usage(format!("{}:{e}", script.display())))?;
    let mut trace = format!("0 initial Q={}\n", render_query(&p, &state));
    let mut cur = state;
    for (i, m) in ms.iter().enumerate() {
        match ex.step(&cur, m) {
            Ok(next) => {
                trace.push_str(&trace_line(&p, i + 1, m, &cur, &next));
                trace.push('\n');
                cur = next;
            }
            Err(e) => {
                o.stdout = trace.clone();
                o.artifact("trace.txt", trace);
                return Err(violation(format!("modification {}: {e}", i + 1)));
            }
        }
    }
    o.stdout = trace.clone();
    o.artifact("trace.txt", trace);
    o.artifact("state.json", structure_to_json(cur.structure()));
    Ok(())
}

fn render_nodes(nodes: &[usize]) -> String {
    format!("{{{}}}", nodes.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","))
}

fn render_coloring(c: &HyperedgeColoring) -> String {
    c.edges().map(|(e, col)| format!("{} {col}\n", render_nodes(&e))).collect()
}

fn lb_instance(k: usize, a: usize, spec: &str, variant: Variant, seed: u64) -> Result<LowerBoundInstance, Failure> {
    use itertools::Itertools;
    let b: Vec<Vec<usize>> = match spec {
        "antiramsey" => {
            let c = search_antiramsey_coloring(a, k + 1, k + 2, seed, 200_000)
                .ok_or_else(|| violation(format!("no anti-Ramsey coloring of the {}-subsets found", k + 1)))?;
            c.edges().filter(|(_, col)| *col == 0).map(|(e, _)| e).collect()
        }
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..a).combinations(k + 1).filter(|_| rng.gen_bool(0.5)).collect()
        }
        list => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .split('-')
                    .map(|x| match x.parse::<usize>() {
                        Ok(i) if i >= 1 => Ok(i - 1),
                        _ => Err(usage(format!("bad element `{x}` in B"))),
                    })
                    .collect::<Result<Vec<usize>, Failure>>()
                    .map(|mut v| {
                        v.sort();
                        v
                    })
            })
            .collect::<Result<_, _>>()?,
    };
    build_lowerbound_instance(a, &b, k, variant).map_err(|e| usage(e.to_string()))
}

#[derive(Serialize)]
struct Sidecar {
    variant: String,
    k: usize,
    seed: u64,
    order: Vec<String>,
    b: Vec<Vec<String>>,
    b_prime: Vec<Vec<String>>,
}

fn lb_sidecar(inst: &LowerBoundInstance, seed: u64) -> String {
    let names = |ss: &[Vec<usize>]| -> Vec<Vec<String>> {
        ss.iter()
            .map(|s| s.iter().map(|i| inst.graph.label(inst.a[*i]).to_string()).collect())
            .collect()
    };
    let sidecar = Sidecar {
        variant: inst.variant.to_string(),
        k: inst.k,
        seed,
        order: inst.a.iter().map(|e| inst.graph.label(*e).to_string()).collect(),
        b: names(&inst.b),
        b_prime: names(&inst.b_prime),
    };
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    text.push('\n');
    text
}

/// Parses `argv` (program name first), runs, and returns the exit status
/// with stdout/stderr text.
pub fn main_with(argv: &[String]) -> (u8, String, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, if code == 0 { e.to_string() } else { String::new() }, if code == 2 { e.to_string() } else { String::new() });
        }
    };
    match execute(&cli, &argv[1..]) {
        Ok(o) => (o.code, o.stdout, String::new()),
        Err(f) => (f.code, String::new(), format!("error: {}\n", f.message)),
    }
}

/// Convenience for structures in tests and scripts.
pub fn structure_text(s: &Structure) -> String {
    structure_to_json(s)
}
