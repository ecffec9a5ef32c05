use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dynprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynprop")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TRIANGLE: &str = "exists x y z. x != y & y != z & x != z & E{x,y} & E{y,z} & E{x,z}";

fn compiled_triangle(dir: &Path) -> (String, String) {
    let sentence = write(dir, "triangle.fo", TRIANGLE);
    let o = dynprop(&["compile", &sentence]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    (write(dir, "program.json", &stdout(&o)), sentence)
}

fn empty_graph(dir: &Path, n: usize) -> String {
    let labels: Vec<String> = (1..=n).map(|i| format!("\"a{i}\"")).collect();
    write(
        dir,
        "graph.json",
        &format!(
            "{{\"schema\": {{\"relations\": [\"E/2\"]}}, \"domain\": [{}], \"relations\": {{\"E\": []}}}}",
            labels.join(", ")
        ),
    )
}

#[test]
fn compiled_program_runs_a_script() {
    let dir = tempfile::tempdir().unwrap();
    let (program, _) = compiled_triangle(dir.path());
    let graph = empty_graph(dir.path(), 4);
    let script = write(dir.path(), "s.txt", "# a triangle\nins E a1 a2\nins E a2 a3\nins E a3 a1\n");
    let o = dynprop(&["run", &program, &graph, &script]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(|l| l.split(" [").next().unwrap().to_string()).collect();
    assert_eq!(
        lines,
        [
            "0 initial Q=false",
            "1 ins E a1 a2 Q=false",
            "2 ins E a2 a3 Q=false",
            "3 ins E a3 a1 Q=true"
        ]
    );
}

#[test]
fn deletions_are_refused_by_insertion_only_programs() {
    let dir = tempfile::tempdir().unwrap();
    let (program, _) = compiled_triangle(dir.path());
    let graph = empty_graph(dir.path(), 3);
    let script = write(dir.path(), "s.txt", "ins E a1 a2\ndel E a1 a2\n");
    let o = dynprop(&["run", &program, &graph, &script]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("modification 2"), "{}", stderr(&o));
}

#[test]
fn script_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let (program, _) = compiled_triangle(dir.path());
    let graph = empty_graph(dir.path(), 3);
    let script = write(dir.path(), "s.txt", "ins E a1 a2\nins E a1 a9\n");
    let o = dynprop(&["run", &program, &graph, &script]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s.txt:2:10:"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(dynprop(&["ramsey-clique", "--n", "x"]).status.code(), Some(2));
    assert_eq!(dynprop(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(dynprop(&["demo", "no-such-demo"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.fo", "exists x. E(x,");
    assert_eq!(dynprop(&["compile", &bad]).status.code(), Some(2));
}

#[test]
fn unsupported_sentences_are_contract_violations() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "neg.fo", "exists x y. !E(x,y)");
    let o = dynprop(&["compile", &f]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn difftest_reports_mismatches_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let (program, sentence) = compiled_triangle(dir.path());
    let o = dynprop(&["difftest", &program, &sentence, "--n", "4", "--sequences", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("mismatches 0"));
    let other = write(dir.path(), "edge.fo", "exists x y. E(x,y)");
    let o = dynprop(&["difftest", &program, &other, "--n", "4", "--sequences", "30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("mismatch sequence"));
}

#[test]
fn searches_without_result_still_succeed() {
    let o = dynprop(&["ramsey-anticolor", "--n", "6", "--k", "2", "--l", "3", "--budget", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "none found within budget\n");
    let o = dynprop(&["ramsey-clique", "--n", "6", "--k", "2", "--l", "3", "--sweep"]);
    assert!(stdout(&o).contains("first avoiding ordinal none"));
}

#[test]
fn seeded_clique_search_names_a_verified_clique() {
    let o = dynprop(&["ramsey-clique", "--n", "6", "--k", "2", "--l", "3", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("clique {")), "{}", stdout(&o));
}

#[test]
fn mutation_control_succeeds_when_detected() {
    let o = dynprop(&["sublemma-suite", "--trials", "60", "--mutation"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("mutation control detected"));
    let o = dynprop(&["sublemma-suite", "--trials", "30", "--functions", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn demos_pass() {
    for name in ["three-clique", "extension", "max-outdegree", "padding"] {
        let o = dynprop(&["demo", name]);
        assert_eq!(o.status.code(), Some(0), "{name}\n{}", stdout(&o));
        assert!(!stdout(&o).contains("FAILED"));
    }
}

#[test]
fn lower_bound_instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lb");
    let o = dynprop(&["lb-gen", "--a", "4", "--b", "1-2,2-3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sidecar: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("instance-sidecar.json")).unwrap()).unwrap();
    assert_eq!(sidecar["b"], serde_json::json!([["a1", "a2"], ["a2", "a3"]]));
    let graph = out.join("instance.json");
    let o = dynprop(&["similar", graph.to_str().unwrap(), "--m", "0", "--l", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(dynprop(&["lb-gen", "--a", "4", "--b", "1-0"]).status.code(), Some(2));
}

#[test]
fn manifest_records_inputs_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (program, _) = compiled_triangle(dir.path());
    let graph = empty_graph(dir.path(), 3);
    let out = dir.path().join("init");
    let o = dynprop(&["init", &program, &graph, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "init");
    assert_eq!(m["parameters"], serde_json::json!(["init", program, graph]));
    assert_eq!(m["inputs"].as_object().unwrap().len(), 2);
    let state = fs::read(out.join("state.json")).unwrap();
    assert_eq!(m["outputs"]["state.json"], dynprop_cli::sha256_hex(&state));
}
