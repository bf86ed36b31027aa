use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_str().unwrap().to_owned()
}

fn clinarg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clinarg"))
        .args(args)
        .env_remove("CLINARG_LOG")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn solve_migraine_example_text_report() {
    let out = clinarg(&["solve", &fixture("migraine.apx")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("optional decisions: B, C"), "{text}");
    assert!(text.contains("B: {B,D,E}"));
    assert!(text.contains("C: {C,D,E}"));
    assert!(text.contains("error flag: false"));
}

#[test]
fn solve_with_oracle_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = clinarg(&[
        "solve",
        &fixture("migraine.json"),
        "--oracle",
        "--format",
        "json",
        "-o",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("oracle: 2 preferred"));
    let value: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(value["optional_decisions"], serde_json::json!(["B", "C"]));
    assert_eq!(value["exclusive_alternatives"], true);
}

#[test]
fn no_acceptable_decision_exits_two() {
    let out = clinarg(&["solve", &fixture("no_acceptable_decision.apx")]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("error flag: true"));
    assert!(text.contains("T1 defeated by X1"), "{text}");
}

#[test]
fn grounded_semantics_is_sceptical() {
    let out = clinarg(&["solve", &fixture("migraine.apx"), "--semantics", "grounded"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_file_reports_line() {
    let out = clinarg(&["solve", &fixture("malformed.apx")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn missing_file_and_bad_usage_exit_one() {
    assert_eq!(clinarg(&["solve", "/nonexistent/af.apx"]).status.code(), Some(1));
    assert_eq!(clinarg(&["solve"]).status.code(), Some(1));
    assert_eq!(clinarg(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(clinarg(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_refuses_ill_formed_framework() {
    let out = clinarg(&["solve", &fixture("forbidden_attack.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("forbidden attack"));
}

#[test]
fn validate_exit_codes() {
    assert_eq!(clinarg(&["validate", &fixture("migraine.apx")]).status.code(), Some(0));
    let out = clinarg(&["validate", &fixture("one_way_decisions.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("missing mutual attack"));
    assert_eq!(clinarg(&["validate", &fixture("forbidden_attack.json")]).status.code(), Some(1));
    let out = clinarg(&["validate", &fixture("self_attack.apx")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("self-attack"));
}

#[test]
fn input_format_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("af.txt");
    std::fs::copy(fixtures().join("migraine.json"), &path).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(clinarg(&["solve", p]).status.code(), Some(1));
    assert_eq!(clinarg(&["solve", p, "--input-format", "json"]).status.code(), Some(0));
}

#[test]
fn export_is_deterministic_and_styled() {
    let a = clinarg(&["export", &fixture("migraine.apx")]);
    let b = clinarg(&["export", &fixture("migraine.json")]);
    assert_eq!(a.status.code(), Some(0));
    let dot = stdout(&a);
    assert!(dot.starts_with("digraph af {"));
    assert_eq!(dot.matches("class=decision").count(), 3);
    assert_eq!(dot.matches("class=belief").count(), 2);
    assert!(dot.contains("\"D\" -> \"A\";"));
    // same graph; only tooltips differ
    assert_eq!(dot.matches("->").count(), stdout(&b).matches("->").count());

    let custom = clinarg(&[
        "export",
        &fixture("migraine.apx"),
        "--decision-color",
        "red",
        "--belief-shape",
        "note",
    ]);
    let dot = stdout(&custom);
    assert!(dot.contains("fillcolor=\"red\""));
    assert!(dot.contains("shape=\"note\""));
}

fn session(name: &str) -> String {
    fixture(&format!("session/{name}"))
}

fn run_scripted(out_dir: &Path, extra: &[&str]) -> Output {
    let case = session("insomnia-depression.json");
    let backend = session("scripted.toml");
    let mut args = vec!["run", &case, "--backend", &backend, "--out-dir", out_dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    clinarg(&args)
}

#[test]
fn run_writes_bundle_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scripted(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("== insomnia-depression =="));
    assert!(text.contains("6 move(s), terminated (accepted)"));
    assert!(text.contains("C: Trazodone should be adopted."));
    for suffix in ["transcript", "framework", "report"] {
        assert!(dir.path().join("insomnia-depression").join(format!("{suffix}.json")).exists());
    }
    let replayed = clinarg(&[
        "replay",
        dir.path().join("insomnia-depression/transcript.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(replayed.status.code(), Some(0));
    let from_replay: Value = serde_json::from_slice(&replayed.stdout).unwrap();
    let saved: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("insomnia-depression/report.json")).unwrap())
            .unwrap();
    assert_eq!(from_replay, saved);
}

#[test]
fn short_limit_gives_reasoning_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scripted(dir.path(), &["--limit", "4"]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("terminated (limit)"));
}

#[test]
fn run_requires_backend_config() {
    let out = clinarg(&["run", &session("insomnia-depression.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--backend"));
}

#[test]
fn recorded_exchanges_replay_as_a_backend() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    assert_eq!(run_scripted(&first, &["--record"]).status.code(), Some(0));
    let config = dir.path().join("recorded.toml");
    std::fs::write(
        &config,
        "[generator]\nkind = \"recorded\"\nrecording = \"first/insomnia-depression/generator.exchanges.json\"\n\n\
         [verifier]\nkind = \"recorded\"\nrecording = \"first/insomnia-depression/verifier.exchanges.json\"\n",
    )
    .unwrap();
    let second = dir.path().join("second");
    let out = clinarg(&[
        "run",
        &session("insomnia-depression.json"),
        "--backend",
        config.to_str().unwrap(),
        "--out-dir",
        second.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for suffix in ["transcript", "framework", "report"] {
        let name = format!("insomnia-depression/{suffix}.json");
        assert_eq!(
            std::fs::read(first.join(&name)).unwrap(),
            std::fs::read(second.join(&name)).unwrap()
        );
    }
}

#[test]
fn missing_credential_keeps_partial_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("remote.toml");
    std::fs::write(
        &config,
        "[generator]\nkind = \"remote\"\nendpoint = \"http://127.0.0.1:9/v1/chat/completions\"\n\
         model_name = \"m\"\ncredential_env = \"CLINARG_TEST_NEVER_SET\"\n\n\
         [verifier]\nkind = \"scripted\"\nscript = \"none.json\"\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("none.json"), "[]").unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_clinarg"))
        .args([
            "run",
            &session("insomnia-depression.json"),
            "--backend",
            config.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
        ])
        .env_remove("CLINARG_TEST_NEVER_SET")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stdout(&out).contains("CLINARG_TEST_NEVER_SET"));
    let transcript: Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("insomnia-depression/transcript.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(transcript["status"]["reason"], "backend");
}

#[test]
fn bad_backend_config_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[generator]\nkind = \"remote\"\n[verifier]\nkind = \"scripted\"\n").unwrap();
    let out = clinarg(&["run", &session("insomnia-depression.json"), "--backend", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("endpoint"), "{}", stderr(&out));
}

#[test]
fn parallel_batch_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut cases = Vec::new();
    for id in ["case-b", "case-a", "case-c"] {
        let path = dir.path().join(format!("{id}.txt"));
        std::fs::write(&path, "Depressed patient with insomnia.").unwrap();
        cases.push(path.to_str().unwrap().to_owned());
    }
    let out_dir = dir.path().join("out");
    let mut args: Vec<&str> = vec!["run"];
    args.extend(cases.iter().map(String::as_str));
    let backend = session("scripted.toml");
    args.extend(["--backend", &backend, "--out-dir", out_dir.to_str().unwrap(), "--parallel", "3"]);
    let out = clinarg(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let order: Vec<usize> = ["== case-b", "== case-a", "== case-c"]
        .iter()
        .map(|h| text.find(h).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
    let reports: Vec<String> = ["case-a", "case-b", "case-c"]
        .iter()
        .map(|id| std::fs::read_to_string(out_dir.join(id).join("report.json")).unwrap())
        .collect();
    assert!(reports.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn replay_rejects_tampered_transcript() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_scripted(dir.path(), &[]).status.code(), Some(0));
    let path = dir.path().join("insomnia-depression/transcript.json");
    let mut transcript: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // drop the rejection, so B attacks A without one
    transcript["moves"].as_array_mut().unwrap().remove(1);
    std::fs::write(&path, serde_json::to_string(&transcript).unwrap()).unwrap();
    let out = clinarg(&["replay", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("index 2"), "{}", stderr(&out));
}

#[test]
fn export_bundle_annotates_moves() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_scripted(dir.path(), &[]).status.code(), Some(0));
    let out = clinarg(&["export", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dot = stdout(&out);
    assert!(dot.contains("label=\"A (move 1)\""));
    assert!(dot.contains("label=\"B (move 3)\""));
    assert!(dot.contains("\"B\" -> \"A\";"));
    let transcript = dir.path().join("insomnia-depression/transcript.json");
    assert_eq!(stdout(&clinarg(&["export", transcript.to_str().unwrap()])), dot);
    let case_dir = dir.path().join("insomnia-depression");
    assert_eq!(stdout(&clinarg(&["export", case_dir.to_str().unwrap()])), dot);
    let picked = clinarg(&["export", dir.path().to_str().unwrap(), "--case", "insomnia-depression"]);
    assert_eq!(stdout(&picked), dot);
}

#[test]
fn schemes_listing_and_dump() {
    let out = clinarg(&["schemes"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for id in ["ASDM", "ASSE", "ASDA", "cq ASDM.side_effects -> ASSE"] {
        assert!(text.contains(id), "{id}");
    }
    let dump = clinarg(&["schemes", "--dump"]);
    let pack: Value = serde_json::from_slice(&dump.stdout).unwrap();
    assert_eq!(pack["schemes"].as_array().unwrap().len(), 3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pack.json");
    std::fs::write(&path, &dump.stdout).unwrap();
    let again = clinarg(&["schemes", "--schemes", path.to_str().unwrap(), "--dump"]);
    assert_eq!(again.stdout, dump.stdout);
}

#[test]
fn help_documents_exit_codes_and_credentials() {
    let text = stdout(&clinarg(&["run", "--help"]));
    assert!(text.contains("credential_env"));
    assert!(text.contains("OPENAI_API_KEY"));
    assert!(text.contains("2  reasoning error"));
    assert!(stdout(&clinarg(&["solve", "--help"])).contains("Exit codes"));
}

#[test]
fn session_fixtures_match_shared_scripts() {
    let read = |name: &str| -> Vec<String> {
        serde_json::from_str(&std::fs::read_to_string(session(name)).unwrap()).unwrap()
    };
    assert_eq!(read("generator.json"), clinarg::testing::depression_generator_script());
    assert_eq!(read("verifier.json"), clinarg::testing::depression_verifier_script());
    let case: clinarg::agents::Case =
        serde_json::from_str(&std::fs::read_to_string(session("insomnia-depression.json")).unwrap()).unwrap();
    assert_eq!(case, clinarg::testing::depression_case());
}
