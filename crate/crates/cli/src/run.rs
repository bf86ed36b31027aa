//! The `run` subcommand: one generator/verifier session per case file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use clinarg::agents::{
    AgentBackend, AgentError, BackendConfig, BundlePaths, Case, Orchestrator, PromptSet, RecordingBackend, SessionOutcome,
};
use clinarg::dialogue::{SessionConfig, Status, TerminationReason, DEFAULT_DIALOGUE_LIMIT, DEFAULT_MAX_DECISIONS};
use clinarg::schemes::{builtin_schemes, SchemeRegistry};

use crate::{render, EXIT_INPUT, EXIT_OK, EXIT_REASONING};

const EXIT_SESSION: u8 = 3;

#[derive(clap::Args)]
pub struct RunArgs {
    /// Case files: `.json` with case_id and text, or plain text.
    #[arg(required = true)]
    cases: Vec<PathBuf>,
    /// TOML file with [generator] and [verifier] backend tables.
    #[arg(long)]
    backend: PathBuf,
    /// Each case gets `<out-dir>/<case_id>/` with transcript, framework and report files.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Maximum number of moves per session (both speakers count).
    #[arg(long, default_value_t = DEFAULT_DIALOGUE_LIMIT)]
    limit: usize,
    /// Maximum number of decision proposals per session.
    #[arg(long, default_value_t = DEFAULT_MAX_DECISIONS)]
    max_decisions: usize,
    /// Scheme pack replacing the built-in one.
    #[arg(long)]
    schemes: Option<PathBuf>,
    /// Prompt file replacing the built-in prompts.
    #[arg(long)]
    prompts: Option<PathBuf>,
    /// Also save every backend exchange, for later use as a recorded backend.
    #[arg(long)]
    record: bool,
    /// Number of sessions to run at once.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BackendFile {
    generator: BackendConfig,
    verifier: BackendConfig,
}

struct Setup {
    generator: BackendConfig,
    verifier: BackendConfig,
    base: PathBuf,
    registry: SchemeRegistry,
    prompts: PromptSet,
    config: SessionConfig,
    out_dir: PathBuf,
    record: bool,
}

/// Printed summary and exit code of one session.
struct Finished {
    summary: String,
    code: u8,
}

fn load_backends(path: &Path) -> Result<BackendFile> {
    let source = std::fs::read_to_string(path).with_context(|| format!("cannot read backend config {}", path.display()))?;
    let file: BackendFile =
        toml::from_str(&source).with_context(|| format!("invalid backend config {}", path.display()))?;
    file.generator.validate().context("[generator]")?;
    file.verifier.validate().context("[verifier]")?;
    Ok(file)
}

fn session_code(outcome: &SessionOutcome) -> u8 {
    match outcome.transcript.status {
        Status::Terminated(TerminationReason::Parse | TerminationReason::Protocol | TerminationReason::Backend) => {
            EXIT_SESSION
        }
        _ if outcome.report.error_flag => EXIT_REASONING,
        _ => EXIT_OK,
    }
}

fn save_exchanges(path: &Path, recorder: &RecordingBackend<Box<dyn AgentBackend>>) -> Result<()> {
    recorder
        .save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

fn run_one(setup: &Setup, case: &Case) -> Result<Finished> {
    let generator = RecordingBackend::new(setup.generator.build(&setup.base).context("[generator]")?);
    let verifier = RecordingBackend::new(setup.verifier.build(&setup.base).context("[verifier]")?);
    let orchestrator = Orchestrator {
        generator: &generator,
        verifier: &verifier,
        registry: &setup.registry,
        prompts: &setup.prompts,
        config: setup.config,
    };
    let result = orchestrator.run_case(case);
    if setup.record {
        let dir = BundlePaths::new(&setup.out_dir, &case.case_id).dir;
        std::fs::create_dir_all(&dir)?;
        save_exchanges(&dir.join("generator.exchanges.json"), &generator)?;
        save_exchanges(&dir.join("verifier.exchanges.json"), &verifier)?;
    }
    let mut summary = format!("== {} ==\n", case.case_id);
    let (outcome, code) = match result {
        Ok(outcome) => {
            let code = session_code(&outcome);
            (outcome, code)
        }
        Err(AgentError::BackendFailure {
            role,
            source,
            partial: Some(partial),
        }) => {
            summary.push_str(&format!("{role} backend failed: {source}\n"));
            (*partial, EXIT_SESSION)
        }
        Err(e) => return Err(e).with_context(|| format!("case {}", case.case_id)),
    };
    let paths = outcome.write_bundle(&setup.out_dir)?;
    summary.push_str(&format!(
        "{} move(s), {}\n",
        outcome.transcript.len(),
        render::status(&outcome.transcript)
    ));
    summary.push_str(&render::report(&outcome.framework, &outcome.report));
    summary.push_str(&format!(
        "wrote {}, {}, {}\n",
        paths.transcript.display(),
        paths.framework.display(),
        paths.report.display()
    ));
    Ok(Finished { summary, code })
}

pub fn run(args: &RunArgs) -> Result<u8> {
    let backends = load_backends(&args.backend)?;
    let config = SessionConfig {
        dialogue_limit: args.limit,
        max_decisions: args.max_decisions,
    };
    config.validate()?;
    if args.parallel == 0 {
        bail!("--parallel must be at least 1");
    }
    let cases = args
        .cases
        .iter()
        .map(|p| Case::load(p).with_context(|| format!("cannot read case {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = BTreeSet::new();
    for case in &cases {
        if !seen.insert(case.case_id.as_str()) {
            bail!("case id `{}` appears twice; bundles would collide", case.case_id);
        }
    }
    let setup = Setup {
        generator: backends.generator,
        verifier: backends.verifier,
        base: args
            .backend
            .parent()
            .map(Path::to_owned)
            .unwrap_or_default(),
        registry: match &args.schemes {
            Some(p) => SchemeRegistry::load(p)?,
            None => builtin_schemes(),
        },
        prompts: match &args.prompts {
            Some(p) => PromptSet::load(p)?,
            None => PromptSet::default(),
        },
        config,
        out_dir: args.out_dir.clone(),
        record: args.record,
    };

    // sessions share nothing, so workers just pull the next case index
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Finished>>>> = Mutex::new((0..cases.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..args.parallel.min(cases.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(case) = cases.get(i) else { break };
                let finished = run_one(&setup, case);
                results.lock().unwrap()[i] = Some(finished);
            });
        }
    });

    let mut code = EXIT_OK;
    let mut failed = false;
    for result in results.into_inner().unwrap().into_iter().flatten() {
        match result {
            Ok(f) => {
                print!("{}", f.summary);
                code = code.max(f.code);
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                failed = true;
            }
        }
    }
    Ok(if failed { EXIT_INPUT } else { code })
}
