use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use clinarg::aaf::format::{self, FrameworkFormat};
use clinarg::aaf::ArgumentationFramework;
use clinarg::decision::{self, DecisionReport, DecisionSemantics};
use clinarg::dialogue::{self, DialogueTranscript};
use clinarg::export::{self, DotStyle};
use clinarg::schemes::{builtin_schemes, SchemeRegistry};
use clinarg::semantics;

mod render;
mod run;

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_REASONING: u8 = 2;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  input, usage or configuration error
  2  reasoning error: no decision is acceptable (error flag raised)
  3  run only: a session ended early (backend failure, unparseable or illegal replies)";

const RUN_HELP: &str = "\
The backend file is TOML with a [generator] and a [verifier] table:

  [generator]
  kind = \"remote\"              # remote | scripted | recorded
  endpoint = \"https://api.example.com/v1/chat/completions\"
  model_name = \"some-model\"
  credential_env = \"OPENAI_API_KEY\"   # name of the variable holding the key
  temperature = 0.0            # default
  timeout_secs = 60
  max_retries = 3
  backoff_ms = 500

  [verifier]
  kind = \"scripted\"
  script = \"verifier.json\"     # JSON array of completions

Credentials are never read from the file: each remote table names the
environment variable to read (credential_env), e.g. OPENAI_API_KEY.
Relative paths resolve against the backend file's directory.";

#[derive(Parser)]
#[command(version, about = "Argumentation-based clinical decision reasoning", after_help = EXIT_CODES)]
struct Cli {
    /// Log verbosity (repeat for more). CLINARG_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Text,
    Json,
}

impl From<InputFormat> for FrameworkFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Text => FrameworkFormat::Text,
            InputFormat::Json => FrameworkFormat::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Semantics {
    Preferred,
    Grounded,
}

#[derive(clap::Args)]
struct ReportOutput {
    /// Report format.
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a framework file and report the acceptable decisions.
    #[command(after_help = EXIT_CODES)]
    Solve {
        file: PathBuf,
        /// Framework file format; guessed from the extension by default.
        #[arg(long, value_enum)]
        input_format: Option<InputFormat>,
        #[arg(long, value_enum, default_value = "preferred")]
        semantics: Semantics,
        /// Cross-check the preferred extensions against exhaustive search.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        out: ReportOutput,
    },
    /// Check a framework for well-formedness.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum)]
        input_format: Option<InputFormat>,
    },
    /// Render a framework, transcript or session bundle as a DOT graph.
    Export {
        /// Framework file, `transcript.json`, a case directory or an output directory.
        input: PathBuf,
        #[arg(long, value_enum)]
        input_format: Option<InputFormat>,
        /// Case to pick from a bundle directory holding several.
        #[arg(long)]
        case: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DotStyle::default().decision_color)]
        decision_color: String,
        #[arg(long, default_value_t = DotStyle::default().belief_color)]
        belief_color: String,
        #[arg(long, default_value_t = DotStyle::default().decision_shape)]
        decision_shape: String,
        #[arg(long, default_value_t = DotStyle::default().belief_shape)]
        belief_shape: String,
    },
    /// Run generator/verifier sessions on case files.
    #[command(after_help = format!("{RUN_HELP}\n\n{EXIT_CODES}"))]
    Run(run::RunArgs),
    /// Re-check a saved transcript and solve the framework it compiles to.
    #[command(after_help = EXIT_CODES)]
    Replay {
        transcript: PathBuf,
        #[command(flatten)]
        out: ReportOutput,
    },
    /// List the argumentation schemes and their critical questions.
    Schemes {
        /// Scheme pack to load instead of the built-in one.
        #[arg(long)]
        schemes: Option<PathBuf>,
        /// Print the pack as JSON.
        #[arg(long)]
        dump: bool,
    },
}

fn init_logging(verbose: u8) {
    let default = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let filter = tracing_subscriber::EnvFilter::try_from_env("CLINARG_LOG")
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .init();
}

fn load_framework(path: &Path, format: Option<InputFormat>) -> Result<ArgumentationFramework> {
    let loaded = format::read_path(path, format.map(Into::into))
        .with_context(|| format!("cannot read framework {}", path.display()))?;
    for w in &loaded.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(loaded.framework)
}

/// Refuses a framework with violations, printing them.
fn require_valid(path: &Path, fw: &ArgumentationFramework) -> Result<()> {
    let report = fw.validate();
    for w in &report.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("error: {}: {v}", path.display());
        }
        bail!("{} is not a well-formed framework", path.display());
    }
    Ok(())
}

pub(crate) fn write_out(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(fw: &ArgumentationFramework, report: &DecisionReport, out: &ReportOutput) -> Result<u8> {
    let text = match out.format {
        OutputFormat::Text => render::report(fw, report),
        OutputFormat::Json => serde_json::to_string_pretty(report)? + "\n",
    };
    write_out(out.output.as_deref(), &text)?;
    Ok(if report.error_flag { EXIT_REASONING } else { EXIT_OK })
}

fn solve(
    file: &Path,
    input_format: Option<InputFormat>,
    semantics_mode: Semantics,
    oracle: bool,
    out: &ReportOutput,
) -> Result<u8> {
    let fw = load_framework(file, input_format)?;
    require_valid(file, &fw)?;
    if oracle {
        let expected = semantics::brute_force_preferred(&fw).context("oracle check")?;
        let found = semantics::preferred_extensions(&fw);
        if expected != found {
            bail!(
                "preferred extensions disagree with exhaustive search: {} vs {}",
                render::extensions(&found),
                render::extensions(&expected)
            );
        }
        eprintln!("oracle: {} preferred extension(s) confirmed", found.len());
    }
    let mode = match semantics_mode {
        Semantics::Preferred => DecisionSemantics::Preferred,
        Semantics::Grounded => DecisionSemantics::Grounded,
    };
    let report = decision::exclusivity_filter(&fw, decision::report_under(&fw, mode)?)?;
    emit_report(&fw, &report, out)
}

fn validate(file: &Path, input_format: Option<InputFormat>) -> Result<u8> {
    let fw = load_framework(file, input_format)?;
    let report = fw.validate();
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for v in &report.violations {
        println!("violation: {v}");
    }
    if report.is_valid() {
        println!(
            "ok: {} arguments, {} attacks",
            fw.len(),
            fw.attack_count()
        );
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_INPUT)
    }
}

fn read_transcript(path: &Path) -> Result<DialogueTranscript> {
    let source = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&source).with_context(|| format!("{} is not a transcript", path.display()))
}

fn is_transcript(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n == "transcript.json" || n.ends_with(".transcript.json"))
}

/// Finds the transcript in a case directory or in an output directory
/// holding one directory per case.
fn bundle_transcript(dir: &Path, case: Option<&str>) -> Result<PathBuf> {
    if let Some(case) = case {
        return Ok(dir.join(case).join("transcript.json"));
    }
    let own = dir.join("transcript.json");
    if own.is_file() {
        return Ok(own);
    }
    let mut found: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path().join("transcript.json")))
        .filter(|p| p.is_file())
        .collect();
    found.sort();
    match found.len() {
        1 => Ok(found.remove(0)),
        0 => bail!("no transcript.json in {} or its case directories", dir.display()),
        _ => bail!("{} holds several cases; pick one with --case", dir.display()),
    }
}

fn export(
    input: &Path,
    input_format: Option<InputFormat>,
    case: Option<&str>,
    output: Option<&Path>,
    style: DotStyle,
) -> Result<u8> {
    let transcript_path = if input.is_dir() {
        Some(bundle_transcript(input, case)?)
    } else if is_transcript(input) {
        Some(input.to_owned())
    } else {
        None
    };
    let dot = match transcript_path {
        Some(path) => {
            let transcript = dialogue::replay_transcript(&read_transcript(&path)?)
                .with_context(|| format!("{} does not replay", path.display()))?;
            let fw = transcript.to_framework()?;
            export::to_dot(&fw, &style, Some(&transcript.proposal_indices()))
        }
        None => {
            let fw = load_framework(input, input_format)?;
            export::to_dot(&fw, &style, None)
        }
    };
    write_out(output, &dot)?;
    Ok(EXIT_OK)
}

fn replay(path: &Path, out: &ReportOutput) -> Result<u8> {
    let recorded = read_transcript(path)?;
    let transcript = dialogue::replay_transcript(&recorded)
        .with_context(|| format!("{} does not replay", path.display()))?;
    let fw = transcript.to_framework()?;
    let report = decision::exclusivity_filter(&fw, decision::detect_reasoning_error(&fw)?)?;
    eprintln!("replayed {} move(s), status {}", transcript.len(), render::status(&transcript));
    emit_report(&fw, &report, out)
}

fn schemes(path: Option<&Path>, dump: bool) -> Result<u8> {
    let registry = match path {
        Some(p) => SchemeRegistry::load(p)?,
        None => builtin_schemes(),
    };
    if dump {
        println!("{}", serde_json::to_string_pretty(&registry.to_pack())?);
    } else {
        print!("{}", render::schemes(&registry));
    }
    Ok(EXIT_OK)
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Solve {
            file,
            input_format,
            semantics,
            oracle,
            out,
        } => solve(&file, input_format, semantics, oracle, &out),
        Command::Validate { file, input_format } => validate(&file, input_format),
        Command::Export {
            input,
            input_format,
            case,
            output,
            decision_color,
            belief_color,
            decision_shape,
            belief_shape,
        } => export(
            &input,
            input_format,
            case.as_deref(),
            output.as_deref(),
            DotStyle {
                decision_color,
                belief_color,
                decision_shape,
                belief_shape,
            },
        ),
        Command::Run(args) => run::run(&args),
        Command::Replay { transcript, out } => replay(&transcript, &out),
        Command::Schemes { schemes: path, dump } => schemes(path.as_deref(), dump),
    }
}

fn main() -> ExitCode {
    // clap's own usage failures exit with 2, which is taken
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    init_logging(cli.verbose);
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
