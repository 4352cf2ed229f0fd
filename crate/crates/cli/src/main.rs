use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cosemo_core::diagnostic::has_errors;
use cosemo_core::{
    classify_all, emit_json, emit_text, explain, explore, parse_json, parse_text, run_script, to_dot, to_mermaid,
    validate, Bounds, ClassifyError, Diagnostic, Model, Outcome, Query, RenderError, RenderOptions, ScriptStep,
    SimError, Token,
};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(name = "cosemo", version, about = "Check, classify, simulate and draw collaborative service models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model and print its diagnostics.
    Validate {
        file: PathBuf,
        /// Print diagnostics as JSON lines.
        #[arg(long)]
        json: bool,
    },
    /// Print the collaboration level of every pair of roles.
    Classify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a script of process firings and print one JSON event per step.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        script: PathBuf,
        /// Exit with status 1 if any step does not fire.
        #[arg(long)]
        strict: bool,
    },
    /// Enumerate reachable states and answer reachability queries.
    Explore {
        file: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_steps: usize,
        #[arg(long, default_value_t = 2)]
        max_objects: usize,
    },
    /// Draw the model as a DOT or Mermaid diagram.
    Render {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// List each role's grants in its lane (DOT only).
        #[arg(long)]
        show_privileges: bool,
    },
    /// Print the model in canonical form.
    Fmt {
        file: PathBuf,
        /// Emit the JSON interchange form instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Describe the rule behind a diagnostic code.
    Explain { code: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Mermaid,
}

/// Exit status plus a message for standard error.
struct Failure {
    code: u8,
    message: Option<String>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: Some(message.into()),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: Some(message.into()),
        }
    }

    fn quiet(code: u8) -> Self {
        Self { code, message: None }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn report(diagnostics: &[Diagnostic], json: bool) {
    for d in diagnostics {
        if json {
            eprintln!("{}", d.to_json_line());
        } else {
            eprintln!("{d}");
        }
    }
}

/// Parses a `.json` or `.csm` file. Parse errors are reported and fail.
fn load(path: &Path) -> Result<Model, Failure> {
    let bytes = read(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let parsed = if is_json {
        parse_json(&bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| Failure::usage(format!("{} is not UTF-8", path.display())))?;
        parse_text(&text, &path.display().to_string())
    };
    report(&parsed.diagnostics, false);
    parsed.model.ok_or_else(|| Failure::quiet(1))
}

/// Loads a model that must also pass validation.
fn load_valid(path: &Path) -> Result<Model, Failure> {
    let model = load(path)?;
    let diagnostics = validate(&model);
    if has_errors(&diagnostics) {
        report(&diagnostics, false);
        return Err(Failure::quiet(1));
    }
    Ok(model)
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    serde_json::from_slice(&read(path)?)
        .map_err(|e| Failure::usage(format!("{} is not a valid {what} file: {e}", path.display())))
}

fn write_output(text: &str, output: Option<&Path>) -> CliResult {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Validate { file, json } => {
            let model = load(&file)?;
            let diagnostics = validate(&model);
            report(&diagnostics, json);
            if has_errors(&diagnostics) {
                return Err(Failure::quiet(1));
            }
            Ok(())
        }
        Command::Classify { file, json } => {
            let model = load(&file)?;
            let collaboration = classify_all(&model).map_err(|e| match e {
                ClassifyError::InvalidModel(diagnostics) => {
                    report(&diagnostics, false);
                    Failure::quiet(1)
                }
                other => Failure::invalid(other.to_string()),
            })?;
            if json {
                println!("{}", collaboration.to_json());
            } else {
                print!("{}", collaboration.to_table());
            }
            Ok(())
        }
        Command::Simulate {
            file,
            seed,
            script,
            strict,
        } => {
            let model = load_valid(&file)?;
            let seed: Vec<Token> = read_json(&seed, "seed")?;
            let script: Vec<ScriptStep> = read_json(&script, "script")?;
            let events = run_script(&model, &seed, &script).map_err(|e| Failure::invalid(e.to_string()))?;
            for event in &events {
                println!("{}", event.to_json_line());
            }
            if strict && events.iter().any(|e| e.outcome != Outcome::Fired) {
                return Err(Failure::quiet(1));
            }
            Ok(())
        }
        Command::Explore {
            file,
            seed,
            query,
            max_steps,
            max_objects,
        } => {
            let model = load_valid(&file)?;
            let seed: Vec<Token> = read_json(&seed, "seed")?;
            let queries: Vec<Query> = read_json(&query, "query")?;
            let bounds = Bounds { max_steps, max_objects };
            let summary = explore(&model, &seed, bounds)
                .and_then(|graph| graph.summary(&queries))
                .map_err(|e| match e {
                    SimError::InvalidBounds(_) => Failure::usage(e.to_string()),
                    _ => Failure::invalid(e.to_string()),
                })?;
            if summary.bound_exceeded {
                eprintln!("warning: state space not exhausted within {max_steps} steps");
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summaries always serialize")
            );
            Ok(())
        }
        Command::Render {
            file,
            format,
            output,
            show_privileges,
        } => {
            let model = load(&file)?;
            let rendered = match format {
                Format::Dot => to_dot(&model, RenderOptions { show_privileges }),
                Format::Mermaid => to_mermaid(&model),
            };
            let text = rendered.map_err(|RenderError::InvalidModel(diagnostics)| {
                report(&diagnostics, false);
                Failure::quiet(1)
            })?;
            write_output(&text, output.as_deref())
        }
        Command::Fmt { file, json } => {
            let model = load(&file)?;
            if json {
                let bytes = emit_json(&model);
                write_output(std::str::from_utf8(&bytes).expect("JSON is UTF-8"), None)
            } else {
                write_output(&emit_text(&model), None)
            }
        }
        Command::Explain { code } => {
            let text = explain(&code).map_err(|e| Failure::usage(e.to_string()))?;
            println!("{code}: {text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if let Some(message) = failure.message {
                eprintln!("error: {message}");
            }
            ExitCode::from(failure.code)
        }
    }
}
