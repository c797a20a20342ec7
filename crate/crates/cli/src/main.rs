mod commands;
mod instance;
mod schema;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::{execute, CliError, Command, EXIT_COMPUTATION, EXIT_INVALID, EXIT_VERIFICATION};
use instance::{AlphaInput, InstanceFile};
use schema::{Conventions, Metadata, Output};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
}

/// Monodromy, duality and numeric checks for GKZ systems.
#[derive(Parser, Debug)]
#[command(name = "gkz", version)]
struct Args {
    /// Instance JSON file, or the name of a built-in instance.
    #[arg(long)]
    input: String,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    command: Command,
    /// Overrides the instance's alpha: `re,re,...` (items may be `re:im`) or JSON `{"re": [...], "im": [...]}`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    truncation: Option<usize>,
    /// Seed for sampled points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn load(input: &str) -> Result<InstanceFile, CliError> {
    let invalid = |message: String| CliError { code: EXIT_INVALID, message };
    if Path::new(input).exists() {
        let text = std::fs::read_to_string(input).map_err(|e| invalid(format!("cannot read {input}: {e}")))?;
        return serde_json::from_str(&text).map_err(|e| invalid(format!("instance error: Parse: {input}: {e}")));
    }
    gkz_core::instances::by_name(input)
        .map(|cfg| InstanceFile::from_config(input, &cfg))
        .ok_or_else(|| invalid(format!("no instance file or built-in instance named {input:?}")))
}

fn run(args: &Args) -> Result<i32, CliError> {
    let mut inst = load(&args.input)?;
    if let Some(a) = &args.alpha {
        inst.alpha = Some(AlphaInput::parse(a).map_err(|m| CliError { code: EXIT_INVALID, message: format!("instance error: BadAlpha: {m}") })?);
    }
    if let Some(t) = args.truncation {
        inst.truncation = t;
    }
    let out = execute(args.command, &inst, args.seed)?;
    let cfg = inst.config()?;
    let doc = Output {
        metadata: Metadata {
            tool: "gkz".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: format!("{:?}", args.command).to_lowercase(),
            instance: inst.name.clone(),
            seed: args.seed,
            truncation: inst.truncation,
            conventions: Conventions::of(&cfg),
        },
        result: out.result,
    };
    let Format::Json = args.format;
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError { code: EXIT_COMPUTATION, message: e.to_string() })?;
    match &args.output {
        Some(p) => std::fs::write(p, text + "\n")
            .map_err(|e| CliError { code: EXIT_COMPUTATION, message: format!("cannot write {}: {e}", p.display()) })?,
        None => println!("{text}"),
    }
    Ok(if out.passed { 0 } else { EXIT_VERIFICATION })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => {
            eprintln!("verification failed");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code as u8)
        }
    }
}
