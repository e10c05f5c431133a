mod commands;
mod docs;
mod hosts;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "digrid",
    version,
    about = "Grid builders and recognizers for rayed digraph hosts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Truncation depth; defaults to 3 x levels.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, default_value_t = 3)]
    levels: u32,
    /// Count uncertified pairs seen this often as unbounded (approximate).
    #[arg(long)]
    threshold: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the artifact here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(3 * self.levels as usize)
    }
}

#[derive(Args, Clone, Debug)]
pub struct HostArgs {
    /// Catalog host by short name.
    #[arg(long, conflicts_with = "spec")]
    host: Option<String>,
    /// Catalog host spec as a JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Rays of grid and necklace hosts; defaults to --levels.
    #[arg(long)]
    host_levels: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a grid or necklace grid with its certificate.
    Gen {
        /// bidirected-qg, inward-ddqg, outward-ddqg, bidirected-ng, inward-ng or outward-ng.
        #[arg(long)]
        kind: String,
        /// Delete this many random girder edges (picked with --seed) from the output.
        #[arg(long, default_value_t = 0)]
        delete_girder_edges: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Validate certificate documents; exits 1 if any is rejected.
    Validate {
        /// Certificate files; `-` reads standard input.
        #[arg(default_value = "-")]
        inputs: Vec<PathBuf>,
    },
    /// Contract the family rays along a spine and report the quotients.
    Contract {
        #[command(flatten)]
        host: HostArgs,
        /// Spine rounds; defaults to the depth.
        #[arg(long)]
        rounds: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Classify the quotient: strong component, directed path, or path family.
    Analyze {
        #[command(flatten)]
        host: HostArgs,
        /// Rays a directed path or path family needs; defaults to --levels.
        #[arg(long)]
        size: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Find a grid of --levels levels in the host.
    Pipeline {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Turn a dominated grid host into a bidirected grid.
    Transform {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Find a necklace grid, or run a separation check on a generated one.
    Necklace {
        #[command(flatten)]
        host: HostArgs,
        #[arg(long, value_enum, default_value_t = NecklaceCheck::Grid)]
        check: NecklaceCheck,
        /// Grid row the arch separation starts from.
        #[arg(long, default_value_t = 6)]
        tail: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Render a JSON document's graph as DOT.
    ExportDot {
        #[arg(default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NecklaceCheck {
    Grid,
    ArchSeparation,
    GirderObstruction,
}

/// A failure reported as JSON on standard error.
#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub details: serde_json::Value,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: "Usage".into(),
            message: message.into(),
            details: json!(null),
        }
    }
}

impl From<digrid::Error> for CliError {
    fn from(e: digrid::Error) -> Self {
        let details = match &e {
            digrid::Error::ObstructionAtDepth { stage, depth } => {
                json!({ "stage": stage, "depth": depth })
            }
            _ => json!(null),
        };
        CliError {
            code: e.code().to_string(),
            message: e.to_string(),
            details,
        }
    }
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let read = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|e| CliError {
        code: "Io".into(),
        message: format!("{}: {e}", path.display()),
        details: json!(null),
    })?;
    Ok(text)
}

pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError {
        code: "Io".into(),
        message: e.to_string(),
        details: json!(null),
    };
    match out {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    use commands::*;
    match cli.command {
        Command::Gen {
            kind,
            delete_girder_edges,
            common,
        } => gen(&kind, delete_girder_edges, &common),
        Command::Validate { inputs } => validate(&inputs),
        Command::Contract {
            host,
            rounds,
            common,
        } => contract(&host, rounds, &common),
        Command::Analyze { host, size, common } => analyze(&host, size, &common),
        Command::Pipeline { host, common } => pipeline(&host, &common),
        Command::Transform { host, common } => transform(&host, &common),
        Command::Necklace {
            host,
            check,
            tail,
            common,
        } => necklace(&host, check, tail, &common),
        Command::ExportDot { input, out } => export_dot(&input, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let doc = json!({
                "schema": digrid::io::SCHEMA,
                "kind": "error",
                "code": e.code,
                "message": e.message,
                "details": e.details,
            });
            eprintln!("{doc}");
            ExitCode::from(2)
        }
    }
}
