use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod io;

use io::{InputError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "amalgam", version, about = "Tree amalgamations, tree-decompositions, ends and hyperbolicity at finite scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check a spec, a graph, or a graph with a tree-decomposition.
    Validate,
    /// Build the truncated amalgam of a spec at radius R.
    Build,
    /// Check the tree-decomposition axioms.
    VerifyTd,
    /// Geodesic closure of a tree-decomposition.
    Closure,
    /// Split a build along the orbit of a tight separator.
    Split,
    /// Split repeatedly down to finite or one-ended factors.
    Factorise,
    /// Accessibility probe and tree-end degrees.
    Ends,
    /// Tight separators of size at most k.
    Separators,
    /// Exact thin-triangle δ and quasi-geodesic certificates.
    Hyperbolicity,
    /// Build, read a spec back off the induced decomposition, rebuild, compare.
    Roundtrip,
}

#[derive(clap::Args, Debug)]
struct Opts {
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    #[arg(long, global = true)]
    td: Option<PathBuf>,
    /// Radius; a comma-separated list where the command takes several.
    #[arg(short = 'R', long = "radius", value_delimiter = ',', global = true)]
    radius: Vec<usize>,
    /// Separator size bound.
    #[arg(short = 'k', global = true, default_value_t = 1)]
    k: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated separators, group elements or geodesics.
    #[arg(long, global = true, default_value_t = amalgam_core::ends::DEFAULT_SEPARATOR_CAP)]
    cap: usize,
    /// Maximum factorisation depth.
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,
    /// Directory for JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for DOT files (and JSON artifacts when --out is absent).
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    /// Print the main artifact as JSON instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
}

/// How a run ended, as an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Build => "build",
            Command::VerifyTd => "verify-td",
            Command::Closure => "closure",
            Command::Split => "split",
            Command::Factorise => "factorise",
            Command::Ends => "ends",
            Command::Separators => "separators",
            Command::Hyperbolicity => "hyperbolicity",
            Command::Roundtrip => "roundtrip",
        }
    }

    fn default_radius(self) -> Vec<usize> {
        match self {
            Command::Ends => vec![3, 4, 5],
            Command::Hyperbolicity => vec![2, 3, 4],
            Command::Build | Command::Separators => vec![3],
            _ => vec![4],
        }
    }
}

fn config(command: Command, o: Opts) -> RunConfig {
    RunConfig {
        command: command.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        spec: o.spec,
        graph: o.graph,
        td: o.td,
        radius: if o.radius.is_empty() { command.default_radius() } else { o.radius },
        k: o.k,
        seed: o.seed,
        cap: o.cap,
        depth: o.depth,
        out: o.out,
        dot: o.dot,
        json: o.json,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command;
    let cfg = config(command, cli.opts);
    match commands::run(command, &cfg) {
        Ok(Outcome::Pass) => ExitCode::from(0),
        Ok(Outcome::Fail) => ExitCode::from(1),
        Ok(Outcome::Inconclusive) => ExitCode::from(3),
        Err(e) => {
            if let Some(input) = e.downcast_ref::<InputError>() {
                for line in &input.0 {
                    eprintln!("error: {line}");
                }
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}
