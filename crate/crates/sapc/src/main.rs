use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sapc::{run, Command, FamilyChoice, RunConfig};

/// Symmetric Poincaré complexes of triangulated manifolds: exact signatures
/// and local duality certificates.
#[derive(Parser, Debug)]
#[command(name = "sapc", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Lattice of opens: stars, stars-and-edges, or custom:SEEDS (e.g. custom:0;1;0,1).
    #[arg(long, global = true, default_value = "stars")]
    family: FamilyChoice,
    /// Number of higher components kept, and the half-width of box windows.
    #[arg(long, global = true, default_value_t = 2)]
    window: usize,
    /// Upper bound on poset elements (opens, chains).
    #[arg(long = "poset-cap", global = true, default_value_t = 20000)]
    poset_cap: usize,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Signature and global duality of closed manifolds or manifolds with boundary.
    Signature { inputs: Vec<String> },
    /// Local duality certificate for every open of the family.
    Duality { inputs: Vec<String> },
    /// Mayer-Vietoris and excision checks on standard splittings.
    Excision { inputs: Vec<String> },
    /// Descent and codescent on random covers.
    Descent { inputs: Vec<String> },
    /// Product of two closed manifolds.
    Product { first: String, second: String },
    /// The full acceptance battery.
    Suite,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, inputs) = match cli.command {
        Cmd::Signature { inputs } => (Command::Signature, inputs),
        Cmd::Duality { inputs } => (Command::Duality, inputs),
        Cmd::Excision { inputs } => (Command::Excision, inputs),
        Cmd::Descent { inputs } => (Command::Descent, inputs),
        Cmd::Product { first, second } => (Command::Product, vec![first, second]),
        Cmd::Suite => (Command::Suite, Vec::new()),
    };
    let config = RunConfig {
        command,
        inputs,
        family: cli.opts.family,
        window: cli.opts.window,
        poset_cap: cli.opts.poset_cap,
        jobs: cli.opts.jobs,
    };
    let (report, code) = match run(&config) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            (outcome.report.clone(), outcome.exit_code())
        }
        Err(e) => {
            eprintln!("sapc: {e}");
            let mut report = serde_json::json!({ "command": command.name(), "error": e.to_string(), "overall": false });
            if let sapc::RunError::Input(i) = &e {
                if let Some(p) = i.pointer() {
                    report["pointer"] = serde_json::json!(p);
                }
            }
            (report, e.exit_code())
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("plain data serializes") + "\n";
    match &cli.opts.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("sapc: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
