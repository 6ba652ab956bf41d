mod commands;
mod manifest;

use clap::{Args, Parser, Subcommand};
use irvweak::election::Rule;
use irvweak::empirical::AuditMode;
use manifest::{default_manifest_path, now_ms, write_atomic, RunManifest};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 20240001;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "irvweak", version, about = "Weak-winner analysis for three-candidate instant runoff")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Global {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run manifest path (default: <out>.manifest.json when --out is set).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SimArgs {
    /// Spatial model, e.g. UNI, BIM(0.5), WBI(0.5)xUNI.
    #[arg(long)]
    model: String,
    /// Sigma for model axes written without one.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    voters: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    bullet_prob: f64,
    /// Comma-separated: irv, plurality, minimax.
    #[arg(long, value_delimiter = ',', default_value = "irv")]
    rules: Vec<Rule>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
enum Command {
    /// Full tabulation of one ballot file as JSON.
    Tabulate { file: PathBuf },
    /// Monte Carlo experiment report (one CSV row).
    Simulate(SimArgs),
    /// One experiment per sigma on a grid.
    Sweep {
        #[command(flatten)]
        sim: SimArgs,
        /// start:end:step, inclusive.
        #[arg(long)]
        sigma_range: String,
    },
    /// Impartial anonymous culture probabilities.
    Iac {
        /// Exact count at this electorate size.
        #[arg(long)]
        enumerate: Option<u64>,
        /// Uniform simplex samples.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Impartial culture limits.
    Ic {
        /// Spherical volumes via the Schläfli route (the default).
        #[arg(long)]
        schlafli: bool,
        /// Gaussian cone samples.
        #[arg(long)]
        gaussian: Option<u64>,
        /// Quadrature tolerance.
        #[arg(long, default_value_t = commands::DEFAULT_TOL)]
        tol: f64,
    },
    /// Replace bullet votes by proportional full rankings.
    Complete { file: PathBuf },
    /// Eliminate candidates until three remain.
    Reduce {
        file: PathBuf,
        /// Write the elimination log as JSON here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Audit every ballot file in a directory.
    Audit {
        dir: PathBuf,
        #[arg(long, default_value = "actual")]
        mode: AuditMode,
        /// Per-election JSON-lines trail.
        #[arg(long)]
        trail: Option<PathBuf>,
    },
    /// Rerun the command recorded in a manifest.
    Replay { manifest_file: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Tabulate { .. } => "tabulate",
            Command::Simulate(_) => "simulate",
            Command::Sweep { .. } => "sweep",
            Command::Iac { .. } => "iac",
            Command::Ic { .. } => "ic",
            Command::Complete { .. } => "complete",
            Command::Reduce { .. } => "reduce",
            Command::Audit { .. } => "audit",
            Command::Replay { .. } => "replay",
        }
    }
}

fn sim_options<'a>(s: &'a SimArgs, seed: u64) -> commands::SimOptions<'a> {
    commands::SimOptions {
        model: &s.model,
        sigma: s.sigma,
        trials: s.trials,
        voters: s.voters,
        bullet_prob: s.bullet_prob,
        rules: &s.rules,
        seed,
    }
}

fn execute(command: &Command, g: &Global) -> Result<commands::Output, CliError> {
    let seed = g.seed;
    match command {
        Command::Tabulate { file } => commands::tabulate(file, seed),
        Command::Simulate(s) => commands::simulate(&sim_options(s, seed)),
        Command::Sweep { sim, sigma_range } => commands::sweep(&sim_options(sim, seed), sigma_range),
        Command::Iac { enumerate, samples } => commands::iac(*enumerate, *samples, seed),
        Command::Ic { schlafli, gaussian, tol } => commands::ic(*gaussian, *schlafli, *tol, seed),
        Command::Complete { file } => commands::complete(file, seed),
        Command::Reduce { file, log } => commands::reduce(file, seed, log.as_deref()),
        Command::Audit { dir, mode, trail } => commands::audit(dir, *mode, seed, trail.as_deref()),
        Command::Replay { .. } => unreachable!("replay is resolved before execution"),
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("{}: {e}", path.display()))
}

/// Resolves a replay into the recorded invocation; `--out` and
/// `--manifest` given to `replay` override the recorded ones.
fn resolve(cli: Cli) -> Result<(Cli, Vec<String>), CliError> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let Command::Replay { manifest_file } = &cli.command else {
        return Ok((cli, argv));
    };
    let text = std::fs::read_to_string(manifest_file).map_err(io_err(manifest_file))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", manifest_file.display())))?;
    let mut inner = Cli::try_parse_from(std::iter::once("irvweak".to_string()).chain(m.argv.iter().cloned()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if matches!(inner.command, Command::Replay { .. }) {
        return Err(CliError::Usage("a manifest cannot record a replay".into()));
    }
    inner.global.out = cli.global.out.clone();
    inner.global.manifest = cli.global.manifest.clone();
    if let Some(t) = cli.global.threads {
        inner.global.threads = Some(t);
    }
    Ok((inner, m.argv))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (cli, argv) = resolve(cli)?;
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Compute(e.to_string()))?;
    }
    let started = now_ms();
    let output = execute(&cli.command, &cli.global)?;

    let mut outputs = Vec::new();
    match &cli.global.out {
        Some(path) => {
            write_atomic(path, output.primary.as_bytes()).map_err(io_err(path))?;
            outputs.push(path.clone());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.primary.as_bytes()).map_err(|e| CliError::Compute(e.to_string()))?;
        }
    }
    for (path, text) in &output.extra {
        write_atomic(path, text.as_bytes()).map_err(io_err(path))?;
        outputs.push(path.clone());
    }

    let manifest_path = cli.global.manifest.clone().or_else(|| cli.global.out.as_deref().map(default_manifest_path));
    if let Some(mp) = manifest_path {
        let m = RunManifest {
            subcommand: cli.command.name().to_string(),
            argv: strip_output_flags(&argv),
            config: serde_json::json!({ "global": cli.global, "command": cli.command }),
            seed: cli.global.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_ms: started,
            finished_unix_ms: now_ms(),
            outputs,
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
        write_atomic(&mp, text.as_bytes()).map_err(io_err(&mp))?;
    }
    Ok(())
}

/// The recorded argv without `--out`/`--manifest`, which a replay supplies.
fn strip_output_flags(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--manifest" {
            skip = true;
        } else if !(a.starts_with("--out=") || a.starts_with("--manifest=")) {
            out.push(a.clone());
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
