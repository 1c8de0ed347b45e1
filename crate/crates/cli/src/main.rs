//! `translab`: command-line front end for the translator toolkit.
//!
//! Every command prints a JSON report on stdout. With `--out DIR` the
//! report is also written to `DIR/<command>.json` next to any CSV
//! artifacts. Exit status is 0 when the command ran (even if a check
//! reports violations), 2 for a malformed request and 3 for a numerical
//! failure; errors are printed as JSON on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use translab_cli::commands;
use translab_cli::config::{GammaChoice, RunConfig};
use translab_cli::error::CliError;

#[derive(Parser)]
#[command(name = "translab", version, about = "Bowl-type translators of fully nonlinear curvature flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entire-or-ball verdict from the level-set asymptotics.
    Classify(Flags),
    /// Integrate the rotational profile; writes profile.csv.
    Profile(Flags),
    /// Residual and identity checks on sampled surfaces.
    Check(Flags),
    /// Moving-plane reflection scan.
    Symmetry(Flags),
    /// First-touch shift between two graphs.
    Touch(Flags),
    /// Verdicts, radii and growth over a family in n.
    Sweep(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    /// Curvature function by name: mean, sigma-root, harmonic-inverse,
    /// hessian-quotient, h-times-sn.
    #[arg(long)]
    gamma: Option<String>,
    /// JSON file with a full curvature function spec.
    #[arg(long, conflicts_with = "gamma")]
    gamma_file: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// check: bowl, flat, paraboloid, sphere, ellipsoid.
    /// symmetry: bowl, bumped, cylinder. touch: shifted, perturbed.
    #[arg(long)]
    surface: Option<String>,
    /// Comma-separated subset of checks.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<f64>,
    #[arg(long)]
    t_count: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<f64>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// JSON run config; its fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn run_config(self) -> Result<RunConfig, CliError> {
        let flags = RunConfig {
            schema: None,
            gamma: self.gamma.map(GammaChoice::Name),
            gamma_file: self.gamma_file,
            n: self.n,
            k: self.k,
            l: self.l,
            budget: self.budget,
            eps: self.eps,
            tol: self.tol,
            grid: self.grid,
            out: self.out,
            seed: self.seed,
            surface: self.surface,
            checks: self.checks,
            radius: self.radius,
            shift: self.shift,
            t_count: self.t_count,
            angle: self.angle,
            n_min: self.n_min,
            n_max: self.n_max,
        };
        match self.config {
            Some(path) => {
                let file = RunConfig::from_file(&path)?;
                // a gamma named in the file replaces one given on the command line
                let flags = if file.gamma.is_some() || file.gamma_file.is_some() {
                    RunConfig { gamma: None, gamma_file: None, ..flags }
                } else {
                    flags
                };
                Ok(flags.overlaid(file))
            }
            None => Ok(flags),
        }
    }
}

type CommandFn = fn(RunConfig) -> Result<commands::Outcome, CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, flags, cmd): (&str, Flags, CommandFn) = match cli.command {
        Command::Classify(f) => ("classify", f, commands::classify_cmd),
        Command::Profile(f) => ("profile", f, commands::profile_cmd),
        Command::Check(f) => ("check", f, commands::check_cmd),
        Command::Symmetry(f) => ("symmetry", f, commands::symmetry_cmd),
        Command::Touch(f) => ("touch", f, commands::touch_cmd),
        Command::Sweep(f) => ("sweep", f, commands::sweep_cmd),
    };
    let run = flags.run_config()?;
    let out = run.out.clone();
    let outcome = cmd(run)?;
    let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
    if let Some(dir) = out {
        let io = |e: std::io::Error| CliError::Numerical(format!("cannot write to {}: {e}", dir.display()));
        std::fs::create_dir_all(&dir).map_err(io)?;
        std::fs::write(dir.join(format!("{name}.json")), &text).map_err(io)?;
        for (file, contents) in &outcome.files {
            std::fs::write(dir.join(file), contents).map_err(io)?;
        }
    }
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
