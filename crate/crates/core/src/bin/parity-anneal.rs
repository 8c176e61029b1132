use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use parity_anneal::experiments::{
    self, config::parse_pairs, output_dir, output_path, render_csv, run_experiment, write_csv,
    ExperimentConfig, Mode, NoiseKind, FIGURES,
};
use parity_anneal::open_dynamics::GammaMode;
use parity_anneal::Error;

#[derive(Parser)]
#[command(name = "parity-anneal", version, about = "Collective-spin annealing with parity sectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Instantaneous spectrum and sector labels along the schedule.
    Spectrum(RunArgs),
    /// Closed-system Schrödinger evolution.
    Closed(RunArgs),
    /// Open-system evolution (Redfield or GKSL).
    Open(RunArgs),
    /// Reproduce a figure preset.
    Figure {
        /// Figure id, e.g. fig3 or figB-ising.
        id: Option<String>,
        /// List the available figure ids.
        #[arg(long)]
        list: bool,
        /// Directory for the CSV files (overrides PARITY_ANNEAL_OUTPUT_DIR).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

/// Flags mirror the config keys; they override values from `--config`.
#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    n_qubits: Option<String>,
    /// ising or xxz.
    #[arg(long, allow_hyphen_values = true)]
    problem: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_anneal: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n_points: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n_samples: Option<String>,
    /// none, redfield or gksl.
    #[arg(long, allow_hyphen_values = true)]
    noise: Option<String>,
    /// Redfield coupling axis: x, y or z.
    #[arg(long, allow_hyphen_values = true)]
    coupling: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_env: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega_c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    /// kms or literal.
    #[arg(long, allow_hyphen_values = true)]
    gamma_mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rtol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    atol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    max_steps: Option<String>,
    /// CSV path; stdout when absent.
    #[arg(long, allow_hyphen_values = true)]
    output: Option<String>,
}

impl RunArgs {
    fn config(&self, mode: Mode) -> Result<ExperimentConfig, Error> {
        let mut pairs = match &self.config {
            Some(p) => parse_pairs(&fs::read_to_string(p)?)?,
            None => Vec::new(),
        };
        pairs.push(("mode".into(), mode.name().into()));
        let flags = [
            ("n_qubits", &self.n_qubits),
            ("problem", &self.problem),
            ("delta", &self.delta),
            ("alpha", &self.alpha),
            ("t_anneal", &self.t_anneal),
            ("n_points", &self.n_points),
            ("n_samples", &self.n_samples),
            ("noise", &self.noise),
            ("coupling", &self.coupling),
            ("eta", &self.eta),
            ("t_env", &self.t_env),
            ("omega_c", &self.omega_c),
            ("epsilon", &self.epsilon),
            ("gamma_mode", &self.gamma_mode),
            ("rtol", &self.rtol),
            ("atol", &self.atol),
            ("max_steps", &self.max_steps),
            ("output", &self.output),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                pairs.push((key.to_string(), v.clone()));
            }
        }
        ExperimentConfig::from_pairs(pairs)
    }
}

fn notices(cfg: &ExperimentConfig) {
    if cfg.mode == Mode::Open && cfg.noise == NoiseKind::Redfield && cfg.gamma_mode == GammaMode::Kms {
        eprintln!(
            "note: gamma_mode = kms (detailed-balance spectrum); the printed cut-off formula \
             uses the emission branch for both signs of omega and is available with --gamma-mode literal"
        );
    }
    if cfg.alpha > 0.0 && cfg.n_qubits % 4 != 2 {
        eprintln!(
            "warning: N = {} gives S = {}; the ground states of H(0) and H_P share a parity sector, \
             so there is no sector crossing to study",
            cfg.n_qubits,
            cfg.n_qubits as f64 / 2.0
        );
    }
}

fn run(mode: Mode, args: &RunArgs) -> Result<(), Error> {
    let cfg = args.config(mode)?;
    notices(&cfg);
    let table = run_experiment(&cfg)?;
    match &cfg.output {
        Some(_) => {
            let path = output_path(&cfg, &output_dir());
            write_csv(&table, &path)?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(render_csv(&table).as_bytes())?,
    }
    Ok(())
}

fn figure(id: Option<&str>, list: bool, dir: Option<PathBuf>) -> Result<(), Error> {
    if list || id.is_none() {
        for (id, what) in FIGURES {
            println!("{id:<12} {what}");
        }
        return Ok(());
    }
    let id = id.unwrap_or_default();
    let cfgs = experiments::preset(id)?;
    if let Some(first) = cfgs.iter().find(|c| c.mode == Mode::Open) {
        notices(first);
    }
    let dir = dir.unwrap_or_else(output_dir);
    for path in experiments::run_figure(id, &dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => run(Mode::Spectrum, a),
        Command::Closed(a) => run(Mode::Closed, a),
        Command::Open(a) => run(Mode::Open, a),
        Command::Figure {
            id,
            list,
            output_dir,
        } => figure(id.as_deref(), *list, output_dir.clone()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
