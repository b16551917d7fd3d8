use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbsim::config::ScenarioConfig;
use qbsim::presets::Figure;
use qbsim::runner::{self, FitDecayOptions, Outcome};
use qbsim::Result;

#[derive(Parser)]
#[command(name = "qbsim", version, about = "EIT quantum battery on a coupled-cavity array")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "QBSIM_OUT", default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate the data for one figure: fig2, fig3a, fig3b, fig4, fig5, fig6 or fig7.
    Reproduce { figure: Figure },
    /// Run a JSON scenario.
    Run {
        /// Scenario file (JSON, `schema_version` 1).
        config: PathBuf,
    },
    /// Bound states of a scenario's dark energy.
    BoundStates { config: PathBuf },
    /// Exact and perturbative atom energies of a scenario.
    AtomSpectrum { config: PathBuf },
    /// Fit an exponential to the peaks of a time-series CSV.
    FitDecay {
        series: PathBuf,
        /// Value column (default `p_dark`, else the first non-`t` column).
        #[arg(long)]
        column: Option<String>,
        #[arg(long, default_value_t = qbsim::analysis::DEFAULT_T_MIN)]
        t_min: f64,
        /// Fit every sample after `t_min` instead of the peaks.
        #[arg(long)]
        raw: bool,
    },
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let out = cli.out.as_path();
    let load = |p: &Path| ScenarioConfig::load(p);
    match &cli.command {
        Command::Reproduce { figure } => runner::reproduce(*figure, out),
        Command::Run { config } => runner::run_config(&load(config)?, out),
        Command::BoundStates { config } => runner::bound_states_report(&load(config)?, out),
        Command::AtomSpectrum { config } => runner::atom_spectrum_report(&load(config)?, out),
        Command::FitDecay {
            series,
            column,
            t_min,
            raw,
        } => runner::fit_decay(
            series,
            &FitDecayOptions {
                column: column.clone(),
                t_min: *t_min,
                raw: *raw,
            },
            out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            println!("{}", serde_json::to_string_pretty(&outcome.summary).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
