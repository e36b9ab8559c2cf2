use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavity::config::{parse_config, RunConfig};
use cavity::run;
use cavity::state::Evolution;
use cavity::Error;

/// Entanglement dynamics of two atoms in a two-mode Kerr cavity.
#[derive(Parser)]
#[command(name = "cavity", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy, concurrence and negativity over the scaled-time grid.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the joint-state amplitudes at `--dump-tau` to this CSV.
        #[arg(long)]
        dump_state: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        dump_tau: f64,
    },
    /// Compare the closed-form blocks with the Runge-Kutta integrator.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Per-block CSV (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time series for several (chi, delta) scenarios.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-scenario summary CSV (standard error when absent).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Coefficients, roots and weights of one block.
    Roots {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Error(Error),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(Error::Io(e))
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_config(&text)?)
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate { config, out, dump_state, dump_tau } => {
            let mut cfg = load(&config)?;
            cfg.output_path = out;
            let samples = run::run_simulate(&cfg)?;
            let mut w = output(cfg.output_path.as_deref())?;
            run::write_series(&mut w, &samples)?;
            w.flush()?;
            if let Some(path) = dump_state {
                let evolution = Evolution::new(&cfg.params, cfg.convention)?;
                let state = evolution.assemble(dump_tau / cfg.lambda());
                let mut w = BufWriter::new(File::create(path)?);
                state.write_csv(&mut w)?;
                w.flush()?;
            }
        }
        Command::Validate { config, out } => {
            let cfg = load(&config)?;
            let report = run::run_validate(&cfg, None)?;
            let mut w = output(out.as_deref())?;
            report.write_csv(&mut w)?;
            w.flush()?;
            eprintln!("{}", report.summary());
            eprintln!("closed_form_max_discrepancy={:e}", report.closed_form_max_discrepancy);
            run::check_report(&report).map_err(Failure::Validation)?;
        }
        Command::Sweep { config, out, summary } => {
            let cfg = load(&config)?;
            let series = run::run_sweep(&cfg)?;
            let mut w = output(out.as_deref())?;
            run::write_sweep(&mut w, &series)?;
            w.flush()?;
            let rows = run::summarize(&series);
            match summary {
                Some(p) => {
                    let mut w = BufWriter::new(File::create(p)?);
                    run::write_summary(&mut w, &rows)?;
                    w.flush()?;
                }
                None => run::write_summary(io::stderr().lock(), &rows)?,
            }
        }
        Command::Roots { n1, n2, config } => {
            let cfg = load(&config)?;
            print!("{}", run::roots_report(&cfg.params, n1, n2)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = run::thread_pool();
    match pool.install(|| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
