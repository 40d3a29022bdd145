//! Command-line front end for the polarization-correction simulator.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 self-check
//! failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polqec::config::{load_config, parse_dist_flag, ConfigError, DistSpec, FileConfig, SEED_ENV};
use polqec::experiments::{run, self_check};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "polqec", version, about = "Linear-optical polarization error correction simulator")]
struct Cli {
    /// Run the built-in self-test instead of an experiment.
    #[arg(long)]
    check: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Random qubits through the simplified corrector; fidelity per output.
    CorrectSingle(RunArgs),
    /// Both active correctors on the same inputs and channels.
    CompareSetups(RunArgs),
    /// Intercept-resend probe: error rate and Eve's success over a pe grid.
    FpbSweep(RunArgs),
    /// BB84 Monte Carlo, optionally with the probe attack (--pe).
    Bb84(RunArgs),
    /// Passive corrector on coherent pulses over a phi grid.
    PassiveCoherent(RunArgs),
    /// Multi-basis coherent-pulse protocol round trip.
    Mesoscopic(RunArgs),
    /// Closed-form and exact overlap of rotated coherent states.
    Distinguishability(RunArgs),
    /// Same as --check.
    Check {
        #[arg(long, env = SEED_ENV, default_value_t = polqec::config::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with the same keys as the flags (snake_case).
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed.
    #[arg(long, env = SEED_ENV)]
    seed: Option<u64>,
    /// Trials, rounds or grid points, depending on the experiment.
    #[arg(long)]
    trials: Option<u64>,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write per-trial rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Mixing angle: a number, "uniform" or "lo:hi".
    #[arg(long, value_parser = parse_dist_flag, allow_hyphen_values = true)]
    phi: Option<DistSpec>,
    /// Channel phase lambda: a number, "uniform" or "lo:hi".
    #[arg(long, value_parser = parse_dist_flag, allow_hyphen_values = true)]
    lambda: Option<DistSpec>,
    /// Channel phase xi: a number, "uniform" or "lo:hi".
    #[arg(long, value_parser = parse_dist_flag, allow_hyphen_values = true)]
    xi: Option<DistSpec>,
    /// Probe disturbance, in [0, 0.5].
    #[arg(long)]
    pe: Option<f64>,
    /// pe grid as start:stop:step.
    #[arg(long)]
    pe_grid: Option<String>,
    /// Count detections on both outputs (output 2 time-multiplexed).
    #[arg(long)]
    both_ports: bool,
    /// Coherent amplitude.
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of bases for the mesoscopic protocol (odd).
    #[arg(long)]
    m_bases: Option<u32>,
}

impl RunArgs {
    fn into_flags(self, experiment: &str) -> (Option<PathBuf>, FileConfig) {
        let flags = FileConfig {
            experiment: Some(experiment.to_owned()),
            seed: self.seed,
            trials: self.trials,
            lambda: self.lambda,
            xi: self.xi,
            phi: self.phi,
            pe: self.pe,
            pe_grid: self.pe_grid,
            both_ports: self.both_ports.then_some(true),
            alpha: self.alpha,
            m_bases: self.m_bases,
            json: self.json,
            csv: self.csv,
        };
        (self.config, flags)
    }
}

fn run_checks(seed: u64) -> ExitCode {
    match self_check(seed) {
        Ok(checks) => {
            let mut ok = true;
            for c in &checks {
                ok &= c.passed;
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {}: {}", c.name, c.detail);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match (cli.check, cli.command) {
        (_, Some(Command::Check { seed })) => return run_checks(seed),
        (true, _) => return run_checks(seed_from_env()),
        (false, Some(c)) => c,
        (false, None) => {
            eprintln!("error: no experiment given; see --help");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let (name, args) = match command {
        Command::CorrectSingle(a) => ("correct-single", a),
        Command::CompareSetups(a) => ("compare-setups", a),
        Command::FpbSweep(a) => ("fpb-sweep", a),
        Command::Bb84(a) => ("bb84", a),
        Command::PassiveCoherent(a) => ("passive-coherent", a),
        Command::Mesoscopic(a) => ("mesoscopic", a),
        Command::Distinguishability(a) => ("distinguishability", a),
        Command::Check { .. } => unreachable!(),
    };
    let (path, flags) = args.into_flags(name);
    let cfg = match load_config(path.as_deref(), flags) {
        Ok(c) => c,
        Err(e @ ConfigError::Io { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let summary = report.summary_string(&cfg);
    let written = match &cfg.json_out {
        Some(p) => std::fs::write(p, &summary).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout()
            .write_all(summary.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write summary: {e}");
        return ExitCode::from(EXIT_IO);
    }
    if let Some(p) = &cfg.csv_out {
        if let Err(e) = report.table.write_path(p) {
            eprintln!("error: cannot write {}: {e}", p.display());
            return ExitCode::from(EXIT_IO);
        }
    }
    eprintln!("{}", report.headline);
    ExitCode::SUCCESS
}

fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(polqec::config::DEFAULT_SEED)
}
