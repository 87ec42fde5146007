use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use skyline_core::harness::{
    self, parse_config, run_config, special_function_report, write_bundle, write_result, Format, Mode, RunConfig,
    SweepResult, FIGURE_IDS,
};
use skyline_core::Result;

#[derive(Parser)]
#[command(name = "skyline", version, about = "UAV link blockage, reliability and coverage models")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (a directory for `figures`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Overrides the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured number of Monte Carlo trials.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Evaluation mode for `figures`.
    #[arg(long, global = true, value_parser = ["analytic", "simulate", "both"])]
    mode: Option<String>,
    /// Single figure for `figures` (fig3..fig11).
    #[arg(long, global = true)]
    figure: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form values over the configured sweep.
    Analytic,
    /// Monte Carlo estimates over the configured sweep.
    Simulate,
    /// Both, with a per-point agreement check.
    Compare,
    /// The canned evaluation figure bundle.
    Figures,
    /// Special functions against their oracles.
    Selftest {
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => parse_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.estimate.seed = s;
    }
    if let Some(n) = cli.trials {
        cfg.estimate.n_trials = n;
    }
    Ok(cfg)
}

fn output(cli: &Cli, result: &SweepResult) -> Result<()> {
    let format: Format = cli.format.parse()?;
    match &cli.out {
        Some(path) => harness::emit(result, format, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_result(result, format, &mut lock)?;
            lock.flush().map_err(|e| skyline_core::Error::Io(e.to_string()))
        }
    }
}

fn report(result: &SweepResult) -> bool {
    let mut ok = true;
    for r in result.disagreements().filter(|r| r.mode == "simulate") {
        ok = false;
        eprintln!(
            "disagreement: {}={} {} simulated {:.6e} +- {:.2e}",
            r.variable,
            r.value,
            r.metric,
            r.estimate,
            r.ci_half_width.unwrap_or(0.0)
        );
    }
    ok
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Analytic | Command::Simulate | Command::Compare => {
            let mut cfg = load(cli)?;
            cfg.sweep.mode = match cli.command {
                Command::Analytic => Mode::Analytic,
                Command::Simulate => Mode::Simulate,
                _ => Mode::Both,
            };
            let result = harness::with_thread_pool(|| run_config(&cfg))??;
            output(cli, &result)?;
            Ok(report(&result))
        }
        Command::Figures => {
            let cfg = load(cli)?;
            let mode: Mode = cli.mode.as_deref().unwrap_or("analytic").parse()?;
            let format: Format = cli.format.parse()?;
            let ids: Vec<&str> = match &cli.figure {
                Some(id) => vec![id.as_str()],
                None => FIGURE_IDS.to_vec(),
            };
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
            let result = harness::with_thread_pool(|| write_bundle(&dir, &ids, mode, &cfg.estimate, format))??;
            eprintln!("wrote {} figure(s) to {}", ids.len(), dir.display());
            Ok(report(&result))
        }
        Command::Selftest { points } => {
            let seed = cli.seed.unwrap_or(0);
            let reports = harness::with_thread_pool(|| special_function_report(*points, seed))?;
            for r in &reports {
                println!("{}", r.line());
            }
            Ok(reports.iter().all(|r| r.passed()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
