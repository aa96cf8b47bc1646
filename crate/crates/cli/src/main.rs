//! `mfris`: closed-form secrecy outage, parameter sweeps and simulation checks
//! for multi-functional RIS-assisted NOMA links.

mod selftest;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mfris_core::analysis::{secrecy_throughput, QuadOrders, QuadRules};
use mfris_core::experiment::{
    emit_csv, load_config, oracle_agreement, run_sweep, write_csv, Agreement, Experiment,
    OperatingPoint, Output,
};
use mfris_core::linkmodel::{Scenario, Side};
use mfris_core::montecarlo::{McConfig, McEstimate};

#[derive(Parser)]
#[command(name = "mfris", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured operating point.
    Analyze(RunArgs),
    /// Run the configured sweep and write its table as CSV.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every sweep row's closed form against simulation.
    Validate {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the compared table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check special functions and quadrature rules against known values.
    Selftest {
        #[arg(long, value_name = "W,S,D,N,I,X")]
        orders: Option<QuadOrders>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; the reference operating point when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_name = "W,S,D,N,I,X")]
    orders: Option<QuadOrders>,
    /// Concurrent trial ranges; results do not depend on it.
    #[arg(long)]
    partitions: Option<usize>,
}

impl RunArgs {
    fn experiment(&self) -> Result<Experiment> {
        let mut exp = match &self.config {
            Some(path) => load_config(path)?,
            None => Experiment::default(),
        };
        if let Some(seed) = self.seed {
            exp.run.seed = seed;
        }
        if let Some(trials) = self.trials {
            exp.run.trials = trials;
        }
        if let Some(orders) = self.orders {
            exp.run.orders = orders;
        }
        if let Some(partitions) = self.partitions {
            exp.run.partitions = partitions;
        }
        Ok(exp)
    }
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    // Usage errors exit with 1; 2 is reserved for failed checks.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Verdict> {
    match command {
        Command::Analyze(run) => analyze(&run.experiment()?),
        Command::Sweep { run, out } => {
            let rows = run_sweep(&run.experiment()?)?;
            match out {
                Some(path) => emit_csv(&rows, &path)?,
                None => write_csv(&rows, io::stdout().lock()).context("writing CSV to stdout")?,
            }
            Ok(Verdict::Ok)
        }
        Command::Validate { run, out } => validate(run.experiment()?, out),
        Command::Selftest { orders } => Ok(if selftest::run(orders.unwrap_or_default())? {
            Verdict::Ok
        } else {
            Verdict::Failed
        }),
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Reflection => "u_r",
        Side::Refraction => "u_t",
    }
}

fn analyze(exp: &Experiment) -> Result<Verdict> {
    let point = OperatingPoint::resolve(exp, exp.scenario.architecture, exp.scenario.sic, None)?;
    let rules = QuadRules::new(exp.run.orders)?;
    let mc = McConfig {
        trials: exp.run.trials,
        seed: exp.run.seed,
        partitions: exp.run.partitions,
    };
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{} scenario, {}, {} SIC, M = {}, P_b = {:.4e} W",
        point.spec.scenario.name(),
        point.spec.architecture.name(),
        point.spec.sic.name(),
        point.cfg.elements,
        point.cfg.p_b
    )?;
    let users: &[Side] = match point.spec.scenario {
        Scenario::External => &[Side::Reflection, Side::Refraction],
        Scenario::Internal => &[Side::Refraction],
    };
    for &user in users {
        let point = OperatingPoint { user, ..point.clone() };
        let exact = point.sop_exact(&rules)?;
        let asym = point.sop_asymptotic(&rules)?;
        let sim = point.sop_mc(&mc)?;
        writeln!(
            out,
            "{}: sop {:.4e}, asymptote {:.4e}, simulated {:.4e} ± {:.1e}, throughput {:.4e} BPCU",
            side_name(user),
            exact.value,
            asym.value,
            sim.p_hat,
            sim.stderr,
            secrecy_throughput(exact.value, point.rate())
        )?;
        for (label, flags) in [("sop", &exact.flags), ("asymptote", &asym.flags)] {
            if !flags.is_empty() {
                writeln!(out, "    {label} flags: {flags:?}")?;
            }
        }
    }
    Ok(Verdict::Ok)
}

fn validate(mut exp: Experiment, out: Option<PathBuf>) -> Result<Verdict> {
    exp.sweep.outputs = vec![Output::SopExact, Output::SopMc];
    let rows = run_sweep(&exp)?;
    let mut stdout = io::stdout().lock();
    let (mut within, mut outside) = (0, 0);
    for (i, row) in rows.iter().enumerate() {
        let (Some(exact), Some(p_hat), Some(stderr)) = (row.sop_exact, row.sop_mc, row.mc_stderr) else {
            unreachable!("both columns requested");
        };
        let est = McEstimate {
            p_hat,
            stderr,
            outages: (p_hat * exp.run.trials as f64).round() as u64,
            trials: exp.run.trials,
            seed: exp.run.seed.wrapping_add(i as u64),
        };
        let verdict = match oracle_agreement(exact, &est) {
            Agreement::Within => {
                within += 1;
                "ok"
            }
            Agreement::Outside => {
                outside += 1;
                "OUTSIDE"
            }
            Agreement::NotCompared => "not compared",
        };
        writeln!(
            stdout,
            "{} = {:<8} {:<10} {:<9}: analytic {:.4e}, simulated {:.4e} ± {:.1e} -> {verdict}",
            exp.sweep.variable.name(),
            row.sweep_value,
            row.architecture.name(),
            row.sic.name(),
            exact,
            p_hat,
            stderr
        )?;
    }
    writeln!(stdout, "{within} within tolerance, {outside} outside, {} not compared", rows.len() - within - outside)?;
    if let Some(path) = out {
        emit_csv(&rows, &path)?;
    }
    Ok(if outside == 0 { Verdict::Ok } else { Verdict::Failed })
}
