use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sdof_core::channel::{Canonical, FadingModel};
use sdof_core::dof::{converse_sdof_bound, sdof_remark4, theoretical_sdof, to_f64};
use sdof_core::exec::configure_threads;
use sdof_core::experiment::{load_config, run_suite, run_sweep, Overrides};

#[derive(Parser)]
#[command(name = "sdof", version, about = "Secrecy degrees-of-freedom sweeps for staggered block-fading wiretap channels")]
struct Cli {
    /// Worker threads for the parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write `<out>.csv` and `<out>.json`.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run every experiment of a suite file and print a summary table.
    Suite {
        file: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Print the theoretical and converse values for a model.
    Theory {
        #[command(subcommand)]
        model: TheoryModel,
    },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Output stem; the configuration's `output` otherwise.
    #[arg(long)]
    out: Option<String>,
    /// Number of random worst-case candidates per power point.
    #[arg(long)]
    budget_random: Option<usize>,
    #[arg(long)]
    fit_fraction: Option<f64>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides { seed: a.seed, output: a.out, budget_random: a.budget_random, fit_fraction: a.fit_fraction }
    }
}

#[derive(Subcommand)]
enum TheoryModel {
    /// Different coherence intervals `T_r`, `T_e`.
    Dc {
        t_r: usize,
        t_e: usize,
        #[arg(long)]
        m: usize,
    },
    /// Common interval `T` with offset `delta`.
    Offset {
        t: usize,
        delta: usize,
        #[arg(long)]
        m: usize,
    },
}

fn theory(model: TheoryModel) -> sdof_core::Result<()> {
    let (model, m) = match model {
        TheoryModel::Dc { t_r, t_e, m } => (FadingModel::DifferentCoherence { t_r, t_e }, m),
        TheoryModel::Offset { t, delta, m } => (FadingModel::Offset { t, delta }, m),
    };
    let t = theoretical_sdof(model, m)?;
    let c = converse_sdof_bound(model, m)?;
    println!("model     {model}");
    println!("m         {m}");
    println!("theory    {t} ({})", to_f64(t));
    println!("converse  {c} ({})", to_f64(c));
    if let Canonical::DifferentCoherence { q, .. } = model.canonical()? {
        if q >= 2 {
            let b = sdof_remark4(q, m)?;
            println!("block-size {} ({}) at l = {}", b.value, to_f64(b.value), b.best_l);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> sdof_core::Result<u8> {
    if let Some(n) = cli.threads {
        configure_threads(n)?;
    }
    match cli.command {
        Command::Sweep { config, overrides } => {
            let mut cfg = load_config(&config)?;
            cfg.apply(&overrides.into());
            let out = run_sweep(&cfg)?;
            let v = &out.verification.verdict;
            println!(
                "{} m={} theory {} converse {} empirical {:.4} {}",
                v.model,
                v.m,
                v.theory,
                v.converse,
                v.empirical_slope,
                if v.pass { "PASS" } else { "FAIL" }
            );
            println!("wrote {} and {}", out.csv_path.display(), out.json_path.display());
            Ok(if v.pass { 0 } else { 2 })
        }
        Command::Suite { file, overrides } => {
            let report = run_suite(&file, &overrides.into())?;
            print!("{}", report.table());
            println!("wrote {}", report.aggregate_path.display());
            Ok(report.exit_code() as u8)
        }
        Command::Theory { model } => theory(model).map(|_| 0),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
