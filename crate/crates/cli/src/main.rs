//! `microdss` — run the closed simulator/kernel loop, replay captured
//! feature logs through the kernel, and manage the case base.
//!
//! Exit codes: 0 success, 2 malformed scenario/log/configuration,
//! 3 malformed case base, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use microdss_core::config::KernelConfig;
use microdss_core::runner::{
    init_case_base, list_case_base, replay_log, run_scenario, Policy, RunConfig, RunError,
};

#[derive(Parser)]
#[command(name = "microdss", version, about = "Miniature crisis decision-support loop")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario through the simulator and kernel.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        cycles: u64,
        #[arg(long, value_enum)]
        policy: PolicyArg,
        /// Case base file; required for --policy dss, created from the
        /// seeded default when absent.
        #[arg(long)]
        casebase: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Kernel override, repeatable: --set proximity.dMax=8
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Replay a feature log through the kernel layers only.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Inspect or initialize a case base file.
    Casebase {
        #[command(subcommand)]
        command: CasebaseCommand,
    },
}

#[derive(Subcommand)]
enum CasebaseCommand {
    /// Write the seeded 4-case default base.
    Init {
        #[arg(long)]
        path: PathBuf,
    },
    /// Print id, template, weight and consequences, one case per line.
    List {
        #[arg(long)]
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    None,
    Baseline,
    Dss,
}

impl From<PolicyArg> for Policy {
    fn from(arg: PolicyArg) -> Self {
        match arg {
            PolicyArg::None => Policy::None,
            PolicyArg::Baseline => Policy::Baseline,
            PolicyArg::Dss => Policy::Dss,
        }
    }
}

fn kernel_config(sets: &[String]) -> Result<KernelConfig, RunError> {
    let mut cfg = KernelConfig::new();
    for assignment in sets {
        cfg.apply_assignment(assignment)?;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            cycles,
            policy,
            casebase,
            out,
            set,
        } => {
            let cfg = RunConfig {
                scenario_path: scenario,
                seed,
                cycles,
                policy: policy.into(),
                casebase_path: casebase,
                out_dir: out,
                kernel: kernel_config(&set)?,
            };
            let report = run_scenario(&cfg)?;
            println!("{}", serde_json::to_string(&report).unwrap());
        }
        Command::Replay { log, out, set } => {
            let report = replay_log(&log, &out, &kernel_config(&set)?)?;
            println!("{}", serde_json::to_string(&report).unwrap());
        }
        Command::Casebase { command } => match command {
            CasebaseCommand::Init { path } => {
                init_case_base(&path)?;
                eprintln!("wrote 4-case default base to {}", path.display());
            }
            CasebaseCommand::List { path } => {
                print!("{}", list_case_base(&path)?);
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
