use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use simrev_harness::{run, Command, HarnessError, Overrides, ScenarioConfig};

#[derive(Parser)]
#[command(name = "simrev", version, about = "Simultaneous auction equilibria, revenue benchmarks and verification reports")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve for an ε-BNE and write the profile and regret certificate.
    Solve(Common),
    /// Run the named checks and write the verification report.
    Verify(Common),
    /// Analyse a range of random instances and write revenue ratios.
    Sweep(Common),
    /// Write the revenue decomposition of one instance.
    Decompose(Common),
    /// Solve the optimal revenue program.
    Opt(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Instance seed; the first sweep seed for `sweep`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check to run; repeatable, replaces the configured list.
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Solve linear programs in exact rational arithmetic.
    #[arg(long)]
    exact_rational: bool,
    /// Monte Carlo samples for cross-checking interim utilities.
    #[arg(long)]
    mc_samples: Option<usize>,
}

fn execute(cmd: Command, c: Common) -> Result<bool, HarnessError> {
    let text = std::fs::read_to_string(&c.config)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", c.config.display())))?;
    let cfg = ScenarioConfig::from_toml(&text)?;
    let ov = Overrides {
        seed: c.seed,
        out: c.out,
        checks: c.checks,
        exact_rational: c.exact_rational,
        mc_samples: c.mc_samples,
    };
    let outcome = run(cmd, &cfg, &ov)?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Decompose(c) => (Command::Decompose, c),
        Cmd::Opt(c) => (Command::Opt, c),
    };
    match execute(cmd, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
