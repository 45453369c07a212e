use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hyperprove::cli::{cmd_check, cmd_monitor, cmd_prove, cmd_witness, Flags, Outcome};

#[derive(Parser)]
#[command(name = "hyperprove", version, about = "Check forall-exists safety hyperproperties")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the query of a spec file automatically.
    Check {
        spec: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the proof script of a spec file through the kernel.
    Prove {
        spec: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Print existential lassos answering the given universal lassos.
    Witness {
        spec: PathBuf,
        /// One lasso per universal system, e.g. `a b (c)^w`.
        #[arg(required = true)]
        lassos: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Check finite logs, one per system, against the query formula.
    Monitor {
        spec: PathBuf,
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// Arithmetic modulus for programs.
    #[arg(long)]
    modulus: Option<i64>,
    /// Values read by `input` and `havoc`, e.g. `0..3`.
    #[arg(long, value_parser = parse_range)]
    input_domain: Option<(i64, i64)>,
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    max_closure: Option<usize>,
    /// Cross-check the winning region with the attractor computation.
    #[arg(long)]
    oracle: bool,
    /// Print the strategy on reachable winning nodes.
    #[arg(long)]
    strategy_dump: bool,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or("expected `a..b`")?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err("empty range".into());
    }
    Ok((a, b))
}

impl Opts {
    fn flags(&self) -> Flags {
        Flags {
            modulus: self.modulus,
            input_domain: self.input_domain,
            max_nodes: self.max_nodes,
            max_closure: self.max_closure,
            oracle: self.oracle,
            strategy_dump: self.strategy_dump,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let out: Outcome = match &cli.cmd {
        Cmd::Check { spec, opts } => cmd_check(spec, &opts.flags()),
        Cmd::Prove { spec, opts } => cmd_prove(spec, &opts.flags()),
        Cmd::Witness { spec, lassos, opts } => cmd_witness(spec, lassos, &opts.flags()),
        Cmd::Monitor { spec, logs, opts } => cmd_monitor(spec, logs, &opts.flags()),
    };
    if out.code == 2 {
        eprint!("{}", out.report);
    } else {
        print!("{}", out.report);
    }
    eprintln!("time: {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(out.code as u8)
}
