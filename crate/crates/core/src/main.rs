use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eprb::cli::{
    cmd_audit, cmd_certify, cmd_scan, cmd_simulate, parse_binding, parse_model, parse_policy,
    CliError, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "eprb",
    version,
    about = "Two-particle spin correlation models: simulate, certify, audit, scan"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded experiment; write records.jsonl and summary.csv.
    Simulate(RunArgs),
    /// Exact certificate of the instruction-set opposite-spin bound.
    Certify {
        /// Emit JSON instead of a text table.
        #[arg(long)]
        json: bool,
    },
    /// Quantum agreement, no-signaling and measurement-independence audits.
    Audit(RunArgs),
    /// Opposite-spin probability against angle difference; write curve.csv.
    Scan(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file, or `-` for standard input.
    #[arg(long)]
    config: Option<PathBuf>,
    /// quantum | mermin | grandma | grandma-labeled | grandma-continuous
    #[arg(long)]
    model: Option<String>,
    /// fixed:THETA,PHI | uniform | independent | scan:D1,D2,...
    #[arg(long)]
    policy: Option<String>,
    /// Trials (per setting pair for audit and scan).
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Label binding, e.g. a=0,b=120,c=240.
    #[arg(long)]
    bind: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            None => RunConfig::default(),
            Some(p) if p.as_os_str() == "-" => {
                let mut text = String::new();
                std::io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
                RunConfig::from_json(&text)?
            }
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                RunConfig::from_json(&text)?
            }
        };
        if let Some(m) = &self.model {
            cfg.model = Some(parse_model(m, cfg.model.as_ref())?);
        }
        if let Some(p) = &self.policy {
            cfg.policy = Some(parse_policy(p)?);
        }
        if let Some(b) = &self.bind {
            cfg.binding = Some(parse_binding(b)?);
        }
        if self.n.is_some() {
            cfg.n_trials = self.n;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args.load()?.resolve()?, &mut stdout),
        Command::Certify { json } => cmd_certify(&mut stdout, json),
        Command::Audit(args) => cmd_audit(&args.load()?.resolve()?, &mut stdout).map(|_| ()),
        Command::Scan(args) => {
            let mut cfg = args.load()?;
            let deltas = cfg.scan_deltas()?;
            cmd_scan(&cfg.resolve()?, &deltas, &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
