use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use sp4_cli::{run_suites, CliError, RunConfig, Suite, TableRow};

#[derive(Parser, Debug)]
#[command(name = "sp4cert", version, about = "Certify coset identities, operator norm bounds and decay profiles for Sp4 over local fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated residue characteristics.
    #[arg(long, global = true, value_delimiter = ',')]
    p: Option<Vec<u32>>,
    /// equal-char or mixed-char.
    #[arg(long, global = true)]
    backend: Option<String>,
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[arg(long, global = true)]
    imax: Option<u32>,
    #[arg(long, global = true)]
    jmax: Option<u32>,
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report path (standard output when absent).
    #[arg(long, global = true)]
    out: Option<String>,
    /// json, csv or text.
    #[arg(long, global = true)]
    format: Option<String>,
    /// CSV path for decay tables.
    #[arg(long, global = true)]
    table: Option<String>,
    /// Corrupt coset families so every check is expected to fail.
    #[arg(long, global = true)]
    negative_control: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Print a configuration template.
    Init,
    /// Coset identities for the move families.
    VerifyCosets,
    /// Gauss-sum norm bounds for the first Heisenberg pairs.
    VerifyGauss,
    /// Norm bounds for the second Heisenberg pairs.
    VerifyH2,
    /// Randomized checks of Schatten and L^p laws on finite groups.
    VerifyLp,
    /// Decay functions along zigzag paths.
    DecayProfile,
    /// Every suite.
    All,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.p {
        cfg.p = p.clone();
    }
    if let Some(b) = &cli.backend {
        cfg.backend = b.parse().map_err(|e: sp4_core::Error| CliError::Config(e.to_string()))?;
    }
    macro_rules! set {
        ($($f:ident),*) => { $(if let Some(v) = cli.$f { cfg.$f = v; })* };
    }
    set!(precision, imax, jmax, budget, samples);
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse()?;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.table.is_some() {
        cfg.table = cli.table.clone();
    }
    cfg.negative_control |= cli.negative_control;
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &Option<String>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{p}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_table(path: &str, rows: &[TableRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{path}: {e}"));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let suites: Vec<Suite> = match cli.command {
        Command::Init => {
            let text = format!("# sp4cert run configuration\n{}", RunConfig::template().to_toml());
            write(&cli.out, &text)?;
            return Ok(true);
        }
        Command::VerifyCosets => vec![Suite::Cosets],
        Command::VerifyGauss => vec![Suite::Gauss],
        Command::VerifyH2 => vec![Suite::H2norm],
        Command::VerifyLp => vec![Suite::Lp],
        Command::DecayProfile => vec![Suite::Decay],
        Command::All => Suite::ALL.to_vec(),
    };
    let cfg = load(cli)?;
    let (report, tables) = run_suites(&cfg, &suites)?;
    if let Some(t) = &cfg.table {
        write_table(t, &tables)?;
    }
    write(&cfg.out, &report.render(cfg.format)?)?;
    if !report.pass {
        eprintln!("{} failing record(s)", report.failures());
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("sp4cert: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
