//! `torelli`: command line access to the torelli-core computations.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use torelli_core::curve::DEFAULT_CAP;
use torelli_core::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "torelli", version, about = "Zeta functions, Jacobians and isogeny evidence for hyperelliptic curves")]
pub struct Cli {
    /// Emit a single JSON document on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed recorded in the run manifest. Every computation is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Frobenius characteristic polynomial, order sequence and Weil check.
    Zeta(ZetaArgs),
    /// Order sequence F(1..n), or the order of one divisor class.
    Order(OrderArgs),
    /// Isogeny certificate for two curves over the same characteristic.
    Isogeny(IsogenyArgs),
    /// Point configurations realizing a string of orders.
    Configs(ConfigsArgs),
    /// 2-adic (or l-adic) valuations along a tower of extensions.
    Tower(TowerArgs),
    /// The set C(k1)^- over the quadratic extension.
    Cminus(CurveArg),
    /// Index of the subgroup generated by even cycles off an excluded set.
    Generate(GenerateArgs),
    /// Enumerate J(F_{q^m}) and report its structure.
    Group(GroupArgs),
    /// Batch audit of many curves, written as CSV.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CurveArg {
    /// Curve spec, e.g. "p=3; f=2,2,1,1,0,1" or "p=3; f=x^5+x^3+x^2-x-1".
    #[arg(long)]
    pub curve: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ZetaArgs {
    /// Curve spec.
    #[arg(long)]
    pub curve: String,
    /// Largest n for F(n).
    #[arg(long, default_value_t = 10)]
    pub nmax: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct OrderArgs {
    /// Curve spec.
    #[arg(long)]
    pub curve: String,
    #[arg(long, default_value_t = 10)]
    pub nmax: u32,
    /// Divisor "u:...;v:..." over F_{q^ext}; prints its order instead.
    #[arg(long)]
    pub divisor: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub ext: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct IsogenyArgs {
    #[arg(long)]
    pub curve_a: String,
    /// Must share the characteristic of --curve-a.
    #[arg(long)]
    pub curve_b: String,
    /// Base changes tried by the Tate comparison.
    #[arg(long, default_value_t = 6)]
    pub nmax: u32,
    /// Terms of the divisibility scan.
    #[arg(long, default_value_t = 20)]
    pub div: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct ConfigsArgs {
    /// Curve spec.
    #[arg(long)]
    pub curve: String,
    #[arg(long, default_value_t = 1)]
    pub ext: u32,
    /// Orders r_1,...,r_n.
    #[arg(long)]
    pub string: String,
    /// Only configurations on this base point, "inf" or "(x,y)" by encoding.
    #[arg(long)]
    pub base: Option<String>,
    /// Orders above this count as "large" in the signature.
    #[arg(long, default_value_t = torelli_core::configs::DEFAULT_ORDER_CAP)]
    pub order_cap: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct TowerArgs {
    /// Curve spec.
    #[arg(long)]
    pub curve: String,
    /// Levels l^1..l^depth, at most 10.
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    /// Prime l.
    #[arg(long, default_value_t = 2)]
    pub ell: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    /// Curve spec.
    #[arg(long)]
    pub curve: String,
    /// "cminus", "none", or points "(x,y);(x,y);inf" by encoding over k1.
    #[arg(long, default_value = "cminus")]
    pub exclude: String,
}

#[derive(Args, Debug, Serialize)]
pub struct GroupArgs {
    /// Required unless --load is given.
    #[arg(long, required_unless_present = "load")]
    pub curve: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub ext: u32,
    /// Write the element table to this file.
    #[arg(long)]
    pub save: Option<PathBuf>,
    /// Read a previously saved table instead of enumerating.
    #[arg(long, conflicts_with = "curve")]
    pub load: Option<PathBuf>,
    /// Include every element in the output.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// Scan every smooth odd model over F_p.
    #[arg(long, required_unless_present = "curves")]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 2)]
    pub genus: usize,
    /// File with one curve spec per line, scanned instead of --p.
    #[arg(long, conflicts_with = "p")]
    pub curves: Option<PathBuf>,
    /// Extension degrees 1..=mmax.
    #[arg(long, default_value_t = 1)]
    pub mmax: u32,
    #[arg(long, default_value_t = torelli_core::configs::DEFAULT_ORDER_CAP)]
    pub order_cap: u64,
    /// Skip curves repeating (charpoly, signature at m = 1).
    #[arg(long)]
    pub dedup: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a command: a core error, an I/O problem, or bad usage.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> &'static str {
        match self {
            Failure::Core(e) => e.code(),
            Failure::Usage(_) => "Usage",
            Failure::Io(_) => "Io",
        }
    }

    fn detail(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(s) | Failure::Io(s) => s.clone(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_usage() => 2,
            Failure::Usage(_) => 2,
            _ => 4,
        }
    }
}

/// What a command produced: the JSON result, its text rendering, and
/// whether a negative verdict should set exit code 3.
pub struct Output {
    pub args: Value,
    pub result: Value,
    pub text: String,
    pub not_proven: bool,
}

pub struct Context {
    pub cap: u64,
    pub json: bool,
}

fn cap_from_env() -> Result<u64, Failure> {
    match std::env::var("TORELLI_CAP") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| Failure::Usage(format!("TORELLI_CAP must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Zeta(_) => "zeta",
        Command::Order(_) => "order",
        Command::Isogeny(_) => "isogeny",
        Command::Configs(_) => "configs",
        Command::Tower(_) => "tower",
        Command::Cminus(_) => "cminus",
        Command::Generate(_) => "generate",
        Command::Group(_) => "group",
        Command::Scan(_) => "scan",
    }
}

fn report_failure(f: &Failure) -> ExitCode {
    let doc = json!({"error": f.code(), "detail": f.detail()});
    eprintln!("{doc}");
    ExitCode::from(f.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report_failure(&Failure::Usage(e.render().to_string().trim().to_string()));
        }
    };
    let cap = match cap_from_env() {
        Ok(c) => c,
        Err(f) => return report_failure(&f),
    };
    let ctx = Context { cap, json: cli.json };
    let name = subcommand_name(&cli.command);
    match commands::run(&cli.command, &ctx) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let written = if cli.json {
                let doc = json!({
                    "manifest": {
                        "subcommand": name,
                        "args": out.args,
                        "version": VERSION,
                        "seed": cli.seed,
                        "cap": cap,
                    },
                    "result": out.result,
                });
                writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))
            } else {
                write!(stdout, "{}", out.text)
            };
            if written.is_err() {
                return ExitCode::from(4);
            }
            if out.not_proven {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => report_failure(&f),
    }
}
