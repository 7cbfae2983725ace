use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shnr_core::certify::{run_suite, CertifyConfig, Operands, Suite};
use shnr_core::ensembles::Family;
use shnr_core::functionals::{
    cosine_of_angle_with, crawford_number, gap_bound, nearest_scalar, numerical_radius, op_seminorm, sine_from_cosine,
    CosConfig, ScanConfig,
};
use shnr_core::SemiHilbertSpace;

use shnr::campaign::{run_campaign, threads_from_env, CampaignConfig, RankPattern};
use shnr::io::{format_scalar, read_operator_file, write_atomically, MatrixJson};
use shnr::report::{ConfigEcho, Metadata, Record, Report, TOOL};
use shnr::CliError;

#[derive(Parser)]
#[command(name = "shnr", version, about = "A-numerical radius computations and inequality certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one functional of T from an operator file.
    Compute(ComputeArgs),
    /// Run an inequality suite on the operators of a file.
    Verify(VerifyArgs),
    /// Run an inequality suite on random instances.
    Campaign(CampaignArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    #[value(name = "normA")]
    NormA,
    #[value(name = "wA")]
    WA,
    Crawford,
    Cos,
    Sin,
    Dist,
    Adjoint,
    Gap,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Starting grid of campaign scans. Enclosures refine adaptively, so this
/// only trades initial sampling against refinement.
const CAMPAIGN_GRID: usize = 64;

#[derive(Args)]
struct Numerics {
    /// Starting angle grid of the support scan [default: 1024, 64 for campaign].
    #[arg(long)]
    grid: Option<usize>,
    /// Random starts of the cosine search.
    #[arg(long, default_value_t = CosConfig::default().starts)]
    starts: usize,
}

impl Numerics {
    fn scan(&self, default_grid: usize) -> ScanConfig {
        ScanConfig { grid_points: self.grid.unwrap_or(default_grid), ..ScanConfig::default() }
    }

    fn cos(&self) -> CosConfig {
        CosConfig { starts: self.starts, ..CosConfig::default() }
    }

    fn certify(&self, tol: f64, default_grid: usize) -> CertifyConfig {
        CertifyConfig { tol, scan: self.scan(default_grid), cos: self.cos(), ..CertifyConfig::default() }
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[command(flatten)]
    numerics: Numerics,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value = "1e-8")]
    tol: f64,
    /// Path of the JSON report.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    numerics: Numerics,
}

#[derive(Args)]
struct CampaignArgs {
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    dim: Vec<usize>,
    /// Ranks of A, comma separated: integers, `full`, `n-1` or `half`.
    #[arg(long, value_delimiter = ',', default_value = "full")]
    rank: Vec<RankPattern>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "generic")]
    family: Family,
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value = "1e-8")]
    tol: f64,
    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    output: Format,
    /// Report path; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    numerics: Numerics,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => compute(&args),
        Command::Verify(args) => verify(&args),
        Command::Campaign(args) => campaign(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(path: &Path) -> Result<(SemiHilbertSpace, shnr::io::Operators), CliError> {
    let ops = read_operator_file(path)?;
    let sp = SemiHilbertSpace::with_default_tol(&ops.a)?;
    Ok((sp, ops))
}

fn compute(args: &ComputeArgs) -> Result<u8, CliError> {
    let (sp, ops) = load(&args.input)?;
    let scan = args.numerics.scan(ScanConfig::default().grid_points);
    let t = &ops.t;
    let line = match args.quantity {
        Quantity::NormA => format_scalar(op_seminorm(&sp, t)?),
        Quantity::WA => {
            let e = numerical_radius(&sp, t, &scan)?;
            format!("{} {}", format_scalar(e.lo), format_scalar(e.hi))
        }
        Quantity::Crawford => {
            let e = crawford_number(&sp, t, &scan)?;
            format!("{} {}", format_scalar(e.lo), format_scalar(e.hi))
        }
        Quantity::Dist => {
            let d = nearest_scalar(&sp, t, &scan)?;
            format!("{} {}", format_scalar(d.lower_bound), format_scalar(d.value))
        }
        Quantity::Gap => {
            let g = gap_bound(&sp, t, &scan)?;
            format!("{} {}", format_scalar(g.lhs), format_scalar(g.rhs))
        }
        Quantity::Cos | Quantity::Sin => {
            let c = cosine_of_angle_with(&sp, t, &args.numerics.cos())?;
            if !c.certified {
                eprintln!("note: heuristic estimate from {} starts", c.starts_used);
            }
            let v = if matches!(args.quantity, Quantity::Cos) { c.value } else { sine_from_cosine(c.value) };
            format_scalar(v)
        }
        Quantity::Adjoint => {
            let m = sp.sharp(t)?;
            serde_json::to_string(&MatrixJson::from_matrix(&m)).map_err(|e| CliError::input(e.to_string()))?
        }
    };
    println!("{line}");
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let (sp, ops) = load(&args.input)?;
    if args.suite.arity() >= 2 && ops.s.is_none() {
        return Err(CliError::input(format!("suite {} requires S", args.suite.name())));
    }
    let cfg = args.numerics.certify(args.tol, ScanConfig::default().grid_points);
    let mut operands = Operands::new(ops.t.clone());
    operands.s = ops.s.clone();
    operands.r = ops.r.clone();
    let rep = run_suite(args.suite, &sp, &operands, &cfg)?;
    let records = rep.certificates.iter().map(|c| Record::new(c, sp.dim(), sp.rank(), None)).collect();
    let metadata = Metadata {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command: "verify",
        seed: None,
        config: ConfigEcho {
            suite: args.suite.name().to_string(),
            tol: cfg.tol,
            grid_points: cfg.scan.grid_points,
            refine_tol: cfg.scan.refine_tol,
            cos_starts: cfg.cos.starts,
            input: Some(args.input.display().to_string()),
            family: None,
            dims: Vec::new(),
            ranks: Vec::new(),
            trials: None,
        },
    };
    let report = Report::new(metadata, records);
    write_atomically(&args.output, &report.to_json()?)?;
    println!("{}", report.summary_line());
    Ok(if report.counts.fail > 0 { 1 } else { 0 })
}

fn campaign(args: &CampaignArgs) -> Result<u8, CliError> {
    let cfg = CampaignConfig {
        dims: args.dim.clone(),
        ranks: args.rank.clone(),
        trials: args.trials,
        seed: args.seed,
        family: args.family,
        suite: args.suite,
        certify: args.numerics.certify(args.tol, CAMPAIGN_GRID),
    };
    let report = run_campaign(&cfg, threads_from_env()?)?;
    let bytes = match args.output {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    };
    match &args.report {
        Some(path) => write_atomically(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    eprintln!("{}", report.summary_line());
    Ok(if report.counts.fail > 0 { 1 } else { 0 })
}
