//! Random campaigns: ensembles crossed with the certificate registry.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use shnr_core::certify::{run_suite, CertifyConfig, Operands, Suite};
use shnr_core::ensembles::{gen_instance, EnsembleSpec, Family};

use crate::error::CliError;
use crate::report::{ConfigEcho, Metadata, Record, Report, TOOL};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "SHNR_THREADS";

/// Rank of `A` as a function of the dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankPattern {
    Full,
    /// `n - 1`, at least 1.
    MinusOne,
    /// `ceil(n / 2)`.
    Half,
    Fixed(usize),
}

impl RankPattern {
    pub fn resolve(self, dim: usize) -> usize {
        match self {
            RankPattern::Full => dim,
            RankPattern::MinusOne => dim.saturating_sub(1).max(1),
            RankPattern::Half => dim.div_ceil(2),
            RankPattern::Fixed(r) => r,
        }
    }
}

impl FromStr for RankPattern {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "full" => Ok(RankPattern::Full),
            "n-1" => Ok(RankPattern::MinusOne),
            "half" => Ok(RankPattern::Half),
            _ => s
                .parse()
                .map(RankPattern::Fixed)
                .map_err(|_| CliError::input(format!("rank `{s}`: expected an integer, full, n-1 or half"))),
        }
    }
}

impl fmt::Display for RankPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankPattern::Full => f.write_str("full"),
            RankPattern::MinusOne => f.write_str("n-1"),
            RankPattern::Half => f.write_str("half"),
            RankPattern::Fixed(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub dims: Vec<usize>,
    pub ranks: Vec<RankPattern>,
    pub trials: usize,
    pub seed: u64,
    pub family: Family,
    pub suite: Suite,
    pub certify: CertifyConfig,
}

impl CampaignConfig {
    /// Distinct `(dim, rank)` cells in flag order, each validated.
    pub fn cells(&self) -> Result<Vec<EnsembleSpec>, CliError> {
        if self.dims.is_empty() || self.ranks.is_empty() {
            return Err(CliError::input("at least one dim and one rank are needed"));
        }
        let mut cells: Vec<EnsembleSpec> = Vec::new();
        for &dim in &self.dims {
            for pattern in &self.ranks {
                let spec = EnsembleSpec {
                    dim,
                    rank: pattern.resolve(dim),
                    trials: self.trials,
                    seed: self.seed,
                    family: self.family,
                };
                spec.validate().map_err(|e| CliError::input(format!("dim {dim}, rank {pattern}: {e}")))?;
                if !cells.contains(&spec) {
                    cells.push(spec);
                }
            }
        }
        Ok(cells)
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            suite: self.suite.name().to_string(),
            tol: self.certify.tol,
            grid_points: self.certify.scan.grid_points,
            refine_tol: self.certify.scan.refine_tol,
            cos_starts: self.certify.cos.starts,
            input: None,
            family: Some(self.family.name().to_string()),
            dims: self.dims.clone(),
            ranks: self.ranks.iter().map(ToString::to_string).collect(),
            trials: Some(self.trials),
        }
    }
}

/// Worker count from [`THREADS_ENV`]; `None` means one per core.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::input(format!("{THREADS_ENV}={v}: expected a positive integer"))),
        },
        Err(e) => Err(CliError::input(format!("{THREADS_ENV}: {e}"))),
    }
}

fn run_trial(spec: &EnsembleSpec, trial: usize, cfg: &CampaignConfig) -> Result<Vec<Record>, CliError> {
    let inst = gen_instance(spec, trial)?;
    let ops = Operands::new(inst.t).with_s(inst.s).with_r(inst.r);
    let rep = run_suite(cfg.suite, &inst.space, &ops, &cfg.certify)?;
    Ok(rep.certificates.iter().map(|c| Record::new(c, spec.dim, spec.rank, Some(trial))).collect())
}

/// Runs every trial of every cell. Records come out in (cell, trial,
/// registry) order whatever the thread count.
pub fn run_campaign(cfg: &CampaignConfig, threads: Option<usize>) -> Result<Report, CliError> {
    cfg.certify.validate()?;
    let cells = cfg.cells()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::input(format!("thread pool: {e}")))?;
    let per_trial: Vec<Result<Vec<Record>, CliError>> =
        pool.install(|| jobs.par_iter().map(|&(c, t)| run_trial(&cells[c], t, cfg)).collect());
    let mut records = Vec::with_capacity(jobs.len() * 22);
    for r in per_trial {
        records.extend(r?);
    }
    let metadata = Metadata {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command: "campaign",
        seed: Some(cfg.seed),
        config: cfg.echo(),
    };
    Ok(Report::new(metadata, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_patterns() {
        assert_eq!("half".parse::<RankPattern>().unwrap().resolve(5), 3);
        assert_eq!("n-1".parse::<RankPattern>().unwrap().resolve(1), 1);
        assert_eq!("3".parse::<RankPattern>().unwrap().resolve(6), 3);
        assert!("most".parse::<RankPattern>().is_err());
    }

    #[test]
    fn cells_are_deduplicated() {
        let cfg = CampaignConfig {
            dims: vec![2, 3],
            ranks: vec![RankPattern::Full, RankPattern::MinusOne, RankPattern::Half],
            trials: 1,
            seed: 0,
            family: Family::Generic,
            suite: Suite::All,
            certify: CertifyConfig::default(),
        };
        let cells: Vec<(usize, usize)> = cfg.cells().unwrap().iter().map(|s| (s.dim, s.rank)).collect();
        assert_eq!(cells, vec![(2, 2), (2, 1), (3, 3), (3, 2)]);
    }
}
