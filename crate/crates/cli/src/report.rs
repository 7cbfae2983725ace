//! Report schema shared by `verify` and `campaign`.

use serde::Serialize;
use shnr_core::certify::{Certificate, Chain, Verdict};

use crate::error::CliError;

pub const TOOL: &str = "shnr";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub records: Vec<Record>,
    pub aggregate: Vec<Aggregate>,
    pub counts: Counts,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: ConfigEcho,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub suite: String,
    pub tol: f64,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub cos_starts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dims: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ranks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermRecord {
    pub label: String,
    pub value: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainRecord {
    pub label: String,
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_allowance: Option<f64>,
    pub terms: Vec<TermRecord>,
    pub slacks: Vec<f64>,
}

/// One certificate of one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub dim: usize,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    pub id: &'static str,
    pub verdict: &'static str,
    pub tol: f64,
    pub scale: f64,
    pub min_slack: f64,
    pub terms: Vec<TermRecord>,
    pub slacks: Vec<f64>,
    /// All chains, when there is more than the deciding one.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub chains: Vec<ChainRecord>,
    pub notes: Vec<String>,
}

fn terms_of(terms: &[shnr_core::certify::Term]) -> Vec<TermRecord> {
    terms.iter().map(|t| TermRecord { label: t.label.clone(), value: t.value, certified: t.certified }).collect()
}

fn chain_record(c: &Chain) -> ChainRecord {
    ChainRecord {
        label: c.label.clone(),
        informational: c.informational,
        equality_allowance: c.equality_allowance,
        terms: terms_of(&c.terms),
        slacks: c.slacks.clone(),
    }
}

impl Record {
    pub fn new(cert: &Certificate, dim: usize, rank: usize, trial: Option<usize>) -> Self {
        Record {
            dim,
            rank,
            trial,
            id: cert.id.key(),
            verdict: cert.verdict.name(),
            tol: cert.tol,
            scale: cert.scale,
            min_slack: cert.min_slack(),
            terms: terms_of(&cert.terms),
            slacks: cert.slacks.clone(),
            chains: if cert.chains.len() > 1 { cert.chains.iter().map(chain_record).collect() } else { Vec::new() },
            notes: cert.notes.clone(),
        }
    }
}

/// Slack statistics of one entry over the trials of one `(dim, rank)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub dim: usize,
    pub rank: usize,
    pub id: &'static str,
    pub records: usize,
    pub min_slack: f64,
    pub mean_slack: f64,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

impl Counts {
    fn add(&mut self, verdict: &str) {
        match verdict {
            v if v == Verdict::Pass.name() => self.pass += 1,
            v if v == Verdict::Fail.name() => self.fail += 1,
            _ => self.inconclusive += 1,
        }
    }
}

impl Report {
    /// Builds aggregates and counts; record order is kept as given.
    pub fn new(metadata: Metadata, records: Vec<Record>) -> Self {
        let mut aggregate: Vec<Aggregate> = Vec::new();
        let mut counts = Counts::default();
        for r in &records {
            counts.add(r.verdict);
            let pos = aggregate.iter().position(|a| a.dim == r.dim && a.rank == r.rank && a.id == r.id);
            let a = match pos {
                Some(i) => &mut aggregate[i],
                None => {
                    aggregate.push(Aggregate {
                        dim: r.dim,
                        rank: r.rank,
                        id: r.id,
                        records: 0,
                        min_slack: f64::INFINITY,
                        mean_slack: 0.0,
                        pass: 0,
                        fail: 0,
                        inconclusive: 0,
                    });
                    aggregate.last_mut().unwrap()
                }
            };
            a.records += 1;
            a.min_slack = a.min_slack.min(r.min_slack);
            a.mean_slack += r.min_slack;
            let mut c = Counts::default();
            c.add(r.verdict);
            a.pass += c.pass;
            a.fail += c.fail;
            a.inconclusive += c.inconclusive;
        }
        for a in &mut aggregate {
            a.mean_slack /= a.records as f64;
        }
        Report { metadata, records, aggregate, counts }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} records: {} PASS, {} FAIL, {} INCONCLUSIVE",
            self.records.len(),
            self.counts.pass,
            self.counts.fail,
            self.counts.inconclusive
        )
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let mut out = serde_json::to_vec_pretty(self).map_err(|e| CliError::input(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    /// One row per record followed by one row per aggregate; terms and
    /// slacks are `;`-joined.
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::input(e.to_string());
        for r in &self.records {
            w.serialize(CsvRow {
                kind: "record",
                dim: r.dim,
                rank: r.rank,
                trial: r.trial,
                id: r.id,
                verdict: Some(r.verdict),
                records: None,
                min_slack: r.min_slack,
                mean_slack: None,
                scale: Some(r.scale),
                pass: None,
                fail: None,
                inconclusive: None,
                terms: r.terms.iter().map(|t| format!("{}={}", t.label, t.value)).collect::<Vec<_>>().join(";"),
                slacks: r.slacks.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
                notes: r.notes.join(";"),
            })
            .map_err(csv_err)?;
        }
        for a in &self.aggregate {
            w.serialize(CsvRow {
                kind: "aggregate",
                dim: a.dim,
                rank: a.rank,
                trial: None,
                id: a.id,
                verdict: None,
                records: Some(a.records),
                min_slack: a.min_slack,
                mean_slack: Some(a.mean_slack),
                scale: None,
                pass: Some(a.pass),
                fail: Some(a.fail),
                inconclusive: Some(a.inconclusive),
                terms: String::new(),
                slacks: String::new(),
                notes: String::new(),
            })
            .map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::input(e.to_string()))
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    kind: &'static str,
    dim: usize,
    rank: usize,
    trial: Option<usize>,
    id: &'a str,
    verdict: Option<&'a str>,
    records: Option<usize>,
    min_slack: f64,
    mean_slack: Option<f64>,
    scale: Option<f64>,
    pass: Option<usize>,
    fail: Option<usize>,
    inconclusive: Option<usize>,
    terms: String,
    slacks: String,
    notes: String,
}
