use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::experiment::{ExperimentReport, GroupSummary};
use super::pipeline::TrialRecord;
use crate::rng::RNG_ALGORITHM;
use crate::{Error, Result};

/// Bumped whenever a column is added, removed, renamed or reordered.
pub const SCHEMA_VERSION: u32 = 1;

/// CSV columns, in file order.
pub const CSV_COLUMNS: [&str; 25] = [
    "n",
    "q",
    "variant",
    "trial",
    "seed",
    "tau",
    "bad",
    "small",
    "e_prime",
    "degenerate",
    "color_degree_ok",
    "trial_success",
    "color",
    "outcome",
    "starved_vertex",
    "minor_n",
    "deficient",
    "factor_cycles",
    "merges",
    "phase2_cycles",
    "phase2_largest",
    "rounds",
    "frontier_peak",
    "verdict",
    "wall_us",
];

/// One CSV row: a (trial, color) pair. Colors and vertices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub n: usize,
    pub q: usize,
    pub variant: String,
    pub trial: usize,
    pub seed: u64,
    pub tau: usize,
    pub bad: usize,
    pub small: usize,
    pub e_prime: usize,
    pub degenerate: bool,
    pub color_degree_ok: bool,
    pub trial_success: bool,
    pub color: u32,
    pub outcome: String,
    pub starved_vertex: Option<u32>,
    pub minor_n: usize,
    pub deficient: usize,
    pub factor_cycles: usize,
    pub merges: usize,
    pub phase2_cycles: usize,
    pub phase2_largest: usize,
    pub rounds: usize,
    pub frontier_peak: usize,
    /// `pass`, `fail`, or empty when verification was not reached.
    pub verdict: String,
    pub wall_us: u64,
}

pub fn records_to_rows(records: &[TrialRecord]) -> Vec<CsvRow> {
    records
        .iter()
        .flat_map(|r| {
            r.colors.iter().map(move |c| CsvRow {
                n: r.n,
                q: r.q,
                variant: r.variant.to_string(),
                trial: r.trial,
                seed: r.seed,
                tau: r.tau,
                bad: r.bad,
                small: r.small,
                e_prime: r.e_prime,
                degenerate: r.degenerate,
                color_degree_ok: r.color_degree_ok,
                trial_success: r.success,
                color: c.color + 1,
                outcome: c.outcome.to_string(),
                starved_vertex: c.starved_vertex.map(|v| v + 1),
                minor_n: c.minor_n,
                deficient: c.deficient,
                factor_cycles: c.factor_cycles,
                merges: c.merges,
                phase2_cycles: c.phase2_cycles,
                phase2_largest: c.phase2_largest,
                rounds: c.rounds,
                frontier_peak: c.frontier_peak,
                verdict: match &c.verdict {
                    None => String::new(),
                    Some(v) if v.pass => "pass".into(),
                    Some(_) => "fail".into(),
                },
                wall_us: r.wall_us,
            })
        })
        .collect()
}

/// Writes `# schema_version=N`, the header, then one row per (trial, color).
pub fn write_csv<W: Write>(records: &[TrialRecord], mut w: W) -> Result<()> {
    writeln!(w, "# schema_version={SCHEMA_VERSION}")?;
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(CSV_COLUMNS)?;
    for row in records_to_rows(records) {
        wr.serialize(row)?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`], checking the schema line and header.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<CsvRow>> {
    let mut r = BufReader::new(r);
    let mut first = String::new();
    r.read_line(&mut first)?;
    let want = format!("# schema_version={SCHEMA_VERSION}");
    if first.trim_end() != want {
        return Err(Error::parse(
            1,
            format!("expected `{want}`, found `{}`", first.trim_end()),
        ));
    }
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rd.headers()?.clone();
    if !header.iter().eq(CSV_COLUMNS.iter().copied()) {
        return Err(Error::parse(2, "CSV header does not match the schema"));
    }
    rd.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct JsonReport {
    schema_version: u32,
    rng: String,
    #[serde(flatten)]
    report: ExperimentReport,
}

pub fn write_json<W: Write>(report: &ExperimentReport, w: W) -> Result<()> {
    let doc = JsonReport {
        schema_version: SCHEMA_VERSION,
        rng: RNG_ALGORITHM.to_string(),
        report: report.clone(),
    };
    serde_json::to_writer_pretty(w, &doc)?;
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<ExperimentReport> {
    let doc: JsonReport = serde_json::from_reader(r)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported schema_version {}",
            doc.schema_version
        )));
    }
    Ok(doc.report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Both,
}

/// Writes `records.csv` and/or `report.json` into `dir` and returns the paths.
pub fn emit_report(report: &ExperimentReport, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    if matches!(format, ReportFormat::Csv | ReportFormat::Both) {
        let p = dir.join("records.csv");
        let mut w = BufWriter::new(File::create(&p)?);
        write_csv(&report.records, &mut w)?;
        w.flush()?;
        paths.push(p);
    }
    if matches!(format, ReportFormat::Json | ReportFormat::Both) {
        let p = dir.join("report.json");
        let mut w = BufWriter::new(File::create(&p)?);
        write_json(report, &mut w)?;
        w.flush()?;
        paths.push(p);
    }
    Ok(paths)
}

/// Re-aggregates a CSV file written by [`emit_report`].
pub fn summarize_csv<R: Read>(r: R) -> Result<Vec<GroupSummary>> {
    Ok(super::experiment::summarize(&read_csv(r)?))
}
