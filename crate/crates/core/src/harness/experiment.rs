use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::pipeline::{run_pipeline, PipelineOutput, TrialRecord};
use super::report::{records_to_rows, CsvRow};
use crate::process::ArcSchedule;
use crate::rng::{derive_seed, rng_for, stream, trial_seed};
use crate::verify::{verify_monochromatic, verify_rainbow, write_cycle_text};
use crate::{Error, Result};

/// Runs trial `trial` of the `(n, q)` cell of `config`.
pub fn run_trial(config: &ExperimentConfig, n: usize, q: usize, trial: usize) -> Result<PipelineOutput> {
    let params = config.params_for(q);
    let seed = trial_seed(config.seed, n, q, trial);
    let (schedule, _) = ArcSchedule::through_hitting_time(n, config.variant.process_mode(), seed, q)?;
    let mut rng = rng_for(seed, stream::COLORING);
    run_pipeline(&schedule, &params, config.variant, trial, &mut rng)
}

/// File stem of a trial's artifacts.
pub fn artifact_stem(n: usize, q: usize, trial: usize) -> String {
    format!("n{n}-q{q}-t{trial}")
}

/// Writes `<stem>.coloring` and one `<stem>.c<color>.cycle` per found cycle.
fn write_artifacts(dir: &Path, out: &PipelineOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let r = &out.record;
    let stem = artifact_stem(r.n, r.q, r.trial);
    let mut w = BufWriter::new(File::create(dir.join(format!("{stem}.coloring")))?);
    out.coloring.write_text(&mut w)?;
    w.flush()?;
    for (c, cycle) in out.cycles.iter().enumerate() {
        if let Some(cycle) = cycle {
            let color = out.rainbow_colors.is_none().then_some(c as u32);
            let mut w = BufWriter::new(File::create(dir.join(format!("{stem}.c{}.cycle", c + 1)))?);
            write_cycle_text(&mut w, cycle, color)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Aggregates for one `(n, q)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub q: usize,
    pub trials: usize,
    pub tau_mean: f64,
    pub tau_median: f64,
    pub tau_p10: f64,
    pub tau_p90: f64,
    /// Median of `tau / (n ln n)`.
    pub tau_norm_median: f64,
    pub success_rate: f64,
    pub color_degree_rate: f64,
    pub degenerate: usize,
    /// Outcome name to number of (trial, color) pairs.
    pub outcomes: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Vec<GroupSummary>,
    /// Successful trials re-run and re-verified from raw artifacts.
    pub reverified: usize,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summaries per `(n, q)`, computed from flat rows only so that the same
/// function serves in-memory records and re-read CSV files.
pub fn summarize(rows: &[CsvRow]) -> Vec<GroupSummary> {
    // (n, q) -> trial -> rows of that trial
    let mut groups: BTreeMap<(usize, usize), BTreeMap<usize, Vec<&CsvRow>>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.n, r.q))
            .or_default()
            .entry(r.trial)
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((n, q), trials)| {
            let firsts: Vec<&CsvRow> = trials.values().map(|v| v[0]).collect();
            let k = firsts.len();
            let mut taus: Vec<f64> = firsts.iter().map(|r| r.tau as f64).collect();
            taus.sort_by(f64::total_cmp);
            let nln = n as f64 * (n as f64).ln();
            let mut outcomes = BTreeMap::new();
            for r in trials.values().flatten() {
                *outcomes.entry(r.outcome.clone()).or_insert(0) += 1;
            }
            GroupSummary {
                n,
                q,
                trials: k,
                tau_mean: taus.iter().sum::<f64>() / k as f64,
                tau_median: quantile(&taus, 0.5),
                tau_p10: quantile(&taus, 0.1),
                tau_p90: quantile(&taus, 0.9),
                tau_norm_median: quantile(&taus, 0.5) / nln,
                success_rate: firsts.iter().filter(|r| r.trial_success).count() as f64 / k as f64,
                color_degree_rate: firsts.iter().filter(|r| r.color_degree_ok).count() as f64 / k as f64,
                degenerate: firsts.iter().filter(|r| r.degenerate).count(),
                outcomes,
            }
        })
        .collect()
}

/// Whether trial `seed` is in the 1% re-verification sample.
fn sampled_for_reverify(seed: u64) -> bool {
    derive_seed(seed, &[0x7265_7665_7269_6679]).is_multiple_of(100)
}

/// Re-runs a trial from its seed and re-checks every cycle against the raw
/// coloring. The rerun must reproduce the record exactly (wall time aside).
fn reverify(config: &ExperimentConfig, rec: &TrialRecord) -> Result<()> {
    let again = run_trial(config, rec.n, rec.q, rec.trial)?;
    if again.record.masked() != rec.masked() {
        return Err(Error::InvalidInput(format!(
            "trial (n={}, q={}, trial={}) did not reproduce",
            rec.n, rec.q, rec.trial
        )));
    }
    let col = &again.coloring;
    for (c, cycle) in again.cycles.iter().enumerate() {
        let cycle = cycle
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("successful trial lost a cycle".into()))?;
        let v = match &again.rainbow_colors {
            Some(rc) => verify_rainbow(cycle, col.n, &col.arcs, rc),
            None => verify_monochromatic(cycle, col.n, &col.arcs, &col.colors, c as u32),
        };
        if !v.pass {
            return Err(Error::InvalidInput(format!(
                "re-verification failed for trial {}: {}",
                rec.trial,
                v.violation.expect("failing verdict has a witness")
            )));
        }
    }
    Ok(())
}

/// Runs every `(n, q, trial)` in parallel (trial granularity), sorts the
/// records by `(n, q, trial)`, re-verifies a 1% sample of successes and
/// aggregates.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let tasks: Vec<(usize, usize, usize)> = config
        .ns
        .iter()
        .flat_map(|&n| {
            config
                .qs
                .iter()
                .flat_map(move |&q| (0..config.trials).map(move |t| (n, q, t)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut records: Vec<TrialRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, q, t)| {
                let out = run_trial(config, n, q, t)?;
                if let (true, Some(dir)) = (config.artifacts, &config.out) {
                    write_artifacts(&dir.join("artifacts"), &out)?;
                }
                Ok(out.record)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by_key(|r| (r.n, r.q, r.trial));

    let successes: Vec<&TrialRecord> = records.iter().filter(|r| r.success).collect();
    let mut sample: Vec<&TrialRecord> = successes
        .iter()
        .copied()
        .filter(|r| sampled_for_reverify(r.seed))
        .collect();
    if sample.is_empty() {
        sample.extend(successes.first().copied());
    }
    pool.install(|| sample.par_iter().try_for_each(|r| reverify(config, r)))?;

    let summary = summarize(&records_to_rows(&records));
    Ok(ExperimentReport {
        config: config.clone(),
        reverified: sample.len(),
        records,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let d = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&d, 0.5), 2.5);
        assert_eq!(quantile(&d, 0.0), 1.0);
        assert_eq!(quantile(&d, 1.0), 4.0);
        assert_eq!(quantile(&[7.0], 0.9), 7.0);
    }

    #[test]
    fn single_trial_matches_pipeline() {
        let config = ExperimentConfig {
            ns: vec![60],
            qs: vec![1],
            trials: 1,
            seed: 3,
            jobs: 1,
            ..Default::default()
        };
        let rep = run_experiment(&config).unwrap();
        assert_eq!(rep.records.len(), 1);
        let direct = run_trial(&config, 60, 1, 0).unwrap().record;
        assert_eq!(rep.records[0].masked(), direct.masked());
    }
}
