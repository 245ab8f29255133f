use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::Variant;
use crate::coloring::{color_class, rainbow_relabel, run_col, run_col_orient, Color, ColoringResult};
use crate::cycle_merger::{default_max_paths, default_rounds, patchwork_hamilton, split_pools, PatchworkInput};
use crate::graph::{Arc, Digraph, Vertex};
use crate::minor::hide_bad;
use crate::one_factor::{find_one_factor, good_core, select_candidates};
use crate::process::{ArcSchedule, ProcessParams};
use crate::verify::{verify_color_degree, verify_monochromatic, verify_rainbow, Verdict};
use crate::Result;

/// Where a color's run ended. Exactly one per color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    ColorDegreeMiss,
    HidebadFail,
    Deficiency,
    NoMatching,
    Phase2Short,
    Phase3Fail,
    /// The lifted cycle failed independent verification.
    VerifyFail,
}

impl Outcome {
    pub const ALL: [Outcome; 8] = [
        Outcome::Success,
        Outcome::ColorDegreeMiss,
        Outcome::HidebadFail,
        Outcome::Deficiency,
        Outcome::NoMatching,
        Outcome::Phase2Short,
        Outcome::Phase3Fail,
        Outcome::VerifyFail,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::ColorDegreeMiss => "color-degree-miss",
            Outcome::HidebadFail => "hidebad-fail",
            Outcome::Deficiency => "deficiency",
            Outcome::NoMatching => "no-matching",
            Outcome::Phase2Short => "phase2-short",
            Outcome::Phase3Fail => "phase3-fail",
            Outcome::VerifyFail => "verify-fail",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Outcome {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| crate::Error::InvalidInput(format!("unknown outcome {s:?}")))
    }
}

/// Per-color diagnostics. Fields past the failing stage keep their defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorRecord {
    /// 0-based color.
    pub color: Color,
    pub outcome: Outcome,
    /// BAD vertex HideBad could not place.
    pub starved_vertex: Option<Vertex>,
    pub minor_n: usize,
    pub deficient: usize,
    pub factor_cycles: usize,
    pub merges: usize,
    pub phase2_cycles: usize,
    pub phase2_largest: usize,
    pub rounds: usize,
    pub frontier_peak: usize,
    pub verdict: Option<Verdict>,
}

impl ColorRecord {
    fn new(color: Color, outcome: Outcome) -> Self {
        ColorRecord {
            color,
            outcome,
            starved_vertex: None,
            minor_n: 0,
            deficient: 0,
            factor_cycles: 0,
            merges: 0,
            phase2_cycles: 0,
            phase2_largest: 0,
            rounds: 0,
            frontier_peak: 0,
            verdict: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub q: usize,
    pub variant: Variant,
    pub trial: usize,
    pub seed: u64,
    pub tau: usize,
    pub bad: usize,
    pub small: usize,
    pub e_prime: usize,
    pub degenerate: bool,
    pub color_degree_ok: bool,
    pub colors: Vec<ColorRecord>,
    pub success: bool,
    /// Wall time of the trial in microseconds; the only nondeterministic field.
    pub wall_us: u64,
}

impl TrialRecord {
    /// Copy with the wall time zeroed, for determinism comparisons.
    pub fn masked(&self) -> TrialRecord {
        TrialRecord {
            wall_us: 0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub record: TrialRecord,
    pub coloring: ColoringResult,
    /// Per color, the verified Hamilton cycle in original labels.
    pub cycles: Vec<Option<Vec<Vertex>>>,
    /// Per-arc colors used for rainbow verification (rainbow variant only).
    pub rainbow_colors: Option<Vec<Color>>,
}

/// Whether the exchange phase left a cycle at least `m - m/sqrt(ln m)` long.
fn phase2_long_enough(largest: usize, m: usize) -> bool {
    let m = m as f64;
    let ln = m.ln();
    if ln <= 0.0 {
        return true;
    }
    largest as f64 >= m - m / ln.sqrt()
}

/// One color through HideBad, Phase 1, the pool split, Phases 2 and 3, the
/// lift and verification.
///
/// `core` marks `V*` (see [`good_core`]). With `rainbow` set, the lifted
/// cycle is verified as rainbow under those per-arc colors instead of as
/// monochromatic in `c`. `rng` is used only for the pool split.
pub fn extract_color_cycle<R: Rng + ?Sized>(
    coloring: &ColoringResult,
    params: &ProcessParams,
    core: &[bool],
    c: Color,
    rainbow: Option<&[Color]>,
    rng: &mut R,
) -> (ColorRecord, Option<Vec<Vertex>>) {
    let n = coloring.n;
    let class_arcs: Vec<Arc> = coloring
        .arcs
        .iter()
        .zip(&coloring.colors)
        .filter(|&(_, &col)| col == c)
        .map(|(&a, _)| a)
        .collect();
    if !verify_color_degree(n, 1, &class_arcs, &vec![0; class_arcs.len()]).pass {
        return (ColorRecord::new(c, Outcome::ColorDegreeMiss), None);
    }
    let dc = color_class(coloring, c).expect("color is in range");
    let map = match hide_bad(&dc, &coloring.bad, &coloring.small) {
        Ok(m) => m,
        Err(f) => {
            let mut rec = ColorRecord::new(c, Outcome::HidebadFail);
            rec.starved_vertex = Some(f.vertex);
            return (rec, None);
        }
    };
    let mut rec = ColorRecord::new(c, Outcome::Success);
    let m = map.minor_n();
    rec.minor_n = m;
    let cands = select_candidates(coloring, &map, core, c, params.k);
    rec.deficient = cands.deficient().len();
    let factor = match find_one_factor(&cands) {
        Ok(f) => f,
        Err(_) => {
            rec.outcome = if rec.deficient > 0 {
                Outcome::Deficiency
            } else {
                Outcome::NoMatching
            };
            return (rec, None);
        }
    };
    rec.factor_cycles = factor.cycles().len();

    let m3 = coloring.marks[2].min(coloring.tau);
    let minor_arcs = |range: &[usize]| -> Vec<Arc> {
        range
            .iter()
            .filter(|&&i| coloring.colors[i] == c)
            .filter_map(|&i| map.surviving_arc(coloring.arcs[i]))
            .collect()
    };
    let before: Vec<usize> = (0..m3).collect();
    let forbidden = Digraph::from_arcs(m, minor_arcs(&before));
    let pool = minor_arcs(&coloring.e_prime);
    let (e2, e3) = split_pools(m, &pool, rng);
    let mut input = PatchworkInput::new(factor, forbidden, e2, e3).expect("sizes agree");
    input.rounds = params.rotation_rounds.unwrap_or_else(|| default_rounds(m));
    input.max_paths = params.max_paths.unwrap_or_else(|| default_max_paths(m)).max(1);

    let minor_cycle = match patchwork_hamilton(&input) {
        Ok((cycle, st)) => {
            rec.merges = st.merges;
            rec.phase2_cycles = st.phase2_cycles;
            rec.phase2_largest = st.phase2_largest;
            rec.rounds = st.rounds;
            rec.frontier_peak = st.frontier_peak;
            cycle
        }
        Err(f) => {
            rec.merges = f.stats.merges;
            rec.phase2_cycles = f.stats.phase2_cycles;
            rec.phase2_largest = f.stats.phase2_largest;
            rec.rounds = f.stats.rounds;
            rec.frontier_peak = f.stats.frontier_peak;
            rec.outcome = if phase2_long_enough(f.stats.phase2_largest, m) {
                Outcome::Phase3Fail
            } else {
                Outcome::Phase2Short
            };
            return (rec, None);
        }
    };
    let lifted = match map.lift_hamilton_cycle(&minor_cycle) {
        Ok(c) => c,
        Err(_) => {
            rec.outcome = Outcome::VerifyFail;
            return (rec, None);
        }
    };
    let verdict = match rainbow {
        Some(colors) => verify_rainbow(&lifted, n, &coloring.arcs, colors),
        None => verify_monochromatic(&lifted, n, &coloring.arcs, &coloring.colors, c),
    };
    let ok = verdict.pass;
    rec.verdict = Some(verdict);
    if !ok {
        rec.outcome = Outcome::VerifyFail;
        return (rec, None);
    }
    (rec, Some(lifted))
}

/// Colors `schedule` online and extracts one Hamilton cycle per color.
///
/// `rng` drives the coloring first and then the pool splits, color by color.
/// Stage failures are recorded in the output, never raised; errors come only
/// from invalid parameters or schedules.
pub fn run_pipeline<R: Rng + ?Sized>(
    schedule: &ArcSchedule,
    params: &ProcessParams,
    variant: Variant,
    trial: usize,
    rng: &mut R,
) -> Result<PipelineOutput> {
    let start = std::time::Instant::now();
    if variant.process_mode() != schedule.mode {
        return Err(crate::Error::InvalidInput(format!(
            "{variant} trials need a {} schedule",
            variant.process_mode()
        )));
    }
    if variant == Variant::Rainbow && params.q != 1 {
        return Err(crate::Error::InvalidParameter("rainbow trials use q = 1".into()));
    }
    let coloring = match variant {
        Variant::Directed => run_col(schedule, params, rng)?,
        Variant::Undirected | Variant::Rainbow => run_col_orient(schedule, params, rng)?,
    };
    let rainbow_colors = match variant {
        Variant::Rainbow => Some(rainbow_relabel(&coloring)?),
        _ => None,
    };
    let core = good_core(&coloring.digraph(), &coloring.bad);
    let mut colors = Vec::with_capacity(params.q);
    let mut cycles = Vec::with_capacity(params.q);
    for c in 0..params.q as Color {
        let (rec, cycle) = extract_color_cycle(&coloring, params, &core, c, rainbow_colors.as_deref(), rng);
        colors.push(rec);
        cycles.push(cycle);
    }
    let success = colors.iter().all(|r| r.outcome == Outcome::Success);
    let record = TrialRecord {
        n: schedule.n,
        q: params.q,
        variant,
        trial,
        seed: schedule.seed,
        tau: coloring.tau,
        bad: coloring.bad.len(),
        small: coloring.small.len(),
        e_prime: coloring.e_prime.len(),
        degenerate: coloring.degenerate,
        color_degree_ok: coloring.color_degree_ok,
        colors,
        success,
        wall_us: start.elapsed().as_micros() as u64,
    };
    Ok(PipelineOutput {
        record,
        coloring,
        cycles,
        rainbow_colors,
    })
}
