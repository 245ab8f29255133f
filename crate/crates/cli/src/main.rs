//! `hamcolor`: run coloring experiments, the standalone cycle-merging
//! engine, verification of saved artifacts, and re-aggregation of CSVs.
//!
//! Every flag can also be set through an environment variable named
//! `HAMCOLOR_<FLAG>` (upper case, dashes as underscores), e.g. `HAMCOLOR_JOBS=4`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hamcolor::coloring::{rainbow_relabel, ColoringResult};
use hamcolor::cycle_merger::{patchwork_hamilton, random_derangement, random_pools, split_pools, PatchworkInput};
use hamcolor::harness::{emit_report, run_experiment, summarize_csv, ExperimentConfig, ReportFormat, Variant};
use hamcolor::minor::{check_minor_criterion, ContractionMap};
use hamcolor::one_factor::OneFactor;
use hamcolor::process::{parse_arc_list, ProcessParams};
use hamcolor::rng::{rng_for, stream};
use hamcolor::verify::{
    read_cycle_text, verify_color_degree, verify_monochromatic, verify_rainbow, write_cycle_text, Verdict,
};
use hamcolor::Digraph;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "hamcolor",
    version,
    about = "Monochromatic Hamilton cycles in online-colored random digraph processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run full pipeline trials over a grid of n and q.
    Simulate(SimulateArgs),
    /// Merge a 1-factor into a Hamilton cycle with random arc pools.
    Hamilton(HamiltonArgs),
    /// Check saved cycles against a saved coloring; prints JSON verdicts.
    Verify(VerifyArgs),
    /// Re-aggregate a records CSV written by `simulate`.
    Stats(StatsArgs),
}

#[derive(Args)]
struct ParamArgs {
    /// Phase length factor: m_i = i * ceil(alpha * n * ln n).
    #[arg(long, env = "HAMCOLOR_ALPHA", default_value_t = 0.05)]
    alpha: f64,
    /// BAD threshold as a fraction of ln n.
    #[arg(long, env = "HAMCOLOR_EPS_FRAC", default_value_t = 0.02)]
    eps_frac: f64,
    /// SMALL threshold as a fraction of ln n.
    #[arg(long, env = "HAMCOLOR_SMALL_FRAC", default_value_t = 0.01)]
    small_frac: f64,
    /// Candidate arcs per vertex and direction.
    #[arg(long, env = "HAMCOLOR_K", default_value_t = 6)]
    k: usize,
    /// Rotation rounds per absorbed cycle (default: floor(ln n / ln ln n) + 2).
    #[arg(long, env = "HAMCOLOR_ROUNDS")]
    rounds: Option<usize>,
    /// Path frontier cap (default: 4n).
    #[arg(long, env = "HAMCOLOR_MAX_PATHS")]
    max_paths: Option<usize>,
}

impl ParamArgs {
    fn params(&self) -> ProcessParams {
        ProcessParams {
            q: 1,
            alpha: self.alpha,
            eps_frac: self.eps_frac,
            small_frac: self.small_frac,
            k: self.k,
            rotation_rounds: self.rounds,
            max_paths: self.max_paths,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Vertex counts, comma separated.
    #[arg(long, env = "HAMCOLOR_N", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Color counts, comma separated.
    #[arg(long, env = "HAMCOLOR_Q", value_delimiter = ',', default_value = "1")]
    q: Vec<usize>,
    #[arg(long, env = "HAMCOLOR_TRIALS", default_value_t = 10)]
    trials: usize,
    #[arg(long, env = "HAMCOLOR_SEED", default_value_t = 0)]
    seed: u64,
    /// directed, undirected or rainbow.
    #[arg(long, env = "HAMCOLOR_MODE", default_value = "directed")]
    mode: Variant,
    /// Output directory for records.csv and report.json.
    #[arg(long, env = "HAMCOLOR_OUT")]
    out: Option<PathBuf>,
    /// Also save every coloring and cycle under <out>/artifacts.
    #[arg(long, env = "HAMCOLOR_ARTIFACTS", requires = "out")]
    artifacts: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "HAMCOLOR_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct HamiltonArgs {
    /// Factor file (`v phi(v)` per line).
    #[arg(long, env = "HAMCOLOR_FACTOR", conflicts_with = "n")]
    factor: Option<PathBuf>,
    /// Use a uniformly random derangement on n vertices instead of a file.
    #[arg(long, env = "HAMCOLOR_N")]
    n: Option<usize>,
    /// Forbidden arcs (`tail head` per line, 1-based).
    #[arg(long, env = "HAMCOLOR_FORBIDDEN")]
    forbidden: Option<PathBuf>,
    /// Random arcs, split into the two pools by a fair coin per arc.
    #[arg(long, env = "HAMCOLOR_ARCS", conflicts_with = "density")]
    arcs: Option<PathBuf>,
    /// Per-pool arc density for generated pools (default ln n / 2n).
    #[arg(long, env = "HAMCOLOR_DENSITY")]
    density: Option<f64>,
    #[arg(long, env = "HAMCOLOR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "HAMCOLOR_ROUNDS")]
    rounds: Option<usize>,
    #[arg(long, env = "HAMCOLOR_MAX_PATHS")]
    max_paths: Option<usize>,
    /// Cycle output file (default: stdout).
    #[arg(long, env = "HAMCOLOR_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Coloring file.
    #[arg(long)]
    coloring: PathBuf,
    /// Cycle files; a `# color c` line selects the monochromatic check.
    #[arg(long = "cycle")]
    cycles: Vec<PathBuf>,
    /// Check cycles as rainbow under the tail-label relabeling.
    #[arg(long)]
    rainbow: bool,
    /// Contraction map file to re-check the endpoint criterion.
    #[arg(long, requires = "color")]
    map: Option<PathBuf>,
    /// Color (1-based) the contraction map was built for.
    #[arg(long)]
    color: Option<u32>,
}

#[derive(Args)]
struct StatsArgs {
    /// records.csv written by `simulate`.
    #[arg(long)]
    csv: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let config = ExperimentConfig {
        ns: a.n,
        qs: a.q,
        variant: a.mode,
        params: a.params.params(),
        trials: a.trials,
        seed: a.seed,
        out: a.out.clone(),
        artifacts: a.artifacts,
        jobs: a.jobs,
    };
    let report = run_experiment(&config)?;
    println!(
        "{:>6} {:>3} {:>6} {:>10} {:>8} {:>8} {:>8}  outcomes",
        "n", "q", "trials", "tau_med", "tau/nln", "success", "col_deg"
    );
    for s in &report.summary {
        let outcomes: Vec<String> = s.outcomes.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!(
            "{:>6} {:>3} {:>6} {:>10.1} {:>8.3} {:>8.3} {:>8.3}  {}",
            s.n,
            s.q,
            s.trials,
            s.tau_median,
            s.tau_norm_median,
            s.success_rate,
            s.color_degree_rate,
            outcomes.join(" ")
        );
    }
    println!("re-verified successes: {}", report.reverified);
    if let Some(dir) = &a.out {
        for p in emit_report(&report, dir, ReportFormat::Both)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn hamilton(a: HamiltonArgs) -> Result<()> {
    let factor = match (&a.factor, a.n) {
        (Some(p), _) => OneFactor::read_text(open(p)?)?,
        (None, Some(n)) => random_derangement(n, &mut rng_for(a.seed, stream::SCHEDULE))?,
        (None, None) => bail!("give --factor or --n"),
    };
    let n = factor.n();
    let forbidden = match &a.forbidden {
        Some(p) => Digraph::from_arcs(n, parse_arc_list(open(p)?, n)?),
        None => Digraph::empty(n),
    };
    let mut rng = rng_for(a.seed, stream::POOLS);
    let (e2, e3) = match &a.arcs {
        Some(p) => split_pools(n, &parse_arc_list(open(p)?, n)?, &mut rng),
        None => {
            let d = a.density.unwrap_or_else(|| (n as f64).ln() / (2.0 * n as f64));
            random_pools(n, d, &mut rng)?
        }
    };
    let mut input = PatchworkInput::new(factor, forbidden, e2, e3)?;
    if let Some(r) = a.rounds {
        input.rounds = r;
    }
    if let Some(m) = a.max_paths {
        input.max_paths = m;
    }
    match patchwork_hamilton(&input) {
        Ok((cycle, stats)) => {
            match &a.out {
                Some(p) => {
                    let mut w = BufWriter::new(File::create(p)?);
                    write_cycle_text(&mut w, &cycle, None)?;
                    w.flush()?;
                }
                None => write_cycle_text(std::io::stdout().lock(), &cycle, None)?,
            }
            eprintln!(
                "{}",
                serde_json::to_string(&json!({ "success": true, "stats": stats }))?
            );
            Ok(())
        }
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&json!({ "success": false, "failure": f }))?);
            bail!("{f}")
        }
    }
}

fn verify(a: VerifyArgs) -> Result<()> {
    let col = ColoringResult::read_text(open(&a.coloring)?)?;
    let mut out = Vec::new();
    let cd = verify_color_degree(col.n, col.q, &col.arcs, &col.colors);
    out.push(json!({ "check": "color-degree", "verdict": cd }));
    let rainbow = if a.rainbow { Some(rainbow_relabel(&col)?) } else { None };
    let mut all_pass = true;
    for p in &a.cycles {
        let (cycle, color) = read_cycle_text(open(p)?)?;
        let verdict: Verdict = match (&rainbow, color) {
            (Some(rc), _) => verify_rainbow(&cycle, col.n, &col.arcs, rc),
            (None, Some(c)) => verify_monochromatic(&cycle, col.n, &col.arcs, &col.colors, c),
            (None, None) => bail!(
                "{} has no `# color` line; pass --rainbow for rainbow cycles",
                p.display()
            ),
        };
        all_pass &= verdict.pass;
        out.push(json!({ "cycle": p.display().to_string(), "verdict": verdict }));
    }
    if let (Some(mp), Some(c)) = (&a.map, a.color) {
        if c == 0 || c as usize > col.q {
            bail!("--color must lie in 1..={}", col.q);
        }
        let dc = hamcolor::coloring::color_class(&col, c - 1)?;
        let map = ContractionMap::read_text(open(mp)?, &dc)?;
        let mismatch = check_minor_criterion(&map, &dc);
        all_pass &= mismatch.is_none();
        out.push(json!({
            "check": "minor-criterion",
            "pass": mismatch.is_none(),
            "witness": mismatch.map(|m| m.to_string()),
        }));
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    if !all_pass {
        bail!("verification failed");
    }
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    let summary = summarize_csv(open(&a.csv)?)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::Hamilton(a) => hamilton(a),
        Command::Verify(a) => verify(a),
        Command::Stats(a) => stats(a),
    }
}
