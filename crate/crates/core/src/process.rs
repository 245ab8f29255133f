//! Seeded random (di)graph processes and hitting times.
//!
//! A schedule is a uniformly random ordering of every ordered pair (directed
//! mode) or unordered pair (undirected mode) on `n` vertices. Pairs are
//! encoded as single integers and permuted with a lazy Fisher–Yates shuffle,
//! so a prefix of length `t` costs `O(t)` time and memory regardless of `n`.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Arc, Vertex};
use crate::rng::{rng_for, stream, TrialRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Directed,
    Undirected,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Directed => "directed",
            Mode::Undirected => "undirected",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "directed" => Ok(Mode::Directed),
            "undirected" => Ok(Mode::Undirected),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

/// Tunable constants of the coloring and Hamilton-cycle pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    pub q: usize,
    /// Phase boundaries are `m_i = i * ceil(alpha * n * ln n)`.
    pub alpha: f64,
    /// BAD threshold: window degree at most `eps_frac * ln n`.
    pub eps_frac: f64,
    /// SMALL threshold: final in- or out-degree at most `small_frac * ln n`.
    pub small_frac: f64,
    /// Candidate arcs per vertex and direction in Phase 1.
    pub k: usize,
    pub rotation_rounds: Option<usize>,
    pub max_paths: Option<usize>,
}

impl Default for ProcessParams {
    fn default() -> Self {
        ProcessParams {
            q: 1,
            alpha: 0.05,
            eps_frac: 0.02,
            small_frac: 0.01,
            k: 6,
            rotation_rounds: None,
            max_paths: None,
        }
    }
}

impl ProcessParams {
    pub fn with_q(q: usize) -> Self {
        ProcessParams {
            q,
            ..Default::default()
        }
    }

    /// `ceil(alpha * n * ln n)`, the length of one reveal window.
    pub fn window(&self, n: usize) -> usize {
        let nf = n as f64;
        (self.alpha * nf * nf.ln()).ceil() as usize
    }

    /// `[m_1, m_2, m_3]`.
    pub fn phase_marks(&self, n: usize) -> [usize; 3] {
        let w = self.window(n);
        [w, 2 * w, 3 * w]
    }

    pub fn bad_threshold(&self, n: usize) -> f64 {
        self.eps_frac * (n as f64).ln()
    }

    pub fn small_threshold(&self, n: usize) -> f64 {
        self.small_frac * (n as f64).ln()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if n < 2 {
            return bad(format!("n must be at least 2, got {n}"));
        }
        if self.q == 0 {
            return bad("q must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0 / 3.0) {
            return bad(format!("alpha must lie in (0, 1/3), got {}", self.alpha));
        }
        if self.eps_frac.is_nan() || self.eps_frac <= 0.0 {
            return bad(format!("eps_frac must be positive, got {}", self.eps_frac));
        }
        if self.small_frac.is_nan() || self.small_frac < 0.0 {
            return bad(format!("small_frac must be non-negative, got {}", self.small_frac));
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.phase_marks(n)[2] >= n * (n - 1) {
            return bad(format!("3*ceil(alpha n ln n) must be below n(n-1) for n={n}"));
        }
        if let Some(mp) = self.max_paths {
            if mp < n {
                return bad(format!("max_paths ({mp}) must be at least n ({n})"));
            }
        }
        Ok(())
    }
}

/// Number of pairs the process reveals in total.
pub fn pair_count(n: usize, mode: Mode) -> u64 {
    let n = n as u64;
    match mode {
        Mode::Directed => n * n.saturating_sub(1),
        Mode::Undirected => n * n.saturating_sub(1) / 2,
    }
}

/// Maps a pair index to its arc. Undirected pairs come out as `(a, b)`, `a < b`.
pub fn decode_pair(idx: u64, n: usize, mode: Mode) -> Arc {
    match mode {
        Mode::Directed => {
            let m = n as u64 - 1;
            let tail = idx / m;
            let r = idx % m;
            let head = if r < tail { r } else { r + 1 };
            Arc::new(tail as Vertex, head as Vertex)
        }
        Mode::Undirected => {
            // idx = b(b-1)/2 + a with a < b
            let mut b = ((1.0 + (1.0 + 8.0 * idx as f64).sqrt()) / 2.0) as u64;
            while b * (b - 1) / 2 > idx {
                b -= 1;
            }
            while (b + 1) * b / 2 <= idx {
                b += 1;
            }
            let a = idx - b * (b - 1) / 2;
            Arc::new(a as Vertex, b as Vertex)
        }
    }
}

pub fn encode_pair(arc: Arc, n: usize, mode: Mode) -> u64 {
    match mode {
        Mode::Directed => {
            let (t, h) = (arc.tail as u64, arc.head as u64);
            let r = if h < t { h } else { h - 1 };
            t * (n as u64 - 1) + r
        }
        Mode::Undirected => {
            let (a, b) = if arc.tail < arc.head {
                (arc.tail as u64, arc.head as u64)
            } else {
                (arc.head as u64, arc.tail as u64)
            };
            b * (b - 1) / 2 + a
        }
    }
}

/// Lazy Fisher–Yates over pair indices. Position `i` swaps with a uniform
/// position in `[i, total)`; untouched positions hold their own index.
pub struct ScheduleStream {
    n: usize,
    mode: Mode,
    total: u64,
    next: u64,
    displaced: HashMap<u64, u64>,
    rng: TrialRng,
}

impl ScheduleStream {
    pub fn new(n: usize, mode: Mode, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("schedule needs n >= 2, got {n}")));
        }
        Ok(ScheduleStream {
            n,
            mode,
            total: pair_count(n, mode),
            next: 0,
            displaced: HashMap::new(),
            rng: rng_for(seed, stream::SCHEDULE),
        })
    }

    fn value_at(&self, pos: u64) -> u64 {
        self.displaced.get(&pos).copied().unwrap_or(pos)
    }
}

impl Iterator for ScheduleStream {
    type Item = Arc;

    fn next(&mut self) -> Option<Arc> {
        if self.next >= self.total {
            return None;
        }
        let i = self.next;
        let j = self.rng.gen_range(i..self.total);
        let vi = self.value_at(i);
        let vj = self.value_at(j);
        if j != i {
            self.displaced.insert(j, vi);
        }
        self.displaced.remove(&i);
        self.next += 1;
        Some(decode_pair(vj, self.n, self.mode))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

/// A (possibly truncated) reveal order of the process.
///
/// `arcs` holds the first `arcs.len()` reveals out of `total`. Generated
/// prefixes of the same `(n, mode, seed)` always agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSchedule {
    pub n: usize,
    pub mode: Mode,
    pub seed: u64,
    pub arcs: Vec<Arc>,
    pub total: u64,
}

impl ArcSchedule {
    /// The complete schedule. Memory is linear in `n(n-1)`.
    pub fn generate(n: usize, mode: Mode, seed: u64) -> Result<Self> {
        let total = pair_count(n, mode);
        Self::generate_prefix(n, mode, seed, total as usize)
    }

    pub fn generate_prefix(n: usize, mode: Mode, seed: u64, len: usize) -> Result<Self> {
        let stream = ScheduleStream::new(n, mode, seed)?;
        let total = stream.total;
        let arcs: Vec<Arc> = stream.take(len).collect();
        Ok(ArcSchedule {
            n,
            mode,
            seed,
            arcs,
            total,
        })
    }

    /// Generates reveals up to and including the hitting time for `q`.
    /// Returns the schedule prefix and `tau`.
    pub fn through_hitting_time(n: usize, mode: Mode, seed: u64, q: usize) -> Result<(Self, usize)> {
        check_reachable(n, mode, q)?;
        let mut stream = ScheduleStream::new(n, mode, seed)?;
        let total = stream.total;
        let mut tracker = HittingTracker::new(n, mode, q);
        let mut arcs = Vec::new();
        for arc in stream.by_ref() {
            arcs.push(arc);
            if tracker.push(arc) {
                break;
            }
        }
        let tau = arcs.len();
        Ok((
            ArcSchedule {
                n,
                mode,
                seed,
                arcs,
                total,
            },
            tau,
        ))
    }

    /// Wraps an explicit reveal order (1 reveal per pair at most).
    pub fn from_arcs(n: usize, mode: Mode, seed: u64, arcs: Vec<Arc>) -> Result<Self> {
        let total = pair_count(n, mode);
        let mut seen = std::collections::HashSet::with_capacity(arcs.len());
        for (i, a) in arcs.iter().enumerate() {
            if a.tail as usize >= n || a.head as usize >= n {
                return Err(Error::InvalidInput(format!("arc {i} out of range")));
            }
            if a.tail == a.head {
                return Err(Error::InvalidInput(format!("arc {i} is a self-loop")));
            }
            if !seen.insert(encode_pair(*a, n, mode)) {
                return Err(Error::InvalidInput(format!("arc {i} repeats an earlier pair")));
            }
        }
        Ok(ArcSchedule {
            n,
            mode,
            seed,
            arcs,
            total,
        })
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.arcs.len() as u64 == self.total
    }

    /// Text format: header `n q mode seed`, then `tail head` per reveal (1-based).
    pub fn write_text<W: Write>(&self, q: usize, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {} {}", self.n, q, self.mode, self.seed)?;
        for a in &self.arcs {
            writeln!(w, "{} {}", a.tail + 1, a.head + 1)?;
        }
        Ok(())
    }

    /// Parses the text format; returns the schedule and the header's `q`.
    pub fn read_text<R: BufRead>(r: R) -> Result<(Self, usize)> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::parse(1, "header must be `n q mode seed`"));
        }
        let n: usize = fields[0].parse().map_err(|_| Error::parse(1, "bad n"))?;
        let q: usize = fields[1].parse().map_err(|_| Error::parse(1, "bad q"))?;
        let mode: Mode = fields[2].parse().map_err(|_| Error::parse(1, "bad mode"))?;
        let seed: u64 = fields[3].parse().map_err(|_| Error::parse(1, "bad seed"))?;
        let mut arcs = Vec::new();
        for (i, line) in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            arcs.push(parse_arc_line(line, n, i + 1)?);
        }
        Ok((ArcSchedule::from_arcs(n, mode, seed, arcs)?, q))
    }
}

/// Parses `tail head` (1-based) into a 0-based arc.
pub(crate) fn parse_arc_line(line: &str, n: usize, lineno: usize) -> Result<Arc> {
    let mut it = line.split_whitespace();
    let mut vertex = |what: &str| -> Result<Vertex> {
        let v: usize = it
            .next()
            .ok_or_else(|| Error::parse(lineno, format!("missing {what}")))?
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad {what}")))?;
        if v == 0 || v > n {
            return Err(Error::parse(lineno, format!("{what} {v} outside 1..={n}")));
        }
        Ok((v - 1) as Vertex)
    };
    let tail = vertex("tail")?;
    let head = vertex("head")?;
    Ok(Arc::new(tail, head))
}

/// Reads `tail head` lines (1-based) on `n` vertices; `#` lines are comments.
pub fn parse_arc_list<R: BufRead>(r: R, n: usize) -> Result<Vec<Arc>> {
    let mut arcs = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        arcs.push(parse_arc_line(t, n, i + 1)?);
    }
    Ok(arcs)
}

fn check_reachable(n: usize, mode: Mode, q: usize) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    let need = match mode {
        Mode::Directed => q,
        Mode::Undirected => 2 * q,
    };
    if n < 2 || n - 1 < need {
        return Err(Error::InvalidParameter(format!(
            "minimum degree {need} is unreachable on n={n} vertices"
        )));
    }
    Ok(())
}

/// Incremental hitting-time detector.
struct HittingTracker {
    mode: Mode,
    need: u32,
    out: Vec<u32>,
    inn: Vec<u32>,
    unmet: usize,
}

impl HittingTracker {
    fn new(n: usize, mode: Mode, q: usize) -> Self {
        let (need, unmet) = match mode {
            Mode::Directed => (q as u32, 2 * n),
            Mode::Undirected => (2 * q as u32, n),
        };
        HittingTracker {
            mode,
            need,
            out: vec![0; n],
            inn: vec![0; n],
            unmet,
        }
    }

    /// Records one reveal; true once every vertex meets the condition.
    fn push(&mut self, a: Arc) -> bool {
        match self.mode {
            Mode::Directed => {
                let o = &mut self.out[a.tail as usize];
                *o += 1;
                if *o == self.need {
                    self.unmet -= 1;
                }
                let i = &mut self.inn[a.head as usize];
                *i += 1;
                if *i == self.need {
                    self.unmet -= 1;
                }
            }
            Mode::Undirected => {
                for v in [a.tail, a.head] {
                    let d = &mut self.out[v as usize];
                    *d += 1;
                    if *d == self.need {
                        self.unmet -= 1;
                    }
                }
            }
        }
        self.unmet == 0
    }
}

/// Smallest `t` such that the first `t` reveals give every vertex in- and
/// out-degree at least `q` (directed) or degree at least `2q` (undirected).
pub fn hitting_time(schedule: &ArcSchedule, q: usize) -> Result<usize> {
    check_reachable(schedule.n, schedule.mode, q)?;
    let mut tracker = HittingTracker::new(schedule.n, schedule.mode, q);
    for (i, &a) in schedule.arcs.iter().enumerate() {
        if tracker.push(a) {
            return Ok(i + 1);
        }
    }
    Err(Error::InvalidInput(format!(
        "hitting condition for q={q} not met within {} reveals",
        schedule.arcs.len()
    )))
}

/// Per-vertex degrees after `t` reveals. In undirected mode both tables hold
/// the total degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTable {
    pub out: Vec<u32>,
    pub inn: Vec<u32>,
}

pub fn prefix_degrees(schedule: &ArcSchedule, t: usize) -> Result<DegreeTable> {
    if t > schedule.arcs.len() {
        return Err(Error::InvalidParameter(format!(
            "t={t} exceeds schedule length {}",
            schedule.arcs.len()
        )));
    }
    let n = schedule.n;
    let mut out = vec![0u32; n];
    let mut inn = vec![0u32; n];
    for a in &schedule.arcs[..t] {
        match schedule.mode {
            Mode::Directed => {
                out[a.tail as usize] += 1;
                inn[a.head as usize] += 1;
            }
            Mode::Undirected => {
                for v in [a.tail, a.head] {
                    out[v as usize] += 1;
                    inn[v as usize] += 1;
                }
            }
        }
    }
    Ok(DegreeTable { out, inn })
}

pub fn generate_schedule(n: usize, mode: Mode, seed: u64) -> Result<ArcSchedule> {
    ArcSchedule::generate(n, mode, seed)
}
