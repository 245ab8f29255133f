//! Merging the cycles of a 1-factor into one Hamilton cycle: two-arc
//! exchanges over the first random pool, then rotation search (FindCycle)
//! over the second.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Arc, Digraph, Vertex};
use crate::one_factor::OneFactor;
use crate::{Error, Result};

/// Rotation rounds when none is configured: `floor(ln n / ln ln n) + 2`,
/// or `n` below 16 where the formula degenerates.
pub fn default_rounds(n: usize) -> usize {
    if n < 16 {
        return n;
    }
    let ln = (n as f64).ln();
    (ln / ln.ln()).floor() as usize + 2
}

pub fn default_max_paths(n: usize) -> usize {
    4 * n
}

#[derive(Debug, Clone)]
pub struct PatchworkInput {
    pub factor: OneFactor,
    /// Arcs that may not be used; stripped from the pools on construction.
    pub forbidden: Digraph,
    pub e2: Digraph,
    pub e3: Digraph,
    pub rounds: usize,
    pub max_paths: usize,
}

impl PatchworkInput {
    /// Builds the input with default round and frontier budgets.
    pub fn new(factor: OneFactor, forbidden: Digraph, e2: Digraph, e3: Digraph) -> Result<Self> {
        let n = factor.n();
        if forbidden.n() != n || e2.n() != n || e3.n() != n {
            return Err(Error::InvalidInput(format!(
                "factor, forbidden arcs and pools must share n={n}"
            )));
        }
        let e2 = e2.difference(&forbidden);
        let e3 = e3.difference(&forbidden);
        Ok(PatchworkInput {
            factor,
            forbidden,
            e2,
            e3,
            rounds: default_rounds(n),
            max_paths: default_max_paths(n),
        })
    }

    pub fn n(&self) -> usize {
        self.factor.n()
    }
}

/// Splits `arcs` into two disjoint pools with a fair coin per arc.
pub fn split_pools<R: Rng + ?Sized>(n: usize, arcs: &[Arc], rng: &mut R) -> (Digraph, Digraph) {
    let mut e2 = Vec::new();
    let mut e3 = Vec::new();
    for &a in arcs {
        if rng.gen_bool(0.5) {
            e2.push(a);
        } else {
            e3.push(a);
        }
    }
    (Digraph::from_arcs(n, e2), Digraph::from_arcs(n, e3))
}

/// Two disjoint random pools on `n` vertices: each loop-free ordered pair
/// lands in the first with probability `density`, in the second with
/// probability `density`, and otherwise in neither.
pub fn random_pools<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<(Digraph, Digraph)> {
    if !(0.0..=0.5).contains(&density) {
        return Err(Error::InvalidParameter(format!(
            "pool density must lie in [0, 1/2], got {density}"
        )));
    }
    let mut e2 = Vec::new();
    let mut e3 = Vec::new();
    for a in 0..n as Vertex {
        for b in 0..n as Vertex {
            if a == b {
                continue;
            }
            let u: f64 = rng.gen();
            if u < density {
                e2.push(Arc::new(a, b));
            } else if u < 2.0 * density {
                e3.push(Arc::new(a, b));
            }
        }
    }
    Ok((Digraph::from_arcs(n, e2), Digraph::from_arcs(n, e3)))
}

/// A uniformly random fixed-point-free permutation (rejection sampling).
pub fn random_derangement<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<OneFactor> {
    if n < 2 {
        return Err(Error::InvalidParameter("a derangement needs n >= 2".into()));
    }
    let mut p: Vec<Vertex> = (0..n as Vertex).collect();
    loop {
        p.shuffle(rng);
        if p.iter().enumerate().all(|(i, &v)| i as Vertex != v) {
            return OneFactor::from_successors(p);
        }
    }
}

/// Exchange `(a, φ(a)), (φ⁻¹(b), b)` for `(a, b), (φ⁻¹(b), φ(a))`, joining
/// the cycles of `a` and `b`.
pub fn merge_step(phi: &OneFactor, a: Vertex, b: Vertex) -> Result<OneFactor> {
    let n = phi.n();
    if a as usize >= n || b as usize >= n {
        return Err(Error::InvalidMerge(format!("vertex out of range (n={n})")));
    }
    let ranks = phi.cycle_ranks();
    if ranks[a as usize] == ranks[b as usize] {
        return Err(Error::InvalidMerge(format!(
            "{} and {} lie on the same cycle",
            a + 1,
            b + 1
        )));
    }
    let x = phi.pred(b);
    let mut succ = phi.successors().to_vec();
    succ[x as usize] = succ[a as usize];
    succ[a as usize] = b;
    OneFactor::from_successors(succ)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeStats {
    pub merges: usize,
}

/// Applies exchanges until none is admissible. Search order: the smallest
/// cycle `C_j` first; `b ∈ C_j` by label; `x = φ⁻¹(b)`; `E2` out-arcs `(x, y)`
/// by label; `a = φ⁻¹(y)` must lie on a larger-ranked cycle than `b` and
/// `(a, b) ∈ E2`.
pub fn merge_cycles(factor: &OneFactor, e2: &Digraph) -> (OneFactor, MergeStats) {
    let mut phi = factor.clone();
    let mut stats = MergeStats::default();
    'search: loop {
        let ranks = phi.cycle_ranks();
        for j in (1..phi.cycles().len()).rev() {
            let mut members = phi.cycles()[j].clone();
            members.sort_unstable();
            for b in members {
                let x = phi.pred(b);
                for &y in e2.out_neighbors(x) {
                    let a = phi.pred(y);
                    if ranks[a as usize] < j && e2.has_arc(a, b) {
                        phi = merge_step(&phi, a, b).expect("a and b lie on different cycles");
                        stats.merges += 1;
                        continue 'search;
                    }
                }
            }
        }
        return (phi, stats);
    }
}

/// Double rotation with 1-based `2 <= k < l <= s`:
/// `(p1..p_{k-1}, p_l..p_s, p_k..p_{l-1})`. It uses the new arcs
/// `(p_{k-1}, p_l)` and `(p_s, p_k)`.
pub fn double_rotation(path: &[Vertex], k: usize, l: usize) -> Result<Vec<Vertex>> {
    let s = path.len();
    if !(2 <= k && k < l && l <= s) {
        return Err(Error::InvalidRotation(format!(
            "need 2 <= k < l <= s, got k={k}, l={l}, s={s}"
        )));
    }
    let mut out = Vec::with_capacity(s);
    out.extend_from_slice(&path[..k - 1]);
    out.extend_from_slice(&path[l - 1..]);
    out.extend_from_slice(&path[k - 1..l - 1]);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Seed(usize),
    Rotation { parent: usize, k: usize, l: usize },
}

/// Paths sharing a start vertex and vertex set, one per endpoint, stored as
/// rotation records against a seed path.
#[derive(Debug, Clone)]
pub struct PathFrontier {
    start: Vertex,
    seeds: Vec<Vec<Vertex>>,
    nodes: Vec<(Origin, Vertex)>,
    has_endpoint: Vec<bool>,
    cap: usize,
}

impl PathFrontier {
    /// `n` bounds the vertex labels; `cap` bounds the number of stored paths.
    pub fn new(start: Vertex, n: usize, cap: usize) -> Self {
        PathFrontier {
            start,
            seeds: Vec::new(),
            nodes: Vec::new(),
            has_endpoint: vec![false; n],
            cap,
        }
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.nodes.len() >= self.cap
    }

    pub fn endpoint(&self, idx: usize) -> Vertex {
        self.nodes[idx].1
    }

    pub fn endpoints(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.nodes.iter().map(|n| n.1)
    }

    fn admit(&mut self, endpoint: Vertex) -> bool {
        if self.is_full() || self.has_endpoint[endpoint as usize] {
            return false;
        }
        self.has_endpoint[endpoint as usize] = true;
        true
    }

    /// Adds a seed path unless its endpoint is already present or the
    /// frontier is full.
    pub fn insert_seed(&mut self, path: Vec<Vertex>) -> bool {
        assert_eq!(path.first(), Some(&self.start), "seed must begin at the start vertex");
        let end = *path.last().unwrap();
        if !self.admit(end) {
            return false;
        }
        self.seeds.push(path);
        self.nodes.push((Origin::Seed(self.seeds.len() - 1), end));
        true
    }

    /// Records the double rotation `(k, l)` of path `parent`, whose endpoint
    /// is `p_{l-1}`.
    pub fn insert_rotation(&mut self, parent: usize, k: usize, l: usize, endpoint: Vertex) -> bool {
        if !self.admit(endpoint) {
            return false;
        }
        self.nodes.push((Origin::Rotation { parent, k, l }, endpoint));
        true
    }

    /// Rebuilds path `idx` by replaying its rotations from the seed.
    pub fn materialize(&self, idx: usize) -> Vec<Vertex> {
        let mut chain = Vec::new();
        let mut cur = idx;
        let seed = loop {
            match self.nodes[cur].0 {
                Origin::Seed(s) => break s,
                Origin::Rotation { parent, k, l } => {
                    chain.push((k, l));
                    cur = parent;
                }
            }
        };
        let mut path = self.seeds[seed].clone();
        for &(k, l) in chain.iter().rev() {
            path = double_rotation(&path, k, l).expect("stored rotations are valid");
        }
        path
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindCycleStop {
    /// No pool arc from the tail of the new cycle into the current cycle.
    NoSeed,
    /// A round added no new endpoint.
    Exhausted,
    RoundsElapsed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("rotation search failed ({stop:?}); frontier sizes {trace:?}")]
pub struct FindCycleFailure {
    pub stop: FindCycleStop,
    /// Frontier size after seeding and after each round.
    pub trace: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindCycleStats {
    pub rounds: usize,
    pub frontier_peak: usize,
}

/// Index in `c_new` of the vertex that starts every path.
///
/// A start `x` is scored by (arcs into `x` from the previous cycle) times
/// (seed arcs from its cycle predecessor whose seed path ends at a vertex
/// with some `e3` out-arc). The best score wins, ties broken by walking the
/// cycle from its smallest label; if every score is zero, the smallest label.
fn choose_start(c_new: &[Vertex], c_prev: &[Vertex], e3: &Digraph, pos_prev: &[usize]) -> usize {
    let m = c_new.len();
    let g = c_prev.len();
    let min_at = (0..m).min_by_key(|&i| c_new[i]).expect("cycles are non-empty");
    let mut best = (0usize, min_at);
    for d in 0..m {
        let i = (min_at + d) % m;
        let closers = e3
            .in_neighbors(c_new[i])
            .iter()
            .filter(|&&w| pos_prev[w as usize] != usize::MAX)
            .count();
        if closers == 0 {
            continue;
        }
        let pred = c_new[(i + m - 1) % m];
        let seeds = e3
            .out_neighbors(pred)
            .iter()
            .filter(|&&y| {
                let j = pos_prev[y as usize];
                j != usize::MAX && e3.out_degree(c_prev[(j + g - 1) % g]) > 0
            })
            .count();
        if closers * seeds > best.0 {
            best = (closers * seeds, i);
        }
    }
    best.1
}

/// Absorbs cycle `c_new` into `c_prev` using pool arcs from `e3`.
///
/// `c_new` is read from a start `x_1` (see `choose_start`) around to its
/// tail `x_m`.
/// Each arc `(x_m, y_j)` into `c_prev` seeds the path `x_1..x_m, y_j..y_{j-1}`.
/// Then up to `rounds` rounds of double rotations extend the frontier from
/// the paths found in the previous round. After seeding and after each
/// round, a closing arc `(endpoint, x_1)` ends the search.
pub fn find_cycle(
    c_prev: &[Vertex],
    c_new: &[Vertex],
    e3: &Digraph,
    rounds: usize,
    max_paths: usize,
) -> std::result::Result<(Vec<Vertex>, FindCycleStats), FindCycleFailure> {
    let n = e3.n();
    let mut pos_prev = vec![usize::MAX; n];
    for (j, &y) in c_prev.iter().enumerate() {
        pos_prev[y as usize] = j;
    }
    let rot = choose_start(c_new, c_prev, e3, &pos_prev);
    let new_path: Vec<Vertex> = c_new[rot..].iter().chain(&c_new[..rot]).copied().collect();
    let start = new_path[0];
    let tail = *new_path.last().unwrap();

    let mut frontier = PathFrontier::new(start, n, max_paths);
    for j in 0..c_prev.len() {
        if e3.has_arc(tail, c_prev[j]) {
            let mut p = new_path.clone();
            p.extend_from_slice(&c_prev[j..]);
            p.extend_from_slice(&c_prev[..j]);
            frontier.insert_seed(p);
        }
    }
    let mut trace = vec![frontier.len()];
    if frontier.is_empty() {
        return Err(FindCycleFailure {
            stop: FindCycleStop::NoSeed,
            trace,
        });
    }
    let closes =
        |f: &PathFrontier, range: std::ops::Range<usize>| range.into_iter().find(|&i| e3.has_arc(f.endpoint(i), start));
    let mut fresh = 0..frontier.len();
    let mut stats = FindCycleStats {
        rounds: 0,
        frontier_peak: frontier.len(),
    };
    if let Some(i) = closes(&frontier, fresh.clone()) {
        return Ok((frontier.materialize(i), stats));
    }
    let mut pos = vec![0usize; n];
    for t in 1..=rounds {
        let before = frontier.len();
        for idx in fresh.clone() {
            if frontier.is_full() {
                break;
            }
            let path = frontier.materialize(idx);
            let s = path.len();
            for (i, &v) in path.iter().enumerate() {
                pos[v as usize] = i + 1;
            }
            // (p_s, p_k) for 2 <= k < s, then (p_{k-1}, p_l) for k < l <= s.
            let mut ks: Vec<usize> = e3
                .out_neighbors(path[s - 1])
                .iter()
                .map(|&v| pos[v as usize])
                .filter(|&k| k >= 2 && k < s)
                .collect();
            ks.sort_unstable();
            for k in ks {
                let mut ls: Vec<usize> = e3
                    .out_neighbors(path[k - 2])
                    .iter()
                    .map(|&v| pos[v as usize])
                    .filter(|&l| l > k && l <= s)
                    .collect();
                ls.sort_unstable();
                for l in ls {
                    frontier.insert_rotation(idx, k, l, path[l - 2]);
                }
            }
            for &v in &path {
                pos[v as usize] = 0;
            }
        }
        fresh = before..frontier.len();
        trace.push(frontier.len());
        stats.rounds = t;
        stats.frontier_peak = frontier.len();
        if let Some(i) = closes(&frontier, fresh.clone()) {
            return Ok((frontier.materialize(i), stats));
        }
        if fresh.is_empty() {
            return Err(FindCycleFailure {
                stop: FindCycleStop::Exhausted,
                trace,
            });
        }
    }
    Err(FindCycleFailure {
        stop: FindCycleStop::RoundsElapsed,
        trace,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchworkStats {
    pub merges: usize,
    /// Cycle count and largest cycle after the exchange phase.
    pub phase2_cycles: usize,
    pub phase2_largest: usize,
    /// Rotation rounds summed over all FindCycle calls.
    pub rounds: usize,
    pub frontier_peak: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("cycle {cycle_index} of {} could not be absorbed: {failure}", .stats.phase2_cycles)]
pub struct PatchworkFailure {
    /// 0-based rank of the post-exchange cycle that failed to merge.
    pub cycle_index: usize,
    pub failure: FindCycleFailure,
    pub stats: PatchworkStats,
}

/// Turns the factor into a Hamilton cycle using arcs of the factor, `E2`
/// (exchanges) and `E3` (rotations). The cycle starts at the smallest label
/// of the first cycle it was built from.
pub fn patchwork_hamilton(
    input: &PatchworkInput,
) -> std::result::Result<(Vec<Vertex>, PatchworkStats), PatchworkFailure> {
    let mut stats = PatchworkStats::default();
    if input.factor.cycles().len() == 1 {
        stats.phase2_cycles = 1;
        stats.phase2_largest = input.n();
        return Ok((input.factor.cycles()[0].clone(), stats));
    }
    let (phi, ms) = merge_cycles(&input.factor, &input.e2);
    stats.merges = ms.merges;
    stats.phase2_cycles = phi.cycles().len();
    stats.phase2_largest = phi.cycles()[0].len();
    let mut current = phi.cycles()[0].clone();
    for (i, c) in phi.cycles().iter().enumerate().skip(1) {
        match find_cycle(&current, c, &input.e3, input.rounds, input.max_paths) {
            Ok((cycle, fs)) => {
                stats.rounds += fs.rounds;
                stats.frontier_peak = stats.frontier_peak.max(fs.frontier_peak);
                current = cycle;
            }
            Err(failure) => {
                stats.frontier_peak = stats.frontier_peak.max(failure.trace.last().copied().unwrap_or(0));
                return Err(PatchworkFailure {
                    cycle_index: i,
                    failure,
                    stats,
                });
            }
        }
    }
    Ok((current, stats))
}
