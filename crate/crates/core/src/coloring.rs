//! Online colorers: COL for the directed process, COL-ORIENT for the
//! undirected process (orient and color), and the rainbow relabeling.
//!
//! Colors are 0-based internally (`0..q`) and 1-based in text formats.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Arc, Digraph, Vertex};
use crate::process::{hitting_time, ArcSchedule, Mode, ProcessParams};
use crate::{Error, Result};

pub type Color = u32;

/// Per-vertex, per-color counters of the online process at time `t`.
#[derive(Debug, Clone)]
pub struct ColorState {
    n: usize,
    q: usize,
    d_out: Vec<u32>,
    d_in: Vec<u32>,
    deg_out: Vec<u32>,
    deg_in: Vec<u32>,
    missing_out: Vec<u32>,
    missing_in: Vec<u32>,
    cyc_plus: Vec<u32>,
    cyc_minus: Vec<u32>,
    t: usize,
}

impl ColorState {
    pub fn new(n: usize, q: usize) -> Self {
        assert!(q >= 1);
        ColorState {
            n,
            q,
            d_out: vec![0; n * q],
            d_in: vec![0; n * q],
            deg_out: vec![0; n],
            deg_in: vec![0; n],
            missing_out: vec![q as u32; n],
            missing_in: vec![q as u32; n],
            cyc_plus: vec![0; n],
            cyc_minus: vec![0; n],
            t: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of arcs recorded so far.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn d_out(&self, v: Vertex, c: Color) -> u32 {
        self.d_out[v as usize * self.q + c as usize]
    }

    pub fn d_in(&self, v: Vertex, c: Color) -> u32 {
        self.d_in[v as usize * self.q + c as usize]
    }

    pub fn out_degree(&self, v: Vertex) -> u32 {
        self.deg_out[v as usize]
    }

    pub fn in_degree(&self, v: Vertex) -> u32 {
        self.deg_in[v as usize]
    }

    pub fn is_full_out(&self, v: Vertex) -> bool {
        self.missing_out[v as usize] == 0
    }

    pub fn is_full_in(&self, v: Vertex) -> bool {
        self.missing_in[v as usize] == 0
    }

    /// Joint FULL of the undirected process: every (direction, color) slot filled.
    pub fn is_full(&self, v: Vertex) -> bool {
        self.is_full_out(v) && self.is_full_in(v)
    }

    /// `C_v^+`: colors missing from the out-arcs of `v`.
    pub fn missing_out_colors(&self, v: Vertex) -> impl Iterator<Item = Color> + '_ {
        (0..self.q as Color).filter(move |&c| self.d_out(v, c) == 0)
    }

    /// `C_v^-`: colors missing from the in-arcs of `v`.
    pub fn missing_in_colors(&self, v: Vertex) -> impl Iterator<Item = Color> + '_ {
        (0..self.q as Color).filter(move |&c| self.d_in(v, c) == 0)
    }

    /// Records arc `a` with color `c` and advances time.
    pub fn record(&mut self, a: Arc, c: Color) {
        let q = self.q;
        let io = a.tail as usize * q + c as usize;
        if self.d_out[io] == 0 {
            self.missing_out[a.tail as usize] -= 1;
        }
        self.d_out[io] += 1;
        let ii = a.head as usize * q + c as usize;
        if self.d_in[ii] == 0 {
            self.missing_in[a.head as usize] -= 1;
        }
        self.d_in[ii] += 1;
        self.deg_out[a.tail as usize] += 1;
        self.deg_in[a.head as usize] += 1;
        self.t += 1;
    }

    fn next_cyclic_plus(&mut self, v: Vertex) -> Color {
        let c = self.cyc_plus[v as usize] % self.q as u32;
        self.cyc_plus[v as usize] += 1;
        c
    }

    fn next_cyclic_minus(&mut self, v: Vertex) -> Color {
        let c = self.cyc_minus[v as usize] % self.q as u32;
        self.cyc_minus[v as usize] += 1;
        c
    }

    /// Cyclic counters `(c+(v), c-(v))`, as offsets from color 0.
    pub fn cyclic_counters(&self, v: Vertex) -> (u32, u32) {
        (self.cyc_plus[v as usize], self.cyc_minus[v as usize])
    }

    /// True when every vertex has in- and out-degree at least 1 in every color.
    pub fn all_full(&self) -> bool {
        self.missing_out.iter().chain(&self.missing_in).all(|&m| m == 0)
    }
}

fn pick<T: Copy, R: Rng + ?Sized>(items: &[T], rng: &mut R) -> T {
    items[rng.gen_range(0..items.len())]
}

/// ColorGreedy: colors `u -> v` and records it in `state`.
///
/// If `u` misses an out-color or `v` misses an in-color, the color is uniform
/// over `C_u^+ ∪ C_v^-`; otherwise uniform over all `q` colors.
pub fn color_greedy<R: Rng + ?Sized>(state: &mut ColorState, u: Vertex, v: Vertex, rng: &mut R) -> Color {
    let c = if !state.is_full_out(u) || !state.is_full_in(v) {
        let union: Vec<Color> = (0..state.q as Color)
            .filter(|&c| state.d_out(u, c) == 0 || state.d_in(v, c) == 0)
            .collect();
        pick(&union, rng)
    } else {
        rng.gen_range(0..state.q as Color)
    };
    state.record(Arc::new(u, v), c);
    c
}

/// The (orientation, color) choices that fill a missing slot of `u` or `v`.
/// `true` orients `u -> v`.
pub fn greedy2_options(state: &ColorState, u: Vertex, v: Vertex) -> Vec<(bool, Color)> {
    let mut opts = Vec::new();
    for forward in [true, false] {
        for c in 0..state.q as Color {
            let fills = if forward {
                state.d_out(u, c) == 0 || state.d_in(v, c) == 0
            } else {
                state.d_in(u, c) == 0 || state.d_out(v, c) == 0
            };
            if fills {
                opts.push((forward, c));
            }
        }
    }
    opts
}

/// ColorGreedy2: orients and colors the edge `{u, v}`, records it, and
/// returns the oriented arc with its color.
pub fn color_greedy2<R: Rng + ?Sized>(state: &mut ColorState, u: Vertex, v: Vertex, rng: &mut R) -> (Arc, Color) {
    let (forward, c) = if !state.is_full(u) || !state.is_full(v) {
        pick(&greedy2_options(state, u, v), rng)
    } else {
        let forward = rng.gen_bool(0.5);
        (forward, rng.gen_range(0..state.q as Color))
    };
    let arc = if forward { Arc::new(u, v) } else { Arc::new(v, u) };
    state.record(arc, c);
    (arc, c)
}

/// Step-by-step driver of COL / COL-ORIENT. Decisions at step `t` depend
/// only on the first `t` reveals and the random stream.
#[derive(Debug, Clone)]
pub struct OnlineColorer {
    state: ColorState,
    mode: Mode,
    marks: [usize; 3],
    bad_threshold: f64,
    greedy_only: bool,
    snapshots: Vec<(Vec<u32>, Vec<u32>)>,
    bad: Vec<bool>,
    e_prime: Vec<usize>,
}

impl OnlineColorer {
    pub fn new(n: usize, mode: Mode, params: &ProcessParams, greedy_only: bool) -> Self {
        OnlineColorer {
            state: ColorState::new(n, params.q),
            mode,
            marks: params.phase_marks(n),
            bad_threshold: params.bad_threshold(n),
            greedy_only,
            snapshots: Vec::with_capacity(3),
            bad: vec![false; n],
            e_prime: Vec::new(),
        }
    }

    pub fn state(&self) -> &ColorState {
        &self.state
    }

    pub fn is_bad(&self, v: Vertex) -> bool {
        self.bad[v as usize]
    }

    /// Reveal indices (0-based) added to `E'` so far.
    pub fn e_prime(&self) -> &[usize] {
        &self.e_prime
    }

    fn guard(&self, u: Vertex, v: Vertex) -> bool {
        match self.mode {
            Mode::Directed => !self.state.is_full_out(u) || !self.state.is_full_in(v),
            Mode::Undirected => !self.state.is_full(u) || !self.state.is_full(v),
        }
    }

    fn greedy<R: Rng + ?Sized>(&mut self, u: Vertex, v: Vertex, rng: &mut R) -> (Arc, Color) {
        match self.mode {
            Mode::Directed => {
                let c = color_greedy(&mut self.state, u, v, rng);
                (Arc::new(u, v), c)
            }
            Mode::Undirected => color_greedy2(&mut self.state, u, v, rng),
        }
    }

    /// Colors (and in undirected mode orients) reveal number `t = state.t() + 1`.
    pub fn step<R: Rng + ?Sized>(&mut self, pair: Arc, rng: &mut R) -> (Arc, Color) {
        let (u, v) = (pair.tail, pair.head);
        let t = self.state.t() + 1;
        let [m1, m2, m3] = self.marks;
        let out = if self.greedy_only || t <= m1 || self.guard(u, v) {
            self.greedy(u, v, rng)
        } else if t <= m2 {
            self.cyclic(u, v, true, rng)
        } else if t <= m3 {
            self.cyclic(u, v, false, rng)
        } else if self.bad[u as usize] || self.bad[v as usize] {
            self.balance(u, v, rng)
        } else {
            self.e_prime.push(t - 1);
            self.greedy(u, v, rng)
        };
        if !self.greedy_only && self.marks.contains(&t) {
            self.snapshots
                .push((self.state.deg_out.clone(), self.state.deg_in.clone()));
            if t == m3 {
                self.compute_bad();
            }
        }
        out
    }

    fn cyclic<R: Rng + ?Sized>(&mut self, u: Vertex, v: Vertex, plus: bool, rng: &mut R) -> (Arc, Color) {
        let (arc, c) = match (self.mode, plus) {
            (Mode::Directed, true) => (Arc::new(u, v), self.state.next_cyclic_plus(u)),
            (Mode::Directed, false) => (Arc::new(u, v), self.state.next_cyclic_minus(v)),
            (Mode::Undirected, true) => {
                let w = if rng.gen_bool(0.5) { u } else { v };
                let other = if w == u { v } else { u };
                (Arc::new(w, other), self.state.next_cyclic_plus(w))
            }
            (Mode::Undirected, false) => {
                let w = if rng.gen_bool(0.5) { u } else { v };
                let other = if w == u { v } else { u };
                (Arc::new(other, w), self.state.next_cyclic_minus(w))
            }
        };
        self.state.record(arc, c);
        (arc, c)
    }

    fn balance<R: Rng + ?Sized>(&mut self, u: Vertex, v: Vertex, rng: &mut R) -> (Arc, Color) {
        let ub = self.bad[u as usize] as u32;
        let vb = self.bad[v as usize] as u32;
        let s = &self.state;
        let mut best = u32::MAX;
        let mut ties: Vec<(bool, Color)> = Vec::new();
        let directions: &[bool] = match self.mode {
            Mode::Directed => &[true],
            Mode::Undirected => &[true, false],
        };
        for &forward in directions {
            for c in 0..s.q as Color {
                let score = if forward {
                    s.d_out(u, c) * ub + s.d_in(v, c) * vb
                } else {
                    s.d_in(u, c) * ub + s.d_out(v, c) * vb
                };
                if score < best {
                    best = score;
                    ties.clear();
                }
                if score == best {
                    ties.push((forward, c));
                }
            }
        }
        let (forward, c) = pick(&ties, rng);
        let arc = if forward { Arc::new(u, v) } else { Arc::new(v, u) };
        self.state.record(arc, c);
        (arc, c)
    }

    fn compute_bad(&mut self) {
        let n = self.state.n;
        let zeros = vec![0u32; n];
        let (o1, i1) = &self.snapshots[0];
        let (o2, _) = &self.snapshots[1];
        let (_, i3) = &self.snapshots[2];
        let (_, i2) = &self.snapshots[1];
        let thr = self.bad_threshold;
        let low = |now: &[u32], before: &[u32], v: usize| f64::from(now[v] - before[v]) <= thr;
        for v in 0..n {
            self.bad[v] = low(o1, &zeros, v) || low(i1, &zeros, v) || low(o2, o1, v) || low(i3, i2, v);
        }
    }

    pub fn bad_vertices(&self) -> Vec<Vertex> {
        (0..self.state.n as Vertex).filter(|&v| self.bad[v as usize]).collect()
    }
}

/// Output of a full online coloring run, truncated at the hitting time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringResult {
    pub n: usize,
    pub q: usize,
    pub mode: Mode,
    pub seed: u64,
    /// Reveals `e_1..e_tau`, oriented as colored.
    pub arcs: Vec<Arc>,
    pub colors: Vec<Color>,
    /// Undirected mode: `true` when the edge is oriented as listed in the
    /// schedule (smaller label first).
    pub orientation: Option<Vec<bool>>,
    pub tau: usize,
    pub marks: [usize; 3],
    pub bad: Vec<Vertex>,
    pub small: Vec<Vertex>,
    /// 0-based reveal indices of `E'`.
    pub e_prime: Vec<usize>,
    pub color_degree_ok: bool,
    /// `tau <= m_3`: the run fell back to greedy coloring throughout.
    pub degenerate: bool,
}

impl ColoringResult {
    pub fn is_bad(&self, v: Vertex) -> bool {
        self.bad.binary_search(&v).is_ok()
    }

    /// D_tau with all colors.
    pub fn digraph(&self) -> Digraph {
        Digraph::from_arcs(self.n, self.arcs.iter().copied())
    }

    /// Writes the coloring text format.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let [m1, m2, m3] = self.marks;
        writeln!(w, "{} {} {} {} {} {}", self.n, self.q, self.tau, m1, m2, m3)?;
        for (i, (a, c)) in self.arcs.iter().zip(&self.colors).enumerate() {
            match &self.orientation {
                None => writeln!(w, "{} {} {}", a.tail + 1, a.head + 1, c + 1)?,
                Some(o) => writeln!(
                    w,
                    "{} {} {} {}",
                    a.tail + 1,
                    a.head + 1,
                    c + 1,
                    if o[i] { '+' } else { '-' }
                )?,
            }
        }
        write_vertex_section(&mut w, "#BAD", &self.bad)?;
        write_vertex_section(&mut w, "#SMALL", &self.small)?;
        Ok(())
    }

    /// Reads the coloring text format. `seed` and `E'` are not part of the
    /// format and come back as `0` and empty.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let header = header?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|f| f.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(1, "header must be `n q tau m1 m2 m3`"))?;
        if h.len() != 6 {
            return Err(Error::parse(1, "header must be `n q tau m1 m2 m3`"));
        }
        let (n, q, tau) = (h[0], h[1], h[2]);
        let marks = [h[3], h[4], h[5]];
        let mut arcs = Vec::with_capacity(tau);
        let mut colors = Vec::with_capacity(tau);
        let mut orient: Vec<bool> = Vec::new();
        let mut bad = Vec::new();
        let mut small = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#BAD") {
                bad = parse_vertex_list(rest, n, lineno)?;
                continue;
            }
            if let Some(rest) = line.strip_prefix("#SMALL") {
                small = parse_vertex_list(rest, n, lineno)?;
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 && f.len() != 4 {
                return Err(Error::parse(lineno, "expected `tail head color [orient]`"));
            }
            let a = crate::process::parse_arc_line(line, n, lineno)?;
            let c: usize = f[2].parse().map_err(|_| Error::parse(lineno, "bad color"))?;
            if c == 0 || c > q {
                return Err(Error::parse(lineno, format!("color {c} outside 1..={q}")));
            }
            if f.len() == 4 {
                orient.push(match f[3] {
                    "+" => true,
                    "-" => false,
                    _ => return Err(Error::parse(lineno, "orient must be + or -")),
                });
            }
            arcs.push(a);
            colors.push((c - 1) as Color);
        }
        if arcs.len() != tau {
            return Err(Error::parse(
                0,
                format!("header says tau={tau} but {} arcs follow", arcs.len()),
            ));
        }
        let orientation = if orient.is_empty() {
            None
        } else if orient.len() == arcs.len() {
            Some(orient)
        } else {
            return Err(Error::parse(0, "orientation column present on some lines only"));
        };
        let mode = if orientation.is_some() {
            Mode::Undirected
        } else {
            Mode::Directed
        };
        let color_degree_ok = all_color_degrees_positive(n, q, &arcs, &colors);
        Ok(ColoringResult {
            n,
            q,
            mode,
            seed: 0,
            arcs,
            colors,
            orientation,
            tau,
            marks,
            bad,
            small,
            e_prime: Vec::new(),
            color_degree_ok,
            degenerate: tau <= marks[2],
        })
    }
}

fn write_vertex_section<W: Write>(w: &mut W, tag: &str, vs: &[Vertex]) -> Result<()> {
    write!(w, "{tag}")?;
    for v in vs {
        write!(w, " {}", v + 1)?;
    }
    writeln!(w)?;
    Ok(())
}

fn parse_vertex_list(s: &str, n: usize, lineno: usize) -> Result<Vec<Vertex>> {
    s.split_whitespace()
        .map(|f| {
            let v: usize = f
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad vertex {f:?}")))?;
            if v == 0 || v > n {
                return Err(Error::parse(lineno, format!("vertex {v} outside 1..={n}")));
            }
            Ok((v - 1) as Vertex)
        })
        .collect()
}

fn all_color_degrees_positive(n: usize, q: usize, arcs: &[Arc], colors: &[Color]) -> bool {
    let mut st = ColorState::new(n, q);
    for (&a, &c) in arcs.iter().zip(colors) {
        st.record(a, c);
    }
    st.all_full()
}

/// Vertices whose final in- or out-degree is at most `threshold`.
pub fn small_vertices(n: usize, arcs: &[Arc], threshold: f64) -> Vec<Vertex> {
    let mut out = vec![0u32; n];
    let mut inn = vec![0u32; n];
    for a in arcs {
        out[a.tail as usize] += 1;
        inn[a.head as usize] += 1;
    }
    (0..n)
        .filter(|&v| f64::from(out[v]) <= threshold || f64::from(inn[v]) <= threshold)
        .map(|v| v as Vertex)
        .collect()
}

/// SMALL at `tau`, with threshold `small_frac * ln n`.
pub fn compute_small(result: &ColoringResult, params: &ProcessParams) -> Vec<Vertex> {
    small_vertices(result.n, &result.arcs, params.small_threshold(result.n))
}

fn run_online<R: Rng + ?Sized>(schedule: &ArcSchedule, params: &ProcessParams, rng: &mut R) -> Result<ColoringResult> {
    let n = schedule.n;
    params.validate(n)?;
    let tau = hitting_time(schedule, params.q)?;
    let marks = params.phase_marks(n);
    let degenerate = tau <= marks[2];
    let mut colorer = OnlineColorer::new(n, schedule.mode, params, degenerate);
    let mut arcs = Vec::with_capacity(tau);
    let mut colors = Vec::with_capacity(tau);
    let mut orientation = match schedule.mode {
        Mode::Directed => None,
        Mode::Undirected => Some(Vec::with_capacity(tau)),
    };
    for &pair in &schedule.arcs[..tau] {
        let (arc, c) = colorer.step(pair, rng);
        if let Some(o) = orientation.as_mut() {
            o.push(arc == pair);
        }
        arcs.push(arc);
        colors.push(c);
    }
    let mut result = ColoringResult {
        n,
        q: params.q,
        mode: schedule.mode,
        seed: schedule.seed,
        color_degree_ok: colorer.state().all_full(),
        arcs,
        colors,
        orientation,
        tau,
        marks,
        bad: colorer.bad_vertices(),
        small: Vec::new(),
        e_prime: colorer.e_prime().to_vec(),
        degenerate,
    };
    result.small = compute_small(&result, params);
    Ok(result)
}

/// Algorithm COL on a directed schedule, through the hitting time `tau_q`.
pub fn run_col<R: Rng + ?Sized>(schedule: &ArcSchedule, params: &ProcessParams, rng: &mut R) -> Result<ColoringResult> {
    if schedule.mode != Mode::Directed {
        return Err(Error::InvalidInput("run_col needs a directed schedule".into()));
    }
    run_online(schedule, params, rng)
}

/// Algorithm COL-ORIENT on an undirected schedule, through `tau'_{2q}`.
pub fn run_col_orient<R: Rng + ?Sized>(
    schedule: &ArcSchedule,
    params: &ProcessParams,
    rng: &mut R,
) -> Result<ColoringResult> {
    if schedule.mode != Mode::Undirected {
        return Err(Error::InvalidInput(
            "run_col_orient needs an undirected schedule".into(),
        ));
    }
    run_online(schedule, params, rng)
}

/// COL-RBOW: an edge oriented `v_i -> v_j` gets color `i` (the tail's label).
pub fn rainbow_relabel(result: &ColoringResult) -> Result<Vec<Color>> {
    if result.orientation.is_none() {
        return Err(Error::InvalidInput(
            "rainbow relabeling needs an oriented (undirected-mode) result".into(),
        ));
    }
    Ok(result.arcs.iter().map(|a| a.tail).collect())
}

/// `D_c'`: the arcs of color `c` among `e_1..e_tau`.
pub fn color_class(result: &ColoringResult, c: Color) -> Result<Digraph> {
    if c as usize >= result.q {
        return Err(Error::InvalidParameter(format!(
            "color {} outside 1..={}",
            c + 1,
            result.q
        )));
    }
    Ok(Digraph::from_arcs(
        result.n,
        result
            .arcs
            .iter()
            .zip(&result.colors)
            .filter(|&(_, &col)| col == c)
            .map(|(&a, _)| a),
    ))
}
