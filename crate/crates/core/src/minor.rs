//! HideBad: thread every BAD vertex into a vertex-disjoint path whose
//! endpoints are not BAD, contract the paths, and lift Hamilton cycles of the
//! contracted digraph back to the color class.
//!
//! Notation: for a minor vertex `u`, `u⁻` is the first vertex of its path
//! (its in-arc is still free) and `u⁺` the last (its out-arc is still free).

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::graph::{Arc, Digraph, Vertex};
use crate::{Error, Result};

/// Which side of a BAD vertex could not be attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarvedSide {
    In,
    Out,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("no admissible {side:?} neighbor for BAD vertex {}", .vertex + 1)]
pub struct HideBadFailure {
    pub vertex: Vertex,
    pub side: StarvedSide,
}

/// The contracted digraph `D_c` together with the contraction paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionMap {
    n: usize,
    paths: Vec<Vec<Vertex>>,
    minor_of: Vec<Vertex>,
    contracted: Vec<Arc>,
    removed: Vec<Arc>,
    minor: Digraph,
}

/// Path bookkeeping during HideBad: each vertex knows the start and end of
/// the path it lies on (valid at endpoints).
struct Paths {
    next: Vec<Option<Vertex>>,
    prev: Vec<Option<Vertex>>,
}

impl Paths {
    fn start(&self, mut v: Vertex) -> Vertex {
        while let Some(p) = self.prev[v as usize] {
            v = p;
        }
        v
    }

    fn link(&mut self, a: Vertex, b: Vertex) {
        debug_assert!(self.next[a as usize].is_none() && self.prev[b as usize].is_none());
        self.next[a as usize] = Some(b);
        self.prev[b as usize] = Some(a);
    }
}

/// Runs HideBad on the color class `dc`.
///
/// `SMALL ∩ BAD` is threaded first in label order, then the rest of `BAD`.
/// A vertex whose turn comes after both of its sides were used is already
/// interior and is skipped. A chosen neighbor never lies on the path of the
/// vertex it is joined to, so the contraction stays a set of paths.
pub fn hide_bad(dc: &Digraph, bad: &[Vertex], small: &[Vertex]) -> std::result::Result<ContractionMap, HideBadFailure> {
    let n = dc.n();
    let mut is_bad = vec![false; n];
    for &b in bad {
        is_bad[b as usize] = true;
    }
    let small: HashSet<Vertex> = small.iter().copied().collect();
    let mut order: Vec<Vertex> = (0..n as Vertex)
        .filter(|&v| is_bad[v as usize] && small.contains(&v))
        .collect();
    order.extend((0..n as Vertex).filter(|&v| is_bad[v as usize] && !small.contains(&v)));

    let mut plus = vec![true; n];
    let mut minus = vec![true; n];
    let mut paths = Paths {
        next: vec![None; n],
        prev: vec![None; n],
    };
    let mut contracted = Vec::new();

    for z in order {
        let (zp, zm) = (plus[z as usize], minus[z as usize]);
        if !zp && !zm {
            continue;
        }
        let z_start = paths.start(z);
        // In-neighbors in V⁺ not on z's path; out-neighbors in V⁻ likewise.
        // A non-BAD vertex already used on one side is not eligible on the
        // other, so it never becomes interior.
        // `in_neighbors` / `out_neighbors` are sorted, so the first hit is minimal.
        let tail_ok = |j: Vertex| plus[j as usize] && (is_bad[j as usize] || minus[j as usize]);
        let head_ok = |k: Vertex| minus[k as usize] && (is_bad[k as usize] || plus[k as usize]);
        if !zp {
            let j = dc
                .in_neighbors(z)
                .iter()
                .copied()
                .find(|&j| tail_ok(j) && paths.start(j) != z_start)
                .ok_or(HideBadFailure {
                    vertex: z,
                    side: StarvedSide::In,
                })?;
            plus[j as usize] = false;
            minus[z as usize] = false;
            paths.link(j, z);
            contracted.push(Arc::new(j, z));
        } else if !zm {
            let k = dc
                .out_neighbors(z)
                .iter()
                .copied()
                .find(|&k| head_ok(k) && paths.start(k) != z_start)
                .ok_or(HideBadFailure {
                    vertex: z,
                    side: StarvedSide::Out,
                })?;
            plus[z as usize] = false;
            minus[k as usize] = false;
            paths.link(z, k);
            contracted.push(Arc::new(z, k));
        } else {
            // z is a singleton; j's path and k's path must differ.
            let mut choice = None;
            'outer: for &j in dc.in_neighbors(z) {
                if !tail_ok(j) {
                    continue;
                }
                let sj = paths.start(j);
                for &k in dc.out_neighbors(z) {
                    if head_ok(k) && paths.start(k) != sj {
                        choice = Some((j, k));
                        break 'outer;
                    }
                }
            }
            let (j, k) = choice.ok_or(HideBadFailure {
                vertex: z,
                side: StarvedSide::Both,
            })?;
            plus[z as usize] = false;
            plus[j as usize] = false;
            minus[z as usize] = false;
            minus[k as usize] = false;
            paths.link(j, z);
            paths.link(z, k);
            contracted.push(Arc::new(j, z));
            contracted.push(Arc::new(z, k));
        }
    }

    let path_list = collect_paths(n, &paths);
    Ok(contract(dc, path_list, contracted))
}

fn collect_paths(n: usize, paths: &Paths) -> Vec<Vec<Vertex>> {
    // Starts in label order; ordering by minimum label is applied in `contract`.
    (0..n as Vertex)
        .filter(|&v| paths.prev[v as usize].is_none())
        .map(|s| {
            let mut p = vec![s];
            let mut v = s;
            while let Some(w) = paths.next[v as usize] {
                p.push(w);
                v = w;
            }
            p
        })
        .collect()
}

/// Applies the deletion rule and contracts `paths`. Minor vertices are
/// numbered by the smallest original label on their path.
fn contract(dc: &Digraph, mut path_list: Vec<Vec<Vertex>>, contracted: Vec<Arc>) -> ContractionMap {
    let n = dc.n();
    path_list.sort_by_key(|p| *p.iter().min().expect("paths are non-empty"));
    let mut minor_of = vec![0 as Vertex; n];
    let mut plus = vec![false; n];
    let mut minus = vec![false; n];
    for (id, p) in path_list.iter().enumerate() {
        for &v in p {
            minor_of[v as usize] = id as Vertex;
        }
        plus[*p.last().unwrap() as usize] = true;
        minus[p[0] as usize] = true;
    }
    let contr_set: HashSet<Arc> = contracted.iter().copied().collect();
    let mut removed = Vec::new();
    let mut minor_arcs = Vec::new();
    for a in dc.arcs() {
        if contr_set.contains(&a) {
            continue;
        }
        if !plus[a.tail as usize] || !minus[a.head as usize] {
            removed.push(a);
            continue;
        }
        minor_arcs.push(Arc::new(minor_of[a.tail as usize], minor_of[a.head as usize]));
    }
    let minor = Digraph::from_arcs(path_list.len(), minor_arcs);
    ContractionMap {
        n,
        paths: path_list,
        minor_of,
        contracted,
        removed,
        minor,
    }
}

impl ContractionMap {
    /// The identity map: every vertex is its own minor vertex.
    pub fn identity(dc: &Digraph) -> Self {
        contract(dc, (0..dc.n() as Vertex).map(|v| vec![v]).collect(), Vec::new())
    }

    /// Rebuilds a map from its contraction paths, re-deriving `E_contr`, the
    /// deletion rule and the minor from `dc`.
    pub fn from_paths(dc: &Digraph, paths: Vec<Vec<Vertex>>) -> Result<Self> {
        let n = dc.n();
        let mut seen = vec![false; n];
        let mut contracted = Vec::new();
        for p in &paths {
            if p.is_empty() {
                return Err(Error::InvalidInput("empty contraction path".into()));
            }
            for &v in p {
                if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
                    return Err(Error::InvalidInput(format!(
                        "vertex {} is out of range or on two paths",
                        v + 1
                    )));
                }
            }
            for w in p.windows(2) {
                if !dc.has_arc(w[0], w[1]) {
                    return Err(Error::InvalidInput(format!(
                        "path arc ({}, {}) is not in the color class",
                        w[0] + 1,
                        w[1] + 1
                    )));
                }
                contracted.push(Arc::new(w[0], w[1]));
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidInput(format!("vertex {} is on no path", v + 1)));
        }
        Ok(contract(dc, paths, contracted))
    }

    pub fn original_n(&self) -> usize {
        self.n
    }

    pub fn minor_n(&self) -> usize {
        self.paths.len()
    }

    /// `contr(u)` listed from `u⁻` to `u⁺`.
    pub fn path(&self, u: Vertex) -> &[Vertex] {
        &self.paths[u as usize]
    }

    pub fn paths(&self) -> &[Vec<Vertex>] {
        &self.paths
    }

    /// `u⁺`: the last vertex of `contr(u)`.
    pub fn plus(&self, u: Vertex) -> Vertex {
        *self.paths[u as usize].last().unwrap()
    }

    /// `u⁻`: the first vertex of `contr(u)`.
    pub fn minus(&self, u: Vertex) -> Vertex {
        self.paths[u as usize][0]
    }

    pub fn minor_of(&self, v: Vertex) -> Vertex {
        self.minor_of[v as usize]
    }

    /// True when `v` is the out-endpoint `u⁺` of its minor vertex.
    pub fn is_plus(&self, v: Vertex) -> bool {
        self.plus(self.minor_of(v)) == v
    }

    /// True when `v` is the in-endpoint `u⁻` of its minor vertex.
    pub fn is_minus(&self, v: Vertex) -> bool {
        self.minus(self.minor_of(v)) == v
    }

    /// `E_contr`, in the order the arcs were added.
    pub fn contracted(&self) -> &[Arc] {
        &self.contracted
    }

    /// Arcs deleted by the endpoint rule, in lexicographic order.
    pub fn removed(&self) -> &[Arc] {
        &self.removed
    }

    pub fn minor(&self) -> &Digraph {
        &self.minor
    }

    /// Maps an original arc `x -> y` to the minor arc `u -> v` when
    /// `x = u⁺`, `y = v⁻` and `u != v`.
    pub fn surviving_arc(&self, a: Arc) -> Option<Arc> {
        if !self.is_plus(a.tail) || !self.is_minus(a.head) {
            return None;
        }
        let (u, v) = (self.minor_of(a.tail), self.minor_of(a.head));
        (u != v).then_some(Arc::new(u, v))
    }

    /// Replaces each minor vertex of a Hamilton cycle of the minor by its
    /// contraction path.
    pub fn lift_hamilton_cycle(&self, minor_cycle: &[Vertex]) -> Result<Vec<Vertex>> {
        let m = self.minor_n();
        let v = crate::verify::is_hamilton_cycle(minor_cycle, m, |a, b| self.minor.has_arc(a, b));
        if !v.pass {
            return Err(Error::InvalidInput(format!(
                "not a Hamilton cycle of the minor: {}",
                v.violation.expect("failing verdict has a witness")
            )));
        }
        let mut out = Vec::with_capacity(self.n);
        for &u in minor_cycle {
            out.extend_from_slice(self.path(u));
        }
        Ok(out)
    }

    /// Lines `minor_id : v⁻ .. v⁺`, all labels 1-based.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for (id, p) in self.paths.iter().enumerate() {
            write!(w, "{} :", id + 1)?;
            for v in p {
                write!(w, " {}", v + 1)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads the path listing and rebuilds the map against `dc`.
    pub fn read_text<R: BufRead>(r: R, dc: &Digraph) -> Result<Self> {
        let mut paths = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (id, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(i + 1, "expected `minor_id : path`"))?;
            let id: usize = id.trim().parse().map_err(|_| Error::parse(i + 1, "bad minor id"))?;
            if id != paths.len() + 1 {
                return Err(Error::parse(i + 1, format!("minor ids must run 1, 2, ...; got {id}")));
            }
            let p = rest
                .split_whitespace()
                .map(|f| match f.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok((v - 1) as Vertex),
                    _ => Err(Error::parse(i + 1, format!("bad vertex {f:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            paths.push(p);
        }
        Self::from_paths(dc, paths)
    }
}

/// A pair of minor vertices where the endpoint criterion
/// `uv ∈ D_c  ⇔  u⁺v⁻ ∈ D_c'` fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriterionMismatch {
    pub u: Vertex,
    pub v: Vertex,
    pub in_minor: bool,
}

impl fmt::Display for CriterionMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "minor pair ({}, {}): arc in minor = {}, endpoint arc in color class = {}",
            self.u + 1,
            self.v + 1,
            self.in_minor,
            !self.in_minor
        )
    }
}

/// Checks the endpoint criterion for every ordered pair of distinct minor
/// vertices, directly against the color class.
pub fn check_minor_criterion(map: &ContractionMap, dc: &Digraph) -> Option<CriterionMismatch> {
    let m = map.minor_n() as Vertex;
    for u in 0..m {
        for v in 0..m {
            if u == v {
                continue;
            }
            let in_minor = map.minor().has_arc(u, v);
            if in_minor != dc.has_arc(map.plus(u), map.minus(v)) {
                return Some(CriterionMismatch { u, v, in_minor });
            }
        }
    }
    None
}

/// Contraction-map invariants: partition, path arcs in `dc`, interior
/// vertices BAD, endpoints not BAD (when the path has length > 1 or the
/// vertex is not BAD), every BAD vertex interior.
pub fn check_map_invariants(map: &ContractionMap, dc: &Digraph, bad: &[Vertex]) -> std::result::Result<(), String> {
    let n = map.original_n();
    let bad: HashSet<Vertex> = bad.iter().copied().collect();
    let mut seen = vec![false; n];
    for (u, p) in map.paths().iter().enumerate() {
        for &v in p {
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(format!("vertex {v} on two paths"));
            }
            if map.minor_of(v) != u as Vertex {
                return Err(format!("minor_of({v}) != {u}"));
            }
        }
        for w in p.windows(2) {
            if !dc.has_arc(w[0], w[1]) {
                return Err(format!("path arc {:?} missing", (w[0], w[1])));
            }
        }
        if bad.contains(&p[0]) || bad.contains(p.last().unwrap()) {
            return Err(format!("path {u} has a BAD endpoint"));
        }
        if p.len() > 2 {
            for v in &p[1..p.len() - 1] {
                if !bad.contains(v) {
                    return Err(format!("interior vertex {v} of path {u} is not BAD"));
                }
            }
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(format!("vertex {v} on no path"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dg(n: usize, arcs: &[(u32, u32)]) -> Digraph {
        Digraph::from_arcs(n, arcs.iter().map(|&a| Arc::from(a)))
    }

    /// The 4-vertex hand example, shifted to 0-based labels.
    fn example() -> Digraph {
        dg(4, &[(0, 2), (2, 1), (1, 0), (1, 3), (3, 0), (2, 3), (3, 1), (0, 1)])
    }

    #[test]
    fn empty_bad_is_identity() {
        let d = example();
        let m = hide_bad(&d, &[], &[]).unwrap();
        assert_eq!(m.minor_n(), 4);
        assert_eq!(m.minor(), &d);
        assert!(m.removed().is_empty() && m.contracted().is_empty());
        assert_eq!(m, ContractionMap::identity(&d));
        assert_eq!(m.lift_hamilton_cycle(&[0, 2, 1, 3]).unwrap(), vec![0, 2, 1, 3]);
    }

    #[test]
    fn hand_example() {
        let d = example();
        let m = hide_bad(&d, &[2], &[]).unwrap();
        assert_eq!(m.contracted(), &[Arc::new(0, 2), Arc::new(2, 1)]);
        assert_eq!(m.paths(), &[vec![0, 2, 1], vec![3]]);
        assert_eq!((m.minus(0), m.plus(0)), (0, 1));
        assert_eq!(m.removed(), &[Arc::new(0, 1), Arc::new(2, 3), Arc::new(3, 1)]);
        assert_eq!(m.minor(), &dg(2, &[(0, 1), (1, 0)]));
        assert_eq!(m.lift_hamilton_cycle(&[0, 1]).unwrap(), vec![0, 2, 1, 3]);
        assert_eq!(check_minor_criterion(&m, &d), None);
        check_map_invariants(&m, &d, &[2]).unwrap();
    }

    #[test]
    fn starvation_is_reported() {
        // BAD vertices 2 and 3 share their only in-neighbor 0.
        let d = dg(5, &[(0, 2), (2, 4), (0, 3), (3, 4), (1, 4), (4, 1)]);
        let err = hide_bad(&d, &[2, 3], &[]).unwrap_err();
        assert_eq!(err.vertex, 3);
        assert_eq!(err.side, StarvedSide::Both);
    }

    #[test]
    fn small_bad_goes_first() {
        // Both 2 and 3 want in-neighbor 0; SMALL vertex 3 gets it.
        let d = dg(6, &[(0, 2), (1, 2), (2, 4), (0, 3), (3, 5)]);
        let m = hide_bad(&d, &[2, 3], &[3]).unwrap();
        assert_eq!(m.contracted()[..2], [Arc::new(0, 3), Arc::new(3, 5)]);
        assert!(m.contracted().contains(&Arc::new(1, 2)));
    }

    #[test]
    fn chained_bad_vertices_extend_one_side() {
        // 1 and 2 are BAD; 1 -> 2 is the only way to hide 1 outward.
        let d = dg(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let m = hide_bad(&d, &[1, 2], &[]).unwrap();
        assert_eq!(m.paths(), &[vec![0, 1, 2, 3]]);
        assert_eq!(m.contracted(), &[Arc::new(0, 1), Arc::new(1, 2), Arc::new(2, 3)]);
        // A one-vertex minor: the closing arc 3 -> 0 is a self-loop and dropped.
        assert_eq!(m.minor().arc_count(), 0);
    }

    #[test]
    fn never_closes_a_cycle() {
        // Two-vertex path 0 -> 1 (1 BAD) could be closed by 2 -> 0 ... only
        // if 2 joined to its own path; the admissible choice must differ.
        let d = dg(5, &[(0, 1), (1, 2), (2, 0), (3, 1), (2, 4), (1, 4)]);
        let m = hide_bad(&d, &[1, 2], &[]).unwrap();
        check_map_invariants(&m, &d, &[1, 2]).unwrap();
        assert_eq!(check_minor_criterion(&m, &d), None);
    }

    #[test]
    fn text_round_trip() {
        let d = example();
        let m = hide_bad(&d, &[2], &[]).unwrap();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1 : 1 3 2\n2 : 4\n");
        let back = ContractionMap::read_text(&buf[..], &d).unwrap();
        assert_eq!(back.paths(), m.paths());
        assert_eq!(back.minor(), m.minor());
    }

    #[test]
    fn lift_rejects_invalid_cycles() {
        let d = example();
        let m = hide_bad(&d, &[2], &[]).unwrap();
        assert!(matches!(m.lift_hamilton_cycle(&[0]), Err(Error::InvalidInput(_))));
        assert!(matches!(m.lift_hamilton_cycle(&[0, 0]), Err(Error::InvalidInput(_))));
    }
}
