//! Candidate arcs and the spanning 1-factor of the contracted digraph.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, ColoringResult};
use crate::graph::{Arc, Digraph, Vertex};
use crate::minor::ContractionMap;
use crate::{Error, Result};

/// Per minor vertex: up to `k` out-candidate and in-candidate arcs (minor
/// labels), each list in reveal order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateArcs {
    pub n: usize,
    pub k: usize,
    pub out: Vec<Vec<Arc>>,
    pub inn: Vec<Vec<Arc>>,
}

impl CandidateArcs {
    pub fn new(n: usize, k: usize) -> Self {
        CandidateArcs {
            n,
            k,
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
        }
    }

    /// Candidate sets given directly as arcs; each arc becomes an
    /// out-candidate of its tail. `k` is set to the largest list size.
    pub fn from_arcs(n: usize, arcs: &[Arc]) -> Self {
        let mut c = CandidateArcs::new(n, 0);
        for &a in arcs {
            c.out[a.tail as usize].push(a);
        }
        c.k = c.out.iter().map(Vec::len).max().unwrap_or(0);
        c
    }

    /// Minor vertices with fewer than `k` out- or in-candidates.
    pub fn deficient(&self) -> Vec<Vertex> {
        (0..self.n)
            .filter(|&v| self.out[v].len() < self.k || self.inn[v].len() < self.k)
            .map(|v| v as Vertex)
            .collect()
    }

    /// All candidate arcs, out-lists first, then in-lists, without repeats.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut seen = std::collections::HashSet::new();
        self.out
            .iter()
            .chain(&self.inn)
            .flatten()
            .copied()
            .filter(|a| seen.insert(*a))
            .collect()
    }
}

/// `V* = V \ (BAD ∪ N(BAD))`, with neighborhoods taken in `d` in both
/// directions.
pub fn good_core(d: &Digraph, bad: &[Vertex]) -> Vec<bool> {
    let mut core = vec![true; d.n()];
    for &b in bad {
        core[b as usize] = false;
        for &w in d.out_neighbors(b).iter().chain(d.in_neighbors(b)) {
            core[w as usize] = false;
        }
    }
    core
}

/// The first `k` color-`c` arcs per minor vertex: out-arcs `(v⁺, w)` revealed
/// in `(m1, m2]`, in-arcs `(w, v⁻)` revealed in `(m2, m3]`, with `w ∈ V*`
/// and the arc surviving in the minor.
pub fn select_candidates(
    result: &ColoringResult,
    map: &ContractionMap,
    core: &[bool],
    c: Color,
    k: usize,
) -> CandidateArcs {
    let [m1, m2, m3] = result.marks;
    let mut cands = CandidateArcs::new(map.minor_n(), k);
    let end = m3.min(result.tau);
    for i in m1.min(end)..end {
        if result.colors[i] != c {
            continue;
        }
        let a = result.arcs[i];
        let Some(m) = map.surviving_arc(a) else {
            continue;
        };
        if i < m2 {
            let list = &mut cands.out[m.tail as usize];
            if core[a.head as usize] && list.len() < k {
                list.push(m);
            }
        } else {
            let list = &mut cands.inn[m.head as usize];
            if core[a.tail as usize] && list.len() < k {
                list.push(m);
            }
        }
    }
    cands
}

/// A fixed-point-free permutation `succ` and its cycles.
///
/// Cycles are sorted by decreasing length, ties by smallest label, and each
/// is listed from its smallest label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneFactor {
    succ: Vec<Vertex>,
    pred: Vec<Vertex>,
    cycles: Vec<Vec<Vertex>>,
}

impl OneFactor {
    pub fn from_successors(succ: Vec<Vertex>) -> Result<Self> {
        let n = succ.len();
        let mut pred = vec![Vertex::MAX; n];
        for (v, &w) in succ.iter().enumerate() {
            if w as usize >= n {
                return Err(Error::InvalidInput(format!("successor {} out of range", w + 1)));
            }
            if w as usize == v {
                return Err(Error::InvalidInput(format!("fixed point at {}", v + 1)));
            }
            if pred[w as usize] != Vertex::MAX {
                return Err(Error::InvalidInput(format!("vertex {} has two predecessors", w + 1)));
            }
            pred[w as usize] = v as Vertex;
        }
        let cycles = cycles_of(&succ);
        Ok(OneFactor { succ, pred, cycles })
    }

    /// Builds a factor from cycles given as vertex sequences.
    pub fn from_cycles(n: usize, cycles: &[Vec<Vertex>]) -> Result<Self> {
        let mut succ = vec![Vertex::MAX; n];
        for c in cycles {
            for (i, &v) in c.iter().enumerate() {
                if v as usize >= n || succ[v as usize] != Vertex::MAX {
                    return Err(Error::InvalidInput(format!(
                        "vertex {} out of range or repeated",
                        v + 1
                    )));
                }
                succ[v as usize] = c[(i + 1) % c.len()];
            }
        }
        if let Some(v) = succ.iter().position(|&s| s == Vertex::MAX) {
            return Err(Error::InvalidInput(format!("vertex {} is on no cycle", v + 1)));
        }
        Self::from_successors(succ)
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    pub fn succ(&self, v: Vertex) -> Vertex {
        self.succ[v as usize]
    }

    pub fn pred(&self, v: Vertex) -> Vertex {
        self.pred[v as usize]
    }

    pub fn successors(&self) -> &[Vertex] {
        &self.succ
    }

    pub fn cycles(&self) -> &[Vec<Vertex>] {
        &self.cycles
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.succ.iter().enumerate().map(|(v, &w)| Arc::new(v as Vertex, w))
    }

    /// Rank of the cycle containing each vertex (0 = largest).
    pub fn cycle_ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.n()];
        for (i, c) in self.cycles.iter().enumerate() {
            for &v in c {
                rank[v as usize] = i;
            }
        }
        rank
    }

    /// Factor file: `v phi(v)` per line, then one `# cycle:` comment per cycle.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for (v, s) in self.succ.iter().enumerate() {
            writeln!(w, "{} {}", v + 1, s + 1)?;
        }
        for c in &self.cycles {
            write!(w, "# cycle:")?;
            for v in c {
                write!(w, " {}", v + 1)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_text<R: std::io::BufRead>(r: R) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(i + 1, "expected `v phi(v)`"))?;
            if f.len() != 2 || f[0] == 0 || f[1] == 0 {
                return Err(Error::parse(i + 1, "expected `v phi(v)` with 1-based labels"));
            }
            pairs.push((i + 1, f[0] - 1, f[1] - 1));
        }
        let n = pairs.len();
        let mut succ = vec![Vertex::MAX; n];
        for (line, v, s) in pairs {
            if v >= n || succ[v] != Vertex::MAX {
                return Err(Error::parse(line, format!("vertex {} out of range or repeated", v + 1)));
            }
            succ[v] = s as Vertex;
        }
        Self::from_successors(succ)
    }
}

fn cycles_of(succ: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; succ.len()];
    let mut cycles = Vec::new();
    for s in 0..succ.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut v = s;
        while !seen[v] {
            seen[v] = true;
            c.push(v as Vertex);
            v = succ[v] as usize;
        }
        cycles.push(c);
    }
    // Each cycle starts at its smallest label because starts are scanned in order.
    cycles.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    cycles
}

pub fn cycle_count(factor: &OneFactor) -> usize {
    factor.cycles().len()
}

/// A set `S` of left (tail) vertices whose candidate neighborhood `N(S)` of
/// right (head) vertices is smaller than `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("no perfect matching: {} tails reach only {} heads", .tails.len(), .heads.len())]
pub struct HallViolation {
    pub tails: Vec<Vertex>,
    pub heads: Vec<Vertex>,
}

/// Hopcroft–Karp maximum matching on a bipartite graph with `n` left and `n`
/// right vertices. Returns the right partner of each left vertex.
fn hopcroft_karp(adj: &[Vec<Vertex>]) -> Vec<Option<Vertex>> {
    const INF: u32 = u32::MAX;
    let n = adj.len();
    let mut match_l: Vec<Option<Vertex>> = vec![None; n];
    let mut match_r: Vec<Option<Vertex>> = vec![None; n];
    let mut dist = vec![INF; n];
    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n {
            if match_l[u].is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_r[v as usize] {
                    None => found = true,
                    Some(w) => {
                        if dist[w as usize] == INF {
                            dist[w as usize] = dist[u] + 1;
                            queue.push_back(w as usize);
                        }
                    }
                }
            }
        }
        if !found {
            break;
        }
        // Iterative DFS along the layers.
        let mut it = vec![0usize; n];
        for s in 0..n {
            if match_l[s].is_some() {
                continue;
            }
            let mut stack = vec![s];
            while let Some(&u) = stack.last() {
                if it[u] == adj[u].len() {
                    dist[u] = INF;
                    stack.pop();
                    continue;
                }
                let v = adj[u][it[u]] as usize;
                it[u] += 1;
                match match_r[v] {
                    None => {
                        // Augment along the stack.
                        let mut right = v;
                        while let Some(l) = stack.pop() {
                            let prev = match_l[l];
                            match_l[l] = Some(right as Vertex);
                            match_r[right] = Some(l as Vertex);
                            match prev {
                                Some(p) => right = p as usize,
                                None => break,
                            }
                        }
                        stack.clear();
                    }
                    Some(w) if dist[w as usize] == dist[u] + 1 => stack.push(w as usize),
                    Some(_) => {}
                }
            }
        }
    }
    match_l
}

/// Perfect matching between tails and heads of the candidate arcs, read as a
/// permutation. On failure returns a Hall violator grown from the smallest
/// unmatched tail by alternating search.
pub fn find_one_factor(cands: &CandidateArcs) -> std::result::Result<OneFactor, HallViolation> {
    let n = cands.n;
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for a in cands.arcs() {
        if a.tail != a.head {
            adj[a.tail as usize].push(a.head);
        }
    }
    let match_l = hopcroft_karp(&adj);
    if let Some(free) = match_l.iter().position(Option::is_none) {
        let mut match_r = vec![None; n];
        for (u, m) in match_l.iter().enumerate() {
            if let Some(v) = m {
                match_r[*v as usize] = Some(u as Vertex);
            }
        }
        let mut in_s = vec![false; n];
        let mut in_n = vec![false; n];
        let mut queue = VecDeque::from([free]);
        in_s[free] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if std::mem::replace(&mut in_n[v as usize], true) {
                    continue;
                }
                let w = match_r[v as usize].expect("maximum matching leaves no augmenting path") as usize;
                if !std::mem::replace(&mut in_s[w], true) {
                    queue.push_back(w);
                }
            }
        }
        let pick = |f: &[bool]| (0..n as Vertex).filter(|&v| f[v as usize]).collect();
        return Err(HallViolation {
            tails: pick(&in_s),
            heads: pick(&in_n),
        });
    }
    let succ: Vec<Vertex> = match_l.into_iter().map(|m| m.unwrap()).collect();
    Ok(OneFactor::from_successors(succ).expect("matching of loop-free arcs is a derangement"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcs(list: &[(u32, u32)]) -> Vec<Arc> {
        list.iter().map(|&a| Arc::from(a)).collect()
    }

    #[test]
    fn unique_three_cycle() {
        let c = CandidateArcs::from_arcs(3, &arcs(&[(0, 1), (1, 2), (2, 0)]));
        let f = find_one_factor(&c).unwrap();
        assert_eq!(f.successors(), &[1, 2, 0]);
        assert_eq!(f.cycles(), &[vec![0, 1, 2]]);
        assert_eq!(cycle_count(&f), 1);
    }

    #[test]
    fn hall_violation_witness() {
        let c = CandidateArcs::from_arcs(3, &arcs(&[(0, 1), (2, 1)]));
        let w = find_one_factor(&c).unwrap_err();
        assert!(w.heads.len() < w.tails.len());
        // Tail 1 has no candidates at all: the smallest free tail.
        assert_eq!(w.tails, vec![1]);
        assert!(w.heads.is_empty());

        let c = CandidateArcs::from_arcs(3, &arcs(&[(0, 1), (2, 1), (1, 0)]));
        let w = find_one_factor(&c).unwrap_err();
        assert_eq!(w.tails, vec![0, 2]);
        assert_eq!(w.heads, vec![1]);
    }

    #[test]
    fn two_two_cycles() {
        let f = OneFactor::from_successors(vec![1, 0, 3, 2]).unwrap();
        assert_eq!(cycle_count(&f), 2);
        assert_eq!(f.cycles(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(f.pred(3), 2);
    }

    #[test]
    fn cycles_sorted_and_rooted_at_min() {
        let f = OneFactor::from_cycles(7, &[vec![5, 6], vec![4, 2, 3], vec![1, 0]]).unwrap();
        assert_eq!(f.cycles(), &[vec![2, 3, 4], vec![0, 1], vec![5, 6]]);
        assert_eq!(f.cycle_ranks(), vec![1, 1, 0, 0, 0, 2, 2]);
    }

    #[test]
    fn rejects_non_derangements() {
        assert!(OneFactor::from_successors(vec![0, 1]).is_err());
        assert!(OneFactor::from_successors(vec![1, 1]).is_err());
        assert!(OneFactor::from_successors(vec![1, 5]).is_err());
    }

    #[test]
    fn complete_digraph_always_matches() {
        for n in 2..12u32 {
            let all: Vec<Arc> = (0..n)
                .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| Arc::new(a, b)))
                .collect();
            let c = CandidateArcs::from_arcs(n as usize, &all);
            assert!(find_one_factor(&c).is_ok());
        }
    }

    #[test]
    fn in_candidates_count() {
        let mut c = CandidateArcs::new(2, 1);
        c.inn[1].push(Arc::new(0, 1));
        c.inn[0].push(Arc::new(1, 0));
        assert_eq!(c.deficient(), vec![0, 1]);
        assert_eq!(find_one_factor(&c).unwrap().successors(), &[1, 0]);
    }

    #[test]
    fn factor_text_round_trip() {
        let f = OneFactor::from_cycles(5, &[vec![0, 3, 1], vec![2, 4]]).unwrap();
        let mut buf = Vec::new();
        f.write_text(&mut buf).unwrap();
        let s = String::from_utf8(buf.clone()).unwrap();
        assert!(s.contains("# cycle: 1 4 2\n# cycle: 3 5\n"));
        assert_eq!(OneFactor::read_text(&buf[..]).unwrap(), f);
    }
}
