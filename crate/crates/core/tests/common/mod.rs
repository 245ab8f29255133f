//! Brute-force oracles shared by integration tests and the acceptance suite.
//! None of them call into the algorithms they check.
#![allow(dead_code)]

use hamcolor::{Arc, Digraph, Vertex};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random digraph on `n` vertices, each loop-free ordered pair with probability `p`.
pub fn random_digraph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Digraph {
    let mut arcs = Vec::new();
    for a in 0..n as Vertex {
        for b in 0..n as Vertex {
            if a != b && rng.gen_bool(p) {
                arcs.push(Arc::new(a, b));
            }
        }
    }
    Digraph::from_arcs(n, arcs)
}

/// Adjacency matrix from an arc predicate.
pub fn matrix(n: usize, has: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    (0..n).map(|a| (0..n).map(|b| a != b && has(a, b)).collect()).collect()
}

/// Held–Karp: a directed Hamilton cycle through all `n` vertices, or `None`.
/// Exponential; meant for `n <= 16`.
pub fn held_karp(adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = adj.len();
    if n < 2 {
        return None;
    }
    let full = 1usize << n;
    // reach[mask][v]: a path from 0 covering `mask` ends at v; parent for rebuild.
    let mut parent = vec![vec![usize::MAX; n]; full];
    let mut reach = vec![vec![false; n]; full];
    reach[1][0] = true;
    for mask in 1..full {
        if mask & 1 == 0 {
            continue;
        }
        for v in 0..n {
            if !reach[mask][v] {
                continue;
            }
            for w in 0..n {
                if mask & (1 << w) == 0 && adj[v][w] && !reach[mask | 1 << w][w] {
                    reach[mask | 1 << w][w] = true;
                    parent[mask | 1 << w][w] = v;
                }
            }
        }
    }
    let last = (1..n).find(|&v| reach[full - 1][v] && adj[v][0])?;
    let mut cycle = vec![last];
    let mut mask = full - 1;
    let mut v = last;
    while v != 0 {
        let p = parent[mask][v];
        mask &= !(1 << v);
        v = p;
        cycle.push(v);
    }
    cycle.reverse();
    Some(cycle)
}

/// Visits every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    if f(&p) {
        return true;
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            if f(&p) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

/// Every directed Hamilton cycle, each once, starting at vertex 0.
pub fn all_hamilton_cycles(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for_each_permutation(n - 1, |p| {
        let cyc: Vec<usize> = std::iter::once(0).chain(p.iter().map(|&x| x + 1)).collect();
        if (0..n).all(|i| adj[cyc[i]][cyc[(i + 1) % n]]) {
            out.push(cyc);
        }
        false
    });
    out
}

/// Whether some bijection `v -> s(v)` uses only allowed pairs (an SDR of the
/// allowed-successor sets).
pub fn has_sdr(allowed: &[Vec<bool>]) -> bool {
    for_each_permutation(allowed.len(), |s| s.iter().enumerate().all(|(v, &w)| allowed[v][w]))
}

/// Randomized rotation-extension search for a Hamilton cycle, for graphs too
/// large for Held–Karp. Returns `None` when the budget runs out.
pub fn heuristic_hamilton<R: Rng>(adj: &[Vec<bool>], rng: &mut R, budget: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    if n < 2 {
        return None;
    }
    for _ in 0..budget {
        let mut path = vec![rng.gen_range(0..n)];
        let mut on = vec![false; n];
        on[path[0]] = true;
        let mut steps = 0;
        while steps < 50 * n {
            steps += 1;
            let end = *path.last().unwrap();
            let mut ext: Vec<usize> = (0..n).filter(|&w| !on[w] && adj[end][w]).collect();
            if let Some(&w) = ext.choose(rng) {
                path.push(w);
                on[w] = true;
                if path.len() == n && adj[w][path[0]] {
                    return Some(path);
                }
                continue;
            }
            if path.len() == n && adj[end][path[0]] {
                return Some(path);
            }
            // Rotate: end -> path[i] lets us reverse... directed: use the
            // double rotation with arcs (end, p_k) and (p_{k-1}, p_l).
            let s = path.len();
            let mut moves = Vec::new();
            for k in 2..s {
                if adj[end][path[k - 1]] {
                    for l in k + 1..=s {
                        if adj[path[k - 2]][path[l - 1]] {
                            moves.push((k, l));
                        }
                    }
                }
            }
            let Some(&(k, l)) = moves.choose(rng) else { break };
            let mut np = path[..k - 1].to_vec();
            np.extend_from_slice(&path[l - 1..]);
            np.extend_from_slice(&path[k - 1..l - 1]);
            path = np;
            ext.clear();
        }
    }
    None
}
