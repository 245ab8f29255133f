use serde::{Deserialize, Serialize};

/// Vertices are 0-based internally and 1-based in every text format.
pub type Vertex = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub tail: Vertex,
    pub head: Vertex,
}

impl Arc {
    pub const fn new(tail: Vertex, head: Vertex) -> Self {
        Arc { tail, head }
    }

    pub const fn reversed(self) -> Self {
        Arc {
            tail: self.head,
            head: self.tail,
        }
    }
}

impl From<(Vertex, Vertex)> for Arc {
    fn from((tail, head): (Vertex, Vertex)) -> Self {
        Arc { tail, head }
    }
}

/// Simple digraph with sorted, deduplicated out- and in-adjacency lists.
///
/// Self-loops are rejected at construction; membership is a binary search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<Vertex>>,
    inn: Vec<Vec<Vertex>>,
    arc_count: usize,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Digraph {
            n,
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
            arc_count: 0,
        }
    }

    /// Builds a digraph from arcs; duplicates and self-loops are dropped.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Self
    where
        I: IntoIterator<Item = Arc>,
    {
        let mut g = Digraph::empty(n);
        for a in arcs {
            if a.tail == a.head {
                continue;
            }
            assert!(
                (a.tail as usize) < n && (a.head as usize) < n,
                "arc {a:?} out of range for n={n}"
            );
            g.out[a.tail as usize].push(a.head);
            g.inn[a.head as usize].push(a.tail);
        }
        let mut count = 0;
        for list in g.out.iter_mut().chain(g.inn.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        for list in &g.out {
            count += list.len();
        }
        g.arc_count = count;
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn has_arc(&self, tail: Vertex, head: Vertex) -> bool {
        self.out
            .get(tail as usize)
            .is_some_and(|l| l.binary_search(&head).is_ok())
    }

    pub fn contains(&self, a: Arc) -> bool {
        self.has_arc(a.tail, a.head)
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out[v as usize]
    }

    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.inn[v as usize]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out[v as usize].len()
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.inn[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.out.iter().chain(self.inn.iter()).map(Vec::len).max().unwrap_or(0)
    }

    /// Arcs in lexicographic (tail, head) order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().map(move |&v| Arc::new(u as Vertex, v)))
    }

    /// Returns a copy without any arc of `other`.
    pub fn difference(&self, other: &Digraph) -> Digraph {
        Digraph::from_arcs(self.n, self.arcs().filter(|&a| !other.contains(a)))
    }
}
