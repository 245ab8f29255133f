//! Independent checks of Hamilton cycles, colorings and 1-factors.
//!
//! Nothing here reads algorithm state; every check works from the output
//! object and the underlying arc list. On failure the violation reports the
//! smallest offending position.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coloring::Color;
use crate::graph::{Arc, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Predicate {
    /// Cycle or factor has the wrong number of entries.
    Length,
    VertexRange,
    RepeatedVertex,
    MissingArc,
    WrongColor,
    RepeatedColor,
    /// Some vertex lacks an in- or out-arc of some color.
    ColorDegree,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predicate::Length => "length",
            Predicate::VertexRange => "vertex-range",
            Predicate::RepeatedVertex => "repeated-vertex",
            Predicate::MissingArc => "missing-arc",
            Predicate::WrongColor => "wrong-color",
            Predicate::RepeatedColor => "repeated-color",
            Predicate::ColorDegree => "color-degree",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub predicate: Predicate,
    /// Position in the checked sequence (cycle index, vertex, ...).
    pub position: usize,
    /// Vertices involved, 0-based.
    pub vertices: Vec<Vertex>,
    pub color: Option<Color>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at position {}", self.predicate, self.position)?;
        if !self.vertices.is_empty() {
            let vs: Vec<String> = self.vertices.iter().map(|v| (v + 1).to_string()).collect();
            write!(f, " (vertices {})", vs.join(" "))?;
        }
        if let Some(c) = self.color {
            write!(f, " (color {})", c + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub violation: Option<Violation>,
}

impl Verdict {
    pub fn ok() -> Self {
        Verdict {
            pass: true,
            violation: None,
        }
    }

    fn fail(predicate: Predicate, position: usize, vertices: Vec<Vertex>, color: Option<Color>) -> Self {
        Verdict {
            pass: false,
            violation: Some(Violation {
                predicate,
                position,
                vertices,
                color,
            }),
        }
    }
}

/// Checks that `cycle` lists each of `0..n` once and that consecutive
/// vertices (cyclically) are joined by arcs according to `has_arc`.
pub fn is_hamilton_cycle<F>(cycle: &[Vertex], n: usize, has_arc: F) -> Verdict
where
    F: Fn(Vertex, Vertex) -> bool,
{
    if let Some(v) = permutation_violation(cycle, n) {
        return v;
    }
    for i in 0..n {
        let (a, b) = (cycle[i], cycle[(i + 1) % n]);
        if !has_arc(a, b) {
            return Verdict::fail(Predicate::MissingArc, i, vec![a, b], None);
        }
    }
    Verdict::ok()
}

fn permutation_violation(seq: &[Vertex], n: usize) -> Option<Verdict> {
    if seq.len() != n || n == 0 {
        return Some(Verdict::fail(Predicate::Length, seq.len(), Vec::new(), None));
    }
    let mut seen = vec![false; n];
    for (i, &v) in seq.iter().enumerate() {
        if v as usize >= n {
            return Some(Verdict::fail(Predicate::VertexRange, i, vec![v], None));
        }
        if std::mem::replace(&mut seen[v as usize], true) {
            return Some(Verdict::fail(Predicate::RepeatedVertex, i, vec![v], None));
        }
    }
    None
}

fn color_map(arcs: &[Arc], colors: &[Color]) -> HashMap<Arc, Color> {
    assert_eq!(arcs.len(), colors.len(), "arcs and colors differ in length");
    arcs.iter().copied().zip(colors.iter().copied()).collect()
}

/// Checks that `cycle` is a Hamilton cycle using only arcs of color `c`.
pub fn verify_monochromatic(cycle: &[Vertex], n: usize, arcs: &[Arc], colors: &[Color], c: Color) -> Verdict {
    let map = color_map(arcs, colors);
    let v = is_hamilton_cycle(cycle, n, |a, b| map.contains_key(&Arc::new(a, b)));
    if !v.pass {
        return v;
    }
    for i in 0..n {
        let a = Arc::new(cycle[i], cycle[(i + 1) % n]);
        let got = map[&a];
        if got != c {
            return Verdict::fail(Predicate::WrongColor, i, vec![a.tail, a.head], Some(got));
        }
    }
    Verdict::ok()
}

/// Checks that `cycle` is a Hamilton cycle of the colored arcs whose arc
/// colors are pairwise distinct.
pub fn verify_rainbow(cycle: &[Vertex], n: usize, arcs: &[Arc], colors: &[Color]) -> Verdict {
    let map = color_map(arcs, colors);
    let v = is_hamilton_cycle(cycle, n, |a, b| map.contains_key(&Arc::new(a, b)));
    if !v.pass {
        return v;
    }
    let mut first_use: HashMap<Color, usize> = HashMap::new();
    for i in 0..n {
        let a = Arc::new(cycle[i], cycle[(i + 1) % n]);
        let c = map[&a];
        if first_use.insert(c, i).is_some() {
            return Verdict::fail(Predicate::RepeatedColor, i, vec![a.tail, a.head], Some(c));
        }
    }
    Verdict::ok()
}

/// Checks that every vertex has at least one out-arc and one in-arc of every
/// color in `0..q`. The witness is the smallest vertex, then color, with
/// out-arcs checked before in-arcs.
pub fn verify_color_degree(n: usize, q: usize, arcs: &[Arc], colors: &[Color]) -> Verdict {
    assert_eq!(arcs.len(), colors.len(), "arcs and colors differ in length");
    let mut out = vec![false; n * q];
    let mut inn = vec![false; n * q];
    for (a, &c) in arcs.iter().zip(colors) {
        if c as usize >= q {
            continue;
        }
        out[a.tail as usize * q + c as usize] = true;
        inn[a.head as usize * q + c as usize] = true;
    }
    for v in 0..n {
        for c in 0..q {
            for (table, pos) in [(&out, 0), (&inn, 1)] {
                if !table[v * q + c] {
                    return Verdict::fail(
                        Predicate::ColorDegree,
                        2 * (v * q + c) + pos,
                        vec![v as Vertex],
                        Some(c as Color),
                    );
                }
            }
        }
    }
    Verdict::ok()
}

/// Checks that `succ` is a permutation of `0..n` with every `v -> succ[v]`
/// an arc according to `has_arc`.
pub fn verify_factor<F>(succ: &[Vertex], n: usize, has_arc: F) -> Verdict
where
    F: Fn(Vertex, Vertex) -> bool,
{
    if let Some(v) = permutation_violation(succ, n) {
        return v;
    }
    for (v, &w) in succ.iter().enumerate() {
        if !has_arc(v as Vertex, w) {
            return Verdict::fail(Predicate::MissingArc, v, vec![v as Vertex, w], None);
        }
    }
    Verdict::ok()
}

/// Writes a cycle file: an optional `# color c` line, then the vertices
/// (1-based) on one line.
pub fn write_cycle_text<W: std::io::Write>(mut w: W, cycle: &[Vertex], color: Option<Color>) -> crate::Result<()> {
    if let Some(c) = color {
        writeln!(w, "# color {}", c + 1)?;
    }
    let vs: Vec<String> = cycle.iter().map(|v| (v + 1).to_string()).collect();
    writeln!(w, "{}", vs.join(" "))?;
    Ok(())
}

/// Reads a cycle file written by [`write_cycle_text`]. Vertices may span
/// several lines.
pub fn read_cycle_text<R: std::io::BufRead>(r: R) -> crate::Result<(Vec<Vertex>, Option<Color>)> {
    let mut cycle = Vec::new();
    let mut color = None;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# color") {
            let c: u32 = rest
                .trim()
                .parse()
                .map_err(|_| crate::Error::parse(i + 1, "bad color"))?;
            if c == 0 {
                return Err(crate::Error::parse(i + 1, "colors are 1-based"));
            }
            color = Some(c - 1);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for f in line.split_whitespace() {
            match f.parse::<u32>() {
                Ok(v) if v >= 1 => cycle.push(v - 1),
                _ => return Err(crate::Error::parse(i + 1, format!("bad vertex {f:?}"))),
            }
        }
    }
    Ok((cycle, color))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(a: Vertex, b: Vertex) -> bool {
        a != b
    }

    #[test]
    fn hamilton_accepts_and_rejects() {
        assert!(is_hamilton_cycle(&[0, 2, 1, 3], 4, complete).pass);
        let v = is_hamilton_cycle(&[0, 2, 2, 3], 4, complete);
        assert_eq!(v.violation.unwrap().predicate, Predicate::RepeatedVertex);
        let v = is_hamilton_cycle(&[0, 1, 2], 4, complete);
        assert_eq!(v.violation.unwrap().predicate, Predicate::Length);
        let v = is_hamilton_cycle(&[0, 1, 2, 7], 4, complete);
        assert_eq!(v.violation.unwrap().predicate, Predicate::VertexRange);
    }

    #[test]
    fn missing_arc_reports_first_position() {
        // arcs of a directed 4-cycle 0->1->2->3->0 only
        let has = |a: Vertex, b: Vertex| b == (a + 1) % 4;
        assert!(is_hamilton_cycle(&[0, 1, 2, 3], 4, has).pass);
        let v = is_hamilton_cycle(&[0, 1, 3, 2], 4, has).violation.unwrap();
        assert_eq!(v.predicate, Predicate::MissingArc);
        assert_eq!(v.position, 1);
        assert_eq!(v.vertices, vec![1, 3]);
        // closing arc counts too
        let v = is_hamilton_cycle(&[1, 2, 3, 0], 4, |a, b| b == (a + 1) % 4 && a != 0)
            .violation
            .unwrap();
        assert_eq!(v.position, 3);
    }

    #[test]
    fn monochromatic_and_rainbow() {
        let arcs: Vec<Arc> = [(0, 1), (1, 2), (2, 0), (0, 2)].map(Arc::from).to_vec();
        let colors = vec![0, 0, 1, 1];
        let v = verify_monochromatic(&[0, 1, 2], 3, &arcs, &colors, 0)
            .violation
            .unwrap();
        assert_eq!(v.predicate, Predicate::WrongColor);
        assert_eq!(v.position, 2);
        let v = verify_rainbow(&[0, 1, 2], 3, &arcs, &colors).violation.unwrap();
        assert_eq!(v.predicate, Predicate::RepeatedColor);
        assert_eq!(v.position, 1);
        assert!(verify_rainbow(&[0, 1, 2], 3, &arcs, &[0, 1, 2, 0]).pass);
        assert!(verify_monochromatic(&[0, 1, 2], 3, &arcs, &[1, 1, 1, 0], 1).pass);
    }

    #[test]
    fn color_degree_witness_is_smallest() {
        let arcs: Vec<Arc> = [(0, 1), (1, 0), (0, 1), (1, 0)].map(Arc::from).to_vec();
        assert!(verify_color_degree(2, 2, &arcs, &[0, 0, 1, 1]).pass);
        let v = verify_color_degree(2, 2, &arcs, &[0, 0, 1, 0]).violation.unwrap();
        // vertex 0 has out-color 1 (arc 0->1) but no in-color 1
        assert_eq!((v.vertices[0], v.color), (0, Some(1)));
        // position = 2 * (v * q + c) + dir, with dir 1 for in-colors
        assert_eq!(v.position, 3);
    }

    #[test]
    fn cycle_text_round_trip() {
        let mut buf = Vec::new();
        write_cycle_text(&mut buf, &[2, 0, 1], Some(1)).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "# color 2\n3 1 2\n");
        assert_eq!(read_cycle_text(&buf[..]).unwrap(), (vec![2, 0, 1], Some(1)));
        assert!(read_cycle_text("1 0 2".as_bytes()).is_err());
    }

    #[test]
    fn factor_checks() {
        let has = |a: Vertex, b: Vertex| a != b;
        assert!(verify_factor(&[1, 0, 3, 2], 4, has).pass);
        assert_eq!(
            verify_factor(&[1, 1, 3, 2], 4, has).violation.unwrap().predicate,
            Predicate::RepeatedVertex
        );
        assert_eq!(
            verify_factor(&[0, 2, 3, 1], 4, has).violation.unwrap().predicate,
            Predicate::MissingArc
        );
    }
}
