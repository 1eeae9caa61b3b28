use super::PartitionError;
use crate::graph::{End, MetricGraph, Stub};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Interior cuts and vertex splits on a fixed ambient graph.
///
/// Cuts are stored per edge index as fractions `t ∈ (0, 1)` of the edge
/// length, ascending. A split is a set partition of a vertex's stubs into at
/// least two blocks; blocks are kept sorted so that equal splits compare
/// equal.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CutConfig {
    cuts: BTreeMap<usize, Vec<f64>>,
    splits: BTreeMap<usize, Vec<Vec<Stub>>>,
}

impl CutConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a cut keeping the per-edge list sorted. Validity is checked
    /// by [`CutConfig::validate`].
    pub fn add_cut(&mut self, edge: usize, t: f64) -> &mut Self {
        let list = self.cuts.entry(edge).or_default();
        let at = list.partition_point(|&x| x < t);
        list.insert(at, t);
        self
    }

    pub fn with_cut(mut self, edge: usize, t: f64) -> Self {
        self.add_cut(edge, t);
        self
    }

    /// Removes the `index`-th cut on `edge`, if present.
    pub fn remove_cut(&mut self, edge: usize, index: usize) -> &mut Self {
        if let Some(list) = self.cuts.get_mut(&edge) {
            if index < list.len() {
                list.remove(index);
            }
            if list.is_empty() {
                self.cuts.remove(&edge);
            }
        }
        self
    }

    /// Replaces the split at `vertex`; a single block means no split.
    pub fn set_split(&mut self, vertex: usize, blocks: Vec<Vec<Stub>>) -> &mut Self {
        let mut blocks: Vec<Vec<Stub>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort();
                b
            })
            .collect();
        blocks.sort();
        if blocks.len() <= 1 {
            self.splits.remove(&vertex);
        } else {
            self.splits.insert(vertex, blocks);
        }
        self
    }

    pub fn with_split(mut self, vertex: usize, blocks: Vec<Vec<Stub>>) -> Self {
        self.set_split(vertex, blocks);
        self
    }

    /// Splits `vertex` into one block per stub.
    pub fn with_full_split(self, g: &MetricGraph, vertex: usize) -> Self {
        let blocks = g.stubs(vertex).iter().map(|&s| vec![s]).collect();
        self.with_split(vertex, blocks)
    }

    /// Sorted cut coordinates on `edge`.
    pub fn edge_cuts(&self, edge: usize) -> &[f64] {
        self.cuts.get(&edge).map_or(&[], Vec::as_slice)
    }

    /// All cuts as `(edge, t)`, by edge then coordinate.
    pub fn cuts(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.cuts.iter().flat_map(|(&e, ts)| ts.iter().map(move |&t| (e, t)))
    }

    pub fn splits(&self) -> &BTreeMap<usize, Vec<Vec<Stub>>> {
        &self.splits
    }

    pub fn cut_count(&self) -> usize {
        self.cuts.values().map(Vec::len).sum()
    }

    /// Number of cuts on each edge of `g`.
    pub fn counts(&self, g: &MetricGraph) -> Vec<usize> {
        (0..g.edge_count()).map(|e| self.edge_cuts(e).len()).collect()
    }

    /// All coordinates flattened by edge, then ascending.
    pub fn positions(&self) -> Vec<f64> {
        self.cuts().map(|(_, t)| t).collect()
    }

    /// Same topology with coordinates replaced, in [`CutConfig::positions`] order.
    pub fn with_positions(&self, positions: &[f64]) -> CutConfig {
        let mut out = self.clone();
        let mut it = positions.iter();
        for ts in out.cuts.values_mut() {
            for t in ts.iter_mut() {
                *t = *it.next().expect("position vector too short");
            }
        }
        out
    }

    pub fn validate(&self, g: &MetricGraph) -> Result<(), PartitionError> {
        for (&e, ts) in &self.cuts {
            if e >= g.edge_count() {
                return Err(PartitionError::UnknownEdge(e.to_string()));
            }
            for (i, &t) in ts.iter().enumerate() {
                if !(t > 0.0 && t < 1.0) {
                    return Err(PartitionError::InvalidCoordinate {
                        edge: g.edge(e).id.clone(),
                        t,
                    });
                }
                if i > 0 && ts[i - 1] >= t {
                    return Err(PartitionError::RepeatedCoordinate {
                        edge: g.edge(e).id.clone(),
                        t,
                    });
                }
            }
        }
        for (&v, blocks) in &self.splits {
            if v >= g.vertex_count() {
                return Err(PartitionError::UnknownVertex(v.to_string()));
            }
            let name = g.vertex_id(v).to_string();
            let mut seen: Vec<Stub> = blocks.iter().flatten().copied().collect();
            if blocks.iter().any(Vec::is_empty) {
                return Err(PartitionError::BadSplit {
                    vertex: name,
                    reason: "empty block".into(),
                });
            }
            seen.sort();
            let mut own = g.stubs(v).to_vec();
            own.sort();
            if seen != own {
                return Err(PartitionError::BadSplit {
                    vertex: name,
                    reason: "blocks must contain each incident stub exactly once".into(),
                });
            }
        }
        Ok(())
    }

    /// Text form: `cut <edge-id> <t>` and `split <vertex-id> a.0,b.1|c.0`.
    /// Coordinates use the shortest round-trip decimal.
    pub fn to_text(&self, g: &MetricGraph) -> String {
        let mut s = String::new();
        for (e, t) in self.cuts() {
            let _ = writeln!(s, "cut {} {}", g.edge(e).id, t);
        }
        for (&v, blocks) in &self.splits {
            let blocks: Vec<String> = blocks
                .iter()
                .map(|b| b.iter().map(|&st| g.stub_name(st)).collect::<Vec<_>>().join(","))
                .collect();
            let _ = writeln!(s, "split {} {}", g.vertex_id(v), blocks.join("|"));
        }
        s
    }

    pub fn parse(g: &MetricGraph, text: &str) -> Result<CutConfig, PartitionError> {
        let mut c = CutConfig::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| PartitionError::Syntax {
                line: no + 1,
                message: msg.to_string(),
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["cut", edge, t] => {
                    let e = g
                        .edge_index(edge)
                        .ok_or_else(|| PartitionError::UnknownEdge(edge.to_string()))?;
                    let t = parse_coordinate(t).ok_or_else(|| syntax("bad coordinate"))?;
                    c.add_cut(e, t);
                }
                ["split", vertex, blocks] => {
                    let v = g
                        .vertex_index(vertex)
                        .ok_or_else(|| PartitionError::UnknownVertex(vertex.to_string()))?;
                    let mut parsed = Vec::new();
                    for block in blocks.split('|') {
                        let mut b = Vec::new();
                        for name in block.split(',').filter(|x| !x.is_empty()) {
                            b.push(parse_stub(g, name).ok_or_else(|| syntax(&format!("bad stub {name}")))?);
                        }
                        parsed.push(b);
                    }
                    if parsed.len() < 2 {
                        return Err(syntax("a split needs at least two blocks"));
                    }
                    if c.splits.contains_key(&v) {
                        return Err(syntax("vertex split twice"));
                    }
                    c.set_split(v, parsed);
                }
                _ => return Err(syntax("expected `cut <edge> <t>` or `split <vertex> <blocks>`")),
            }
        }
        c.validate(g)?;
        Ok(c)
    }

    /// Total order used to break energy ties deterministically.
    pub fn lex_cmp(&self, other: &CutConfig) -> Ordering {
        let a: Vec<(usize, f64)> = self.cuts().collect();
        let b: Vec<(usize, f64)> = other.cuts().collect();
        for (x, y) in a.iter().zip(&b) {
            let o = x.0.cmp(&y.0).then(x.1.total_cmp(&y.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len()).then_with(|| {
            let sa: Vec<_> = self.splits.iter().collect();
            let sb: Vec<_> = other.splits.iter().collect();
            sa.cmp(&sb)
        })
    }
}

fn parse_coordinate(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (f64, f64) = (p.parse().ok()?, q.parse().ok()?);
            Some(p / q)
        }
        None => s.parse().ok(),
    }
}

fn parse_stub(g: &MetricGraph, name: &str) -> Option<Stub> {
    let (edge, end) = name.rsplit_once('.')?;
    let e = g.edge_index(edge)?;
    let end = match end {
        "0" => End::Tail,
        "1" => End::Head,
        _ => return None,
    };
    Some(Stub::new(e, end))
}
