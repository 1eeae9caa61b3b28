//! Compact metric graphs: data model, `.mg` parsing, standard families and
//! the combinatorial and metric statistics consumed by the bounds.

mod euler;
mod families;
mod length;
mod parse;
mod stats;

pub use euler::{eulerian_trail, trail_cover, TrailStep};
pub use families::{DirichletEnd, Family};
pub use length::{Length, LengthParseError};
pub use parse::parse_graph;
pub use stats::{bridges, doubly_connected_pendants, girth, is_doubly_connected, stats, GraphStats, Pendant};

use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    // the message already carries the inner error, so it is not a source
    #[error("line {line}: {error}")]
    AtLine { line: usize, error: Box<GraphError> },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("nonpositive length `{value}` on edge `{edge}`")]
    NonpositiveLength { edge: String, value: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("vertex `{0}` has no incident edge")]
    IsolatedVertex(String),
    #[error("graph has no edges")]
    Empty,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph is disconnected")]
    Disconnected,
}

/// Which end of an edge a stub sits at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn index(self) -> u8 {
        match self {
            End::Tail => 0,
            End::Head => 1,
        }
    }

    pub fn other(self) -> End {
        match self {
            End::Tail => End::Head,
            End::Head => End::Tail,
        }
    }
}

/// One end of one edge; a vertex of degree d owns d stubs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Stub {
    pub edge: usize,
    pub end: End,
}

impl Stub {
    pub fn new(edge: usize, end: End) -> Self {
        Stub { edge, end }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: Length,
}

impl Edge {
    pub fn len(&self) -> f64 {
        self.length.value()
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn endpoint(&self, end: End) -> usize {
        match end {
            End::Tail => self.tail,
            End::Head => self.head,
        }
    }
}

/// A compact metric graph with optional Dirichlet marks.
///
/// Immutable after construction. Every edge has positive finite length,
/// every vertex has at least one incident edge.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    dirichlet: Vec<bool>,
    stubs: Vec<Vec<Stub>>,
}

impl MetricGraph {
    pub fn builder(name: impl Into<String>) -> GraphBuilder {
        GraphBuilder::new(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn length(&self, e: usize) -> f64 {
        self.edges[e].len()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(Edge::len).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(Edge::len).sum()
    }

    pub fn is_dirichlet(&self, v: usize) -> bool {
        self.dirichlet[v]
    }

    pub fn dirichlet_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.dirichlet[v]).collect()
    }

    /// Stubs at `v`, ordered by edge index then end. A loop contributes two.
    pub fn stubs(&self, v: usize) -> &[Stub] {
        &self.stubs[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.stubs[v].len()
    }

    pub fn stub_vertex(&self, s: Stub) -> usize {
        self.edges[s.edge].endpoint(s.end)
    }

    /// Stub label `<edge-id>.<0|1>` used by the cut format.
    pub fn stub_name(&self, s: Stub) -> String {
        format!("{}.{}", self.edges[s.edge].id, s.end.index())
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.vertex_count());
        for e in &self.edges {
            uf.union(e.tail, e.head);
        }
        uf.labels()
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Edge indices of each component, in ascending order.
    pub fn component_edges(&self) -> Vec<Vec<usize>> {
        let (label, n) = self.components();
        let mut out = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out[label[e.tail]].push(i);
        }
        out
    }

    /// The subgraph spanned by the given edges, keeping their incident
    /// vertices and Dirichlet marks.
    pub fn subgraph(&self, edges: &[usize], name: impl Into<String>) -> MetricGraph {
        let mut b = GraphBuilder::new(name);
        let mut seen = vec![false; self.vertex_count()];
        for &e in edges {
            for v in [self.edges[e].tail, self.edges[e].head] {
                if !seen[v] {
                    seen[v] = true;
                    b.vertex(&self.vertices[v]);
                    if self.dirichlet[v] {
                        b.dirichlet(&self.vertices[v]);
                    }
                }
            }
        }
        for &e in edges {
            let ed = &self.edges[e];
            b.edge(&ed.id, &self.vertices[ed.tail], &self.vertices[ed.head], ed.length);
        }
        b.build().expect("subgraph of a valid graph is valid")
    }

    /// Copy with every length multiplied by `t`.
    pub fn scaled(&self, t: f64) -> MetricGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length = e.length.scale(t);
        }
        g
    }

    /// Copy with the Dirichlet marks replaced.
    pub fn with_dirichlet(&self, marks: &[usize]) -> MetricGraph {
        let mut g = self.clone();
        g.dirichlet = vec![false; g.vertex_count()];
        for &v in marks {
            g.dirichlet[v] = true;
        }
        g
    }

    /// Suppresses every unmarked degree-2 vertex joining two distinct edges.
    ///
    /// A cycle keeps one vertex. The result has the same ur-graph, so all
    /// metric invariants agree; vertex identity is not preserved.
    pub fn normalize(&self) -> MetricGraph {
        let mut vertices: Vec<Option<String>> = self.vertices.iter().cloned().map(Some).collect();
        let mut edges: Vec<Option<Edge>> = self.edges.iter().cloned().map(Some).collect();
        loop {
            let mut incident: Vec<Vec<(usize, End)>> = vec![Vec::new(); vertices.len()];
            for (i, e) in edges.iter().enumerate() {
                if let Some(e) = e {
                    incident[e.tail].push((i, End::Tail));
                    incident[e.head].push((i, End::Head));
                }
            }
            let target = (0..vertices.len()).find(|&v| {
                vertices[v].is_some()
                    && !self.dirichlet[v]
                    && incident[v].len() == 2
                    && incident[v][0].0 != incident[v][1].0
            });
            let Some(v) = target else { break };
            let (a, ea) = incident[v][0];
            let (b, eb) = incident[v][1];
            let ea_edge = edges[a].take().unwrap();
            let eb_edge = edges[b].take().unwrap();
            let from = ea_edge.endpoint(ea.other());
            let to = eb_edge.endpoint(eb.other());
            edges[a] = Some(Edge {
                id: ea_edge.id.clone(),
                tail: from,
                head: to,
                length: ea_edge.length.add(&eb_edge.length),
            });
            vertices[v] = None;
        }
        let mut remap = vec![usize::MAX; vertices.len()];
        let mut new_vertices = Vec::new();
        let mut dirichlet = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            if let Some(id) = v {
                remap[i] = new_vertices.len();
                new_vertices.push(id.clone());
                dirichlet.push(self.dirichlet[i]);
            }
        }
        let edges: Vec<Edge> = edges
            .into_iter()
            .flatten()
            .map(|mut e| {
                e.tail = remap[e.tail];
                e.head = remap[e.head];
                e
            })
            .collect();
        MetricGraph::assemble(self.name.clone(), new_vertices, edges, dirichlet)
    }

    fn assemble(name: String, vertices: Vec<String>, edges: Vec<Edge>, dirichlet: Vec<bool>) -> MetricGraph {
        let mut stubs = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            stubs[e.tail].push(Stub::new(i, End::Tail));
            stubs[e.head].push(Stub::new(i, End::Head));
        }
        MetricGraph {
            name,
            vertices,
            edges,
            dirichlet,
            stubs,
        }
    }

    /// Serializes to the `.mg` text format.
    pub fn to_mg(&self) -> String {
        let mut s = format!("graph {}\n", self.name);
        for v in &self.vertices {
            s.push_str(&format!("vertex {v}\n"));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "edge {} {} {} {}\n",
                e.id, self.vertices[e.tail], self.vertices[e.head], e.length
            ));
        }
        for v in self.dirichlet_vertices() {
            s.push_str(&format!("dirichlet {}\n", self.vertices[v]));
        }
        s
    }
}

/// Incremental constructor with validation at [`GraphBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    name: String,
    vertices: Vec<String>,
    edges: Vec<(String, String, String, Length)>,
    dirichlet: Vec<String>,
}

impl GraphBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GraphBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn name(&mut self, name: impl Into<String>) -> &mut Self {
        self.name = name.into();
        self
    }

    pub fn vertex(&mut self, id: &str) -> &mut Self {
        self.vertices.push(id.to_string());
        self
    }

    pub fn edge(&mut self, id: &str, u: &str, v: &str, length: impl Into<Length>) -> &mut Self {
        self.edges
            .push((id.to_string(), u.to_string(), v.to_string(), length.into()));
        self
    }

    pub fn dirichlet(&mut self, v: &str) -> &mut Self {
        self.dirichlet.push(v.to_string());
        self
    }

    pub fn build(&self) -> Result<MetricGraph, GraphError> {
        let mut index = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut edge_ids = HashMap::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (id, u, v, len) in &self.edges {
            if edge_ids.insert(id.as_str(), ()).is_some() {
                return Err(GraphError::DuplicateEdge(id.clone()));
            }
            if !len.is_valid() {
                return Err(GraphError::NonpositiveLength {
                    edge: id.clone(),
                    value: len.to_string(),
                });
            }
            let tail = *index
                .get(u.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(u.clone()))?;
            let head = *index
                .get(v.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
            edges.push(Edge {
                id: id.clone(),
                tail,
                head,
                length: *len,
            });
        }
        if edges.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut dirichlet = vec![false; self.vertices.len()];
        for d in &self.dirichlet {
            let v = *index
                .get(d.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(d.clone()))?;
            dirichlet[v] = true;
        }
        let g = MetricGraph::assemble(self.name.clone(), self.vertices.clone(), edges, dirichlet);
        if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) == 0) {
            return Err(GraphError::IsolatedVertex(g.vertices[v].clone()));
        }
        Ok(g)
    }
}

/// Disjoint-set forest with path halving.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// Dense labels in order of first appearance, and the label count.
    pub(crate) fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut map = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut next = 0;
        for i in 0..n {
            let r = self.find(i);
            if map[r] == usize::MAX {
                map[r] = next;
                next += 1;
            }
            out[i] = map[r];
        }
        (out, next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> MetricGraph {
        MetricGraph::builder("p")
            .vertex("a")
            .vertex("b")
            .vertex("c")
            .edge("e1", "a", "b", 1.0)
            .edge("e2", "b", "c", 2.0)
            .build()
            .unwrap()
    }

    #[test]
    fn builder_validates() {
        let err = MetricGraph::builder("x").vertex("a").edge("e", "a", "b", 1.0).build();
        assert_eq!(err, Err(GraphError::UnknownVertex("b".into())));
        let err = MetricGraph::builder("x").vertex("a").edge("e", "a", "a", 0.0).build();
        assert!(matches!(err, Err(GraphError::NonpositiveLength { .. })));
        let err = MetricGraph::builder("x")
            .vertex("a")
            .edge("e", "a", "a", 1.0)
            .edge("e", "a", "a", 1.0)
            .build();
        assert_eq!(err, Err(GraphError::DuplicateEdge("e".into())));
        let err = MetricGraph::builder("x")
            .vertex("a")
            .vertex("b")
            .edge("e", "a", "a", 1.0)
            .build();
        assert_eq!(err, Err(GraphError::IsolatedVertex("b".into())));
    }

    #[test]
    fn normalize_suppresses_degree_two() {
        let g = path3();
        let n = g.normalize();
        assert_eq!(n.vertex_count(), 2);
        assert_eq!(n.edge_count(), 1);
        assert_eq!(n.total_length(), 3.0);
        assert_eq!(n.normalize(), n);
        let marked = g.with_dirichlet(&[1]).normalize();
        assert_eq!(marked.edge_count(), 2);
    }

    #[test]
    fn normalize_keeps_one_vertex_on_cycles() {
        let g = MetricGraph::builder("c")
            .vertex("a")
            .vertex("b")
            .edge("e1", "a", "b", 1.0)
            .edge("e2", "b", "a", 1.0)
            .build()
            .unwrap();
        let n = g.normalize();
        assert_eq!(n.vertex_count(), 1);
        assert_eq!(n.edge_count(), 1);
        assert!(n.edge(0).is_loop());
    }

    #[test]
    fn components_and_subgraph() {
        let g = MetricGraph::builder("two")
            .vertex("a")
            .vertex("b")
            .vertex("c")
            .vertex("d")
            .edge("e1", "a", "b", 1.0)
            .edge("e2", "c", "d", 2.0)
            .build()
            .unwrap();
        assert_eq!(g.component_count(), 2);
        assert_eq!(g.component_edges(), vec![vec![0], vec![1]]);
        let s = g.subgraph(&[1], "s");
        assert_eq!(s.total_length(), 2.0);
        assert!(s.is_connected());
    }
}
