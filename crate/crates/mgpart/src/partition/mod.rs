//! Partitions of a metric graph into clusters, and their energies.
//!
//! A [`CutConfig`] lists interior cut points and vertex splits. Cutting
//! produces pieces; the connected components of the cut graph are the
//! clusters. Every vertex created by cutting is a boundary vertex of its
//! cluster and carries the Dirichlet condition in the Dirichlet problem;
//! all other vertices stay natural.
//!
//! A partition is rigid when every cut location (interior cut point or split
//! vertex) touches at least two clusters, connected-only when clusters are
//! connected but some location lies inside a single cluster, and invalid
//! when a cluster is disconnected.

mod config;
mod layout;

pub use config::CutConfig;
pub use layout::{ClusterTemplate, Layout, Location, LocationKind, Node, Piece};

use crate::graph::{Length, MetricGraph};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("cut coordinate {t} on edge {edge} is not in (0, 1)")]
    InvalidCoordinate { edge: String, t: f64 },
    #[error("cut coordinate {t} on edge {edge} repeats or is out of order")]
    RepeatedCoordinate { edge: String, t: f64 },
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("split of vertex {vertex}: {reason}")]
    BadSplit { vertex: String, reason: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("cluster labels must cover the {expected} components with 0..n")]
    BadGrouping { expected: usize },
    #[error("partition is invalid")]
    InvalidPartition,
    #[error("cluster {0} has no boundary vertex, the Dirichlet problem is undefined")]
    EmptyBoundary(usize),
}

/// Which ground state each cluster contributes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Problem {
    /// `λ₁` with Dirichlet conditions at the cut-created vertices.
    Dirichlet,
    /// `μ₂` with natural conditions everywhere.
    Natural,
}

impl Problem {
    pub fn is_natural(self) -> bool {
        self == Problem::Natural
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Dirichlet => "dirichlet",
            Problem::Natural => "natural",
        })
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(Problem::Dirichlet),
            "natural" | "neumann" | "n" => Ok(Problem::Natural),
            _ => Err(format!("unknown problem {s:?}, expected dirichlet or natural")),
        }
    }
}

/// The exponent `p ∈ [1, ∞]` of the energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Exponent, String> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else {
            Err(format!("exponent must lie in [1, inf], got {p}"))
        }
    }

    /// `((1/k) Σ xᵢᵖ)^{1/p}`, or the maximum for `p = ∞`.
    pub fn mean(self, values: &[f64]) -> f64 {
        match self {
            Exponent::Infinity => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Exponent::Finite(p) => {
                // scale by the maximum so large p cannot overflow
                let top = values.iter().copied().fold(0.0, f64::max);
                if top == 0.0 {
                    return 0.0;
                }
                let s: f64 = values.iter().map(|&x| (x / top).powf(p)).sum();
                top * (s / values.len() as f64).powf(1.0 / p)
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => Exponent::finite(other.parse::<f64>().map_err(|e| format!("bad exponent {s:?}: {e}"))?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Rigid,
    ConnectedOnly,
    Invalid,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Rigid => "rigid",
            Classification::ConnectedOnly => "connected_only",
            Classification::Invalid => "invalid",
        })
    }
}

/// Part `[from, to]` of an ambient edge, as fractions of its length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub edge: usize,
    pub from: f64,
    pub to: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    /// Cut-created vertices are marked Dirichlet on this graph.
    pub graph: MetricGraph,
    /// Indices (in `graph`) of the vertices created by cutting.
    pub boundary: Vec<usize>,
    pub support: Vec<Segment>,
    pub length: f64,
    /// Pieces of the layout making up this cluster.
    pub pieces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    ambient: MetricGraph,
    config: CutConfig,
    layout: Layout,
    positions: Vec<f64>,
    cluster_of_component: Vec<usize>,
    clusters: Vec<Cluster>,
    classification: Classification,
}

/// Cuts `g` according to `c`; the clusters are the components of the cut
/// graph, numbered by their first piece (edge order, then along the edge).
pub fn apply_cuts(g: &MetricGraph, c: &CutConfig) -> Result<Partition, PartitionError> {
    Partition::build(g, c, None)
}

/// Classification of a partition.
pub fn classify(p: &Partition) -> Classification {
    p.classification
}

impl Partition {
    /// Like [`apply_cuts`] but merges the components into clusters by
    /// `labels` (one label per component, covering `0..n`). A cluster made
    /// of several components is disconnected, which makes the partition
    /// invalid.
    pub fn with_grouping(g: &MetricGraph, c: &CutConfig, labels: &[usize]) -> Result<Partition, PartitionError> {
        Partition::build(g, c, Some(labels))
    }

    fn build(g: &MetricGraph, c: &CutConfig, labels: Option<&[usize]>) -> Result<Partition, PartitionError> {
        c.validate(g)?;
        let layout = Layout::new(g, &c.counts(g), c.splits());
        let positions = c.positions();
        let groups = match labels {
            None => (0..layout.component_count).collect::<Vec<_>>(),
            Some(l) => {
                let n = l.iter().max().map_or(0, |m| m + 1);
                let covered = (0..n).all(|i| l.contains(&i));
                if l.len() != layout.component_count || !covered {
                    return Err(PartitionError::BadGrouping {
                        expected: layout.component_count,
                    });
                }
                l.to_vec()
            }
        };
        Ok(Partition::from_layout(g, c.clone(), layout, positions, groups))
    }

    /// Assembles a partition from a prebuilt layout; `config` must match it.
    pub(crate) fn from_layout(
        g: &MetricGraph,
        config: CutConfig,
        layout: Layout,
        positions: Vec<f64>,
        cluster_of_component: Vec<usize>,
    ) -> Partition {
        let k = cluster_of_component.iter().max().map_or(0, |m| m + 1);
        let mut pieces_of = vec![Vec::new(); k];
        for (i, &comp) in layout.component_of_piece.iter().enumerate() {
            pieces_of[cluster_of_component[comp]].push(i);
        }
        let clusters: Vec<Cluster> = pieces_of
            .iter()
            .enumerate()
            .map(|(ci, pieces)| build_cluster(g, &layout, &positions, pieces, ci))
            .collect();
        let connected = clusters.iter().all(|c| c.graph.is_connected());
        let classification = if !connected {
            Classification::Invalid
        } else if layout.is_rigid_under(&cluster_of_component) {
            Classification::Rigid
        } else {
            Classification::ConnectedOnly
        };
        Partition {
            ambient: g.clone(),
            config,
            layout,
            positions,
            cluster_of_component,
            clusters,
            classification,
        }
    }

    pub fn ambient(&self) -> &MetricGraph {
        &self.ambient
    }

    pub fn config(&self) -> &CutConfig {
        &self.config
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn cluster_lengths(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.length).collect()
    }

    /// Largest cluster length `L_max`.
    pub fn largest_cluster_length(&self) -> f64 {
        self.clusters.iter().map(|c| c.length).fold(0.0, f64::max)
    }

    fn piece_lengths(&self) -> Vec<f64> {
        self.layout.piece_lengths(&self.ambient.lengths(), &self.positions)
    }
}

fn build_cluster(g: &MetricGraph, layout: &Layout, positions: &[f64], pieces: &[usize], ci: usize) -> Cluster {
    let mut b = MetricGraph::builder(format!("{}#{}", g.name(), ci));
    let mut names: Vec<Option<String>> = vec![None; layout.nodes.len()];
    let mut boundary_names = Vec::new();
    let mut support = Vec::new();
    let mut length = 0.0;
    for &i in pieces {
        let p = layout.pieces[i];
        for n in [p.tail, p.head] {
            if names[n].is_none() {
                let name = node_name(g, &layout.nodes[n]);
                b.vertex(&name);
                if layout.nodes[n].is_boundary() {
                    b.dirichlet(&name);
                    boundary_names.push(name.clone());
                }
                names[n] = Some(name);
            }
        }
        let e = g.edge(p.edge);
        let (t0, t1) = layout.piece_span(i, positions);
        let (id, len) = if layout.edge_cuts[p.edge] == 0 {
            (e.id.clone(), e.length)
        } else {
            (format!("{}[{}]", e.id, p.index), Length::approx(e.len() * (t1 - t0)))
        };
        length += len.value();
        b.edge(
            &id,
            names[p.tail].as_deref().unwrap(),
            names[p.head].as_deref().unwrap(),
            len,
        );
        support.push(Segment {
            edge: p.edge,
            from: t0,
            to: t1,
        });
    }
    let graph = b.build().expect("pieces of a valid configuration form a valid graph");
    let boundary = boundary_names.iter().filter_map(|n| graph.vertex_index(n)).collect();
    Cluster {
        graph,
        boundary,
        support,
        length,
        pieces: pieces.to_vec(),
    }
}

fn node_name(g: &MetricGraph, n: &Node) -> String {
    match *n {
        Node::Vertex { vertex, block: None } => g.vertex_id(vertex).to_string(),
        Node::Vertex { vertex, block: Some(b) } => format!("{}#{}", g.vertex_id(vertex), b),
        Node::Cut { edge, index, upper } => {
            format!("{}@{}{}", g.edge(edge).id, index, if upper { '+' } else { '-' })
        }
    }
}

/// Per-cluster ground states and the assembled energy.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub problem: Problem,
    pub p: Exponent,
    /// `(cluster index, eigenvalue, cluster length)`.
    pub per_cluster: Vec<(usize, f64, f64)>,
    pub energy: f64,
    pub largest_cluster_length: f64,
}

impl EnergyReport {
    /// Cluster eigenvalues respect the lower bounds `π²/(4|G_i|²)`
    /// (Dirichlet) and `π²/|G_i|²` (natural), with relative slack `rel`.
    pub fn cluster_bounds_hold(&self, rel: f64) -> bool {
        let pi2 = std::f64::consts::PI.powi(2);
        self.per_cluster.iter().all(|&(_, ev, len)| {
            let bound = match self.problem {
                Problem::Dirichlet => pi2 / (4.0 * len * len),
                Problem::Natural => pi2 / (len * len),
            };
            ev >= bound * (1.0 - rel)
        })
    }

    /// CSV table `cluster,length,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("cluster,length,eigenvalue\n");
        for &(i, ev, len) in &self.per_cluster {
            s.push_str(&format!("{i},{len:.17e},{ev:.17e}\n"));
        }
        s
    }
}

/// Energy `Λ_p` of a partition for the given problem.
pub fn energy(part: &Partition, problem: Problem, p: Exponent) -> Result<EnergyReport, PartitionError> {
    if part.classification == Classification::Invalid {
        return Err(PartitionError::InvalidPartition);
    }
    let natural = problem.is_natural();
    let lengths = part.piece_lengths();
    let templates: Vec<ClusterTemplate> = part
        .clusters
        .iter()
        .map(|c| ClusterTemplate::new(&part.layout, &c.pieces, natural))
        .collect();
    if !natural {
        if let Some(i) = templates.iter().position(|t| !t.has_boundary()) {
            return Err(PartitionError::EmptyBoundary(i));
        }
    }
    let values: Vec<f64> = {
        use rayon::prelude::*;
        templates.par_iter().map(|t| t.eval(&lengths)).collect()
    };
    let report = EnergyReport {
        problem,
        p,
        per_cluster: part
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (i, values[i], c.length))
            .collect(),
        energy: p.mean(&values),
        largest_cluster_length: part.largest_cluster_length(),
    };
    debug_assert!(
        report.cluster_bounds_hold(1e-9),
        "cluster below its isoperimetric bound"
    );
    Ok(report)
}

/// Sorted adjacency lists: clusters `i ≠ j` are neighbours when some cut
/// location touches both.
pub fn neighbours(part: &Partition) -> Vec<Vec<usize>> {
    let k = part.k();
    let mut adj = vec![std::collections::BTreeSet::new(); k];
    let comp = part.layout.component_of_node();
    for loc in &part.layout.locations {
        let cl: Vec<usize> = loc.nodes.iter().map(|&n| part.cluster_of_component[comp[n]]).collect();
        for &a in &cl {
            for &b in &cl {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{End, Family, Stub};
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;

    fn lasso() -> MetricGraph {
        Family::Lasso {
            stick: 1.into(),
            ring: 1.into(),
        }
        .build()
        .unwrap()
    }

    #[test]
    fn loop_two_arcs() {
        let g = Family::Loop(1.into()).build().unwrap();
        let c = CutConfig::new().with_cut(0, 0.25).with_cut(0, 0.75);
        let p = apply_cuts(&g, &c).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.classification(), Classification::Rigid);
        for cl in p.clusters() {
            assert!((cl.length - 0.5).abs() < 1e-15);
            assert_eq!(cl.graph.normalize().edge_count(), 1);
            assert_eq!(cl.boundary.len(), 2);
        }
        assert_eq!(neighbours(&p), vec![vec![1], vec![0]]);
        let r = energy(&p, Problem::Natural, Exponent::Infinity).unwrap();
        assert!((r.energy - 4.0 * PI2).abs() < 1e-10);
    }

    #[test]
    fn lasso_splits() {
        let g = lasso();
        let v = g.vertex_index("v").unwrap();
        // stick alone versus the loop
        let c = CutConfig::new().with_split(
            v,
            vec![
                vec![Stub::new(0, End::Head)],
                vec![Stub::new(1, End::Tail), Stub::new(1, End::Head)],
            ],
        );
        let p = apply_cuts(&g, &c).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.classification(), Classification::Rigid);
        assert_eq!(neighbours(&p), vec![vec![1], vec![0]]);
        // additionally cutting through a point on the loop
        let c2 = c.clone().with_cut(1, 0.5);
        let p2 = apply_cuts(&g, &c2).unwrap();
        assert_eq!(p2.k(), 2);
        assert_eq!(p2.classification(), Classification::ConnectedOnly);
    }

    #[test]
    fn grouping_can_be_invalid() {
        let g = Family::Interval(1.into()).build().unwrap();
        let c = CutConfig::new().with_cut(0, 0.3).with_cut(0, 0.6);
        let p = Partition::with_grouping(&g, &c, &[0, 1, 0]).unwrap();
        assert_eq!(p.classification(), Classification::Invalid);
        assert_eq!(
            energy(&p, Problem::Natural, Exponent::Infinity),
            Err(PartitionError::InvalidPartition)
        );
    }

    #[test]
    fn interval_thirds_dirichlet() {
        let g = Family::Interval(1.into()).build().unwrap();
        let c = CutConfig::new().with_cut(0, 0.25).with_cut(0, 0.75);
        let p = apply_cuts(&g, &c).unwrap();
        let r = energy(&p, Problem::Dirichlet, Exponent::Infinity).unwrap();
        assert!((r.energy - 4.0 * PI2).abs() < 1e-10);
        assert_eq!(neighbours(&p), vec![vec![1], vec![0, 2], vec![1]]);
        let r1 = energy(&p, Problem::Dirichlet, Exponent::Finite(1.0)).unwrap();
        assert!(r1.energy <= r.energy + 1e-12);
    }

    #[test]
    fn star_edges_natural() {
        let g = Family::Star { m: 3, total: 3.into() }.build().unwrap();
        let c = CutConfig::new().with_full_split(&g, g.vertex_index("c").unwrap());
        let p = apply_cuts(&g, &c).unwrap();
        assert_eq!(p.k(), 3);
        let r = energy(&p, Problem::Natural, Exponent::Infinity).unwrap();
        assert!((r.energy - PI2).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_needs_boundary() {
        let g = Family::Loop(1.into()).build().unwrap();
        let p = apply_cuts(&g, &CutConfig::new()).unwrap();
        assert_eq!(p.classification(), Classification::Rigid);
        assert_eq!(
            energy(&p, Problem::Dirichlet, Exponent::Infinity),
            Err(PartitionError::EmptyBoundary(0))
        );
        let one = apply_cuts(&g, &CutConfig::new().with_cut(0, 0.5)).unwrap();
        assert_eq!(one.classification(), Classification::ConnectedOnly);
    }

    #[test]
    fn text_round_trip() {
        let g = lasso();
        let v = g.vertex_index("v").unwrap();
        let c = CutConfig::new()
            .with_cut(1, 0.1)
            .with_cut(0, 1.0 / 3.0)
            .with_full_split(&g, v);
        let text = c.to_text(&g);
        let back = CutConfig::parse(&g, &text).unwrap();
        assert_eq!(back, c);
        let a = apply_cuts(&g, &c).unwrap();
        let b = apply_cuts(&g, &back).unwrap();
        assert_eq!(a.clusters(), b.clusters());
    }

    #[test]
    fn rejects_bad_configs() {
        let g = lasso();
        assert!(matches!(
            apply_cuts(&g, &CutConfig::new().with_cut(0, 1.0)),
            Err(PartitionError::InvalidCoordinate { .. })
        ));
        assert!(matches!(
            apply_cuts(&g, &CutConfig::new().with_cut(0, 0.5).with_cut(0, 0.5)),
            Err(PartitionError::RepeatedCoordinate { .. })
        ));
        let v = g.vertex_index("v").unwrap();
        let bad = CutConfig::new().with_split(v, vec![vec![Stub::new(0, End::Head)], vec![Stub::new(1, End::Tail)]]);
        assert!(matches!(apply_cuts(&g, &bad), Err(PartitionError::BadSplit { .. })));
        assert!(matches!(
            CutConfig::parse(&g, "cut e9 0.5"),
            Err(PartitionError::UnknownEdge(_))
        ));
        assert!(matches!(
            CutConfig::parse(&g, "chop e1"),
            Err(PartitionError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn power_mean() {
        let v = [1.0, 4.0];
        assert_eq!(Exponent::Infinity.mean(&v), 4.0);
        assert!((Exponent::Finite(1.0).mean(&v) - 2.5).abs() < 1e-15);
        assert!(Exponent::Finite(2.0).mean(&v) > 2.5);
        assert!((Exponent::Finite(800.0).mean(&v) - 4.0).abs() < 0.01);
    }
}
