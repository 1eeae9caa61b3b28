//! Position-independent structure of a cut configuration.
//!
//! With all coordinates strictly interior and strictly increasing, the
//! pieces, the nodes they join and the resulting components depend only on
//! the number of cuts per edge and the vertex splits. The optimiser builds a
//! [`Layout`] once per topology and then only varies positions.

use crate::graph::{End, MetricGraph, Stub, UnionFind};
use crate::spectral::{reduced_ground_state, Reduced, SpectralGraph};
use std::collections::BTreeMap;

/// An endpoint of a piece in the cut graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    /// An ambient vertex, or one block of a split vertex.
    Vertex { vertex: usize, block: Option<usize> },
    /// One side of the `index`-th cut on `edge`; `upper` is the side facing
    /// larger coordinates.
    Cut { edge: usize, index: usize, upper: bool },
}

impl Node {
    /// Created by cutting: cut sides and blocks of split vertices.
    pub fn is_boundary(&self) -> bool {
        !matches!(self, Node::Vertex { block: None, .. })
    }
}

/// The `index`-th piece of `edge`, from `tail` node to `head` node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Piece {
    pub edge: usize,
    pub index: usize,
    pub tail: usize,
    pub head: usize,
}

/// A place where the graph was cut, with the nodes it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub kind: LocationKind,
    pub nodes: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LocationKind {
    Cut { edge: usize, index: usize },
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub edge_cuts: Vec<usize>,
    /// Offset of each edge's coordinates in the flattened position vector.
    pub offsets: Vec<usize>,
    pub splits: BTreeMap<usize, Vec<Vec<Stub>>>,
    pub nodes: Vec<Node>,
    pub pieces: Vec<Piece>,
    pub locations: Vec<Location>,
    /// Component of the cut graph per piece; components are numbered by
    /// their first piece.
    pub component_of_piece: Vec<usize>,
    pub component_count: usize,
}

impl Layout {
    pub fn new(g: &MetricGraph, edge_cuts: &[usize], splits: &BTreeMap<usize, Vec<Vec<Stub>>>) -> Layout {
        let mut nodes = Vec::new();
        let mut stub_node: BTreeMap<Stub, usize> = BTreeMap::new();
        let mut locations = Vec::new();
        for v in 0..g.vertex_count() {
            match splits.get(&v) {
                Some(blocks) => {
                    let mut loc = Vec::new();
                    for (b, block) in blocks.iter().enumerate() {
                        let id = nodes.len();
                        nodes.push(Node::Vertex {
                            vertex: v,
                            block: Some(b),
                        });
                        loc.push(id);
                        for &s in block {
                            stub_node.insert(s, id);
                        }
                    }
                    locations.push(Location {
                        kind: LocationKind::Vertex(v),
                        nodes: loc,
                    });
                }
                None => {
                    let id = nodes.len();
                    nodes.push(Node::Vertex { vertex: v, block: None });
                    for &s in g.stubs(v) {
                        stub_node.insert(s, id);
                    }
                }
            }
        }
        let mut offsets = Vec::with_capacity(g.edge_count());
        let mut pieces = Vec::new();
        let mut total = 0;
        for e in 0..g.edge_count() {
            offsets.push(total);
            let c = edge_cuts[e];
            total += c;
            let first_cut = nodes.len();
            for index in 0..c {
                nodes.push(Node::Cut {
                    edge: e,
                    index,
                    upper: false,
                });
                nodes.push(Node::Cut {
                    edge: e,
                    index,
                    upper: true,
                });
                locations.push(Location {
                    kind: LocationKind::Cut { edge: e, index },
                    nodes: vec![first_cut + 2 * index, first_cut + 2 * index + 1],
                });
            }
            for index in 0..=c {
                let tail = if index == 0 {
                    stub_node[&Stub::new(e, End::Tail)]
                } else {
                    first_cut + 2 * (index - 1) + 1
                };
                let head = if index == c {
                    stub_node[&Stub::new(e, End::Head)]
                } else {
                    first_cut + 2 * index
                };
                pieces.push(Piece {
                    edge: e,
                    index,
                    tail,
                    head,
                });
            }
        }
        let mut uf = UnionFind::new(nodes.len());
        for p in &pieces {
            uf.union(p.tail, p.head);
        }
        let mut label = BTreeMap::new();
        let component_of_piece: Vec<usize> = pieces
            .iter()
            .map(|p| {
                let root = uf.find(p.tail);
                let next = label.len();
                *label.entry(root).or_insert(next)
            })
            .collect();
        Layout {
            edge_cuts: edge_cuts.to_vec(),
            offsets,
            splits: splits.clone(),
            nodes,
            pieces,
            locations,
            component_count: label.len(),
            component_of_piece,
        }
    }

    pub fn position_count(&self) -> usize {
        self.edge_cuts.iter().sum()
    }

    /// Piece coordinates `(t0, t1)` for a flattened position vector.
    pub fn piece_span(&self, piece: usize, positions: &[f64]) -> (f64, f64) {
        let p = &self.pieces[piece];
        let c = self.edge_cuts[p.edge];
        let base = self.offsets[p.edge];
        let t0 = if p.index == 0 {
            0.0
        } else {
            positions[base + p.index - 1]
        };
        let t1 = if p.index == c { 1.0 } else { positions[base + p.index] };
        (t0, t1)
    }

    /// Piece lengths for a flattened position vector.
    pub fn piece_lengths(&self, lengths: &[f64], positions: &[f64]) -> Vec<f64> {
        (0..self.pieces.len())
            .map(|i| {
                let (t0, t1) = self.piece_span(i, positions);
                lengths[self.pieces[i].edge] * (t1 - t0)
            })
            .collect()
    }

    /// Component index of every node (every node ends at least one piece).
    pub fn component_of_node(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.nodes.len()];
        for (i, p) in self.pieces.iter().enumerate() {
            out[p.tail] = self.component_of_piece[i];
            out[p.head] = self.component_of_piece[i];
        }
        out
    }

    /// True if every cut location touches at least two distinct clusters,
    /// given a cluster label per component.
    pub fn is_rigid_under(&self, cluster_of_component: &[usize]) -> bool {
        let comp = self.component_of_node();
        self.locations.iter().all(|loc| {
            let first = cluster_of_component[comp[loc.nodes[0]]];
            loc.nodes.iter().any(|&n| cluster_of_component[comp[n]] != first)
        })
    }

    /// Pieces of each component.
    pub fn component_pieces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (i, &c) in self.component_of_piece.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Cluster graph on `pieces` with payload = piece index, boundary nodes
    /// marked Dirichlet.
    pub fn cluster_skeleton(&self, pieces: &[usize]) -> Reduced<Vec<usize>> {
        let mut local = BTreeMap::new();
        let mut dirichlet = Vec::new();
        let mut edges = Vec::new();
        let mut node = |n: usize, dirichlet: &mut Vec<bool>| {
            *local.entry(n).or_insert_with(|| {
                dirichlet.push(self.nodes[n].is_boundary());
                dirichlet.len() - 1
            })
        };
        for &i in pieces {
            let p = &self.pieces[i];
            let u = node(p.tail, &mut dirichlet);
            let v = node(p.head, &mut dirichlet);
            edges.push((u, v, vec![i]));
        }
        Reduced {
            vertex_count: dirichlet.len(),
            edges,
            dirichlet,
        }
    }
}

/// Symbolically reduced cluster: evaluating it only sums piece lengths and
/// solves the (usually tiny) reduced graphs.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterTemplate {
    pub pieces: Vec<usize>,
    parts: Vec<Reduced<Vec<usize>>>,
    natural: bool,
}

impl ClusterTemplate {
    pub fn new(layout: &Layout, pieces: &[usize], natural: bool) -> ClusterTemplate {
        let skeleton = layout.cluster_skeleton(pieces);
        let parts = skeleton.ground_state_parts(natural, |a, b| {
            let mut m = a.clone();
            m.extend_from_slice(b);
            m
        });
        ClusterTemplate {
            pieces: pieces.to_vec(),
            parts,
            natural,
        }
    }

    /// Reduced parts; the cluster value is the minimum over them.
    pub fn parts(&self) -> &[Reduced<Vec<usize>>] {
        &self.parts
    }

    pub fn has_boundary(&self) -> bool {
        self.parts.iter().any(|p| p.dirichlet.iter().any(|&d| d))
    }

    /// Ground state given all piece lengths of the layout.
    pub fn eval(&self, piece_lengths: &[f64]) -> f64 {
        self.parts
            .iter()
            .map(|part| {
                let sg: SpectralGraph = part
                    .map(|ids| ids.iter().map(|&i| piece_lengths[i]).sum::<f64>())
                    .into();
                reduced_ground_state(&sg, self.natural).0
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn length(&self, piece_lengths: &[f64]) -> f64 {
        self.pieces.iter().map(|&i| piece_lengths[i]).sum()
    }
}
