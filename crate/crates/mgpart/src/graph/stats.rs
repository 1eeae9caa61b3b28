use super::MetricGraph;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Combinatorial and metric statistics of a metric graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats {
    pub total_length: f64,
    pub ell_min: f64,
    pub ell_max: f64,
    pub betti: usize,
    /// `f64::INFINITY` for forests.
    pub girth: f64,
    pub degree_one_count: usize,
    pub num_components: usize,
    pub doubly_connected: bool,
    pub pendant2_count: usize,
    pub has_eulerian_path: bool,
    pub eulerian_cover_number: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
}

pub fn stats(g: &MetricGraph) -> GraphStats {
    let lengths = g.lengths();
    let (_, c) = g.components();
    let odd_per_component = odd_counts(g);
    let b = bridges(g);
    let connected = c == 1;
    GraphStats {
        total_length: g.total_length(),
        ell_min: lengths.iter().copied().fold(f64::INFINITY, f64::min),
        ell_max: lengths.iter().copied().fold(0.0, f64::max),
        betti: g.edge_count() + c - g.vertex_count(),
        girth: girth(g),
        degree_one_count: (0..g.vertex_count()).filter(|&v| g.degree(v) == 1).count(),
        num_components: c,
        doubly_connected: connected && b.is_empty(),
        pendant2_count: pendants_with(g, &b).len(),
        has_eulerian_path: connected && odd_per_component[0] <= 2,
        eulerian_cover_number: odd_per_component.iter().map(|&o| (o / 2).max(1)).sum(),
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
    }
}

fn odd_counts(g: &MetricGraph) -> Vec<usize> {
    let (label, c) = g.components();
    let mut out = vec![0; c];
    for v in 0..g.vertex_count() {
        if g.degree(v) % 2 == 1 {
            out[label[v]] += 1;
        }
    }
    out
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn distance_avoiding(g: &MetricGraph, from: usize, to: usize, skip: usize) -> f64 {
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[from] = 0.0;
    heap.push(Item(0.0, from));
    while let Some(Item(d, v)) = heap.pop() {
        if v == to {
            return d;
        }
        if d > dist[v] {
            continue;
        }
        for s in g.stubs(v) {
            if s.edge == skip {
                continue;
            }
            let e = g.edge(s.edge);
            let w = e.endpoint(s.end.other());
            let nd = d + e.len();
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Item(nd, w));
            }
        }
    }
    f64::INFINITY
}

/// Length of the shortest cycle, `+∞` when there is none.
pub fn girth(g: &MetricGraph) -> f64 {
    let mut best = f64::INFINITY;
    for (i, e) in g.edges().iter().enumerate() {
        let cycle = if e.is_loop() {
            e.len()
        } else {
            e.len() + distance_avoiding(g, e.tail, e.head, i)
        };
        best = best.min(cycle);
    }
    best
}

/// Edges whose removal increases the number of components.
pub fn bridges(g: &MetricGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut out = Vec::new();
    fn dfs(
        g: &MetricGraph,
        v: usize,
        via: Option<usize>,
        disc: &mut [usize],
        low: &mut [usize],
        timer: &mut usize,
        out: &mut Vec<usize>,
    ) {
        disc[v] = *timer;
        low[v] = *timer;
        *timer += 1;
        for s in g.stubs(v) {
            if Some(s.edge) == via {
                continue;
            }
            let e = g.edge(s.edge);
            if e.is_loop() {
                continue;
            }
            let w = e.endpoint(s.end.other());
            if disc[w] == usize::MAX {
                dfs(g, w, Some(s.edge), disc, low, timer, out);
                low[v] = low[v].min(low[w]);
                if low[w] > disc[v] {
                    out.push(s.edge);
                }
            } else {
                low[v] = low[v].min(disc[w]);
            }
        }
    }
    for v in 0..n {
        if disc[v] == usize::MAX {
            dfs(g, v, None, &mut disc, &mut low, &mut timer, &mut out);
        }
    }
    out.sort_unstable();
    out
}

/// True iff `g` is connected and no single edge removal disconnects it.
pub fn is_doubly_connected(g: &MetricGraph) -> bool {
    g.is_connected() && bridges(g).is_empty()
}

/// A doubly connected subgraph hanging off the rest by one bridge.
#[derive(Clone, Debug, PartialEq)]
pub struct Pendant {
    pub bridge: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Pendant {
    pub fn graph(&self, g: &MetricGraph) -> MetricGraph {
        g.subgraph(&self.edges, format!("pendant of {}", g.name()))
    }
}

/// All doubly connected pendants; they are automatically maximal and
/// pairwise disjoint.
pub fn doubly_connected_pendants(g: &MetricGraph) -> Vec<Pendant> {
    pendants_with(g, &bridges(g))
}

fn pendants_with(g: &MetricGraph, bridge_list: &[usize]) -> Vec<Pendant> {
    let mut is_bridge = vec![false; g.edge_count()];
    for &b in bridge_list {
        is_bridge[b] = true;
    }
    let mut out = Vec::new();
    for &b in bridge_list {
        let mut uf = super::UnionFind::new(g.vertex_count());
        for (i, e) in g.edges().iter().enumerate() {
            if i != b {
                uf.union(e.tail, e.head);
            }
        }
        let e = g.edge(b);
        for side_root in [e.tail, e.head] {
            let r = uf.find(side_root);
            let vertices: Vec<usize> = (0..g.vertex_count()).filter(|&v| uf.find(v) == r).collect();
            let edges: Vec<usize> = (0..g.edge_count())
                .filter(|&i| i != b && uf.find(g.edge(i).tail) == r)
                .collect();
            if !edges.is_empty() && edges.iter().all(|&i| !is_bridge[i]) {
                out.push(Pendant {
                    bridge: b,
                    vertices,
                    edges,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, Family};

    fn lasso(a: f64, b: f64) -> MetricGraph {
        Family::Lasso {
            stick: a.into(),
            ring: b.into(),
        }
        .build()
        .unwrap()
    }

    fn figure_eight() -> MetricGraph {
        Family::Flower(vec![1.into(), 1.into()]).build().unwrap()
    }

    #[test]
    fn lasso_stats() {
        let s = stats(&lasso(1.0, 2.0));
        assert_eq!(s.betti, 1);
        assert_eq!(s.girth, 2.0);
        assert_eq!(s.degree_one_count, 1);
        assert!(!s.doubly_connected);
        assert_eq!(s.pendant2_count, 1);
    }

    #[test]
    fn star_cover_numbers() {
        let s4 = stats(&Family::Star { m: 4, total: 4.into() }.build().unwrap());
        assert_eq!(s4.eulerian_cover_number, 2);
        assert_eq!(s4.girth, f64::INFINITY);
        let s5 = stats(&Family::Star { m: 5, total: 5.into() }.build().unwrap());
        assert_eq!(s5.eulerian_cover_number, 3);
    }

    #[test]
    fn dumbbell_pendants_and_trail() {
        let g = Family::Dumbbell {
            left: 1.into(),
            handle: 1.into(),
            right: 1.into(),
        }
        .build()
        .unwrap();
        let s = stats(&g);
        assert_eq!((s.vertex_count, s.edge_count, s.betti), (2, 3, 2));
        assert!(s.has_eulerian_path);
        let p = doubly_connected_pendants(&g);
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|p| p.edges.len() == 1 && g.edge(p.edges[0]).is_loop()));
    }

    #[test]
    fn flowers_have_no_pendants() {
        let g = figure_eight();
        assert!(doubly_connected_pendants(&g).is_empty());
        assert!(is_doubly_connected(&g));
        assert!(is_doubly_connected(&Family::Loop(1.into()).build().unwrap()));
        assert!(!is_doubly_connected(&lasso(1.0, 1.0)));
    }

    #[test]
    fn windmill_pendants() {
        let g = Family::Windmill {
            loops: 2,
            leaves: 4,
            arm: 1.into(),
            ring: 0.1.into(),
        }
        .build()
        .unwrap();
        let s = stats(&g);
        assert_eq!(s.pendant2_count, 2);
        assert_eq!(s.degree_one_count, 4);
    }

    #[test]
    fn parallel_edges_are_not_bridges() {
        let g = parse_graph("vertex a\nvertex b\nvertex c\nedge e1 a b 1\nedge e2 a b 1\nedge e3 b c 1").unwrap();
        assert_eq!(bridges(&g), vec![2]);
        assert_eq!(girth(&g), 2.0);
        assert_eq!(doubly_connected_pendants(&g).len(), 1);
    }
}
