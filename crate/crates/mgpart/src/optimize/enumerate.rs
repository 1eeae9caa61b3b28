//! Enumeration of cut topologies: a set partition of the stubs at every
//! vertex and a number of interior cuts on every edge.

use crate::graph::{End, MetricGraph, Stub, UnionFind};
use crate::partition::CutConfig;

/// Limits on the enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct Budget {
    /// Largest number of interior cuts per edge.
    pub max_cuts_per_edge: Vec<usize>,
    /// Largest number of (split choice, cut-count vector) pairs examined.
    pub max_configurations: usize,
}

impl Budget {
    /// `⌈k·|e|/L⌉ + 2` cuts per edge and 10⁶ configurations.
    pub fn default_for(g: &MetricGraph, k: usize) -> Budget {
        let total = g.total_length();
        Budget {
            max_cuts_per_edge: g
                .edges()
                .iter()
                .map(|e| (k as f64 * e.len() / total).ceil() as usize + 2)
                .collect(),
            max_configurations: 1_000_000,
        }
    }

    /// Caps the total number of interior cuts instead of the per-edge count.
    pub fn with_uniform_cap(g: &MetricGraph, cap: usize, max_configurations: usize) -> Budget {
        Budget {
            max_cuts_per_edge: vec![cap; g.edge_count()],
            max_configurations,
        }
    }
}

/// Result of [`enumerate_topologies`].
#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    /// Skeletons with evenly spaced placeholder coordinates.
    pub skeletons: Vec<CutConfig>,
    /// The configuration budget ran out before the enumeration finished.
    pub truncated: bool,
    pub examined: usize,
}

/// All set partitions of `items`, as restricted growth strings.
pub(crate) fn set_partitions<T: Copy>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    let n = items.len();
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut code = vec![0usize; n];
    loop {
        let blocks = code.iter().max().unwrap() + 1;
        let mut part = vec![Vec::new(); blocks];
        for (i, &b) in code.iter().enumerate() {
            part[b].push(items[i]);
        }
        out.push(part);
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let max_prefix = code[..i].iter().max().copied().unwrap_or(0);
            if code[i] <= max_prefix {
                code[i] += 1;
                for c in code.iter_mut().skip(i + 1) {
                    *c = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Number of clusters of a skeleton: free interior pieces plus components
/// of the block graph joined by uncut edges.
fn cluster_count(counts: &[usize], node_of: &dyn Fn(Stub) -> usize, nodes: usize) -> usize {
    let mut uf = UnionFind::new(nodes);
    let mut free = 0;
    for (e, &c) in counts.iter().enumerate() {
        if c == 0 {
            uf.union(node_of(Stub::new(e, End::Tail)), node_of(Stub::new(e, End::Head)));
        } else {
            free += c - 1;
        }
    }
    free + uf.labels().1
}

/// All topologies whose cluster count equals `k`, in a fixed order: split
/// choices (vertex by vertex, restricted growth order) outermost, then cut
/// counts edge by edge.
pub fn enumerate_topologies(g: &MetricGraph, k: usize, budget: &Budget) -> Enumeration {
    let options: Vec<Vec<Vec<Vec<Stub>>>> = (0..g.vertex_count())
        .map(|v| {
            if g.degree(v) <= 1 {
                vec![vec![g.stubs(v).to_vec()]]
            } else {
                set_partitions(g.stubs(v))
            }
        })
        .collect();
    let mut choice = vec![0usize; g.vertex_count()];
    let mut out = Vec::new();
    let mut examined = 0usize;
    let mut truncated = false;
    'outer: loop {
        // node ids for this split choice
        let mut node_of_stub = std::collections::BTreeMap::new();
        let mut nodes = 0;
        for v in 0..g.vertex_count() {
            let blocks = &options[v][choice[v]];
            for b in blocks {
                for &s in b {
                    node_of_stub.insert(s, nodes);
                }
                nodes += 1;
            }
        }
        let node_of = |s: Stub| node_of_stub[&s];
        let mut counts = vec![0usize; g.edge_count()];
        let ok = cut_vectors(g, k, budget, &mut counts, 0, 0, &mut |counts| {
            examined += 1;
            if examined > budget.max_configurations {
                return false;
            }
            if cluster_count(counts, &node_of, nodes) == k {
                let mut c = CutConfig::new();
                for (e, &n) in counts.iter().enumerate() {
                    for j in 1..=n {
                        c.add_cut(e, j as f64 / (n + 1) as f64);
                    }
                }
                for v in 0..g.vertex_count() {
                    let blocks = &options[v][choice[v]];
                    if blocks.len() > 1 {
                        c.set_split(v, blocks.clone());
                    }
                }
                out.push(c);
            }
            true
        });
        if !ok {
            truncated = true;
            break 'outer;
        }
        // advance the split odometer
        let mut v = 0;
        loop {
            if v == g.vertex_count() {
                break 'outer;
            }
            choice[v] += 1;
            if choice[v] < options[v].len() {
                break;
            }
            choice[v] = 0;
            v += 1;
        }
    }
    Enumeration {
        skeletons: out,
        truncated,
        examined: examined.min(budget.max_configurations),
    }
}

/// Depth-first over cut counts; `extra` is `Σ max(c_e − 1, 0)` so far,
/// which never exceeds `k − 1`. Returns false when the visitor stops.
fn cut_vectors(
    g: &MetricGraph,
    k: usize,
    budget: &Budget,
    counts: &mut [usize],
    e: usize,
    extra: usize,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if e == g.edge_count() {
        return visit(counts);
    }
    for c in 0..=budget.max_cuts_per_edge[e] {
        let x = extra + c.saturating_sub(1);
        if x + 1 > k {
            break;
        }
        counts[e] = c;
        if !cut_vectors(g, k, budget, counts, e + 1, x, visit) {
            return false;
        }
    }
    counts[e] = 0;
    true
}
