use super::MetricGraph;

/// One traversal of an edge; `forward` means tail to head.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrailStep {
    pub edge: usize,
    pub forward: bool,
}

impl TrailStep {
    pub fn from_vertex(&self, g: &MetricGraph) -> usize {
        let e = g.edge(self.edge);
        if self.forward {
            e.tail
        } else {
            e.head
        }
    }

    pub fn to_vertex(&self, g: &MetricGraph) -> usize {
        let e = g.edge(self.edge);
        if self.forward {
            e.head
        } else {
            e.tail
        }
    }
}

/// Hierholzer over `(u, v)` pairs; every edge id is used exactly once.
/// Returns the steps of a trail starting at `start` covering the component.
fn hierholzer(n: usize, ends: &[(usize, usize)], start: usize) -> Vec<(usize, bool)> {
    let mut adj: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
    for (i, &(u, v)) in ends.iter().enumerate() {
        adj[u].push((i, v, true));
        if u != v {
            adj[v].push((i, u, false));
        } else {
            // a loop is entered once from the vertex
        }
    }
    let mut used = vec![false; ends.len()];
    let mut ptr = vec![0usize; n];
    let mut stack: Vec<(usize, Option<(usize, bool)>)> = vec![(start, None)];
    let mut out = Vec::with_capacity(ends.len());
    while let Some(&(v, step)) = stack.last() {
        while ptr[v] < adj[v].len() && used[adj[v][ptr[v]].0] {
            ptr[v] += 1;
        }
        if ptr[v] == adj[v].len() {
            stack.pop();
            if let Some(s) = step {
                out.push(s);
            }
        } else {
            let (e, w, fwd) = adj[v][ptr[v]];
            used[e] = true;
            stack.push((w, Some((e, fwd))));
        }
    }
    out.reverse();
    out
}

fn odd_vertices(g: &MetricGraph, component: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for &e in component {
        for v in [g.edge(e).tail, g.edge(e).head] {
            if !seen[v] {
                seen[v] = true;
                if g.degree(v) % 2 == 1 {
                    out.push(v);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// An Eulerian trail of a connected graph, starting at the lowest odd
/// vertex if there is one.
pub fn eulerian_trail(g: &MetricGraph) -> Option<Vec<TrailStep>> {
    if !g.is_connected() {
        return None;
    }
    let all: Vec<usize> = (0..g.edge_count()).collect();
    let odd = odd_vertices(g, &all);
    if odd.len() > 2 {
        return None;
    }
    let start = odd.first().copied().unwrap_or(g.edge(0).tail);
    let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
    let steps = hierholzer(g.vertex_count(), &ends, start);
    Some(
        steps
            .into_iter()
            .map(|(edge, forward)| TrailStep { edge, forward })
            .collect(),
    )
}

/// A decomposition of the edge set into the minimum number of trails:
/// `max(1, odd/2)` per component.
pub fn trail_cover(g: &MetricGraph) -> Vec<Vec<TrailStep>> {
    let mut out = Vec::new();
    for comp in g.component_edges() {
        let odd = odd_vertices(g, &comp);
        let mut ends: Vec<(usize, usize)> = comp.iter().map(|&e| (g.edge(e).tail, g.edge(e).head)).collect();
        let real = ends.len();
        for pair in odd.chunks(2).skip(1) {
            ends.push((pair[0], pair[1]));
        }
        let start = odd.first().copied().unwrap_or(g.edge(comp[0]).tail);
        let steps = hierholzer(g.vertex_count(), &ends, start);
        let mut current = Vec::new();
        for (i, fwd) in steps {
            if i >= real {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
            } else {
                current.push(TrailStep {
                    edge: comp[i],
                    forward: fwd,
                });
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;

    fn is_trail(g: &MetricGraph, t: &[TrailStep]) -> bool {
        t.windows(2).all(|w| w[0].to_vertex(g) == w[1].from_vertex(g))
    }

    #[test]
    fn dumbbell_has_trail() {
        let g = Family::Dumbbell {
            left: 1.into(),
            handle: 1.into(),
            right: 1.into(),
        }
        .build()
        .unwrap();
        let t = eulerian_trail(&g).unwrap();
        assert_eq!(t.len(), 3);
        assert!(is_trail(&g, &t));
    }

    #[test]
    fn star_cover() {
        for m in 3..8 {
            let g = Family::Star { m, total: 1.into() }.build().unwrap();
            let cover = trail_cover(&g);
            assert_eq!(cover.len(), m.div_ceil(2));
            assert_eq!(cover.iter().map(Vec::len).sum::<usize>(), m);
            assert!(cover.iter().all(|t| is_trail(&g, t)));
        }
        let g = Family::Star { m: 4, total: 4.into() }.build().unwrap();
        assert!(eulerian_trail(&g).is_none());
    }

    #[test]
    fn loop_circuit() {
        let g = Family::Loop(1.into()).build().unwrap();
        assert_eq!(eulerian_trail(&g).unwrap().len(), 1);
        assert_eq!(trail_cover(&g).len(), 1);
    }
}
