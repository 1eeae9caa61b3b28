//! Length-allocation relaxation behind the per-topology lower bounds.
//!
//! Every cluster `i` gets a coefficient `cᵢ` with `eigenvalue ≥ cᵢπ²/ℓᵢ²`.
//! A level `E` is reachable only if the edges can supply lengths
//! `rᵢ = π√(cᵢ/E)` to the clusters whose pieces they carry, which is a
//! bipartite transportation problem solved by max-flow.

use std::collections::VecDeque;
use std::f64::consts::PI;

struct Arc {
    to: usize,
    cap: f64,
}

/// Dense-enough Edmonds–Karp on a few dozen nodes.
struct FlowNet {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet {
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap });
        self.arcs.push(Arc { to: u, cap: 0.0 });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    fn max_flow(&mut self, s: usize, t: usize, eps: f64) -> f64 {
        let n = self.adj.len();
        let mut total = 0.0;
        loop {
            let mut prev = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &a in &self.adj[u] {
                    let v = self.arcs[a].to;
                    if !seen[v] && self.arcs[a].cap > eps {
                        seen[v] = true;
                        prev[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let a = prev[v];
                push = push.min(self.arcs[a].cap);
                v = self.arcs[a ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let a = prev[v];
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
                v = self.arcs[a ^ 1].to;
            }
            total += push;
        }
    }

    fn reachable(&self, s: usize, eps: f64) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let v = self.arcs[a].to;
                if !seen[v] && self.arcs[a].cap > eps {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// Allocation problem: edge supplies and, per cluster, its coefficient and
/// the edges it can draw from.
pub(crate) struct Allocation<'a> {
    pub supply: &'a [f64],
    pub coef: &'a [f64],
    pub edges_of: &'a [Vec<usize>],
}

pub(crate) struct AllocationResult {
    /// Smallest level `E` at which all demands can be met.
    pub level: f64,
    /// `flow[i]` lists `(edge, amount)` given to cluster `i`.
    pub flow: Vec<Vec<(usize, f64)>>,
}

impl Allocation<'_> {
    fn solve_at(&self, level: f64) -> (f64, f64, FlowNet, Vec<Vec<usize>>) {
        let ne = self.supply.len();
        let nc = self.coef.len();
        let (s, t) = (ne + nc, ne + nc + 1);
        let mut net = FlowNet::new(ne + nc + 2);
        for (e, &l) in self.supply.iter().enumerate() {
            net.add(s, e, l);
        }
        let mut arc_of = vec![Vec::new(); nc];
        let mut demand = 0.0;
        for i in 0..nc {
            for &e in &self.edges_of[i] {
                arc_of[i].push(net.add(e, ne + i, f64::INFINITY));
            }
            let r = PI * (self.coef[i] / level).sqrt();
            demand += r;
            net.add(ne + i, t, r);
        }
        let scale: f64 = self.supply.iter().sum();
        let f = net.max_flow(s, t, 1e-15 * scale);
        (f, demand, net, arc_of)
    }

    /// Dinkelbach iteration on the Hall ratio `(πΣ_S √cᵢ / |N(S)|)²`.
    pub fn solve(&self) -> AllocationResult {
        let ne = self.supply.len();
        let total: f64 = self.supply.iter().sum();
        let root: Vec<f64> = self.coef.iter().map(|c| c.sqrt()).collect();
        let mut level = (PI * root.iter().sum::<f64>() / total).powi(2);
        for _ in 0..200 {
            let (f, demand, net, arc_of) = self.solve_at(level);
            if f >= demand * (1.0 - 1e-12) {
                return AllocationResult {
                    level,
                    flow: arc_of
                        .iter()
                        .enumerate()
                        .map(|(i, arcs)| {
                            arcs.iter()
                                .zip(&self.edges_of[i])
                                .map(|(&a, &e)| (e, net.arcs[a ^ 1].cap))
                                .collect()
                        })
                        .collect(),
                };
            }
            // clusters cut off from the source form a violated Hall set
            let reach = net.reachable(ne + self.coef.len(), 1e-15 * total);
            let set: Vec<usize> = (0..self.coef.len()).filter(|&i| !reach[ne + i]).collect();
            let mut nb = vec![false; ne];
            for &i in &set {
                for &e in &self.edges_of[i] {
                    nb[e] = true;
                }
            }
            let supply: f64 = (0..ne).filter(|&e| nb[e]).map(|e| self.supply[e]).sum();
            let next = (PI * set.iter().map(|&i| root[i]).sum::<f64>() / supply).powi(2);
            if !(next > level) {
                level *= 1.0 + 1e-12;
            } else {
                level = next;
            }
        }
        unreachable!("allocation level did not converge")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_and_bottleneck() {
        // one edge of length 1 shared by two clusters with c = 1: E = 4π²
        let a = Allocation {
            supply: &[1.0],
            coef: &[1.0, 1.0],
            edges_of: &[vec![0], vec![0]],
        };
        let r = a.solve();
        assert!((r.level / (PI * PI) - 4.0).abs() < 1e-12);
        // two edges, but three clusters crowd onto the short one
        let a = Allocation {
            supply: &[1.0, 10.0],
            coef: &[1.0, 1.0, 1.0],
            edges_of: &[vec![0], vec![0], vec![0, 1]],
        };
        let r = a.solve();
        assert!((r.level / (PI * PI) - 4.0).abs() < 1e-12, "{}", r.level / (PI * PI));
        let given: f64 = r.flow[0].iter().map(|x| x.1).sum();
        assert!((given - 0.5).abs() < 1e-9);
    }
}
