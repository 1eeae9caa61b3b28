//! Spectrum-preserving reductions, generic over the edge payload so that
//! they can run symbolically (on lists of pieces) as well as on lengths.

use crate::graph::UnionFind;

/// A graph with payload `P` on each edge `(u, v, P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduced<P> {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, P)>,
    pub dirichlet: Vec<bool>,
}

impl<P: Clone> Reduced<P> {
    /// Replaces every Dirichlet vertex by one degree-one copy per stub and
    /// returns the connected pieces that still have edges.
    pub fn split_dirichlet(&self) -> Vec<Reduced<P>> {
        let mut n = self.vertex_count;
        let mut dirichlet = self.dirichlet.clone();
        let mut edges = self.edges.clone();
        for e in edges.iter_mut() {
            if self.dirichlet[e.0] {
                e.0 = n;
                n += 1;
                dirichlet.push(true);
            }
            if self.dirichlet[e.1] {
                e.1 = n;
                n += 1;
                dirichlet.push(true);
            }
        }
        let mut uf = UnionFind::new(n);
        for (u, v, _) in &edges {
            uf.union(*u, *v);
        }
        let (label, count) = uf.labels();
        let mut used = vec![false; n];
        for (u, v, _) in &edges {
            used[*u] = true;
            used[*v] = true;
        }
        let mut local = vec![usize::MAX; n];
        let mut parts: Vec<Reduced<P>> = (0..count)
            .map(|_| Reduced {
                vertex_count: 0,
                edges: Vec::new(),
                dirichlet: Vec::new(),
            })
            .collect();
        for x in 0..n {
            if used[x] {
                let p = &mut parts[label[x]];
                local[x] = p.vertex_count;
                p.vertex_count += 1;
                p.dirichlet.push(dirichlet[x]);
            }
        }
        for (u, v, w) in edges {
            parts[label[u]].edges.push((local[u], local[v], w));
        }
        parts.into_iter().filter(|p| !p.edges.is_empty()).collect()
    }

    /// Suppresses natural degree-2 vertices joining two distinct edges,
    /// combining payloads with `merge`.
    pub fn normalized(&self, merge: impl Fn(&P, &P) -> P) -> Reduced<P> {
        let mut edges: Vec<Option<(usize, usize, P)>> = self.edges.iter().cloned().map(Some).collect();
        let mut alive = vec![true; self.vertex_count];
        loop {
            let mut inc: Vec<Vec<(usize, bool)>> = vec![Vec::new(); self.vertex_count];
            for (i, e) in edges.iter().enumerate() {
                if let Some((u, v, _)) = e {
                    inc[*u].push((i, true));
                    inc[*v].push((i, false));
                }
            }
            let Some(x) = (0..self.vertex_count)
                .find(|&x| alive[x] && !self.dirichlet[x] && inc[x].len() == 2 && inc[x][0].0 != inc[x][1].0)
            else {
                break;
            };
            let (a, a_tail) = inc[x][0];
            let (b, b_tail) = inc[x][1];
            let ea = edges[a].take().unwrap();
            let eb = edges[b].take().unwrap();
            let from = if a_tail { ea.1 } else { ea.0 };
            let to = if b_tail { eb.1 } else { eb.0 };
            edges[a] = Some((from, to, merge(&ea.2, &eb.2)));
            alive[x] = false;
        }
        let mut remap = vec![usize::MAX; self.vertex_count];
        let mut dirichlet = Vec::new();
        for x in 0..self.vertex_count {
            if alive[x] {
                remap[x] = dirichlet.len();
                dirichlet.push(self.dirichlet[x]);
            }
        }
        Reduced {
            vertex_count: dirichlet.len(),
            edges: edges
                .into_iter()
                .flatten()
                .map(|(u, v, w)| (remap[u], remap[v], w))
                .collect(),
            dirichlet,
        }
    }

    /// Reduction used for ground states: for the natural problem the marks
    /// are dropped and the graph normalised; for the Dirichlet problem the
    /// marked vertices are split and each piece normalised.
    pub fn ground_state_parts(&self, natural: bool, merge: impl Fn(&P, &P) -> P + Copy) -> Vec<Reduced<P>> {
        if natural {
            let mut plain = self.clone();
            plain.dirichlet.iter_mut().for_each(|d| *d = false);
            vec![plain.normalized(merge)]
        } else {
            self.split_dirichlet().iter().map(|p| p.normalized(merge)).collect()
        }
    }

    pub fn map<Q>(&self, f: impl Fn(&P) -> Q) -> Reduced<Q> {
        Reduced {
            vertex_count: self.vertex_count,
            edges: self.edges.iter().map(|(u, v, w)| (*u, *v, f(w))).collect(),
            dirichlet: self.dirichlet.clone(),
        }
    }
}
