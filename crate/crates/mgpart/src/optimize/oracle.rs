//! Exhaustive search over cut positions on a uniform grid.

use super::enumerate::{enumerate_topologies, Budget};
use super::topology::Topology;
use super::{admissible, offer, Incumbent, OptimizeError, OptimizeRequest, OptimizeResult, PartitionClass};
use crate::graph::MetricGraph;
use crate::partition::{Exponent, Problem};
use std::collections::HashMap;

/// Most interior cuts the oracle places.
const MAX_CUTS: usize = 4;
/// Search nodes visited before the oracle gives up.
const LIMIT: usize = 10_000_000;

/// Grid indices strictly inside an edge of length `len`.
fn grid_points(len: f64, h: f64) -> usize {
    let n = (len / h * (1.0 + 1e-12)).floor() as usize;
    if (n as f64 * h - len).abs() <= 1e-12 * len {
        n.saturating_sub(1)
    } else {
        n
    }
}

struct Search<'a> {
    top: &'a Topology,
    p: Exponent,
    h: f64,
    k: usize,
    /// Grid points per coordinate's edge.
    points: Vec<usize>,
    /// `(edge, cut index)` per coordinate, flattened by edge.
    coords: Vec<(usize, usize)>,
    /// Clusters whose pieces are fixed once coordinate `q` is placed.
    ready: Vec<Vec<usize>>,
    cache: Vec<HashMap<Vec<u32>, f64>>,
    idx: Vec<u32>,
    piece_len: Vec<f64>,
    visited: usize,
    best: f64,
    best_idx: Option<Vec<u32>>,
}

impl Search<'_> {
    /// Grid span `(start, end)` of each piece of a cluster; `u32::MAX`
    /// stands for the edge end.
    fn key(&self, cluster: usize) -> Vec<u32> {
        let layout = &self.top.layout;
        let mut key = Vec::new();
        for &pi in &self.top.templates[cluster].pieces {
            let piece = layout.pieces[pi];
            let c = layout.edge_cuts[piece.edge];
            let base = layout.offsets[piece.edge];
            let a = if piece.index == 0 {
                0
            } else {
                self.idx[base + piece.index - 1]
            };
            let b = if piece.index == c {
                u32::MAX
            } else {
                self.idx[base + piece.index]
            };
            key.push(a);
            key.push(b);
        }
        key
    }

    fn value(&mut self, cluster: usize) -> f64 {
        let key = self.key(cluster);
        if let Some(&v) = self.cache[cluster].get(&key) {
            return v;
        }
        let v = self.top.templates[cluster].eval(&self.piece_len);
        self.cache[cluster].insert(key, v);
        v
    }

    fn bound(&self, acc: f64) -> f64 {
        match self.p {
            Exponent::Infinity => acc,
            Exponent::Finite(p) => (acc / self.k as f64).powf(1.0 / p),
        }
    }

    fn absorb(&self, acc: f64, v: f64) -> f64 {
        match self.p {
            Exponent::Infinity => acc.max(v),
            Exponent::Finite(p) => acc + v.powf(p),
        }
    }

    fn set_pieces(&mut self, q: usize) {
        let (e, i) = self.coords[q];
        let layout = &self.top.layout;
        let first = layout.offsets[e] + e;
        let c = layout.edge_cuts[e];
        let len = self.top.edge_len[e];
        let base = layout.offsets[e];
        let left = if i == 0 {
            0.0
        } else {
            self.idx[base + i - 1] as f64 * self.h
        };
        let x = self.idx[q] as f64 * self.h;
        self.piece_len[first + i] = x - left;
        if i + 1 == c {
            self.piece_len[first + i + 1] = len - x;
        }
    }

    fn dfs(&mut self, q: usize, acc: f64) -> Result<(), OptimizeError> {
        if q == self.coords.len() {
            let e = self.bound(acc);
            if e < self.best {
                self.best = e;
                self.best_idx = Some(self.idx.clone());
            }
            return Ok(());
        }
        let (e, i) = self.coords[q];
        let c = self.top.layout.edge_cuts[e];
        let lo = if i == 0 { 1 } else { self.idx[q - 1] + 1 };
        let hi = self.points[q] as u32 - (c - 1 - i) as u32;
        for x in lo..=hi {
            self.visited += 1;
            if self.visited > LIMIT {
                return Err(OptimizeError::OracleBudget { limit: LIMIT });
            }
            self.idx[q] = x;
            self.set_pieces(q);
            let mut a = acc;
            for j in 0..self.ready[q].len() {
                let cl = self.ready[q][j];
                let v = self.value(cl);
                a = self.absorb(a, v);
            }
            if self.bound(a) >= self.best {
                continue;
            }
            self.dfs(q + 1, a)?;
        }
        Ok(())
    }
}

/// Global optimum over all topologies with at most four interior cuts and
/// all cut positions on multiples of `h` strictly inside the edges.
/// Topologies whose continuous lower bound cannot beat the incumbent are
/// skipped, which keeps the result exact for the discretised problem.
pub fn grid_oracle(
    g: &MetricGraph,
    k: usize,
    p: Exponent,
    problem: Problem,
    class: PartitionClass,
    h: f64,
) -> Result<OptimizeResult, OptimizeError> {
    let min = g.edges().iter().map(|e| e.len()).fold(f64::INFINITY, f64::min);
    if !(h > 0.0 && h <= min / 8.0 * (1.0 + 1e-12)) {
        return Err(OptimizeError::InvalidRequest(format!(
            "grid step {h} must lie in (0, ell_min/8]"
        )));
    }
    let req = OptimizeRequest::new(g.clone(), k, p, problem, class);
    req.validate()?;
    let budget = Budget::with_uniform_cap(g, MAX_CUTS, usize::MAX);
    let enumeration = enumerate_topologies(g, k, &budget);
    let mut tops: Vec<Topology> = enumeration
        .skeletons
        .into_iter()
        .filter(|c| c.cut_count() <= MAX_CUTS)
        .map(|c| Topology::new(g, c, problem, p))
        .filter(|t| admissible(t, problem, class))
        .collect();
    tops.sort_by(|a, b| a.lower_bound.total_cmp(&b.lower_bound));
    let count = tops.len();
    let mut best = f64::INFINITY;
    let mut incumbent: Option<Incumbent> = None;
    let mut visited = 0;
    for top in &tops {
        if top.lower_bound >= best {
            break;
        }
        let layout = &top.layout;
        let mut coords = Vec::new();
        let mut points = Vec::new();
        for e in 0..g.edge_count() {
            for i in 0..layout.edge_cuts[e] {
                coords.push((e, i));
                points.push(grid_points(top.edge_len[e], h));
            }
        }
        if coords.iter().zip(&points).any(|(&(e, _), &n)| n < layout.edge_cuts[e]) {
            continue;
        }
        // last coordinate bounding each cluster's pieces
        let mut ready = vec![Vec::new(); coords.len()];
        let mut fixed = Vec::new();
        for (cl, t) in top.templates.iter().enumerate() {
            let last = t
                .pieces
                .iter()
                .filter_map(|&pi| {
                    let piece = layout.pieces[pi];
                    let c = layout.edge_cuts[piece.edge];
                    let base = layout.offsets[piece.edge];
                    match (piece.index, c) {
                        (_, 0) => None,
                        (i, c) if i == c => Some(base + i - 1),
                        (i, _) => Some(base + i),
                    }
                })
                .max();
            match last {
                Some(q) => ready[q].push(cl),
                None => fixed.push(cl),
            }
        }
        let piece_len: Vec<f64> = layout
            .pieces
            .iter()
            .map(|pc| {
                if layout.edge_cuts[pc.edge] == 0 {
                    top.edge_len[pc.edge]
                } else {
                    0.0
                }
            })
            .collect();
        let mut s = Search {
            top,
            p,
            h,
            k,
            points,
            idx: vec![0; coords.len()],
            coords,
            ready,
            cache: vec![HashMap::new(); top.templates.len()],
            piece_len,
            visited: 0,
            best,
            best_idx: None,
        };
        let mut acc = 0.0;
        for cl in fixed {
            let v = s.value(cl);
            acc = s.absorb(acc, v);
        }
        if s.bound(acc) < best {
            s.dfs(0, acc)?;
        }
        visited += s.visited;
        if visited > LIMIT {
            return Err(OptimizeError::OracleBudget { limit: LIMIT });
        }
        if let Some(idx) = s.best_idx {
            let positions: Vec<f64> = s
                .coords
                .iter()
                .zip(&idx)
                .map(|(&(e, _), &x)| x as f64 * h / top.edge_len[e])
                .collect();
            let before = incumbent.as_ref().map(|b| b.energy);
            offer(&mut incumbent, &req, top.config.with_positions(&positions));
            if incumbent.as_ref().map(|b| b.energy) != before {
                best = s.best;
            }
        }
    }
    let b = incumbent.ok_or(OptimizeError::Infeasible { k, truncated: false })?;
    Ok(OptimizeResult {
        energy: b.energy,
        partition: b.partition,
        cut_config: b.config,
        certified: true,
        evaluations: visited,
        report: b.report,
        truncated: false,
        topologies: count,
    })
}
