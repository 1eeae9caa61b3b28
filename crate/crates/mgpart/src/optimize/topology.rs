//! One cut topology: cluster templates, a lower bound on its energy, a
//! starting point from the length allocation, and continuous refinement.

use super::flow::{Allocation, AllocationResult};
use crate::graph::MetricGraph;
use crate::partition::{ClusterTemplate, CutConfig, Exponent, Layout, Problem};
use crate::spectral::Reduced;
use minilp::{ComparisonOp, OptimizationDirection, Problem as LinearProgram};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::f64::consts::PI;

/// Minimum gap between consecutive cut coordinates, relative to the edge.
pub(crate) const MIN_GAP: f64 = 1e-9;

/// Coefficient `c` with `eigenvalue ≥ cπ²/ℓ²` for a reduced part, and
/// whether equality holds for every choice of piece lengths.
///
/// Natural parts get 1, or 4 for a bare loop. Dirichlet parts get ¼, or 1
/// when the part is a tree whose leaves are all Dirichlet: every level of
/// the positive ground state is then taken at least twice, so it
/// rearranges onto a mixed interval of half the length.
fn part_coefficient(part: &Reduced<Vec<usize>>, natural: bool) -> (f64, bool) {
    if part.edges.len() == 1 {
        let (u, v, _) = part.edges[0];
        if natural {
            return (if u == v { 4.0 } else { 1.0 }, true);
        }
        if u != v {
            let ends = usize::from(part.dirichlet[u]) + usize::from(part.dirichlet[v]);
            return (if ends == 2 { 1.0 } else { 0.25 }, true);
        }
    }
    if natural {
        return (1.0, false);
    }
    let mut deg = vec![0usize; part.vertex_count];
    for &(u, v, _) in &part.edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    let tree = part.edges.len() + 1 == part.vertex_count && part.edges.iter().all(|&(u, v, _)| u != v);
    let leaves_dirichlet = (0..part.vertex_count).all(|x| deg[x] != 1 || part.dirichlet[x]);
    if tree && leaves_dirichlet {
        (1.0, false)
    } else {
        (0.25, false)
    }
}

/// Evaluation context for one topology.
pub(crate) struct Topology {
    pub config: CutConfig,
    pub layout: Layout,
    pub templates: Vec<ClusterTemplate>,
    pub edge_len: Vec<f64>,
    /// Clusters whose value depends on each coordinate.
    touched: Vec<Vec<usize>>,
    /// `(edge, cut index)` of each coordinate.
    coords: Vec<(usize, usize)>,
    coef: Vec<f64>,
    exact: bool,
    pub lower_bound: f64,
    allocation: Option<AllocationResult>,
}

/// Score of a position vector; compared leximax for `p = ∞`.
#[derive(Clone, Debug)]
pub(crate) struct Score {
    pub energy: f64,
    sorted: Vec<f64>,
}

impl Score {
    fn better_than(&self, other: &Score) -> bool {
        self.cmp(other) == Ordering::Less
    }

    fn cmp(&self, other: &Score) -> Ordering {
        match self.energy.total_cmp(&other.energy) {
            Ordering::Equal => {
                for (a, b) in self.sorted.iter().zip(&other.sorted) {
                    match a.total_cmp(b) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            o => o,
        }
    }
}

/// Refinement settings.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Refine {
    pub tol: f64,
    pub multistart: usize,
    pub seed: u64,
    pub max_sweeps: usize,
}

/// Outcome of refining one topology.
#[derive(Clone, Debug)]
pub(crate) struct Refined {
    pub energy: f64,
    pub positions: Vec<f64>,
    pub evaluations: usize,
}

impl Topology {
    /// `config` supplies the topology; its coordinates are ignored except
    /// through [`Topology::refine_from`].
    pub fn new(g: &MetricGraph, config: CutConfig, problem: Problem, p: Exponent) -> Topology {
        let layout = Layout::new(g, &config.counts(g), config.splits());
        let natural = problem.is_natural();
        let comps = layout.component_pieces();
        let templates: Vec<ClusterTemplate> = comps
            .iter()
            .map(|pc| ClusterTemplate::new(&layout, pc, natural))
            .collect();
        let mut touched = Vec::with_capacity(layout.position_count());
        let mut coords = Vec::with_capacity(layout.position_count());
        let mut piece_base = vec![0; g.edge_count()];
        let mut acc = 0;
        for e in 0..g.edge_count() {
            piece_base[e] = acc;
            acc += layout.edge_cuts[e] + 1;
        }
        for e in 0..g.edge_count() {
            for i in 0..layout.edge_cuts[e] {
                let a = layout.component_of_piece[piece_base[e] + i];
                let b = layout.component_of_piece[piece_base[e] + i + 1];
                touched.push(if a == b { vec![a] } else { vec![a, b] });
                coords.push((e, i));
            }
        }
        let mut coef = Vec::with_capacity(templates.len());
        let mut exact = true;
        for t in &templates {
            let (c, ex) = t
                .parts()
                .iter()
                .map(|part| part_coefficient(part, natural))
                .fold((f64::INFINITY, true), |acc, x| (acc.0.min(x.0), acc.1 && x.1));
            coef.push(c);
            exact &= ex && t.parts().len() == 1;
        }
        let edge_len = g.lengths();
        let mut top = Topology {
            config,
            layout,
            templates,
            edge_len,
            touched,
            coords,
            coef,
            exact,
            lower_bound: 0.0,
            allocation: None,
        };
        top.lower_bound = top.compute_lower_bound(p);
        top
    }

    fn compute_lower_bound(&mut self, p: Exponent) -> f64 {
        let k = self.templates.len();
        let mut edges_of = vec![Vec::new(); k];
        for (i, piece) in self.layout.pieces.iter().enumerate() {
            let c = self.layout.component_of_piece[i];
            if !edges_of[c].contains(&piece.edge) {
                edges_of[c].push(piece.edge);
            }
        }
        let alloc = Allocation {
            supply: &self.edge_len,
            coef: &self.coef,
            edges_of: &edges_of,
        }
        .solve();
        let level = alloc.level;
        self.allocation = Some(alloc);
        match p {
            Exponent::Infinity => level,
            Exponent::Finite(p) => {
                // relax to Σℓᵢ = L: optimum ℓᵢ ∝ cᵢ^{p/(2p+1)}
                let total: f64 = self.edge_len.iter().sum();
                let w: f64 = self.coef.iter().map(|c| c.powf(p / (2.0 * p + 1.0))).sum();
                PI * PI * (w.powf(2.0 * p + 1.0) / k as f64).powf(1.0 / p) / (total * total)
            }
        }
    }

    /// Positions realising the allocation, with every piece at least the
    /// minimum gap long.
    pub fn allocation_start(&self) -> Vec<f64> {
        let alloc = self.allocation.as_ref().expect("lower bound computed");
        let pieces = &self.layout.pieces;
        let mut len = vec![0.0; pieces.len()];
        let mut used = vec![0.0; self.edge_len.len()];
        // pieces per (edge, cluster)
        for (c, flows) in alloc.flow.iter().enumerate() {
            for &(e, amount) in flows {
                let ids: Vec<usize> = (0..pieces.len())
                    .filter(|&i| pieces[i].edge == e && self.layout.component_of_piece[i] == c)
                    .collect();
                for &i in &ids {
                    len[i] += amount / ids.len() as f64;
                }
                used[e] += amount;
            }
        }
        let mut pos = Vec::with_capacity(self.layout.position_count());
        for e in 0..self.edge_len.len() {
            let c = self.layout.edge_cuts[e];
            if c == 0 {
                continue;
            }
            let first = self.layout.offsets[e] + e; // pieces of edge e start here
            let spare = (self.edge_len[e] - used[e]).max(0.0) / (c + 1) as f64;
            let mut ls: Vec<f64> = (0..=c).map(|j| len[first + j] + spare).collect();
            let floor = MIN_GAP * self.edge_len[e];
            for l in ls.iter_mut() {
                *l = l.max(floor);
            }
            let s: f64 = ls.iter().sum();
            let mut acc = 0.0;
            for l in ls.iter().take(c) {
                acc += l / s;
                pos.push(acc);
            }
        }
        sanitize(&self.layout, &mut pos);
        pos
    }

    fn values(&self, pos: &[f64]) -> Vec<f64> {
        let pl = self.layout.piece_lengths(&self.edge_len, pos);
        self.templates.iter().map(|t| t.eval(&pl)).collect()
    }

    fn score(&self, values: &[f64], p: Exponent) -> Score {
        let energy = p.mean(values);
        let sorted = match p {
            Exponent::Infinity => {
                let mut s = values.to_vec();
                s.sort_by(|a, b| b.total_cmp(a));
                s
            }
            Exponent::Finite(_) => Vec::new(),
        };
        Score { energy, sorted }
    }

    /// Refines from the allocation start and `multistart` random starts.
    pub fn refine(&self, p: Exponent, settings: Refine, salt: u64) -> Refined {
        let start = self.allocation_start();
        let mut best = self.refine_from(start, p, settings);
        if self.exact && matches!(p, Exponent::Infinity) {
            return best;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for _ in 0..settings.multistart {
            let mut pos = Vec::with_capacity(self.layout.position_count());
            for e in 0..self.edge_len.len() {
                let mut ts: Vec<f64> = (0..self.layout.edge_cuts[e])
                    .map(|_| rng.gen_range(0.02..0.98))
                    .collect();
                ts.sort_by(f64::total_cmp);
                pos.extend(ts);
            }
            sanitize(&self.layout, &mut pos);
            let r = self.refine_from(pos, p, settings);
            let evaluations = best.evaluations + r.evaluations;
            if r.energy < best.energy {
                best = r;
            }
            best.evaluations = evaluations;
        }
        best
    }

    /// Cyclic golden-section coordinate descent with a pattern move after
    /// each sweep.
    pub fn refine_from(&self, mut pos: Vec<f64>, p: Exponent, settings: Refine) -> Refined {
        sanitize(&self.layout, &mut pos);
        let mut values = self.values(&pos);
        let mut evaluations = 1;
        let mut score = self.score(&values, p);
        if pos.is_empty()
            || (self.exact
                && matches!(p, Exponent::Infinity)
                && score.energy <= self.lower_bound * (1.0 + settings.tol))
        {
            return Refined {
                energy: score.energy,
                positions: pos,
                evaluations,
            };
        }
        let pl0 = self.layout.piece_lengths(&self.edge_len, &pos);
        let mut piece_len = pl0;
        let mut step: Vec<f64> = vec![f64::INFINITY; pos.len()];
        // for the max, descent only needs to reach the basin; the polish
        // resolves the balance point
        let polished = matches!(p, Exponent::Infinity);
        let (sweeps, tol) = if polished {
            (
                settings.max_sweeps.min(POLISH_SWEEPS),
                settings.tol.max(POLISH_HANDOFF_TOL),
            )
        } else {
            (settings.max_sweeps, settings.tol)
        };
        for _sweep in 0..sweeps {
            let before = score.clone();
            let sum_before: f64 = values.iter().sum();
            let old = pos.clone();
            for q in 0..pos.len() {
                let (lo, hi) = self.bounds(&pos, q);
                if hi <= lo {
                    continue;
                }
                let x0 = pos[q];
                let radius = if step[q].is_finite() {
                    (4.0 * step[q]).max(1e-9)
                } else {
                    hi - lo
                };
                let (x, s, v, n) = self.line_min(&pos, &values, &piece_len, q, lo, hi, x0, radius, p, &score);
                evaluations += n;
                step[q] = (x - x0).abs();
                pos[q] = x;
                values = v;
                score = s;
                self.update_pieces(&mut piece_len, &pos, q);
            }
            // pattern move along the sweep displacement
            let d: Vec<f64> = pos.iter().zip(&old).map(|(a, b)| a - b).collect();
            if d.iter().any(|&x| x != 0.0) {
                let amax = self.max_step(&pos, &d).min(4.0);
                if amax > 0.0 {
                    let (cand, n) = self.pattern_search(&pos, &d, amax, p, &score);
                    evaluations += n;
                    if let Some((np, nv, ns)) = cand {
                        pos = np;
                        values = nv;
                        score = ns;
                        piece_len = self.layout.piece_lengths(&self.edge_len, &pos);
                    }
                }
            }
            let gain = (before.energy - score.energy) / before.energy.abs().max(1e-300);
            let sum_after: f64 = values.iter().sum();
            let sum_gain = (sum_before - sum_after) / sum_before.abs().max(1e-300);
            if gain < tol && sum_gain < tol {
                break;
            }
        }
        if polished {
            let (np, ns, n) = self.polish(pos, score, p);
            pos = np;
            score = ns;
            evaluations += n;
        }
        Refined {
            energy: score.energy,
            positions: pos,
            evaluations,
        }
    }

    /// Sequential linear programming for the max: minimise `t` subject to
    /// `vᵢ + ∇vᵢ·d ≤ t` inside a trust region, keeping coordinate order.
    /// Coordinate descent approaches such balance points slowly when a
    /// cluster trades length with several neighbours at once, and it cannot
    /// slide along a curve of balanced configurations.
    fn polish(&self, mut pos: Vec<f64>, mut score: Score, p: Exponent) -> (Vec<f64>, Score, usize) {
        let n = pos.len();
        let k = self.templates.len();
        let mut evaluations = 0;
        let mut radius = 1e-2;
        for _ in 0..200 {
            if radius < 1e-14 {
                break;
            }
            let values = self.values(&pos);
            let e0 = score.energy;
            let mut grad = vec![vec![0.0; n]; k];
            for q in 0..n {
                let (lo, hi) = self.bounds(&pos, q);
                let h = 1e-7 * (hi - lo).max(1e-12);
                let (a, b) = ((pos[q] - h).max(lo), (pos[q] + h).min(hi));
                if b <= a {
                    continue;
                }
                let mut pa = pos.clone();
                pa[q] = a;
                let mut pb = pos.clone();
                pb[q] = b;
                let (va, vb) = (self.values(&pa), self.values(&pb));
                evaluations += 2;
                for c in &self.touched[q] {
                    grad[*c][q] = (vb[*c] - va[*c]) / ((b - a) * e0);
                }
            }
            let mut lp = LinearProgram::new(OptimizationDirection::Minimize);
            let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
            let d: Vec<_> = (0..n)
                .map(|q| {
                    let (lo, hi) = self.bounds(&pos, q);
                    lp.add_var(
                        0.0,
                        ((lo - pos[q]).max(-radius).min(0.0), (hi - pos[q]).min(radius).max(0.0)),
                    )
                })
                .collect();
            for q in 0..n {
                let (e, i) = self.coords[q];
                if i + 1 < self.layout.edge_cuts[e] {
                    let gap = pos[q + 1] - pos[q] - MIN_GAP;
                    lp.add_constraint([(d[q], 1.0), (d[q + 1], -1.0)], ComparisonOp::Le, gap.max(0.0));
                }
            }
            for c in 0..k {
                let mut row: Vec<_> = (0..n)
                    .filter(|&q| grad[c][q] != 0.0)
                    .map(|q| (d[q], grad[c][q]))
                    .collect();
                row.push((t, -1.0));
                lp.add_constraint(&row, ComparisonOp::Le, -values[c] / e0);
            }
            let Ok(sol) = lp.solve() else { break };
            let predicted = 1.0 - sol[t];
            if !(predicted > 1e-15) {
                break;
            }
            let mut cand: Vec<f64> = (0..n).map(|q| pos[q] + sol[d[q]]).collect();
            sanitize(&self.layout, &mut cand);
            let s = self.score(&self.values(&cand), p);
            evaluations += 1;
            let actual = 1.0 - s.energy / e0;
            if s.better_than(&score) {
                pos = cand;
                score = s;
                if actual > 0.5 * predicted {
                    radius *= 2.0;
                }
            } else {
                radius *= 0.25;
            }
        }
        (pos, score, evaluations)
    }

    /// Feasible interval for coordinate `q` keeping the minimum gap.
    fn bounds(&self, pos: &[f64], q: usize) -> (f64, f64) {
        let (e, i) = self.coordinate(q);
        let gap = MIN_GAP;
        let base = self.layout.offsets[e];
        let c = self.layout.edge_cuts[e];
        let lo = if i == 0 { 0.0 } else { pos[base + i - 1] } + gap;
        let hi = if i + 1 == c { 1.0 } else { pos[base + i + 1] } - gap;
        (lo, hi)
    }

    fn coordinate(&self, q: usize) -> (usize, usize) {
        self.coords[q]
    }

    fn update_pieces(&self, piece_len: &mut [f64], pos: &[f64], q: usize) {
        let (e, i) = self.coordinate(q);
        let first = self.layout.offsets[e] + e;
        for j in [first + i, first + i + 1] {
            let (t0, t1) = self.layout.piece_span(j, pos);
            piece_len[j] = self.edge_len[e] * (t1 - t0);
        }
    }

    fn eval_coordinate(&self, pos: &[f64], values: &[f64], piece_len: &[f64], q: usize, x: f64) -> Vec<f64> {
        let (e, i) = self.coordinate(q);
        let first = self.layout.offsets[e] + e;
        let mut pl = piece_len.to_vec();
        let base = self.layout.offsets[e];
        let c = self.layout.edge_cuts[e];
        let left = if i == 0 { 0.0 } else { pos[base + i - 1] };
        let right = if i + 1 == c { 1.0 } else { pos[base + i + 1] };
        pl[first + i] = self.edge_len[e] * (x - left);
        pl[first + i + 1] = self.edge_len[e] * (right - x);
        let mut v = values.to_vec();
        for &cl in &self.touched[q] {
            v[cl] = self.templates[cl].eval(&pl);
        }
        v
    }

    #[allow(clippy::too_many_arguments)]
    fn line_min(
        &self,
        pos: &[f64],
        values: &[f64],
        piece_len: &[f64],
        q: usize,
        lo: f64,
        hi: f64,
        x0: f64,
        radius: f64,
        p: Exponent,
        current: &Score,
    ) -> (f64, Score, Vec<f64>, usize) {
        let mut n = 0;
        let mut eval = |x: f64| {
            n += 1;
            let v = self.eval_coordinate(pos, values, piece_len, q, x);
            let s = self.score(&v, p);
            (s, v)
        };
        let mut a = (x0 - radius).max(lo);
        let mut b = (x0 + radius).min(hi);
        let mut best = (x0, current.clone(), values.to_vec());
        for _ in 0..MAX_WIDENINGS {
            let (x, s, v) = golden(&mut eval, a, b, 1e-12);
            if s.better_than(&best.1) {
                best = (x, s, v);
            }
            // widen around the minimiser when it sits on an artificial
            // bracket end; the bracket grows monotonically towards [lo, hi]
            let at_a = best.0 - a < 1e-9 * (b - a).max(1e-12) && a > lo;
            let at_b = b - best.0 < 1e-9 * (b - a).max(1e-12) && b < hi;
            if !(at_a || at_b) {
                break;
            }
            let w = 2.0 * (b - a);
            let (na, nb) = ((best.0 - w).max(lo).min(a), (best.0 + w).min(hi).max(b));
            if na == a && nb == b {
                break;
            }
            a = na;
            b = nb;
        }
        let (x, s, v) = best;
        (x, s, v, n)
    }

    fn max_step(&self, pos: &[f64], d: &[f64]) -> f64 {
        let mut amax = f64::INFINITY;
        for q in 0..pos.len() {
            let (e, i) = self.coordinate(q);
            let base = self.layout.offsets[e];
            let c = self.layout.edge_cuts[e];
            // gap to the right neighbour (or 1) must stay ≥ MIN_GAP
            let (right, dr) = if i + 1 == c {
                (1.0, 0.0)
            } else {
                (pos[base + i + 1], d[base + i + 1])
            };
            let rel = d[q] - dr;
            if rel > 0.0 {
                amax = amax.min((right - pos[q] - MIN_GAP) / rel);
            }
            if i == 0 && d[q] < 0.0 {
                amax = amax.min((pos[q] - MIN_GAP) / -d[q]);
            }
        }
        amax.max(0.0)
    }

    #[allow(clippy::type_complexity)]
    fn pattern_search(
        &self,
        pos: &[f64],
        d: &[f64],
        amax: f64,
        p: Exponent,
        current: &Score,
    ) -> (Option<(Vec<f64>, Vec<f64>, Score)>, usize) {
        let mut n = 0;
        let mut eval = |a: f64| {
            n += 1;
            let cand: Vec<f64> = pos.iter().zip(d).map(|(x, dx)| x + a * dx).collect();
            let v = self.values(&cand);
            let s = self.score(&v, p);
            (s, (cand, v))
        };
        let (a, s, (cand, v)) = golden(&mut eval, 0.0, amax, 1e-10 * amax);
        if a > 0.0 && s.better_than(current) {
            (Some((cand, v, s)), n)
        } else {
            (None, n)
        }
    }
}

/// Cap on bracket widenings in a line search.
const MAX_WIDENINGS: usize = 64;
/// Sweep cap before handing a max problem to the polish.
const POLISH_SWEEPS: usize = 40;
/// Relative gain below which descent hands a max problem to the polish.
const POLISH_HANDOFF_TOL: f64 = 1e-6;

/// Golden-section search for the smallest score on `[a, b]`, also
/// returning the evaluated payload.
fn golden<T>(f: &mut impl FnMut(f64) -> (Score, T), mut a: f64, mut b: f64, tol: f64) -> (f64, Score, T) {
    const R: f64 = 0.618_033_988_749_894_9;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol.max(f64::EPSILON * b.abs().max(1.0)) {
        if fc.0.cmp(&fd.0) != Ordering::Greater {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = f(d);
        }
    }
    if fc.0.cmp(&fd.0) != Ordering::Greater {
        (c, fc.0, fc.1)
    } else {
        (d, fd.0, fd.1)
    }
}

/// Enforces strictly increasing coordinates in `(0, 1)` with the minimum gap.
pub(crate) fn sanitize(layout: &Layout, pos: &mut [f64]) {
    for (e, &c) in layout.edge_cuts.iter().enumerate() {
        let base = layout.offsets[e];
        for i in 0..c {
            let lo = if i == 0 { MIN_GAP } else { pos[base + i - 1] + MIN_GAP };
            let hi = 1.0 - MIN_GAP * (c - i) as f64;
            pos[base + i] = pos[base + i].max(lo).min(hi);
        }
    }
}
