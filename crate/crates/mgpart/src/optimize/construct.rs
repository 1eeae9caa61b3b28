//! Constructive test partitions: equipartitions along trails and the
//! edge subdivisions behind the upper bounds, plus greedy merging.

use super::{OptimizeError, PartitionClass};
use crate::graph::{eulerian_trail, trail_cover, TrailStep};
use crate::graph::{End, MetricGraph, Stub};
use crate::partition::{apply_cuts, energy, Classification, CutConfig, Exponent, LocationKind, Partition, Problem};
use std::collections::BTreeMap;

/// Relative distance under which a trail cut snaps onto a vertex.
const SNAP: f64 = 1e-12;

/// Collects cuts and per-visit vertex blocks for a family of edge-disjoint
/// trails.
struct TrailCutter<'g> {
    g: &'g MetricGraph,
    config: CutConfig,
    blocks: BTreeMap<usize, Vec<Vec<Stub>>>,
}

fn arriving(step: &TrailStep) -> Stub {
    Stub::new(step.edge, if step.forward { End::Head } else { End::Tail })
}

fn leaving(step: &TrailStep) -> Stub {
    Stub::new(step.edge, if step.forward { End::Tail } else { End::Head })
}

impl<'g> TrailCutter<'g> {
    fn new(g: &'g MetricGraph) -> Self {
        TrailCutter {
            g,
            config: CutConfig::new(),
            blocks: BTreeMap::new(),
        }
    }

    /// Cuts `trail` into `pieces` intervals of equal length. Every visit of
    /// a vertex becomes its own block, split further when a cut lands on
    /// it; the two trail ends are singleton blocks.
    fn add(&mut self, trail: &[TrailStep], pieces: usize) {
        let g = self.g;
        let lens: Vec<f64> = trail.iter().map(|s| g.length(s.edge)).collect();
        let total: f64 = lens.iter().sum();
        let mut acc: Vec<f64> = vec![0.0];
        for l in &lens {
            acc.push(acc.last().unwrap() + l);
        }
        // visits[i]: vertex between step i and step i+1, and whether cut
        let mut cut_at_visit = vec![false; trail.len().saturating_sub(1)];
        for j in 1..pieces {
            let s = total * j as f64 / pieces as f64;
            let tol = SNAP * g.total_length();
            if let Some(i) = (1..trail.len()).find(|&i| (acc[i] - s).abs() <= tol) {
                cut_at_visit[i - 1] = true;
                continue;
            }
            let i = (0..trail.len()).find(|&i| s < acc[i + 1]).unwrap_or(trail.len() - 1);
            let off = (s - acc[i]) / lens[i];
            let t = if trail[i].forward { off } else { 1.0 - off };
            self.config.add_cut(trail[i].edge, t);
        }
        let first = trail[0];
        let last = trail[trail.len() - 1];
        self.push(first.from_vertex(g), vec![leaving(&first)]);
        self.push(last.to_vertex(g), vec![arriving(&last)]);
        for i in 0..trail.len() - 1 {
            let v = trail[i].to_vertex(g);
            let (a, b) = (arriving(&trail[i]), leaving(&trail[i + 1]));
            if cut_at_visit[i] {
                self.push(v, vec![a]);
                self.push(v, vec![b]);
            } else {
                self.push(v, vec![a, b]);
            }
        }
    }

    fn push(&mut self, v: usize, block: Vec<Stub>) {
        self.blocks.entry(v).or_default().push(block);
    }

    fn finish(mut self) -> CutConfig {
        for (v, blocks) in std::mem::take(&mut self.blocks) {
            if blocks.len() > 1 {
                self.config.set_split(v, blocks);
            }
        }
        self.config
    }
}

/// Cuts along `trails` with the given piece counts.
pub(crate) fn trail_config(g: &MetricGraph, trails: &[Vec<TrailStep>], counts: &[usize]) -> CutConfig {
    let mut cutter = TrailCutter::new(g);
    for (t, &m) in trails.iter().zip(counts) {
        cutter.add(t, m);
    }
    cutter.finish()
}

/// The Eulerian trail cut into `k` intervals of length `L/k`; rigid when
/// the intervals are no longer than the girth, connected-only otherwise.
pub fn eulerian_equipartition(g: &MetricGraph, k: usize) -> Result<Partition, OptimizeError> {
    if k == 0 {
        return Err(OptimizeError::TooFewClusters {
            k,
            components: g.component_count(),
        });
    }
    let trail = eulerian_trail(g).ok_or(OptimizeError::NoEulerianPath)?;
    Ok(apply_cuts(g, &trail_config(g, &[trail], &[k]))?)
}

/// Piece counts of the Dirichlet subdivision for parameter `n`.
fn dirichlet_counts(g: &MetricGraph, n: usize) -> Vec<usize> {
    let total = g.total_length();
    g.edges()
        .iter()
        .map(|e| {
            let x = e.len() * n as f64 / total;
            let leaves = usize::from(g.degree(e.tail) == 1) + usize::from(g.degree(e.head) == 1);
            match leaves {
                1 => (x + 0.5).floor() as usize,
                _ => x.floor() as usize,
            }
        })
        .collect()
}

/// Every edge subdivided: edges without a leaf into equal pieces, an edge
/// ending in a leaf into `m_e` pieces with the leaf piece half as long as
/// the others, and a lone interval into `n` pieces with half-length ends.
/// All vertices of degree at least two are fully split.
pub fn subdivision_test_partition_dirichlet(g: &MetricGraph, n: usize) -> Result<Partition, OptimizeError> {
    let total = g.total_length();
    let min = g.edges().iter().map(|e| e.len()).fold(f64::INFINITY, f64::min);
    if (n as f64) < total / min * (1.0 - 1e-12) {
        return Err(OptimizeError::ParameterTooSmall(format!(
            "n = {n} is below L/ell_min = {}",
            total / min
        )));
    }
    apply_cuts(g, &dirichlet_config(g, n)?).map_err(Into::into)
}

fn dirichlet_config(g: &MetricGraph, n: usize) -> Result<CutConfig, OptimizeError> {
    let counts = dirichlet_counts(g, n);
    let mut c = CutConfig::new();
    for (ei, e) in g.edges().iter().enumerate() {
        let tail_leaf = g.degree(e.tail) == 1;
        let head_leaf = g.degree(e.head) == 1;
        let lengths: Vec<f64> = if tail_leaf && head_leaf {
            // a whole component: half-length pieces at both ends
            let m = if g.component_count() == 1 {
                n
            } else {
                (e.len() * n as f64 / g.total_length()).round() as usize
            };
            if m < 2 {
                return Err(OptimizeError::ParameterTooSmall(format!(
                    "n = {n} gives an unsplit interval"
                )));
            }
            let unit = 1.0 / (m - 1) as f64;
            (0..m)
                .map(|i| if i == 0 || i == m - 1 { unit / 2.0 } else { unit })
                .collect()
        } else if tail_leaf || head_leaf {
            let m = counts[ei];
            if m == 0 {
                return Err(OptimizeError::ParameterTooSmall(format!(
                    "n = {n} leaves edge {} uncut",
                    e.id
                )));
            }
            let unit = 2.0 / (2 * m - 1) as f64;
            let mut ls: Vec<f64> = (0..m).map(|i| if i == 0 { unit / 2.0 } else { unit }).collect();
            if head_leaf {
                ls.reverse();
            }
            ls
        } else {
            let m = counts[ei];
            if m == 0 {
                return Err(OptimizeError::ParameterTooSmall(format!(
                    "n = {n} leaves edge {} uncut",
                    e.id
                )));
            }
            vec![1.0 / m as f64; m]
        };
        let mut acc = 0.0;
        for l in &lengths[..lengths.len() - 1] {
            acc += l;
            c.add_cut(ei, acc);
        }
    }
    for v in 0..g.vertex_count() {
        if g.degree(v) >= 2 {
            c = c.with_full_split(g, v);
        }
    }
    Ok(c)
}

/// Each trail of `cover` cut into `m_j = ⌊|T_j|k/L⌋` equal intervals; the
/// result has `Σ m_j` clusters, each no longer than `L/k`.
pub fn subdivision_test_partition_neumann(
    g: &MetricGraph,
    k: usize,
    cover: &[Vec<TrailStep>],
) -> Result<Partition, OptimizeError> {
    let counts = neumann_counts(g, k, cover)
        .ok_or_else(|| OptimizeError::ParameterTooSmall(format!("k = {k} leaves a cover trail without a piece")))?;
    apply_cuts(g, &trail_config(g, cover, &counts)).map_err(Into::into)
}

fn neumann_counts(g: &MetricGraph, k: usize, cover: &[Vec<TrailStep>]) -> Option<Vec<usize>> {
    let total = g.total_length();
    let counts: Vec<usize> = cover
        .iter()
        .map(|t| {
            let len: f64 = t.iter().map(|s| g.length(s.edge)).sum();
            (len * k as f64 / total * (1.0 + 1e-12)).floor() as usize
        })
        .collect();
    counts.iter().all(|&m| m >= 1).then_some(counts)
}

/// Trail-cover equipartition with exactly `k` clusters: the smallest `k'`
/// whose counts reach `k`, then counts reduced where pieces are shortest.
fn neumann_seed(g: &MetricGraph, k: usize) -> Option<CutConfig> {
    let cover = trail_cover(g);
    let lens: Vec<f64> = cover.iter().map(|t| t.iter().map(|s| g.length(s.edge)).sum()).collect();
    let mut kk = k;
    let mut counts = loop {
        if let Some(c) = neumann_counts(g, kk, &cover) {
            if c.iter().sum::<usize>() >= k {
                break c;
            }
        }
        kk += 1;
        if kk > 4 * k + 4 * g.edge_count() + 8 {
            return None;
        }
    };
    while counts.iter().sum::<usize>() > k {
        let j = (0..counts.len()).filter(|&j| counts[j] > 1).max_by(|&a, &b| {
            (counts[a] as f64 / lens[a])
                .total_cmp(&(counts[b] as f64 / lens[b]))
                .then(b.cmp(&a))
        })?;
        counts[j] -= 1;
    }
    Some(trail_config(g, &cover, &counts))
}

/// Smallest `n ≥ L/ell_min` whose Dirichlet subdivision has at least `k`
/// pieces, merged down to `k`.
fn dirichlet_seed(g: &MetricGraph, k: usize, p: Exponent, class: PartitionClass) -> Option<CutConfig> {
    let total = g.total_length();
    let min = g.edges().iter().map(|e| e.len()).fold(f64::INFINITY, f64::min);
    let mut n = (total / min * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    loop {
        if let Ok(c) = dirichlet_config(g, n) {
            let pieces = apply_cuts(g, &c).ok()?.k();
            if pieces >= k {
                return merge_down(g, c, k, Problem::Dirichlet, p, class);
            }
        }
        n += 1;
        if n > 4 * k + 4 * g.edge_count() + 8 {
            return None;
        }
    }
}

/// Drops cut locations that lie inside a single cluster.
fn clean(g: &MetricGraph, c: &CutConfig, part: &Partition) -> CutConfig {
    let comp = part.layout().component_of_node();
    let mut out = c.clone();
    let mut removals: Vec<(usize, usize)> = Vec::new();
    for loc in &part.layout().locations {
        let first = comp[loc.nodes[0]];
        if loc.nodes.iter().all(|&n| comp[n] == first) {
            match loc.kind {
                LocationKind::Cut { edge, index } => removals.push((edge, index)),
                LocationKind::Vertex(v) => {
                    out.set_split(v, vec![g.stubs(v).to_vec()]);
                }
            }
        }
    }
    removals.sort_by(|a, b| b.cmp(a));
    for (e, i) in removals {
        out.remove_cut(e, i);
    }
    out
}

fn admissible(part: &Partition, class: PartitionClass) -> bool {
    match class {
        PartitionClass::Rigid => part.classification() == Classification::Rigid,
        PartitionClass::Connected => part.classification() != Classification::Invalid,
    }
}

/// Greedily joins neighbouring clusters until `k` remain, each time taking
/// the join with the lowest energy. For the rigid class, cut locations that
/// end up inside one cluster are removed after every join.
pub fn merge_down(
    g: &MetricGraph,
    c: CutConfig,
    k: usize,
    problem: Problem,
    p: Exponent,
    class: PartitionClass,
) -> Option<CutConfig> {
    let tidy = |c: CutConfig| -> Option<(CutConfig, Partition)> {
        let part = apply_cuts(g, &c).ok()?;
        if class == PartitionClass::Rigid {
            let c2 = clean(g, &c, &part);
            let part2 = apply_cuts(g, &c2).ok()?;
            Some((c2, part2))
        } else {
            Some((c, part))
        }
    };
    let (mut c, mut part) = tidy(c)?;
    while part.k() > k {
        let comp = part.layout().component_of_node();
        let mut best: Option<(f64, CutConfig, Partition)> = None;
        for loc in &part.layout().locations {
            let mut candidates = Vec::new();
            match loc.kind {
                LocationKind::Cut { edge, index } => {
                    if comp[loc.nodes[0]] != comp[loc.nodes[1]] {
                        let mut d = c.clone();
                        d.remove_cut(edge, index);
                        candidates.push(d);
                    }
                }
                LocationKind::Vertex(v) => {
                    let blocks = &c.splits()[&v];
                    for a in 0..blocks.len() {
                        for b in a + 1..blocks.len() {
                            if comp[loc.nodes[a]] == comp[loc.nodes[b]] {
                                continue;
                            }
                            let mut nb: Vec<Vec<Stub>> = Vec::new();
                            let mut joined = blocks[a].clone();
                            joined.extend_from_slice(&blocks[b]);
                            nb.push(joined);
                            for (i, bl) in blocks.iter().enumerate() {
                                if i != a && i != b {
                                    nb.push(bl.clone());
                                }
                            }
                            let mut d = c.clone();
                            d.set_split(v, nb);
                            candidates.push(d);
                        }
                    }
                }
            }
            for d in candidates {
                let Some((d, dp)) = tidy(d) else { continue };
                if dp.k() + 1 != part.k() || !admissible(&dp, class) {
                    continue;
                }
                let Ok(rep) = energy(&dp, problem, p) else { continue };
                let better = match &best {
                    None => true,
                    Some((e, bc, _)) => rep.energy < *e || (rep.energy == *e && d.lex_cmp(bc).is_lt()),
                };
                if better {
                    best = Some((rep.energy, d, dp));
                }
            }
        }
        let (_, d, dp) = best?;
        c = d;
        part = dp;
    }
    (part.k() == k).then_some(c)
}

/// Constructive starting points for `minimize`, each with exactly `k`
/// clusters and admissible for `class`.
pub(crate) fn seeds(g: &MetricGraph, k: usize, problem: Problem, p: Exponent, class: PartitionClass) -> Vec<CutConfig> {
    let mut out: Vec<CutConfig> = Vec::new();
    let mut push = |c: Option<CutConfig>| {
        if let Some(c) = c {
            if let Ok(part) = apply_cuts(g, &c) {
                let ok = part.k() == k && admissible(&part, class) && energy(&part, problem, p).is_ok();
                if ok && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    };
    if g.is_connected() {
        push(eulerian_trail(g).map(|t| trail_config(g, &[t], &[k])));
    }
    push(neumann_seed(g, k));
    push(dirichlet_seed(g, k, p, class));
    out
}
