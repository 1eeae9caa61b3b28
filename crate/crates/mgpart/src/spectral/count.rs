//! Eigenvalue counting on a quantum graph.
//!
//! For `λ = k²` not a pole, the number of eigenvalues below `λ` equals the
//! number of Dirichlet eigenvalues of the single edges below `λ` plus the
//! number of positive eigenvalues of the vertex Dirichlet-to-Neumann matrix
//! `A(k)` on the non-Dirichlet vertices. Edges with `k·ℓ` close to a multiple
//! of `π` are split by a dummy vertex so that `A(k)` stays bounded.

use super::reduce::Reduced;
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Lightweight graph for the solvers: vertex count, `(u, v, ℓ)` edges and
/// Dirichlet flags.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub dirichlet: Vec<bool>,
}

impl SpectralGraph {
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn degree(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for &(u, v, _) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn has_dirichlet(&self) -> bool {
        self.dirichlet.iter().any(|&d| d)
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = crate::graph::UnionFind::new(self.vertex_count);
        for &(u, v, _) in &self.edges {
            uf.union(u, v);
        }
        uf.labels().1 == 1
    }

    /// Splits every Dirichlet vertex into one degree-one copy per stub and
    /// returns the connected pieces. The Dirichlet spectrum is the union of
    /// the pieces' spectra.
    pub fn split_dirichlet(&self) -> Vec<SpectralGraph> {
        self.as_reduced()
            .split_dirichlet()
            .into_iter()
            .map(SpectralGraph::from)
            .collect()
    }

    /// Suppresses natural degree-2 vertices between distinct edges.
    pub fn normalized(&self) -> SpectralGraph {
        self.as_reduced().normalized(|a, b| a + b).into()
    }

    pub fn as_reduced(&self) -> Reduced<f64> {
        Reduced {
            vertex_count: self.vertex_count,
            edges: self.edges.clone(),
            dirichlet: self.dirichlet.clone(),
        }
    }
}

impl From<Reduced<f64>> for SpectralGraph {
    fn from(r: Reduced<f64>) -> Self {
        SpectralGraph {
            vertex_count: r.vertex_count,
            edges: r.edges,
            dirichlet: r.dirichlet,
        }
    }
}

/// Number of positive eigenvalues of a symmetric matrix.
fn positive_count(a: &DMatrix<f64>) -> usize {
    match a.nrows() {
        0 => 0,
        1 => usize::from(a[(0, 0)] > 0.0),
        2 => {
            let (p, q, r) = (a[(0, 0)], a[(1, 1)], a[(0, 1)]);
            let det = p * q - r * r;
            let tr = p + q;
            if det < 0.0 {
                1
            } else if tr > 0.0 {
                if det > 0.0 {
                    2
                } else {
                    1
                }
            } else {
                0
            }
        }
        _ => a.clone().symmetric_eigenvalues().iter().filter(|&&x| x > 0.0).count(),
    }
}

/// Natural leaf of `(u, v)` that can be eliminated in closed form, with
/// its attachment vertex.
fn short_pendant(g: &SpectralGraph, degree: &[usize], u: usize, v: usize) -> Option<(usize, usize)> {
    let free = |x: usize| degree[x] == 1 && !g.dirichlet[x];
    if u == v || (free(u) && free(v)) {
        None
    } else if free(u) {
        Some((u, v))
    } else if free(v) {
        Some((v, u))
    } else {
        None
    }
}

/// Number of eigenvalues `λ < k²`, counted with multiplicity, including a
/// zero eigenvalue when present. Requires `k > 0`.
///
/// A natural pendant with `k·ℓ < 1` is eliminated in closed form: its
/// leaf pivot `−k·cot(kℓ)` is negative and its attachment vertex gains
/// `k·tan(kℓ)`. Short pendants would otherwise put `±1/ℓ` entries into
/// `A(k)` and swamp the sign of its smallest eigenvalues.
pub fn count_below(g: &SpectralGraph, k: f64) -> usize {
    let degree = g.degree();
    let mut eliminated = vec![false; g.vertex_count];
    for &(u, v, l) in &g.edges {
        if k * l < 1.0 {
            if let Some((leaf, _)) = short_pendant(g, &degree, u, v) {
                eliminated[leaf] = true;
            }
        }
    }
    let mut index = vec![usize::MAX; g.vertex_count];
    let mut n = 0;
    for x in 0..g.vertex_count {
        if !g.dirichlet[x] && !eliminated[x] {
            index[x] = n;
            n += 1;
        }
    }
    let mut pieces: Vec<(usize, usize, f64)> = Vec::with_capacity(g.edges.len() + 4);
    let mut tails: Vec<(usize, f64)> = Vec::new();
    for &(u, v, l) in &g.edges {
        let kl = k * l;
        if let Some((leaf, at)) = short_pendant(g, &degree, u, v) {
            if eliminated[leaf] {
                tails.push((index[at], l));
                continue;
            }
        }
        let (iu, iv) = (index[u], index[v]);
        if kl > 2.0 && (kl.sin()).abs() < 0.25 {
            let l1 = 0.5 * PI / k;
            let d = n;
            n += 1;
            pieces.push((iu, d, l1));
            pieces.push((d, iv, l - l1));
        } else {
            pieces.push((iu, iv, l));
        }
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut edge_count = 0usize;
    for &(iu, iv, l) in &pieces {
        let kl = k * l;
        edge_count += ((kl / PI).ceil() as usize).saturating_sub(1);
        let (s, c) = kl.sin_cos();
        if iu == iv && iu != usize::MAX {
            a[(iu, iu)] += 2.0 * k * (1.0 - c) / s;
            continue;
        }
        let diag = -k * c / s;
        let off = k / s;
        if iu != usize::MAX {
            a[(iu, iu)] += diag;
        }
        if iv != usize::MAX {
            a[(iv, iv)] += diag;
        }
        if iu != usize::MAX && iv != usize::MAX {
            a[(iu, iv)] += off;
            a[(iv, iu)] += off;
        }
    }
    for &(i, l) in &tails {
        if i != usize::MAX {
            a[(i, i)] += k * (k * l).tan();
        }
    }
    let (reduced, positive) = eliminate_dominant(a);
    edge_count + positive + positive_count(&reduced)
}

/// Ratio above which a diagonal entry is pivoted out before the
/// eigenvalue count.
const DOMINANCE: f64 = 1e4;

/// Removes strongly diagonally dominant rows by Schur complement, which
/// preserves inertia. Returns the remaining matrix and the number of
/// positive pivots removed.
fn eliminate_dominant(mut a: DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let mut positive = 0;
    loop {
        let n = a.nrows();
        let pick = (0..n)
            .filter(|&i| {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
                a[(i, i)].abs() > DOMINANCE * off.max(f64::MIN_POSITIVE)
            })
            .max_by(|&i, &j| a[(i, i)].abs().total_cmp(&a[(j, j)].abs()));
        let Some(p) = pick else { return (a, positive) };
        let d = a[(p, p)];
        positive += usize::from(d > 0.0);
        for i in 0..n {
            for j in 0..n {
                if i != p && j != p {
                    a[(i, j)] -= a[(i, p)] * a[(p, j)] / d;
                }
            }
        }
        a = a.remove_row(p).remove_column(p);
    }
}

/// Relative bisection tolerance on `k`.
pub const K_TOL: f64 = 1e-14;

/// Lower bound on `√λ` for the first positive eigenvalue of a connected graph.
fn k_floor(g: &SpectralGraph) -> f64 {
    0.49 * PI / g.total_length()
}

fn bisect(g: &SpectralGraph, mut lo: f64, mut hi: f64, target: usize) -> f64 {
    // invariant: count(lo) < target <= count(hi)
    while hi - lo > K_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if count_below(g, mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The `j`-th eigenvalue (1-based, with multiplicity, zero included) of a
/// connected graph, returned as `k = √λ`.
pub fn kth_k(g: &SpectralGraph, j: usize) -> f64 {
    let zero = usize::from(!g.has_dirichlet());
    if j <= zero {
        return 0.0;
    }
    let lo = k_floor(g);
    let mut hi = 2.0 * lo;
    while count_below(g, hi) < j {
        hi *= 2.0;
    }
    bisect(g, lo, hi, j)
}

/// The lowest `count` eigenvalues as `(k, multiplicity)` groups, ascending.
pub fn spectrum_k(g: &SpectralGraph, count: usize) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    let zero = usize::from(!g.has_dirichlet());
    if zero == 1 {
        out.push((0.0, 1));
    }
    if count <= zero {
        return out;
    }
    let lo = k_floor(g);
    let mut hi = 2.0 * lo;
    while count_below(g, hi) < count {
        hi *= 2.0;
    }
    let mut stack = vec![(lo, hi, zero, count_below(g, hi))];
    // depth-first, left interval first, so groups come out ascending
    while let Some((a, b, na, nb)) = stack.pop() {
        if nb == na {
            continue;
        }
        if b - a <= K_TOL * b {
            out.push((0.5 * (a + b), nb - na));
            if out.iter().map(|x| x.1).sum::<usize>() >= count {
                break;
            }
            continue;
        }
        let mid = 0.5 * (a + b);
        let nm = count_below(g, mid);
        stack.push((mid, b, nm, nb));
        stack.push((a, mid, na, nm));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(l: f64, d0: bool, d1: bool) -> SpectralGraph {
        SpectralGraph {
            vertex_count: 2,
            edges: vec![(0, 1, l)],
            dirichlet: vec![d0, d1],
        }
    }

    #[test]
    fn interval_counts() {
        let g = interval(1.0, false, false);
        assert_eq!(count_below(&g, 0.5), 1);
        assert_eq!(count_below(&g, PI + 0.1), 2);
        assert_eq!(count_below(&g, 2.0 * PI - 1e-9), 2);
        assert_eq!(count_below(&g, 2.0 * PI + 1e-9), 3);
        let g = interval(1.0, true, false);
        assert_eq!(count_below(&g, 0.5 * PI - 1e-9), 0);
        assert_eq!(count_below(&g, 0.5 * PI + 1e-9), 1);
    }

    #[test]
    fn loop_multiplicity() {
        let g = SpectralGraph {
            vertex_count: 1,
            edges: vec![(0, 0, 1.0)],
            dirichlet: vec![false],
        };
        let s = spectrum_k(&g, 5);
        assert_eq!(s.len(), 3);
        assert_eq!(s[1].1, 2);
        assert!((s[1].0 - 2.0 * PI).abs() < 1e-12);
        assert!((s[2].0 - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn split_and_normalize() {
        let g = SpectralGraph {
            vertex_count: 3,
            edges: vec![(0, 1, 1.0), (1, 2, 2.0)],
            dirichlet: vec![false, true, false],
        };
        let parts = g.split_dirichlet();
        assert_eq!(parts.len(), 2);
        let path = SpectralGraph {
            vertex_count: 3,
            edges: vec![(0, 1, 1.0), (1, 2, 2.0)],
            dirichlet: vec![false; 3],
        };
        let n = path.normalized();
        assert_eq!(n.edges, vec![(0, 1, 3.0)]);
    }

    #[test]
    fn short_natural_pendant_is_exact() {
        // the odd mode vanishes on the pendant, so μ₂ = π²/9 exactly
        let g = SpectralGraph {
            vertex_count: 4,
            edges: vec![(0, 1, 1.5), (1, 2, 1.5), (1, 3, 1e-9)],
            dirichlet: vec![false; 4],
        };
        let k = kth_k(&g, 2);
        assert!((k - PI / 3.0).abs() < 1e-13, "{}", k - PI / 3.0);
    }

    #[test]
    fn short_dirichlet_pendant_is_stable() {
        // tends to the centre-clamped value π/2 from below
        let g = SpectralGraph {
            vertex_count: 4,
            edges: vec![(0, 1, 1.0), (1, 2, 1.0), (1, 3, 1e-9)],
            dirichlet: vec![false, false, false, true],
        };
        let k = kth_k(&g, 1);
        assert!(k <= PI / 2.0 && PI / 2.0 - k < 1e-8, "{}", k - PI / 2.0);
    }
}
