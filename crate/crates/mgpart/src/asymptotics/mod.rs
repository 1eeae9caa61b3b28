//! Closed-form optimal energies, the first-order remainder
//! `c_k = (L_k − π²k²/L²)/k` and its limit set, the rotation map, Weyl
//! coefficient fits, largest-cluster tracking and monotonicity scans.

mod closed;

pub use closed::{
    star_dirichlet_energy, star_neumann_energy, two_interval_dirichlet_energy, two_interval_neumann_brute,
    two_interval_neumann_energy,
};

use crate::graph::MetricGraph;
use crate::optimize::{minimize, OptimizeError, OptimizeRequest, OptimizeResult, PartitionClass};
use crate::partition::{Exponent, Problem};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("a Weyl fit needs at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },
    #[error("k must increase strictly along the fitted points")]
    Unordered,
    #[error("least-squares system is degenerate")]
    Degenerate,
}

/// Limit set of `c_k` for the equilateral `m`-star of total length `l`.
///
/// Dirichlet: `{−2π²/L²} ∪ {2π²(s−1−m/2)/L² : s = 1..m−1}`, `m − 1` points
/// for even `m` and `m` for odd `m`. Natural: the limits `π²(m−2r)/L²` for
/// `r ≤ ⌊m/2⌋` and `π²(2m−2r)/L²` otherwise, which give `m/2` points for
/// even `m` and `m` for odd `m`. Sorted, without repetitions.
pub fn star_limit_sets(m: usize, l: f64, problem: Problem) -> Vec<f64> {
    assert!(m >= 3, "star limit sets need m >= 3");
    let unit = PI * PI / (l * l);
    // half-units, so duplicates compare exactly
    let mut halves: Vec<i64> = match problem {
        Problem::Dirichlet => std::iter::once(-4)
            .chain((1..m as i64).map(|s| 4 * (s - 1) - 2 * m as i64))
            .collect(),
        Problem::Natural => (1..=m as i64)
            .map(|r| {
                if r <= m as i64 / 2 {
                    2 * (m as i64 - 2 * r)
                } else {
                    2 * (2 * m as i64 - 2 * r)
                }
            })
            .collect(),
    };
    halves.sort_unstable();
    halves.dedup();
    halves.into_iter().map(|h| h as f64 * 0.5 * unit).collect()
}

/// Fractional part of `k·alpha`, with the product split exactly into a
/// rounded part and its FMA remainder so the error stays at a few ulps.
pub fn rotation_orbit(alpha: f64, k: u64) -> f64 {
    let kf = k as f64;
    let hi = kf * alpha;
    let lo = kf.mul_add(alpha, -hi);
    let x = (hi - hi.floor()) + lo;
    let x = x - x.floor();
    if x >= 1.0 {
        0.0
    } else {
        x
    }
}

/// One term of the remainder sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CkPoint {
    pub k: usize,
    pub energy: f64,
    pub c_k: f64,
}

/// `c_k = (energy(k) − π²k²/L²)/k` over `ks`, evaluated in parallel and
/// returned in order.
pub fn ck_sequence<F>(energy: F, l: f64, ks: RangeInclusive<usize>) -> Vec<CkPoint>
where
    F: Fn(usize) -> f64 + Sync,
{
    let unit = PI * PI / (l * l);
    let ks: Vec<usize> = ks.collect();
    ks.par_iter()
        .map(|&k| {
            let e = energy(k);
            let kf = k as f64;
            CkPoint {
                k,
                energy: e,
                c_k: (e - unit * kf * kf) / kf,
            }
        })
        .collect()
}

/// Table `k,energy,c_k`.
pub fn ck_csv(seq: &[CkPoint]) -> String {
    let mut s = String::from("k,energy,c_k\n");
    for p in seq {
        let _ = writeln!(s, "{},{:.16e},{:.16e}", p.k, p.energy, p.c_k);
    }
    s
}

/// Clusters of the tail of a `c_k` sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitSetEstimate {
    /// `(limit estimate, member count)`, sorted by value.
    pub points: Vec<(f64, usize)>,
    /// `(min, max)` of each cluster's members.
    pub spans: Vec<(f64, f64)>,
    /// Sorted tail values.
    pub tail: Vec<f64>,
    pub predicted: Option<Vec<f64>>,
    pub matched: Option<bool>,
}

impl LimitSetEstimate {
    /// Compares the cluster values with `predicted`: equal counts and each
    /// value within `tol` of the matching prediction.
    pub fn compare(&mut self, predicted: &[f64], tol: f64) -> bool {
        let mut want = predicted.to_vec();
        want.sort_by(f64::total_cmp);
        let ok =
            want.len() == self.points.len() && self.points.iter().zip(&want).all(|(&(v, _), &w)| (v - w).abs() <= tol);
        self.predicted = Some(want);
        self.matched = Some(ok);
        ok
    }

    /// Largest gap between consecutive tail values inside `[lo, hi]`,
    /// counting the distance from each end to the nearest value.
    pub fn max_gap(&self, lo: f64, hi: f64) -> f64 {
        let inside: Vec<f64> = self.tail.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
        if inside.is_empty() {
            return hi - lo;
        }
        let mut gap = (inside[0] - lo).max(hi - inside[inside.len() - 1]);
        for w in inside.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap
    }

    /// Table `value,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("value,count\n");
        for &(v, n) in &self.points {
            let _ = writeln!(s, "{v:.16e},{n}");
        }
        s
    }
}

/// Limit of one cluster: `c∞` from a least-squares fit `c_k ≈ c∞ + C/k`
/// over its members when that fit is tight, else the mean. Every residue
/// class of a closed-form sequence follows the fit exactly.
fn cluster_value(members: &[(usize, f64)]) -> f64 {
    let n = members.len() as f64;
    let mean = members.iter().map(|m| m.1).sum::<f64>() / n;
    if members.len() < 3 {
        return mean;
    }
    let xs: Vec<f64> = members.iter().map(|m| 1.0 / m.0 as f64).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx <= 0.0 {
        return mean;
    }
    let sxy: f64 = xs.iter().zip(members).map(|(x, m)| (x - xm) * (m.1 - mean)).sum();
    let slope = sxy / sxx;
    let limit = mean - slope * xm;
    let spread = members.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max)
        - members.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let rms = (xs
        .iter()
        .zip(members)
        .map(|(x, m)| (limit + slope * x - m.1).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    if rms <= 1e-3 * spread.max(f64::MIN_POSITIVE) {
        limit
    } else {
        mean
    }
}

/// Clusters the last `tail_fraction` of `seq` by merging sorted values
/// closer than `eps` (single linkage).
pub fn limit_points(seq: &[CkPoint], eps: f64, tail_fraction: f64) -> LimitSetEstimate {
    let skip = ((1.0 - tail_fraction.clamp(0.0, 1.0)) * seq.len() as f64).floor() as usize;
    let mut members: Vec<(usize, f64)> = seq[skip..].iter().map(|p| (p.k, p.c_k)).collect();
    members.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut points = Vec::new();
    let mut spans = Vec::new();
    let mut start = 0;
    for i in 1..=members.len() {
        if i == members.len() || members[i].1 - members[i - 1].1 > eps {
            let group = &members[start..i];
            points.push((cluster_value(group), group.len()));
            spans.push((group[0].1, group[group.len() - 1].1));
            start = i;
        }
    }
    LimitSetEstimate {
        points,
        spans,
        tail: members.into_iter().map(|m| m.1).collect(),
        predicted: None,
        matched: None,
    }
}

/// `energy ≈ A k² + B k` fitted on the upper half of the points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylFit {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual over the fitted points.
    pub rms: f64,
}

impl WeylFit {
    /// Summary `A,B,rms`.
    pub fn to_csv(&self) -> String {
        format!("A,B,rms\n{:.16e},{:.16e},{:.16e}\n", self.a, self.b, self.rms)
    }
}

/// Least-squares fit of `A k² + B k` on the upper half of `points`.
pub fn weyl_fit(points: &[(usize, f64)]) -> Result<WeylFit, AsymptoticsError> {
    const MIN: usize = 10;
    if points.len() < MIN {
        return Err(AsymptoticsError::TooFewPoints {
            got: points.len(),
            min: MIN,
        });
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(AsymptoticsError::Unordered);
    }
    let top = &points[points.len() / 2..];
    // columns scaled by the largest k to keep the system well conditioned
    let scale = top[top.len() - 1].0 as f64;
    let x = DMatrix::from_fn(top.len(), 2, |i, j| {
        let t = top[i].0 as f64 / scale;
        if j == 0 {
            t * t
        } else {
            t
        }
    });
    let y = DVector::from_iterator(top.len(), top.iter().map(|p| p.1));
    let svd = x.clone().svd(true, true);
    let sv = &svd.singular_values;
    if sv[1] <= 1e-12 * sv[0] {
        return Err(AsymptoticsError::Degenerate);
    }
    let c = svd.solve(&y, 0.0).map_err(|_| AsymptoticsError::Degenerate)?;
    let r = &x * &c - &y;
    Ok(WeylFit {
        a: c[0] / (scale * scale),
        b: c[1] / scale,
        rms: (r.norm_squared() / top.len() as f64).sqrt(),
    })
}

/// Largest cluster length along a sequence of optimal partitions.
#[derive(Clone, Debug, PartialEq)]
pub struct LmaxTrack {
    /// `(k, L_max, k·L_max)`.
    pub rows: Vec<(usize, f64, f64)>,
    /// `k·L_max` increases monotonically by more than 20% over the last
    /// half of the rows.
    pub unbounded: bool,
}

impl LmaxTrack {
    /// Table `k,l_max,k_l_max`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,l_max,k_l_max\n");
        for &(k, l, kl) in &self.rows {
            let _ = writeln!(s, "{k},{l:.16e},{kl:.16e}");
        }
        s
    }
}

pub fn lmax_tracking(results: &[OptimizeResult]) -> LmaxTrack {
    let rows: Vec<(usize, f64, f64)> = results
        .iter()
        .map(|r| {
            let k = r.partition.k();
            let l = r.partition.largest_cluster_length();
            (k, l, k as f64 * l)
        })
        .collect();
    let half = &rows[rows.len() / 2..];
    let unbounded =
        half.len() >= 2 && half.windows(2).all(|w| w[1].2 >= w[0].2) && half[half.len() - 1].2 > 1.2 * half[0].2;
    LmaxTrack { rows, unbounded }
}

/// Every `k` with `L_{k+1} < L_k − 1e−9` in a list of `(k, L_k)` with
/// consecutive `k`; entries are `(k, L_k, L_{k+1})`.
pub fn monotonicity_violations(energies: &[(usize, f64)]) -> Vec<(usize, f64, f64)> {
    energies
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1 && w[1].1 < w[0].1 - 1e-9)
        .map(|w| (w[0].0, w[0].1, w[1].1))
        .collect()
}

/// Minimises over `ks` (plus `k + 1` for the last `k`) and reports the
/// monotonicity violations.
pub fn monotonicity_scan(
    g: &MetricGraph,
    p: Exponent,
    problem: Problem,
    class: PartitionClass,
    ks: RangeInclusive<usize>,
) -> Result<Vec<(usize, f64, f64)>, OptimizeError> {
    let (a, b) = (*ks.start(), *ks.end() + 1);
    let energies = (a..=b)
        .map(|k| minimize(&OptimizeRequest::new(g.clone(), k, p, problem, class)).map(|r| (k, r.energy)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(monotonicity_violations(&energies))
}
