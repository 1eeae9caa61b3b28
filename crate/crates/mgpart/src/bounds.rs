//! Two-sided bounds on the optimal partition energies.
//!
//! Every bound holds for all `p ∈ [1, ∞]` and is independent of `p`. The
//! Dirichlet bounds apply to rigid and connected partitions alike; the
//! natural bounds sandwich both the connected and the rigid minimum.
//! Entries whose validity threshold is not explicit are marked
//! [`Validity::Eventual`] and never produce a failing verdict.

use crate::graph::{stats, GraphStats, MetricGraph};
use crate::optimize::PartitionClass;
use crate::partition::{Exponent, Problem};
use crate::scalar::Scalar;
use num_integer::Integer;
use num_rational::Rational64;
use std::fmt;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("bounds need a connected graph, got {0} components")]
    Disconnected(usize),
    #[error("k = {k} is below the smallest admissible value {min}")]
    SmallK { k: usize, min: usize },
}

/// Boundary behaviour of a single cluster in [`isoperimetric_lower`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoKind {
    /// At least one Dirichlet vertex.
    OneDirichlet,
    /// Natural conditions, lowest nonzero eigenvalue.
    Natural,
    /// Doubly connected with at least one Dirichlet vertex.
    DoublyConnectedDirichlet,
    /// Doubly connected, natural conditions.
    DoublyConnectedNatural,
}

/// Lowest possible ground state of a connected graph of total length `l`.
pub fn isoperimetric_lower<T: Scalar>(l: T, kind: IsoKind) -> T {
    let base = T::pi2() / (l * l);
    match kind {
        IsoKind::OneDirichlet => base / T::of(4.0),
        IsoKind::Natural | IsoKind::DoublyConnectedDirichlet => base,
        IsoKind::DoublyConnectedNatural => base * T::of(4.0),
    }
}

/// `π²k²/(4L²)`.
pub fn dirichlet_general_lower<T: Scalar>(l: T, k: usize) -> T {
    let k = T::of_count(k as u64);
    T::pi2() * k * k / (T::of(4.0) * l * l)
}

/// `(π²/(4kL²))(k³ + 3(k − s)³)`, the estimate with `s` clusters allowed
/// to touch a leaf or a pendant; requires `k ≥ s`.
pub fn dirichlet_refined_lower<T: Scalar>(l: T, k: usize, s: usize) -> T {
    assert!(k >= s, "refined estimate needs k >= s");
    let kk = T::of_count(k as u64);
    let d = T::of_count((k - s) as u64);
    T::pi2() / (T::of(4.0) * kk * l * l) * (kk * kk * kk + T::of(3.0) * d * d * d)
}

/// `π²(k + shift)²/L²`, the shape of every upper bound and of the natural
/// lower bound (`shift = 0`). The shift is negative only for the interval.
pub fn shifted_square<T: Scalar>(l: T, k: usize, shift: i64) -> T {
    let n = T::of(k as f64 + shift as f64);
    T::pi2() * n * n / (l * l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        })
    }
}

/// Whether a bound is known to hold at the requested `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    OutOfRange,
    /// Holds from some unknown `k₀` on.
    Eventual,
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Validity::Valid => "true",
            Validity::OutOfRange => "false",
            Validity::Eventual => "eventual",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEntry {
    pub name: String,
    pub kind: BoundKind,
    pub value: f64,
    pub valid: Validity,
    /// Human-readable validity condition, e.g. `k >= 5`.
    pub valid_for: String,
    /// Short identifier of the inequality, reported on failure.
    pub tag: &'static str,
    pub verdict: Option<Verdict>,
}

impl BoundEntry {
    fn new(name: &str, kind: BoundKind, value: f64, valid: Validity, valid_for: String, tag: &'static str) -> Self {
        BoundEntry {
            name: name.to_string(),
            kind,
            value,
            valid,
            valid_for,
            tag,
            verdict: None,
        }
    }

    fn ranged(name: &str, kind: BoundKind, value: f64, k: usize, min: usize, tag: &'static str) -> Self {
        let valid = if k >= min {
            Validity::Valid
        } else {
            Validity::OutOfRange
        };
        Self::new(name, kind, value, valid, format!("k >= {min}"), tag)
    }
}

/// Named bound values for one `(g, k)`, with verdicts once audited.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub graph: String,
    pub k: usize,
    pub problem: Problem,
    pub p: Option<Exponent>,
    pub class: Option<PartitionClass>,
    pub computed: Option<f64>,
    pub entries: Vec<BoundEntry>,
}

/// Relative slack used by the audit.
pub const AUDIT_SLACK: f64 = 1e-9;

fn slack(value: f64) -> f64 {
    AUDIT_SLACK * value.abs().max(1.0)
}

impl BoundReport {
    pub fn valid_entries(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(|e| e.valid == Validity::Valid)
    }

    /// Largest valid lower bound, if any.
    pub fn best_lower(&self) -> Option<f64> {
        self.valid_entries()
            .filter(|e| e.kind == BoundKind::Lower)
            .map(|e| e.value)
            .reduce(f64::max)
    }

    /// Smallest valid upper bound, if any.
    pub fn best_upper(&self) -> Option<f64> {
        self.valid_entries()
            .filter(|e| e.kind == BoundKind::Upper)
            .map(|e| e.value)
            .reduce(f64::min)
    }

    /// No valid lower entry exceeds a valid upper entry.
    pub fn is_consistent(&self) -> bool {
        match (self.best_lower(), self.best_upper()) {
            (Some(lo), Some(hi)) => lo <= hi + slack(hi),
            _ => true,
        }
    }

    /// Tags of the failed entries.
    pub fn failures(&self) -> Vec<&'static str> {
        self.entries
            .iter()
            .filter(|e| e.verdict == Some(Verdict::Fail))
            .map(|e| e.tag)
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    /// Names of the valid entries met with equality within relative `rel`.
    pub fn equalities(&self, rel: f64) -> Vec<&str> {
        let Some(x) = self.computed else { return Vec::new() };
        self.valid_entries()
            .filter(|e| (x - e.value).abs() <= rel * e.value.abs().max(1.0))
            .map(|e| e.name.as_str())
            .collect()
    }

    /// Table `name,kind,value,valid,verdict`; the verdict is empty before
    /// an audit.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,kind,value,valid,verdict\n");
        self.write_rows(&mut s, None);
        s
    }

    /// Rows prefixed by `k`, for multi-`k` tables with header
    /// `k,name,kind,value,valid,verdict`.
    pub fn write_rows(&self, out: &mut String, prefix: Option<usize>) {
        for e in &self.entries {
            if let Some(k) = prefix {
                let _ = write!(out, "{k},");
            }
            let verdict = e.verdict.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{:.16e},{},{}", e.name, e.kind, e.value, e.valid, verdict);
        }
    }
}

fn connected_stats(g: &MetricGraph) -> Result<GraphStats, BoundsError> {
    let s = stats(g);
    if s.num_components != 1 {
        return Err(BoundsError::Disconnected(s.num_components));
    }
    Ok(s)
}

fn ceil_usize(x: f64) -> usize {
    // absorb rounding in quotients such as L/ell_min
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Dirichlet lower bounds: the general one, the leaf-and-pendant refinement,
/// its Betti-number variant, the doubly connected one, and the eventual
/// leaf-only refinement.
pub fn dirichlet_lower_bounds(g: &MetricGraph, k: usize) -> Result<Vec<BoundEntry>, BoundsError> {
    let s = connected_stats(g)?;
    if k < 2 {
        return Err(BoundsError::SmallK { k, min: 2 });
    }
    let l = s.total_length;
    let n = s.degree_one_count;
    let mut out = vec![BoundEntry::new(
        "dirichlet_general",
        BoundKind::Lower,
        dirichlet_general_lower(l, k),
        Validity::Valid,
        "k >= 2".into(),
        "dirichlet-general",
    )];
    let pendant = n + s.pendant2_count;
    out.push(BoundEntry::ranged(
        "dirichlet_pendants",
        BoundKind::Lower,
        dirichlet_refined_lower(l, k, pendant.min(k)),
        k,
        pendant,
        "dirichlet-pendants",
    ));
    let betti = n + s.betti;
    out.push(BoundEntry::ranged(
        "dirichlet_betti",
        BoundKind::Lower,
        dirichlet_refined_lower(l, k, betti.min(k)),
        k,
        betti,
        "dirichlet-betti",
    ));
    if s.doubly_connected {
        out.push(BoundEntry::new(
            "dirichlet_doubly_connected",
            BoundKind::Lower,
            shifted_square(l, k, 0),
            Validity::Valid,
            "k >= 2, doubly connected".into(),
            "dirichlet-doubly-connected",
        ));
    }
    let mut eventual = BoundEntry::new(
        "dirichlet_leaves_eventual",
        BoundKind::Lower,
        dirichlet_refined_lower(l, k, n.min(k)),
        Validity::Eventual,
        format!("k >= k0 (unknown), k >= {n}"),
        "dirichlet-leaves-eventual",
    );
    if k < n {
        eventual.valid = Validity::OutOfRange;
    }
    out.push(eventual);
    Ok(out)
}

/// Smallest `k` from which [`dirichlet_upper_bound`] holds:
/// `⌈L/ℓ_min⌉ + |E| − 1`, and at least 2.
pub fn dirichlet_upper_threshold(s: &GraphStats) -> usize {
    (ceil_usize(s.total_length / s.ell_min) + s.edge_count - 1).max(2)
}

/// `π²(k + |E| − 1 − ⌊|N|/2⌋)²/L²`.
pub fn dirichlet_upper_bound(g: &MetricGraph, k: usize) -> Result<BoundEntry, BoundsError> {
    let s = connected_stats(g)?;
    let shift = s.edge_count as i64 - 1 - (s.degree_one_count / 2) as i64;
    let value = shifted_square(s.total_length, k, shift);
    Ok(BoundEntry::ranged(
        "dirichlet_upper",
        BoundKind::Upper,
        value,
        k,
        dirichlet_upper_threshold(&s),
        "dirichlet-upper",
    ))
}

/// Natural lower bound `π²k²/L²`, the upper bound with `n` the number of
/// trails in a minimal trail cover, and the fallback with `n = |E|`.
pub fn neumann_bounds(g: &MetricGraph, k: usize) -> Result<Vec<BoundEntry>, BoundsError> {
    let s = connected_stats(g)?;
    if k < 1 {
        return Err(BoundsError::SmallK { k, min: 1 });
    }
    let l = s.total_length;
    let n = s.eulerian_cover_number;
    let e = s.edge_count;
    let girth_term = if s.girth.is_finite() {
        ceil_usize(1.5 * l / s.girth)
    } else {
        0
    };
    Ok(vec![
        BoundEntry::new(
            "natural_lower",
            BoundKind::Lower,
            shifted_square(l, k, 0),
            Validity::Valid,
            "k >= 1".into(),
            "natural-lower",
        ),
        BoundEntry::ranged(
            "natural_upper_trails",
            BoundKind::Upper,
            shifted_square(l, k, n as i64 - 1),
            k,
            (4 * e + n - 1).max(girth_term),
            "natural-upper-trails",
        ),
        BoundEntry::ranged(
            "natural_upper_edges",
            BoundKind::Upper,
            shifted_square(l, k, e as i64 - 1),
            k,
            5 * e - 1,
            "natural-upper-edges",
        ),
    ])
}

/// All bounds relevant to `problem` at `k`, without verdicts.
pub fn bound_report(g: &MetricGraph, k: usize, problem: Problem) -> Result<BoundReport, BoundsError> {
    let entries = match problem {
        Problem::Dirichlet => {
            let mut v = dirichlet_lower_bounds(g, k)?;
            v.push(dirichlet_upper_bound(g, k)?);
            v
        }
        Problem::Natural => neumann_bounds(g, k)?,
    };
    Ok(BoundReport {
        graph: g.name().to_string(),
        k,
        problem,
        p: None,
        class: None,
        computed: None,
        entries,
    })
}

/// Checks `computed` against every valid bound with slack
/// `1e−9·max(1, value)`. Out-of-range and eventual entries are
/// `not_applicable`.
pub fn audit(
    g: &MetricGraph,
    k: usize,
    p: Exponent,
    problem: Problem,
    class: PartitionClass,
    computed: f64,
) -> Result<BoundReport, BoundsError> {
    let mut report = bound_report(g, k, problem)?;
    report.p = Some(p);
    report.class = Some(class);
    report.computed = Some(computed);
    for e in &mut report.entries {
        let verdict = if e.valid != Validity::Valid {
            Verdict::NotApplicable
        } else {
            let ok = match e.kind {
                BoundKind::Lower => computed >= e.value - slack(e.value),
                BoundKind::Upper => computed <= e.value + slack(e.value),
            };
            if ok {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        };
        e.verdict = Some(verdict);
    }
    Ok(report)
}

/// Smallest `m` such that `L^N_{jm,p} = π²(jm)²/L²` for all `j ≥ 1`:
/// `m = L/r` with `r` the largest common measure of the edge lengths.
/// `None` if some length is not given as an exact rational.
pub fn rational_equality_sequence(g: &MetricGraph) -> Result<Option<u64>, BoundsError> {
    connected_stats(g)?;
    let mut lengths = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        match e.length.as_rational() {
            Some(r) => lengths.push(r),
            None => return Ok(None),
        }
    }
    // gcd of reduced fractions: gcd of numerators over lcm of denominators
    let num = lengths.iter().fold(0i64, |a, r| a.gcd(r.numer()));
    let den = lengths.iter().fold(1i64, |a, r| a.lcm(r.denom()));
    let measure = Rational64::new(num, den);
    let m: Rational64 = lengths.iter().map(|&r| r / measure).sum();
    debug_assert!(m.is_integer());
    Ok(Some(m.to_integer() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Family, Length};
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    fn entry<'a>(v: &'a [BoundEntry], name: &str) -> &'a BoundEntry {
        v.iter().find(|e| e.name == name).unwrap()
    }

    #[test]
    fn isoperimetric_constants() {
        assert!(close(isoperimetric_lower(1.0, IsoKind::OneDirichlet), PI2 / 4.0));
        assert!(close(isoperimetric_lower(1.0, IsoKind::Natural), PI2));
        assert!(close(isoperimetric_lower(1.0, IsoKind::DoublyConnectedDirichlet), PI2));
        assert!(close(
            isoperimetric_lower(1.0, IsoKind::DoublyConnectedNatural),
            4.0 * PI2
        ));
        assert!((isoperimetric_lower(2.0_f32, IsoKind::Natural) - (PI2 / 4.0) as f32).abs() < 1e-6);
    }

    #[test]
    fn dirichlet_lower_examples() {
        let star = Family::Star { m: 4, total: 4.into() }.build().unwrap();
        let v = dirichlet_lower_bounds(&star, 4).unwrap();
        assert!(close(entry(&v, "dirichlet_general").value, PI2 / 4.0));
        let lp = Family::Loop(1.into()).build().unwrap();
        let v = dirichlet_lower_bounds(&lp, 3).unwrap();
        assert!(close(entry(&v, "dirichlet_doubly_connected").value, 9.0 * PI2));
        let w = Family::Windmill {
            loops: 2,
            leaves: 4,
            arm: 1.into(),
            ring: Length::exact(1, 10),
        }
        .build()
        .unwrap();
        let v = dirichlet_lower_bounds(&w, 6).unwrap();
        let b = entry(&v, "dirichlet_pendants");
        assert_eq!(b.valid, Validity::Valid);
        assert!(close(b.value, entry(&v, "dirichlet_general").value));
        assert_eq!(entry(&v, "dirichlet_leaves_eventual").valid, Validity::Eventual);
    }

    #[test]
    fn dirichlet_upper_examples() {
        let i = Family::Interval(1.into()).build().unwrap();
        let e = dirichlet_upper_bound(&i, 5).unwrap();
        assert!(close(e.value, 16.0 * PI2));
        assert_eq!(e.valid, Validity::Valid);
        let star = Family::Star { m: 3, total: 3.into() }.build().unwrap();
        let e = dirichlet_upper_bound(&star, 10).unwrap();
        assert!(close(e.value, 121.0 * PI2 / 9.0));
        let lp = Family::Loop(1.into()).build().unwrap();
        let e = dirichlet_upper_bound(&lp, 3).unwrap();
        assert!(close(e.value, 9.0 * PI2));
        assert_eq!(e.valid_for, "k >= 2");
    }

    #[test]
    fn neumann_examples() {
        let lp = Family::Loop(1.into()).build().unwrap();
        let v = neumann_bounds(&lp, 7).unwrap();
        assert!(close(entry(&v, "natural_lower").value, 49.0 * PI2));
        assert!(close(entry(&v, "natural_upper_trails").value, 49.0 * PI2));
        let star = Family::Star { m: 4, total: 4.into() }.build().unwrap();
        let v = neumann_bounds(&star, 17).unwrap();
        assert!(close(entry(&v, "natural_lower").value, 289.0 * PI2 / 16.0));
        let up = entry(&v, "natural_upper_trails");
        assert!(close(up.value, 324.0 * PI2 / 16.0));
        assert_eq!(up.valid, Validity::Valid);
        assert_eq!(neumann_bounds(&star, 16).unwrap()[1].valid, Validity::OutOfRange);
    }

    #[test]
    fn rational_sequences() {
        let star = Family::Star { m: 3, total: 3.into() }.build().unwrap();
        assert_eq!(rational_equality_sequence(&star).unwrap(), Some(3));
        let path = MetricGraph::builder("path")
            .vertex("a")
            .vertex("b")
            .vertex("c")
            .edge("e1", "a", "b", 1)
            .edge("e2", "b", "c", Length::exact(3, 2))
            .build()
            .unwrap();
        assert_eq!(rational_equality_sequence(&path).unwrap(), Some(5));
        let irr = MetricGraph::builder("irr")
            .vertex("a")
            .vertex("b")
            .vertex("c")
            .edge("e1", "a", "b", 1)
            .edge("e2", "b", "c", Length::approx(2f64.sqrt()))
            .build()
            .unwrap();
        assert_eq!(rational_equality_sequence(&irr).unwrap(), None);
    }

    #[test]
    fn audits() {
        let star = Family::Star { m: 3, total: 3.into() }.build().unwrap();
        let r = audit(
            &star,
            8,
            Exponent::Infinity,
            Problem::Dirichlet,
            PartitionClass::Rigid,
            6.25 * PI2,
        )
        .unwrap();
        assert!(r.passed());
        assert!(r.is_consistent());
        let lp = Family::Loop(1.into()).build().unwrap();
        let r = audit(
            &lp,
            3,
            Exponent::Infinity,
            Problem::Natural,
            PartitionClass::Rigid,
            9.0 * PI2,
        )
        .unwrap();
        assert!(r.passed());
        assert!(r.equalities(1e-12).contains(&"natural_lower"));
        let low = 0.5 * dirichlet_general_lower(1.0, 3);
        let r = audit(
            &lp,
            3,
            Exponent::Infinity,
            Problem::Dirichlet,
            PartitionClass::Rigid,
            low,
        )
        .unwrap();
        assert!(r.failures().contains(&"dirichlet-general"));
        assert!(r.to_csv().starts_with("name,kind,value,valid,verdict\n"));
    }

    #[test]
    fn rejects_disconnected() {
        let g = Family::TwoIntervals(2.into()).build().unwrap();
        assert_eq!(neumann_bounds(&g, 3), Err(BoundsError::Disconnected(2)));
    }
}
