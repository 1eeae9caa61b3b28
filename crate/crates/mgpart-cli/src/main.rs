//! `mgpart`: spectral minimal partitions of metric graphs from the shell.
//!
//! Exit codes: 0 on success, 1 on invalid input or a failed computation,
//! 2 when a computed energy violates a bound that is valid at its `k`.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mgpart::asymptotics::{
    ck_csv, ck_sequence, limit_points, star_dirichlet_energy, star_limit_sets, star_neumann_energy,
    two_interval_dirichlet_energy, two_interval_neumann_energy, weyl_fit,
};
use mgpart::bounds::{audit, bound_report, BoundReport};
use mgpart::graph::{parse_graph, stats, Family, Length};
use mgpart::optimize::{minimize, OptimizeRequest, PartitionClass};
use mgpart::partition::{Exponent, Problem};
use mgpart::spectral::{eigenvalues, BoundaryConditions};
use mgpart::MetricGraph;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

const PI2: f64 = PI * PI;

#[derive(Parser)]
#[command(
    name = "mgpart",
    version,
    about = "Spectral minimal partitions of compact metric graphs"
)]
struct Cli {
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true, env = "MGPART_THREADS")]
    threads: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Combinatorial and metric statistics.
    Stats(Source),
    /// Lowest eigenvalues as CSV `index,eigenvalue,residual`.
    Eig {
        #[command(flatten)]
        source: Source,
        /// Number of eigenvalues.
        #[arg(long, short = 'n', default_value_t = 5)]
        count: usize,
        /// Dirichlet vertex ids, replacing the marks in the graph.
        #[arg(long, value_delimiter = ',')]
        dirichlet: Option<Vec<String>>,
        /// Ignore Dirichlet marks and use natural conditions everywhere.
        #[arg(long, conflicts_with = "dirichlet")]
        natural: bool,
    },
    /// Minimal k-partition followed by a bound audit.
    Optimize {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'k')]
        k: usize,
        #[command(flatten)]
        energy: EnergyArgs,
        #[arg(long, value_parser = parse_class, default_value = "rigid")]
        class: PartitionClass,
        /// Seed of the random restarts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random restarts per topology.
        #[arg(long)]
        multistart: Option<usize>,
        /// Relative improvement below which refinement stops.
        #[arg(long)]
        refine_tol: Option<f64>,
        /// Only refine the constructive seeds.
        #[arg(long)]
        seeds_only: bool,
    },
    /// Bound envelope over a k-range as CSV `k,name,kind,value,valid,verdict`.
    Bounds {
        #[command(flatten)]
        source: Source,
        /// `k` or an inclusive range `a..b`.
        #[arg(short = 'k', value_parser = parse_range)]
        k: RangeInclusive<usize>,
        #[command(flatten)]
        energy: EnergyArgs,
        /// Minimise at every k and audit the result.
        #[arg(long)]
        audit: bool,
        #[arg(long, value_parser = parse_class, default_value = "rigid")]
        class: PartitionClass,
    },
    /// Closed-form energies, `c_k` and its clustered limit set.
    Asymptotics {
        family: ClosedFamily,
        #[command(flatten)]
        params: ClosedParams,
        #[arg(long, value_parser = parse_problem, default_value = "natural")]
        problem: Problem,
        #[arg(long, default_value_t = 300)]
        kmax: usize,
        /// Merging distance relative to the spread of the tail.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Fraction of the sequence treated as its tail.
        #[arg(long, default_value_t = 0.5)]
        tail: f64,
    },
    /// Fit `A k² + B k` to the optimal energies up to `kmax`.
    Weyl {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 100)]
        kmax: usize,
        #[arg(long, value_parser = parse_problem, default_value = "natural")]
        problem: Problem,
        #[arg(long, value_parser = parse_class, default_value = "rigid")]
        class: PartitionClass,
    },
}

/// A graph file or a standard family, exactly one of them.
#[derive(Args)]
struct Source {
    /// Graph in the `.mg` text format.
    #[arg(conflicts_with = "family", required_unless_present = "family")]
    file: Option<PathBuf>,
    /// Standard family built from the parameters below.
    #[arg(long)]
    family: Option<FamilyName>,
    #[command(flatten)]
    params: FamilyParams,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Interval,
    Loop,
    Star,
    Lasso,
    Dumbbell,
    Windmill,
    TwoIntervals,
    PumpkinChain,
    Necklace,
    Flower,
}

#[derive(Args)]
struct FamilyParams {
    /// Edge length of an interval or loop.
    #[arg(long, default_value = "1")]
    len: Length,
    /// Number of star arms.
    #[arg(short = 'm', default_value_t = 3)]
    m: usize,
    /// Total length of a star.
    #[arg(short = 'L', long = "total")]
    total: Option<Length>,
    #[arg(long, default_value = "1")]
    stick: Length,
    #[arg(long, default_value = "1")]
    ring: Length,
    #[arg(long, default_value = "1")]
    left: Length,
    #[arg(long, default_value = "1")]
    handle: Length,
    #[arg(long, default_value = "1")]
    right: Length,
    /// Length of the second interval.
    #[arg(short = 'a', default_value = "2")]
    a: Length,
    #[arg(long, default_value_t = 2)]
    loops: usize,
    #[arg(long, default_value_t = 4)]
    leaves: usize,
    #[arg(long, default_value = "1")]
    arm: Length,
    /// Bundles `multiplicity:length`, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_bundle)]
    bundles: Vec<(usize, Length)>,
    /// Loop lengths of a flower, comma separated.
    #[arg(long, value_delimiter = ',')]
    petals: Vec<Length>,
}

#[derive(Args)]
struct EnergyArgs {
    /// Exponent of the energy, a number ≥ 1 or `inf`.
    #[arg(short = 'p', default_value = "inf")]
    p: Exponent,
    #[arg(long, value_parser = parse_problem, default_value = "natural")]
    problem: Problem,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosedFamily {
    Star,
    TwoIntervals,
}

#[derive(Args)]
struct ClosedParams {
    #[arg(short = 'm', default_value_t = 3)]
    m: usize,
    /// Total length of the star.
    #[arg(short = 'L', default_value = "1")]
    total: f64,
    /// Length of the second interval.
    #[arg(short = 'a', default_value = "2")]
    a: Length,
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse()
}

fn parse_class(s: &str) -> Result<PartitionClass, String> {
    s.parse()
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected k or a..b, got {s:?}");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let k = s.trim().parse().map_err(|_| bad())?;
            (k, k)
        }
    };
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok(a..=b)
}

fn parse_bundle(s: &str) -> Result<(usize, Length), String> {
    let (n, l) = s
        .split_once(':')
        .ok_or_else(|| format!("expected multiplicity:length, got {s:?}"))?;
    let n = n.trim().parse().map_err(|_| format!("bad multiplicity in {s:?}"))?;
    let l = l.parse().map_err(|e| format!("{e}"))?;
    Ok((n, l))
}

impl Source {
    fn load(&self) -> Result<MetricGraph> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return parse_graph(&text).with_context(|| format!("parsing {}", path.display()));
        }
        let name = self.family.ok_or_else(|| anyhow!("give a graph file or --family"))?;
        let p = &self.params;
        let family = match name {
            FamilyName::Interval => Family::Interval(p.len),
            FamilyName::Loop => Family::Loop(p.len),
            FamilyName::Star => Family::Star {
                m: p.m,
                total: p.total.unwrap_or(Length::exact(p.m as i64, 1)),
            },
            FamilyName::Lasso => Family::Lasso {
                stick: p.stick,
                ring: p.ring,
            },
            FamilyName::Dumbbell => Family::Dumbbell {
                left: p.left,
                handle: p.handle,
                right: p.right,
            },
            FamilyName::Windmill => Family::Windmill {
                loops: p.loops,
                leaves: p.leaves,
                arm: p.arm,
                ring: p.ring,
            },
            FamilyName::TwoIntervals => Family::TwoIntervals(p.a),
            FamilyName::PumpkinChain => Family::PumpkinChain(p.bundles.clone()),
            FamilyName::Necklace => Family::Necklace(p.bundles.clone()),
            FamilyName::Flower => Family::Flower(p.petals.clone()),
        };
        Ok(family.build()?)
    }
}

/// Outcome of a command: its text output and whether an audit failed.
struct Output {
    text: String,
    audit_failed: bool,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output {
            text,
            audit_failed: false,
        }
    }
}

fn cmd_stats(src: &Source) -> Result<Output> {
    let g = src.load()?;
    let s = stats(&g);
    let mut out = String::new();
    let girth = if s.girth.is_finite() {
        format!("{:.16e}", s.girth)
    } else {
        "inf".into()
    };
    let rows: [(&str, String); 14] = [
        ("name", g.name().to_string()),
        ("vertices", s.vertex_count.to_string()),
        ("edges", s.edge_count.to_string()),
        ("total_length", format!("{:.16e}", s.total_length)),
        ("ell_min", format!("{:.16e}", s.ell_min)),
        ("ell_max", format!("{:.16e}", s.ell_max)),
        ("betti", s.betti.to_string()),
        ("girth", girth),
        ("degree_one", s.degree_one_count.to_string()),
        ("components", s.num_components.to_string()),
        ("doubly_connected", s.doubly_connected.to_string()),
        ("pendants", s.pendant2_count.to_string()),
        ("eulerian_path", s.has_eulerian_path.to_string()),
        ("trail_cover", s.eulerian_cover_number.to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<17}{v}");
    }
    Ok(out.into())
}

fn cmd_eig(src: &Source, count: usize, dirichlet: &Option<Vec<String>>, natural: bool) -> Result<Output> {
    let g = src.load()?;
    let bc = match (dirichlet, natural) {
        (_, true) => BoundaryConditions::natural(),
        (Some(ids), _) => BoundaryConditions::dirichlet(
            ids.iter()
                .map(|id| g.vertex_index(id).ok_or_else(|| anyhow!("unknown vertex {id}")))
                .collect::<Result<Vec<_>>>()?,
        ),
        (None, false) => BoundaryConditions::from_graph(&g),
    };
    let res = eigenvalues(&g, &bc, count)?;
    let mut out = String::from("index,eigenvalue,residual\n");
    for (i, (ev, r)) in res.eigenvalues.iter().zip(&res.residuals).enumerate() {
        let _ = writeln!(out, "{},{ev:.16e},{r:.3e}", i + 1);
    }
    Ok(out.into())
}

/// Audit section; `None` for disconnected graphs, which the bounds exclude.
fn audit_section(
    g: &MetricGraph,
    k: usize,
    energy: &EnergyArgs,
    class: PartitionClass,
    value: f64,
) -> Result<Option<BoundReport>> {
    if !g.is_connected() {
        return Ok(None);
    }
    Ok(Some(audit(g, k, energy.p, energy.problem, class, value)?))
}

fn cmd_optimize(
    src: &Source,
    k: usize,
    energy: &EnergyArgs,
    class: PartitionClass,
    seed: u64,
    multistart: Option<usize>,
    refine_tol: Option<f64>,
    seeds_only: bool,
) -> Result<Output> {
    let g = src.load()?;
    let mut req = OptimizeRequest::new(g.clone(), k, energy.p, energy.problem, class);
    req.seed = seed;
    req.enumerate = !seeds_only;
    if let Some(n) = multistart {
        req.multistart = n;
    }
    if let Some(t) = refine_tol {
        req.refine_tol = t;
    }
    let res = minimize(&req)?;
    let mut out = String::new();
    let _ = writeln!(out, "graph {}", g.name());
    let _ = writeln!(out, "k {k} p {} problem {} class {class}", energy.p, energy.problem);
    let _ = writeln!(out, "energy {:.16e} = {:.12} π²", res.energy, res.energy / PI2);
    let _ = writeln!(out, "largest_cluster {:.16e}", res.report.largest_cluster_length);
    let _ = writeln!(
        out,
        "topologies {} evaluations {} truncated {}",
        res.topologies, res.evaluations, res.truncated
    );
    out.push_str("\n# cuts\n");
    out.push_str(&res.cut_config.to_text(&g));
    out.push_str("\n# clusters\n");
    out.push_str(&res.report.to_csv());
    out.push_str("\n# audit\n");
    let mut failed = false;
    match audit_section(&g, k, energy, class, res.energy)? {
        Some(report) => {
            out.push_str(&report.to_csv());
            failed = !report.passed();
            let _ = writeln!(
                out,
                "audit {}",
                if failed {
                    format!("FAIL {}", report.failures().join(" "))
                } else {
                    "pass".into()
                }
            );
        }
        None => out.push_str("audit skipped: the bounds need a connected graph\n"),
    }
    Ok(Output {
        text: out,
        audit_failed: failed,
    })
}

fn cmd_bounds(
    src: &Source,
    ks: &RangeInclusive<usize>,
    energy: &EnergyArgs,
    run_audit: bool,
    class: PartitionClass,
) -> Result<Output> {
    let g = src.load()?;
    let mut out = String::from("k,name,kind,value,valid,verdict\n");
    let mut failed = false;
    for k in ks.clone() {
        let report = if run_audit {
            let res = minimize(&OptimizeRequest::new(g.clone(), k, energy.p, energy.problem, class))?;
            audit(&g, k, energy.p, energy.problem, class, res.energy)?
        } else {
            bound_report(&g, k, energy.problem)?
        };
        failed |= !report.passed();
        report.write_rows(&mut out, Some(k));
    }
    Ok(Output {
        text: out,
        audit_failed: failed,
    })
}

fn cmd_asymptotics(
    family: ClosedFamily,
    params: &ClosedParams,
    problem: Problem,
    kmax: usize,
    eps: f64,
    tail: f64,
) -> Result<Output> {
    let (seq, predicted) = match family {
        ClosedFamily::Star => {
            let (m, l) = (params.m, params.total);
            if m < 3 || !(l > 0.0) {
                bail!("star needs m >= 3 and a positive total length");
            }
            if kmax < 2 {
                bail!("kmax must be at least 2");
            }
            let seq = match problem {
                Problem::Dirichlet => ck_sequence(|k| star_dirichlet_energy(m, l, k), l, 2..=kmax),
                Problem::Natural => ck_sequence(|k| star_neumann_energy(m, l, k), l, 2..=kmax),
            };
            (seq, Some(star_limit_sets(m, l, problem)))
        }
        ClosedFamily::TwoIntervals => {
            let a = params.a.value();
            if !(a > 0.0) {
                bail!("a must be positive");
            }
            let l = 1.0 + a;
            let seq = match problem {
                Problem::Dirichlet => {
                    if kmax < 4 {
                        bail!("the Dirichlet sequence starts at k = 4");
                    }
                    ck_sequence(|k| two_interval_dirichlet_energy(a, k).expect("k >= 4"), l, 4..=kmax)
                }
                Problem::Natural => {
                    if kmax < 2 {
                        bail!("kmax must be at least 2");
                    }
                    ck_sequence(|k| two_interval_neumann_energy(a, k), l, 2..=kmax)
                }
            };
            (seq, None)
        }
    };
    let lo = seq.iter().map(|p| p.c_k).fold(f64::INFINITY, f64::min);
    let hi = seq.iter().map(|p| p.c_k).fold(f64::NEG_INFINITY, f64::max);
    let mut est = limit_points(&seq, eps * (hi - lo).max(f64::MIN_POSITIVE), tail);
    let mut out = ck_csv(&seq);
    out.push('\n');
    out.push_str(&est.to_csv());
    if let Some(pred) = predicted {
        let l = match family {
            ClosedFamily::Star => params.total,
            ClosedFamily::TwoIntervals => 1.0 + params.a.value(),
        };
        let matched = est.compare(&pred, 1e-2 * PI2 / (l * l));
        out.push_str("\npredicted\n");
        for v in &pred {
            let _ = writeln!(out, "{v:.16e}");
        }
        let _ = writeln!(out, "\nmatch,{matched}\ncardinality,{}", pred.len());
    }
    Ok(out.into())
}

fn cmd_weyl(src: &Source, kmax: usize, problem: Problem, class: PartitionClass) -> Result<Output> {
    let g = src.load()?;
    let start = match problem {
        Problem::Dirichlet => 2,
        Problem::Natural => 1,
    }
    .max(g.component_count());
    let closed = |k: usize| -> Option<f64> {
        let p = &src.params;
        let l = g.total_length();
        match (src.family?, problem) {
            (FamilyName::Star, Problem::Dirichlet) if p.m >= 3 => Some(star_dirichlet_energy(p.m, l, k)),
            (FamilyName::Star, Problem::Natural) if p.m >= 3 && class == PartitionClass::Rigid => {
                Some(star_neumann_energy(p.m, l, k))
            }
            (FamilyName::TwoIntervals, Problem::Natural) if k >= 2 => Some(two_interval_neumann_energy(p.a.value(), k)),
            (FamilyName::TwoIntervals, Problem::Dirichlet) => two_interval_dirichlet_energy(p.a.value(), k),
            (FamilyName::Interval | FamilyName::Loop, Problem::Natural) => Some(PI2 * (k * k) as f64 / (l * l)),
            _ => None,
        }
    };
    let mut points = Vec::new();
    for k in start..=kmax {
        let e = match closed(k) {
            Some(e) => e,
            None => {
                let mut req = OptimizeRequest::new(g.clone(), k, Exponent::Infinity, problem, class);
                req.enumerate = false;
                minimize(&req)?.energy
            }
        };
        points.push((k, e));
    }
    let fit = weyl_fit(&points)?;
    let l = g.total_length();
    let mut out = fit.to_csv();
    let _ = writeln!(
        out,
        "\nreference {:.16e}\nrelative_error {:.3e}",
        PI2 / (l * l),
        fit.a / (PI2 / (l * l)) - 1.0
    );
    Ok(out.into())
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Stats(src) => cmd_stats(src),
        Command::Eig {
            source,
            count,
            dirichlet,
            natural,
        } => cmd_eig(source, *count, dirichlet, *natural),
        Command::Optimize {
            source,
            k,
            energy,
            class,
            seed,
            multistart,
            refine_tol,
            seeds_only,
        } => cmd_optimize(source, *k, energy, *class, *seed, *multistart, *refine_tol, *seeds_only),
        Command::Bounds {
            source,
            k,
            energy,
            audit,
            class,
        } => cmd_bounds(source, k, energy, *audit, *class),
        Command::Asymptotics {
            family,
            params,
            problem,
            kmax,
            eps,
            tail,
        } => cmd_asymptotics(*family, params, *problem, *kmax, *eps, *tail),
        Command::Weyl {
            source,
            kmax,
            problem,
            class,
        } => cmd_weyl(source, *kmax, *problem, *class),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &out.text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{}", out.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if out.audit_failed {
        eprintln!("error: a computed energy violates a valid bound");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
