//! The acceptance suite: ten numbered criteria, each a self-contained check
//! with its own tolerance and runtime budget.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use lorentz_metrics::domains::{
    cosmological_time, sample_graph_surface, stable_acausality_epsilon, AcausalityVerdict, DomainOracle, MappedDomain,
    SpecialDomain,
};
use lorentz_metrics::hyplab::{
    causal_quasigeodesic, scale_sample, verify_quasigeodesic, DistanceMatrix, HyperbolicityReport,
    QuadrupleSampler,
};
use lorentz_metrics::metrics::{
    hilbert_distance, markowitz_lower, markowitz_upper, null_distance, quasi_hyperbolic_distance, ConnectorGraph,
    LowerWitnesses, Mesh, QuasiGrid, TimeFunction,
};
use lorentz_metrics::minkowski::{apply_conformal, causally_related};
use lorentz_metrics::oracles::{delta_cone_future, delta_diamond_2d, delta_halfspace};
use lorentz_metrics::sampling::{rng, sample_members};
use lorentz_metrics::{ConformalMap, Event, Sign, Vector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// How much of the suite to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Dimension 1+1 plus the 1+2 cases a criterion names explicitly.
    Fast,
    /// Adds 1+2 (and, where cheap, 1+3) variants and finer meshes.
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level {other:?}, expected fast or full")),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Fast => "fast",
            Level::Full => "full",
        })
    }
}

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Smallest slack over all checks; negative when a check failed.
    pub margin: f64,
    pub checks: usize,
    pub elapsed_s: f64,
    pub budget_s: f64,
    /// Summary values and the first few failures.
    pub detail: String,
}

impl CriterionReport {
    /// One human-readable status line.
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: {} checks, margin {:.3e}, {:.1}s of {:.0}s; {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checks,
            self.margin,
            self.elapsed_s,
            self.budget_s,
            self.detail
        )
    }
}

/// Collects margins and failure messages.
struct Tally {
    margin: f64,
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            margin: f64::INFINITY,
            checks: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a check whose slack is `margin` (non-negative means it holds).
    fn check(&mut self, margin: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        let m = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.margin = self.margin.min(m);
        if m < 0.0 {
            self.record(what());
        }
    }

    /// Records a check that failed outright.
    fn fail(&mut self, msg: String) {
        self.checks += 1;
        self.margin = self.margin.min(-1.0);
        self.record(msg);
    }

    fn record(&mut self, msg: String) {
        if self.failures.len() < 5 {
            self.failures.push(msg);
        } else if self.failures.len() == 5 {
            self.failures.push("...".into());
        }
    }

    fn error(&mut self, context: &str, e: lorentz_metrics::Error) {
        self.fail(format!("{context}: {e}"));
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn finish(self, id: u8, name: &'static str, start: Instant, budget: Duration) -> CriterionReport {
        let elapsed = start.elapsed();
        let mut detail = self.notes.join("; ");
        let in_time = elapsed <= budget;
        if !in_time {
            detail.push_str(&format!("; over the runtime budget ({:.1}s)", elapsed.as_secs_f64()));
        }
        if !self.failures.is_empty() {
            detail.push_str("; failures: ");
            detail.push_str(&self.failures.join(" | "));
        }
        CriterionReport {
            id,
            name,
            passed: self.failures.is_empty() && in_time && self.checks > 0,
            margin: if self.checks == 0 { f64::NEG_INFINITY } else { self.margin },
            checks: self.checks,
            elapsed_s: elapsed.as_secs_f64(),
            budget_s: budget.as_secs_f64(),
            detail,
        }
    }
}

/// Default mesh slack: 5% relative or 0.05 absolute, whichever is larger.
pub fn slack(v: f64) -> f64 {
    (0.05 * v.abs()).max(0.05)
}

fn ev(t: f64, p: &[f64]) -> Event {
    Event::new(t, p)
}

fn on_axis(n: usize, t: f64) -> Event {
    Event::new(t, &vec![0.0; n])
}

/// Random member pairs; with `causal` set only causally related ones.
pub(crate) fn member_pairs<D: DomainOracle + ?Sized>(omega: &D, count: usize, causal: bool, seed: u64) -> Vec<(Event, Event)> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut rounds = 0;
    while out.len() < count && rounds < 200 {
        rounds += 1;
        let pts = sample_members(omega, 2 * count, 0.0, &mut r);
        for w in pts.chunks_exact(2) {
            if out.len() == count {
                break;
            }
            if w[0] != w[1] && (!causal || causally_related(&w[0], &w[1])) {
                out.push((w[0].clone(), w[1].clone()));
            }
        }
    }
    out
}

fn dims(level: Level, fast: &[usize], full: &[usize]) -> Vec<usize> {
    match level {
        Level::Fast => fast.to_vec(),
        Level::Full => full.to_vec(),
    }
}

/// Mesh used for Markowitz chains: the 1+1 lattice or a coarser connector grid.
fn chain_mesh(n: usize, k1: usize, kn: usize) -> Mesh {
    Mesh::default().with_k(if n == 1 { k1 } else { kn })
}

/// 1. Diamond upper bounds within 3% above the closed form, lower bounds within 1e-6 below.
pub fn criterion_1(_level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let (a, b) = (ev(-1.0, &[0.0]), ev(1.0, &[0.0]));
    let omega = SpecialDomain::Diamond { a: a.clone(), b: b.clone() };
    let mesh = Mesh::default().with_k(128);
    let pairs = member_pairs(&omega, 100, false, seed);
    let results: Vec<_> = pairs
        .par_iter()
        .map(|(x, y)| {
            let exact = delta_diamond_2d(&a, &b, x, y)?;
            let up = markowitz_upper(&omega, x, y, &mesh)?.value;
            let lo = markowitz_lower(&omega, x, y, &LowerWitnesses::default())?.value;
            Ok((exact, up, lo))
        })
        .collect();
    let mut worst_rel: f64 = 0.0;
    for (res, (x, y)) in results.into_iter().zip(&pairs) {
        match res {
            Ok((exact, up, lo)) => {
                let rel = (up - exact) / exact;
                worst_rel = worst_rel.max(rel);
                t.check(0.03 - rel, || format!("upper {up} vs {exact} at {:?} {:?}", x.0, y.0));
                t.check(up - exact + 1e-9 * exact.max(1.0), || format!("upper {up} below {exact}"));
                t.check(1e-6 - (exact - lo), || format!("lower {lo} vs {exact}"));
                t.check(exact - lo + 1e-9 * exact.max(1.0), || format!("lower {lo} above {exact}"));
            }
            Err(e) => t.error("diamond pair", e),
        }
    }
    t.note(format!("{} pairs, worst upper excess {:.2e}", pairs.len(), worst_rel));
    t.finish(1, "diamond oracle agreement", start, Duration::from_secs(60))
}

/// Causal pairs `(x, x + v)` with `v` future timelike, `x` a sampled member.
pub(crate) fn causal_pairs<D: DomainOracle + ?Sized>(omega: &D, count: usize, seed: u64) -> Vec<(Event, Event)> {
    let n = omega.dim();
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let xs = sample_members(omega, count, 0.0, &mut r);
        for x in xs {
            if out.len() == count {
                break;
            }
            let vt = r.gen_range(0.1..2.0);
            let mut vp: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            let norm = vp.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-12);
            let len = vt * r.gen_range(0.0..0.95);
            vp.iter_mut().for_each(|c| *c *= len / norm);
            let y = Event::new(x.t() + vt, &x.p().iter().zip(&vp).map(|(a, b)| a + b).collect::<Vec<_>>());
            if omega.contains(&y) {
                out.push((x, y));
            }
        }
    }
    out
}

/// 2. Equality cases on the cone and the half-space.
pub fn criterion_2(level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for n in dims(level, &[1], &[1, 2]) {
        let mesh = chain_mesh(n, 64, 8);
        let cone = SpecialDomain::ConeFuture { apex: Event::origin(n) };
        let half = SpecialDomain::HalfSpaceFuture {
            point: Event::origin(n),
            normal: None,
        };
        for (name, omega) in [("cone", &cone), ("half-space", &half)] {
            let pairs = causal_pairs(omega, 50, seed ^ n as u64);
            let res: Vec<_> = pairs
                .par_iter()
                .map(|(x, y)| {
                    let exact = match omega {
                        SpecialDomain::ConeFuture { apex } => delta_cone_future(apex, x, y)?,
                        _ => delta_halfspace(omega, x, y)?,
                    };
                    let up = markowitz_upper(omega, x, y, &mesh)?.value;
                    let nd = null_distance(omega, &TimeFunction::LogPast, x, y, &mesh)?.value;
                    Ok((exact, up, nd))
                })
                .collect();
            let factor = if name == "cone" { 2.0 } else { 1.0 };
            let mut worst: f64 = 0.0;
            for r in res {
                match r {
                    Ok((exact, up, nd)) => {
                        let e1 = (up - exact).abs() / exact;
                        let e2 = (exact - factor * nd).abs() / exact;
                        worst = worst.max(e1).max(e2);
                        t.check(0.03 - e1, || format!("{name} n={n}: upper {up} vs {exact}"));
                        t.check(0.03 - e2, || format!("{name} n={n}: {factor} x null {nd} vs {exact}"));
                    }
                    Err(e) => t.error(name, e),
                }
            }
            t.note(format!("{name} 1+{n}: worst relative error {worst:.2e}"));
        }
    }
    t.finish(2, "cone and half-space equality cases", start, Duration::from_secs(60))
}

/// 3. Quasi-hyperbolic sandwich on the stable diamond, eps = 1.
pub fn criterion_3(level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let eps = 1.0f64;
    let c_lo = eps / ((2.0 + eps) * (2.0 + eps) + eps * eps).sqrt();
    let c_hi = 2.0 * 2f64.sqrt();
    let k_n = if level == Level::Full { 24 } else { 16 };
    for n in [1, 2] {
        let omega = SpecialDomain::StableDiamond {
            a: on_axis(n, -1.0),
            b: on_axis(n, 1.0),
            eps,
        };
        let mesh = chain_mesh(n, 64, k_n);
        let grid = QuasiGrid::default();
        let pairs = member_pairs(&omega, 50, false, seed ^ (10 + n as u64));
        let res: Vec<_> = pairs
            .par_iter()
            .map(|(x, y)| {
                let d = markowitz_upper(&omega, x, y, &mesh)?.value;
                let k = quasi_hyperbolic_distance(&omega, x, y, &grid)?.value;
                Ok((d, k))
            })
            .collect();
        let (mut lo_r, mut hi_r) = (f64::INFINITY, 0.0f64);
        for r in res {
            match r {
                Ok((d, k)) => {
                    lo_r = lo_r.min(d / k);
                    hi_r = hi_r.max(d / k);
                    t.check(d - (c_lo * k - slack(c_lo * k)), || format!("n={n}: {d} below {c_lo} x {k}"));
                    t.check(c_hi * k + slack(c_hi * k) - d, || format!("n={n}: {d} above {c_hi} x {k}"));
                }
                Err(e) => t.error("stable diamond pair", e),
            }
        }
        t.note(format!("1+{n}: markowitz/quasi-hyperbolic in [{lo_r:.3}, {hi_r:.3}]"));
    }
    t.finish(3, "quasi-hyperbolic sandwich", start, Duration::from_secs(300))
}

/// 4. Null distance of `ln tau` against the Markowitz distance on the stable cone complement.
pub fn criterion_4(level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let eps = 1.0f64;
    let c = (2.0 + 2.0 * (1.0 + eps).powi(2)).sqrt();
    for n in dims(level, &[1], &[1, 2]) {
        let omega = SpecialDomain::StableConeComplement { eps, n };
        let mesh = chain_mesh(n, 64, 16);
        let pairs = member_pairs(&omega, 50, false, seed ^ (20 + n as u64));
        let res: Vec<_> = pairs
            .par_iter()
            .map(|(x, y)| {
                let d = null_distance(&omega, &TimeFunction::LogPast, x, y, &mesh)?.value;
                let m = markowitz_upper(&omega, x, y, &mesh)?.value;
                Ok((d, m))
            })
            .collect();
        let (mut r1, mut r2) = (0.0f64, 0.0f64);
        for r in res {
            match r {
                Ok((d, m)) => {
                    r1 = r1.max(d / m);
                    r2 = r2.max(m / d);
                    t.check(c * m + 0.05 - d, || format!("n={n}: null {d} above {c} x {m}"));
                    t.check(2.0 * d + slack(2.0 * d) - m, || format!("n={n}: markowitz {m} above 2 x {d}"));
                }
                Err(e) => t.error("stable cone complement pair", e),
            }
        }
        t.note(format!("1+{n}: max null/markowitz {r1:.3}, max markowitz/null {r2:.3}"));
    }
    t.finish(4, "null-distance sandwich", start, Duration::from_secs(180))
}

/// 5. Generic cosmological time on the graph form of the stable cone complement.
pub fn criterion_5(level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let per = match level {
        Level::Fast => 34,
        Level::Full => 100,
    };
    for n in dims(level, &[2], &[1, 2, 3]) {
        for eps in [0.5, 1.0, 2.0] {
            let special = SpecialDomain::StableConeComplement { eps, n };
            let Some(generic) = special.to_graph_domain() else {
                t.fail(format!("no graph form for eps={eps}"));
                continue;
            };
            let pts = sample_members(&special, per, 0.0, &mut rng(seed ^ (eps * 8.0) as u64 ^ (n as u64) << 8));
            let res: Vec<_> = pts
                .par_iter()
                .map(|x| {
                    let k = 1.0 + eps;
                    let closed = (k * x.t() + x.p().iter().map(|c| c * c).sum::<f64>().sqrt()) / (k * k - 1.0).sqrt();
                    cosmological_time(&generic, x, Sign::Past).map(|g| (closed, g))
                })
                .collect();
            let mut worst: f64 = 0.0;
            for r in res {
                match r {
                    Ok((closed, g)) => {
                        let rel = (g - closed).abs() / closed;
                        worst = worst.max(rel);
                        t.check(1e-3 - rel, || format!("eps={eps} n={n}: {g} vs {closed}"));
                    }
                    Err(e) => t.error("cosmological time", e),
                }
            }
            t.note(format!("1+{n} eps={eps}: worst {worst:.1e}"));
        }
    }
    t.finish(5, "cosmological time closed form", start, Duration::from_secs(30))
}

/// 6. Stable acausality of cone graphs `L |p|`.
pub fn criterion_6(level: Level, _seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for n in dims(level, &[2], &[1, 2, 3]) {
        let per_axis = match n {
            1 => 41,
            2 => 21,
            _ => 9,
        };
        let (lo, hi) = (vec![-1.0; n], vec![1.0; n]);
        for l in [0.25, 0.5, 0.8] {
            let s = sample_graph_surface(|p| l * p.iter().map(|c| c * c).sum::<f64>().sqrt(), &lo, &hi, per_axis);
            match stable_acausality_epsilon(&s) {
                Ok(AcausalityVerdict::StablyAcausal { eps, .. }) => {
                    let want = 1.0 / l - 1.0;
                    t.check(1e-6 - (eps - want).abs(), || format!("n={n} L={l}: eps {eps} vs {want}"));
                }
                Ok(v) => t.fail(format!("n={n} L={l}: unexpected verdict {v:?}")),
                Err(e) => t.error("surface", e),
            }
        }
        let s = sample_graph_surface(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt(), &lo, &hi, per_axis);
        match stable_acausality_epsilon(&s) {
            Ok(AcausalityVerdict::NotStablyAcausal { .. }) => t.check(0.0, String::new),
            Ok(v) => t.fail(format!("n={n} lightcone: unexpected verdict {v:?}")),
            Err(e) => t.error("lightcone", e),
        }
    }
    t.note("eps = 1/L - 1 recovered".into());
    t.finish(6, "stable acausality estimator", start, Duration::from_secs(5))
}

/// Scales of the hyperbolicity series.
pub const SCALES: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// Per-scale four-point series of the Markowitz upper bound on [`scale_sample`] points.
pub fn markowitz_series(
    omega: &SpecialDomain,
    points: usize,
    mesh: &Mesh,
    sampler: &QuadrupleSampler,
    seed: u64,
) -> lorentz_metrics::Result<HyperbolicityReport> {
    lorentz_metrics::hyplab::hyperbolicity_series(&SCALES, sampler, |s| {
        let pts = scale_sample(omega, s, points, seed)?;
        if omega.dim() == 1 {
            DistanceMatrix::from_fn(pts, |x, y| markowitz_upper(omega, x, y, mesh).map(|e| e.value))
        } else {
            let g = ConnectorGraph::build(omega, &pts, mesh, false)?;
            DistanceMatrix::from_rows(pts, &g.distance_matrix())
        }
    })
}

/// 7. Bounded versus growing four-point series.
pub fn criterion_7(level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let (pts1, k1, pts2, k2) = match level {
        Level::Fast => (32, 64, 16, 16),
        Level::Full => (40, 64, 20, 24),
    };
    // every quadruple of the sample is visited
    let sampler = QuadrupleSampler {
        quadruples: 100_000,
        seed,
    };
    let (a, b) = (on_axis(1, -1.0), on_axis(1, 1.0));
    let cases: Vec<(&str, SpecialDomain, bool)> = vec![
        (
            "half-space",
            SpecialDomain::HalfSpaceFuture {
                point: Event::origin(1),
                normal: None,
            },
            true,
        ),
        (
            "stable diamond",
            SpecialDomain::StableDiamond {
                a: a.clone(),
                b: b.clone(),
                eps: 1.0,
            },
            true,
        ),
        ("diamond", SpecialDomain::Diamond { a, b }, false),
        ("slab 1+2", SpecialDomain::SpacelikeSlab { height: 0.5, n: 2 }, false),
    ];
    for (name, omega, bounded) in cases {
        let (pts, k) = if omega.dim() == 1 { (pts1, k1) } else { (pts2, k2) };
        match markowitz_series(&omega, pts, &Mesh::default().with_k(k), &sampler, seed) {
            Ok(rep) => {
                let r = rep.ratio();
                let series: Vec<String> = rep.series.iter().map(|(_, d)| format!("{d:.3}")).collect();
                t.note(format!("{name} ratio {r:.2} [{}]", series.join(", ")));
                if bounded {
                    t.check(1.5 - r, || format!("{name}: ratio {r:.3} not below 1.5"));
                } else {
                    t.check(r - 2.0, || format!("{name}: ratio {r:.3} not above 2"));
                }
            }
            Err(e) => t.error(name, e),
        }
    }
    t.finish(7, "hyperbolicity discrimination", start, Duration::from_secs(600))
}

/// 8. Causal curves parametrized by `ln tau` are (2, 0)-quasi-geodesics.
pub fn criterion_8(level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for n in dims(level, &[1], &[1, 2]) {
        let mesh = chain_mesh(n, 64, 10);
        let cone = SpecialDomain::ConeFuture { apex: Event::origin(n) };
        let sd = SpecialDomain::StableDiamond {
            a: on_axis(n, -1.0),
            b: on_axis(n, 1.0),
            eps: 1.0,
        };
        let mut p1 = vec![0.0; n];
        p1[0] = 0.1;
        let mut p2 = vec![0.0; n];
        p2[0] = 0.6;
        // future complete domains use ln tau-, bounded ones ln(tau- / tau+)
        let cases = [
            ("cone", &cone, TimeFunction::LogPast, Event::new(0.3, &p1), Event::new(4.0, &p2)),
            (
                "stable diamond",
                &sd,
                TimeFunction::LogRatio,
                Event::new(-0.95, &p1),
                Event::new(0.8, &vec![0.0; n]),
            ),
        ];
        for (name, omega, tau, x, y) in cases {
            let path = match causal_quasigeodesic(omega, &x, &y, &tau, 64) {
                Ok(p) => p,
                Err(e) => {
                    t.error(name, e);
                    continue;
                }
            };
            let d = |u: &Event, v: &Event| markowitz_upper(omega, u, v, &mesh).map(|e| e.value);
            match verify_quasigeodesic(&path, &d, 2.0, 0.05, 200, seed) {
                Ok(c) => {
                    t.note(format!(
                        "{name} 1+{n}: margins {:.3} / {:.3} over {} pairs",
                        c.lower_margin, c.upper_margin, c.pairs
                    ));
                    t.check(c.lower_margin, || format!("{name} n={n}: lower margin {}", c.lower_margin));
                    t.check(c.upper_margin, || format!("{name} n={n}: upper margin {}", c.upper_margin));
                }
                Err(e) => t.error(name, e),
            }
        }
    }
    t.finish(8, "quasi-geodesic certificate", start, Duration::from_secs(120))
}

/// 9. Hilbert distance below the Markowitz distance on diamonds, with the observed ratio.
pub fn criterion_9(level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for n in dims(level, &[1], &[1, 2]) {
        let (a, b) = (on_axis(n, -1.0), on_axis(n, 1.0));
        let omega = SpecialDomain::Diamond { a: a.clone(), b: b.clone() };
        let mesh = chain_mesh(n, 64, 12);
        let count = if n == 1 { 100 } else { 50 };
        let pairs = member_pairs(&omega, count, false, seed ^ (30 + n as u64));
        let res: Vec<_> = pairs
            .par_iter()
            .map(|(x, y)| {
                let h = hilbert_distance(&omega, x, y)?;
                let d = markowitz_upper(&omega, x, y, &mesh)?.value;
                let exact = if n == 1 { Some(delta_diamond_2d(&a, &b, x, y)?) } else { None };
                Ok((h, d, exact))
            })
            .collect();
        let mut c: f64 = 0.0;
        for r in res {
            match r {
                Ok((h, d, exact)) => {
                    c = c.max(d / h);
                    t.check(d + slack(d) - h, || format!("n={n}: hilbert {h} above {d}"));
                    if let Some(e) = exact {
                        c = c.max(e / h);
                        t.check(e + 1e-9 * e.max(1.0) - h, || format!("n={n}: hilbert {h} above exact {e}"));
                    }
                }
                Err(e) => t.error("diamond pair", e),
            }
        }
        t.check(if c.is_finite() { 1.0 } else { -1.0 }, || format!("n={n}: no finite ratio"));
        t.note(format!("1+{n}: markowitz <= {c:.3} x hilbert"));
    }
    t.finish(9, "hilbert versus markowitz", start, Duration::from_secs(60))
}

fn random_similarity(r: &mut impl Rng) -> ConformalMap {
    let lambda = r.gen_range(-0.7f64..0.7).exp();
    let mut a = ConformalMap::boost_matrix(1, 1, r.gen_range(-1.0..1.0));
    if r.gen_bool(0.5) {
        // spatial reflection
        a[(1, 0)] = -a[(1, 0)];
        a[(1, 1)] = -a[(1, 1)];
    }
    let tau = Vector::from_slice(&[r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)]);
    ConformalMap::similarity(lambda, a, tau).expect("boosts and reflections are Lorentz")
}

/// 10. Invariance under similarities and, for diamonds, the inversion.
pub fn criterion_10(level: Level, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mesh = Mesh::default().with_k(64);
    let (a, b) = (on_axis(1, -1.0), on_axis(1, 1.0));
    let domains: Vec<(&str, SpecialDomain)> = vec![
        ("diamond", SpecialDomain::Diamond { a: a.clone(), b: b.clone() }),
        ("stable diamond", SpecialDomain::StableDiamond { a, b, eps: 1.0 }),
        (
            "half-space",
            SpecialDomain::HalfSpaceFuture {
                point: Event::origin(1),
                normal: None,
            },
        ),
    ];
    let trials = if level == Level::Full { 40 } else { 20 };
    let mut r = rng(seed ^ 40);
    for (name, omega) in domains {
        let inner: Arc<dyn DomainOracle> = Arc::new(omega.clone());
        let pairs = member_pairs(&omega, trials, false, seed ^ 41);
        let maps: Vec<ConformalMap> = (0..trials).map(|_| random_similarity(&mut r)).collect();
        let res: Vec<_> = pairs
            .par_iter()
            .zip(&maps)
            .map(|((x, y), g)| {
                let mapped = MappedDomain::new(inner.clone(), g.clone())?;
                let d0 = markowitz_upper(&omega, x, y, &mesh)?.value;
                let (gx, gy) = (apply_conformal(g, x)?, apply_conformal(g, y)?);
                let d1 = markowitz_upper(&mapped, &gx, &gy, &mesh)?.value;
                Ok((d0, d1))
            })
            .collect();
        let mut worst: f64 = 0.0;
        for res in res {
            match res {
                Ok((d0, d1)) => {
                    let e = (d1 - d0).abs() / d0.max(1.0);
                    worst = worst.max(e);
                    t.check(1e-6 - e, || format!("{name}: {d1} vs {d0} after a similarity"));
                }
                Err(e) => t.error(name, e),
            }
        }
        t.note(format!("{name}: similarity drift {worst:.1e}"));
    }
    // a diamond inside the future cone of the origin and its image under the inversion
    let (a, b) = (ev(2.0, &[0.0]), ev(4.0, &[0.5]));
    let omega = SpecialDomain::Diamond { a: a.clone(), b: b.clone() };
    let inv = ConformalMap::Inversion;
    let (ia, ib) = (apply_conformal(&inv, &a), apply_conformal(&inv, &b));
    match (ia, ib) {
        (Ok(ia), Ok(ib)) => {
            let (pa, pb) = if ia.t() < ib.t() { (ia, ib) } else { (ib, ia) };
            let image = SpecialDomain::Diamond { a: pa, b: pb };
            let pairs = member_pairs(&omega, trials, false, seed ^ 42);
            let res: Vec<_> = pairs
                .par_iter()
                .map(|(x, y)| {
                    let d0 = markowitz_upper(&omega, x, y, &mesh)?.value;
                    let (ix, iy) = (apply_conformal(&inv, x)?, apply_conformal(&inv, y)?);
                    let d1 = markowitz_upper(&image, &ix, &iy, &mesh)?.value;
                    Ok((d0, d1))
                })
                .collect();
            let mut worst: f64 = 0.0;
            for res in res {
                match res {
                    Ok((d0, d1)) => {
                        let e = (d1 - d0).abs() / d0;
                        worst = worst.max(e);
                        t.check(0.03 - e, || format!("inversion: {d1} vs {d0}"));
                    }
                    Err(e) => t.error("inverted diamond", e),
                }
            }
            t.note(format!("inversion drift {worst:.1e}"));
        }
        _ => t.fail("inversion of the diamond tips failed".into()),
    }
    t.finish(10, "conformal invariance", start, Duration::from_secs(120))
}

/// A criterion entry point.
pub type Criterion = fn(Level, u64) -> CriterionReport;

/// All criteria in order.
pub const CRITERIA: [Criterion; 10] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
];

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

/// Runs every criterion in order.
pub fn run_suite(level: Level, seed: u64) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| c(level, seed)).collect()
}
