//! Executes an [`ExperimentConfig`] and collects result rows.

use std::sync::Arc;
use std::time::Instant;

use lorentz_metrics::domains::{sample_graph_surface, stable_acausality_epsilon, AcausalityVerdict, DomainOracle, GraphFn};
use lorentz_metrics::hyplab::{
    causal_thinness, four_point_delta, lightlike_bigon, scale_sample, thin_triangle_defect, witness_family,
    DistanceMatrix, GrowthVerdict, HyperbolicityReport,
};
use lorentz_metrics::metrics::{
    hilbert_distance, markowitz_lower, markowitz_upper, null_distance, quasi_hyperbolic_distance,
    quasi_hyperbolic_lightlike, ConnectorGraph, DistanceEstimate, EstimateKind, Witness,
};
use lorentz_metrics::oracles::exact_distance;
use lorentz_metrics::{Error, Event};
use rayon::prelude::*;

use crate::config::{DomainSpec, ExperimentConfig, ExperimentKind, MetricName, PairSource, PointSource};
use crate::output::ResultRow;
use crate::svg::{self, Scene};
use crate::validate::{self, causal_pairs, member_pairs, Level};

/// Why a run stopped short of a clean exit.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Domain(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Domain(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "invalid config: {m}"),
            RunError::Domain(m) => write!(f, "domain construction failed: {m}"),
        }
    }
}

/// Rows and drawings produced by a run.
#[derive(Debug, Default)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub scene: Option<Scene>,
    /// A solver failed on at least one row; a diagnostic row records it.
    pub solver_failed: bool,
    /// A validation criterion failed.
    pub validation_failed: bool,
}

impl Outcome {
    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        if self.solver_failed {
            4
        } else if self.validation_failed {
            1
        } else {
            0
        }
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    domain_id: String,
    omega: Arc<dyn DomainOracle>,
}

impl Ctx<'_> {
    fn row(&self, metric: impl Into<String>, kind: &str, points: Vec<Event>, value: Option<f64>, mesh: String) -> ResultRow {
        ResultRow {
            experiment: self.cfg.experiment.as_str().into(),
            domain: self.domain_id.clone(),
            metric: metric.into(),
            kind: kind.into(),
            points,
            value,
            mesh,
            seed: self.cfg.seed,
            wall_ms: 0,
        }
    }

    fn estimate_row(&self, metric: MetricName, points: Vec<Event>, e: &DistanceEstimate, ms: u128) -> ResultRow {
        let mut r = self.row(metric.as_str(), e.kind.as_str(), points, Some(e.value), e.mesh.clone());
        r.wall_ms = ms;
        r
    }

    fn diagnostic(&self, metric: &str, points: Vec<Event>, e: &Error) -> ResultRow {
        self.row(metric, "error", points, None, format!("error={e}"))
    }
}

/// Solves one metric on one pair. `Ok(None)` means the metric does not apply.
fn evaluate(ctx: &Ctx, metric: MetricName, x: &Event, y: &Event) -> lorentz_metrics::Result<Option<DistanceEstimate>> {
    let cfg = ctx.cfg;
    let omega = ctx.omega.as_ref();
    let res = match metric {
        MetricName::MarkowitzUpper => markowitz_upper(omega, x, y, &cfg.mesh),
        MetricName::MarkowitzLower => markowitz_lower(omega, x, y, &cfg.lower),
        MetricName::Exact => {
            let special = cfg.domain.as_ref().and_then(DomainSpec::special);
            return Ok(special.and_then(|s| exact_distance(s, x, y)).map(|v| DistanceEstimate {
                value: v,
                kind: EstimateKind::Exact,
                mesh: "closed-form".into(),
                witness: None,
            }));
        }
        MetricName::Null => {
            let tf = cfg.time_function.expect("checked at load time").function();
            null_distance(omega, &tf, x, y, &cfg.mesh)
        }
        MetricName::QuasiHyperbolic => quasi_hyperbolic_distance(omega, x, y, &cfg.quasi),
        MetricName::QuasiHyperbolicLightlike => quasi_hyperbolic_lightlike(omega, x, y, &cfg.mesh),
        MetricName::Hilbert => hilbert_distance(omega, x, y).map(|v| DistanceEstimate {
            value: v,
            kind: EstimateKind::Exact,
            mesh: String::new(),
            witness: None,
        }),
    };
    match res {
        Ok(e) => Ok(Some(e)),
        Err(Error::NotApplicable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn pairs(ctx: &Ctx) -> Vec<(Event, Event)> {
    match ctx.cfg.pairs.as_ref().expect("checked at load time") {
        PairSource::Pairs(p) => p.iter().map(|[a, b]| (a.clone(), b.clone())).collect(),
        PairSource::Sample { count, causal_only } => {
            if *causal_only {
                causal_pairs(ctx.omega.as_ref(), *count, ctx.cfg.seed)
            } else {
                member_pairs(ctx.omega.as_ref(), *count, false, ctx.cfg.seed)
            }
        }
    }
}

/// Per-pair results for the given metrics, in pair then metric order.
fn pair_rows(ctx: &Ctx, metrics: &[MetricName], out: &mut Outcome) -> Vec<Vec<Option<f64>>> {
    let ps = pairs(ctx);
    let results: Vec<Vec<(MetricName, lorentz_metrics::Result<Option<DistanceEstimate>>, u128)>> = ps
        .par_iter()
        .map(|(x, y)| {
            metrics
                .iter()
                .map(|&m| {
                    let start = Instant::now();
                    let r = evaluate(ctx, m, x, y);
                    (m, r, start.elapsed().as_millis())
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(ps.len());
    for ((x, y), per) in ps.iter().zip(results) {
        let pts = vec![x.clone(), y.clone()];
        let mut v = Vec::new();
        for (m, r, ms) in per {
            match r {
                Ok(Some(e)) => {
                    if let (Some(scene), Some(Witness::Chain(c))) = (out.scene.as_mut(), &e.witness) {
                        scene.stroke(c.vertices.clone(), "#1f77b4");
                    }
                    out.rows.push(ctx.estimate_row(m, pts.clone(), &e, ms));
                    v.push(Some(e.value));
                }
                Ok(None) => v.push(None),
                Err(e) => {
                    out.solver_failed = true;
                    out.rows.push(ctx.diagnostic(m.as_str(), pts.clone(), &e));
                    v.push(None);
                }
            }
        }
        if let Some(scene) = out.scene.as_mut() {
            scene.dots.extend([x.clone(), y.clone()]);
        }
        values.push(v);
    }
    values
}

fn run_distance(ctx: &Ctx, out: &mut Outcome) {
    pair_rows(ctx, &ctx.cfg.metrics, out);
}

fn run_compare(ctx: &Ctx, out: &mut Outcome) {
    let [a, b] = ctx.cfg.compare.expect("checked at load time");
    let ps = pairs(ctx);
    let values = pair_rows(ctx, &[a, b], out);
    for ((x, y), v) in ps.iter().zip(values) {
        if let (Some(va), Some(vb)) = (v[0], v[1]) {
            let ratio = if vb != 0.0 { Some(va / vb) } else { None };
            let metric = format!("ratio:{}/{}", a.as_str(), b.as_str());
            out.rows.push(ctx.row(metric, "ratio", vec![x.clone(), y.clone()], ratio, String::new()));
        }
    }
}

fn run_hyperbolicity(ctx: &Ctx, out: &mut Outcome) {
    let cfg = ctx.cfg;
    let omega = ctx.omega.as_ref();
    let sampler = lorentz_metrics::hyplab::QuadrupleSampler {
        seed: cfg.seed,
        ..cfg.sampler
    };
    let (scales, sets): (Vec<f64>, Vec<lorentz_metrics::Result<Vec<Event>>>) = match cfg.points.as_ref().expect("checked") {
        PointSource::Points(p) => (vec![1.0], vec![Ok(p.clone())]),
        PointSource::Scales { scales, per_scale } => (
            scales.clone(),
            scales.iter().map(|&s| scale_sample(omega, s, *per_scale, cfg.seed)).collect(),
        ),
    };
    let mesh = cfg.mesh.fingerprint();
    let mut series = Vec::new();
    let mut best: Option<HyperbolicityReport> = None;
    for (s, pts) in scales.iter().zip(sets) {
        let start = Instant::now();
        let report = pts.and_then(|pts| {
            let m = if omega.dim() == 1 {
                DistanceMatrix::from_fn(pts, |x, y| markowitz_upper(omega, x, y, &cfg.mesh).map(|e| e.value))?
            } else {
                let g = ConnectorGraph::build(omega, &pts, &cfg.mesh, false)?;
                DistanceMatrix::from_rows(pts, &g.distance_matrix())?
            };
            four_point_delta(&m, &sampler)
        });
        let metric = format!("delta_hat@scale={s}");
        match report {
            Ok(r) => {
                let mut row = ctx.row(metric, "lower", r.worst.to_vec(), Some(r.delta), mesh.clone());
                row.wall_ms = start.elapsed().as_millis();
                out.rows.push(row);
                series.push((*s, r.delta));
                if best.as_ref().map_or(true, |b| r.delta > b.delta) {
                    best = Some(r);
                }
            }
            Err(e) => {
                out.solver_failed = true;
                out.rows.push(ctx.diagnostic(&metric, Vec::new(), &e));
            }
        }
    }
    if let Some(mut b) = best {
        b.series = series;
        if b.series.len() > 1 {
            let verdict: GrowthVerdict = b.verdict();
            out.rows.push(ctx.row(
                format!("growth_ratio:{}", verdict.as_str()),
                "verdict",
                Vec::new(),
                Some(b.ratio()),
                mesh,
            ));
        }
        if let Some(scene) = out.scene.as_mut() {
            scene.dots.extend(b.worst.iter().cloned());
        }
    }
}

fn run_acausality(cfg: &ExperimentConfig, out: &mut Outcome) {
    let surf = cfg.surface.as_ref().expect("checked at load time");
    let f = GraphFn::spec(surf.function.clone());
    let samples = sample_graph_surface(|p| f.eval(p), &surf.lo, &surf.hi, surf.per_axis);
    let n = surf.lo.len();
    let row = |metric: String, kind: &str, value: Option<f64>| ResultRow {
        experiment: cfg.experiment.as_str().into(),
        domain: format!("graph-surface/1+{n}"),
        metric,
        kind: kind.into(),
        points: Vec::new(),
        value,
        mesh: format!("per_axis={}", surf.per_axis),
        seed: cfg.seed,
        wall_ms: 0,
    };
    match stable_acausality_epsilon(&samples) {
        Ok(AcausalityVerdict::AcausalForAllEps) => {
            out.rows.push(row("stable_acausality:acausal_for_all_eps".into(), "verdict", Some(f64::INFINITY)));
        }
        Ok(AcausalityVerdict::StablyAcausal { eps, lipschitz }) => {
            out.rows.push(row("stable_acausality:stably_acausal".into(), "verdict", Some(eps)));
            out.rows.push(row("lipschitz".into(), "exact", Some(lipschitz)));
        }
        Ok(AcausalityVerdict::NotStablyAcausal { lipschitz }) => {
            out.rows.push(row("stable_acausality:not_stably_acausal".into(), "verdict", None));
            out.rows.push(row("lipschitz".into(), "exact", Some(lipschitz)));
        }
        Err(e) => {
            out.solver_failed = true;
            out.rows.push(row("stable_acausality".into(), "error", None));
            out.rows.last_mut().unwrap().mesh = format!("error={e}");
        }
    }
}

fn run_thinness(ctx: &Ctx, out: &mut Outcome) {
    let cfg = ctx.cfg;
    let omega = ctx.omega.as_ref();
    let d = |x: &Event, y: &Event| markowitz_upper(omega, x, y, &cfg.mesh).map(|e| e.value);
    let mesh = cfg.mesh.fingerprint();
    for w in &cfg.witnesses {
        for &k in &cfg.levels {
            let start = Instant::now();
            let metric = format!("triangle_defect:{}@level={k}", witness_name(w));
            match witness_family(omega, w, k).and_then(|tri| thin_triangle_defect(&d, &tri).map(|v| (tri, v))) {
                Ok((tri, v)) => {
                    let mut row = ctx.row(metric, "upper", tri.corners().to_vec(), Some(v), mesh.clone());
                    row.wall_ms = start.elapsed().as_millis();
                    out.rows.push(row);
                    if let Some(scene) = out.scene.as_mut() {
                        for side in tri.sides {
                            scene.stroke(side, "#d62728");
                        }
                    }
                }
                Err(Error::NotApplicable(_)) => {}
                Err(e) => {
                    out.solver_failed = true;
                    out.rows.push(ctx.diagnostic(&metric, Vec::new(), &e));
                }
            }
        }
    }
    for b in &cfg.bigons {
        let start = Instant::now();
        let pts = vec![b.from.clone(), b.to.clone()];
        let res = lightlike_bigon(&b.from, &b.to, &b.toward, b.samples)
            .and_then(|bigon| causal_thinness(omega, &d, std::slice::from_ref(&bigon)).map(|v| (bigon, v)));
        match res {
            Ok(((p, q), v)) => {
                let mut row = ctx.row("bigon_thinness", "upper", pts, Some(v), mesh.clone());
                row.wall_ms = start.elapsed().as_millis();
                out.rows.push(row);
                if let Some(scene) = out.scene.as_mut() {
                    scene.stroke(p, "#2ca02c");
                    scene.stroke(q, "#2ca02c");
                }
            }
            Err(Error::NotApplicable(_)) => {}
            Err(e) => {
                out.solver_failed = true;
                out.rows.push(ctx.diagnostic("bigon_thinness", pts, &e));
            }
        }
    }
}

fn witness_name(w: &lorentz_metrics::hyplab::WitnessKind) -> &'static str {
    use lorentz_metrics::hyplab::WitnessKind::*;
    match w {
        LightlikeBoundary { .. } => "lightlike_boundary",
        BrokenSegment { .. } => "broken_segment",
        FlatSlice => "flat_slice",
    }
}

fn run_validate(cfg: &ExperimentConfig, level: Level, out: &mut Outcome) {
    for rep in validate::run_suite(level, cfg.seed) {
        println!("{}", rep.line());
        out.validation_failed |= !rep.passed;
        out.rows.push(ResultRow {
            experiment: cfg.experiment.as_str().into(),
            domain: String::new(),
            metric: format!("criterion_{}:{}", rep.id, rep.name),
            kind: if rep.passed { "pass" } else { "fail" }.into(),
            points: Vec::new(),
            value: Some(rep.margin),
            mesh: format!("level={level}"),
            seed: cfg.seed,
            wall_ms: (rep.elapsed_s * 1000.0) as u128,
        });
    }
}

/// Runs the experiment. Configuration and domain problems abort; solver
/// failures are recorded as diagnostic rows in the outcome.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    cfg.check().map_err(|e| RunError::Config(e.0))?;
    let level: Level = match &cfg.level {
        Some(l) => l.parse().map_err(RunError::Config)?,
        None => Level::Fast,
    };
    let mut out = Outcome::default();
    match cfg.experiment {
        ExperimentKind::Validate => {
            run_validate(cfg, level, &mut out);
            return Ok(out);
        }
        ExperimentKind::Acausality => {
            run_acausality(cfg, &mut out);
            return Ok(out);
        }
        _ => {}
    }
    let spec = cfg.domain.as_ref().expect("checked at load time");
    let omega = spec.build().map_err(|e| RunError::Domain(e.to_string()))?;
    let ctx = Ctx {
        cfg,
        domain_id: spec.id(),
        omega,
    };
    if cfg.outputs.svg.is_some() && ctx.omega.dim() == 1 {
        let mut scene = Scene::default();
        svg::add_boundary(&mut scene, ctx.omega.as_ref());
        out.scene = Some(scene);
    }
    match cfg.experiment {
        ExperimentKind::Distance => run_distance(&ctx, &mut out),
        ExperimentKind::Compare => run_compare(&ctx, &mut out),
        ExperimentKind::Hyperbolicity => run_hyperbolicity(&ctx, &mut out),
        ExperimentKind::Thinness => run_thinness(&ctx, &mut out),
        ExperimentKind::Validate | ExperimentKind::Acausality => unreachable!(),
    }
    Ok(out)
}
