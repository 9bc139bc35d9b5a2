//! Experiment configuration files.

use std::path::Path;
use std::sync::Arc;

use lorentz_metrics::domains::{DomainOracle, GraphDomainSpec, GraphFnSpec, SpecialDomain};
use lorentz_metrics::hyplab::{QuadrupleSampler, WitnessKind};
use lorentz_metrics::metrics::{LowerWitnesses, Mesh, QuasiGrid, TimeFunction};
use lorentz_metrics::Event;
use serde::{Deserialize, Serialize};

/// The only accepted value of the `version` field.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Distance,
    Compare,
    Hyperbolicity,
    Acausality,
    Thinness,
    Validate,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Distance => "distance",
            ExperimentKind::Compare => "compare",
            ExperimentKind::Hyperbolicity => "hyperbolicity",
            ExperimentKind::Acausality => "acausality",
            ExperimentKind::Thinness => "thinness",
            ExperimentKind::Validate => "validate",
        }
    }
}

/// A closed-form domain or a graph-described one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Special(SpecialDomain),
    Graph(GraphDomainSpec),
}

impl DomainSpec {
    /// Short identifier used in result rows.
    pub fn id(&self) -> String {
        match self {
            DomainSpec::Special(s) => {
                let v = serde_json::to_value(s).expect("domains serialize");
                let kind = v.get("type").and_then(|t| t.as_str()).unwrap_or("special").to_string();
                format!("{kind}/1+{}", s.dim())
            }
            DomainSpec::Graph(g) => format!("graph/1+{}", g.n),
        }
    }

    pub fn build(&self) -> lorentz_metrics::Result<Arc<dyn DomainOracle>> {
        match self {
            DomainSpec::Special(s) => {
                s.validate()?;
                Ok(Arc::new(s.clone()))
            }
            DomainSpec::Graph(g) => Ok(Arc::new(g.build()?)),
        }
    }

    pub fn special(&self) -> Option<&SpecialDomain> {
        match self {
            DomainSpec::Special(s) => Some(s),
            DomainSpec::Graph(_) => None,
        }
    }
}

/// Distances an experiment can evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    MarkowitzUpper,
    MarkowitzLower,
    /// Closed-form Markowitz distance, where one applies.
    Exact,
    Null,
    QuasiHyperbolic,
    QuasiHyperbolicLightlike,
    Hilbert,
}

impl MetricName {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::MarkowitzUpper => "markowitz_upper",
            MetricName::MarkowitzLower => "markowitz_lower",
            MetricName::Exact => "markowitz_exact",
            MetricName::Null => "null",
            MetricName::QuasiHyperbolic => "quasi_hyperbolic",
            MetricName::QuasiHyperbolicLightlike => "quasi_hyperbolic_lightlike",
            MetricName::Hilbert => "hilbert",
        }
    }
}

/// Time functions that can be named in a config.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeFunctionName {
    LogPast,
    LogRatio,
}

impl TimeFunctionName {
    pub fn function(self) -> TimeFunction {
        match self {
            TimeFunctionName::LogPast => TimeFunction::LogPast,
            TimeFunctionName::LogRatio => TimeFunction::LogRatio,
        }
    }
}

/// Which pairs of points to evaluate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSource {
    /// Explicit pairs.
    Pairs(Vec<[Event; 2]>),
    /// Random member pairs drawn from the domain's sampling box.
    Sample {
        count: usize,
        #[serde(default)]
        causal_only: bool,
    },
}

/// Points for a hyperbolicity run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSource {
    /// One fixed point set, a single-entry series.
    Points(Vec<Event>),
    /// The scale family of the hyperbolicity lab at each listed scale.
    Scales { scales: Vec<f64>, per_scale: usize },
}

/// A sampled spacelike graph `t = f(p)` over a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub function: GraphFnSpec,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub per_axis: usize,
}

/// A causal bigon between two events, bent toward a spatial direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BigonSpec {
    pub from: Event,
    pub to: Event,
    pub toward: Vec<f64>,
    #[serde(default = "default_bigon_samples")]
    pub samples: usize,
}

fn default_bigon_samples() -> usize {
    16
}

/// Declared output files, relative to the `--out` directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

fn default_metrics() -> Vec<MetricName> {
    vec![MetricName::MarkowitzUpper, MetricName::MarkowitzLower, MetricName::Exact]
}

fn default_seed() -> u64 {
    42
}

fn default_levels() -> Vec<u32> {
    vec![0, 1, 2, 3, 4]
}

/// One experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PairSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<PointSource>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<MetricName>,
    /// The two metrics a compare run sets against each other.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<[MetricName; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_function: Option<TimeFunctionName>,
    #[serde(default)]
    pub mesh: Mesh,
    #[serde(default)]
    pub quasi: QuasiGrid,
    #[serde(default)]
    pub lower: LowerWitnesses,
    #[serde(default)]
    pub sampler: QuadrupleSampler,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessKind>,
    #[serde(default = "default_levels")]
    pub levels: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bigons: Vec<BigonSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

/// A config that failed to load.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    /// Checks the fields each experiment needs.
    pub fn check(&self) -> Result<(), ConfigError> {
        let err = |m: &str| Err(ConfigError(m.to_string()));
        if self.version != CONFIG_VERSION {
            return Err(ConfigError(format!("unsupported version {}, expected {CONFIG_VERSION}", self.version)));
        }
        let needs_domain = !matches!(self.experiment, ExperimentKind::Acausality | ExperimentKind::Validate);
        if needs_domain && self.domain.is_none() {
            return err("this experiment needs a domain");
        }
        match self.experiment {
            ExperimentKind::Distance if self.pairs.is_none() => err("distance needs pairs"),
            ExperimentKind::Distance if self.metrics.is_empty() => err("distance needs at least one metric"),
            ExperimentKind::Compare if self.pairs.is_none() || self.compare.is_none() => {
                err("compare needs pairs and a compare field")
            }
            ExperimentKind::Hyperbolicity if self.points.is_none() => err("hyperbolicity needs points"),
            ExperimentKind::Acausality if self.surface.is_none() => err("acausality needs a surface"),
            ExperimentKind::Thinness if self.witnesses.is_empty() && self.bigons.is_empty() => {
                err("thinness needs witnesses or bigons")
            }
            _ => {
                let uses_null = self.metrics.contains(&MetricName::Null)
                    || self.compare.is_some_and(|c| c.contains(&MetricName::Null));
                let listed = matches!(self.experiment, ExperimentKind::Distance | ExperimentKind::Compare);
                if listed && uses_null && self.time_function.is_none() {
                    return err("the null metric needs a time_function");
                }
                if let Some(l) = &self.level {
                    l.parse::<crate::validate::Level>().map_err(ConfigError)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAMOND: &str = r#"{
        "version": 1,
        "experiment": "distance",
        "domain": {"special": {"type": "diamond", "a": [-1.0, 0.0], "b": [1.0, 0.0]}},
        "pairs": {"pairs": [[[0.0, 0.0], [0.5, 0.0]]]},
        "outputs": {"csv": "d.csv"}
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::from_json(DIAMOND).unwrap();
        assert_eq!(c.metrics, default_metrics());
        let again = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.to_json(), again.to_json());
        assert_eq!(c.domain.unwrap().id(), "diamond/1+1");
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let extra = DIAMOND.replacen("\"version\": 1,", "\"version\": 1, \"colour\": 3,", 1);
        assert!(ExperimentConfig::from_json(&extra).is_err());
        let v2 = DIAMOND.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(ExperimentConfig::from_json(&v2).is_err());
    }

    #[test]
    fn null_needs_a_time_function() {
        let c = DIAMOND.replacen("\"outputs\"", "\"metrics\": [\"null\"], \"outputs\"", 1);
        assert!(ExperimentConfig::from_json(&c).is_err());
    }
}
