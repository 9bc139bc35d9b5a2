//! Distance solvers: Markowitz upper and lower bounds, null distance,
//! quasi-hyperbolic distance and Hilbert distance.

mod connector;
mod dijkstra;
mod edge;
mod hilbert;
mod lattice;
mod lower;
mod null;
mod quasi;

pub use connector::ConnectorGraph;
pub use dijkstra::{dijkstra, Graph, ShortestPaths};
pub use edge::{infinitesimal_markowitz, markowitz_edge_cost};
pub use hilbert::hilbert_distance;
pub use lattice::NullLattice;
pub use lower::{markowitz_lower, LowerWitnesses};
pub use null::{null_distance, TimeFunction};
pub use quasi::{quasi_hyperbolic_distance, quasi_hyperbolic_lightlike, QuasiGrid};

use serde::{Deserialize, Serialize};

use crate::domains::{DomainOracle, SpecialDomain};
use crate::error::{Error, Result};
use crate::minkowski::Event;

/// Which side of the true value an estimate is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Upper,
    Lower,
    Exact,
}

impl EstimateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateKind::Upper => "upper",
            EstimateKind::Lower => "lower",
            EstimateKind::Exact => "exact",
        }
    }
}

/// Refinement parameters of the chain graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Mesh {
    /// Subdivisions of the lightlike rectangle (1+1) or cells along the longest axis.
    pub k: usize,
    /// Extra lattice steps around the region of interest.
    pub margin: usize,
    /// Lightlike directions tried per connector in dimension n >= 2.
    pub d: usize,
    /// Largest admissible node count.
    pub node_budget: usize,
    /// Graded lattice points per halving of the spacing near the endpoints (1+1).
    pub grading: usize,
}

impl Default for Mesh {
    fn default() -> Self {
        Mesh {
            k: 64,
            margin: 2,
            d: 16,
            node_budget: 400_000,
            grading: 2,
        }
    }
}

impl Mesh {
    pub fn with_k(self, k: usize) -> Self {
        Mesh { k, ..self }
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "k={};margin={};d={};budget={};grading={}",
            self.k, self.margin, self.d, self.node_budget, self.grading
        )
    }
}

/// A chain of lightlike segments with per-link costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightlikeChain {
    pub vertices: Vec<Event>,
    pub costs: Vec<f64>,
    pub total: f64,
}

/// A polygonal path whose consecutive vertices are causally related.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalPath {
    pub vertices: Vec<Event>,
    /// Time-function increments along consecutive links.
    pub increments: Vec<f64>,
}

/// What certifies an estimate.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Chain(LightlikeChain),
    Path(CausalPath),
    /// Affine functional `<m, .>` whose image interval gave the bound.
    Functional { m: Vec<f64>, lower: f64, upper: f64 },
    /// A containing domain with a closed-form distance.
    Container(SpecialDomain),
    Polyline(Vec<Event>),
}

/// A distance value tagged with its kind and the parameters that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub mesh: String,
    pub witness: Option<Witness>,
}

impl DistanceEstimate {
    pub(crate) fn exact(value: f64) -> Self {
        DistanceEstimate {
            value,
            kind: EstimateKind::Exact,
            mesh: String::new(),
            witness: None,
        }
    }
}

/// Upper bound on the Markowitz distance from a shortest lightlike chain.
///
/// Uses the lightlike lattice through `x` and `y` in dimension 1+1 and a
/// connector graph otherwise.
pub fn markowitz_upper<D: DomainOracle + ?Sized>(omega: &D, x: &Event, y: &Event, mesh: &Mesh) -> Result<DistanceEstimate> {
    for p in [x, y] {
        if p.dim() != omega.dim() {
            return Err(Error::DimensionMismatch {
                expected: omega.dim(),
                found: p.dim(),
            });
        }
        if !omega.contains(p) {
            return Err(Error::OutsideDomain);
        }
    }
    if x == y {
        return Ok(DistanceEstimate {
            value: 0.0,
            kind: EstimateKind::Upper,
            mesh: mesh.fingerprint(),
            witness: Some(Witness::Chain(LightlikeChain {
                vertices: vec![x.clone()],
                costs: Vec::new(),
                total: 0.0,
            })),
        });
    }
    if omega.dim() == 1 {
        let lat = NullLattice::build(omega, x, y, mesh)?;
        let chain = lat.shortest_chain()?;
        return Ok(DistanceEstimate {
            value: chain.total,
            kind: EstimateKind::Upper,
            mesh: mesh.fingerprint(),
            witness: Some(Witness::Chain(chain)),
        });
    }
    let g = ConnectorGraph::build(omega, &[x.clone(), y.clone()], mesh, true)?;
    let chain = g.shortest_chain(0, 1)?;
    Ok(DistanceEstimate {
        value: chain.total,
        kind: EstimateKind::Upper,
        mesh: mesh.fingerprint(),
        witness: Some(Witness::Chain(chain)),
    })
}
