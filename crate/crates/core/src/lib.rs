//! Invariant distances on domains of Minkowski space.
//!
//! The crate computes the Markowitz distance (chain upper bounds and
//! projective lower bounds), the null distance of a time function, the
//! quasi-hyperbolic distance and the Hilbert distance on domains of
//! `R^{1,n}`, and estimates Gromov hyperbolicity from sampled distances.
//!
//! * [`minkowski`]: the Lorentzian form, causal classification, projective
//!   interval distances and conformal maps.
//! * [`domains`]: the [`DomainOracle`] interface and concrete domains.
//! * [`metrics`]: the distance solvers.
//! * [`oracles`]: closed-form distances on special domains.
//! * [`hyplab`]: four-point hyperbolicity, quasi-geodesics, thin triangles.

pub mod domains;
pub mod error;
pub mod hyplab;
pub mod metrics;
pub mod minkowski;
pub mod optim;
pub mod oracles;
pub mod sampling;

pub use domains::{DomainFlags, DomainOracle, Sign, SpecialDomain};
pub use error::{Error, Result};
pub use minkowski::{CausalClass, CausalKind, ConformalMap, Endpoint, Event, Orientation, ProjectiveInterval, Vector};
