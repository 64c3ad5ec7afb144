//! Hyperbolic densities and distances, the domain constant, bounded
//! distortion along escaping orbits, and a numerical replay of the radius
//! recursion behind the main boundedness criterion.
//!
//! Normalization: the unit disk has density `1/(1-|z|^2)`, so
//! `lambda_disk(0) = 1` (curvature -4). With it, simply connected domains
//! satisfy `1/(2d) <= lambda <= 2/d`, `d` the distance to the boundary.

mod constant;
mod distortion;
mod domain;
mod trace;

pub use constant::{domain_constant, DomainConstant, Sampling};
pub use distortion::{distortion_check, DistortionReport};
pub use domain::{hempel_lower, hyperbolic_density, hyperbolic_distance, schwarz_pick_check, Domain, HyperbolicSample, SchwarzPick, HEMPEL_C};
pub use trace::{constant_audit, derive_constants, proof_trace, ConstantAudit, Curve, Derived, TraceParams, TraceState, TraceStep};

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum HyperbolicError {
    #[error("unsupported domain for this operation: {0}")]
    UnsupportedDomain(String),
    #[error("point {0} is not in the domain")]
    NotInDomain(Complex64),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("map sends sample {0} outside the target domain")]
    MapLeavesDomain(Complex64),
    #[error("sample {0} does not escape")]
    NonEscaping(Complex64),
    #[error("{0}")]
    InvalidParams(String),
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}
