//! Nevanlinna functionals `m`, `N`, `T`, the extreme moduli `L`, `M`, and
//! growth summaries over geometric radius grids.
//!
//! The proximity function uses the `1/(2 pi)` normalization.

mod growth;
mod modulus;
mod profile;
mod proximity;

use crate::expr::{MeroExpr, PoleError, SingularityList};

pub use growth::{growth_summary, GrowthSummary};
pub use modulus::{max_log_modulus, max_modulus, min_log_modulus, min_modulus, CircleExtreme};
pub use profile::{radial_profile, radial_sample, RadialProfile, RadialSample, RadiusGrid};
pub use proximity::{proximity_with, Quadrature, QuadratureOptions};

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NevanlinnaError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("invalid radius grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Poles(#[from] PoleError),
    #[error("quadrature did not converge within {nodes} nodes (best estimate {estimate})")]
    NoConvergence { estimate: f64, nodes: usize },
    #[error("profile needs at least {need_samples} samples over {need_decades} decades, got {samples} over {decades:.2}")]
    InsufficientSpan {
        samples: usize,
        decades: f64,
        need_samples: usize,
        need_decades: f64,
    },
    #[error("no circle in ({0}, 2*{0}) satisfies the bound (best max log+ {1}, bound {2})")]
    NotFound(f64, f64, f64),
}

fn check_radius(r: f64) -> Result<(), NevanlinnaError> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(NevanlinnaError::InvalidRadius(r))
    }
}

/// Circles closer than this to a pole are moved.
pub const POLE_CLEARANCE: f64 = 1e-9;
/// Relative size of one radius notch.
pub const NOTCH: f64 = 1e-7;

/// The radius actually used for circle integrals at nominal radius `r`: `r`
/// itself, or the nearest notch `r (1 +- k 1e-7)` whose circle keeps
/// [`POLE_CLEARANCE`] from every pole.
pub fn clear_radius(r: f64, poles: &SingularityList, clearance: f64) -> f64 {
    if poles.circle_clearance(r) >= clearance {
        return r;
    }
    for k in 1..1000 {
        for sign in [1.0, -1.0] {
            let rr = r * (1.0 + sign * k as f64 * NOTCH);
            if poles.circle_clearance(rr) >= clearance {
                return rr;
            }
        }
    }
    r
}

/// Pole list that suffices for every circle functional at radius `r`.
pub fn poles_for_radius(f: &MeroExpr, r: f64) -> Result<SingularityList, NevanlinnaError> {
    Ok(f.poles_in_disk(r * 1.01 + 5.0)?)
}

/// `m`, `N` and `T` at nominal radius `r`, with `m` taken on the cleared
/// radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicDetail {
    pub m: Quadrature,
    pub n: f64,
    pub t: f64,
    /// Radius used for `m`.
    pub radius: f64,
}

/// `T(r, f)` given a pole list covering `|z| <= r + 5`.
pub fn characteristic_with(f: &MeroExpr, r: f64, poles: &SingularityList) -> CharacteristicDetail {
    let rr = clear_radius(r, poles, POLE_CLEARANCE);
    let m = proximity_with(f, rr, poles, &QuadratureOptions::default());
    let n = counting_from(poles, r);
    CharacteristicDetail {
        m,
        n,
        t: m.value + n,
        radius: rr,
    }
}

/// `m(r, f)`.
pub fn proximity(f: &MeroExpr, r: f64) -> Result<f64, NevanlinnaError> {
    check_radius(r)?;
    let poles = poles_for_radius(f, r)?;
    let q = characteristic_with(f, r, &poles).m;
    if q.converged {
        Ok(q.value)
    } else {
        Err(NevanlinnaError::NoConvergence {
            estimate: q.value,
            nodes: q.nodes,
        })
    }
}

/// `N(r)` from a pole list covering the disk of radius `r`.
pub fn counting_from(poles: &SingularityList, r: f64) -> f64 {
    let mut n = 0.0;
    for s in &poles.entries {
        let b = s.location.norm();
        if b > r {
            break;
        }
        let m = s.multiplicity as f64;
        n += if b == 0.0 { m * r.ln() } else { m * (r / b).ln() };
    }
    n
}

/// `N(r, f) = sum_{0<|b|<=r} log(r/|b|) + n(0) log r`.
pub fn counting(f: &MeroExpr, r: f64) -> Result<f64, NevanlinnaError> {
    check_radius(r)?;
    Ok(counting_from(&f.poles_in_disk(r)?, r))
}

/// `T(r, f) = m(r, f) + N(r, f)`.
pub fn characteristic(f: &MeroExpr, r: f64) -> Result<f64, NevanlinnaError> {
    check_radius(r)?;
    let poles = poles_for_radius(f, r)?;
    let c = characteristic_with(f, r, &poles);
    if c.m.converged {
        Ok(c.t)
    } else {
        Err(NevanlinnaError::NoConvergence {
            estimate: c.t,
            nodes: c.m.nodes,
        })
    }
}

/// Outcome of the circle search for the `K T(3R)` bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleBound {
    pub r: f64,
    pub max_logplus: f64,
    pub bound: f64,
}

const WITNESS_CIRCLES: usize = 64;
const WITNESS_CLEARANCE: f64 = 1e-6;

/// First `r` on a 64-point grid in `(R, 2R)` with
/// `max_{|z|=r} log+|f| <= K T(3R, f)`.
pub fn circle_bound_witness_with(
    f: &MeroExpr,
    big_r: f64,
    k_const: f64,
) -> Result<CircleBound, NevanlinnaError> {
    check_radius(big_r)?;
    let bound = k_const * characteristic(f, 3.0 * big_r)?;
    let poles = f.poles_in_disk(2.0 * big_r + 1.0)?;
    let mut best = f64::INFINITY;
    for j in 1..=WITNESS_CIRCLES {
        let r = big_r * (1.0 + j as f64 / (WITNESS_CIRCLES + 1) as f64);
        if poles.circle_clearance(r) < WITNESS_CLEARANCE {
            continue;
        }
        let max_logplus = max_log_modulus(f, r).log_value.max(0.0);
        if max_logplus <= bound {
            return Ok(CircleBound {
                r,
                max_logplus,
                bound,
            });
        }
        best = best.min(max_logplus);
    }
    Err(NevanlinnaError::NotFound(big_r, best, bound))
}

/// [`circle_bound_witness_with`] at `K = 24`.
pub fn circle_bound_witness(f: &MeroExpr, big_r: f64) -> Result<CircleBound, NevanlinnaError> {
    circle_bound_witness_with(f, big_r, 24.0)
}
