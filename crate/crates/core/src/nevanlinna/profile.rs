use super::modulus::saturate;
use super::{characteristic_with, max_log_modulus, min_log_modulus, NevanlinnaError};
use crate::expr::{MeroExpr, SingularityList};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

/// Geometric radius grid `r_min * ratio^j <= r_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub ratio: f64,
}

impl Default for RadiusGrid {
    fn default() -> Self {
        RadiusGrid {
            r_min: 1.0,
            r_max: 65536.0,
            ratio: 2f64.powf(0.125),
        }
    }
}

impl RadiusGrid {
    pub fn new(r_min: f64, r_max: f64, ratio: f64) -> Result<Self, NevanlinnaError> {
        let g = RadiusGrid {
            r_min,
            r_max,
            ratio,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), NevanlinnaError> {
        let bad = |m: &str| Err(NevanlinnaError::InvalidGrid(m.to_string()));
        if !(self.r_min.is_finite() && self.r_min > 0.0) {
            return bad("r_min must be positive");
        }
        if !(self.r_max.is_finite() && self.r_max >= self.r_min) {
            return bad("r_max must be finite and at least r_min");
        }
        if !(self.ratio.is_finite() && self.ratio > 1.0) {
            return bad("ratio must exceed 1");
        }
        if (self.r_max / self.r_min).ln() / self.ratio.ln() > 1e6 {
            return bad("grid has more than a million radii");
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut j = 0;
        loop {
            let r = self.r_min * self.ratio.powi(j);
            if r > self.r_max * (1.0 + 1e-12) {
                break;
            }
            out.push(r);
            j += 1;
        }
        out
    }

    /// `log10(r_max / r_min)`.
    pub fn decades(&self) -> f64 {
        (self.r_max / self.r_min).log10()
    }
}

/// Nevanlinna data on one circle. Serializes as `{r, m, N, T, L, M}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialSample {
    pub r: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "T")]
    pub t: f64,
    /// `L(r)` saturated to `[0, 1e300]`.
    #[serde(rename = "L", serialize_with = "finite_or_cap")]
    pub l: f64,
    /// `M(r)` saturated to `[0, 1e300]`.
    #[serde(rename = "M", serialize_with = "finite_or_cap")]
    pub big_m: f64,
    #[serde(skip)]
    pub log_l: f64,
    #[serde(skip)]
    pub log_m: f64,
    #[serde(skip)]
    pub quadrature_nodes: usize,
    #[serde(skip)]
    pub converged: bool,
    /// Radius actually used for `m`, `L`, `M` minus the nominal radius.
    #[serde(skip)]
    pub shift: f64,
}

fn finite_or_cap<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(if x.is_finite() { *x } else { 1e300 })
}

/// Samples over a radius grid for one function.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub function: String,
    pub grid: RadiusGrid,
    pub samples: Vec<RadialSample>,
}

impl Serialize for RadialProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.samples.serialize(s)
    }
}

impl RadialProfile {
    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.r).collect()
    }

    /// Sample with the largest radius not exceeding `r`.
    pub fn at_or_below(&self, r: f64) -> Option<&RadialSample> {
        self.samples.iter().rev().find(|s| s.r <= r * (1.0 + 1e-12))
    }
}

/// All functionals at nominal radius `r`; `poles` must cover `|z| <= r + 5`.
pub fn radial_sample(f: &MeroExpr, r: f64, poles: &SingularityList) -> RadialSample {
    let c = characteristic_with(f, r, poles);
    let (q, n, rr) = (c.m, c.n, c.radius);
    let lo = min_log_modulus(f, rr);
    let hi = max_log_modulus(f, rr);
    RadialSample {
        r,
        m: q.value,
        n,
        t: q.value + n,
        l: saturate(lo.log_value),
        big_m: saturate(hi.log_value),
        log_l: lo.log_value,
        log_m: hi.log_value,
        quadrature_nodes: q.nodes,
        converged: q.converged,
        shift: rr - r,
    }
}

/// Profile of `f` over `grid`; radii are processed in parallel and assembled
/// in grid order.
pub fn radial_profile(
    f: &MeroExpr,
    function: &str,
    grid: &RadiusGrid,
) -> Result<RadialProfile, NevanlinnaError> {
    grid.validate()?;
    let radii = grid.radii();
    let poles = f.poles_in_disk(grid.r_max * 1.01 + 5.0)?;
    let samples = radii
        .par_iter()
        .map(|&r| radial_sample(f, r, &poles))
        .collect();
    Ok(RadialProfile {
        function: function.to_string(),
        grid: *grid,
        samples,
    })
}
