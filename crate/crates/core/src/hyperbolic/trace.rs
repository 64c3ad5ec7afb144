use super::{ser_complex, HyperbolicError};
use crate::expr::{MeroExpr, Value};
use crate::nevanlinna::characteristic;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const MAX_EXPONENT: u32 = 100_000;
/// `T(3R)` is only evaluated up to this radius (pole catalogs grow linearly
/// with the radius for functions with poles).
pub const TRACE_RADIUS_CAP_ENTIRE: f64 = 1e12;
pub const TRACE_RADIUS_CAP_POLES: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    pub alpha: f64,
    pub d: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

/// `k` least with `D^(k-1) alpha >= 1`; `h = d^k`; `m` least with
/// `D^((m-1)k-1) > K h^m`; `H = h^m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Derived {
    pub k: u32,
    pub h: f64,
    pub m: u32,
    #[serde(rename = "H")]
    pub big_h: f64,
}

pub fn derive_constants(p: &TraceParams) -> Result<Derived, HyperbolicError> {
    let bad = |m: String| Err(HyperbolicError::InvalidParams(m));
    if !(p.alpha > 0.0 && p.alpha < 1.0) {
        return bad(format!("alpha must lie in (0, 1), got {}", p.alpha));
    }
    if !(p.d > 1.0 && p.d.is_finite()) {
        return bad(format!("d must exceed 1, got {}", p.d));
    }
    if !(p.big_d > p.d && p.big_d.is_finite()) {
        return bad(format!("requires D > d, got D = {} and d = {}", p.big_d, p.d));
    }
    if !(p.k > 0.0 && p.k.is_finite()) {
        return bad(format!("K must be positive, got {}", p.k));
    }
    let k = (1..=MAX_EXPONENT)
        .find(|&k| p.big_d.powi(k as i32 - 1) * p.alpha >= 1.0)
        .ok_or_else(|| HyperbolicError::InvalidParams("no k below the search limit".to_string()))?;
    let h = p.d.powi(k as i32);
    let m = (1..=MAX_EXPONENT)
        .find(|&m| p.big_d.powi(((m - 1) * k) as i32 - 1) > p.k * h.powi(m as i32))
        .filter(|&m| h.powi(m as i32).is_finite())
        .ok_or_else(|| HyperbolicError::InvalidParams("H = h^m exceeds double range".to_string()))?;
    Ok(Derived {
        k,
        h,
        m,
        big_h: h.powi(m as i32),
    })
}

/// A polyline sampled uniformly on each segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub vertices: Vec<[f64; 2]>,
    pub per_segment: usize,
}

impl Curve {
    pub fn points(&self) -> Vec<Complex64> {
        let v: Vec<Complex64> = self.vertices.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        if v.len() < 2 {
            return v;
        }
        let n = self.per_segment.max(1);
        let mut out = Vec::new();
        for w in v.windows(2) {
            for j in 0..n {
                out.push(w[0] + (w[1] - w[0]) * (j as f64 / n as f64));
            }
        }
        out.push(*v.last().unwrap());
        out
    }
}

/// Images of the curve after `n` steps: `z_n` maximizes and `w_n`
/// minimizes `|f^n|` over the curve samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub n: usize,
    #[serde(serialize_with = "ser_complex")]
    pub z_n: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub w_n: Complex64,
    pub mod_z: f64,
    pub mod_w: f64,
    /// `ln mod_z > H ln mod_w`.
    pub separation_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceState {
    pub params: TraceParams,
    pub derived: Derived,
    /// `R_0, R_1, ...` while finite.
    pub radii: Vec<f64>,
    /// `ln R_n`, including the first one that leaves double range.
    pub log_radii: Vec<f64>,
    /// Why the recursion stopped before `n_max`, if it did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopped: Option<String>,
    pub steps: Vec<TraceStep>,
}

/// Computes `k, h, m, H`, runs `R_n = exp(K T(3 R_{n-1}))` from `R_0`, and
/// if a curve is given follows its images step by step.
pub fn proof_trace(
    f: &MeroExpr,
    params: &TraceParams,
    r0: f64,
    curve: Option<&Curve>,
    n_max: usize,
) -> Result<TraceState, HyperbolicError> {
    let derived = derive_constants(params)?;
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(HyperbolicError::InvalidParams(format!("R_0 must be positive, got {r0}")));
    }
    let cap = if f.is_entire() {
        TRACE_RADIUS_CAP_ENTIRE
    } else {
        TRACE_RADIUS_CAP_POLES
    };
    let mut radii = vec![r0];
    let mut log_radii = vec![r0.ln()];
    let mut stopped = None;
    for _ in 0..n_max {
        let prev = *radii.last().unwrap();
        if 3.0 * prev > cap {
            stopped = Some(format!("T(3R) is not evaluated beyond radius {cap:e}"));
            break;
        }
        let t = match characteristic(f, 3.0 * prev) {
            Ok(t) => t,
            Err(e) => {
                stopped = Some(format!("T(3R) failed: {e}"));
                break;
            }
        };
        let log_r = params.k * t;
        log_radii.push(log_r);
        let r = log_r.exp();
        if !(r.is_finite() && r <= crate::expr::OVERFLOW_MODULUS) {
            stopped = Some("overflow".to_string());
            break;
        }
        radii.push(r);
    }
    let mut steps = Vec::new();
    if let Some(c) = curve {
        let origin = c.points();
        let mut pts = origin.clone();
        'iter: for n in 1..=n_max {
            let mut next = Vec::with_capacity(pts.len());
            for &z in &pts {
                match f.eval(z) {
                    Value::Finite(w) => next.push(w),
                    _ => break 'iter,
                }
            }
            pts = next;
            let (mut lo, mut hi) = (0, 0);
            for (i, z) in pts.iter().enumerate() {
                if z.norm() < pts[lo].norm() {
                    lo = i;
                }
                if z.norm() > pts[hi].norm() {
                    hi = i;
                }
            }
            let (mod_z, mod_w) = (pts[hi].norm(), pts[lo].norm());
            steps.push(TraceStep {
                n,
                z_n: origin[hi],
                w_n: origin[lo],
                mod_z,
                mod_w,
                separation_holds: mod_z.ln() > derived.big_h * mod_w.ln(),
            });
        }
    }
    Ok(TraceState {
        params: *params,
        derived,
        radii,
        log_radii,
        stopped,
        steps,
    })
}

/// The arithmetic behind the universal constant `K <= 24`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantAudit {
    /// `1 / log(6/5)`, bounded by 6.
    pub inverse_log_six_fifths: f64,
    pub within_six: bool,
    /// `6 log(10 e)`.
    pub six_log_ten_e: f64,
    /// The larger of 9 and `6 log(10 e)`.
    pub dominant: f64,
    pub below_24: bool,
}

pub fn constant_audit() -> ConstantAudit {
    let a = 1.0 / (6.0f64 / 5.0).ln();
    let b = 6.0 * (10.0 * std::f64::consts::E).ln();
    let dominant = b.max(9.0);
    ConstantAudit {
        inverse_log_six_fifths: a,
        within_six: a <= 6.0,
        six_log_ten_e: b,
        dominant,
        below_24: dominant < 24.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::f64::consts::PI;

    fn params(alpha: f64, d: f64, big_d: f64) -> TraceParams {
        TraceParams {
            alpha,
            d,
            big_d,
            k: 24.0,
        }
    }

    #[test]
    fn derived_example() {
        let d = derive_constants(&params(0.5, 2.0, 4.0)).unwrap();
        assert_eq!((d.k, d.h, d.m, d.big_h), (2, 4.0, 6, 4096.0));
        let e = derive_constants(&params(0.99, 2.0, 2.0)).unwrap_err().to_string();
        assert!(e.contains("requires D > d"));
    }

    #[test]
    fn exp_radii() {
        let f = parse("exp(z)").unwrap();
        let t = proof_trace(&f, &params(0.5, 2.0, 4.0), 1.0, None, 5).unwrap();
        assert_eq!(t.radii.len(), 2);
        assert!((t.log_radii[1] - 72.0 / PI).abs() < 1e-6);
        assert!((t.radii[1] / 9.0e9 - 1.0).abs() < 0.01);
        assert_eq!(t.stopped.as_deref(), Some("overflow"));
    }

    #[test]
    fn audit_values() {
        let a = constant_audit();
        assert!((a.inverse_log_six_fifths - 5.4848).abs() < 1e-4);
        assert!((a.six_log_ten_e - 19.8155).abs() < 1e-4);
        assert!(a.within_six && a.below_24);
    }
}
