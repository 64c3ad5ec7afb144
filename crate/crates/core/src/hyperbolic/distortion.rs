use super::{ser_complex, HyperbolicError};
use crate::dynamics::{iterate_orbit, OrbitClass};
use crate::expr::{MeroExpr, Value};
use num_complex::Complex64;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

const ESCAPE_BUDGET: usize = 100_000;
const TREND_LEVEL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionReport {
    /// Largest `|f^n(z)| / |f^n(w)|` over the sample set and computed steps.
    pub max_ratio: f64,
    /// `max |f^n| / min |f^n|` over the sample set, for `n = 1, 2, ...`.
    pub ratios: Vec<f64>,
    /// Steps computed; fewer than requested when an orbit left double range.
    pub steps: usize,
    /// Least-squares slope of `log ratio` against `n` over the last half.
    pub trend_slope: f64,
    /// One-sided p-value of a positive slope.
    pub trend_p: f64,
    pub bounded: bool,
    #[serde(serialize_with = "ser_complex")]
    pub worst_z: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub worst_w: Complex64,
}

/// Slope and one-sided p-value for `H0: slope <= 0` by a t-test.
fn trend(y: &[f64]) -> (f64, f64) {
    let n = y.len();
    if n < 3 {
        return (0.0, 1.0);
    }
    let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    let se = (sse / (n - 2) as f64 / sxx).sqrt();
    if !(se > 1e-14 * slope.abs().max(1e-300)) {
        let p = if slope > 1e-12 { 0.0 } else { 1.0 };
        return (slope, p);
    }
    let t = StudentsT::new(0.0, 1.0, (n - 2) as f64).expect("positive degrees of freedom");
    (slope, 1.0 - t.cdf(slope / se))
}

/// Iterates every point of `samples` up to `n_max` times and tracks the
/// spread of `|f^n|` across the set. All samples must escape under `f`
/// (escape radius `escape`).
pub fn distortion_check(
    f: &MeroExpr,
    samples: &[Complex64],
    n_max: usize,
    escape: f64,
) -> Result<DistortionReport, HyperbolicError> {
    if samples.is_empty() || n_max == 0 {
        return Err(HyperbolicError::InvalidParams("need samples and n_max >= 1".to_string()));
    }
    for &z in samples {
        if iterate_orbit(f, z, ESCAPE_BUDGET, escape).class != OrbitClass::Escaping {
            return Err(HyperbolicError::NonEscaping(z));
        }
    }
    let mut pts = samples.to_vec();
    let mut ratios = Vec::new();
    let mut max_ratio: f64 = 1.0;
    let mut worst = (samples[0], samples[0]);
    'steps: for _ in 0..n_max {
        let mut next = Vec::with_capacity(pts.len());
        for &z in &pts {
            match f.eval(z) {
                Value::Finite(w) => next.push(w),
                _ => break 'steps,
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
        let r = pts[hi].norm() / pts[lo].norm();
        if !r.is_finite() {
            break;
        }
        if r > max_ratio {
            max_ratio = r;
            worst = (samples[hi], samples[lo]);
        }
        ratios.push(r);
    }
    let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let (trend_slope, trend_p) = trend(&logs[logs.len() / 2..]);
    Ok(DistortionReport {
        max_ratio,
        steps: ratios.len(),
        bounded: !(trend_slope > 0.0 && trend_p < TREND_LEVEL),
        ratios,
        trend_slope,
        trend_p,
        worst_z: worst.0,
        worst_w: worst.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn controls() {
        let fa = parse("z + 1 + exp(-z)").unwrap();
        let k: Vec<Complex64> = (0..20).map(|j| Complex64::new(5.0 + j as f64 / 19.0, 0.0)).collect();
        let r = distortion_check(&fa, &k, 30, 100.0).unwrap();
        assert!(r.bounded && r.max_ratio < 1.3, "{r:?}");
        let r = distortion_check(&fa, &[Complex64::new(5.5, 0.0); 2], 30, 100.0).unwrap();
        assert!(r.ratios.iter().all(|&x| x == 1.0) && r.bounded);
        let sq = parse("z^2").unwrap();
        let r = distortion_check(&sq, &[Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)], 10, 1e6).unwrap();
        assert!(!r.bounded, "{r:?}");
        assert!(matches!(
            distortion_check(&sq, &[Complex64::new(0.5, 0.0)], 10, 1e6),
            Err(HyperbolicError::NonEscaping(_))
        ));
    }
}
