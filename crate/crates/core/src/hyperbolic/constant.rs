use super::domain::{hyperbolic_density, Domain};
use super::{ser_complex, HyperbolicError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Log-radial grid around the omitted point: `radial` radii from `rho_min`
/// to `rho_max`, `angular` directions each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub rho_min: f64,
    pub rho_max: f64,
    pub radial: usize,
    pub angular: usize,
    /// Pattern-search rounds around the best sample.
    pub refine: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            rho_min: 1e-12,
            rho_max: 1e3,
            radial: 64,
            angular: 64,
            refine: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainConstant {
    #[serde(serialize_with = "ser_complex")]
    pub a: Complex64,
    /// Least sampled `|z - a| lambda_W(z)`, using the lower density bound
    /// where only an interval is known.
    pub value: f64,
    #[serde(serialize_with = "ser_complex")]
    pub argmin: Complex64,
    pub samples: usize,
    /// `(rho, least value on the circle |z - a| = rho)` for each grid radius
    /// that meets the domain.
    pub by_radius: Vec<(f64, f64)>,
}

fn weighted(w: &Domain, a: Complex64, z: Complex64) -> Option<f64> {
    if !w.contains(z) {
        return None;
    }
    hyperbolic_density(w, z).ok().map(|s| (z - a).norm() * s.lower)
}

/// `C_W(a) = inf |z - a| lambda_W(z)` over sampled `z`, for `a` outside `W`.
pub fn domain_constant(w: &Domain, a: Complex64, s: &Sampling) -> Result<DomainConstant, HyperbolicError> {
    w.validate()?;
    if w.contains(a) {
        return Err(HyperbolicError::InvalidParams(format!("{a} lies in the domain")));
    }
    if !(s.rho_min > 0.0 && s.rho_max > s.rho_min && s.radial >= 2 && s.angular >= 1) {
        return Err(HyperbolicError::InvalidParams("sampling grid is empty".to_string()));
    }
    let q = (s.rho_max / s.rho_min).powf(1.0 / (s.radial - 1) as f64);
    let mut best = (f64::INFINITY, a, 0.0, 0.0);
    let mut count = 0;
    let mut by_radius = Vec::new();
    for i in 0..s.radial {
        let rho = s.rho_min * q.powi(i as i32);
        let mut ring = f64::INFINITY;
        for j in 0..s.angular {
            let th = 2.0 * PI * j as f64 / s.angular as f64;
            let z = a + Complex64::from_polar(rho, th);
            if let Some(v) = weighted(w, a, z) {
                count += 1;
                ring = ring.min(v);
                if v < best.0 {
                    best = (v, z, rho.ln(), th);
                }
            }
        }
        if ring.is_finite() {
            by_radius.push((rho, ring));
        }
    }
    if !best.0.is_finite() {
        return Err(HyperbolicError::InvalidParams("no sample falls in the domain".to_string()));
    }
    let (mut dl, mut dt) = (q.ln(), 2.0 * PI / s.angular as f64);
    for _ in 0..s.refine {
        let mut moved = false;
        for (el, et) in [(dl, 0.0), (-dl, 0.0), (0.0, dt), (0.0, -dt)] {
            let (l, t) = (best.2 + el, best.3 + et);
            let rho = l.exp();
            if rho < s.rho_min || rho > s.rho_max {
                continue;
            }
            let z = a + Complex64::from_polar(rho, t);
            if let Some(v) = weighted(w, a, z) {
                count += 1;
                if v < best.0 {
                    best = (v, z, l, t);
                    moved = true;
                }
            }
        }
        if !moved {
            dl *= 0.5;
            dt *= 0.5;
        }
    }
    Ok(DomainConstant {
        a,
        value: best.0,
        argmin: best.1,
        samples: count,
        by_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_constants() {
        let d = Domain::unit_disk();
        let c = domain_constant(&d, Complex64::new(1.0, 0.0), &Sampling::default()).unwrap();
        assert!((c.value - 0.5).abs() < 1e-3, "{}", c.value);
        let c = domain_constant(&d, Complex64::new(3.0, 0.0), &Sampling::default()).unwrap();
        // min of (3 - x)/(1 - x^2) on (-1, 1)
        let oracle = (0..200_000)
            .map(|j| -1.0 + 2.0 * (j as f64 + 0.5) / 200_000.0)
            .map(|x: f64| (3.0 - x) / (1.0 - x * x))
            .fold(f64::INFINITY, f64::min);
        assert!(c.value >= 0.5 && (c.value - oracle).abs() < 1e-6, "{} {oracle}", c.value);
    }
}
