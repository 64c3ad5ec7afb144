//! Minimum and maximum modulus on circles.

use crate::expr::{ExtValue, MeroExpr};
use num_complex::Complex64;
use std::f64::consts::PI;

const MIN_SCAN_NODES: usize = 4096;
const MAX_SCAN_NODES: usize = 1 << 14;
const REFINED_BRACKETS: usize = 8;
const ANGLE_TOL: f64 = 1e-10;

/// An extreme of `|f|` on a circle, kept as a logarithm so it stays
/// meaningful far outside double range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleExtreme {
    /// `ln|f|` at the extreme; `+inf` when a pole or overflow was sampled
    /// for a maximum.
    pub log_value: f64,
    pub theta: f64,
}

impl CircleExtreme {
    pub fn z(&self, r: f64) -> Complex64 {
        Complex64::from_polar(r, self.theta)
    }

    /// `|f|` at the extreme, saturated to `[0, 1e300]`.
    pub fn modulus(&self) -> f64 {
        saturate(self.log_value)
    }
}

pub(crate) fn saturate(log_value: f64) -> f64 {
    if log_value >= crate::expr::OVERFLOW_LOG {
        crate::expr::OVERFLOW_MODULUS
    } else {
        log_value.exp()
    }
}

/// `ln|f(z)|`; poles and overflow are `+inf`.
fn log_modulus(f: &MeroExpr, z: Complex64) -> f64 {
    match f.eval_ext(z) {
        ExtValue::Finite(e) => e.log_abs(),
        ExtValue::Pole | ExtValue::Overflow => f64::INFINITY,
    }
}

fn golden_min(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while b - a > ANGLE_TOL {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    if gc <= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Scan size for minima on the circle of radius `r`: arc spacing about
/// 1/2, within fixed bounds. Zeros make narrow dips in `|f|`; maxima are
/// broad and use the smallest scan.
fn scan_nodes(r: f64) -> usize {
    let want = (4.0 * PI * r).ceil().min(MAX_SCAN_NODES as f64) as usize;
    want.next_power_of_two().clamp(MIN_SCAN_NODES, MAX_SCAN_NODES)
}

/// Minimizes `g` over the circle with `nodes` uniform samples followed by
/// golden-section refinement of the best local minima.
fn circle_min(g: &dyn Fn(f64) -> f64, nodes: usize) -> (f64, f64) {
    let h = 2.0 * PI / nodes as f64;
    let vals: Vec<f64> = (0..nodes).map(|j| g(j as f64 * h)).collect();
    let mut best = (0.0, vals[0]);
    for (j, &v) in vals.iter().enumerate() {
        if v < best.1 {
            best = (j as f64 * h, v);
        }
    }
    let mut minima: Vec<usize> = (0..nodes)
        .filter(|&j| {
            let prev = vals[(j + nodes - 1) % nodes];
            let next = vals[(j + 1) % nodes];
            vals[j] <= prev && vals[j] <= next && vals[j].is_finite()
        })
        .collect();
    minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    for &j in minima.iter().take(REFINED_BRACKETS) {
        let t = j as f64 * h;
        let (tm, vm) = golden_min(g, t - h, t + h);
        if vm < best.1 {
            best = (tm.rem_euclid(2.0 * PI), vm);
        }
    }
    best
}

/// `min_{|z|=r} |f|`, as a logarithm with the minimizing angle.
pub fn min_log_modulus(f: &MeroExpr, r: f64) -> CircleExtreme {
    let g = |t: f64| log_modulus(f, Complex64::from_polar(r, t));
    let (theta, log_value) = circle_min(&g, scan_nodes(r));
    CircleExtreme { log_value, theta }
}

/// `max_{|z|=r} |f|`, as a logarithm with the maximizing angle.
pub fn max_log_modulus(f: &MeroExpr, r: f64) -> CircleExtreme {
    // poles map to -inf and win the minimization
    let g = |t: f64| -log_modulus(f, Complex64::from_polar(r, t));
    let (theta, v) = circle_min(&g, MIN_SCAN_NODES);
    CircleExtreme {
        log_value: -v,
        theta,
    }
}

/// `L(r, f)`, saturated to `[0, 1e300]`.
pub fn min_modulus(f: &MeroExpr, r: f64) -> f64 {
    min_log_modulus(f, r).modulus()
}

/// `M(r, f)`, saturated to `[0, 1e300]`.
pub fn max_modulus(f: &MeroExpr, r: f64) -> f64 {
    max_log_modulus(f, r).modulus()
}
