//! Circle averages of `log+|f|` by adaptive Simpson refinement.

use crate::expr::{ExtValue, MeroExpr, SingularityList, OVERFLOW_LOG};
use num_complex::Complex64;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Poles closer than this (absolute distance) to the circle get a dense
/// set of breakpoints.
const NEAR_POLE_DISTANCE: f64 = 4.0;
/// Poles this close also get their logarithmic peak subtracted.
const SUBTRACT_DISTANCE: f64 = 0.1;
const MAX_SUBTRACTED: usize = 16;
/// How far the compensating charge sits beyond a subtracted pole.
const DIPOLE_OFFSET: f64 = 0.25;
const BREAKPOINT_ARC: f64 = 0.25;
const BREAKPOINTS_PER_SIDE: i32 = 16;
/// Bisection steps when locating a crossing of `|f| = 1`.
const CROSSING_STEPS: usize = 60;
/// Panels are not split below this angular width. Near zeros of functions
/// summed with heavy cancellation `log|f|` is rounding noise at this scale;
/// the error estimates of such panels are charged against the tolerance.
const MIN_PANEL: f64 = TWO_PI / (1u64 << 24) as f64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_nodes: usize,
    pub initial_panels: usize,
    /// Extra uniform bisections of every accepted panel; one level doubles
    /// the node count.
    pub extra_levels: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-13,
            max_nodes: 1 << 20,
            initial_panels: 256,
            extra_levels: 0,
        }
    }
}

/// A circle average together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub nodes: usize,
    pub converged: bool,
}

struct Integrand<'a> {
    f: &'a MeroExpr,
    r: f64,
    /// Subtracted poles as (location, compensating charge, multiplicity).
    /// Each contributes `m (log|z - b| - log|z - c|)`, which cancels the
    /// peak of `log+|f|` at `b` and decays away from it.
    near: Vec<(Complex64, Complex64, f64)>,
}

impl Integrand<'_> {
    fn log_abs(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(self.r, theta);
        match self.f.eval_ext(z) {
            ExtValue::Finite(e) => e.log_abs(),
            ExtValue::Pole | ExtValue::Overflow => OVERFLOW_LOG,
        }
    }

    fn with_log(&self, theta: f64, l: f64) -> f64 {
        let z = Complex64::from_polar(self.r, theta);
        let s: f64 = self
            .near
            .iter()
            .map(|(b, c, m)| m * ((z - b).norm() / (z - c).norm()).ln())
            .sum();
        l.max(0.0) + s
    }

    /// Integrand value and `log+|f|`.
    fn at(&self, theta: f64) -> (f64, f64) {
        let l = self.log_abs(theta);
        (self.with_log(theta, l), l.max(0.0))
    }

    /// Circle mean of the subtracted terms.
    fn correction(&self) -> f64 {
        -self
            .near
            .iter()
            .map(|(b, c, m)| m * (self.r.max(b.norm()) / self.r.max(c.norm())).ln())
            .sum::<f64>()
    }

    /// A point in `(a, b)` where `log|f|` changes sign, `pa` being the sign
    /// at `a`. Returns the angle and the evaluations used.
    fn crossing(&self, mut a: f64, mut b: f64, pa: bool) -> (f64, usize) {
        let mut used = 0;
        for _ in 0..CROSSING_STEPS {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            used += 1;
            if (self.log_abs(m) > 0.0) == pa {
                a = m;
            } else {
                b = m;
            }
        }
        (0.5 * (a + b), used)
    }
}

fn breakpoints(r: f64, poles: &SingularityList, initial: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..initial)
        .map(|j| TWO_PI * j as f64 / initial as f64)
        .collect();
    let step = BREAKPOINT_ARC / r;
    if step < TWO_PI / initial as f64 {
        for s in &poles.entries {
            if (s.location.norm() - r).abs() < NEAR_POLE_DISTANCE {
                let phi = s.location.arg();
                for k in -BREAKPOINTS_PER_SIDE..=BREAKPOINTS_PER_SIDE {
                    pts.push((phi + k as f64 * step).rem_euclid(TWO_PI));
                }
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    pts
}

fn subtracted_poles(r: f64, poles: &SingularityList) -> Vec<(Complex64, Complex64, f64)> {
    let mut near: Vec<(f64, Complex64, f64)> = poles
        .entries
        .iter()
        .filter_map(|s| {
            let d = (s.location.norm() - r).abs();
            let keep = d < SUBTRACT_DISTANCE && s.location.norm() > 0.0;
            keep.then_some((d, s.location, s.multiplicity as f64))
        })
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    near.truncate(MAX_SUBTRACTED);
    near.into_iter()
        .map(|(_, b, m)| {
            // pushed radially away from the circle
            let rho = b.norm();
            let shifted = if rho >= r { rho + DIPOLE_OFFSET } else { (rho - DIPOLE_OFFSET).max(0.0) };
            (b, b * (shifted / rho), m)
        })
        .collect()
}

/// `(1/2pi) int log+|f(r e^{i theta})| d theta`. `poles` must cover the
/// circle; the circle itself must keep clear of them.
pub fn proximity_with(
    f: &MeroExpr,
    r: f64,
    poles: &SingularityList,
    opts: &QuadratureOptions,
) -> Quadrature {
    let g = Integrand {
        f,
        r,
        near: subtracted_poles(r, poles),
    };
    let pts = breakpoints(r, poles, opts.initial_panels.max(4));
    let vals: Vec<(f64, f64)> = pts.iter().map(|&t| g.at(t)).collect();
    let mut nodes = pts.len();
    let n = pts.len();
    let end = |i: usize| if i + 1 == n { TWO_PI + pts[0] } else { pts[i + 1] };
    let estimate: f64 = (0..n)
        .map(|i| 0.5 * (end(i) - pts[i]) * (vals[i].0 + vals[(i + 1) % n].0))
        .sum();
    let tol_total = (opts.rel_tol * estimate.abs()).max(opts.abs_tol);
    // kinks of log+ where it stays below this cannot matter, and there the
    // sign of log|f| may be rounding noise
    let kink_floor = tol_total / TWO_PI;

    let mut total = 0.0;
    let mut capped_any = false;
    let mut floor_error = 0.0;
    // (a, b, f(a), f(b), log+|f(a)|, log+|f(b)|, extra levels done)
    let mut stack: Vec<(f64, f64, f64, f64, f64, f64, u32)> = (0..n)
        .rev()
        .map(|i| {
            let (fa, pa) = vals[i];
            let (fb, pb) = vals[(i + 1) % n];
            (pts[i], end(i), fa, fb, pa, pb, 0)
        })
        .collect();
    while let Some((a, b, fa, fb, pa, pb, extra)) = stack.pop() {
        let h = b - a;
        if (pa > 0.0) != (pb > 0.0) && pa.max(pb) > kink_floor && nodes < opts.max_nodes {
            // split at the kink of log+ so both halves are smooth
            let (c, used) = g.crossing(a, b, pa > 0.0);
            nodes += used + 1;
            let fc = g.with_log(c, 0.0);
            stack.push((c, b, fc, fb, pb, pb, extra));
            stack.push((a, c, fa, fc, pa, pa, extra));
            continue;
        }
        let m = 0.5 * (a + b);
        let ((fl, pl), (fm, pm), (fr, pr)) = (g.at(0.5 * (a + m)), g.at(m), g.at(0.5 * (m + b)));
        nodes += 3;
        // Simpson on the panel and on its halves
        let s1 = h / 6.0 * (fa + 4.0 * fm + fb);
        let s2 = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
        let err = (s2 - s1).abs() / 15.0;
        let side = pa > 0.0;
        let hidden_kink = [pl, pm, pr].iter().any(|&p| (p > 0.0) != side)
            && pa.max(pb).max(pl).max(pm).max(pr) > kink_floor;
        let accept = err <= tol_total * h / TWO_PI && !hidden_kink;
        let capped = nodes >= opts.max_nodes;
        if (accept && extra >= opts.extra_levels) || capped || h < MIN_PANEL {
            if !accept {
                capped_any |= capped;
                floor_error += err;
            }
            total += s2 + (s2 - s1) / 15.0;
            continue;
        }
        let next = if accept { extra + 1 } else { extra };
        stack.push((m, b, fm, fb, pm, pb, next));
        stack.push((a, m, fa, fm, pa, pm, next));
    }
    Quadrature {
        value: (total / TWO_PI + g.correction()).max(0.0),
        nodes,
        converged: !capped_any && floor_error <= tol_total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn m(s: &str, r: f64) -> Quadrature {
        let f = parse(s).unwrap();
        let poles = f.poles_in_disk(r * 1.5).unwrap();
        proximity_with(&f, r, &poles, &QuadratureOptions::default())
    }

    #[test]
    fn closed_forms() {
        let q = m("exp(z)", PI);
        assert!(q.converged);
        assert!((q.value - 1.0).abs() < 1e-8);
        assert_eq!(m("1/z", 2.0).value, 0.0);
        assert!((m("z^2", 2.0).value - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn pole_near_the_circle() {
        // m(r, 1/(z-b)) = log+ (1/|r - b|) averaged; for r < |b| it is the
        // mean of max(0, -log|z - b|). Compare with brute force.
        let f = parse("1/(z - 1.001)").unwrap();
        let poles = f.poles_in_disk(2.0).unwrap();
        let q = proximity_with(&f, 1.0, &poles, &QuadratureOptions::default());
        let n = 4_000_000;
        let brute: f64 = (0..n)
            .map(|j| {
                let z = Complex64::from_polar(1.0, TWO_PI * (j as f64 + 0.5) / n as f64);
                (-(z - 1.001).norm().ln()).max(0.0)
            })
            .sum::<f64>()
            / n as f64;
        assert!((q.value - brute).abs() < 1e-6, "{} {}", q.value, brute);
    }
}
