use crate::nevanlinna::RadialProfile;
use serde::Serialize;

/// The sampled set `E = {r : log L(r) > alpha T(r)}` and its lower
/// logarithmic density over the trailing half of `(1, r_top]`, `r_top` being
/// the largest sampled radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub alpha: f64,
    pub intervals: Vec<(f64, f64)>,
    pub lower_log_density: f64,
}

/// Clip to `[1, r_max]`, drop empty pieces, sort and merge.
fn normalize(intervals: &[(f64, f64)], r_max: f64) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = intervals
        .iter()
        .map(|&(a, b)| (a.max(1.0), b.min(r_max)))
        .filter(|(a, b)| a < b)
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn log_measure(e: &[(f64, f64)], s: f64) -> f64 {
    e.iter()
        .map(|&(a, b)| (b.min(s).ln() - a.ln()).max(0.0))
        .sum()
}

/// `inf_s (int_{E cap (1, s]} dt/t) / log s` over `s` in
/// `[sqrt(r_max), r_max]`. Between intervals the ratio decreases and inside
/// them it increases, so the infimum is attained at the window ends or at a
/// left endpoint.
pub fn log_density(intervals: &[(f64, f64)], r_max: f64) -> f64 {
    if !(r_max > 1.0) {
        return 0.0;
    }
    let e = normalize(intervals, r_max);
    let s0 = r_max.sqrt();
    let mut candidates = vec![s0, r_max];
    candidates.extend(e.iter().map(|iv| iv.0).filter(|&a| a > s0 && a < r_max));
    let d = candidates
        .into_iter()
        .map(|s| log_measure(&e, s) / s.ln())
        .fold(1.0, f64::min);
    if d > 0.0 {
        d.min(1.0)
    } else {
        0.0
    }
}

/// `E` from the profile samples: each run of consecutive satisfying samples
/// becomes an interval reaching halfway (geometrically) to its neighbours.
pub fn density_report(profile: &RadialProfile, alpha: f64) -> DensityReport {
    let s = &profile.samples;
    let n = s.len();
    let inside: Vec<bool> = s.iter().map(|x| x.log_l > alpha * x.t).collect();
    let mut intervals = Vec::new();
    let mut j = 0;
    while j < n {
        if !inside[j] {
            j += 1;
            continue;
        }
        let start = j;
        while j + 1 < n && inside[j + 1] {
            j += 1;
        }
        let a = if start == 0 { s[0].r } else { (s[start - 1].r * s[start].r).sqrt() };
        let b = if j + 1 == n { s[j].r } else { (s[j].r * s[j + 1].r).sqrt() };
        intervals.push((a, b));
        j += 1;
    }
    let r_max = s.last().map_or(1.0, |x| x.r);
    let intervals = normalize(&intervals, r_max);
    DensityReport {
        alpha,
        lower_log_density: log_density(&intervals, r_max),
        intervals,
    }
}

pub fn alpha_sweep(profile: &RadialProfile, alphas: &[f64]) -> Vec<DensityReport> {
    alphas.iter().map(|&a| density_report(profile, a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_sets() {
        assert_eq!(log_density(&[(1.0, 1e6)], 1e6), 1.0);
        assert_eq!(log_density(&[], 1e6), 0.0);
    }

    #[test]
    fn alternating_dyadic_blocks() {
        let e: Vec<(f64, f64)> = (0..=10).map(|k| (4f64.powi(k), 2.0 * 4f64.powi(k))).collect();
        let d = log_density(&e, 2f64.powi(20));
        // direct midpoint integration of dt/t over the union
        let n = 40_000;
        let r_max = 2f64.powi(20);
        let mut worst: f64 = 1.0;
        for i in 0..=200 {
            let s = r_max.powf(0.5 + 0.5 * i as f64 / 200.0);
            let h = s.ln() / n as f64;
            let meas: f64 = (0..n)
                .map(|j| ((j as f64 + 0.5) * h).exp())
                .filter(|t| e.iter().any(|&(a, b)| *t >= a && *t <= b))
                .count() as f64
                * h;
            worst = worst.min(meas / s.ln());
        }
        assert!((d - 0.5).abs() < 0.05);
        assert!((d - worst).abs() < 5e-3, "{d} {worst}");
    }
}
