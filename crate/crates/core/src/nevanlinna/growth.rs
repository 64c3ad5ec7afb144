use super::{NevanlinnaError, RadialProfile};
use serde::Serialize;

const MIN_SAMPLES: usize = 16;
const MIN_DECADES: f64 = 2.0;
const MIN_WINDOW: usize = 8;

/// Finite-window estimates of the order, lower order and deficiency at
/// infinity. These are grid estimates of a limsup / liminf, not limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthSummary {
    /// Largest least-squares slope of `log T` against `log r` over the
    /// trailing windows.
    pub order: f64,
    /// Smallest such slope.
    pub lower_order: f64,
    /// Smallest `m/T` over the trailing half.
    pub deficiency: f64,
    pub fit_window: (f64, f64),
    /// Largest root-mean-square residual of the window fits.
    pub residual: f64,
    pub windows: usize,
}

/// Slope and RMS residual of the least-squares line through `(x, y)`.
fn fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - my - slope * (a - mx);
            e * e
        })
        .sum();
    (slope, (ss / n).sqrt())
}

pub fn growth_summary(profile: &RadialProfile) -> Result<GrowthSummary, NevanlinnaError> {
    let pts: Vec<_> = profile
        .samples
        .iter()
        .filter(|s| s.t > 0.0 && s.t.is_finite())
        .collect();
    // each sample stands for one grid cell
    let decades = match (pts.first(), pts.last()) {
        (Some(a), Some(b)) => (b.r / a.r * profile.grid.ratio).log10(),
        _ => 0.0,
    };
    if pts.len() < MIN_SAMPLES || decades < MIN_DECADES - 1e-9 {
        return Err(NevanlinnaError::InsufficientSpan {
            samples: pts.len(),
            decades,
            need_samples: MIN_SAMPLES,
            need_decades: MIN_DECADES,
        });
    }
    let tail = &pts[pts.len() / 2..];
    let x: Vec<f64> = tail.iter().map(|s| s.r.ln()).collect();
    let y: Vec<f64> = tail.iter().map(|s| s.t.ln()).collect();
    let w = (tail.len() / 2).max(MIN_WINDOW).min(tail.len());
    let mut order = f64::NEG_INFINITY;
    let mut lower = f64::INFINITY;
    let mut residual: f64 = 0.0;
    let windows = tail.len() - w + 1;
    for i in 0..windows {
        let (slope, res) = fit(&x[i..i + w], &y[i..i + w]);
        order = order.max(slope);
        lower = lower.min(slope);
        residual = residual.max(res);
    }
    let deficiency = tail
        .iter()
        .map(|s| s.m / s.t)
        .fold(f64::INFINITY, f64::min)
        .clamp(0.0, 1.0);
    let order = order.max(0.0);
    Ok(GrowthSummary {
        order,
        lower_order: lower.clamp(0.0, order),
        deficiency,
        fit_window: (tail[0].r, tail[tail.len() - 1].r),
        residual,
        windows,
    })
}
