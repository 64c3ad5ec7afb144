//! Conditions stated through growth indicators of a radial profile.

use super::{CriteriaError, CriterionVerdict, Witness};
use crate::expr::MeroExpr;
use crate::nevanlinna::{growth_summary, max_log_modulus, GrowthSummary, RadialProfile};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// "Lower order is positive" is decided as `mu > LOWER_ORDER_FLOOR`.
pub const LOWER_ORDER_FLOOR: f64 = 0.05;
const RATIO_SPREAD: f64 = 0.05;
const POWERS: [u32; 3] = [2, 4, 8];

fn single(condition: &str, w: Witness, what: &str) -> CriterionVerdict {
    let mut v = CriterionVerdict::new(condition);
    if !(w.margin > 0.0) {
        v.fail(w.r, format!("{what}: {:.6} is not above {:.6}", w.lhs, w.rhs));
    }
    v.witnesses.push(w);
    v
}

fn lower_order_part(g: &GrowthSummary) -> CriterionVerdict {
    let r = g.fit_window.1;
    single(
        "lower-order-positive",
        Witness::new(r, r, g.lower_order, LOWER_ORDER_FLOOR),
        "lower order estimate against its floor",
    )
}

/// Order below 1/2, positive lower order, and deficiency of the poles above
/// `1 - cos(pi lambda)`, all on the estimates of [`growth_summary`].
pub fn check_order_deficiency(profile: &RadialProfile) -> Result<CriterionVerdict, CriteriaError> {
    let g = growth_summary(profile)?;
    let r = g.fit_window.1;
    let parts = vec![
        single("order-below-half", Witness::new(r, r, 0.5, g.order), "1/2 against the order estimate"),
        lower_order_part(&g),
        single(
            "deficiency",
            Witness::new(r, r, g.deficiency, 1.0 - (PI * g.order).cos()),
            "deficiency estimate against 1 - cos(pi order)",
        ),
    ];
    let w = parts.iter().flat_map(|p| p.witnesses.clone()).collect();
    Ok(CriterionVerdict::all_of("order-deficiency", parts, w))
}

fn require_entire(f: &MeroExpr, profile: &RadialProfile) -> Result<(), CriteriaError> {
    let poles = f.poles_in_disk(profile.grid.r_max)?;
    if poles.entries.is_empty() {
        Ok(())
    } else {
        Err(CriteriaError::NotEntire(poles.entries.len()))
    }
}

fn doubling_ratio(f: &MeroExpr, profile: &RadialProfile) -> CriterionVerdict {
    let top = profile.grid.r_max;
    let mut v = CriterionVerdict::new("doubling-ratio");
    let tail: Vec<_> = profile.samples.iter().filter(|s| s.r >= top / 10.0 * (1.0 - 1e-12)).collect();
    let rows: Vec<Witness> = tail
        .par_iter()
        .map(|s| {
            let c = max_log_modulus(f, 2.0 * s.r).log_value / s.log_m;
            Witness::new(s.r, 2.0 * s.r, c, 1.0)
        })
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for w in &rows {
        let ok = w.lhs.is_finite() && w.lhs > 0.0;
        if !ok {
            v.fail(w.r, format!("log M(2r)/log M(r) = {} is not a positive finite ratio", w.lhs));
        }
        lo = lo.min(w.lhs);
        hi = hi.max(w.lhs);
    }
    if let Some(last) = rows.last() {
        if hi - lo > RATIO_SPREAD {
            v.fail(rows[0].r, format!("ratio varies by {:.4} over the last decade", hi - lo));
        }
        if last.margin < 0.0 {
            v.fail(last.r, format!("ratio settles at {:.6}, below 1", last.lhs));
        }
    } else {
        v.fail(top, "no samples in the last decade".to_string());
    }
    v.witnesses = rows;
    v
}

fn log_derivative(profile: &RadialProfile, warmup: f64) -> CriterionVerdict {
    let s = &profile.samples;
    let mut v = CriterionVerdict::new("log-derivative");
    let start = (s.len() / 2).max(1);
    for j in start..s.len().saturating_sub(1) {
        let x = s[j].r.ln();
        if s[j].r < warmup {
            continue;
        }
        let phi = s[j].log_m;
        let dphi = (s[j + 1].log_m - s[j - 1].log_m) / (s[j + 1].r.ln() - s[j - 1].r.ln());
        let c = x * dphi / phi;
        let w = Witness::new(s[j].r, s[j].r, c, 1.0);
        if !(w.margin > 0.0 && c.is_finite() && phi > 0.0) {
            v.fail(s[j].r, format!("x phi'(x)/phi(x) = {c:.6} is not above 1"));
        }
        v.witnesses.push(w);
    }
    if v.witnesses.is_empty() {
        v.fail(profile.grid.r_max, "too few samples for a central difference".to_string());
    }
    v
}

fn power_growth(f: &MeroExpr, profile: &RadialProfile, warmup: f64) -> CriterionVerdict {
    let parts = POWERS
        .iter()
        .map(|&m| {
            let name = format!("power-growth-m{m}");
            let mut v = CriterionVerdict::new(&name);
            let rows: Vec<(f64, f64, f64)> = profile
                .samples
                .par_iter()
                .filter(|s| s.r >= warmup)
                .map(|s| {
                    let rm = s.r.powi(m as i32);
                    (s.r, rm, max_log_modulus(f, rm).log_value)
                })
                .collect();
            let mut skipped = 0;
            for ((r, rm, lhs), s) in rows.into_iter().zip(profile.samples.iter().filter(|s| s.r >= warmup)) {
                if !lhs.is_finite() {
                    skipped += 1;
                    continue;
                }
                let w = Witness::new(r, rm, lhs, (m * m) as f64 * s.log_m);
                if !(w.margin >= 0.0) {
                    v.fail(r, format!("log M(r^{m}) = {lhs:.6e} is below {} log M(r) = {:.6e}", m * m, w.rhs));
                }
                v.witnesses.push(w);
            }
            if v.witnesses.is_empty() {
                v.fail(
                    profile.grid.r_max,
                    format!("log M(r^{m}) out of range at all {skipped} scanned radii"),
                );
            }
            v
        })
        .collect();
    CriterionVerdict::all_of("power-growth", parts, Vec::new())
}

/// The four growth conditions for entire functions: stable doubling ratio
/// of `log M`, logarithmic derivative of `log M(e^x)` beyond `c/x` with
/// `c > 1`, `log M(r^m) >= m^2 log M(r)` for `m` in {2, 4, 8}, and positive
/// lower order.
pub fn check_entire_conditions(
    f: &MeroExpr,
    profile: &RadialProfile,
    warmup: f64,
) -> Result<Vec<CriterionVerdict>, CriteriaError> {
    require_entire(f, profile)?;
    let g = growth_summary(profile)?;
    Ok(vec![
        doubling_ratio(f, profile),
        log_derivative(profile, warmup),
        power_growth(f, profile, warmup),
        lower_order_part(&g),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLink {
    pub link: String,
    /// Both sides as natural logarithms.
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainTrace {
    pub m: f64,
    pub epsilon: f64,
    pub r: f64,
    pub order: f64,
    pub lower_order: f64,
    pub applicable: bool,
    pub links: Vec<ChainLink>,
    pub holds: bool,
}

/// The chain `log M(r^m) > (r^m)^(mu-eps) > r^eps r^(lambda+eps) >= r^eps
/// log M(r)` at the top radius of `profile`, with `lambda`, `mu` from
/// [`growth_summary`]. Inapplicable unless `(mu - eps) m > lambda + 2 eps`.
pub fn chain_check(
    f: &MeroExpr,
    profile: &RadialProfile,
    m: f64,
    epsilon: f64,
) -> Result<ChainTrace, CriteriaError> {
    if !(m > 1.0 && m.is_finite() && epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CriteriaError::InvalidParams(format!(
            "chain needs m > 1 and epsilon > 0, got m = {m}, epsilon = {epsilon}"
        )));
    }
    let g = growth_summary(profile)?;
    let top = profile.samples.last().expect("growth summary needs samples");
    let (lam, mu) = (g.order, g.lower_order);
    let mut trace = ChainTrace {
        m,
        epsilon,
        r: top.r,
        order: lam,
        lower_order: mu,
        applicable: (mu - epsilon) * m > lam + 2.0 * epsilon,
        links: Vec::new(),
        holds: false,
    };
    if !trace.applicable {
        return Ok(trace);
    }
    let lr = top.r.ln();
    let big = max_log_modulus(f, top.r.powf(m)).log_value;
    let link = |name: &str, lhs: f64, rhs: f64, strict: bool| ChainLink {
        link: name.to_string(),
        lhs,
        rhs,
        holds: lhs.is_finite() && rhs.is_finite() && if strict { lhs > rhs } else { lhs >= rhs },
    };
    trace.links = vec![
        link("log M(r^m) > (r^m)^(mu-eps)", big.ln(), m * (mu - epsilon) * lr, true),
        link(
            "(r^m)^(mu-eps) > r^eps r^(lambda+eps)",
            m * (mu - epsilon) * lr,
            (lam + 2.0 * epsilon) * lr,
            true,
        ),
        link("r^(lambda+eps) >= log M(r)", (lam + epsilon) * lr, top.log_m.ln(), false),
    ];
    trace.holds = trace.links.iter().all(|l| l.holds);
    Ok(trace)
}
