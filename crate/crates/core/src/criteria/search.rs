//! Conditions that search for a radius `t` between `r` and `r^d`.

use super::{CriteriaError, CriterionParams, CriterionVerdict, Scan, Witness};
use crate::expr::{MeroExpr, SingularityList};
use crate::nevanlinna::{characteristic_with, max_log_modulus, min_log_modulus, poles_for_radius, RadiusGrid};
use rayon::prelude::*;

/// Candidate exponents are `s = 1 + k / T_LATTICE`, `t = r^s`. The lattice
/// does not depend on `d`.
pub const T_LATTICE: f64 = 64.0;
/// Subdivisions of a lattice step in the refinement around local maxima.
const FINE: i64 = 8;
/// Relative slack of the non-strict minimum-over-maximum inequality.
pub const MIN_OVER_MAX_SLACK: f64 = 1e-12;

fn in_range(s: f64, d: f64, open: bool) -> bool {
    if open {
        s > 1.0 && s < d - 1e-12
    } else {
        s >= 1.0 && s <= d + 1e-12
    }
}

fn lattice(k: i64) -> f64 {
    1.0 + k as f64 / T_LATTICE
}

fn exponents(d: f64, open: bool) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = if open { 1 } else { 0 };
    loop {
        let s = lattice(k);
        if !in_range(s, d, open) {
            break;
        }
        out.push(s);
        k += 1;
    }
    out
}

fn log_l(f: &MeroExpr, t: f64) -> f64 {
    let v = min_log_modulus(f, t).log_value;
    if v.is_finite() {
        v
    } else {
        f64::NEG_INFINITY
    }
}

/// Largest `log L(t)` found for `t = r^s`, `s` in `(1, d)` (open) or
/// `[1, d]`. Every lattice point is tried, and around each lattice local
/// maximum a `FINE` times finer lattice. Local maxima are judged against
/// lattice neighbours even outside the range, so the set of tried points
/// only grows with `d`. Independent of the right-hand side.
fn best_log_l(f: &MeroExpr, r: f64, d: f64, open: bool) -> (f64, f64) {
    let lr = r.ln();
    let at = |s: f64| log_l(f, (s * lr).exp());
    let ss = exponents(d, open);
    if ss.is_empty() {
        return (f64::NAN, f64::NEG_INFINITY);
    }
    let k0 = if open { 1 } else { 0 };
    let vals: Vec<f64> = ss.iter().map(|&s| at(s)).collect();
    let before = at(lattice(k0 - 1));
    let after = at(lattice(k0 + ss.len() as i64));
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for (&s, &v) in ss.iter().zip(&vals) {
        if v > best.1 {
            best = ((s * lr).exp(), v);
        }
    }
    let n = vals.len();
    for i in 0..n {
        let prev = if i == 0 { before } else { vals[i - 1] };
        let next = if i + 1 == n { after } else { vals[i + 1] };
        if !(vals[i].is_finite() && vals[i] >= prev && vals[i] >= next) {
            continue;
        }
        let k = k0 + i as i64;
        for j in (k - 1) * FINE + 1..(k + 1) * FINE {
            if j % FINE == 0 {
                continue;
            }
            let s = 1.0 + j as f64 / (T_LATTICE * FINE as f64);
            if !in_range(s, d, open) {
                continue;
            }
            let v = at(s);
            if v > best.1 {
                best = ((s * lr).exp(), v);
            }
        }
    }
    best
}

struct Context<'a> {
    f: &'a MeroExpr,
    poles: SingularityList,
}

impl<'a> Context<'a> {
    fn new(f: &'a MeroExpr, radius: f64) -> Result<Self, CriteriaError> {
        Ok(Context {
            f,
            poles: poles_for_radius(f, radius)?,
        })
    }

    fn t(&self, r: f64) -> (f64, bool) {
        let c = characteristic_with(self.f, r, &self.poles);
        (c.t, c.m.converged)
    }
}

fn fmt_t_note(converged: bool) -> &'static str {
    if converged {
        ""
    } else {
        " (T not converged)"
    }
}

/// `log L(t) > coef T(r)` for some `t` in `(r, r^d)` or `[r, r^d]`.
fn t_search(
    f: &MeroExpr,
    ctx: &Context,
    condition: &str,
    coef: f64,
    d: f64,
    open: bool,
    radii: &[f64],
) -> CriterionVerdict {
    let rows: Vec<(Witness, bool)> = radii
        .par_iter()
        .map(|&r| {
            let (t_r, conv) = ctx.t(r);
            let (t, lhs) = best_log_l(f, r, d, open);
            (Witness::new(r, t, lhs, coef * t_r), conv)
        })
        .collect();
    let mut v = CriterionVerdict::new(condition);
    for (w, conv) in rows {
        if !(w.margin > 0.0 && w.lhs.is_finite() && w.rhs.is_finite()) {
            v.fail(
                w.r,
                format!(
                    "best log L(t) = {:.6e} at t = {:.6e} does not exceed {coef} T(r) = {:.6e}{}",
                    w.lhs,
                    w.t,
                    w.rhs,
                    fmt_t_note(conv)
                ),
            );
        }
        v.witnesses.push(w);
    }
    v
}

/// `log L(t) > alpha T(r)` for some `t` in `(r, r^d)`, and
/// `T(r^d) >= D T(r)`, at every scanned radius.
pub fn check_main(f: &MeroExpr, params: &CriterionParams) -> Result<CriterionVerdict, CriteriaError> {
    params.validate()?;
    let radii = params.scan.radii();
    let top = radii.last().copied().unwrap_or(1.0).powf(params.d);
    let ctx = Context::new(f, top)?;
    let search = t_search(f, &ctx, "min-modulus", params.alpha, params.d, true, &radii);

    let rows: Vec<(Witness, bool)> = radii
        .par_iter()
        .map(|&r| {
            let rd = r.powf(params.d);
            let (a, ca) = ctx.t(rd);
            let (b, cb) = ctx.t(r);
            (Witness::new(r, rd, a, params.big_d * b), ca && cb)
        })
        .collect();
    let mut ratio = CriterionVerdict::new("characteristic-growth");
    for (w, conv) in rows {
        if !(w.margin >= 0.0 && w.lhs.is_finite() && w.rhs.is_finite()) {
            ratio.fail(
                w.r,
                format!(
                    "T(r^d) = {:.6e} is below D T(r) = {:.6e}{}",
                    w.lhs,
                    w.rhs,
                    fmt_t_note(conv)
                ),
            );
        }
        ratio.witnesses.push(w);
    }
    let witnesses = search.witnesses.clone();
    Ok(CriterionVerdict::all_of("main", vec![search, ratio], witnesses))
}

/// `log L(t) > D T(r)` for some `t` in `[r, r^d]`.
pub fn check_strong(f: &MeroExpr, d: f64, big_d: f64, scan: &Scan) -> Result<CriterionVerdict, CriteriaError> {
    if !(d > 1.0 && d.is_finite()) {
        return Err(CriteriaError::InvalidParams(format!("d must exceed 1, got {d}")));
    }
    if !(big_d > 0.0 && big_d.is_finite()) {
        return Err(CriteriaError::InvalidParams(format!("D must be positive, got {big_d}")));
    }
    scan.validate()?;
    let radii = scan.radii();
    let ctx = Context::new(f, *radii.last().unwrap())?;
    Ok(t_search(f, &ctx, "strong", big_d, d, false, &radii))
}

/// `log L(t) >= d log M(r)` for some `t` in `[r, r^d]`. Equality counts,
/// up to a relative slack of [`MIN_OVER_MAX_SLACK`].
pub fn check_min_over_max(f: &MeroExpr, d: f64, scan: &Scan) -> Result<CriterionVerdict, CriteriaError> {
    if !(d > 1.0 && d.is_finite()) {
        return Err(CriteriaError::InvalidParams(format!("d must exceed 1, got {d}")));
    }
    scan.validate()?;
    let radii = scan.radii();
    let rows: Vec<Witness> = radii
        .par_iter()
        .map(|&r| {
            let rhs = d * max_log_modulus(f, r).log_value;
            let (t, lhs) = best_log_l(f, r, d, false);
            Witness::new(r, t, lhs, rhs)
        })
        .collect();
    let mut v = CriterionVerdict::new("min-over-max");
    for w in rows {
        let ok = w.lhs.is_finite() && w.rhs.is_finite() && w.margin >= -MIN_OVER_MAX_SLACK * w.rhs.abs();
        if !ok {
            v.fail(
                w.r,
                format!(
                    "best log L(t) = {:.6e} at t = {:.6e} is below d log M(r) = {:.6e}",
                    w.lhs, w.t, w.rhs
                ),
            );
        }
        v.witnesses.push(w);
    }
    Ok(v)
}

/// The largest `L(r)/r` in each decade of the grid at least doubles from
/// one decade to the next. Witness values are natural logarithms:
/// `lhs = log max_j`, `rhs = log 2 + log max_{j-1}`.
pub fn check_l_over_r(f: &MeroExpr, grid: &RadiusGrid) -> Result<CriterionVerdict, CriteriaError> {
    grid.validate()?;
    let mut v = CriterionVerdict::new("L-over-r");
    let decades = grid.decades();
    if decades < 3.0 - 1e-9 {
        v.fail(grid.r_min, format!("grid spans {decades:.3} decades, at least 3 are needed"));
        return Ok(v);
    }
    let full = (decades + 1e-9).floor() as usize;
    let radii = grid.radii();
    let vals: Vec<f64> = radii
        .par_iter()
        .map(|&r| min_log_modulus(f, r).log_value - r.ln())
        .collect();
    let mut best = vec![(f64::NAN, f64::NEG_INFINITY); full];
    for (&r, &x) in radii.iter().zip(&vals) {
        let j = (((r / grid.r_min).log10() + 1e-9).floor() as usize).min(full - 1);
        let x = if x.is_nan() { f64::NEG_INFINITY } else { x };
        if x > best[j].1 || best[j].0.is_nan() {
            best[j] = (r, x);
        }
    }
    for j in 1..full {
        let (r, lhs) = best[j];
        let w = Witness::new(r, r, lhs, std::f64::consts::LN_2 + best[j - 1].1);
        if !(w.margin >= 0.0 && lhs.is_finite()) {
            v.fail(
                r,
                format!(
                    "max L(r)/r over decade {j} is exp({:.6e}), less than twice the previous decade's exp({:.6e})",
                    lhs,
                    best[j - 1].1
                ),
            );
        }
        v.witnesses.push(w);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_grows_with_d() {
        let a = exponents(2.0, true);
        assert_eq!(a.len(), 63);
        assert!(a[0] > 1.0 && *a.last().unwrap() < 2.0);
        let b = exponents(2.5, true);
        assert!(a.iter().all(|s| b.contains(s)));
        let c = exponents(2.0, false);
        assert_eq!(c.len(), 65);
        assert_eq!((c[0], c[64]), (1.0, 2.0));
    }
}
