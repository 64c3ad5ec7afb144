//! Pole enumeration: exact catalogs from the tree structure, or a numeric
//! search by recursive subdivision with the argument principle.

use super::eval::{eval_node_ext, ExtValue};
use super::poly::as_polynomial;
use super::winding::{winding_from, winding_of_node, Rect, WindingError};
use super::{Func, MeroExpr, Node};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Boxes with a smaller diameter are resolved to a single point.
const RESOLUTION: f64 = 1e-6;
const SPLIT_FRACTIONS: [f64; 3] = [0.4871, 0.5217, 0.4432];
const MAX_BOXES: usize = 400_000;
/// Relative distance under which candidate locations are merged.
const MERGE_TOL: f64 = 1e-7;
const SNAP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    ExactCatalog,
    NumericSearch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub location: Complex64,
    pub multiplicity: u32,
}

/// Poles in the closed disk `|z| <= radius`, sorted by modulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityList {
    pub entries: Vec<Singularity>,
    pub exactness: Exactness,
    pub radius: f64,
}

impl SingularityList {
    /// `n(t)`: poles with `|b| <= t`, counted with multiplicity.
    pub fn count_within(&self, t: f64) -> u64 {
        self.entries
            .iter()
            .take_while(|s| s.location.norm() <= t)
            .map(|s| s.multiplicity as u64)
            .sum()
    }

    /// Restriction to a smaller disk.
    pub fn within(&self, radius: f64) -> SingularityList {
        SingularityList {
            entries: self
                .entries
                .iter()
                .copied()
                .take_while(|s| s.location.norm() <= radius)
                .collect(),
            exactness: self.exactness,
            radius: radius.min(self.radius),
        }
    }

    /// Distance from the circle `|z| = r` to the nearest pole.
    pub fn circle_clearance(&self, r: f64) -> f64 {
        self.entries
            .iter()
            .map(|s| (s.location.norm() - r).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PoleError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("subdivision resolution exhausted with {} unresolved boxes", .0.len())]
    Unresolved(Vec<Rect>),
    #[error("the expression has a non-isolated or essential singularity: {0}")]
    NotMeromorphic(String),
    #[error("winding count failed: {0}")]
    Winding(#[from] WindingError),
}

/// Whether the subtree contains any pole source.
pub(crate) fn may_have_poles(node: &Node) -> bool {
    match node {
        Node::Const(_) | Node::Var | Node::Builtin(_) => false,
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
            may_have_poles(a) || may_have_poles(b)
        }
        Node::Div(a, b, _) => may_have_poles(a) || may_have_poles(b) || !b.is_constant(),
        Node::Pow(a, n, _) => may_have_poles(a) || (*n < 0 && !a.is_constant()),
        Node::Neg(a) => may_have_poles(a),
        Node::Call(func, a) => may_have_poles(a) || (*func == Func::Tan && !a.is_constant()),
    }
}

/// Subtrees whose zeros may be poles of the whole expression. A source `g`
/// is paired with nothing else: the caller locates all zeros of `g`.
fn pole_sources(node: &Node, out: &mut Vec<Node>) -> Result<(), PoleError> {
    match node {
        Node::Const(_) | Node::Var | Node::Builtin(_) => {}
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
            pole_sources(a, out)?;
            pole_sources(b, out)?;
        }
        Node::Div(a, b, roots) => {
            pole_sources(a, out)?;
            if !b.is_constant() {
                if roots.as_ref().is_some_and(|r| r.vanishes) {
                    return Err(PoleError::NotMeromorphic(format!("denominator {b} vanishes")));
                }
                out.push((**b).clone());
            }
        }
        Node::Pow(a, n, _) => {
            pole_sources(a, out)?;
            if *n < 0 && !a.is_constant() {
                out.push((**a).clone());
            }
        }
        Node::Neg(a) => pole_sources(a, out)?,
        Node::Call(func, a) => {
            if may_have_poles(a) {
                return Err(PoleError::NotMeromorphic(format!("{}({a})", func.name())));
            }
            if *func == Func::Tan && !a.is_constant() {
                out.push(Node::call(Func::Cos, (**a).clone()));
            }
        }
    }
    Ok(())
}

/// Pole-candidate locations in `|z| <= radius` read off the tree, or `None`
/// when some source is not a polynomial denominator or `tan` of an affine map.
fn exact_candidates(node: &Node, radius: f64, out: &mut Vec<Complex64>) -> Option<()> {
    match node {
        Node::Const(_) | Node::Var | Node::Builtin(_) => {}
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
            exact_candidates(a, radius, out)?;
            exact_candidates(b, radius, out)?;
        }
        Node::Div(a, b, roots) => {
            exact_candidates(a, radius, out)?;
            if !b.is_constant() {
                let roots = roots.as_ref()?;
                out.extend(roots.roots.iter().map(|r| r.0));
            }
        }
        Node::Pow(a, n, roots) => {
            exact_candidates(a, radius, out)?;
            if *n < 0 && !a.is_constant() {
                let roots = roots.as_ref()?;
                out.extend(roots.roots.iter().map(|r| r.0));
            }
        }
        Node::Neg(a) => exact_candidates(a, radius, out)?,
        Node::Call(func, a) => {
            if *func == Func::Tan && !a.is_constant() {
                let c = as_polynomial(a)?;
                if c.len() != 2 {
                    return None;
                }
                tan_lattice(c[1], c[0], radius, out);
            }
        }
    }
    Some(())
}

/// Solutions of `a z + b = pi/2 + k pi` with `|z| <= radius`.
fn tan_lattice(a: Complex64, b: Complex64, radius: f64, out: &mut Vec<Complex64>) {
    let c0 = (Complex64::new(FRAC_PI_2, 0.0) - b) / a;
    let step = Complex64::new(PI, 0.0) / a;
    let s2 = step.norm_sqr();
    let k_mid = -(c0 * step.conj()).re / s2;
    let foot = (c0 + step * k_mid).norm();
    if foot > radius * (1.0 + 1e-12) {
        return;
    }
    let half = (radius * radius - foot * foot).max(0.0).sqrt() / s2.sqrt();
    let lo = (k_mid - half).floor() as i64 - 1;
    let hi = (k_mid + half).ceil() as i64 + 1;
    for k in lo..=hi {
        // evaluated from the lattice formula directly for accuracy
        let z = (Complex64::new(FRAC_PI_2 + k as f64 * PI, 0.0) - b) / a;
        if z.norm() <= radius {
            out.push(z);
        }
    }
}

fn sort_points(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
}

/// Sorts and merges points closer than `MERGE_TOL` relative.
fn merge_points(mut v: Vec<Complex64>) -> Vec<Complex64> {
    sort_points(&mut v);
    let mut out: Vec<Complex64> = Vec::with_capacity(v.len());
    for z in v {
        let tol = MERGE_TOL * z.norm().max(1.0);
        // equal-modulus neighbours sit close in the sorted order
        let dup = out
            .iter()
            .rev()
            .take_while(|w| z.norm() - w.norm() <= tol)
            .any(|w| (z - w).norm() <= tol);
        if !dup {
            out.push(z);
        }
    }
    out
}

/// Order of the pole of `node` at `c` (negative winding around a small box);
/// zero or negative for regular points.
fn pole_order(node: &Node, c: Complex64, neighbour_dist: f64) -> Result<i64, PoleError> {
    let mut h = (RESOLUTION * c.norm().max(1.0)).min(0.3 * neighbour_dist);
    let mut last = None;
    for _ in 0..6 {
        // f is close to a (z - c)^-m on the tiny box, so few samples suffice
        match winding_from(&|z| eval_node_ext(node, z), &Rect::square(c, h), 4) {
            Ok(w) => return Ok(-w),
            Err(e) => last = Some(e),
        }
        h *= 0.37;
    }
    Err(PoleError::Winding(last.expect("at least one attempt")))
}

fn assign_orders(
    node: &Node,
    candidates: Vec<Complex64>,
    radius: f64,
    exactness: Exactness,
) -> Result<SingularityList, PoleError> {
    let pts = merge_points(candidates);
    let mut entries = Vec::new();
    for (i, &c) in pts.iter().enumerate() {
        // neighbours within the sorted list by modulus window
        let mut nd = f64::INFINITY;
        for j in (0..i).rev() {
            if c.norm() - pts[j].norm() > nd {
                break;
            }
            nd = nd.min((c - pts[j]).norm());
        }
        for p in pts.iter().skip(i + 1) {
            if p.norm() - c.norm() > nd {
                break;
            }
            nd = nd.min((c - p).norm());
        }
        let order = pole_order(node, c, nd)?;
        if order > 0 {
            entries.push(Singularity {
                location: c,
                multiplicity: order as u32,
            });
        }
    }
    Ok(SingularityList {
        entries,
        exactness,
        radius,
    })
}

/// Number of zeros of `g` in `rect` given the poles of `g`.
fn zero_count(g: &Node, g_poles: &[Singularity], rect: &Rect) -> Result<i64, WindingError> {
    let w = winding_of_node(g, rect)?;
    let p: i64 = g_poles
        .iter()
        .filter(|s| rect.contains(s.location))
        .map(|s| s.multiplicity as i64)
        .sum();
    Ok(w + p)
}

fn box_outside_disk(rect: &Rect, radius: f64) -> bool {
    let dx = rect.x0.max(-rect.x1).max(0.0);
    let dy = rect.y0.max(-rect.y1).max(0.0);
    dx.hypot(dy) > radius
}

/// Newton polish of a zero of `g` from a resolved box center, accepted only if
/// it stays inside a slightly enlarged box.
fn polish_zero(g: &Node, rect: &Rect) -> Complex64 {
    let c = rect.center();
    let value = |z: Complex64| match eval_node_ext(g, z) {
        ExtValue::Finite(e) => e.to_complex(),
        _ => None,
    };
    let mut z = c;
    for _ in 0..30 {
        let h = 1e-8 * z.norm().max(1.0);
        let (Some(f0), Some(fp), Some(fm)) = (
            value(z),
            value(z + h),
            value(z - h),
        ) else {
            break;
        };
        let d = (fp - fm) / (2.0 * h);
        if d.norm() == 0.0 {
            break;
        }
        let step = f0 / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() < 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    if (z - c).norm() <= rect.diameter() {
        snap(z)
    } else {
        c
    }
}

/// Clears coordinates at round-off level, so that zeros on the axes or at
/// the origin land there exactly.
fn snap(z: Complex64) -> Complex64 {
    let tol = SNAP_TOL * z.norm().max(1.0);
    let clear = |x: f64| if x.abs() < tol { 0.0 } else { x };
    Complex64::new(clear(z.re), clear(z.im))
}

/// Zeros of `g` in `|z| <= radius` by recursive subdivision.
fn zeros_numeric(g: &Node, radius: f64, g_poles: &[Singularity]) -> Result<Vec<Complex64>, PoleError> {
    let mut start = None;
    let mut last_err = None;
    for pad in [1.013, 1.0371, 1.0729, 1.1113] {
        let r = Rect::square(Complex64::new(0.0, 0.0), radius * pad);
        match zero_count(g, g_poles, &r) {
            Ok(n) => {
                start = Some((r, n));
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let Some((root, n)) = start else {
        return Err(PoleError::Winding(last_err.expect("attempted")));
    };
    let mut found = Vec::new();
    let mut stack = vec![(root, n)];
    let mut processed = 0usize;
    while let Some((rect, n)) = stack.pop() {
        if n <= 0 || box_outside_disk(&rect, radius) {
            continue;
        }
        processed += 1;
        if processed > MAX_BOXES {
            stack.push((rect, n));
            return Err(PoleError::Unresolved(stack.into_iter().map(|x| x.0).collect()));
        }
        if rect.diameter() < RESOLUTION {
            found.push(polish_zero(g, &rect));
            continue;
        }
        let mut split = None;
        for t in SPLIT_FRACTIONS {
            let (a, b) = rect.split(t);
            if let Ok(na) = zero_count(g, g_poles, &a) {
                split = Some((a, na, b, n - na));
                break;
            }
        }
        match split {
            Some((a, na, b, nb)) => {
                stack.push((b, nb));
                stack.push((a, na));
            }
            None => {
                return Err(PoleError::Unresolved(vec![rect]));
            }
        }
    }
    Ok(found)
}

fn poles_numeric(node: &Node, radius: f64) -> Result<SingularityList, PoleError> {
    let mut sources = Vec::new();
    pole_sources(node, &mut sources)?;
    let mut candidates = Vec::new();
    for g in &sources {
        let g_poles = poles_numeric(g, radius * 1.2)?;
        candidates.extend(zeros_numeric(g, radius, &g_poles.entries)?);
    }
    candidates.retain(|c| c.norm() <= radius);
    assign_orders(node, candidates, radius, Exactness::NumericSearch)
}

fn check_radius(radius: f64) -> Result<(), PoleError> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(PoleError::InvalidRadius(radius))
    }
}

/// Poles of `f` in the closed disk `|z| <= radius`: an exact catalog when
/// every pole source is a polynomial denominator or `tan` of an affine map,
/// a numeric search otherwise.
pub fn poles_in_disk(f: &MeroExpr, radius: f64) -> Result<SingularityList, PoleError> {
    check_radius(radius)?;
    let node = f.root();
    let mut sources = Vec::new();
    pole_sources(node, &mut sources)?;
    if sources.is_empty() {
        return Ok(SingularityList {
            entries: Vec::new(),
            exactness: Exactness::ExactCatalog,
            radius,
        });
    }
    let mut candidates = Vec::new();
    if exact_candidates(node, radius, &mut candidates).is_some() {
        candidates.retain(|c| c.norm() <= radius);
        return assign_orders(node, candidates, radius, Exactness::ExactCatalog);
    }
    poles_numeric(node, radius)
}

/// Poles of `f` in `|z| <= radius` by numeric search only, regardless of
/// whether an exact catalog is available.
pub fn poles_in_disk_numeric(f: &MeroExpr, radius: f64) -> Result<SingularityList, PoleError> {
    check_radius(radius)?;
    poles_numeric(f.root(), radius)
}

impl MeroExpr {
    pub fn poles_in_disk(&self, radius: f64) -> Result<SingularityList, PoleError> {
        poles_in_disk(self, radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn locs(l: &SingularityList) -> Vec<(Complex64, u32)> {
        l.entries.iter().map(|s| (s.location, s.multiplicity)).collect()
    }

    #[test]
    fn simple_catalogs() {
        let l = poles_in_disk(&parse("1/z").unwrap(), 2.0).unwrap();
        assert_eq!(l.exactness, Exactness::ExactCatalog);
        assert_eq!(locs(&l), vec![(Complex64::new(0.0, 0.0), 1)]);

        let l = poles_in_disk(&parse("tan(z)").unwrap(), 2.0).unwrap();
        assert_eq!(l.exactness, Exactness::ExactCatalog);
        assert_eq!(l.entries.len(), 2);
        assert!((l.entries[0].location.re + FRAC_PI_2).abs() < 1e-12);
        assert!((l.entries[1].location.re - FRAC_PI_2).abs() < 1e-12);

        let l = poles_in_disk(&parse("exp(z)").unwrap(), 100.0).unwrap();
        assert!(l.entries.is_empty());
    }

    #[test]
    fn cancellations_and_multiplicities() {
        let l = poles_in_disk(&parse("(z-1)/((z-1)*(z+2)^3)").unwrap(), 5.0).unwrap();
        assert_eq!(l.entries.len(), 1);
        assert_eq!(l.entries[0].multiplicity, 3);
        assert!((l.entries[0].location + 2.0).norm() < 1e-9);
        // tan * cos = sin is entire
        let l = poles_in_disk(&parse("tan(z)*cos(z)").unwrap(), 10.0).unwrap();
        assert!(l.entries.is_empty());
    }

    #[test]
    fn tan_of_affine_map() {
        let l = poles_in_disk(&parse("tan(2*z + i)").unwrap(), 3.0).unwrap();
        assert_eq!(l.exactness, Exactness::ExactCatalog);
        for s in &l.entries {
            let w = 2.0 * s.location + Complex64::new(0.0, 1.0);
            assert!((w.im).abs() < 1e-12);
            let k = (w.re - FRAC_PI_2) / PI;
            assert!((k - k.round()).abs() < 1e-12);
        }
        assert_eq!(l.entries.len(), 4);
    }

    #[test]
    fn numeric_search_for_transcendental_denominators() {
        let f = parse("1/(exp(z) - 1)").unwrap();
        let l = poles_in_disk(&f, 7.0).unwrap();
        assert_eq!(l.exactness, Exactness::NumericSearch);
        // 0, +-2 pi i
        assert_eq!(l.entries.len(), 3);
        assert!(l.entries[0].location.norm() < 1e-7);
        assert!((l.entries[1].location.norm() - 2.0 * PI).abs() < 1e-7);
    }

    #[test]
    fn numeric_agrees_with_exact() {
        for s in ["1/(z*(z-1)*(z-2))", "tan(z)", "1/(z^2+1)^2"] {
            let f = parse(s).unwrap();
            let a = poles_in_disk(&f, 5.0).unwrap();
            let b = poles_in_disk_numeric(&f, 5.0).unwrap();
            assert_eq!(a.entries.len(), b.entries.len(), "{s}");
            for (x, y) in a.entries.iter().zip(&b.entries) {
                assert_eq!(x.multiplicity, y.multiplicity, "{s}");
                assert!((x.location - y.location).norm() < 1e-6, "{s}");
            }
        }
    }

    #[test]
    fn essential_singularities_are_rejected() {
        assert!(matches!(
            poles_in_disk(&parse("exp(1/z)").unwrap(), 1.0),
            Err(PoleError::NotMeromorphic(_))
        ));
    }
}
