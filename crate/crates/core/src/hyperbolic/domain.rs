use super::{ser_complex, HyperbolicError};
use crate::expr::{MeroExpr, Value};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `Gamma(1/4)^4 / (4 pi^2)`; the lower bound below is sharp at `z = -1`.
pub const HEMPEL_C: f64 = 4.376_879_230_452_61;
const MAP_SAMPLES: usize = 1000;
const CONTRACTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    Disk { center: [f64; 2], radius: f64 },
    /// `{z : Re((z - origin) e^{-i angle}) > 0}`.
    HalfPlane { origin: [f64; 2], angle: f64 },
    /// `{r_inner < |z| < r_outer}`.
    Annulus { r_inner: f64, r_outer: f64 },
    /// The plane minus at least two points.
    Punctured { points: Vec<[f64; 2]> },
    /// Interior of a simple polygon.
    Polygon { vertices: Vec<[f64; 2]> },
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = ((z - a) * ab.conj()).re / ab.norm_sqr();
    (z - (a + ab * t.clamp(0.0, 1.0))).norm()
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let cross = |o: Complex64, a: Complex64, b: Complex64| ((a - o).conj() * (b - o)).im;
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    pub fn right_half_plane() -> Self {
        Domain::HalfPlane {
            origin: [0.0, 0.0],
            angle: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), HyperbolicError> {
        let bad = |m: &str| Err(HyperbolicError::InvalidDomain(m.to_string()));
        match self {
            Domain::Disk { radius, .. } if !(*radius > 0.0 && radius.is_finite()) => bad("disk radius must be positive"),
            Domain::Annulus { r_inner, r_outer } if !(*r_inner > 0.0 && r_outer > r_inner && r_outer.is_finite()) => {
                bad("annulus needs 0 < r_inner < r_outer < inf")
            }
            Domain::Punctured { points } if points.len() < 2 => bad("at least two punctures are needed"),
            Domain::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return bad("a polygon needs at least three vertices");
                }
                let n = vertices.len();
                for i in 0..n {
                    for j in i + 1..n {
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        if segments_cross(c(vertices[i]), c(vertices[(i + 1) % n]), c(vertices[j]), c(vertices[(j + 1) % n])) {
                            return bad("polygon edges cross");
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_simply_connected(&self) -> bool {
        matches!(self, Domain::Disk { .. } | Domain::HalfPlane { .. } | Domain::Polygon { .. })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Domain::Disk { center, radius } => (z - c(*center)).norm() < *radius,
            Domain::HalfPlane { origin, angle } => ((z - c(*origin)) * Complex64::from_polar(1.0, -angle)).re > 0.0,
            Domain::Annulus { r_inner, r_outer } => {
                let r = z.norm();
                r > *r_inner && r < *r_outer
            }
            Domain::Punctured { points } => points.iter().all(|&p| c(p) != z) && z.re.is_finite() && z.im.is_finite(),
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let (a, b) = (c(vertices[i]), c(vertices[(i + 1) % n]));
                    if (a.im > z.im) != (b.im > z.im) {
                        let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                        if z.re < x {
                            inside = !inside;
                        }
                    }
                }
                inside && self.boundary_distance(z) > 0.0
            }
        }
    }

    /// Euclidean distance from `z` to the boundary (to the nearest puncture
    /// for punctured planes).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self {
            Domain::Disk { center, radius } => (radius - (z - c(*center)).norm()).abs(),
            Domain::HalfPlane { origin, angle } => ((z - c(*origin)) * Complex64::from_polar(1.0, -angle)).re.abs(),
            Domain::Annulus { r_inner, r_outer } => (z.norm() - r_inner).abs().min((r_outer - z.norm()).abs()),
            Domain::Punctured { points } => points.iter().map(|&p| (z - c(p)).norm()).fold(f64::INFINITY, f64::min),
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| segment_distance(z, c(vertices[i]), c(vertices[(i + 1) % n])))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Sample points of the domain for checking that a map lands inside a
    /// target: a sunflower spiral, carried over by the obvious maps.
    pub(crate) fn samples(&self, n: usize) -> Result<Vec<Complex64>, HyperbolicError> {
        let golden = PI * (3.0 - 5f64.sqrt());
        let spiral = (0..n).map(|j| Complex64::from_polar(((j as f64 + 0.5) / n as f64).sqrt() * 0.999, j as f64 * golden));
        match self {
            Domain::Disk { center, radius } => Ok(spiral.map(|u| c(*center) + u * radius).collect()),
            Domain::HalfPlane { origin, angle } => Ok(spiral
                .map(|u| c(*origin) + Complex64::from_polar(1.0, *angle) * (1.0 + u) / (1.0 - u))
                .collect()),
            other => Err(HyperbolicError::UnsupportedDomain(format!("{other:?}"))),
        }
    }
}

/// Density at `z`: exact (`lower == upper`) for disks, half-planes and
/// annuli; an interval otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HyperbolicSample {
    #[serde(serialize_with = "ser_complex")]
    pub z: Complex64,
    pub lower: f64,
    pub upper: f64,
    pub boundary_distance: f64,
}

impl HyperbolicSample {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn exact(&self) -> Option<f64> {
        self.is_exact().then_some(self.lower)
    }
}

/// Lower bound for the density of the plane minus `{0, 1}`:
/// `1 / (2 |z| (|log |z|| + HEMPEL_C))`.
pub fn hempel_lower(z: Complex64) -> f64 {
    let r = z.norm();
    1.0 / (2.0 * r * (r.ln().abs() + HEMPEL_C))
}

pub fn hyperbolic_density(w: &Domain, z: Complex64) -> Result<HyperbolicSample, HyperbolicError> {
    w.validate()?;
    if !w.contains(z) {
        return Err(HyperbolicError::NotInDomain(z));
    }
    let d = w.boundary_distance(z);
    let exact = |v: f64| HyperbolicSample {
        z,
        lower: v,
        upper: v,
        boundary_distance: d,
    };
    Ok(match w {
        Domain::Disk { center, radius } => {
            let u = (z - c(*center)).norm_sqr();
            exact(radius / (radius * radius - u))
        }
        Domain::HalfPlane { .. } => exact(1.0 / (2.0 * d)),
        Domain::Annulus { r_inner, r_outer } => {
            let l = (r_outer / r_inner).ln();
            let x = (z.norm() / r_inner).ln();
            exact(PI / (2.0 * l * z.norm() * (PI * x / l).sin()))
        }
        Domain::Polygon { .. } => HyperbolicSample {
            z,
            lower: 1.0 / (2.0 * d),
            upper: 2.0 / d,
            boundary_distance: d,
        },
        Domain::Punctured { points } => {
            let mut lower: f64 = 0.0;
            for i in 0..points.len() {
                for j in 0..points.len() {
                    if i != j {
                        let (a, b) = (c(points[i]), c(points[j]));
                        lower = lower.max(hempel_lower((z - a) / (b - a)) / (b - a).norm());
                    }
                }
            }
            HyperbolicSample {
                z,
                lower,
                upper: 1.0 / d,
                boundary_distance: d,
            }
        }
    })
}

/// Hyperbolic distance in a disk or half-plane.
pub fn hyperbolic_distance(w: &Domain, z1: Complex64, z2: Complex64) -> Result<f64, HyperbolicError> {
    w.validate()?;
    for z in [z1, z2] {
        if !w.contains(z) {
            return Err(HyperbolicError::NotInDomain(z));
        }
    }
    match w {
        Domain::Disk { center, radius } => {
            let (a, b) = ((z1 - c(*center)) / radius, (z2 - c(*center)) / radius);
            Ok(((a - b) / (1.0 - a.conj() * b)).norm().min(1.0).atanh())
        }
        Domain::HalfPlane { origin, angle } => {
            let rot = Complex64::from_polar(1.0, -angle);
            let (a, b) = ((z1 - c(*origin)) * rot, (z2 - c(*origin)) * rot);
            Ok(((a - b) / (a + b.conj())).norm().min(1.0).atanh())
        }
        other => Err(HyperbolicError::UnsupportedDomain(format!("{other:?}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchwarzPick {
    /// `rho_V(f z1, f z2)`.
    pub lhs: f64,
    /// `rho_U(z1, z2)`.
    pub rhs: f64,
    pub contraction_holds: bool,
}

fn apply(f: &MeroExpr, z: Complex64) -> Result<Complex64, HyperbolicError> {
    match f.eval(z) {
        Value::Finite(w) => Ok(w),
        _ => Err(HyperbolicError::MapLeavesDomain(z)),
    }
}

/// Compares hyperbolic distances before and after `f`, after checking that
/// `f` maps 1000 sample points of `u` into `v`.
pub fn schwarz_pick_check(
    u: &Domain,
    v: &Domain,
    f: &MeroExpr,
    z1: Complex64,
    z2: Complex64,
) -> Result<SchwarzPick, HyperbolicError> {
    for p in u.samples(MAP_SAMPLES)? {
        if !v.contains(apply(f, p)?) {
            return Err(HyperbolicError::MapLeavesDomain(p));
        }
    }
    let rhs = hyperbolic_distance(u, z1, z2)?;
    let (w1, w2) = (apply(f, z1)?, apply(f, z2)?);
    if !v.contains(w1) {
        return Err(HyperbolicError::MapLeavesDomain(z1));
    }
    if !v.contains(w2) {
        return Err(HyperbolicError::MapLeavesDomain(z2));
    }
    let lhs = hyperbolic_distance(v, w1, w2)?;
    Ok(SchwarzPick {
        lhs,
        rhs,
        contraction_holds: lhs <= rhs + CONTRACTION_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn anchors() {
        let s = hyperbolic_density(&Domain::unit_disk(), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(s.exact(), Some(1.0));
        let s = hyperbolic_density(&Domain::right_half_plane(), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(s.exact(), Some(0.5));
        let sq = Domain::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        };
        let s = hyperbolic_density(&sq, Complex64::new(0.5, 0.5)).unwrap();
        assert_eq!((s.lower, s.upper), (1.0, 4.0));
    }

    #[test]
    fn hempel_constant() {
        // Gamma(1/4) = 3.625609908221908...
        let g: f64 = 3.625_609_908_221_908;
        assert!((g.powi(4) / (4.0 * PI * PI) - HEMPEL_C).abs() < 1e-12);
    }

    #[test]
    fn annulus_near_boundary_matches_half_plane() {
        let a = Domain::Annulus {
            r_inner: 1.0,
            r_outer: 5.0,
        };
        let s = hyperbolic_density(&a, Complex64::new(1.0 + 1e-6, 0.0)).unwrap();
        assert!((s.lower * 2e-6 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn pick_examples() {
        let d = Domain::unit_disk();
        let z1 = Complex64::new(0.1, 0.0);
        let z2 = Complex64::new(0.3, 0.0);
        let id = schwarz_pick_check(&d, &d, &parse("z").unwrap(), z1, z2).unwrap();
        assert_eq!(id.lhs, id.rhs);
        let sq = schwarz_pick_check(&d, &d, &parse("z^2").unwrap(), z1, z2).unwrap();
        assert!(sq.contraction_holds && sq.lhs < sq.rhs);
        let rot = parse("(0.5 + 0.8660254037844386*i)*z").unwrap();
        let r = schwarz_pick_check(&d, &d, &rot, z1, z2).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-12);
        let big = parse("2*z").unwrap();
        assert!(matches!(schwarz_pick_check(&d, &d, &big, z1, z2), Err(HyperbolicError::MapLeavesDomain(_))));
    }
}
