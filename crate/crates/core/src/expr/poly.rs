//! Polynomial extraction from expression trees and root finding.

use super::Node;
use num_complex::Complex64;

const MAX_DEGREE: usize = 512;
/// Relative distance under which Aberth roots are merged into one multiple root.
const CLUSTER_TOL: f64 = 1e-4;

/// Roots of a polynomial with multiplicities, sorted by modulus.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolyRoots {
    pub roots: Vec<(Complex64, u32)>,
    /// The polynomial is identically zero.
    pub vanishes: bool,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    while c.len() > 1 && c[c.len() - 1] == czero() {
        c.pop();
    }
    c
}

fn poly_add(a: &[Complex64], b: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default() * sign
        })
        .collect()
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Option<Vec<Complex64>> {
    if a.len() + b.len() - 1 > MAX_DEGREE + 1 {
        return None;
    }
    let mut out = vec![czero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Some(out)
}

/// Coefficients (ascending powers) when `node` is a polynomial in `z`.
pub(crate) fn as_polynomial(node: &Node) -> Option<Vec<Complex64>> {
    let c = match node {
        Node::Const(c) => vec![*c],
        Node::Var => vec![czero(), Complex64::new(1.0, 0.0)],
        Node::Add(a, b) => poly_add(&as_polynomial(a)?, &as_polynomial(b)?, 1.0),
        Node::Sub(a, b) => poly_add(&as_polynomial(a)?, &as_polynomial(b)?, -1.0),
        Node::Mul(a, b) => poly_mul(&as_polynomial(a)?, &as_polynomial(b)?)?,
        Node::Neg(a) => as_polynomial(a)?.into_iter().map(|x| -x).collect(),
        Node::Div(a, b, _) => {
            let den = trim(as_polynomial(b)?);
            if den.len() != 1 || den[0] == czero() {
                return None;
            }
            as_polynomial(a)?.into_iter().map(|x| x / den[0]).collect()
        }
        Node::Pow(a, n, _) => {
            if *n < 0 {
                return None;
            }
            let base = trim(as_polynomial(a)?);
            if (base.len() - 1) * (*n as usize) > MAX_DEGREE {
                return None;
            }
            let mut acc = vec![Complex64::new(1.0, 0.0)];
            for _ in 0..*n {
                acc = poly_mul(&acc, &base)?;
            }
            acc
        }
        Node::Call(..) | Node::Builtin(_) => return None,
    };
    Some(trim(c))
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(czero(), |acc, &a| acc * z + a)
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    if c.len() <= 1 {
        return vec![czero()];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * k as f64)
        .collect()
}

/// Aberth-Ehrlich simultaneous iteration; `c` has nonzero leading and
/// constant coefficients and degree >= 1.
fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let dc = derivative(c);
    let lead = c[n].norm();
    let r0 = (c[0].norm() / lead).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(r0, t)
        })
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let p = horner(c, z[i]);
            if p == czero() {
                continue;
            }
            let ratio = p / horner(&dc, z[i]);
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == czero() {
                        czero()
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

fn polish(c: &[Complex64], mut z: Complex64, mult: u32) -> Complex64 {
    // the (m-1)-th derivative has a simple root at an m-fold root
    let mut q = c.to_vec();
    for _ in 1..mult {
        q = derivative(&q);
    }
    let dq = derivative(&q);
    let mut last = f64::INFINITY;
    for _ in 0..60 {
        let d = horner(&dq, z);
        if d == czero() {
            break;
        }
        let step = horner(&q, z) / d;
        let s = step.norm();
        if !s.is_finite() || s >= last {
            break;
        }
        z -= step;
        last = s;
        if s <= 1e-17 * z.norm().max(1e-300) {
            break;
        }
    }
    z
}

/// Roots of `sum c[k] z^k` with multiplicities. Roots closer than a relative
/// distance of `1e-4` are reported as one multiple root at their (polished)
/// centroid.
pub fn poly_roots(coeffs: &[Complex64]) -> PolyRoots {
    let c = trim(coeffs.to_vec());
    if c.len() == 1 {
        return PolyRoots {
            roots: Vec::new(),
            vanishes: c[0] == czero(),
        };
    }
    let zeros_at_origin = c.iter().take_while(|&&a| a == czero()).count();
    let reduced = &c[zeros_at_origin..];
    let mut roots = Vec::new();
    if zeros_at_origin > 0 {
        roots.push((czero(), zeros_at_origin as u32));
    }
    if reduced.len() == 2 {
        roots.push((-reduced[0] / reduced[1], 1));
    } else if reduced.len() > 2 {
        let raw = aberth(reduced);
        let mut used = vec![false; raw.len()];
        for i in 0..raw.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut members = vec![raw[i]];
            // transitive closure of the proximity relation
            let mut k = 0;
            while k < members.len() {
                let m = members[k];
                for j in 0..raw.len() {
                    if !used[j] && (raw[j] - m).norm() <= CLUSTER_TOL * m.norm().max(1.0) {
                        used[j] = true;
                        members.push(raw[j]);
                    }
                }
                k += 1;
            }
            let mult = members.len() as u32;
            let centroid = members.iter().sum::<Complex64>() / mult as f64;
            roots.push((polish(reduced, centroid, mult), mult));
        }
    }
    roots.sort_by(|a, b| {
        a.0.norm()
            .total_cmp(&b.0.norm())
            .then(a.0.re.total_cmp(&b.0.re))
            .then(a.0.im.total_cmp(&b.0.im))
    });
    PolyRoots {
        roots,
        vanishes: false,
    }
}
