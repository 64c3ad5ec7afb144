//! Orbit classification on pixel grids, component labeling and empirical
//! boundedness probes.

mod export;
mod grid;
mod probe;

pub use export::{component_summary, to_ppm, ComponentSummary};
pub use grid::{classify_grid, label_components, ClassifiedGrid, PixelClass, Window, MAX_RESOLUTION};
pub use probe::{boundedness_probe, ComponentReport, ProbeVerdict, ScaleObservation};

use crate::expr::{MeroExpr, Value};
use num_complex::Complex64;
use serde::Serialize;

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e6;
pub const MIN_ESCAPE_RADIUS: f64 = 10.0;
/// Successive growth steps beyond the escape radius needed to call an orbit
/// escaping.
const ESCAPE_STREAK: u32 = 3;
const CYCLE_TOL: f64 = 1e-9;
const MAX_PERIOD: usize = 256;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("{0}")]
    InvalidParams(String),
    #[error("seed {0} is undecided at half-width {1}")]
    SeedUndecided(Complex64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum OrbitClass {
    Escaping,
    /// Converged to a cycle; `representative` is its point of least modulus.
    Attracted { period: usize, representative: [f64; 2] },
    PoleHit { step: usize },
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitResult {
    #[serde(flatten)]
    pub class: OrbitClass,
    pub steps: usize,
    #[serde(serialize_with = "ser_complex")]
    pub last: Complex64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= CYCLE_TOL * a.norm().max(1.0)
}

fn step(f: &MeroExpr, z: Complex64) -> Value {
    match f.eval(z) {
        Value::Finite(w) if !(w.re.is_finite() && w.im.is_finite()) => Value::Overflow,
        v => v,
    }
}

/// Period and least-modulus point of the cycle through `z`, if `z` returns
/// within the tolerance in at most [`MAX_PERIOD`] steps.
fn cycle_through(f: &MeroExpr, z: Complex64) -> Option<(usize, Complex64)> {
    let mut w = z;
    let mut best = z;
    for p in 1..=MAX_PERIOD {
        w = step(f, w).finite()?;
        if close(z, w) {
            return Some((p, best));
        }
        if (w.norm(), w.re, w.im) < (best.norm(), best.re, best.im) {
            best = w;
        }
    }
    None
}

/// Classifies the orbit of `z0`. The class is decided by the first orbit
/// prefix that settles it, so a larger budget never changes a decided class.
///
/// Escaping: `|z_n| > escape` and `|z_{n+1}| > |z_n|` on three consecutive
/// steps. Attracted: tortoise `z_i` and hare `z_{2i}` agree to 1e-9
/// (relative beyond modulus 1). Pole hit: `z_n` is a pole of `f`.
pub fn iterate_orbit(f: &MeroExpr, z0: Complex64, max_steps: usize, escape: f64) -> OrbitResult {
    let mut hare = z0;
    let mut tortoise = z0;
    let mut streak = 0;
    let done = |class, steps, last| OrbitResult { class, steps, last };
    for n in 0..max_steps.max(1) {
        let next = match step(f, hare) {
            Value::Finite(w) => w,
            Value::Pole => return done(OrbitClass::PoleHit { step: n }, n, hare),
            Value::Overflow => {
                let class = if hare.norm() > escape {
                    OrbitClass::Escaping
                } else {
                    OrbitClass::Undecided
                };
                return done(class, n + 1, hare);
            }
        };
        if hare.norm() > escape && next.norm() > hare.norm() {
            streak += 1;
            if streak == ESCAPE_STREAK {
                return done(OrbitClass::Escaping, n + 1, next);
            }
        } else {
            streak = 0;
        }
        hare = next;
        if n % 2 == 1 {
            match step(f, tortoise).finite() {
                Some(t) => tortoise = t,
                None => return done(OrbitClass::Undecided, n + 1, hare),
            }
            if close(hare, tortoise) {
                if let Some((period, rep)) = cycle_through(f, hare) {
                    let class = OrbitClass::Attracted {
                        period,
                        representative: [rep.re, rep.im],
                    };
                    return done(class, n + 1, hare);
                }
            }
        }
    }
    done(OrbitClass::Undecided, max_steps.max(1), hare)
}
