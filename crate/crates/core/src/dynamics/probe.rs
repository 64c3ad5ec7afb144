use super::grid::{classify_grid, ClassifiedGrid, PixelClass, Window};
use super::DynamicsError;
use crate::expr::MeroExpr;
use num_complex::Complex64;
use serde::Serialize;

/// Allowed shortfall when comparing component extents across scales.
const GROWTH_SLACK: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeVerdict {
    BoundedEmpirical,
    UnboundedEmpirical,
    Inconclusive,
}

/// The seed's component in one window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaleObservation {
    pub half_width: f64,
    pub component: u32,
    pub pixels: usize,
    pub touches_boundary: bool,
    /// Larger side of the component's bounding box, in plane units.
    pub extent: f64,
    /// Every pixel 8-adjacent to the component but outside it is decided.
    pub decided_collar: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentReport {
    pub seed: [f64; 2],
    pub class: String,
    /// Component id at the largest scale.
    pub component: u32,
    pub pixel_count: usize,
    pub touches_boundary: bool,
    pub scales: Vec<ScaleObservation>,
    pub verdict: ProbeVerdict,
}

fn observe(g: &ClassifiedGrid, seed_px: (usize, usize)) -> ScaleObservation {
    let n = g.resolution;
    let id = g.label_at(seed_px.0, seed_px.1);
    let (mut c0, mut c1, mut r0, mut r1) = (n, 0, n, 0);
    let mut pixels = 0;
    let mut collar = true;
    for row in 0..n {
        for col in 0..n {
            if g.label_at(col, row) != id {
                continue;
            }
            pixels += 1;
            c0 = c0.min(col);
            c1 = c1.max(col);
            r0 = r0.min(row);
            r1 = r1.max(row);
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let (c, r) = (col as i64 + dc, row as i64 + dr);
                    if c < 0 || r < 0 || c >= n as i64 || r >= n as i64 {
                        continue;
                    }
                    let (c, r) = (c as usize, r as usize);
                    if g.label_at(c, r) != id && !g.class_at(c, r).is_decided() {
                        collar = false;
                    }
                }
            }
        }
    }
    let touches = c0 == 0 || r0 == 0 || c1 + 1 == n || r1 + 1 == n;
    let h = 2.0 * g.window.half_width / n as f64;
    ScaleObservation {
        half_width: g.window.half_width,
        component: id,
        pixels,
        touches_boundary: touches,
        extent: ((c1 - c0 + 1).max(r1 - r0 + 1)) as f64 * h,
        decided_collar: collar,
    }
}

/// Follows the component of `seed` through windows centered at the seed
/// with the given half-widths.
///
/// Bounded-empirical when at some scale the component stays off the window
/// edge and is ringed by decided pixels. Unbounded-empirical when it reaches
/// the edge at every scale and its extent grows at least in proportion to
/// the half-width. Otherwise inconclusive.
pub fn boundedness_probe(
    f: &MeroExpr,
    seed: Complex64,
    scales: &[f64],
    resolution: usize,
    budget: usize,
    escape: f64,
) -> Result<ComponentReport, DynamicsError> {
    if scales.is_empty() {
        return Err(DynamicsError::InvalidParams("at least one scale is needed".to_string()));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(f64::total_cmp);
    let mut obs = Vec::new();
    let mut class = String::new();
    for &s in &scales {
        let w = Window::new(seed, s);
        let g = classify_grid(f, &w, resolution, budget, escape)?;
        let px = w.locate(resolution, seed).expect("seed is the window center");
        let c = g.class_at(px.0, px.1);
        if !c.is_component() {
            if obs.is_empty() {
                return Err(DynamicsError::SeedUndecided(seed, s));
            }
            // the seed pixel itself changed class; nothing to follow
            obs.push(ScaleObservation {
                half_width: s,
                component: 0,
                pixels: 0,
                touches_boundary: false,
                extent: 0.0,
                decided_collar: false,
            });
            continue;
        }
        if class.is_empty() {
            class = match c {
                PixelClass::Attracted { cycle, .. } => format!("attracted-{cycle}"),
                other => other.name().to_string(),
            };
        }
        obs.push(observe(&g, px));
    }
    let bounded = obs
        .iter()
        .any(|o| o.component > 0 && !o.touches_boundary && o.decided_collar);
    let base = obs[0];
    let unbounded = obs.iter().all(|o| o.component > 0 && o.touches_boundary)
        && obs
            .iter()
            .all(|o| o.extent >= GROWTH_SLACK * base.extent * o.half_width / base.half_width);
    let verdict = if bounded {
        ProbeVerdict::BoundedEmpirical
    } else if unbounded {
        ProbeVerdict::UnboundedEmpirical
    } else {
        ProbeVerdict::Inconclusive
    };
    let last = *obs.last().unwrap();
    Ok(ComponentReport {
        seed: [seed.re, seed.im],
        class,
        component: last.component,
        pixel_count: last.pixels,
        touches_boundary: obs.iter().all(|o| o.touches_boundary),
        scales: obs,
        verdict,
    })
}
