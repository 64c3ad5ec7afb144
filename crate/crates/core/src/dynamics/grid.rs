use super::{iterate_orbit, DynamicsError, OrbitClass, MIN_ESCAPE_RADIUS};
use crate::expr::MeroExpr;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MAX_RESOLUTION: usize = 8192;
const SAME_CYCLE: f64 = 1e-6;

/// Square window `center +- half_width` in both directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: [f64; 2],
    pub half_width: f64,
}

impl Window {
    pub fn new(center: Complex64, half_width: f64) -> Self {
        Window {
            center: [center.re, center.im],
            half_width,
        }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }

    /// Center of pixel `(col, row)`; row 0 is the top edge.
    pub fn pixel(&self, resolution: usize, col: usize, row: usize) -> Complex64 {
        let h = 2.0 * self.half_width / resolution as f64;
        Complex64::new(
            self.center[0] - self.half_width + (col as f64 + 0.5) * h,
            self.center[1] + self.half_width - (row as f64 + 0.5) * h,
        )
    }

    /// Pixel containing `z`, if inside the window.
    pub fn locate(&self, resolution: usize, z: Complex64) -> Option<(usize, usize)> {
        let h = 2.0 * self.half_width / resolution as f64;
        let c = ((z.re - self.center[0] + self.half_width) / h).floor();
        let r = ((self.center[1] + self.half_width - z.im) / h).floor();
        let n = resolution as f64;
        (c >= 0.0 && c < n && r >= 0.0 && r < n).then_some((c as usize, r as usize))
    }
}

/// Per-pixel class; attracting cycles are numbered from 1 in raster order of
/// their first pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum PixelClass {
    Escaping { steps: u32 },
    Attracted { cycle: u32, steps: u32 },
    PoleHit { step: u32 },
    Undecided,
}

impl PixelClass {
    /// Pixels that may belong to a component.
    pub fn is_component(&self) -> bool {
        matches!(self, PixelClass::Escaping { .. } | PixelClass::Attracted { .. })
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, PixelClass::Undecided)
    }

    /// Equal classes for labeling: escaping pixels together, attracted
    /// pixels by cycle.
    pub fn same_component_class(&self, other: &PixelClass) -> bool {
        match (self, other) {
            (PixelClass::Escaping { .. }, PixelClass::Escaping { .. }) => true,
            (PixelClass::Attracted { cycle: a, .. }, PixelClass::Attracted { cycle: b, .. }) => a == b,
            _ => false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PixelClass::Escaping { .. } => "escaping",
            PixelClass::Attracted { .. } => "attracted",
            PixelClass::PoleHit { .. } => "pole-hit",
            PixelClass::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifiedGrid {
    pub window: Window,
    pub resolution: usize,
    pub budget: usize,
    pub escape: f64,
    /// Row-major, row 0 at the top.
    pub classes: Vec<PixelClass>,
    /// Row-major component ids; 0 for pixels outside every component.
    pub labels: Vec<u32>,
    /// Least-modulus point of each attracting cycle, indexed by id - 1.
    pub cycles: Vec<[f64; 2]>,
}

impl ClassifiedGrid {
    pub fn class_at(&self, col: usize, row: usize) -> PixelClass {
        self.classes[row * self.resolution + col]
    }

    pub fn label_at(&self, col: usize, row: usize) -> u32 {
        self.labels[row * self.resolution + col]
    }

    /// A grid with given classes and no labels, for labeling on its own.
    pub fn from_classes(resolution: usize, classes: Vec<PixelClass>) -> Self {
        assert_eq!(classes.len(), resolution * resolution);
        ClassifiedGrid {
            window: Window::new(Complex64::new(0.0, 0.0), 1.0),
            resolution,
            budget: 0,
            escape: 0.0,
            labels: vec![0; classes.len()],
            classes,
            cycles: Vec::new(),
        }
    }
}

pub(crate) fn validate(window: &Window, resolution: usize, budget: usize, escape: f64) -> Result<(), DynamicsError> {
    let bad = |m: String| Err(DynamicsError::InvalidParams(m));
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return bad(format!("resolution must lie in 1..={MAX_RESOLUTION}, got {resolution}"));
    }
    if !(window.half_width > 0.0 && window.half_width.is_finite()) {
        return bad(format!("half-width must be positive, got {}", window.half_width));
    }
    if !(window.center[0].is_finite() && window.center[1].is_finite()) {
        return bad("window center must be finite".to_string());
    }
    if budget == 0 {
        return bad("budget must be at least 1".to_string());
    }
    if !(escape >= MIN_ESCAPE_RADIUS && escape.is_finite()) {
        return bad(format!("escape radius must be at least {MIN_ESCAPE_RADIUS}, got {escape}"));
    }
    Ok(())
}

/// Classifies every pixel center and labels the components. The result is
/// a function of the arguments alone.
pub fn classify_grid(
    f: &MeroExpr,
    window: &Window,
    resolution: usize,
    budget: usize,
    escape: f64,
) -> Result<ClassifiedGrid, DynamicsError> {
    validate(window, resolution, budget, escape)?;
    let orbits: Vec<_> = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let z = window.pixel(resolution, k % resolution, k / resolution);
            iterate_orbit(f, z, budget, escape)
        })
        .collect();
    let mut cycles: Vec<[f64; 2]> = Vec::new();
    let classes = orbits
        .iter()
        .map(|o| {
            let steps = o.steps.min(u32::MAX as usize) as u32;
            match o.class {
                OrbitClass::Escaping => PixelClass::Escaping { steps },
                OrbitClass::PoleHit { step } => PixelClass::PoleHit { step: step as u32 },
                OrbitClass::Undecided => PixelClass::Undecided,
                OrbitClass::Attracted { representative, .. } => {
                    let c = Complex64::new(representative[0], representative[1]);
                    let found = cycles.iter().position(|q| {
                        (Complex64::new(q[0], q[1]) - c).norm() <= SAME_CYCLE * c.norm().max(1.0)
                    });
                    let id = match found {
                        Some(i) => i + 1,
                        None => {
                            cycles.push(representative);
                            cycles.len()
                        }
                    };
                    PixelClass::Attracted {
                        cycle: id as u32,
                        steps,
                    }
                }
            }
        })
        .collect();
    let mut grid = ClassifiedGrid {
        window: *window,
        resolution,
        budget,
        escape,
        labels: Vec::new(),
        classes,
        cycles,
    };
    label_components(&mut grid);
    Ok(grid)
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[parent[x as usize] as usize];
        parent[x as usize] = p;
        x = p;
    }
    x
}

/// Union-find over 4-adjacent pixels of the same component class. Labels
/// are numbered from 1 in raster order of each component's first pixel.
pub fn label_components(grid: &mut ClassifiedGrid) {
    let n = grid.resolution;
    let cls = &grid.classes;
    let mut parent: Vec<u32> = (0..(n * n) as u32).collect();
    for row in 0..n {
        for col in 0..n {
            let k = row * n + col;
            if !cls[k].is_component() {
                continue;
            }
            let mut join = |j: usize| {
                if cls[j].same_component_class(&cls[k]) {
                    let a = find(&mut parent, k as u32);
                    let b = find(&mut parent, j as u32);
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            };
            if col > 0 {
                join(k - 1);
            }
            if row > 0 {
                join(k - n);
            }
        }
    }
    let mut labels = vec![0u32; n * n];
    let mut ids = vec![0u32; n * n];
    let mut next = 0;
    for k in 0..n * n {
        if !cls[k].is_component() {
            continue;
        }
        let root = find(&mut parent, k as u32) as usize;
        if ids[root] == 0 {
            next += 1;
            ids[root] = next;
        }
        labels[k] = ids[root];
    }
    grid.labels = labels;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn uniform_and_checkerboard() {
        let esc = PixelClass::Escaping { steps: 1 };
        let mut g = ClassifiedGrid::from_classes(16, vec![esc; 256]);
        label_components(&mut g);
        assert!(g.labels.iter().all(|&l| l == 1));
        let cls = (0..16)
            .map(|k| if (k % 4 + k / 4) % 2 == 0 { esc } else { PixelClass::Undecided })
            .collect();
        let mut g = ClassifiedGrid::from_classes(4, cls);
        label_components(&mut g);
        let decided: Vec<u32> = g.labels.iter().copied().filter(|&l| l > 0).collect();
        assert_eq!(decided, (1..=8).collect::<Vec<u32>>());
    }

    #[test]
    fn square_basins() {
        let f = parse("z^2").unwrap();
        let w = Window::new(Complex64::new(0.0, 0.0), 2.0);
        let g = classify_grid(&f, &w, 64, 1000, 1e6).unwrap();
        for row in 0..64 {
            for col in 0..64 {
                let z = w.pixel(64, col, row);
                let c = g.class_at(col, row);
                if z.norm() < 0.97 {
                    assert!(matches!(c, PixelClass::Attracted { cycle: 1, .. }), "{z} {c:?}");
                } else if z.norm() > 1.03 {
                    assert!(matches!(c, PixelClass::Escaping { .. }), "{z} {c:?}");
                }
            }
        }
    }

    #[test]
    fn locate_inverts_pixel() {
        let w = Window::new(Complex64::new(5.0, -1.0), 3.0);
        for (c, r) in [(0, 0), (17, 100), (127, 127)] {
            assert_eq!(w.locate(128, w.pixel(128, c, r)), Some((c, r)));
        }
        assert_eq!(w.locate(128, Complex64::new(9.0, 0.0)), None);
    }
}
