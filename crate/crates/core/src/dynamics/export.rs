use super::grid::{ClassifiedGrid, PixelClass};
use serde::Serialize;

const POLE_RED: [u8; 3] = [255, 0, 0];
const UNDECIDED: [u8; 3] = [0, 0, 0];
const PALETTE: [[u8; 3]; 8] = [
    [31, 119, 180],
    [44, 160, 44],
    [255, 127, 14],
    [148, 103, 189],
    [23, 190, 207],
    [188, 189, 34],
    [227, 119, 194],
    [140, 86, 75],
];

fn color(c: PixelClass, budget: usize) -> [u8; 3] {
    match c {
        PixelClass::Escaping { steps } => {
            let b = budget.max(1) as f64;
            let g = (255.0 * (1.0 - (steps as f64).min(b) / b)).round() as u8;
            [g, g, g]
        }
        PixelClass::Attracted { cycle, .. } => PALETTE[(cycle as usize - 1) % PALETTE.len()],
        PixelClass::PoleHit { .. } => POLE_RED,
        PixelClass::Undecided => UNDECIDED,
    }
}

/// Binary PPM (P6), one pixel per grid cell, row 0 at the top.
pub fn to_ppm(grid: &ClassifiedGrid) -> Vec<u8> {
    let n = grid.resolution;
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    out.reserve(3 * n * n);
    for &c in &grid.classes {
        out.extend_from_slice(&color(c, grid.budget));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub id: u32,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<u32>,
    pub pixels: usize,
    pub touches_boundary: bool,
    /// `[col_min, row_min, col_max, row_max]`.
    pub bbox: [usize; 4],
}

/// One record per component label, in label order.
pub fn component_summary(grid: &ClassifiedGrid) -> Vec<ComponentSummary> {
    let n = grid.resolution;
    let count = grid.labels.iter().copied().max().unwrap_or(0) as usize;
    let mut out: Vec<Option<ComponentSummary>> = vec![None; count];
    for row in 0..n {
        for col in 0..n {
            let id = grid.label_at(col, row);
            if id == 0 {
                continue;
            }
            let edge = col == 0 || row == 0 || col + 1 == n || row + 1 == n;
            let s = out[id as usize - 1].get_or_insert_with(|| {
                let c = grid.class_at(col, row);
                ComponentSummary {
                    id,
                    class: c.name().to_string(),
                    cycle: match c {
                        PixelClass::Attracted { cycle, .. } => Some(cycle),
                        _ => None,
                    },
                    pixels: 0,
                    touches_boundary: false,
                    bbox: [col, row, col, row],
                }
            });
            s.pixels += 1;
            s.touches_boundary |= edge;
            s.bbox = [s.bbox[0].min(col), s.bbox[1].min(row), s.bbox[2].max(col), s.bbox[3].max(row)];
        }
    }
    out.into_iter().flatten().collect()
}
