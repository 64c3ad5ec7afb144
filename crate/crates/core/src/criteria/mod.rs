//! Finite-grid checks of sufficient conditions for the absence of unbounded
//! Fatou components.
//!
//! Every verdict is relative to the radii it was computed on. A holding
//! verdict carries, for each tested radius, the witness that made it hold.

mod density;
mod growth;
mod search;

pub use density::{alpha_sweep, density_report, log_density, DensityReport};
pub use growth::{chain_check, check_entire_conditions, check_order_deficiency, ChainLink, ChainTrace, LOWER_ORDER_FLOOR};
pub use search::{check_l_over_r, check_main, check_min_over_max, check_strong, MIN_OVER_MAX_SLACK, T_LATTICE};

use crate::nevanlinna::{NevanlinnaError, RadiusGrid};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CriteriaError {
    #[error("{0}")]
    InvalidParams(String),
    #[error("function has poles ({0} in the sampled disk); the condition is for entire functions")]
    NotEntire(usize),
    #[error(transparent)]
    Nevanlinna(#[from] NevanlinnaError),
}

impl From<crate::expr::PoleError> for CriteriaError {
    fn from(e: crate::expr::PoleError) -> Self {
        CriteriaError::Nevanlinna(e.into())
    }
}

/// Which radii a verdict is decided on: the grid radii not below `warmup`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub grid: RadiusGrid,
    pub warmup: f64,
}

impl Default for Scan {
    fn default() -> Self {
        Scan {
            grid: RadiusGrid {
                r_min: 10.0,
                r_max: 1000.0,
                ratio: 2f64.powf(0.25),
            },
            warmup: 10.0,
        }
    }
}

impl Scan {
    pub fn validate(&self) -> Result<(), CriteriaError> {
        self.grid.validate()?;
        if !(self.warmup.is_finite() && self.warmup >= 0.0) {
            return Err(CriteriaError::InvalidParams(format!(
                "warm-up radius must be finite and non-negative, got {}",
                self.warmup
            )));
        }
        if self.radii().is_empty() {
            return Err(CriteriaError::InvalidParams(format!(
                "no grid radius reaches the warm-up radius {}",
                self.warmup
            )));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        self.grid
            .radii()
            .into_iter()
            .filter(|&r| r >= self.warmup)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionParams {
    pub alpha: f64,
    pub d: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(flatten)]
    pub scan: Scan,
}

impl Default for CriterionParams {
    fn default() -> Self {
        CriterionParams {
            alpha: 0.5,
            d: 2.0,
            big_d: 4.0,
            k: 24.0,
            scan: Scan::default(),
        }
    }
}

impl CriterionParams {
    pub fn validate(&self) -> Result<(), CriteriaError> {
        let bad = |m: String| Err(CriteriaError::InvalidParams(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.d > 1.0 && self.d.is_finite()) {
            return bad(format!("d must exceed 1, got {}", self.d));
        }
        if !(self.big_d > 0.0 && self.big_d.is_finite()) {
            return bad(format!("D must be positive, got {}", self.big_d));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("K must be positive, got {}", self.k));
        }
        self.scan.validate()
    }
}

/// One tested inequality `lhs > rhs` (or `>=` where the condition says so),
/// with `margin = lhs - rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub r: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl Witness {
    pub fn new(r: f64, t: f64, lhs: f64, rhs: f64) -> Self {
        Witness {
            r,
            t,
            lhs,
            rhs,
            margin: lhs - rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub r: f64,
    pub diagnostics: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionVerdict {
    pub condition: String,
    pub holds_on_grid: bool,
    pub witnesses: Vec<Witness>,
    pub first_failure: Option<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CriterionVerdict>,
}

impl CriterionVerdict {
    pub(crate) fn new(condition: &str) -> Self {
        CriterionVerdict {
            condition: condition.to_string(),
            holds_on_grid: true,
            witnesses: Vec::new(),
            first_failure: None,
            parts: Vec::new(),
        }
    }

    pub(crate) fn fail(&mut self, r: f64, diagnostics: String) {
        self.holds_on_grid = false;
        if self.first_failure.is_none() {
            self.first_failure = Some(Failure { r, diagnostics });
        }
    }

    /// Conjunction of `parts`; the first failing part supplies the failure.
    pub(crate) fn all_of(condition: &str, parts: Vec<CriterionVerdict>, witnesses: Vec<Witness>) -> Self {
        let mut v = CriterionVerdict::new(condition);
        v.witnesses = witnesses;
        for p in &parts {
            if !p.holds_on_grid {
                let f = p.first_failure.clone();
                let (r, msg) = f.map(|f| (f.r, f.diagnostics)).unwrap_or((f64::NAN, String::new()));
                v.fail(r, format!("{}: {}", p.condition, msg));
            }
        }
        v.parts = parts;
        v
    }

    pub fn part(&self, condition: &str) -> Option<&CriterionVerdict> {
        self.parts.iter().find(|p| p.condition == condition)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(CriterionParams::default().validate().is_ok());
        let p = CriterionParams {
            big_d: 1.5,
            ..Default::default()
        };
        assert!(p.validate().is_ok());
        let p = CriterionParams {
            big_d: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = CriterionParams {
            alpha: 1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn verdict_json_shape() {
        let mut v = CriterionVerdict::new("x");
        v.witnesses.push(Witness::new(10.0, 20.0, 3.0, 1.0));
        let j = serde_json::to_value(&v).unwrap();
        let mut keys: Vec<_> = j.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["condition", "first_failure", "holds_on_grid", "witnesses"]);
        assert_eq!(j["witnesses"][0]["margin"], 2.0);
        assert!(j["first_failure"].is_null());
    }
}
