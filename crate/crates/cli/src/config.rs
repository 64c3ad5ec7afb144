use clap::Args;
use nevlab::corpus;
use nevlab::criteria::CriteriaError;
use nevlab::dynamics::{DynamicsError, DEFAULT_ESCAPE_RADIUS};
use nevlab::expr::{parse, MeroExpr, PoleError};
use nevlab::hyperbolic::HyperbolicError;
use nevlab::nevanlinna::NevanlinnaError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// A failed command: bad input (exit 2) or a numeric method that gave up
/// (exit 3).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) => m,
        }
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

impl From<NevanlinnaError> for Failure {
    fn from(e: NevanlinnaError) -> Self {
        match e {
            NevanlinnaError::InvalidRadius(_)
            | NevanlinnaError::InvalidGrid(_)
            | NevanlinnaError::InsufficientSpan { .. } => Failure::Usage(e.to_string()),
            NevanlinnaError::Poles(p) => p.into(),
            NevanlinnaError::NoConvergence { .. } | NevanlinnaError::NotFound(..) => {
                Failure::Numeric(e.to_string())
            }
        }
    }
}

impl From<PoleError> for Failure {
    fn from(e: PoleError) -> Self {
        match e {
            PoleError::InvalidRadius(_) | PoleError::NotMeromorphic(_) => Failure::Usage(e.to_string()),
            PoleError::Unresolved(_) | PoleError::Winding(_) => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<CriteriaError> for Failure {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::Nevanlinna(n) => n.into(),
            CriteriaError::InvalidParams(_) | CriteriaError::NotEntire(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvalidParams(_) => Failure::Usage(e.to_string()),
            DynamicsError::SeedUndecided(..) => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<HyperbolicError> for Failure {
    fn from(e: HyperbolicError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Every option of every subcommand. Each subcommand reads the ones it
/// needs; a JSON file given by `--config` supplies the same keys, and flags
/// win over the file.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Expression text, e.g. "exp(z)" or "z + 1 + exp(-z)".
    #[arg(long, conflicts_with = "corpus")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    /// Built-in function: expz, tanz, zsq, invz, fatou, lacunary2, canprod4.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmin: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmax: Option<f64>,
    /// Ratio between consecutive grid radii.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long = "d")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[arg(long = "D")]
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub big_d: Option<f64>,
    #[arg(long = "K")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Radii below this are not judged.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warmup: Option<f64>,
    /// "CX,HW" (real center) or "CRE,CIM,HW".
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub res: Option<usize>,
    /// Iteration budget per pixel.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// Probe half-widths, comma separated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape: Option<f64>,
    /// Seed point "RE,IM" for a boundedness probe.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Recursion and iteration depth for trace.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Polyline "X,Y;X,Y;..." whose images trace follows.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Recorded in the reports; no command samples randomly.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($flags:ident, $file:ident; $($f:ident),*) => {
        RunConfig {
            $($f: $flags.$f.clone().or($file.$f.clone()),)*
            config: None,
        }
    };
}

impl RunConfig {
    /// Flags merged over the config file, if any.
    pub fn resolve(self) -> Result<RunConfig, Failure> {
        let mut file = match &self.config {
            None => RunConfig::default(),
            Some(p) => read_config(p)?,
        };
        if self.function.is_some() || self.corpus.is_some() {
            file.function = None;
            file.corpus = None;
        }
        Ok(self.overlay(&file))
    }

    fn overlay(&self, file: &RunConfig) -> RunConfig {
        let flags = self;
        overlay!(flags, file; function, corpus, rmin, rmax, ratio, alpha, d, big_d, k, warmup,
            window, res, budget, scales, escape, probe, r0, steps, curve, out, seed)
    }

    /// The function and the escape radius that goes with it.
    pub fn function(&self) -> Result<(String, MeroExpr, f64), Failure> {
        match (&self.function, &self.corpus) {
            (Some(_), Some(_)) => usage("give either --function or --corpus, not both"),
            (None, None) => usage("a function is required: --function TEXT or --corpus NAME"),
            (Some(text), None) => match parse(text) {
                Ok(f) => Ok((text.clone(), f, self.escape.unwrap_or(DEFAULT_ESCAPE_RADIUS))),
                Err(e) => usage(format!("cannot parse {text:?}: {e}")),
            },
            (None, Some(name)) => match corpus::lookup(name) {
                Some(e) => Ok((e.name.to_string(), e.expr(), self.escape.unwrap_or(e.escape))),
                None => {
                    let names: Vec<_> = corpus::CORPUS.iter().map(|e| e.name).collect();
                    usage(format!("unknown corpus entry {name:?}; known: {}", names.join(", ")))
                }
            },
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn read_config(p: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(p).or_else(|e| usage(format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).or_else(|e| usage(format!("bad config {}: {e}", p.display())))
}

/// Comma separated finite numbers.
pub fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| match s.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => usage(format!("{what}: {s:?} is not a finite number")),
        })
        .collect()
}

/// `(center, half_width)` from "CX,HW" or "CRE,CIM,HW".
pub fn parse_window(text: &str) -> Result<([f64; 2], f64), Failure> {
    match parse_list(text, "window")?.as_slice() {
        [cx, hw] => Ok(([*cx, 0.0], *hw)),
        [re, im, hw] => Ok(([*re, *im], *hw)),
        _ => usage(format!("window {text:?} must be CX,HW or CRE,CIM,HW")),
    }
}

pub fn parse_point(text: &str, what: &str) -> Result<[f64; 2], Failure> {
    match parse_list(text, what)?.as_slice() {
        [re, im] => Ok([*re, *im]),
        [re] => Ok([*re, 0.0]),
        _ => usage(format!("{what} {text:?} must be RE,IM")),
    }
}

pub fn parse_curve(text: &str) -> Result<Vec<[f64; 2]>, Failure> {
    let pts = text
        .split(';')
        .map(|p| parse_point(p, "curve vertex"))
        .collect::<Result<Vec<_>, _>>()?;
    if pts.len() < 2 {
        return usage("curve needs at least two vertices");
    }
    Ok(pts)
}
