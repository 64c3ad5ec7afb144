use crate::config::{parse_curve, parse_list, parse_point, parse_window, usage, Failure, RunConfig};
use nevlab::criteria::{
    check_entire_conditions, check_l_over_r, check_main, check_min_over_max, check_order_deficiency, check_strong,
    CriterionParams, CriterionVerdict, Scan,
};
use nevlab::dynamics::{boundedness_probe, classify_grid, component_summary, to_ppm, ComponentSummary, PixelClass, Window};
use nevlab::hyperbolic::{derive_constants, proof_trace, Curve, Derived, TraceParams};
use nevlab::nevanlinna::{growth_summary, radial_profile, GrowthSummary, RadiusGrid};
use num_complex::Complex64;
use serde::Serialize;
use std::path::Path;

const ANALYZE_RMIN: f64 = 1.0;
const ANALYZE_RMAX: f64 = 1000.0;
const PROFILE_RATIO: f64 = 1.0905077326652577; // 2^(1/8)
const ORDER_GRID: RadiusGrid = RadiusGrid {
    r_min: 1.0,
    r_max: 65536.0,
    ratio: PROFILE_RATIO,
};
const DEFAULT_WINDOW: ([f64; 2], f64) = ([0.0, 0.0], 2.0);
const DEFAULT_RES: usize = 256;
const DEFAULT_BUDGET: usize = 500;
const DEFAULT_SCALES: [f64; 3] = [4.0, 8.0, 16.0];
const DEFAULT_TRACE_STEPS: usize = 5;
const CURVE_SAMPLES: usize = 64;

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_bytes(dir, name, text.as_bytes())
}

fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).or_else(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).or_else(|e| usage(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct GrowthReport<'a> {
    config: &'a RunConfig,
    function: String,
    grid: RadiusGrid,
    summary: GrowthSummary,
    /// `L(r)/r` at the largest radius.
    l_over_r_last: f64,
    /// Radii where the proximity quadrature stopped before its tolerance.
    nonconverged_radii: Vec<f64>,
}

pub fn analyze(cfg: &RunConfig) -> Result<(), Failure> {
    let grid = RadiusGrid::new(
        cfg.rmin.unwrap_or(ANALYZE_RMIN),
        cfg.rmax.unwrap_or(ANALYZE_RMAX),
        cfg.ratio.unwrap_or(PROFILE_RATIO),
    )?;
    let (name, f, _) = cfg.function()?;
    let profile = radial_profile(&f, &name, &grid)?;
    let summary = growth_summary(&profile)?;
    let last = profile.samples.last().expect("grid is non-empty");
    let report = GrowthReport {
        config: cfg,
        function: name,
        grid,
        summary,
        l_over_r_last: last.l / last.r,
        nonconverged_radii: profile.samples.iter().filter(|s| !s.converged).map(|s| s.r).collect(),
    };
    let out = cfg.out_dir();
    write_json(&out, "profile.json", &profile)?;
    write_json(&out, "growth.json", &report)
}

#[derive(Serialize)]
struct EntireReport {
    /// Order below 1/2 on the profile.
    hypothesis: CriterionVerdict,
    conditions: Vec<CriterionVerdict>,
}

/// Whether each criterion, as checked on the grid, predicts bounded Fatou
/// components.
#[derive(Serialize)]
struct Boundedness {
    main: bool,
    strong: bool,
    min_over_max: bool,
    l_over_r: bool,
    order_deficiency: bool,
    entire_growth: bool,
}

#[derive(Serialize)]
struct CriteriaReport<'a> {
    config: &'a RunConfig,
    function: String,
    params: CriterionParams,
    main: CriterionVerdict,
    strong: CriterionVerdict,
    min_over_max: CriterionVerdict,
    l_over_r: CriterionVerdict,
    order_deficiency: CriterionVerdict,
    /// Absent for functions with poles.
    entire: Option<EntireReport>,
    boundedness: Boundedness,
}

pub fn check(cfg: &RunConfig) -> Result<(), Failure> {
    let defaults = CriterionParams::default();
    let grid = RadiusGrid {
        r_min: cfg.rmin.unwrap_or(defaults.scan.grid.r_min),
        r_max: cfg.rmax.unwrap_or(defaults.scan.grid.r_max),
        ratio: cfg.ratio.unwrap_or(defaults.scan.grid.ratio),
    };
    let params = CriterionParams {
        alpha: cfg.alpha.unwrap_or(defaults.alpha),
        d: cfg.d.unwrap_or(defaults.d),
        big_d: cfg.big_d.unwrap_or(defaults.big_d),
        k: cfg.k.unwrap_or(defaults.k),
        scan: Scan {
            grid,
            warmup: cfg.warmup.unwrap_or(grid.r_min),
        },
    };
    params.validate()?;
    let (name, f, _) = cfg.function()?;

    let main = check_main(&f, &params)?;
    let strong = check_strong(&f, params.d, params.big_d, &params.scan)?;
    let min_over_max = check_min_over_max(&f, params.d, &params.scan)?;
    let l_grid = RadiusGrid {
        r_min: grid.r_max * 1e-3,
        ..grid
    };
    let l_over_r = check_l_over_r(&f, &l_grid)?;
    let profile = radial_profile(&f, &name, &ORDER_GRID)?;
    let order_deficiency = check_order_deficiency(&profile)?;
    let entire = if f.is_entire() {
        let hypothesis = order_deficiency
            .part("order-below-half")
            .cloned()
            .expect("order-deficiency has an order part");
        let conditions = check_entire_conditions(&f, &profile, params.scan.warmup)?;
        Some(EntireReport { hypothesis, conditions })
    } else {
        None
    };
    let boundedness = Boundedness {
        main: main.holds_on_grid,
        strong: strong.holds_on_grid,
        min_over_max: min_over_max.holds_on_grid,
        l_over_r: l_over_r.holds_on_grid,
        order_deficiency: order_deficiency.holds_on_grid,
        entire_growth: entire
            .as_ref()
            .is_some_and(|e| e.hypothesis.holds_on_grid && e.conditions.iter().any(|c| c.holds_on_grid)),
    };
    let report = CriteriaReport {
        config: cfg,
        function: name,
        params,
        main,
        strong,
        min_over_max,
        l_over_r,
        order_deficiency,
        entire,
        boundedness,
    };
    write_json(&cfg.out_dir(), "criteria.json", &report)
}

#[derive(Serialize, Default)]
struct ClassCounts {
    escaping: usize,
    attracted: usize,
    pole_hit: usize,
    undecided: usize,
}

#[derive(Serialize)]
struct RenderReport<'a> {
    config: &'a RunConfig,
    function: String,
    window: Window,
    resolution: usize,
    budget: usize,
    escape: f64,
    counts: ClassCounts,
    /// Least-modulus point of each attracting cycle, by id.
    cycles: Vec<[f64; 2]>,
    components: Vec<ComponentSummary>,
}

pub fn render(cfg: &RunConfig) -> Result<(), Failure> {
    let res = cfg.res.unwrap_or(DEFAULT_RES);
    let budget = cfg.budget.unwrap_or(DEFAULT_BUDGET);
    let (center, hw) = match &cfg.window {
        Some(w) => parse_window(w)?,
        None => DEFAULT_WINDOW,
    };
    let window = Window::new(Complex64::new(center[0], center[1]), hw);
    if res == 0 || res > nevlab::dynamics::MAX_RESOLUTION {
        return usage(format!(
            "resolution must lie in 1..={}, got {res}",
            nevlab::dynamics::MAX_RESOLUTION
        ));
    }
    let scales = match &cfg.scales {
        Some(s) => parse_list(s, "scales")?,
        None => DEFAULT_SCALES.to_vec(),
    };
    let probe = cfg.probe.as_deref().map(|p| parse_point(p, "probe")).transpose()?;
    let (name, f, escape) = cfg.function()?;

    let grid = classify_grid(&f, &window, res, budget, escape)?;
    let mut counts = ClassCounts::default();
    for c in &grid.classes {
        match c {
            PixelClass::Escaping { .. } => counts.escaping += 1,
            PixelClass::Attracted { .. } => counts.attracted += 1,
            PixelClass::PoleHit { .. } => counts.pole_hit += 1,
            PixelClass::Undecided => counts.undecided += 1,
        }
    }
    let report = RenderReport {
        config: cfg,
        function: name,
        window,
        resolution: res,
        budget,
        escape,
        counts,
        cycles: grid.cycles.clone(),
        components: component_summary(&grid),
    };
    let out = cfg.out_dir();
    write_bytes(&out, "render.ppm", &to_ppm(&grid))?;
    write_json(&out, "components.json", &report)?;
    if let Some(p) = probe {
        let seed = Complex64::new(p[0], p[1]);
        let r = boundedness_probe(&f, seed, &scales, res, budget, escape)?;
        write_json(&out, "probe.json", &r)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstantsOnly {
    params: TraceParams,
    derived: Derived,
    radii: Vec<f64>,
    steps: Vec<()>,
}

pub fn trace(cfg: &RunConfig) -> Result<(), Failure> {
    let defaults = CriterionParams::default();
    let params = TraceParams {
        alpha: cfg.alpha.unwrap_or(defaults.alpha),
        d: cfg.d.unwrap_or(defaults.d),
        big_d: cfg.big_d.unwrap_or(defaults.big_d),
        k: cfg.k.unwrap_or(defaults.k),
    };
    let derived = derive_constants(&params)?;
    let r0 = cfg.r0.unwrap_or(1.0);
    let n = cfg.steps.unwrap_or(DEFAULT_TRACE_STEPS);
    let curve = cfg
        .curve
        .as_deref()
        .map(|c| {
            parse_curve(c).map(|vertices| Curve {
                vertices,
                per_segment: CURVE_SAMPLES,
            })
        })
        .transpose()?;
    let out = cfg.out_dir();
    if cfg.function.is_none() && cfg.corpus.is_none() {
        let report = ConstantsOnly {
            params,
            derived,
            radii: Vec::new(),
            steps: Vec::new(),
        };
        return write_json(&out, "trace.json", &report);
    }
    let (_, f, _) = cfg.function()?;
    let state = proof_trace(&f, &params, r0, curve.as_ref(), n)?;
    write_json(&out, "trace.json", &state)
}
