//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use nevlab::corpus::{lookup, CORPUS};
use nevlab::criteria::{check_main, check_order_deficiency, CriterionParams, Scan};
use nevlab::dynamics::{boundedness_probe, classify_grid, label_components, ClassifiedGrid, PixelClass, ProbeVerdict, Window};
use nevlab::expr::parse;
use nevlab::hyperbolic::{
    constant_audit, distortion_check, hyperbolic_density, proof_trace, schwarz_pick_check, Domain, TraceParams,
};
use nevlab::nevanlinna::{characteristic, circle_bound_witness, counting, growth_summary, radial_profile, RadiusGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use std::f64::consts::{E, PI};
use std::process::{Command, ExitCode};
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn characteristic_accuracy() -> Outcome {
    let exp = parse("exp(z)").unwrap();
    let mut worst: f64 = 0.0;
    for r in [10.0, 20.0, 50.0] {
        let q = characteristic(&exp, r).map_err(|e| e.to_string())? * PI / r;
        ensure((0.99..=1.01).contains(&q), || format!("pi T(r, exp)/r = {q} at r = {r}"))?;
        worst = worst.max((q - 1.0).abs());
    }
    let inv = parse("1/z").unwrap();
    for r in [E, 10.0, 100.0] {
        let t = characteristic(&inv, r).map_err(|e| e.to_string())?;
        ensure((t - r.ln()).abs() <= 1e-9, || format!("T(r, 1/z) = {t} at r = {r}"))?;
    }
    Ok(format!("largest |pi T/r - 1| for exp is {worst:.1e}"))
}

/// `int_0^r (n(t) - n(0))/t dt + n(0) log r` by the trapezoid rule, with
/// `n` counted from an explicit pole list.
fn integrated(poles: &[f64], r: f64) -> f64 {
    let n = |t: f64| poles.iter().filter(|&&p| p <= t).count() as f64;
    let n0 = n(0.0);
    let nodes = 200_000;
    let h = r / nodes as f64;
    let g = |t: f64| if t == 0.0 { 0.0 } else { (n(t) - n0) / t };
    let mut s = 0.5 * (g(0.0) + g(r));
    for j in 1..nodes {
        s += g(j as f64 * h);
    }
    s * h + n0 * r.ln()
}

fn counting_identity() -> Outcome {
    let tan_poles: Vec<f64> = (-10..10).map(|k| ((k as f64 + 0.5) * PI).abs()).collect();
    let cases = [("tan(z)", tan_poles), ("1/(z*(z-1)*(z-2))", vec![0.0, 1.0, 2.0])];
    let mut worst: f64 = 0.0;
    for (src, poles) in &cases {
        let f = parse(src).unwrap();
        for r in [5.0, 20.0] {
            let sum = counting(&f, r).map_err(|e| e.to_string())?;
            let oracle = integrated(poles, r);
            let rel = (sum - oracle).abs() / oracle.abs();
            ensure(rel <= 1e-3, || format!("{src} at r = {r}: {sum} vs {oracle}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("largest relative gap {worst:.1e}"))
}

fn circle_bound() -> Outcome {
    let mut count = 0;
    for e in &CORPUS {
        let f = e.expr();
        for big_r in [2.0, 4.0, 8.0, 16.0] {
            let w = circle_bound_witness(&f, big_r).map_err(|err| format!("{} R = {big_r}: {err}", e.name))?;
            let bound = 24.0 * characteristic(&f, 3.0 * big_r).map_err(|e| e.to_string())?;
            ensure(w.r > big_r && w.r < 2.0 * big_r, || format!("{} R = {big_r}: r = {}", e.name, w.r))?;
            ensure(w.max_logplus <= bound * (1.0 + 1e-12), || {
                format!("{} R = {big_r}: {} > {bound}", e.name, w.max_logplus)
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} witnesses, none missing"))
}

fn audit() -> Outcome {
    let a = constant_audit();
    ensure((a.inverse_log_six_fifths - 5.4848).abs() < 1e-4, || format!("{a:?}"))?;
    ensure((a.six_log_ten_e - 19.8155).abs() < 1e-4, || format!("{a:?}"))?;
    ensure(a.inverse_log_six_fifths < 24.0 && a.six_log_ten_e < 24.0 && a.below_24, || format!("{a:?}"))?;
    Ok(format!("{:.4} and {:.4}, both below 24", a.inverse_log_six_fifths, a.six_log_ten_e))
}

fn criteria_controls() -> Outcome {
    let defaults = CriterionParams::default();
    for name in ["expz", "fatou"] {
        let v = check_main(&lookup(name).unwrap().expr(), &defaults).map_err(|e| e.to_string())?;
        ensure(!v.holds_on_grid, || format!("main holds for {name}"))?;
    }
    let canprod = lookup("canprod4").unwrap().expr();
    let p = CriterionParams {
        alpha: 0.3,
        d: 2.0,
        big_d: 1.5,
        scan: Scan {
            grid: RadiusGrid {
                r_min: 10.0,
                r_max: 1000.0,
                ..defaults.scan.grid
            },
            warmup: 10.0,
        },
        ..defaults
    };
    let v = check_main(&canprod, &p).map_err(|e| e.to_string())?;
    ensure(v.holds_on_grid, || format!("main fails for canprod4: {:?}", v.first_failure))?;

    let long = RadiusGrid::new(1.0, 1e12, 10f64.sqrt()).unwrap();
    let prof = radial_profile(&canprod, "canprod4", &long).map_err(|e| e.to_string())?;
    let g = growth_summary(&prof).map_err(|e| e.to_string())?;
    let v = check_order_deficiency(&prof).map_err(|e| e.to_string())?;
    ensure(v.holds_on_grid, || format!("order-deficiency fails for canprod4: {:?}", v.first_failure))?;
    ensure((g.order - 0.25).abs() <= 0.05 && g.deficiency >= 0.9, || format!("canprod4 {g:?}"))?;

    let tan = lookup("tanz").unwrap().expr();
    let grid = RadiusGrid::new(1.0, 1e4, 2f64.powf(0.25)).unwrap();
    let prof = radial_profile(&tan, "tanz", &grid).map_err(|e| e.to_string())?;
    let gt = growth_summary(&prof).map_err(|e| e.to_string())?;
    let v = check_order_deficiency(&prof).map_err(|e| e.to_string())?;
    ensure(!v.holds_on_grid && gt.deficiency <= 0.05, || format!("tanz {gt:?}"))?;
    Ok(format!(
        "canprod4 order {:.3}, deficiency {:.3}; tanz deficiency {:.1e}",
        g.order, g.deficiency, gt.deficiency
    ))
}

fn proof_arithmetic() -> Outcome {
    let f = parse("exp(z)").unwrap();
    let p = TraceParams {
        alpha: 0.5,
        d: 2.0,
        big_d: 4.0,
        k: 24.0,
    };
    let t = proof_trace(&f, &p, 1.0, None, 1).map_err(|e| e.to_string())?;
    let d = t.derived;
    ensure((d.k, d.h, d.m, d.big_h) == (2, 4.0, 6, 4096.0), || format!("{d:?}"))?;
    match proof_trace(&f, &TraceParams { big_d: 2.0, ..p }, 1.0, None, 1) {
        Err(e) if e.to_string().contains("requires D > d") => Ok("k = 2, h = 4, m = 6, H = 4096; D = d refused".into()),
        other => Err(format!("D = d gave {other:?}")),
    }
}

fn bfs_labels(n: usize, cls: &[PixelClass]) -> Vec<u32> {
    let mut labels = vec![0u32; n * n];
    let mut next = 0;
    for start in 0..n * n {
        if labels[start] != 0 || !cls[start].is_component() {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            let (row, col) = (k / n, k % n);
            let nbrs = [
                (col > 0).then(|| k - 1),
                (col + 1 < n).then(|| k + 1),
                (row > 0).then(|| k - n),
                (row + 1 < n).then(|| k + n),
            ];
            for j in nbrs.into_iter().flatten() {
                if labels[j] == 0 && cls[j].same_component_class(&cls[start]) {
                    labels[j] = next;
                    queue.push_back(j);
                }
            }
        }
    }
    labels
}

fn dynamics_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in 0..100 {
        let cls: Vec<PixelClass> = (0..64 * 64)
            .map(|_| match rng.gen_range(0..6) {
                0 | 1 => PixelClass::Escaping { steps: 1 },
                2 => PixelClass::Attracted { cycle: 1, steps: 1 },
                3 => PixelClass::Attracted { cycle: 2, steps: 1 },
                4 => PixelClass::PoleHit { step: 0 },
                _ => PixelClass::Undecided,
            })
            .collect();
        let mut grid = ClassifiedGrid::from_classes(64, cls.clone());
        label_components(&mut grid);
        ensure(grid.labels == bfs_labels(64, &cls), || format!("grid {g} differs from flood fill"))?;
    }
    let f = parse("z^2").unwrap();
    let w = Window::new(c(0.0, 0.0), 2.0);
    let n = 256;
    let grid = classify_grid(&f, &w, n, 500, 1e6).map_err(|e| e.to_string())?;
    let h = 4.0 / n as f64;
    let mut checked = 0;
    for row in 0..n {
        for col in 0..n {
            let z = w.pixel(n, col, row);
            if (z.norm() - 1.0).abs() <= h {
                continue;
            }
            let cls = grid.class_at(col, row);
            let right = if z.norm() < 1.0 {
                matches!(cls, PixelClass::Attracted { .. })
            } else {
                matches!(cls, PixelClass::Escaping { .. })
            };
            ensure(right, || format!("z^2 pixel {z} classified {cls:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("100 labelings identical; {checked} z^2 pixels exact"))
}

fn probes() -> Outcome {
    let scales = [4.0, 8.0, 16.0];
    let sq = parse("z^2").unwrap();
    let fatou = lookup("fatou").unwrap();
    let cases = [
        ("z^2 basin of 0", &sq, c(0.0, 0.0), 1e6, ProbeVerdict::BoundedEmpirical),
        ("z^2 basin of infinity", &sq, c(3.0, 0.0), 1e6, ProbeVerdict::UnboundedEmpirical),
        ("fatou seed 5", &fatou.expr(), c(5.0, 0.0), fatou.escape, ProbeVerdict::UnboundedEmpirical),
    ];
    for (what, f, seed, esc, want) in cases {
        let r = boundedness_probe(f, seed, &scales, 128, 500, esc).map_err(|e| format!("{what}: {e}"))?;
        ensure(r.verdict == want, || format!("{what}: {:?}", r.verdict))?;
    }
    Ok("bounded, unbounded, unbounded as expected".into())
}

fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI))
}

fn coef(w: Complex64) -> String {
    format!("({}{:+}*i)", w.re, w.im)
}

fn hyperbolic_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let disk = Domain::unit_disk();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let mut s = "z".to_string();
        for _ in 0..rng.gen_range(1..4) {
            s = match rng.gen_range(0..4) {
                0 => format!("({s})^2"),
                1 => {
                    let a = disk_point(&mut rng, 0.9);
                    format!("(({s}) - {})/(1 - {}*({s}))", coef(a), coef(a.conj()))
                }
                2 => format!("{}*({s})", coef(Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI)))),
                _ => format!("{}*({s})", rng.gen_range(0.1..0.99)),
            };
        }
        let f = parse(&s).map_err(|e| format!("{s}: {e}"))?;
        let (z1, z2) = (disk_point(&mut rng, 0.95), disk_point(&mut rng, 0.95));
        let sp = schwarz_pick_check(&disk, &disk, &f, z1, z2).map_err(|e| format!("{s}: {e}"))?;
        ensure(sp.lhs <= sp.rhs + 1e-9, || format!("{s}: {sp:?}"))?;
        worst = worst.max(sp.lhs - sp.rhs);
    }
    let half = Domain::right_half_plane();
    for _ in 0..1000 {
        for (dom, z) in [(&disk, disk_point(&mut rng, 0.999)), (&half, c(rng.gen_range(1e-3..10.0), rng.gen_range(-10.0..10.0)))] {
            let s = hyperbolic_density(dom, z).map_err(|e| e.to_string())?;
            let (v, d) = (s.exact().unwrap(), s.boundary_distance);
            ensure(1.0 / (2.0 * d) <= v && v <= 2.0 / d, || format!("{dom:?} at {z}: {v}, d = {d}"))?;
        }
    }
    let fatou = lookup("fatou").unwrap();
    let pts: Vec<Complex64> = (0..20).map(|j| c(5.0 + j as f64 / 19.0, 0.0)).collect();
    let rep = distortion_check(&fatou.expr(), &pts, 30, fatou.escape).map_err(|e| e.to_string())?;
    ensure(rep.bounded && rep.max_ratio <= 1.3, || format!("{rep:?}"))?;
    Ok(format!(
        "largest lhs - rhs {worst:.1e}; fatou distortion ratio {:.4}, slope {:.1e}",
        rep.max_ratio, rep.trend_slope
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [(&[&str], &[&str]); 4] = [
        (&["analyze", "--corpus", "tanz", "--rmax", "200"], &["profile.json", "growth.json"]),
        (&["check", "--corpus", "lacunary2", "--rmin", "10", "--rmax", "100"], &["criteria.json"]),
        (
            &["render", "--corpus", "fatou", "--window", "0,0,6", "--res", "128", "--probe", "5,0"],
            &["render.ppm", "components.json", "probe.json"],
        ),
        (&["trace", "--corpus", "expz", "--r0", "1", "--curve", "5,0;6,0"], &["trace.json"]),
    ];
    let mut files = 0;
    for (args, outputs) in runs {
        let mut seen: Vec<Vec<Vec<u8>>> = Vec::new();
        for _ in 0..2 {
            let st = Command::new(env!("CARGO_BIN_EXE_nevlab"))
                .args(args)
                .arg("--out")
                .arg(dir.path())
                .output()
                .map_err(|e| e.to_string())?;
            ensure(st.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&st.stderr)))?;
            let bytes = outputs
                .iter()
                .map(|f| std::fs::read(dir.path().join(f)).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            seen.push(bytes);
        }
        ensure(seen[0] == seen[1], || format!("{args:?} differs between runs"))?;
        files += outputs.len();
    }
    Ok(format!("{files} output files identical across runs"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("characteristic accuracy", characteristic_accuracy),
        ("counting-function identity", counting_identity),
        ("circle bound witnesses", circle_bound),
        ("constant audit", audit),
        ("criteria controls", criteria_controls),
        ("proof arithmetic", proof_arithmetic),
        ("dynamics oracle equivalence", dynamics_oracles),
        ("boundedness probes", probes),
        ("hyperbolic suite", hyperbolic_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
