use nevlab::corpus::CORPUS;
use nevlab::expr::parse;
use nevlab::nevanlinna::{
    characteristic, circle_bound_witness, counting, growth_summary, poles_for_radius, proximity, proximity_with,
    radial_profile, QuadratureOptions, RadiusGrid,
};
use std::f64::consts::{E, PI};

#[test]
fn exponential_characteristic_is_r_over_pi() {
    let f = parse("exp(z)").unwrap();
    for r in [10.0, 20.0, 50.0] {
        let t = characteristic(&f, r).unwrap();
        assert!((t * PI / r - 1.0).abs() < 1e-6, "r = {r}: {t}");
    }
}

#[test]
fn reciprocal_characteristic_is_log_r() {
    let f = parse("1/z").unwrap();
    for r in [E, 10.0, 100.0] {
        let t = characteristic(&f, r).unwrap();
        assert!((t - r.ln()).abs() < 1e-9, "r = {r}: {t}");
    }
}

/// Trapezoid rule for `int_0^r (n(t) - n(0))/t dt + n(0) log r`.
fn integrated_counting(src: &str, r: f64, nodes: usize) -> f64 {
    let f = parse(src).unwrap();
    let poles = poles_for_radius(&f, r).unwrap();
    let n = |t: f64| poles.count_within(t) as f64;
    let n0 = n(0.0);
    let h = r / nodes as f64;
    let g = |t: f64| if t == 0.0 { 0.0 } else { (n(t) - n0) / t };
    let mut s = 0.5 * (g(0.0) + g(r));
    for j in 1..nodes {
        s += g(j as f64 * h);
    }
    s * h + n0 * r.ln()
}

#[test]
fn counting_matches_integrated_pole_count() {
    for src in ["tan(z)", "1/(z*(z-1)*(z-2))", "1/z"] {
        for r in [5.0, 20.0] {
            let f = parse(src).unwrap();
            let sum = counting(&f, r).unwrap();
            let oracle = integrated_counting(src, r, 10_000);
            assert!((sum - oracle).abs() <= 1e-3 * oracle.abs(), "{src} r = {r}: {sum} vs {oracle}");
        }
    }
}

#[test]
fn counting_matches_integral_for_corpus_with_poles() {
    for e in CORPUS.iter().filter(|e| !e.expr().is_entire()) {
        let f = e.expr();
        for r in [3.0, 12.0] {
            let sum = counting(&f, r).unwrap();
            let oracle = integrated_counting(e.source, r, 10_000);
            assert!((sum - oracle).abs() <= 1e-3 * oracle.abs(), "{} r = {r}: {sum} vs {oracle}", e.name);
        }
    }
}

#[test]
fn doubling_nodes_leaves_proximity_unchanged() {
    for (src, r) in [("exp(z)", 7.5), ("tan(z)", 6.0), ("z + 1 + exp(-z)", 9.0), ("canprod(4)", 30.0)] {
        let f = parse(src).unwrap();
        let poles = poles_for_radius(&f, r).unwrap();
        let base = proximity_with(&f, r, &poles, &QuadratureOptions::default());
        let fine = proximity_with(
            &f,
            r,
            &poles,
            &QuadratureOptions {
                extra_levels: 1,
                ..Default::default()
            },
        );
        assert!(base.converged && fine.converged, "{src}");
        assert!(fine.nodes > base.nodes);
        let rel = (fine.value - base.value).abs() / base.value.abs().max(1e-300);
        assert!(rel < 1e-7, "{src}: {} vs {}", base.value, fine.value);
    }
}

#[test]
fn first_fundamental_theorem_drift_is_bounded() {
    let f = parse("exp(z)").unwrap();
    let g = parse("1/(exp(z) - 1)").unwrap();
    for j in 0..=20 {
        let r = 1.0 + 49.0 * j as f64 / 20.0;
        let (tf, tg) = (characteristic(&f, r).unwrap(), characteristic(&g, r).unwrap());
        assert!((tf - tg).abs() <= 5.0, "r = {r}: {tf} vs {tg}");
    }
}

#[test]
fn characteristic_is_nondecreasing_and_convex_in_log_r() {
    let grid = RadiusGrid::new(1.0, 200.0, 2f64.powf(0.25)).unwrap();
    for e in &CORPUS {
        let p = radial_profile(&e.expr(), e.name, &grid).unwrap();
        let s = &p.samples;
        for w in s.windows(2) {
            assert!(w[1].t >= w[0].t - 1e-7, "{} at {}: {} < {}", e.name, w[1].r, w[1].t, w[0].t);
        }
        for w in s.windows(3) {
            // equal steps in log r
            let second = w[2].t - 2.0 * w[1].t + w[0].t;
            assert!(second >= -1e-6, "{} at {}: {second}", e.name, w[1].r);
        }
    }
}

#[test]
fn profile_orders() {
    let grid = RadiusGrid::new(1.0, 1000.0, 2f64.powf(0.125)).unwrap();
    let g = growth_summary(&radial_profile(&parse("exp(z)").unwrap(), "expz", &grid).unwrap()).unwrap();
    assert!((g.order - 1.0).abs() < 0.02 && (g.lower_order - 1.0).abs() < 0.02, "{g:?}");
    let g = growth_summary(&radial_profile(&parse("z^2").unwrap(), "zsq", &grid).unwrap()).unwrap();
    // T = 2 log r, so the log-log slope is 1/log r
    assert!(g.order < 0.3, "{g:?}");
}

#[test]
fn proximity_of_polynomial_is_its_log() {
    let f = parse("z^3").unwrap();
    for r in [2.0, 10.0] {
        assert!((proximity(&f, r).unwrap() - 3.0 * f64::ln(r)).abs() < 1e-9);
    }
}

#[test]
fn circle_bound_witness_exists_for_corpus() {
    for e in &CORPUS {
        let f = e.expr();
        for big_r in [2.0, 4.0, 8.0, 16.0] {
            let w = circle_bound_witness(&f, big_r).unwrap_or_else(|err| panic!("{} R = {big_r}: {err}", e.name));
            assert!(w.r > big_r && w.r < 2.0 * big_r && w.max_logplus <= w.bound);
        }
    }
}

#[test]
fn tangent_proximity_matches_midpoint_sum() {
    let f = parse("tan(z)").unwrap();
    for r in [6.0, 20.0] {
        let n = 4_000_000;
        let brute = (0..n)
            .map(|j| {
                let z = num_complex::Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / n as f64);
                z.tan().norm().ln().max(0.0)
            })
            .sum::<f64>()
            / n as f64;
        let m = proximity(&f, r).unwrap();
        assert!((m - brute).abs() < 1e-10, "r = {r}: {m} vs {brute}");
    }
}
