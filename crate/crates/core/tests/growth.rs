use std::f64::consts::TAU;

use killing_graph::dyadic::Verdict;
use killing_graph::growth::{g_of_r, iterated_log, GrowthConfig, Region, Variant};
use killing_graph::radial::{boundedness_classify, Boundedness};
use killing_graph::*;

#[test]
fn euclidean_exterior_growth_is_logarithmic() {
    let m = builtin_model(&Preset::Euclidean).unwrap();
    let mut cfg = GrowthConfig::new(1.0, 1e6);
    cfg.n_samples = 64;
    let p = g_of_r(&m, &cfg).unwrap();
    for r in [10.0, 1e3, 1e5] {
        let g = p.g_at(r).unwrap();
        assert!((g - r.ln() / TAU).abs() < 1e-9, "r = {r}");
    }
    assert_eq!(p.verdict(), Verdict::Diverges);
}

#[test]
fn weighted_lengths_on_nil_circles() {
    // About the origin a² + b² = τ²r², so the weighted length is
    // 4πr/√(1 + τ²r²) and the weighted g grows linearly.
    let tau = 0.5;
    let m = builtin_model(&Preset::Nil3 { tau }).unwrap();
    let mut cfg = GrowthConfig::new(1.0, 50.0);
    cfg.n_radii = 30;
    cfg.n_samples = 64;
    cfg.variant = Variant::Weighted;
    let p = g_of_r(&m, &cfg).unwrap();
    for (i, &r) in p.radii.iter().enumerate() {
        assert!((p.l_plain[i] - TAU * r).abs() < 1e-9 * r);
        let want = 2.0 * TAU * r / (1.0 + tau * tau * r * r).sqrt();
        assert!((p.l_weighted[i] - want).abs() < 1e-9 * r, "r = {r}");
    }
    let last = p.g.len() - 1;
    assert!(p.g[last] > 50.0 * tau / (2.0 * TAU));
}

#[test]
fn half_plane_region_doubles_g() {
    let m = builtin_model(&Preset::Euclidean).unwrap();
    let mut cfg = GrowthConfig::new(1.0, 100.0);
    cfg.n_samples = 128;
    let full = g_of_r(&m, &cfg).unwrap();
    cfg.region = Region::HalfPlane {
        nx: 0.0,
        ny: 1.0,
        offset: 0.0,
    };
    let half = g_of_r(&m, &cfg).unwrap();
    let last = full.g.len() - 1;
    assert!((half.g[last] / full.g[last] - 2.0).abs() < 1e-6);
}

#[test]
fn iterated_log_ratios_increase() {
    for n in 0..3 {
        let mut prev = 0.0;
        for k in 2..=6 {
            let x = 10f64.powi(k);
            let ratio = iterated_log(n + 1, x).unwrap().f / iterated_log(n, x).unwrap().f;
            assert!(ratio > prev);
            prev = ratio;
        }
    }
}

#[test]
fn radial_boundedness_examples() {
    let log = ScalarField::parse("log(1 + r)").unwrap();
    assert_eq!(
        boundedness_classify(&log, 2.0, 2.0, 1e6).unwrap().verdict,
        Boundedness::Bounded
    );
    let one = ScalarField::constant(1.0);
    assert_eq!(
        boundedness_classify(&one, 1.0, 1.0, 1e6).unwrap().verdict,
        Boundedness::Unbounded
    );
}
