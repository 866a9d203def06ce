use skorokhod::io::{any_bundle_to_json, path_document, path_from_json, triple_from_json, triple_to_json};
use skorokhod::{
    build_auto, build_counterexample, classify_regime, compare_solutions, critical_canonical_scale,
    diagonal_rescale, solve_fixed_point, solve_grid, verify, AnyBundle, Dyadic, Mode, PLPath2, ReflectionMatrix2,
    Regime, Scalar, SolveConfig, Vec2, VerifyOptions,
};

fn d(s: &str) -> Dyadic {
    s.parse().unwrap()
}

#[test]
fn bundle_survives_json_and_still_verifies() {
    let b = build_counterexample(&d("-2"), 16).unwrap();
    let opts = VerifyOptions::new(Dyadic::zero()).with_tail_tol(b.tail_bound.clone());
    for t in [b.triple(), b.triple_bar()] {
        let text = serde_json::to_string(&triple_to_json(&t)).unwrap();
        let back = triple_from_json::<Dyadic>(&serde_json::from_str(&text).unwrap(), None).unwrap();
        assert_eq!(back, t);
        assert!(verify(&back, &opts).unwrap().pass);
    }
    let doc = any_bundle_to_json(&AnyBundle::Exact(b.clone()));
    assert_eq!(doc["mode"], "exact");
    assert_eq!(path_from_json::<Dyadic>(&doc["u"]).unwrap(), b.u);
}

#[test]
fn two_solutions_separate_and_v_grows() {
    let b = build_counterexample(&d("-2"), 24).unwrap();
    let diag = compare_solutions(&b.triple(), &b.triple_bar(), &Dyadic::zero()).unwrap();
    assert_eq!(diag.u, b.u);
    assert_eq!(diag.max_v, d("1"));
    assert!(!diag.v_monotone_on_support);
}

#[test]
fn canonical_rescale_of_critical_matrix() {
    let r = ReflectionMatrix2::new(d("-4"), d("1/4"));
    assert_eq!(classify_regime(&r), Regime::Case2UniqueCritical);
    let c = critical_canonical_scale(&r).unwrap();
    assert_eq!(c, d("1/4"));
    let (s, _) = diagonal_rescale(&r, &c, None).unwrap();
    assert_eq!(s, ReflectionMatrix2::critical());
}

#[test]
fn float_path_document_drives_both_solvers() {
    let f = PLPath2::new(
        vec![0.0, 0.25, 0.5, 0.75, 1.0],
        vec![
            Vec2::new(0.5, 0.0),
            Vec2::new(-0.5, -0.25),
            Vec2::new(0.5, -0.5),
            Vec2::new(-0.5, -0.75),
            Vec2::new(0.5, -1.0),
        ],
    )
    .unwrap();
    let doc = path_document(&f);
    assert_eq!(doc["mode"], "float");
    let f = path_from_json::<f64>(&doc).unwrap();
    let r = ReflectionMatrix2::new(-0.5, 0.5);
    let fp = solve_fixed_point(&r, &f, &SolveConfig { tol: 1e-12, ..SolveConfig::default() }).unwrap();
    assert!(verify(&fp.triple(&r, &f), &VerifyOptions::new(1e-10)).unwrap().pass);
    let n = 2048;
    let grid = SolveConfig {
        grid: Some((0..=n).map(|k| k as f64 / n as f64).collect()),
        ..SolveConfig::default()
    };
    let gs = solve_grid(&r, &f, &grid).unwrap();
    let diff = compare_solutions(&fp.triple(&r, &f), &gs.triple(&r, &f), &1e-12).unwrap();
    assert!(diff.max_v < 1e-3, "{}", diff.max_v);
}

#[test]
fn auto_build_falls_back_to_float() {
    let b = build_auto(&Scalar::Exact(d("-3")), 12, None).unwrap();
    assert_eq!(b.mode(), Mode::Float);
}
