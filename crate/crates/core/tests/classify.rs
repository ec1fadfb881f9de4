use num_complex::Complex64 as C;
use proptest::prelude::*;
use wpfeq::classify::*;
use wpfeq::elliptic::EllipticContext;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn exact_pairs(xs: impl Iterator<Item = C>, w: impl Fn(C) -> C, dw: impl Fn(C) -> C) -> Vec<(C, C)> {
    xs.map(|x| (w(x), dw(x))).collect()
}

fn grid(x0: f64, h: f64, n: usize) -> impl Iterator<Item = C> {
    (0..n).map(move |k| c(x0 + h * k as f64, 0.0))
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

// Σ pᵢ(aW + b)ⁱ expanded in W, by binomials
fn expand(p: [C; 4], a: C, b: C) -> [C; 4] {
    let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let mut out = [C::new(0.0, 0.0); 4];
    for (i, pi) in p.iter().enumerate() {
        for (k, o) in out.iter_mut().enumerate().take(i + 1) {
            *o += pi * binom[i][k] * a.powi(k as i32) * b.powi((i - k) as i32);
        }
    }
    out
}

#[test]
fn central_differences_are_exact_on_lines_and_quadratics() {
    let s = SampleSet::on_grid(c(0.0, 0.0), c(0.1, 0.0), 20, |x| x).unwrap();
    for (_, _, d) in estimate_jets(&s, 2).unwrap() {
        assert!(close(d, c(1.0, 0.0), 1e-12));
    }
    let s = SampleSet::on_grid(c(-1.0, 0.0), c(0.1, 0.0), 20, |x| x * x).unwrap();
    let jets = estimate_jets(&s, 2).unwrap();
    assert_eq!(jets.len(), 18);
    for (x, _, d) in jets {
        assert!(close(d, 2.0 * x, 1e-12));
    }
}

#[test]
fn fourth_order_stencil_on_exponential() {
    let s = SampleSet::on_grid(c(0.0, 0.0), c(1e-2, 0.0), 101, |x| x.exp()).unwrap();
    let jets = estimate_jets(&s, 4).unwrap();
    let err = jets.iter().map(|(x, _, d)| (d - x.exp()).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
    let jets6 = estimate_jets(&s, 6).unwrap();
    let err6 = jets6.iter().map(|(x, _, d)| (d - x.exp()).norm()).fold(0.0, f64::max);
    assert!(err6 < err);
}

#[test]
fn stencil_errors() {
    let s = SampleSet::on_grid(c(0.0, 0.0), c(0.1, 0.0), 4, |x| x).unwrap();
    assert!(matches!(estimate_jets(&s, 4), Err(ClassifyError::TooFewPoints { .. })));
    assert!(matches!(estimate_jets(&s, 3), Err(ClassifyError::InvalidArgument(_))));
    let s = SampleSet::new(vec![(c(0.0, 0.0), c(0.0, 0.0)), (c(0.1, 0.0), c(1.0, 0.0)), (c(0.3, 0.0), c(2.0, 0.0))]).unwrap();
    assert!(matches!(estimate_jets(&s, 2), Err(ClassifyError::GridNotUniform)));
}

#[test]
fn cubic_fit_examples() {
    let f = fit_cubic(&exact_pairs(grid(0.0, 0.1, 20), |x| x.exp(), |x| x.exp())).unwrap();
    let want = [0.0, 0.0, 1.0, 0.0];
    for (p, w) in f.coefficients.iter().zip(want) {
        assert!(close(*p, c(w, 0.0), 1e-8), "{:?}", f.coefficients);
    }
    assert!(f.residual <= 1e-10);

    let f = fit_cubic(&exact_pairs(grid(0.0, 0.1, 20), |x| x, |_| c(1.0, 0.0))).unwrap();
    for (p, w) in f.coefficients.iter().zip([1.0, 0.0, 0.0, 0.0]) {
        assert!(close(*p, c(w, 0.0), 1e-8), "{:?}", f.coefficients);
    }

    let ctx = EllipticContext::from_invariants(c(4.0, 0.0), c(0.0, 0.0));
    let pairs = exact_pairs(grid(0.2, 0.01, 101), |x| ctx.wp(x).unwrap(), |x| ctx.wp_prime(x).unwrap());
    let f = fit_cubic(&pairs).unwrap();
    for (p, w) in f.coefficients.iter().zip([0.0, -4.0, 0.0, 4.0]) {
        assert!(close(*p, c(w, 0.0), 1e-8), "{:?}", f.coefficients);
    }
    assert!(f.residual <= 1e-10);
}

#[test]
fn cubic_fit_rejects_constant_and_short_input() {
    let flat = vec![(c(2.0, 0.0), c(0.0, 0.0)); 10];
    assert!(matches!(fit_cubic(&flat), Err(ClassifyError::DegenerateInput(_))));
    assert!(matches!(fit_cubic(&flat[..3]), Err(ClassifyError::TooFewPoints { .. })));
}

#[test]
fn linear_fit_examples() {
    let cases: [(fn(C) -> C, fn(C) -> C, [f64; 2]); 3] = [
        (|x| (3.0 * x).exp(), |x| 3.0 * (3.0 * x).exp(), [0.0, 3.0]),
        (|x| x, |_| c(1.0, 0.0), [1.0, 0.0]),
        (|x| 2.0 * x.exp() + 5.0, |x| 2.0 * x.exp(), [-5.0, 1.0]),
    ];
    for (w, dw, want) in cases {
        let f = fit_linear(&exact_pairs(grid(0.0, 0.05, 30), w, dw)).unwrap();
        for (p, e) in f.coefficients.iter().zip(want) {
            assert!(close(*p, c(e, 0.0), 1e-9), "{:?} vs {want:?}", f.coefficients);
        }
    }
}

#[test]
fn normal_form_examples() {
    let nf = to_normal_form([c(0.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)], 1e-8).unwrap();
    assert!(close(nf.g2, c(4.0, 0.0), 1e-14));
    assert!(close(nf.g3, c(0.0, 0.0), 1e-14));
    assert!(close(nf.a, c(1.0, 0.0), 1e-14));
    assert!(close(nf.b, c(0.0, 0.0), 1e-14));

    let nf = to_normal_form([c(0.3, 1.0), c(-2.0, 0.5), c(0.0, 0.0), c(4.0, 0.0)], 1e-8).unwrap();
    assert!(close(nf.a, c(1.0, 0.0), 1e-14));
    assert!(close(nf.b, c(0.0, 0.0), 1e-14));

    let zero = c(0.0, 0.0);
    assert_eq!(to_normal_form([c(1.0, 0.0), zero, c(1.0, 0.0), zero], 1e-8), Err(ClassifyError::DegenerateCubic));
}

fn complex() -> impl Strategy<Value = C> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
}

proptest! {
    #[test]
    fn normal_form_reexpands_to_the_cubic(p0 in complex(), p1 in complex(), p2 in complex(), p3 in complex()) {
        prop_assume!(p3.norm() > 0.1);
        let p = [p0, p1, p2, p3];
        let nf = to_normal_form(p, 1e-8).unwrap();
        let scale = p.iter().map(|v| v.norm()).fold(1.0, f64::max);
        // Σ pᵢ(aW + b)ⁱ must equal a²(4W³ − g₂W − g₃)
        let lhs = expand(p, nf.a, nf.b);
        let a2 = nf.a * nf.a;
        let rhs = [-a2 * nf.g3, -a2 * nf.g2, c(0.0, 0.0), 4.0 * a2];
        let s2 = scale * a2.norm().max(1.0) * nf.b.norm().max(1.0).powi(3);
        for (l, r) in lhs.iter().zip(rhs) {
            prop_assert!((l - r).norm() <= 1e-10 * s2);
        }
        let back = from_normal_form(&nf);
        for (b, q) in back.iter().zip(p) {
            prop_assert!((b - q).norm() <= 1e-10 * scale);
        }
    }
}

fn base_sample(kind: u8, alpha: C, delta: C, beta: C) -> SampleSet {
    let ctx = EllipticContext::from_invariants(c(4.0, 0.0), c(0.0, 0.0));
    let f = move |x: C| match kind {
        0 => x.exp(),
        1 => x,
        _ => ctx.wp(x).unwrap(),
    };
    SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |x| alpha * f(delta * x) + beta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn invariance_preserves_family_tag(
        kind in 0u8..3,
        am in 0.5..2.0f64, aa in -3.1..3.1f64,
        dm in 0.8..1.2f64, da in -0.3..0.3f64,
        beta in complex(),
    ) {
        let th = Thresholds::default();
        let one = c(1.0, 0.0);
        let base = classify_samples(&base_sample(kind, one, one, c(0.0, 0.0)), &th).unwrap();
        let moved = classify_samples(&base_sample(kind, C::from_polar(am, aa), C::from_polar(dm, da), beta), &th).unwrap();
        prop_assert_ne!(base.family.tag(), "not_a_solution");
        prop_assert_eq!(base.family.tag(), moved.family.tag());
    }
}

#[test]
fn exact_jets_beat_finite_differences() {
    let ctx = EllipticContext::from_invariants(c(4.0, 0.0), c(0.0, 0.0));
    let fd = SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |x| ctx.wp(x).unwrap()).unwrap();
    let th = Thresholds::default();
    let r_fd = classify_samples(&fd, &th).unwrap().evidence.cubic.unwrap().residual;
    let d = fd.points.iter().map(|p| ctx.wp_prime(p.0).unwrap()).collect();
    let exact = SampleSet::with_derivatives(fd.points.clone(), d).unwrap();
    let r_ex = classify_samples(&exact, &th).unwrap().evidence.cubic.unwrap().residual;
    assert!(r_ex <= 1e-10 && r_ex < r_fd, "{r_ex} {r_fd}");
}

#[test]
fn generic_weierstrass_recovers_parameters() {
    let g = EllipticContext::from_periods(c(2.0, 0.0), c(0.4, 1.7)).unwrap();
    let (a, b) = (c(2.0, 1.0), c(0.5, 0.0));
    let s = SampleSet::on_grid(c(0.2, 0.1), c(0.01, 0.0), 101, |x| a * g.wp(x).unwrap() + b).unwrap();
    let r = classify_samples(&s, &Thresholds::default()).unwrap();
    let Family::Weierstrass { g2, g3, a: ra, b: rb } = r.family else {
        panic!("{:?}", r.family)
    };
    assert!(rel(g2, g.g2()) <= 1e-4);
    assert!(rel(g3, g.g3()) <= 1e-4);
    assert!(rel(ra, a) <= 1e-4);
    assert!(rel(rb, b) <= 1e-4);
    assert!(r.roundtrip_residual.unwrap() <= 1e-7);
}

#[test]
fn exponential_linear_constant_pipeline() {
    let th = Thresholds::default();
    let s = SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |x| 2.0 * (3.0 * x).exp() + 5.0).unwrap();
    match classify_samples(&s, &th).unwrap().family {
        Family::Exponential { delta, alpha, beta } => {
            assert!(rel(delta, c(3.0, 0.0)) <= 1e-6);
            assert!(rel(alpha, c(2.0, 0.0)) <= 1e-6);
            assert!(rel(beta, c(5.0, 0.0)) <= 1e-6);
        }
        f => panic!("{f:?}"),
    }
    let s = SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |x| 2.0 * x + 1.0).unwrap();
    match classify_samples(&s, &th).unwrap().family {
        Family::Linear { alpha, beta } => {
            assert!(rel(alpha, c(2.0, 0.0)) <= 1e-9);
            assert!(rel(beta, c(1.0, 0.0)) <= 1e-9);
        }
        f => panic!("{f:?}"),
    }
    let s = SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |_| c(3.0, -1.0)).unwrap();
    assert_eq!(classify_samples(&s, &th).unwrap().family, Family::Constant { c: c(3.0, -1.0) });
}

#[test]
fn absolute_value_is_rejected() {
    let s = SampleSet::on_grid(c(-0.5, 0.0), c(0.01, 0.0), 101, |x| c(x.re.abs(), 0.0)).unwrap();
    let r = classify_samples(&s, &Thresholds::default()).unwrap();
    assert_eq!(r.family.tag(), "not_a_solution");
    assert!(r.roundtrip_residual.is_none());
}

#[test]
fn sine_is_rejected() {
    // w′² = 1 − w² has p₃ = 0 and a nonzero discriminant: two exponentials
    let s = SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |x| x.sin()).unwrap();
    let r = classify_samples(&s, &Thresholds::default()).unwrap();
    assert_eq!(r.family.tag(), "not_a_solution");
    let p = &r.evidence.cubic.unwrap().coefficients;
    assert!(close(p[0], c(1.0, 0.0), 1e-6) && close(p[2], c(-1.0, 0.0), 1e-6));
    // the determinant with rows (1, f, f′) at x, y, z = −x − y does not vanish
    let (x, y) = (c(0.3, 0.0), c(0.5, 0.0));
    let z = -x - y;
    let det = (y - z).sin() + (z - x).sin() + (x - y).sin();
    assert!(det.norm() > 1e-3);
}

#[test]
fn threshold_loosening_keeps_accepted_samples() {
    let ctx = EllipticContext::from_invariants(c(4.0, 0.0), c(0.0, 0.0));
    let sets = [
        SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |x| ctx.wp(x).unwrap()).unwrap(),
        SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |x| x.exp()).unwrap(),
        SampleSet::on_grid(c(0.2, 0.0), c(0.01, 0.0), 101, |x| x * 3.0).unwrap(),
    ];
    let strict = Thresholds::default();
    let loose = Thresholds {
        tau_linear: 1e-4,
        tau_cubic: 1e-4,
        ..strict
    };
    for s in &sets {
        let a = classify_samples(s, &strict).unwrap();
        let b = classify_samples(s, &loose).unwrap();
        assert_ne!(a.family.tag(), "not_a_solution");
        assert_ne!(b.family.tag(), "not_a_solution");
        assert_eq!(a, classify_samples(s, &strict).unwrap());
    }
}

#[test]
fn too_few_points() {
    let s = SampleSet::on_grid(c(0.0, 0.0), c(0.1, 0.0), 3, |x| x.exp()).unwrap();
    assert_eq!(
        classify_samples(&s, &Thresholds::default()),
        Err(ClassifyError::TooFewPoints { got: 3, need: MIN_SAMPLES })
    );
}

#[test]
fn sample_set_validation() {
    let p = vec![(c(0.0, 0.0), c(1.0, 0.0)), (c(0.0, 0.0), c(2.0, 0.0))];
    assert_eq!(SampleSet::new(p), Err(ClassifyError::DuplicateAbscissa));
    let p = vec![(c(0.0, 0.0), c(f64::NAN, 0.0))];
    assert_eq!(SampleSet::new(p), Err(ClassifyError::NonFinite));
}

#[test]
fn csv_round_trip() {
    let s = SampleSet::on_grid(c(0.1, -0.2), c(0.01, 0.003), 50, |x| x.exp() * c(1.0 / 3.0, 0.7)).unwrap();
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("x_re,x_im,w_re,w_im\n"));
    let back = SampleSet::read_csv(&buf[..]).unwrap();
    assert_eq!(back, s);
    assert!(matches!(SampleSet::read_csv("x_re,x_im\n1,2\n".as_bytes()), Err(ClassifyError::Csv(_))));
}
