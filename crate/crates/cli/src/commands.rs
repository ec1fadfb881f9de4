use std::io::Read;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use wpfeq::classify::{classify_samples, ClassifyError, Family, SampleSet, Thresholds};
use wpfeq::elliptic::EllipticContext;
use wpfeq::jet::{self, CofactorReport};
use wpfeq::verify::{
    constant_case_check, derived_determinant_check, factfun_check, family_jets, lattice_expectation, lemma2_check,
    residual, scan as scan_triples, sigma_prediction_check, theorem2_shift_test, Expectation, FunctionFamily,
    ResidualReport, SampleDomain, TripleSampler, VerifyError,
};

use crate::args::*;
use crate::parse;
use crate::report::{emit, to_json, Check, RunReport};
use crate::CliError;

type Outcome = Result<bool, CliError>;

fn from_verify(e: VerifyError) -> CliError {
    match e {
        VerifyError::Jet(_) => CliError::Internal(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn write_report(common: &Common, report: &RunReport) -> Result<(), CliError> {
    let bytes = to_json(report).map_err(|e| CliError::Internal(e.to_string()))?;
    emit(common.out.as_deref(), &bytes).map_err(|e| CliError::Config(format!("cannot write report: {e}")))
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn elapsed(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

// ---------------------------------------------------------------- symbolic

fn symbolic_groups(which: &[Which]) -> Vec<Which> {
    let all = [Which::Factorization, Which::Rewrites, Which::Eqf, Which::Coefficients, Which::Eta];
    if which.contains(&Which::All) {
        return all.to_vec();
    }
    all.into_iter().filter(|w| which.contains(w)).collect()
}

fn group_name(w: Which) -> &'static str {
    match w {
        Which::All => "all",
        Which::Factorization => "factorization",
        Which::Rewrites => "rewrites",
        Which::Eqf => "eqf",
        Which::Coefficients => "coefficients",
        Which::Eta => "eta",
    }
}

pub fn symbolic(a: &SymbolicArgs) -> Outcome {
    let t0 = Instant::now();
    let internal = |e: jet::JetError| CliError::Internal(e.to_string());
    let mut checks = Vec::new();
    let mut lines = Vec::new();
    for w in symbolic_groups(&a.which) {
        let reports: Vec<CofactorReport> = match w {
            Which::Factorization => vec![jet::factorization_check()],
            Which::Rewrites => {
                let (r1, r2) = jet::factor_rewrite_check();
                vec![r1, r2]
            }
            Which::Eqf => vec![jet::eqf_check().map_err(internal)?],
            Which::Coefficients => vec![jet::ode_elimination_check()],
            Which::Eta => vec![jet::eta_expansion_check(5).map_err(internal)?],
            Which::All => unreachable!(),
        };
        let pass = reports.iter().all(|r| r.holds);
        let cofactors: Vec<String> = reports.iter().map(|r| r.cofactor.to_string()).collect();
        lines.push(format!(
            "{}  {:<14} cofactor {}",
            if pass { "PASS" } else { "FAIL" },
            group_name(w),
            cofactors.join(", ")
        ));
        checks.push(Check::new(group_name(w), pass).detail(&reports));
    }
    let report = RunReport::new("symbolic", a, checks, elapsed(t0));
    println!("{}", lines.join("\n"));
    if a.common.out.is_some() {
        write_report(&a.common, &report)?;
    }
    Ok(report.pass)
}

// ---------------------------------------------------------------- verify

fn residual_check(name: &str, r: &ResidualReport, expect_pass: bool) -> Check {
    Check::new(name, r.pass == expect_pass)
        .residual(r.max_residual, r.tolerance)
        .detail(json!({
            "expected": if expect_pass { "pass" } else { "fail" },
            "observed": if r.pass { "pass" } else { "fail" },
            "report": r,
        }))
}

fn resolve_expect(e: Expect, auto: Option<Expectation>) -> Result<Option<bool>, CliError> {
    Ok(match e {
        Expect::Pass => Some(true),
        Expect::Fail => Some(false),
        Expect::Auto => match auto {
            Some(Expectation::Pass) => Some(true),
            Some(Expectation::Fail) => Some(false),
            Some(Expectation::Indeterminate) => None,
            None => return Err(CliError::Config("cannot decide the expected outcome; pass --expect".into())),
        },
    })
}

fn lattice_auto(ctx: &EllipticContext, z: Complex64) -> Option<Expectation> {
    ctx.periods().and(lattice_expectation(ctx, z).ok())
}

fn indeterminate(name: &str, r: &ResidualReport) -> Check {
    Check::new(name, true)
        .residual(r.max_residual, r.tolerance)
        .detail(json!({ "expected": "indeterminate", "observed": if r.pass { "pass" } else { "fail" }, "report": r }))
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let t0 = Instant::now();
    let seed = a.common.seed;
    let tol = |default: f64| positive("tolerance", a.tol.unwrap_or(default));
    let n = |default: usize| {
        let n = a.n.unwrap_or(default);
        if n == 0 {
            Err(CliError::Config("--n must be positive".into()))
        } else {
            Ok(n)
        }
    };
    let mut checks = Vec::new();
    let mut echo = json!({});
    match a.kind {
        VerifyKind::Theorem1 => {
            let ctx = parse::context(&a.lattice)?;
            let d = parse::shift(&ctx, &a.shift, &a.shift_frac)?;
            let (tol, n) = (tol(1e-8)?, n(1000)?);
            let sampler = TripleSampler::for_context(&ctx, seed, n);
            let fam = FunctionFamily::wp(ctx.clone(), d);
            let r = scan_triples(&fam, &fam, &fam, &sampler, tol).map_err(from_verify)?;
            echo = json!({ "shift": d, "three_shift": d * 3.0 });
            match resolve_expect(a.expect, lattice_auto(&ctx, d * 3.0))? {
                None => checks.push(indeterminate("scan", &r)),
                Some(expect_pass) => {
                    checks.push(residual_check("scan", &r, expect_pass));
                    if !expect_pass && ctx.periods().is_some() {
                        let (_, diff) = sigma_prediction_check(&ctx, d, &sampler, 1e-6).map_err(from_verify)?;
                        checks.push(residual_check("sigma_prediction", &diff, true));
                    }
                }
            }
        }
        VerifyKind::Theorem2 => {
            let ctx = parse::context(&a.lattice)?;
            let g = a
                .gammas
                .as_deref()
                .ok_or_else(|| CliError::Config("theorem2 needs --gammas".into()))?;
            let v = parse::reals(g, 6)?;
            let gammas = [0, 2, 4].map(|i| Complex64::new(v[i], v[i + 1]));
            let (tol, n) = (tol(1e-8)?, n(1000)?);
            let sampler = TripleSampler::for_context(&ctx, seed, n);
            let st = theorem2_shift_test(&ctx, gammas, &sampler, tol).map_err(from_verify)?;
            echo = json!({ "gammas": gammas, "gamma3_prime": st.gamma3_prime, "lattice_expectation": st.expected });
            match resolve_expect(a.expect, Some(st.expected))? {
                None => checks.push(indeterminate("scan", &st.report)),
                Some(e) => checks.push(residual_check("scan", &st.report, e)),
            }
        }
        VerifyKind::Sigma => {
            let ctx = parse::context(&a.lattice)?;
            let (tol, n) = (tol(1e-8)?, n(500)?);
            let r = lemma2_check(&ctx, &TripleSampler::for_context(&ctx, seed, n), tol).map_err(from_verify)?;
            let e = resolve_expect(a.expect, Some(Expectation::Pass))?.unwrap_or(true);
            checks.push(residual_check("sigma_quotient", &r, e));
        }
        VerifyKind::Derived => {
            let ctx = parse::context(&a.lattice)?;
            let d = parse::shift(&ctx, &a.shift, &a.shift_frac)?;
            let kls = parse::reals(&a.kls, 3)?;
            if kls.iter().any(|k| k.fract() != 0.0 || !(1.0..=5.0).contains(k)) {
                return Err(CliError::Config("--kls entries must be integers in 1..=5".into()));
            }
            let (k, l, s) = (kls[0] as usize, kls[1] as usize, kls[2] as usize);
            let (tol, n) = (tol(1e-7)?, n(200)?);
            let fam = FunctionFamily::wp(ctx.clone(), d);
            let sampler = TripleSampler::for_context(&ctx, seed, n);
            let (e7, e8) = derived_determinant_check(&fam, &fam, &fam, (k, l, s), &sampler, tol).map_err(from_verify)?;
            let e = resolve_expect(a.expect, Some(Expectation::Pass))?.unwrap_or(true);
            echo = json!({ "shift": d, "k": k, "l": l, "s": s });
            checks.push(residual_check("three_column_determinant", &e7, e));
            checks.push(residual_check("differentiated_determinant", &e8, e));
        }
        VerifyKind::Factfun => {
            let (fam, sampler, tol, h) = match a.family {
                FactfunFamily::Wp => {
                    let ctx = parse::context(&a.lattice)?;
                    let d = parse::shift(&ctx, &a.shift, &a.shift_frac)?;
                    echo = json!({ "shift": d });
                    let s = TripleSampler::for_context(&ctx, seed, n(200)?);
                    (FunctionFamily::wp(ctx, d), s, tol(1e-6)?, a.h.unwrap_or(1e-2))
                }
                FactfunFamily::Exp => {
                    let one = Complex64::new(1.0, 0.0);
                    let fam = FunctionFamily::exponential(one, Complex64::new(0.0, 0.0), one).map_err(from_verify)?;
                    let s = TripleSampler::unconstrained(seed, n(200)?, 1.0).with_constraint(true);
                    (fam, s, tol(1e-9)?, a.h.unwrap_or(0.05))
                }
            };
            let h = positive("--h", h)?;
            let r = factfun_check(&fam, &sampler, h, tol).map_err(from_verify)?;
            let e = resolve_expect(a.expect, Some(Expectation::Pass))?.unwrap_or(true);
            checks.push(residual_check("operator_annihilation", &r, e));
        }
        VerifyKind::Constant => {
            let (df, dg) = (parse::complex(&a.delta_f)?, parse::complex(&a.delta_g)?);
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let ff = if a.zero_f {
                FunctionFamily::constant(zero)
            } else {
                FunctionFamily::exponential(one, zero, df).map_err(from_verify)?
            };
            let fg = FunctionFamily::exponential(one, zero, dg).map_err(from_verify)?;
            let (tol, n) = (tol(1e-12)?, n(200)?);
            let sampler = TripleSampler::unconstrained(seed, n, 1.0).with_constraint(true);
            let r = constant_case_check(&ff, &fg, &sampler, tol).map_err(from_verify)?;
            let auto = if a.zero_f || df == dg { Expectation::Pass } else { Expectation::Fail };
            let e = resolve_expect(a.expect, Some(auto))?.unwrap_or(true);
            checks.push(residual_check("two_function_determinant", &r, e));
        }
    }
    let params = json!({ "args": a, "resolved": echo });
    let name = format!("verify {}", serde_json::to_value(a.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
    let report = RunReport::new(name, params, checks, elapsed(t0));
    write_report(&a.common, &report)?;
    Ok(report.pass)
}

// ---------------------------------------------------------------- fit

fn classify_error(e: ClassifyError) -> CliError {
    match e {
        ClassifyError::InvalidArgument(m) => CliError::Config(m),
        other => CliError::Input(other.to_string()),
    }
}

fn family_matches(f: &Family, want: FamilyTag) -> bool {
    match want {
        FamilyTag::Any => !matches!(f, Family::NotASolution { .. }),
        FamilyTag::Weierstrass => matches!(f, Family::Weierstrass { .. }),
        FamilyTag::Exponential => matches!(f, Family::Exponential { .. }),
        FamilyTag::Linear => matches!(f, Family::Linear { .. }),
        FamilyTag::Constant => matches!(f, Family::Constant { .. }),
    }
}

pub fn fit(a: &FitArgs) -> Outcome {
    let t0 = Instant::now();
    let samples = if a.input.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(io_err)?;
        SampleSet::read_csv(&buf[..])
    } else {
        let f = std::fs::File::open(&a.input).map_err(|e| CliError::Input(format!("{}: {e}", a.input.display())))?;
        SampleSet::read_csv(f)
    }
    .map_err(classify_error)?;
    let mut th = Thresholds {
        stencil_order: a.stencil,
        ..Thresholds::default()
    };
    if let Some(t) = a.tol {
        let t = positive("tolerance", t)?;
        th.tau_linear = t;
        th.tau_cubic = t;
    }
    let c = classify_samples(&samples, &th).map_err(classify_error)?;
    let pass = a.expect.is_none_or(|want| family_matches(&c.family, want));
    let check = Check::new("classification", pass).detail(json!({
        "family": c.family.tag(),
        "expected": a.expect,
        "roundtrip_residual": c.roundtrip_residual,
    }));
    let check = match c.roundtrip_residual {
        Some(r) => Check { max_residual: Some(r), ..check },
        None => check,
    };
    let params = json!({ "args": a, "thresholds": th, "samples": samples.len() });
    let mut report = RunReport::new("fit", params, vec![check], elapsed(t0));
    report.result = Some(serde_json::to_value(&c).map_err(|e| CliError::Internal(e.to_string()))?);
    write_report(&a.common, &report)?;
    Ok(report.pass)
}

// ---------------------------------------------------------------- scan

/// Grid points for `x`: cell-centred on the fundamental cell, or on the
/// square inscribed in the sampling disc.
fn x_grid(domain: &SampleDomain, n: usize) -> Vec<Complex64> {
    let u = |i: usize| (i as f64 + 0.5) / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(match domain {
                SampleDomain::Cell(p) => p.point(u(i), u(j)),
                SampleDomain::Disc(r) => {
                    let h = r / std::f64::consts::SQRT_2;
                    Complex64::new(h * (2.0 * u(i) - 1.0), h * (2.0 * u(j) - 1.0))
                }
                SampleDomain::Box(h) => Complex64::new(h * (2.0 * u(i) - 1.0), h * (2.0 * u(j) - 1.0)),
            });
        }
    }
    out
}

const Y_ATTEMPTS: u64 = 1000;

pub fn scan(a: &ScanArgs) -> Outcome {
    let t0 = Instant::now();
    if a.grid == 0 {
        return Err(CliError::Config("--grid must be positive".into()));
    }
    let tol = positive("tolerance", a.tol)?;
    let ctx = parse::context(&a.lattice)?;
    let d = parse::shift(&ctx, &a.shift, &a.shift_frac)?;
    let fam = FunctionFamily::wp(ctx.clone(), d);
    let sampler = TripleSampler::for_context(&ctx, a.common.seed, 1);
    let mut rows = Vec::new();
    for (k, x) in x_grid(&sampler.domain, a.grid).into_iter().enumerate() {
        let mut found = None;
        for attempt in 0..Y_ATTEMPTS {
            let y = sampler.triple(k as u64 * Y_ATTEMPTS + attempt)[1];
            let t = [x, y, -x - y];
            if sampler.is_degenerate(&t) || t[1..].iter().any(|z| fam.pole_distance(*z) < sampler.pole_exclusion) {
                continue;
            }
            match residual(&fam, &fam, &fam, x, y) {
                Ok(r) => {
                    found = Some((y, r));
                    break;
                }
                Err(VerifyError::Elliptic(_)) => continue,
                Err(e) => return Err(from_verify(e)),
            }
        }
        let (y, r) = found.ok_or_else(|| CliError::Config(format!("no admissible y for grid point {x}")))?;
        rows.push((x, y, r));
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(["x_re", "x_im", "y_re", "y_im", "residual"]).map_err(csv_err)?;
    for (x, y, r) in &rows {
        w.write_record([x.re, x.im, y.re, y.im, *r].map(|v| format!("{v:.16e}"))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    emit(Some(&a.csv), &bytes).map_err(|e| CliError::Config(format!("cannot write csv: {e}")))?;

    let max = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let mean = rows.iter().map(|r| r.2).sum::<f64>() / rows.len() as f64;
    let min = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let check = Check::new("grid", max <= tol)
        .residual(max, tol)
        .detail(json!({ "rows": rows.len(), "mean_residual": mean, "min_residual": min }));
    let report = RunReport::new("scan", json!({ "args": a, "shift": d }), vec![check], elapsed(t0));
    if a.csv.as_os_str() == "-" && a.common.out.is_none() {
        let bytes = to_json(&report).map_err(|e| CliError::Internal(e.to_string()))?;
        eprint!("{}", String::from_utf8_lossy(&bytes));
    } else {
        write_report(&a.common, &report)?;
    }
    Ok(true)
}

// ---------------------------------------------------------------- gen

pub fn gen(a: &GenArgs) -> Outcome {
    let (alpha, beta, delta, shift) = (
        parse::complex(&a.alpha)?,
        parse::complex(&a.beta)?,
        parse::complex(&a.delta)?,
        parse::complex(&a.shift)?,
    );
    let zero = Complex64::new(0.0, 0.0);
    let fam = match a.family {
        GenFamily::Wp => {
            if delta == zero {
                return Err(CliError::Config("--delta must be nonzero".into()));
            }
            let ctx = parse::context(&a.lattice)?;
            FunctionFamily::wp(ctx, zero)
                .transform(alpha, beta, delta, shift)
                .map_err(from_verify)?
        }
        GenFamily::Exp => FunctionFamily::exponential(alpha, beta, delta).map_err(from_verify)?,
        GenFamily::Linear => FunctionFamily::linear(alpha, beta).map_err(from_verify)?,
        GenFamily::Constant => FunctionFamily::constant(beta),
    };
    let xs = parse::grid(&a.grid)?;
    let mut pts = Vec::with_capacity(xs.len());
    for x in xs {
        let x = Complex64::new(x, a.grid_im);
        let w = family_jets(&fam, x, 0).map_err(from_verify)?.value();
        pts.push((x, w));
    }
    let s = SampleSet::new(pts).map_err(|e| CliError::Config(e.to_string()))?;
    let mut buf = Vec::new();
    s.write_csv(&mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    emit(a.common.out.as_deref(), &buf).map_err(|e| CliError::Config(format!("cannot write samples: {e}")))?;
    Ok(true)
}

// ---------------------------------------------------------------- eval

#[derive(Serialize)]
struct Evaluation {
    z: Complex64,
    g2: Complex64,
    g3: Complex64,
    periods: Option<[Complex64; 2]>,
    wp: Vec<Complex64>,
    zeta: Option<Complex64>,
    sigma: Option<Complex64>,
}

pub fn eval(a: &EvalArgs) -> Outcome {
    let t0 = Instant::now();
    let ctx: Arc<EllipticContext> = parse::context(&a.lattice)?;
    let z = parse::complex(&a.z)?;
    if a.order > wpfeq::elliptic::MAX_JET_ORDER {
        return Err(CliError::Config(format!("--order must be at most {}", wpfeq::elliptic::MAX_JET_ORDER)));
    }
    let jets = ctx.jets(z, a.order).map_err(|e| CliError::Config(e.to_string()))?;
    let ev = Evaluation {
        z,
        g2: ctx.g2(),
        g3: ctx.g3(),
        periods: ctx.periods().map(|p| [p.w1, p.w2]),
        wp: jets.values,
        zeta: ctx.zeta(z).ok(),
        sigma: ctx.sigma(z).ok(),
    };
    let mut report = RunReport::new("eval", a, vec![Check::new("evaluation", true)], elapsed(t0));
    report.result = Some(serde_json::to_value(&ev).map_err(|e| CliError::Internal(e.to_string()))?);
    write_report(&a.common, &report)?;
    Ok(true)
}
