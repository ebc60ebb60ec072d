//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use orthwalk::asymptotics::predict::{highly_symmetric_constant, zero_drift_constant};
use orthwalk::asymptotics::residue::residue_integral_estimate;
use orthwalk::asymptotics::saddle::FD_STEP;
use orthwalk::asymptotics::{
    gamma_set, log_s_bar_second_derivative, predict, predict_with_second_order, saddle_data, second_order_main,
    QuadratureSpec, Theorem,
};
use orthwalk::corpus::{corpus, entry};
use orthwalk::diagonal::{build_rep, diagonal_coeffs};
use orthwalk::enumerate::{count_walks, ArithmeticMode, CountSequence};
use orthwalk::exact::{self, gauss_string, ratio};
use orthwalk::fitting::{compare, detect_period, estimate_base_for_class, Tolerances, VerificationReport};
use orthwalk::model::{classify, decompose, ModelClass, WalkModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_counts, random_model, Shape};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn model(name: &str) -> WalkModel {
    entry(name).expect("corpus entry").model()
}

fn float_counts(m: &WalkModel, n: usize) -> CountSequence {
    count_walks(m, n, ArithmeticMode::Float64).expect("float enumeration")
}

fn report(name: &str, n: usize) -> (VerificationReport, Duration) {
    let start = Instant::now();
    let m = model(name);
    let seq = float_counts(&m, n);
    let pred = predict_with_second_order(&m).expect("prediction");
    let r = compare(&pred, &seq, &Tolerances::default()).expect("fit");
    (r, start.elapsed())
}

fn oracle_diagonal_agreement() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for e in corpus() {
        let m = e.model();
        let n = if m.dimension() == 2 { 15 } else { 10 };
        let diag = diagonal_coeffs(&build_rep(&m).expect("rep"), n).expect("diagonal");
        let counts = count_walks(&m, n, ArithmeticMode::Exact).expect("counts");
        let ok = counts.exact_values() == Some(&diag[..]);
        pass &= ok;
        notes.push(format!("{} n<={n} {}", e.name, if ok { "equal" } else { "DIFFER" }));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    outcome(pass, format!("{}; {:.1}s (limit 30s)", notes.join(", "), elapsed.as_secs_f64()))
}

fn theorem1_cardinal() -> Outcome {
    let (r, t) = report("cardinal-2d", 400);
    let c0 = r.classes[0].fitted_c0;
    let err = rel(c0, 4.0 / PI);
    outcome(
        err <= 0.01 && t < Duration::from_secs(10),
        format!("c0 = {c0:.6} vs 4/pi = {:.6}, rel err {err:.2e} (tol 1e-2); {:.2}s (limit 10s)", 4.0 / PI, t.as_secs_f64()),
    )
}

fn theorem2_positive_drift() -> Outcome {
    let (r, _) = report("posdrift-2d", 400);
    let want = 3f64.sqrt() / (2.0 * PI.sqrt());
    let c0 = r.classes[0].fitted_c0;
    let err = rel(c0, want);
    outcome(err <= 0.01, format!("c0 = {c0:.6} vs sqrt(3)/(2 sqrt(pi)) = {want:.6}, rel err {err:.2e} (tol 1e-2)"))
}

fn theorem3_negative_drift() -> Outcome {
    let m = model("negdrift-2d");
    let seq = float_counts(&m, 400);
    let period = detect_period(&seq).expect("period");
    let pred = predict(&m).expect("prediction");
    let r = compare(&pred, &seq, &Tolerances::default()).expect("fit");
    let targets = [24.0 * 2f64.sqrt() / PI, 32.0 / PI];
    let base = 2.0 * 2f64.sqrt();
    let mut pass = period == 2 && r.classes.len() == 2;
    let mut notes = vec![format!("detected period {period}")];
    for (class, want) in r.classes.iter().zip(targets) {
        let err = rel(class.fitted_c0, want);
        let fitted_base = estimate_base_for_class(&seq, 2, class.residue).expect("base");
        let base_err = rel(fitted_base, base);
        pass &= err <= 0.015 && base_err <= 0.005;
        notes.push(format!(
            "class {}: c0 {:.4} vs {want:.4} (rel {err:.2e}, tol 1.5e-2), base {fitted_base:.5} (rel {base_err:.2e}, tol 5e-3)",
            class.residue, class.fitted_c0
        ));
    }
    outcome(pass, notes.join("; "))
}

fn theorem4_weighted_zero_drift() -> Outcome {
    let (r, _) = report("zerodrift-2d-weighted", 400);
    let c = &r.classes[0];
    let (c0_want, c1_want) = (2.0 * 2f64.sqrt() / PI, 1.0 / PI.sqrt());
    let (e0, e1) = (rel(c.fitted_c0, c0_want), rel(c.fitted_c1, c1_want));
    let kappa = second_order_main(&model("zerodrift-2d-weighted")).expect("kappa").to_f64();
    let ek = (kappa - c1_want).abs();
    outcome(
        e0 <= 0.01 && e1 <= 0.05 && ek <= 1e-12,
        format!(
            "c0 {:.6} vs {c0_want:.6} (rel {e0:.2e}, tol 1e-2); c1 {:.6} vs {c1_want:.6} (rel {e1:.2e}, tol 5e-2); closed-form kappa off by {ek:.1e} (tol 1e-12)",
            c.fitted_c0, c.fitted_c1
        ),
    )
}

fn three_dimensional_zero_drift() -> Outcome {
    let cases = [
        ("zerodrift-3d-a", 8.0 * 2f64.sqrt() / (3.0 * PI.powf(1.5)), -8.0 / (9.0 * PI)),
        ("zerodrift-3d-b", 4.0 * 2f64.sqrt() / PI.powf(1.5), 0.0),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, c0_want, kappa_want) in cases {
        let (r, t) = report(name, 80);
        let c0 = r.classes[0].fitted_c0;
        let err = rel(c0, c0_want);
        let kappa = second_order_main(&model(name)).expect("kappa").to_f64();
        let ek = (kappa - kappa_want).abs();
        pass &= err <= 0.03 && ek <= 1e-12 && t < Duration::from_secs(120);
        notes.push(format!(
            "{name}: c0 {c0:.5} vs {c0_want:.5} (rel {err:.2e}, tol 3e-2), kappa {kappa:.6} vs {kappa_want:.6} (off {ek:.1e}), {:.2}s",
            t.as_secs_f64()
        ));
    }
    outcome(pass, notes.join("; "))
}

fn gamma_membership() -> Outcome {
    let g = gamma_set(&model("zerodrift-2d-weighted")).expect("gamma");
    let mut members: Vec<String> = g.points.iter().map(|p| format!("({})", p.w.iter().map(gauss_string).collect::<Vec<_>>().join(","))).collect();
    members.sort();
    let mut want = vec!["(1,1)", "(1,-1)", "(-1,i)", "(-1,-i)"];
    want.sort();
    let mut pass = members == want;
    let t_ok = g.points.iter().all(|p| exact::gauss_norm_sqr(&p.t_coordinate) == ratio(1, 16));
    pass &= t_ok;
    let mut missing = Vec::new();
    for e in corpus() {
        let has_ones = gamma_set(&e.model()).map(|g| g.points.iter().any(|p| p.is_all_ones())).unwrap_or(false);
        if !has_ones {
            missing.push(e.name);
        }
    }
    pass &= missing.is_empty();
    outcome(
        pass,
        format!(
            "members {{{}}}; all |t| = 1/4: {t_ok}; all-ones missing from: {}",
            members.join(", "),
            if missing.is_empty() { "none".to_string() } else { missing.join(", ") }
        ),
    )
}

fn hessian_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for e in corpus() {
        let m = e.model();
        let dec = decompose(&m).expect("decompose");
        let s = exact::to_f64(&m.total_weight());
        for (axis, b) in dec.forward_weights.iter().enumerate() {
            let fd = log_s_bar_second_derivative(&m, axis, FD_STEP).expect("fd");
            let want = -2.0 * exact::to_f64(b) / s;
            checked += 1;
            if (fd - want).abs() > 1e-6 {
                failures.push(format!("{} axis {}: {fd:.6} vs {want:.6}", e.name, axis + 1));
            }
        }
    }
    // Printed Gaussian exponents c_j and amplitude 2^d + i Σ γ_j θ_j²/θ_d.
    let r = |n, d| ratio(n, d);
    let printed = [
        ("zerodrift-2d-weighted", vec![r(1, 4), r(1, 2)], r(4, 1), vec![r(1, 1)]),
        ("zerodrift-3d-a", vec![r(3, 8), r(3, 8), r(1, 2)], r(8, 1), vec![r(-1, 1), r(-1, 1)]),
        ("zerodrift-3d-b", vec![r(1, 4), r(1, 4), r(1, 2)], r(8, 1), vec![r(2, 1), r(-2, 1)]),
    ];
    for (name, c, center, gamma) in printed {
        let m = model(name);
        let ones = gamma_set(&m).expect("gamma").points.into_iter().find(|p| p.is_all_ones()).expect("all-ones");
        match saddle_data(&m, &ones) {
            Ok(sd) => {
                let show = |v: &[num_rational::BigRational]| v.iter().map(exact::rational_string).collect::<Vec<_>>().join(",");
                if sd.hessian_coefficients != c || sd.amplitude_at_center != center || sd.amplitude_coefficients != gamma {
                    failures.push(format!(
                        "{name} saddle data c=({}) center {} gamma=({}) vs printed c=({}) center {} gamma=({})",
                        show(&sd.hessian_coefficients),
                        exact::rational_string(&sd.amplitude_at_center),
                        show(&sd.amplitude_coefficients),
                        show(&c),
                        exact::rational_string(&center),
                        show(&gamma)
                    ));
                }
            }
            Err(err) => failures.push(format!("{name} saddle data: {err}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} axis checks plus 3 saddle records; mismatches: {}", if failures.is_empty() { "none".into() } else { failures.join("; ") }),
    )
}

fn residue_quadrature() -> Outcome {
    let start = Instant::now();
    let m = model("zerodrift-2d-weighted");
    let seq = count_walks(&m, 200, ArithmeticMode::Exact).expect("counts");
    let spec = QuadratureSpec::default();
    let e200 = residue_integral_estimate(&m, 200, &spec, Some(&seq)).expect("n = 200").relative_error_vs_oracle.expect("oracle");
    let e50 = residue_integral_estimate(&m, 50, &spec, Some(&seq)).expect("n = 50").relative_error_vs_oracle.expect("oracle");
    let elapsed = start.elapsed();
    outcome(
        e200 <= 0.03 && e200 < e50 && elapsed < Duration::from_secs(60),
        format!("rel err n=200 {e200:.3} (tol 0.03), n=50 {e50:.3}; decreasing: {}; {:.1}s", e200 < e50, elapsed.as_secs_f64()),
    )
}

fn random_model_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let shapes = [Shape::HighlySymmetric, Shape::MostlySymmetric, Shape::Arbitrary];
    let mut failures: Vec<String> = Vec::new();
    let mut counts = [0usize; 5];
    let instances = 60;
    for i in 0..instances {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let shape = shapes[i % 3];
        let max_steps = if d == 2 { 8 } else { 6 };
        let m = random_model(&mut rng, d, shape, max_steps);
        let tag = format!("#{i} {}", m.canonical_string());

        // Scaling weights by λ scales bases by λ and keeps constants.
        if let Ok(p) = predict_with_second_order(&m) {
            let lambda = [ratio(2, 1), ratio(1, 3), ratio(5, 2)][rng.gen_range(0..3)].clone();
            let q = predict_with_second_order(&m.scale_weights(&lambda)).expect("scaled prediction");
            let lf = exact::to_f64(&lambda);
            let ok = p.classes.iter().zip(&q.classes).all(|(a, b)| {
                a.constant_exact == b.constant_exact && rel(b.base, lf * a.base) < 1e-12 && a.order == b.order
            }) && p.second_order.as_ref().map(|s| &s.kappa_exact) == q.second_order.as_ref().map(|s| &s.kappa_exact);
            counts[0] += 1;
            if !ok {
                failures.push(format!("scaling {tag}"));
            }
        }

        // Classification is equivariant under permutation and reflection.
        let c = classify(&m);
        let mut perm: Vec<usize> = (0..d).collect();
        perm.rotate_left(rng.gen_range(0..d));
        let axis = rng.gen_range(0..d);
        let moved = m.permute_axes(&perm).reflect_axis(axis);
        let cm = classify(&moved);
        let ok = match (&c.class, &cm.class) {
            (ModelClass::HighlySymmetric, ModelClass::HighlySymmetric) => true,
            (ModelClass::Unsupported(_), ModelClass::Unsupported(_)) => true,
            (
                ModelClass::MostlySymmetric { asymmetric_axis: a, drift: r, .. },
                ModelClass::MostlySymmetric { asymmetric_axis: b, drift: s, .. },
            ) => perm[*b] == *a && if *b == axis { *s == -r.clone() } else { s == r },
            _ => false,
        };
        counts[1] += 1;
        if !ok {
            failures.push(format!("equivariance {tag}"));
        }

        // Both closed forms agree on highly symmetric models.
        if c.class == ModelClass::HighlySymmetric {
            counts[2] += 1;
            let hs = highly_symmetric_constant(&m);
            if hs != zero_drift_constant(&m) || predict(&m).map(|p| p.theorem) != Ok(Theorem::Thm1) {
                failures.push(format!("thm1=thm4 {tag}"));
            }
        }

        // s_n ≤ S(1)^n and path-string equality.
        let seq = count_walks(&m, 12, ArithmeticMode::Exact).expect("counts");
        let exact_values = seq.exact_values().expect("exact");
        let s1 = m.total_weight();
        let mut power = ratio(1, 1);
        let mut bounded = true;
        for v in exact_values {
            bounded &= *v <= power;
            power *= &s1;
        }
        counts[3] += 1;
        if !bounded {
            failures.push(format!("bound {tag}"));
        }
        counts[4] += 1;
        if brute_force_counts(&m, 8)[..] != exact_values[..=8] {
            failures.push(format!("brute force {tag}"));
        }
    }
    outcome(
        failures.is_empty() && counts[2] > 0,
        format!(
            "{instances} models (d = 2, 3): scaling {} / equivariance {} / thm1=thm4 {} / bound {} / brute force {} checked; failures: {}",
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            counts[4],
            if failures.is_empty() { "none".into() } else { failures.join("; ") }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle and diagonal agree exactly", oracle_diagonal_agreement),
        ("highly symmetric constant (cardinal)", theorem1_cardinal),
        ("positive drift constant", theorem2_positive_drift),
        ("negative drift period, parity constants, base", theorem3_negative_drift),
        ("zero drift constants and second order", theorem4_weighted_zero_drift),
        ("three-dimensional zero drift", three_dimensional_zero_drift),
        ("critical set", gamma_membership),
        ("Hessian and saddle data", hessian_suite),
        ("residue quadrature", residue_quadrature),
        ("random-model properties", random_model_properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({:.2}s) {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            name,
            start.elapsed().as_secs_f64(),
            result.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
