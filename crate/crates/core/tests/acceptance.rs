//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p bergman-core --test acceptance -- --nocapture` to
//! see the per-criterion lines.

use bergman_core::conditions::{self, CondConfig, ConditionId};
use bergman_core::kernel::{self, kernel_coeffs, CoeffPoly, KernelCoeffs};
use bergman_core::operators::{self, OpConfig};
use bergman_core::oracle;
use bergman_core::quad::{self, SupConfig, Verdict};
use bergman_core::weights::{self, RadialWeight};
use bergman_core::Overall;
use num_complex::Complex64;

fn report(criterion: u32, name: &str, pass: bool, detail: String) {
    println!(
        "acceptance {criterion}: {} — {name} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {name}: {detail}");
}

fn w(spec: &str) -> RadialWeight {
    RadialWeight::parse(spec).unwrap()
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Kernel series sized for the deepest scan level, from a probe of the
/// coefficient growth.
fn sized_coeffs(weight: &RadialWeight, x_deepest: f64) -> KernelCoeffs {
    let probe = kernel_coeffs(weight, 512).unwrap();
    let n = kernel::suggested_terms(x_deepest, probe.growth_exponent(), 1, 1e-10);
    kernel_coeffs(weight, n * 13 / 10).unwrap()
}

#[test]
fn criterion_1_kernel_oracle() {
    let start = std::time::Instant::now();
    let mut worst = 0.0f64;
    for alpha in [0.0, 1.0, 2.5] {
        let weight = w(&format!("std:a={alpha}"));
        let k = kernel_coeffs(&weight, 4096).unwrap();
        for n_deriv in [0u32, 1] {
            for i in 0..10 {
                for j in 0..10 {
                    let a = real(0.9 * i as f64 / 9.0);
                    let z = real(0.9 * j as f64 / 9.0);
                    let got = k.eval(a, z, n_deriv, 1e-12).unwrap();
                    let want = oracle::std_kernel_deriv(alpha, a, z, n_deriv);
                    let scale = want.norm().max(1e-12);
                    worst = worst.max((got - want).norm() / scale);
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "kernel evaluation matches the closed-form oracle",
        worst <= 1e-9 && elapsed <= 10.0,
        format!("max rel err {worst:.3e}, {elapsed:.2}s"),
    );
}

#[test]
fn criterion_2_kernel_growth_scans() {
    let start = std::time::Instant::now();
    let depth = 12u32;
    let cfg = SupConfig::with_depth(depth);
    let grid = cfg.grid;
    let x_deepest = grid.r(depth);
    let mut failures = Vec::new();

    for spec in ["std:a=0", "std:a=1", "pow:a=2", "reglog:a=0,b=2"] {
        let weight = w(spec);
        let k = sized_coeffs(&weight, x_deepest);
        for p in [1.0, 2.0, 4.0] {
            for n_deriv in [0u32, 1] {
                // circle means against the mean comparand, diagonal path
                let mean_scan = kernel::ratio_scan(
                    |lvl| k.circle_mean(real(grid.r(lvl)), grid.r(lvl), p, n_deriv),
                    |lvl| kernel::mean_comparand(&weight, p, n_deriv, grid.r(lvl) * grid.r(lvl), 1e-10),
                    &cfg,
                )
                .unwrap();
                if !mean_scan.comparable() {
                    failures.push(format!(
                        "mean {spec} p={p} N={n_deriv}: {:?}/{:?}",
                        mean_scan.upper.verdict, mean_scan.lower.verdict
                    ));
                }
                // weighted norms against the norm comparand, v = omega
                let norm_scan = kernel::ratio_scan(
                    |lvl| k.bergman_norm(real(grid.r(lvl)), &weight, p, n_deriv),
                    |lvl| kernel::norm_comparand(&weight, &weight, p, n_deriv, grid.r(lvl), 1e-10),
                    &cfg,
                )
                .unwrap();
                if !norm_scan.comparable() {
                    failures.push(format!(
                        "norm {spec} p={p} N={n_deriv}: {:?}/{:?}",
                        norm_scan.upper.verdict, norm_scan.lower.verdict
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        2,
        "kernel mean and norm growth scans bounded both ways",
        failures.is_empty() && elapsed <= 300.0,
        if failures.is_empty() {
            format!("24 weight/p/N combos x 2 scans, {elapsed:.1}s")
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_3_pinned_values() {
    let cfg = CondConfig::default();
    let mut details = Vec::new();
    let mut ok = true;

    let t4d = conditions::eval_condition(ConditionId::T4d, &w("pow:a=0"), &w("pow:a=0"), 2.0, &cfg).unwrap();
    let pass = (t4d.sup_value - 1.0).abs() <= 1e-6;
    ok &= pass;
    details.push(format!("T4d sup = {:.9}", t4d.sup_value));

    let t5c = conditions::eval_condition(ConditionId::T5c, &w("pow:a=1"), &w("pow:a=0"), 1.0, &cfg).unwrap();
    let pass = (t5c.sup_value - 2.0).abs() <= 1e-6;
    ok &= pass;
    details.push(format!("T5c sup = {:.9}", t5c.sup_value));

    let q = operators::hardy_q(&w("pow:a=0"), 2.0, 0.9, &OpConfig::default()).unwrap();
    let pass = (q - 0.5295).abs() <= 1e-4;
    ok &= pass;
    details.push(format!("Q(0.9) = {q:.6}"));

    let lp1 = kernel::lp1_check(&CoeffPoly(vec![0.0, 1.0]), &w("pow:a=0")).unwrap();
    let pass = (lp1.lhs - 0.5).abs() <= 1e-8 && (lp1.rhs - 0.5).abs() <= 1e-8;
    ok &= pass;
    details.push(format!("LP1 = {:.10}/{:.10}", lp1.lhs, lp1.rhs));

    report(3, "exact pinned values", ok, details.join(", "));
}

#[test]
fn criterion_4_standard_weight_criterion() {
    let cfg = CondConfig::default();
    let mut mismatches = Vec::new();
    let mut boundaries = 0u32;
    for alpha in [0.0, 1.0, 2.5] {
        for beta in [0.0, 1.0, 2.5] {
            for p in [1.5, 2.0, 3.0] {
                let omega = w(&format!("pow:a={alpha}"));
                let v = w(&format!("pow:a={beta}"));
                let rep = conditions::check_pair(&omega, &v, p, &[], &cfg).unwrap();
                match oracle::std_verdict(alpha, beta, p) {
                    oracle::Criterion::Boundary => {
                        boundaries += 1;
                        if !rep.boundary {
                            mismatches.push(format!("({alpha},{beta},{p}): boundary not flagged"));
                        }
                    }
                    oracle::Criterion::Holds => {
                        if rep.overall != Overall::Bounded {
                            mismatches.push(format!("({alpha},{beta},{p}): want Bounded, got {:?}", rep.overall));
                        }
                    }
                    oracle::Criterion::Fails => {
                        if rep.overall != Overall::Unbounded {
                            mismatches.push(format!("({alpha},{beta},{p}): want Unbounded, got {:?}", rep.overall));
                        }
                    }
                }
            }
        }
    }
    report(
        4,
        "27-point standard-weight criterion agreement",
        mismatches.is_empty() && boundaries == 1,
        if mismatches.is_empty() {
            format!("26 verdicts match, {boundaries} boundary flagged")
        } else {
            mismatches.join("; ")
        },
    );
}

fn regular_matrix() -> Vec<(RadialWeight, RadialWeight)> {
    vec![
        (w("pow:a=0"), w("pow:a=0")),
        (w("pow:a=1"), w("pow:a=0")),
        (w("pow:a=2"), w("pow:a=0")),
        (w("pow:a=2"), w("pow:a=1")),
        (w("pow:a=0"), w("pow:a=0.2")),
        (w("pow:a=2.5"), w("pow:a=1")),
        (w("pow:a=0.5"), w("pow:a=0")),
        (w("std:a=1"), w("std:a=0")),
        (w("std:a=2"), w("std:a=2")),
        (w("reglog:a=0,b=2"), w("pow:a=0")),
        (w("pow:a=0"), w("pow:a=2.5")),
        (w("pow:a=0"), w("pow:a=3")),
    ]
}

#[test]
fn criterion_5_condition_equivalence_matrix() {
    let start = std::time::Instant::now();
    let cfg = CondConfig::default();
    let mut conflicts = Vec::new();
    let mut inconclusive = 0u32;
    for (omega, v) in regular_matrix() {
        for p in [1.5, 2.0, 3.0] {
            let rep = conditions::check_pair(&omega, &v, p, &[], &cfg).unwrap();
            for (i, a) in rep.conditions.iter().enumerate() {
                for b in rep.conditions.iter().skip(i + 1) {
                    let (va, vb) = (a.verdict.verdict, b.verdict.verdict);
                    if (va == Verdict::Bounded && vb == Verdict::Divergent)
                        || (va == Verdict::Divergent && vb == Verdict::Bounded)
                    {
                        conflicts.push(format!(
                            "({}, {}, p={p}): {} {va:?} vs {} {vb:?}",
                            rep.omega, rep.v, a.id, b.id
                        ));
                    }
                }
                if a.verdict.verdict == Verdict::Inconclusive {
                    inconclusive += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        5,
        "pairwise condition agreement on the 12-pair matrix",
        conflicts.is_empty(),
        if conflicts.is_empty() {
            format!("36 pair/exponent checks, {inconclusive} inconclusive (after deepening), {elapsed:.1}s")
        } else {
            conflicts.join("; ")
        },
    );
}

#[test]
fn criterion_6_exponent_window() {
    let cfg = CondConfig::default();
    let p = 2.0;
    let mut failures = Vec::new();
    for alpha in [0.0, 1.0, 2.0] {
        for beta in [0.0, 1.0, 2.0] {
            let ratio = (beta + 1.0) / (alpha + 1.0); // kappa_omega / kappa_v
            if ratio >= p {
                continue; // criterion does not hold (or boundary)
            }
            let omega = w(&format!("pow:a={alpha}"));
            let v = w(&format!("pow:a={beta}"));
            let want = p - ratio;
            let ew = conditions::exponent_window(&omega, &v, p, &cfg).unwrap();
            if (ew.m - want).abs() > 0.05 * want {
                failures.push(format!("({alpha},{beta}): m = {:.4}, want {want:.4}", ew.m));
            }
            if (ew.big_m - want).abs() > 0.05 * want {
                failures.push(format!("({alpha},{beta}): M = {:.4}, want {want:.4}", ew.big_m));
            }
        }
    }
    report(
        6,
        "self-improvement window matches p - kappa ratio within 5%",
        failures.is_empty(),
        if failures.is_empty() { "7 pairs".to_string() } else { failures.join("; ") },
    );
}

#[test]
fn criterion_7_operator_dichotomy() {
    let op_cfg = OpConfig::default();
    let mut failures = Vec::new();

    let regular: Vec<RadialWeight> = [
        "pow:a=0",
        "pow:a=0.2",
        "pow:a=0.5",
        "pow:a=1",
        "pow:a=2",
        "pow:a=2.5",
        "pow:a=3",
        "std:a=0",
        "std:a=1",
        "std:a=2",
        "reglog:a=0,b=2",
    ]
    .iter()
    .map(|s| w(s))
    .collect();

    for weight in &regular {
        let v = operators::indicator_test(weight, 2.0, &op_cfg).unwrap();
        if v.verdict != Verdict::Bounded {
            failures.push(format!("indicator {}: {:?}", weight.spec(), v.verdict));
        }
        let b = operators::bloch_probe(weight, 256, &op_cfg).unwrap();
        if b.verdict != Verdict::Bounded {
            failures.push(format!("bloch {}: {:?}", weight.spec(), b.verdict));
        }
    }
    for spec in ["log:a=1.5", "log:a=2"] {
        let v = operators::indicator_test(&w(spec), 2.0, &op_cfg).unwrap();
        if v.verdict != Verdict::Divergent {
            failures.push(format!("indicator {spec}: {:?}", v.verdict));
        }
    }
    report(
        7,
        "indicator test bounded on regular weights, divergent on the log family; Bloch probe bounded",
        failures.is_empty(),
        if failures.is_empty() { "11 regular + 2 log weights".to_string() } else { failures.join("; ") },
    );
}

#[test]
fn criterion_8_identities() {
    let mut failures = Vec::new();

    // moment identity w_n = 4 n^2 w*_{n-1}, both sides independent
    for spec in ["std:a=1", "std:a=2.5", "pow:a=1", "pow:a=2.5"] {
        let weight = w(spec);
        let worst = (1..=64u32)
            .map(|n| {
                let lhs = weight.moment(n as f64).unwrap();
                let x = n as f64 - 1.0;
                let star = quad::integrate(
                    |s: f64| ((2.0 * x + 1.0) * (-s).ln_1p()).exp() * weight.star(1.0 - s).unwrap(),
                    0.0,
                    1.0,
                    1e-11,
                )
                .unwrap()
                .value;
                let rhs = 4.0 * (n as f64).powi(2) * star;
                (lhs - rhs).abs() / lhs.abs()
            })
            .fold(0.0f64, f64::max);
        if worst > 1e-8 {
            failures.push(format!("moment identity {spec}: rel {worst:.2e}"));
        }
    }

    // transform involution pointwise to 1e-12 on a 100-point grid
    for (om_spec, v_spec) in [("pow:a=1", "pow:a=0"), ("std:a=1", "pow:a=0.5"), ("reglog:a=0,b=2", "std:a=1")] {
        for p in [1.5, 2.0, 3.0] {
            let om = w(om_spec);
            let v = w(v_spec);
            let big_v = weights::transform_v(&om, &v, p).unwrap();
            for i in 1..=100 {
                let r = i as f64 / 101.0;
                let back = (om.eval_r(r) / big_v.eval_r(r)).powf(p) * big_v.eval_r(r);
                let rel = (back - v.eval_r(r)).abs() / v.eval_r(r);
                if rel > 1e-12 {
                    failures.push(format!("involution ({om_spec},{v_spec},p={p}) at r={r}: rel {rel:.2e}"));
                    break;
                }
            }
        }
    }

    // reproducing property for pseudo-random degree-<=8 polynomials
    let weight = w("std:a=1");
    let k = kernel_coeffs(&weight, 1024).unwrap();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let m_theta = 256usize;
    for trial in 0..3 {
        let coeffs: Vec<f64> = (0..=8).map(|_| next()).collect();
        let f = CoeffPoly(coeffs);
        let a = Complex64::new(0.55 * next(), 0.55 * next());
        let inner_part = |re: bool| {
            quad::integrate(
                |s: f64| {
                    let r = 1.0 - s;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..m_theta {
                        let th = 2.0 * std::f64::consts::PI * j as f64 / m_theta as f64;
                        let z = Complex64::from_polar(r, th);
                        acc += f.eval(z) * k.eval(a, z, 0, 1e-12).unwrap().conj();
                    }
                    let mean = acc / m_theta as f64;
                    2.0 * r * weight.eval_s(s) * if re { mean.re } else { mean.im }
                },
                0.0,
                1.0,
                1e-9,
            )
            .unwrap()
            .value
        };
        let got = Complex64::new(inner_part(true), inner_part(false));
        let want = f.eval(a);
        if (got - want).norm() > 1e-8 {
            failures.push(format!("reproducing property trial {trial}: |err| = {:.2e}", (got - want).norm()));
        }
    }

    report(
        8,
        "moment identity, transform involution, reproducing property",
        failures.is_empty(),
        if failures.is_empty() { "4 weights x 64 moments; 9 involutions; 3 polynomials".into() } else { failures.join("; ") },
    );
}

#[test]
fn criterion_9_determinism() {
    let run = || {
        let class = weights::classify(&w("reglog:a=0,b=2"), &SupConfig::default()).unwrap();
        let rep = conditions::check_pair(&w("pow:a=1"), &w("pow:a=0.5"), 2.0, &[], &CondConfig::default()).unwrap();
        let lemma = conditions::lemma9_check(&w("pow:a=1"), 2.0, &CondConfig::default()).unwrap();
        format!(
            "{}\n{}\n{}",
            serde_json::to_string(&class).unwrap(),
            serde_json::to_string(&rep).unwrap(),
            serde_json::to_string(&lemma).unwrap()
        )
    };
    let first = run();
    let second = run();
    report(
        9,
        "repeated runs serialize bit-identically",
        first == second,
        format!("{} report bytes", first.len()),
    );
}
