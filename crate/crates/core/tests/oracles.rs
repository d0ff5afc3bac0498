//! Checks against independent evaluations: quadrature for Bessel functions,
//! finite differences for the upper solution, symbolic equilibria.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use sirfb::eigen::{bessel_j, critical_radius, first_bessel_zero, lambda1, principal_zero, EigenQuery};
use sirfb::model::{build_supersolution, disease_free_equilibrium, endemic_equilibrium, ode_rhs};
use sirfb::{compute_r0, thresholds, InitialData, ModelParams};

fn params() -> ModelParams {
    ModelParams {
        b: 1.0,
        beta: 1.0,
        mu1: 0.5,
        mu2: 0.6,
        mu3: 0.7,
        alpha: 0.4,
        d1: 1.0,
        d2: 1.0,
        d3: 1.0,
        mu: 1.0,
        n: 1,
    }
}

/// `J₀(x) = (1/π) ∫₀^π cos(x sin θ) dθ`; the trapezoid rule on a periodic
/// analytic integrand converges geometrically.
fn j0_integral(x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let inner: f64 = (1..m).map(|k| (x * (k as f64 * h).sin()).cos()).sum();
    (inner + 0.5 * (1.0 + 1.0)) * h / PI
}

#[test]
fn integral_representation_agrees_with_series() {
    for &x in &[0.1, 0.7, 1.9, 2.4, 3.3, 6.0] {
        assert!((j0_integral(x) - bessel_j(0.0, x)).abs() < 1e-14, "x = {x}");
    }
}

#[test]
fn principal_zero_in_two_dimensions_is_a_root_of_j0() {
    let j = principal_zero(2).unwrap();
    assert!(j > 2.0 && j < 3.0);
    assert!(j0_integral(j).abs() < 1e-12);
    assert!((j - 2.404_825_557_695_773).abs() < 1e-12);
    // No earlier sign change.
    assert!((1..200).all(|k| j0_integral(j * k as f64 / 200.0) > 0.0));
}

#[test]
fn half_order_zeros_against_elementary_functions() {
    // J_{-1/2} ∝ cos x / √x, J_{1/2} ∝ sin x / √x.
    let zm = first_bessel_zero(-0.5);
    let zp = first_bessel_zero(0.5);
    assert!(zm.cos().abs() < 1e-13);
    assert!(zp.sin().abs() < 1e-13);
}

#[test]
fn eigenvalue_examples() {
    let l = |r: f64, n: usize| lambda1(EigenQuery::new(r, n).unwrap()).unwrap();
    assert_relative_eq!(l(1.0, 3), PI * PI, max_relative = 1e-12);
    assert_relative_eq!(l(2.0, 1), (PI / 4.0).powi(2), max_relative = 1e-12);
    assert_relative_eq!(l(1.0, 2), 5.783_185_962_946_784, max_relative = 1e-11);
    assert!(EigenQuery::new(1.0, 4).is_err());
}

#[test]
fn critical_radius_examples() {
    // μ₂ + α = 1, d₂ = 1 and R₀ = 2.
    let mut p = params();
    assert_relative_eq!(compute_r0(&p), 2.0);
    p.n = 3;
    assert_relative_eq!(critical_radius(&p).unwrap(), PI, max_relative = 1e-12);
    p.n = 1;
    assert_relative_eq!(critical_radius(&p).unwrap(), PI / 2.0, max_relative = 1e-12);
    for n in 1..=3 {
        p.n = n;
        let base = critical_radius(&p).unwrap();
        let doubled = critical_radius(&ModelParams { d2: 2.0, ..p }).unwrap();
        assert_relative_eq!(doubled, base * 2f64.sqrt(), max_relative = 1e-12);
        // Round trip through λ₁.
        let target = (p.mu2 + p.alpha) * (compute_r0(&p) - 1.0) / p.d2;
        assert_relative_eq!(lambda1(EigenQuery::new(base, n).unwrap()).unwrap(), target, max_relative = 1e-10);
    }
    let sub = ModelParams { beta: 0.4, ..p };
    assert!(critical_radius(&sub).is_err());
}

#[test]
fn r0_examples() {
    let mk = |b: f64, beta: f64, mu1: f64, mu2: f64, alpha: f64| ModelParams {
        b,
        beta,
        mu1,
        mu2,
        alpha,
        ..params()
    };
    assert_relative_eq!(compute_r0(&mk(1.0, 1.0, 1.0, 0.5, 0.5)), 1.0);
    assert_relative_eq!(compute_r0(&mk(2.0, 1.0, 1.0, 0.5, 0.5)), 2.0);
    assert_relative_eq!(compute_r0(&mk(1.0, 0.3, 0.1, 0.2, 0.8)), 3.0, max_relative = 1e-14);
}

#[test]
fn equilibria_solve_the_rhs_symbolically() {
    let p = params();
    // Endemic state from RHS = 0: S = (μ₂+α)/β, I = μ₁(R₀-1)/β, R = αI/μ₃.
    let s = (p.mu2 + p.alpha) / p.beta;
    let i = p.mu1 * (compute_r0(&p) - 1.0) / p.beta;
    let e = endemic_equilibrium(&p).unwrap();
    assert_relative_eq!(e[0], s, max_relative = 1e-14);
    assert_relative_eq!(e[1], i, max_relative = 1e-14);
    assert_relative_eq!(e[2], p.alpha * i / p.mu3, max_relative = 1e-14);
    for x in [e, disease_free_equilibrium(&p)] {
        assert!(ode_rhs(x, &p).iter().all(|v| v.abs() < 1e-15));
    }
    let unit = ModelParams {
        b: 1.0,
        beta: 1.0,
        mu1: 1.0,
        mu2: 1.0,
        mu3: 1.0,
        alpha: 0.0,
        ..p
    };
    assert_eq!(ode_rhs([1.0, 1.0, 0.0], &unit), [-1.0, 0.0, 0.0]);
}

/// Upper-solution inequalities evaluated by centred finite differences of
/// the closed forms, independent of the analytic residuals in the library.
#[test]
fn upper_solution_inequalities_by_finite_differences() {
    for (n, d1, d2, d3) in [(1, 1.0, 1.0, 1.0), (2, 0.5, 1.0, 2.0), (3, 2.0, 0.7, 0.9)] {
        let p0 = ModelParams { n, d1, d2, d3, ..params() };
        let template = InitialData::bump(1.0, 2.0, 0.5, 0.3);
        let h0 = 0.9 * thresholds(&p0, &template).h0_vanish_bound;
        let init = template.with_h0(h0);
        let p = ModelParams {
            mu: 0.9 * thresholds(&p0, &init).mu_vanish_bound,
            ..p0
        };
        let rep = thresholds(&p, &init);
        let sup = build_supersolution(&p, &init, &rep);
        assert!(sup.is_verified(), "{:?}", sup.violations);

        let e = 1e-5;
        for ti in 0..40 {
            let t = 0.05 + ti as f64 * 0.25;
            let hb = sup.h_bar(t);
            for ri in 1..40 {
                let r = hb * ri as f64 / 40.0;
                let f = |r: f64, t: f64| sup.i_bar(r, t);
                let ft = (f(r, t + e) - f(r, t - e)) / (2.0 * e);
                let frr = (f(r + e, t) - 2.0 * f(r, t) + f(r - e, t)) / (e * e);
                let fr = (f(r + e, t) - f(r - e, t)) / (2.0 * e);
                let lap = frr + (n as f64 - 1.0) / r * fr;
                let ib = f(r, t);
                let i_def = ft - p.d2 * lap - ib * (p.beta * sup.s_bar(r, t) - p.mu2 - p.alpha);
                let r_def = ft - p.d3 * lap - (p.alpha * ib - p.mu3 * sup.r_bar(r, t));
                let s_def = 0.0 - (p.b - p.beta * sup.s_bar(r, t) * ib - p.mu1 * sup.s_bar(r, t));
                let scale = 1e-4 * rep.big_m * (1.0 + rep.gamma);
                assert!(i_def >= -scale, "I at n={n} r={r} t={t}: {i_def}");
                assert!(r_def >= -scale, "R at n={n} r={r} t={t}: {r_def}");
                assert!(s_def >= 0.0);
                let lib = sup.residuals(&p, r, t);
                assert!((lib.i - i_def).abs() < scale && (lib.r - r_def).abs() < scale);
            }
            // Stefan inequality h̄' ≥ -μ Ī_r(h̄), with a one-sided difference.
            let slope = (sup.i_bar(hb, t) - sup.i_bar(hb - e, t)) / e;
            let hd = (sup.h_bar(t + e) - sup.h_bar(t - e)) / (2.0 * e);
            assert!(hd + p.mu * slope >= -1e-4 * rep.big_m, "front at n={n} t={t}");
        }
        // Initial ordering on [0, h0].
        for k in 0..=50 {
            let r = h0 * k as f64 / 50.0;
            assert!(sup.i_bar(r, 0.0) >= init.i0_at(r) && sup.r_bar(r, 0.0) >= init.r0_at(r));
        }
    }
}

#[test]
fn upper_solution_front_is_increasing_and_capped() {
    let p = params();
    let init = InitialData::bump(0.2, 2.0, 0.5, 0.0);
    let rep = thresholds(&p, &init);
    let sup = build_supersolution(&p, &init, &rep);
    assert_eq!(sup.h_bar(0.0), 0.4);
    let mut prev = sup.h_bar(0.0);
    for k in 1..2000 {
        let t = k as f64 * 0.05;
        let h = sup.h_bar(t);
        // Strict growth until e^{-γt} drops below rounding.
        if sup.gamma * t < 30.0 {
            assert!(h > prev, "t = {t}");
        }
        assert!(h >= prev);
        assert!(h <= 4.0 * init.h0);
        prev = h;
    }
    assert!((sup.h_bar(1e4) - 0.8).abs() < 1e-12);
    for t in [0.0, 1.0, 10.0] {
        assert_eq!(sup.i_bar(sup.h_bar(t), t), 0.0);
        assert_eq!(sup.r_bar(sup.h_bar(t), t), 0.0);
    }
}

#[test]
fn upper_solution_flags_violated_hypotheses() {
    let p = params();
    let init = InitialData::bump(2.0, 2.0, 0.5, 0.0);
    let sup = build_supersolution(&p, &init, &thresholds(&p, &init));
    assert!(!sup.is_verified());
    assert!(sup.violations.iter().any(|v| v.name == "h0"));
    // Evaluators still work.
    assert_eq!(sup.h_bar(0.0), 4.0);
}
