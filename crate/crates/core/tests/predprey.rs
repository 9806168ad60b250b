use approx::assert_abs_diff_eq;
use hopf_lab::hopf::{Tag, Tolerances};
use hopf_lab::predprey::{
    analyze_at_lambda_star, analyze_at_lambda_star_with_modes, galerkin_system, h11_star, h22_closed_form,
    report, PredPreyParams,
};
use hopf_lab::spectral::{locate_hopf, LocateOptions, SpectralData};
use num_complex::Complex;

// Independent oracle: a Python prototype assembling the same tensors from
// the pointwise kinetic partials and cosine product identities.
const H11_CASE1: f64 = 0.14597347925219706;
const H11_CASE2: f64 = -0.000245574181699796;

fn case1() -> PredPreyParams<f64> {
    PredPreyParams::new(1.0, 3.0, 17.0, 4.0).unwrap()
}

fn case2() -> PredPreyParams<f64> {
    PredPreyParams::new(48.0, 1.0, 127.0, 7.0).unwrap()
}

#[test]
fn rejects_invalid_parameters() {
    assert!(PredPreyParams::new(-1.0, 3.0, 17.0, 4.0).is_err());
    assert!(PredPreyParams::new(1.0, 3.0, 1.0, 4.0).is_err());
    assert!(case1().hopf_points(0.0).is_err());
    assert!(case1().equilibrium(17.5).is_err());
}

#[test]
fn equilibrium_values() {
    let (_, v) = case1().equilibrium(2.0).unwrap();
    assert_abs_diff_eq!(v, 15.0 / 34.0, epsilon = 1e-15);
    let (_, v) = case2().equilibrium(7.0).unwrap();
    assert_abs_diff_eq!(v, 120.0 / 127.0, epsilon = 1e-15);
    let (_, v) = case1().equilibrium(17.0 - 1e-12).unwrap();
    assert!(v.abs() < 1e-10);
}

#[test]
fn critical_geometry_matches_closed_forms() {
    let p = case1();
    assert_abs_diff_eq!(p.lambda_star(), 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.m_star(), 8.0 / 17.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.a(2.0), 8.0 / 17.0, epsilon = 1e-15);
    assert_abs_diff_eq!(p.a(8.0), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(p.critical_length(1), 8.5f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(p.lambda0_h(), 8.0, epsilon = 1e-15);
    let curves = p.spectrum_curves();
    assert_abs_diff_eq!(curves.alpha_prime(p.lambda_star()), 0.0, epsilon = 1e-12);
    let pts = p.hopf_points(2.0 * 119f64.sqrt() / 7.0).unwrap();
    assert_eq!(pts.len(), 3);
    for (got, want) in pts.iter().zip([1.0, 3.5, 8.0]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
    }
    let ell = 2.0 * 119f64.sqrt() / 7.0;
    let c = p.with_length(ell).spectrum_curves();
    assert_abs_diff_eq!(c.alpha_n(1.0, 1), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(c.alpha_n(3.5, 1), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(c.alpha_n(8.0, 0), 0.0, epsilon = 1e-12);

    let q = case2();
    assert_abs_diff_eq!(q.lambda_star(), 7.0, epsilon = 1e-12);
    assert_abs_diff_eq!(q.m_star(), 98.0 / 127.0, epsilon = 1e-12);
    assert_abs_diff_eq!(q.a(7.0), 98.0 / 127.0, epsilon = 1e-15);
    for n in 1..=4 {
        assert_abs_diff_eq!(q.critical_length(n), n as f64 * 63.5f64.sqrt(), epsilon = 1e-10);
    }
}

#[test]
fn diffusion_ratio_conditions() {
    assert!(case1().condition_checks().0);
    assert_eq!(case2().condition_checks(), (true, true));
    let weak = PredPreyParams::new(1e-9, 3.0, 17.0, 4.0).unwrap();
    assert_eq!(weak.condition_checks(), (false, false));
}

#[test]
fn galerkin_jacobian_blocks() {
    let p = case1();
    let sys = galerkin_system(&p, 4).unwrap();
    let n1 = 5;
    for &lam in &[0.7, 2.0, 5.5] {
        let j = sys.jacobian(lam).unwrap();
        let fd = sys.finite_difference_only().jacobian(lam).unwrap();
        for n in 0..n1 {
            let w = (n * n) as f64 / (p.ell * p.ell);
            let want = [
                [-p.d1 * w + p.a(lam), -p.theta],
                [(p.k - lam) / (p.k * (1.0 + lam)), -p.d2 * w],
            ];
            for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let (i, k) = (r * n1 + n, c * n1 + n);
                assert_abs_diff_eq!(j[(i, k)], want[r][c], epsilon = 1e-14);
                assert_abs_diff_eq!(fd[(i, k)], want[r][c], epsilon = 1e-6);
            }
        }
        let zero = sys.evaluate(&vec![0.0; 2 * n1], lam).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
    }
    // the mode-1 block carries a pure-imaginary pair at λ* on ℓ = ℓ₁
    let spec = SpectralData::at(&sys, 2.0, 1.0).unwrap();
    let w0 = p.spectrum_curves().omega_n(2.0, 1).unwrap();
    assert_abs_diff_eq!(spec.kappa0, w0, epsilon = 1e-12);
    assert!(spec.mu0.re.abs() < 1e-12);
}

#[test]
fn bilinear_image_of_a_single_mode_lives_on_modes_zero_and_double() {
    let p = case1();
    let sys = galerkin_system(&p, 4).unwrap();
    let mut e = vec![Complex::new(0.0, 0.0); 10];
    e[1] = Complex::new(1.0, 0.0);
    let b = sys.bilinear(2.0, &e, &e).unwrap();
    for (i, v) in b.iter().enumerate() {
        let mode = i % 5;
        if mode != 0 && mode != 2 {
            assert!(v.norm() < 1e-14, "component {i}: {v}");
        }
    }
    assert!(b[0].norm() > 1e-3 && b[2].norm() > 1e-3);
    let fd = sys.finite_difference_only().bilinear(2.0, &e, &e).unwrap();
    for (a, c) in b.iter().zip(&fd) {
        assert!((a - c).norm() <= 1e-5 * (1.0 + a.norm()));
    }
}

#[test]
fn mixed_derivative_at_lambda_star() {
    let p = case1();
    let sys = galerkin_system(&p, 2).unwrap();
    let mut e = vec![Complex::new(0.0, 0.0); 6];
    e[1] = Complex::new(1.0, 0.0);
    let m = sys.mixed_xlambda(2.0, &e).unwrap();
    assert_abs_diff_eq!(m[1].re, 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(m[4].re, -2.0 / 17.0, epsilon = 1e-14);
}

#[test]
fn h11_reproduces_both_parameter_sets() {
    let h1 = h11_star(&case1(), 1).unwrap();
    assert_abs_diff_eq!(h1, H11_CASE1, epsilon = 1e-10);
    assert_abs_diff_eq!(h1, 0.14597, epsilon = 1e-3);
    let h2 = h11_star(&case2(), 1).unwrap();
    assert_abs_diff_eq!(h2, H11_CASE2, epsilon = 1e-12);
    assert_abs_diff_eq!(h2, -0.00025, epsilon = 5e-5);
}

#[test]
fn h11_is_independent_of_the_critical_mode() {
    for p in [case1(), case2()] {
        let h1 = h11_star(&p, 1).unwrap();
        for n in [2, 3] {
            assert_abs_diff_eq!(h11_star(&p, n).unwrap(), h1, epsilon = 1e-8);
        }
    }
}

#[test]
fn truncation_at_twice_the_mode_is_sufficient() {
    let tol = Tolerances::default();
    for p in [case1(), case2()] {
        for n in [1, 2] {
            let a = analyze_at_lambda_star_with_modes(&p, n, 2 * n, &tol).unwrap();
            let b = analyze_at_lambda_star_with_modes(&p, n, 4 * n, &tol).unwrap();
            assert_abs_diff_eq!(a.coefficients.h11, b.coefficients.h11, epsilon = 1e-10);
        }
    }
}

#[test]
fn unit_mode_coefficient_normalization() {
    let p = case1();
    let a = analyze_at_lambda_star(&p, 1, &Tolerances::default()).unwrap();
    let ell = p.critical_length(1);
    let pi = std::f64::consts::PI;
    let sw = (ell * pi / 2.0).sqrt();
    let w0 = a.kappa0;
    let a2 = p.d2 / (ell * ell);
    let phi_v = Complex::new(a2 / p.theta, -w0 / p.theta);
    let star_u = Complex::new(1.0, a2 / w0) / (ell * pi);
    let star_v = Complex::new(0.0, -p.theta / w0) / (ell * pi);
    // coordinates carry √w, so coefficient c appears as √w·c
    assert_abs_diff_eq!((a.phi0[1] - sw).norm(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!((a.phi0[4] - phi_v * sw).norm(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!((a.phi0_star[1] - star_u * sw).norm(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!((a.phi0_star[4] - star_v * sw).norm(), 0.0, epsilon = 1e-12);
}

#[test]
fn classification_at_lambda_star() {
    let tol = Tolerances::default();
    for (p, tag) in [
        (case1(), Tag::DegenerateNoBifurcation),
        (case2(), Tag::DegenerateTranscritical),
    ] {
        let a = analyze_at_lambda_star(&p, 1, &tol).unwrap();
        assert_eq!(a.classification.tag, tag);
        assert!(!a.classification.f7_holds);
        assert_abs_diff_eq!(a.coefficients.h22_formula, h22_closed_form(&p), epsilon = 1e-6);
        assert!(a.h22_cross_check);
    }
    let r = report(&case2(), 1, None, &tol).unwrap();
    let pred = r.analysis.prediction.as_ref().unwrap();
    let closed = r.omega_dot_closed_form.unwrap();
    assert!((pred.kappa_dot0 - closed).abs() <= 1e-6 * closed.abs());
    assert!((pred.eta.unwrap() - r.eta_closed_form.unwrap()).abs() <= 1e-6 * pred.eta.unwrap());
}

#[test]
fn locates_the_three_hopf_points() {
    let p = case1().with_length(2.0 * 119f64.sqrt() / 7.0);
    let sys = galerkin_system(&p, 4).unwrap();
    let found = locate_hopf(&sys, (0.0, 8.5), &LocateOptions::default()).unwrap();
    let lams: Vec<f64> = found.iter().map(|c| c.lambda0).collect();
    assert_eq!(lams.len(), 3, "{lams:?}");
    for (got, want) in lams.iter().zip([1.0, 3.5, 8.0]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-8);
    }
}
