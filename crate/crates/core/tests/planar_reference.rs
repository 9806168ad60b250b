use approx::assert_abs_diff_eq;
use hopf_lab::hopf::{analyze_point, Tolerances};
use hopf_lab::spectral::{locate_hopf, CandidateKind, LocateOptions, SpectralData};
use hopf_lab::{compute_h11, compute_h22, example21, transversality, Direction, Example21Case, Stability, Tag};
use num_complex::Complex;

const CASES: [Example21Case; 3] = [
    Example21Case::Linear,
    Example21Case::Quadratic,
    Example21Case::NegativeQuadratic,
];

#[test]
fn evaluates_reference_field() {
    let sys = example21::<f64>(Example21Case::Linear);
    assert_eq!(sys.evaluate(&[0.0, 0.0], 0.5).unwrap(), vec![0.0, 0.0]);
    assert_eq!(sys.evaluate(&[1.0, 0.0], 0.0).unwrap(), vec![1.0, -1.0]);
    let v = sys.evaluate(&[0.1, 0.2], 0.3).unwrap();
    assert_abs_diff_eq!(v[0], 0.231, epsilon = 1e-15);
    // −0.1 + 0.3·0.2 + 0.2³
    assert_abs_diff_eq!(v[1], -0.032, epsilon = 1e-15);
    assert!(sys.evaluate(&[1.0], 0.0).is_err());
}

#[test]
fn jacobian_and_tensors_match_closed_forms() {
    for fd in [false, true] {
        let base = example21::<f64>(Example21Case::Linear);
        let sys = if fd { base.finite_difference_only() } else { base };
        let tol = if fd { 1e-6 } else { 1e-14 };
        let j = sys.jacobian(0.5).unwrap();
        for (got, want) in j.as_slice().iter().zip([0.5, 1.0, -1.0, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = tol);
        }
        let e1 = [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        let e2 = [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
        let b = sys.bilinear(0.0, &e1, &e1).unwrap();
        assert!(b.iter().all(|c| c.norm() < 1e-5));
        let c = sys.trilinear(0.0, &e1, &e1, &e1).unwrap();
        assert_abs_diff_eq!(c[0].re, 6.0, epsilon = 1e-4);
        assert_abs_diff_eq!(c[1].norm(), 0.0, epsilon = 1e-4);
        let c = sys.trilinear(0.0, &e1, &e2, &e1).unwrap();
        assert!(c.iter().all(|v| v.norm() < 1e-4));
        let m = sys.mixed_xlambda(0.0, &e1).unwrap();
        assert_abs_diff_eq!(m[0].re, 1.0, epsilon = 1e-6);
    }
    let case3 = example21::<f64>(Example21Case::NegativeQuadratic);
    let e1 = [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
    let e2 = [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
    assert!(case3.mixed_xlambda(0.0, &e1).unwrap().iter().all(|v| v.norm() < 1e-14));
    assert_abs_diff_eq!(case3.mixed_xlambda2(0.0, &e1).unwrap()[0].re, -2.0, epsilon = 1e-12);
    let case2 = example21::<f64>(Example21Case::Quadratic);
    assert_abs_diff_eq!(case2.mixed_xlambda2(0.0, &e2).unwrap()[1].re, 2.0, epsilon = 1e-12);
    let case1 = example21::<f64>(Example21Case::Linear);
    assert!(case1.mixed_xlambda2(0.0, &e2).unwrap().iter().all(|v| v.norm() < 1e-14));
}

#[test]
fn adjoint_equals_eigenvector_for_rotation() {
    let sys = example21::<f64>(Example21Case::Linear);
    let spec = SpectralData::at(&sys, 0.0, 1.0).unwrap();
    let s = 0.5f64.sqrt();
    assert_abs_diff_eq!(spec.kappa0, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!((spec.phi0[0] - Complex::new(s, 0.0)).norm(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!((spec.phi0[1] - Complex::new(0.0, s)).norm(), 0.0, epsilon = 1e-14);
    for (a, b) in spec.phi0.iter().zip(&spec.phi0_star) {
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
    }
}

#[test]
fn coefficients_of_all_three_cases() {
    for case in CASES {
        let sys = example21::<f64>(case);
        let spec = SpectralData::at(&sys, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(compute_h11(&sys, &spec).unwrap(), -3.0, epsilon = 1e-12);
        let fd = sys.finite_difference_only();
        assert_abs_diff_eq!(compute_h11(&fd, &spec).unwrap(), -3.0, epsilon = 1e-4);
        let (re, im) = transversality(&sys, &spec).unwrap();
        assert_abs_diff_eq!(im, 0.0, epsilon = 1e-14);
        let h22 = compute_h22(&sys, &spec).unwrap();
        match case {
            Example21Case::Linear => assert_abs_diff_eq!(re, 1.0, epsilon = 1e-14),
            Example21Case::Quadratic => {
                assert_abs_diff_eq!(re, 0.0, epsilon = 1e-14);
                assert_abs_diff_eq!(h22, -2.0, epsilon = 1e-10);
            }
            Example21Case::NegativeQuadratic => {
                assert_abs_diff_eq!(re, 0.0, epsilon = 1e-14);
                assert_abs_diff_eq!(h22, 2.0, epsilon = 1e-10);
            }
        }
        let fd_h22 = compute_h22(&fd, &spec).unwrap();
        assert_abs_diff_eq!(fd_h22, h22, epsilon = 1e-6);
    }
}

#[test]
fn classification_matrix() {
    let tol = Tolerances::default();
    let a1 = analyze_point(&example21::<f64>(Example21Case::Linear), 0.0, 1.0, &tol).unwrap();
    assert_eq!(a1.classification.tag, Tag::NondegenerateHopf);
    assert_eq!(a1.classification.direction, Some(Direction::Subcritical));
    assert_eq!(a1.classification.stability_cycle, Some(Stability::Unstable));
    let p1 = a1.prediction.as_ref().unwrap();
    assert_eq!(p1.lambda_dot0, 0.0);
    assert_eq!(p1.kappa_dot0, 0.0);
    assert_abs_diff_eq!(p1.lambda_ddot0.unwrap(), -3.0, epsilon = 1e-10);

    let a2 = analyze_point(&example21::<f64>(Example21Case::Quadratic), 0.0, 1.0, &tol).unwrap();
    assert_eq!(a2.classification.tag, Tag::DegenerateNoBifurcation);
    assert!(a2.prediction.is_none());

    let a3 = analyze_point(&example21::<f64>(Example21Case::NegativeQuadratic), 0.0, 1.0, &tol).unwrap();
    let c3 = &a3.classification;
    assert_eq!(c3.tag, Tag::DegenerateTranscritical);
    assert_eq!(c3.stability_cycle, Some(Stability::Unstable));
    let triv = c3.stability_trivial.unwrap();
    assert_eq!((triv.below, triv.above), (Stability::Stable, Stability::Stable));
    let p3 = a3.prediction.as_ref().unwrap();
    assert_abs_diff_eq!(p3.eta.unwrap(), 1.5f64.sqrt(), epsilon = 1e-8);
    assert_abs_diff_eq!(p3.kappa_dot0, 0.0, epsilon = 1e-14);
    let eta = p3.eta.unwrap();
    let c = &a3.coefficients;
    assert!((c.h11 + c.h22_formula * eta * eta).abs() <= 1e-10 * c.h11.abs());
    for a in [&a1, &a2, &a3] {
        assert!(a.h22_cross_check);
        assert!(a.classification.f7_holds);
    }
}

#[test]
fn eigenvalue_tracking_derivatives() {
    let tol = Tolerances::default();
    let a1 = analyze_point(&example21::<f64>(Example21Case::Linear), 0.0, 1.0, &tol).unwrap();
    assert_abs_diff_eq!((a1.track.mu_prime - Complex::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-6);
    let a2 = analyze_point(&example21::<f64>(Example21Case::Quadratic), 0.0, 1.0, &tol).unwrap();
    assert_abs_diff_eq!((a2.track.mu_second - Complex::new(2.0, 0.0)).norm(), 0.0, epsilon = 1e-5);
    let a3 = analyze_point(&example21::<f64>(Example21Case::NegativeQuadratic), 0.0, 1.0, &tol).unwrap();
    assert_abs_diff_eq!(a3.track.mu_prime.norm(), 0.0, epsilon = 1e-8);
    assert_abs_diff_eq!((a3.track.mu_second - Complex::new(-2.0, 0.0)).norm(), 0.0, epsilon = 1e-5);
}

#[test]
fn locates_crossing_and_tangency() {
    let opts = LocateOptions::default();
    let c1 = locate_hopf(&example21::<f64>(Example21Case::Linear), (-1.0, 1.0), &opts).unwrap();
    assert_eq!(c1.len(), 1);
    assert_abs_diff_eq!(c1[0].lambda0, 0.0, epsilon = 1e-9);
    assert_abs_diff_eq!(c1[0].kappa0, 1.0, epsilon = 1e-9);
    assert_eq!(c1[0].kind, CandidateKind::Crossing);
    let c3 = locate_hopf(&example21::<f64>(Example21Case::NegativeQuadratic), (-1.0, 1.0), &opts).unwrap();
    assert_eq!(c3.len(), 1);
    assert_abs_diff_eq!(c3[0].lambda0, 0.0, epsilon = 1e-4);
    assert_eq!(c3[0].kind, CandidateKind::Tangency);
    assert!(locate_hopf(&example21::<f64>(Example21Case::Linear), (1.0, -1.0), &opts).is_err());
}
