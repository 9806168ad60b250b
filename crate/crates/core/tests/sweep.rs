use hopf_lab::dynamics::{amplitude_sweep, CycleOptions, ModalFrame, RowStatus, SweepPlan, SweepRow};
use hopf_lab::hopf::{analyze_point, Tolerances};
use hopf_lab::{example21, Example21Case};

fn run(case: Example21Case, grid: &[f64]) -> (hopf_lab::Analysis, Vec<SweepRow<f64>>) {
    let sys = example21::<f64>(case);
    let a = analyze_point(&sys, 0.0, 1.0, &Tolerances::default()).unwrap();
    let plan = SweepPlan {
        prediction: a.prediction.as_ref(),
        classification: Some(&a.classification),
    };
    let rows = amplitude_sweep(&sys, grid, &ModalFrame::from(&a), &plan, &CycleOptions::default());
    (a, rows)
}

/// Least-squares slope through the origin.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>() / xs.iter().map(|x| x * x).sum::<f64>()
}

#[test]
fn transcritical_branch_on_both_sides() {
    let grid = [-0.3, -0.2, -0.1, 0.1, 0.2, 0.3];
    let (a, rows) = run(Example21Case::NegativeQuadratic, &grid);
    let eta = a.prediction.as_ref().unwrap().eta.unwrap();
    assert!(rows.iter().all(|r| r.status == RowStatus::Cycle), "{rows:?}");
    for side in [-1.0, 1.0] {
        let sel: Vec<&SweepRow<f64>> = rows.iter().filter(|r| r.lambda * side > 0.0).collect();
        let xs: Vec<f64> = sel.iter().map(|r| r.lambda.abs()).collect();
        let ys: Vec<f64> = sel.iter().map(|r| r.r.unwrap()).collect();
        let s = slope(&xs, &ys);
        assert!((s - 1.0 / eta).abs() <= 0.1 / eta, "side {side}: slope {s}");
    }
    // exchange of stability: cycles unstable (μ₂ < 0) while the trivial state is stable
    for r in &rows {
        assert_eq!(r.mu2.unwrap().signum(), r.trivial_leading_re.signum());
        assert!(r.trivial_defect.unwrap() <= 1e-6);
    }
}

#[test]
fn quadratic_floquet_law() {
    let eta = 1.5f64.sqrt();
    let rs = [0.05, 0.1, 0.15, 0.2];
    let grid: Vec<f64> = rs.iter().map(|r| r * eta).collect();
    let (a, rows) = run(Example21Case::NegativeQuadratic, &grid);
    let r2: Vec<f64> = rows.iter().map(|r| r.r.unwrap().powi(2)).collect();
    let mu: Vec<f64> = rows.iter().map(|r| r.mu2.unwrap()).collect();
    let s = slope(&r2, &mu);
    let h11 = a.coefficients.h11;
    assert!((s - h11).abs() <= 0.15 * h11.abs(), "fitted {s}");
}

#[test]
fn subcritical_branch_only_below() {
    let grid = [-0.15, -0.1, -0.05, 0.05, 0.1, 0.15];
    let (a, rows) = run(Example21Case::Linear, &grid);
    for r in &rows {
        if r.lambda < 0.0 {
            assert_eq!(r.status, RowStatus::Cycle, "{r:?}");
            // sign(λ − λ₀) = sign μ₂
            assert!(r.mu2.unwrap() < 0.0);
            assert_eq!(r.mu2.unwrap().signum(), r.trivial_leading_re.signum());
        } else {
            assert_eq!(r.status, RowStatus::NoCycle, "{r:?}");
        }
    }
    let below: Vec<&SweepRow<f64>> = rows.iter().filter(|r| r.lambda < 0.0).collect();
    let xs: Vec<f64> = below.iter().map(|r| -r.lambda).collect();
    let ys: Vec<f64> = below.iter().map(|r| r.r.unwrap().powi(2)).collect();
    let s = slope(&xs, &ys);
    let want = 2.0 / a.prediction.as_ref().unwrap().lambda_ddot0.unwrap().abs();
    assert!((s - want).abs() <= 0.1 * want, "slope {s} vs {want}");
    for (x, y) in xs.iter().zip(&ys) {
        assert!((y - s * x).abs() <= 0.1 * y);
    }
}

#[test]
fn definite_case_yields_no_cycles() {
    let grid = [-0.3, -0.2, -0.1, 0.1, 0.2, 0.3];
    let (_, rows) = run(Example21Case::Quadratic, &grid);
    assert!(rows.iter().all(|r| r.status == RowStatus::NoCycle), "{rows:?}");
}

#[test]
fn sweep_is_deterministic() {
    let grid = [-0.2, 0.1];
    let (_, a) = run(Example21Case::NegativeQuadratic, &grid);
    let (_, b) = run(Example21Case::NegativeQuadratic, &grid);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.r.map(f64::to_bits), y.r.map(f64::to_bits));
        assert_eq!(x.mu2.map(f64::to_bits), y.mu2.map(f64::to_bits));
    }
}
