//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p hopf-lab-cli --test acceptance`.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hopf_lab::dynamics::{amplitude_sweep, CycleOptions, ModalFrame, RowStatus, SweepPlan, SweepRow};
use hopf_lab::hopf::{analyze_point, analyze_spectral, coefficients, Direction, Stability, Tag, Tolerances};
use hopf_lab::predprey::{h11_star, report, PredPreyParams};
use hopf_lab::scalar::{cnorm, pairing};
use hopf_lab::spectral::{bordered_solve, SpectralData};
use hopf_lab::system::{ForcedTangency, Monomial, PolynomialField};
use hopf_lab::{builtin, compute_h11, compute_h22, example21, Analysis, Example21Case, System};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const CASES: [Example21Case; 3] = [
    Example21Case::Linear,
    Example21Case::Quadratic,
    Example21Case::NegativeQuadratic,
];

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("runtime {:.2} s exceeds {:.0} s", t.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn case_analysis(case: Example21Case) -> Result<(System, Analysis), String> {
    let sys = example21::<f64>(case);
    let a = analyze_point(&sys, 0.0, 1.0, &Tolerances::default()).map_err(|e| e.to_string())?;
    Ok((sys, a))
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let mut worst_fd = 0.0f64;
    for case in CASES {
        let sys = example21::<f64>(case);
        let spec = SpectralData::at(&sys, 0.0, 1.0).map_err(|e| e.to_string())?;
        let h11 = compute_h11(&sys, &spec).map_err(|e| e.to_string())?;
        ensure!((h11 + 3.0).abs() <= 1e-8, "{}: analytic H11 = {h11}", case.label());
        let fd = sys.finite_difference_only();
        let h11_fd = compute_h11(&fd, &spec).map_err(|e| e.to_string())?;
        ensure!((h11_fd + 3.0).abs() <= 1e-4, "{}: FD H11 = {h11_fd}", case.label());
        worst_fd = worst_fd.max((h11_fd + 3.0).abs());
        let h22 = compute_h22(&sys, &spec).map_err(|e| e.to_string())?;
        let want = match case {
            Example21Case::Linear => None,
            Example21Case::Quadratic => Some(-2.0),
            Example21Case::NegativeQuadratic => Some(2.0),
        };
        if let Some(w) = want {
            ensure!((h22 - w).abs() <= 1e-6, "{}: H22 = {h22}, expected {w}", case.label());
        }
    }
    within_time(start, Duration::from_secs(1))?;
    Ok(format!("H11 = -3 on all cases; worst FD deviation {worst_fd:.1e}"))
}

fn criterion2() -> Outcome {
    let (_, a1) = case_analysis(Example21Case::Linear)?;
    let c = &a1.classification;
    ensure!(c.tag == Tag::NondegenerateHopf, "case 1 tag {:?}", c.tag);
    ensure!(c.direction == Some(Direction::Subcritical), "case 1 direction {:?}", c.direction);
    ensure!(c.stability_cycle == Some(Stability::Unstable), "case 1 cycle {:?}", c.stability_cycle);

    let (_, a2) = case_analysis(Example21Case::Quadratic)?;
    ensure!(
        a2.classification.tag == Tag::DegenerateNoBifurcation,
        "case 2 tag {:?}",
        a2.classification.tag
    );

    let (_, a3) = case_analysis(Example21Case::NegativeQuadratic)?;
    let c = &a3.classification;
    ensure!(c.tag == Tag::DegenerateTranscritical, "case 3 tag {:?}", c.tag);
    let eta = a3.prediction.as_ref().and_then(|p| p.eta).ok_or("case 3 has no η")?;
    ensure!((eta - 1.5f64.sqrt()).abs() <= 1e-8, "η = {eta}");
    ensure!(c.stability_cycle == Some(Stability::Unstable), "case 3 cycle {:?}", c.stability_cycle);
    let triv = c.stability_trivial.ok_or("case 3 has no trivial stability")?;
    ensure!(
        triv.below == Stability::Stable && triv.above == Stability::Stable,
        "case 3 trivial {triv:?}"
    );
    Ok(format!("tags as expected; η = {eta:.12}"))
}

fn random_monomial(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> Monomial<f64> {
    let mut exponents = vec![0u32; n];
    for _ in 0..degree {
        exponents[rng.gen_range(0..n)] += 1;
    }
    Monomial {
        component: rng.gen_range(0..n),
        exponents,
        coeffs: vec![rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5)],
    }
}

fn forced_tangency(rng: &mut ChaCha8Rng) -> ForcedTangency<f64> {
    let m = rng.gen_range(1..=3usize);
    let n = m + 2;
    let mut stable = vec![vec![0.0; m]; m];
    for i in 0..m {
        stable[i][i] = rng.gen_range(-3.0..-0.5);
        for j in i + 1..m {
            stable[i][j] = rng.gen_range(-1.0..1.0);
        }
    }
    let mut mat = |rows: usize, cols: usize, s: f64| -> Vec<Vec<f64>> {
        (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-s..s)).collect())
            .collect()
    };
    let coupling0 = mat(2, m, 1.0);
    let coupling1 = mat(2, m, 0.5);
    let mut basis = mat(n, n, 0.3);
    for (i, row) in basis.iter_mut().enumerate() {
        row[i] += 1.0;
    }
    let nonlinear = [2, 2, 2, 3, 3, 3].iter().map(|&d| random_monomial(rng, n, d)).collect();
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    ForcedTangency {
        lambda0: rng.gen_range(-1.0..1.0),
        kappa: rng.gen_range(0.5..2.0),
        c0: sign * rng.gen_range(0.2..2.0),
        a: rng.gen_range(-0.5..0.5),
        b: rng.gen_range(-0.5..0.5),
        c: rng.gen_range(-0.5..0.5),
        stable_block: stable,
        coupling0,
        coupling1,
        basis,
        nonlinear,
    }
}

fn h22_agrees(h22: f64, minus_re_mu2: f64) -> bool {
    (h22 - minus_re_mu2).abs() <= 1e-6f64.max(1e-3 * h22.abs())
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let mut checked = Vec::new();
    for case in CASES {
        let (sys, a) = case_analysis(case)?;
        let spec = SpectralData::at(&sys, 0.0, 1.0).map_err(|e| e.to_string())?;
        let (c, _, _) = coefficients(&sys, &spec).map_err(|e| e.to_string())?;
        ensure!(
            h22_agrees(c.h22_formula, c.h22_track),
            "{}: H22 {} vs -Re mu'' {}",
            case.label(),
            c.h22_formula,
            c.h22_track
        );
        ensure!(a.h22_cross_check, "{}: report flags the cross-check", case.label());
        checked.push(case.label().to_string());
    }
    let pp = builtin::<f64>("predprey").ok_or("predprey built-in missing")?.map_err(|e| e.to_string())?;
    let params = PredPreyParams::new(1.0, 3.0, 17.0, 4.0).map_err(|e| e.to_string())?;
    let curves = params.spectrum_curves();
    let ls = params.lambda_star();
    let omega = curves.omega_n(ls, 1).ok_or("no frequency at λ*")?;
    let spec = SpectralData::at(&pp, ls, omega).map_err(|e| e.to_string())?;
    let (c, _, _) = coefficients(&pp, &spec).map_err(|e| e.to_string())?;
    ensure!(
        h22_agrees(c.h22_formula, c.h22_track),
        "predprey: H22 {} vs -Re mu'' {}",
        c.h22_formula,
        c.h22_track
    );
    checked.push("predprey".into());

    let mut rng = ChaCha8Rng::seed_from_u64(0x2_5eed);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let ft = forced_tangency(&mut rng);
        let sys = ft.build(&format!("forced-{i}")).map_err(|e| e.to_string())?;
        let spec = SpectralData::at(&sys, ft.lambda0, ft.kappa).map_err(|e| e.to_string())?;
        let (c, _, _) = coefficients(&sys, &spec).map_err(|e| e.to_string())?;
        let exact = -ft.re_mu_second();
        ensure!(h22_agrees(c.h22_formula, exact), "forced-{i}: H22 {} vs exact {exact}", c.h22_formula);
        ensure!(
            h22_agrees(c.h22_formula, c.h22_track),
            "forced-{i}: H22 {} vs tracked {}",
            c.h22_formula,
            c.h22_track
        );
        worst = worst.max((c.h22_formula - exact).abs() / exact.abs());
    }
    within_time(start, Duration::from_secs(10))?;
    Ok(format!(
        "{} built-ins and 20 forced tangencies agree; worst relative deviation {worst:.1e}",
        checked.len()
    ))
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what} = {got}, expected {want} ± {tol:e}"))
    }
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let p = PredPreyParams::new(1.0, 3.0, 17.0, 4.0).map_err(|e| e.to_string())?;
    close(p.lambda_star(), 2.0, 1e-10, "λ*")?;
    close(p.m_star(), 8.0 / 17.0, 1e-10, "M*")?;
    close(p.critical_length(1), 8.5f64.sqrt(), 1e-10, "ℓ₁")?;
    let pts = p.hopf_points(2.0 * 119f64.sqrt() / 7.0).map_err(|e| e.to_string())?;
    ensure!(pts.len() == 3, "hopf points {pts:?}");
    for (got, want) in pts.iter().zip([1.0, 3.5, 8.0]) {
        close(*got, want, 1e-10, "hopf point")?;
    }
    let h11 = h11_star(&p, 1).map_err(|e| e.to_string())?;
    close(h11, 0.14597, 1e-3, "h11_star")?;
    let r = report(&p, 1, None, &Tolerances::default()).map_err(|e| e.to_string())?;
    ensure!(
        r.analysis.classification.tag == Tag::DegenerateNoBifurcation,
        "tag {:?}",
        r.analysis.classification.tag
    );
    within_time(start, Duration::from_secs(30))?;
    Ok(format!("hopf points {pts:?}; H11 = {h11:.8}"))
}

fn criterion5() -> Outcome {
    let start = Instant::now();
    let p = PredPreyParams::new(48.0, 1.0, 127.0, 7.0).map_err(|e| e.to_string())?;
    close(p.lambda_star(), 7.0, 1e-10, "λ*")?;
    close(p.m_star(), 98.0 / 127.0, 1e-10, "M*")?;
    for n in 1..=4 {
        close(p.critical_length(n), n as f64 * 63.5f64.sqrt(), 1e-10, "ℓₙ")?;
    }
    let h11 = h11_star(&p, 1).map_err(|e| e.to_string())?;
    close(h11, -0.00025, 5e-5, "h11_star")?;
    let r = report(&p, 1, None, &Tolerances::default()).map_err(|e| e.to_string())?;
    ensure!(
        r.analysis.classification.tag == Tag::DegenerateTranscritical,
        "tag {:?}",
        r.analysis.classification.tag
    );
    let pred = r.analysis.prediction.as_ref().ok_or("no branch prediction")?;
    let eta_closed = r.eta_closed_form.ok_or("no closed-form η")?;
    let eta = pred.eta.ok_or("no η")?;
    ensure!((eta - eta_closed).abs() <= 1e-6 * eta_closed, "η {eta} vs closed form {eta_closed}");
    let wdot_closed = -(p.theta / (p.k * r.omega0)) * eta_closed;
    ensure!(
        (pred.kappa_dot0 - wdot_closed).abs() <= 1e-6 * wdot_closed.abs(),
        "ω̇(0) {} vs closed form {wdot_closed}",
        pred.kappa_dot0
    );
    within_time(start, Duration::from_secs(60))?;
    Ok(format!("H11 = {h11:.6e}; η = {eta:.10}; ω̇(0) = {:.10e}", pred.kappa_dot0))
}

fn criterion6() -> Outcome {
    let mut diffs = Vec::new();
    for (d1, d2, k, theta) in [(1.0f64, 3.0, 17.0, 4.0), (48.0, 1.0, 127.0, 7.0)] {
        let p = PredPreyParams::new(d1, d2, k, theta).map_err(|e| e.to_string())?;
        let a = h11_star(&p, 1).map_err(|e| e.to_string())?;
        let b = h11_star(&p, 2).map_err(|e| e.to_string())?;
        ensure!((a - b).abs() <= 1e-8, "({d1},{d2},{k},{theta}): {a} vs {b}");
        diffs.push((a - b).abs());
    }
    Ok(format!("|h11(1) − h11(2)| = {:.1e}, {:.1e}", diffs[0], diffs[1]))
}

fn sweep(case: Example21Case, grid: &[f64]) -> Result<(Analysis, Vec<SweepRow<f64>>), String> {
    let (sys, a) = case_analysis(case)?;
    let plan = SweepPlan {
        prediction: a.prediction.as_ref(),
        classification: Some(&a.classification),
    };
    let rows = amplitude_sweep(&sys, grid, &ModalFrame::from(&a), &plan, &CycleOptions::default());
    if let Some(r) = rows.iter().find(|r| matches!(r.status, RowStatus::Failed(_))) {
        return Err(format!("λ = {}: {}", r.lambda, r.status.as_str()));
    }
    Ok((a, rows))
}

/// Least-squares slope through the origin.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>() / xs.iter().map(|x| x * x).sum::<f64>()
}

fn trivial_multipliers_ok(rows: &[SweepRow<f64>]) -> Result<(), String> {
    for r in rows.iter().filter(|r| r.status == RowStatus::Cycle) {
        let d = r.trivial_defect.ok_or("cycle without Floquet data")?;
        ensure!(d <= 1e-6, "λ = {}: trivial multiplier off by {d:e}", r.lambda);
    }
    Ok(())
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let grid = [-0.3, -0.2, -0.1, 0.1, 0.2, 0.3];

    let (a3, rows) = sweep(Example21Case::NegativeQuadratic, &grid)?;
    let eta = a3.prediction.as_ref().and_then(|p| p.eta).ok_or("no η")?;
    ensure!(
        rows.iter().all(|r| r.status == RowStatus::Cycle),
        "case 3 missing cycles: {:?}",
        rows.iter().map(|r| r.status.as_str()).collect::<Vec<_>>()
    );
    let mut slopes = Vec::new();
    for side in [-1.0, 1.0] {
        let sel: Vec<&SweepRow<f64>> = rows.iter().filter(|r| r.lambda * side > 0.0).collect();
        let xs: Vec<f64> = sel.iter().map(|r| r.lambda.abs()).collect();
        let ys: Vec<f64> = sel.iter().map(|r| r.r.unwrap()).collect();
        let s = slope(&xs, &ys);
        ensure!((s - 1.0 / eta).abs() <= 0.1 / eta, "case 3 slope {s} vs 1/η = {}", 1.0 / eta);
        slopes.push(s);
    }

    let grid1 = [-0.15, -0.1, -0.05, 0.05, 0.1, 0.15];
    let (a1, rows1) = sweep(Example21Case::Linear, &grid1)?;
    let lambda0 = a1.lambda0;
    for r in &rows1 {
        let want = if r.lambda < lambda0 { RowStatus::Cycle } else { RowStatus::NoCycle };
        ensure!(r.status == want, "case 1 at λ = {}: {}", r.lambda, r.status.as_str());
    }
    let below: Vec<&SweepRow<f64>> = rows1.iter().filter(|r| r.lambda < lambda0).collect();
    let xs: Vec<f64> = below.iter().map(|r| lambda0 - r.lambda).collect();
    let ys: Vec<f64> = below.iter().map(|r| r.r.unwrap().powi(2)).collect();
    let s = slope(&xs, &ys);
    for (x, y) in xs.iter().zip(&ys) {
        ensure!((y - s * x).abs() <= 0.1 * y, "case 1: r² = {y} off the √ law at λ₀ − λ = {x}");
    }

    let grid2 = [-0.3, -0.2, -0.1, 0.1, 0.2, 0.3];
    let (_, rows2) = sweep(Example21Case::Quadratic, &grid2)?;
    let found = rows2.iter().filter(|r| r.status == RowStatus::Cycle).count();
    ensure!(found == 0, "case 2 produced {found} cycles");

    trivial_multipliers_ok(&rows)?;
    trivial_multipliers_ok(&rows1)?;
    within_time(start, Duration::from_secs(120))?;
    Ok(format!(
        "case 3 slopes {:.4}, {:.4} (1/η = {:.4}); case 1 r²/(λ₀−λ) = {s:.4}; case 2 none",
        slopes[0],
        slopes[1],
        1.0 / eta
    ))
}

fn criterion8() -> Outcome {
    let eta = 1.5f64.sqrt();
    let grid: Vec<f64> = [0.05, 0.1, 0.15, 0.2].iter().map(|r| r * eta).collect();
    let (a3, rows) = sweep(Example21Case::NegativeQuadratic, &grid)?;
    ensure!(rows.iter().all(|r| r.status == RowStatus::Cycle), "case 3 missing cycles");
    trivial_multipliers_ok(&rows)?;
    let r2: Vec<f64> = rows.iter().map(|r| r.r.unwrap().powi(2)).collect();
    let mu: Vec<f64> = rows
        .iter()
        .map(|r| r.mu2.ok_or("no real μ₂"))
        .collect::<Result<_, _>>()?;
    let h11 = a3.coefficients.h11;
    let fit = slope(&r2, &mu);
    ensure!((fit - h11).abs() <= 0.15 * h11.abs(), "fitted μ₂/r² = {fit}, H11 = {h11}");

    let (a1, rows1) = sweep(Example21Case::Linear, &[-0.15, -0.1, -0.05])?;
    trivial_multipliers_ok(&rows1)?;
    for r in &rows1 {
        ensure!(r.status == RowStatus::Cycle, "case 1 at λ = {}: {}", r.lambda, r.status.as_str());
        let mu2 = r.mu2.ok_or("no real μ₂")?;
        ensure!(
            mu2.signum() == (r.lambda - a1.lambda0).signum(),
            "case 1 at λ = {}: μ₂ = {mu2}",
            r.lambda
        );
    }
    Ok(format!("fitted μ₂/r² = {fit:.4} vs H11 = {h11}"))
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> Result<System, String> {
    let n = rng.gen_range(2..=4usize);
    let mut terms: Vec<Monomial<f64>> = [1, 1, 2, 2, 2, 3, 3, 3].iter().map(|&d| random_monomial(rng, n, d)).collect();
    let mut e = vec![0; n];
    e[0] = 1;
    terms.push(Monomial {
        component: 0,
        exponents: e,
        coeffs: vec![0.0, 0.0, 1.0],
    });
    let field = PolynomialField::new(n, terms).map_err(|e| e.to_string())?;
    System::new("random", Arc::new(field), (-1.0, 1.0)).map_err(|e| e.to_string())
}

fn cvec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex<f64>> {
    (0..n)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn rel_close(a: &[Complex<f64>], b: &[Complex<f64>], rel: f64) -> bool {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(1.0, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= rel * scale)
}

fn tensor_symmetry(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..50 {
        let sys = random_polynomial(rng)?;
        let fd = sys.finite_difference_only();
        let n = sys.dim();
        let (a, b, c) = (cvec(rng, n), cvec(rng, n), cvec(rng, n));
        for s in [&sys, &fd] {
            let ab = s.bilinear(0.3, &a, &b).map_err(|e| e.to_string())?;
            let ba = s.bilinear(0.3, &b, &a).map_err(|e| e.to_string())?;
            ensure!(rel_close(&ab, &ba, 1e-6), "bilinear not symmetric");
            let t = |x: &[Complex<f64>], y: &[Complex<f64>], z: &[Complex<f64>]| s.trilinear(0.3, x, y, z);
            let base = t(&a, &b, &c).map_err(|e| e.to_string())?;
            for p in [t(&a, &c, &b), t(&b, &a, &c), t(&b, &c, &a), t(&c, &a, &b), t(&c, &b, &a)] {
                ensure!(rel_close(&base, &p.map_err(|e| e.to_string())?, 1e-6), "trilinear not symmetric");
            }
        }
        let an = sys.bilinear(0.3, &a, &b).map_err(|e| e.to_string())?;
        let fb = fd.bilinear(0.3, &a, &b).map_err(|e| e.to_string())?;
        ensure!(rel_close(&an, &fb, 1e-5), "analytic and FD bilinear disagree");
    }
    Ok(())
}

fn spectral_properties(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..30 {
        let ft = forced_tangency(rng);
        let sys = ft.build("forced").map_err(|e| e.to_string())?;
        let spec = SpectralData::at(&sys, ft.lambda0, ft.kappa).map_err(|e| e.to_string())?;
        let a = spec.a0.to_complex();
        let an = spec.a0.frobenius_norm();
        let ik = Complex::new(0.0, spec.kappa0);
        let res: Vec<Complex<f64>> = a
            .mul_vec(&spec.phi0)
            .iter()
            .zip(&spec.phi0)
            .map(|(x, p)| x - ik * p)
            .collect();
        ensure!(cnorm(&res) <= 1e-10 * an, "eigen residual {:e}", cnorm(&res));
        let star_norm = cnorm(&spec.phi0_star).max(1.0);
        let res: Vec<Complex<f64>> = a
            .conj_transpose()
            .mul_vec(&spec.phi0_star)
            .iter()
            .zip(&spec.phi0_star)
            .map(|(x, p)| x + ik * p)
            .collect();
        ensure!(cnorm(&res) <= 1e-10 * an * star_norm, "adjoint residual {:e}", cnorm(&res));
        let shifted = a.shifted_negative(ik);
        for _ in 0..100 {
            let z = cvec(rng, spec.dim());
            let v = pairing(&shifted.mul_vec(&z), &spec.phi0_star).norm();
            ensure!(v <= 1e-9 * cnorm(&z) * an * star_norm, "annihilation defect {v:e}");
        }
        let z = cvec(rng, spec.dim());
        let x = bordered_solve(&spec, &z).map_err(|e| e.to_string())?;
        ensure!(spec.project(&x).norm() <= 1e-10 * cnorm(&x).max(1.0), "bordered solution not orthogonal");
        let s = spec.project(&z);
        let rhs: Vec<Complex<f64>> = z.iter().zip(&spec.phi0).map(|(zi, p)| zi - s * p).collect();
        ensure!(rel_close(&shifted.mul_vec(&x), &rhs, 1e-9), "bordered solution misses the projected equation");

        let tol = Tolerances::default();
        let base = analyze_spectral(&sys, &spec, &tol).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let c = Complex::from_polar(10f64.powf(rng.gen_range(-1.0..1.0)), rng.gen_range(0.0..6.3));
            let scaled = analyze_spectral(&sys, &spec.rescaled(c), &tol).map_err(|e| e.to_string())?;
            ensure!(scaled.classification.tag == base.classification.tag, "tag changed under rescaling");
            ensure!(
                scaled.coefficients.h11.signum() == base.coefficients.h11.signum(),
                "sign(H11) changed under rescaling"
            );
        }
    }
    Ok(())
}

fn cli_determinism() -> Result<(), String> {
    let ell = format!("{}", 2.0 * 119f64.sqrt() / 7.0);
    let runs: [&[&str]; 3] = [
        &["analyze", "--system", "example21-case3", "--window", "-1", "1", "--seed", "3"],
        &["predprey", "--d1", "1", "--d2", "3", "--k", "17", "--theta", "4", "--n", "1", "--ell", &ell],
        &["sweep", "--system", "example21-case3", "--grid", "-0.3", "0.3", "7"],
    ];
    for args in runs {
        let out = |threads: &str| {
            Command::new(env!("CARGO_BIN_EXE_hopf-lab"))
                .args(args)
                .env("HOPF_LAB_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (out("1")?, out("3")?);
        ensure!(a.status.success() && b.status.success(), "{args:?} failed");
        ensure!(a.stdout == b.stdout, "{args:?} output differs between runs");
    }
    Ok(())
}

fn criterion9(suite_start: Instant) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    tensor_symmetry(&mut rng)?;
    spectral_properties(&mut rng)?;
    cli_determinism()?;
    within_time(suite_start, Duration::from_secs(300))?;
    Ok(format!(
        "50 random fields, 30 forced tangencies, 3 CLI reports; suite time {:.1} s",
        suite_start.elapsed().as_secs_f64()
    ))
}

fn main() {
    let suite_start = Instant::now();
    let criteria: [(&str, Box<dyn Fn() -> Outcome>); 9] = [
        ("planar cubic coefficients H11/H22", Box::new(criterion1)),
        ("classification matrix", Box::new(criterion2)),
        ("H22 = -Re mu''(lambda0) cross-check", Box::new(criterion3)),
        ("predator-prey (1, 3, 17, 4)", Box::new(criterion4)),
        ("predator-prey (48, 1, 127, 7)", Box::new(criterion5)),
        ("H11 independent of the critical mode", Box::new(criterion6)),
        ("amplitude sweeps vs branch predictions", Box::new(criterion7)),
        ("Floquet quadratic law", Box::new(criterion8)),
        ("property suite", Box::new(move || criterion9(suite_start))),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {}  {name} ({secs:.2} s): {detail}", i + 1),
            Err(reason) => {
                failures += 1;
                println!("FAIL  {}  {name} ({secs:.2} s): {reason}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        criteria.len() - failures,
        criteria.len(),
        suite_start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
