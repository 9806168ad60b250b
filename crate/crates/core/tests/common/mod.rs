#![allow(dead_code)]

use hopf_lab::system::{ForcedTangency, Monomial};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_monomial(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> Monomial<f64> {
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

pub fn forced_tangency(rng: &mut ChaCha8Rng) -> ForcedTangency<f64> {
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
    let mut nonlinear = Vec::new();
    for deg in [2, 2, 2, 3, 3, 3] {
        nonlinear.push(random_monomial(rng, n, deg));
    }
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

pub fn random_cvec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex<f64>> {
    (0..n)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn rel_close(a: &[Complex<f64>], b: &[Complex<f64>], rel: f64) -> bool {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(1.0, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= rel * scale)
}
