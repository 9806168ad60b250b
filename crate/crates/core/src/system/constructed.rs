//! Polynomial systems with a prescribed Hopf tangency: the critical pair
//! satisfies `Re μ(λ) = c₀(λ − λ₀)²` exactly, so `Re μ″(λ₀) = 2c₀`.

use std::sync::Arc;

use num_complex::Complex;

use super::{Monomial, ParameterizedSystem, PolynomialField};
use crate::error::{HopfError, Result};
use crate::linalg::{ComplexLu, RMatrix};
use crate::scalar::Scalar;

/// The linear part is `S · [[M(λ), E(λ)], [0, D]] · S⁻¹` with
/// `M(λ) = [[β + aδ, κ + bδ], [−κ + cδ, β − aδ]]`, `β = c₀δ²`, `δ = λ − λ₀`
/// and `E(λ) = E₀ + δE₁`. While `|δ|` is small the pair stays complex and its
/// real part is exactly `β`.
#[derive(Debug, Clone)]
pub struct ForcedTangency<T: Scalar> {
    pub lambda0: T,
    pub kappa: T,
    pub c0: T,
    pub a: T,
    pub b: T,
    pub c: T,
    /// `m × m` block whose spectrum the caller keeps off the imaginary axis.
    pub stable_block: Vec<Vec<T>>,
    /// `2 × m` couplings `E₀`, `E₁`.
    pub coupling0: Vec<Vec<T>>,
    pub coupling1: Vec<Vec<T>>,
    /// Invertible `n × n` change of basis `S`, `n = m + 2`.
    pub basis: Vec<Vec<T>>,
    /// Nonlinear terms (degree ≥ 2), added as given.
    pub nonlinear: Vec<Monomial<T>>,
}

impl<T: Scalar> ForcedTangency<T> {
    pub fn dim(&self) -> usize {
        self.stable_block.len() + 2
    }

    /// The exact `Re μ″(λ₀)`.
    pub fn re_mu_second(&self) -> T {
        self.c0 + self.c0
    }

    /// Block matrix coefficients `B₀ + δB₁ + δ²B₂`.
    fn blocks(&self) -> [RMatrix<T>; 3] {
        let n = self.dim();
        let z = T::zero();
        let b0 = RMatrix::from_fn(n, n, |i, j| match (i < 2, j < 2) {
            (true, true) => match (i, j) {
                (0, 1) => self.kappa,
                (1, 0) => -self.kappa,
                _ => z,
            },
            (true, false) => self.coupling0[i][j - 2],
            (false, false) => self.stable_block[i - 2][j - 2],
            (false, true) => z,
        });
        let b1 = RMatrix::from_fn(n, n, |i, j| match (i < 2, j < 2) {
            (true, true) => match (i, j) {
                (0, 0) => self.a,
                (0, 1) => self.b,
                (1, 0) => self.c,
                _ => -self.a,
            },
            (true, false) => self.coupling1[i][j - 2],
            _ => z,
        });
        let b2 = RMatrix::from_fn(n, n, |i, j| if i == j && i < 2 { self.c0 } else { z });
        [b0, b1, b2]
    }

    pub fn build(&self, label: &str) -> Result<ParameterizedSystem<T>> {
        let n = self.dim();
        let m = n - 2;
        let shape_ok = self.stable_block.iter().all(|r| r.len() == m)
            && self.coupling0.len() == 2
            && self.coupling1.len() == 2
            && self.coupling0.iter().chain(&self.coupling1).all(|r| r.len() == m)
            && self.basis.len() == n
            && self.basis.iter().all(|r| r.len() == n);
        if !shape_ok {
            return Err(HopfError::InvalidArgument("inconsistent block shapes".into()));
        }
        let s = RMatrix::from_rows(&self.basis);
        let lu = ComplexLu::new(&s.to_complex())?;
        let mut inv = RMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![Complex::new(T::zero(), T::zero()); n];
            e[j] = Complex::new(T::one(), T::zero());
            let col = lu.solve(&e);
            for i in 0..n {
                inv.as_mut_slice()[i * n + j] = col[i].re;
            }
        }
        let [p0, p1, p2] = self.blocks().map(|b| s.matmul(&b).matmul(&inv));
        // re-expand Σ P_k (λ − λ₀)^k in powers of λ
        let l0 = self.lambda0;
        let two = T::one() + T::one();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (q0, q1, q2) = (p0[(i, j)], p1[(i, j)], p2[(i, j)]);
                let coeffs = vec![q0 - q1 * l0 + q2 * l0 * l0, q1 - two * q2 * l0, q2];
                if coeffs.iter().all(|v| *v == T::zero()) {
                    continue;
                }
                let mut exponents = vec![0u32; n];
                exponents[j] = 1;
                terms.push(Monomial {
                    component: i,
                    exponents,
                    coeffs,
                });
            }
        }
        terms.extend(self.nonlinear.iter().cloned());
        let field = PolynomialField::new(n, terms)?;
        ParameterizedSystem::new(label, Arc::new(field), (l0 - T::one(), l0 + T::one()))
    }
}
