use num_complex::Complex;
use serde::Serialize;

use super::VectorField;
use crate::error::{HopfError, Result};
use crate::linalg::RMatrix;
use crate::scalar::{czero, Scalar};

/// One term `c(λ) · Π x_j^{e_j}` contributing to component `component`,
/// with `c(λ) = Σ_k coeffs[k] λ^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Monomial<T: Scalar> {
    pub component: usize,
    pub exponents: Vec<u32>,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> Monomial<T> {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// `d^order/dλ^order` of the coefficient polynomial.
    fn coeff(&self, lambda: T, order: usize) -> T {
        let mut acc = T::zero();
        for (k, &c) in self.coeffs.iter().enumerate().skip(order) {
            let mut falling = T::one();
            for j in 0..order {
                falling *= T::from_usize(k - j).unwrap();
            }
            acc += c * falling * lambda.powi((k - order) as i32);
        }
        acc
    }

    fn monomial_real(&self, x: &[T]) -> T {
        self.exponents
            .iter()
            .zip(x)
            .fold(T::one(), |acc, (&e, &v)| acc * v.powi(e as i32))
    }

    fn monomial_complex(&self, x: &[Complex<T>]) -> Complex<T> {
        self.exponents
            .iter()
            .zip(x)
            .fold(Complex::new(T::one(), T::zero()), |acc, (&e, v)| {
                acc * v.powu(e)
            })
    }
}

/// Polynomial vector field with λ-polynomial coefficients. Every derivative
/// hook is exact: multilinear forms come from polarization of the
/// homogeneous parts evaluated in complex arithmetic.
#[derive(Debug, Clone, Serialize)]
pub struct PolynomialField<T: Scalar> {
    dim: usize,
    terms: Vec<Monomial<T>>,
}

impl<T: Scalar> PolynomialField<T> {
    pub fn new(dim: usize, terms: Vec<Monomial<T>>) -> Result<Self> {
        for (idx, t) in terms.iter().enumerate() {
            if t.component >= dim {
                return Err(HopfError::InvalidArgument(format!(
                    "term {idx}: component {} out of range for dimension {dim}",
                    t.component
                )));
            }
            if t.exponents.len() != dim {
                return Err(HopfError::InvalidArgument(format!(
                    "term {idx}: exponent multi-index has length {}, expected {dim}",
                    t.exponents.len()
                )));
            }
            if t.degree() == 0 {
                return Err(HopfError::InvalidArgument(format!(
                    "term {idx}: constant terms break the trivial branch F(0, λ) = 0"
                )));
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn terms(&self) -> &[Monomial<T>] {
        &self.terms
    }

    fn homogeneous(&self, degree: u32) -> impl Iterator<Item = &Monomial<T>> {
        self.terms.iter().filter(move |t| t.degree() == degree)
    }

    fn linear_part(&self, lambda: T, order: usize, a: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![czero::<T>(); self.dim];
        for t in self.homogeneous(1) {
            let j = t.exponents.iter().position(|&e| e == 1).unwrap();
            out[t.component] += a[j] * t.coeff(lambda, order);
        }
        out
    }

    fn eval_homogeneous(&self, degree: u32, lambda: T, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![czero::<T>(); self.dim];
        for t in self.homogeneous(degree) {
            out[t.component] += t.monomial_complex(x) * t.coeff(lambda, 0);
        }
        out
    }
}

fn add<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl<T: Scalar> VectorField<T> for PolynomialField<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[T], lambda: T, out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        for t in &self.terms {
            out[t.component] += t.coeff(lambda, 0) * t.monomial_real(x);
        }
    }

    fn jacobian(&self, lambda: T) -> Option<RMatrix<T>> {
        let mut j = RMatrix::zeros(self.dim, self.dim);
        for t in self.homogeneous(1) {
            let col = t.exponents.iter().position(|&e| e == 1).unwrap();
            j[(t.component, col)] += t.coeff(lambda, 0);
        }
        Some(j)
    }

    fn jacobian_at(&self, x: &[T], lambda: T) -> Option<RMatrix<T>> {
        let mut j = RMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            let c = t.coeff(lambda, 0);
            for (col, &e) in t.exponents.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut d = c * T::from_u32(e).unwrap();
                for (k, (&ek, &xk)) in t.exponents.iter().zip(x).enumerate() {
                    let p = if k == col { ek - 1 } else { ek };
                    d *= xk.powi(p as i32);
                }
                j[(t.component, col)] += d;
            }
        }
        Some(j)
    }

    fn bilinear(&self, lambda: T, a: &[Complex<T>], b: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        // D²q[a,b] = q(a+b) - q(a) - q(b) for homogeneous quadratic q
        let ab = add(a, b);
        let qab = self.eval_homogeneous(2, lambda, &ab);
        let qa = self.eval_homogeneous(2, lambda, a);
        let qb = self.eval_homogeneous(2, lambda, b);
        Some((0..self.dim).map(|i| qab[i] - qa[i] - qb[i]).collect())
    }

    fn trilinear(
        &self,
        lambda: T,
        a: &[Complex<T>],
        b: &[Complex<T>],
        c: &[Complex<T>],
    ) -> Option<Vec<Complex<T>>> {
        // cubic polarization
        let abc = add(&add(a, b), c);
        let ab = add(a, b);
        let ac = add(a, c);
        let bc = add(b, c);
        let e = |v: &[Complex<T>]| self.eval_homogeneous(3, lambda, v);
        let (f_abc, f_ab, f_ac, f_bc) = (e(&abc), e(&ab), e(&ac), e(&bc));
        let (f_a, f_b, f_c) = (e(a), e(b), e(c));
        Some(
            (0..self.dim)
                .map(|i| f_abc[i] - f_ab[i] - f_ac[i] - f_bc[i] + f_a[i] + f_b[i] + f_c[i])
                .collect(),
        )
    }

    fn mixed_xlambda(&self, lambda: T, a: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        Some(self.linear_part(lambda, 1, a))
    }

    fn mixed_xlambda2(&self, lambda: T, a: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        Some(self.linear_part(lambda, 2, a))
    }
}
