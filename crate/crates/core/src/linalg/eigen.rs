//! Dense nonsymmetric eigensolver: Householder reduction to Hessenberg form,
//! single-shift complex QR to Schur form, then eigenvectors by back
//! substitution on the triangular factor.

use num_complex::Complex;
use num_traits::Zero;

use super::CMatrix;
use crate::error::{HopfError, Result};
use crate::scalar::{cnorm, lit, Scalar};

#[derive(Debug, Clone)]
pub struct EigenPair<T: Scalar> {
    pub value: Complex<T>,
    /// Unit 2-norm right eigenvector.
    pub vector: Vec<Complex<T>>,
}

const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Complete spectrum of a square complex matrix with unit-norm right eigenvectors.
pub fn eigenpairs<T: Scalar>(a: &CMatrix<T>) -> Result<Vec<EigenPair<T>>> {
    if !a.is_square() {
        return Err(HopfError::InvalidArgument(
            "eigenpairs requires a square matrix".into(),
        ));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.as_slice().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(HopfError::NumericalFailure(
            "non-finite entry in eigenproblem".into(),
        ));
    }
    let (mut h, mut z) = hessenberg(a);
    schur_qr(&mut h, &mut z)?;
    Ok(triangular_eigenvectors(&h, &z))
}

fn hessenberg<T: Scalar>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut z = CMatrix::<T>::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = cnorm(&x);
        if xnorm == T::zero() {
            continue;
        }
        let tail: T = x[1..].iter().map(|v| v.norm_sqr()).sum();
        if tail == T::zero() {
            continue;
        }
        let phase = if x[0].norm() > T::zero() {
            x[0] / x[0].norm()
        } else {
            Complex::new(T::one(), T::zero())
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = cnorm(&v);
        for vi in &mut v {
            *vi /= vnorm;
        }
        let two = lit::<T>(2.0);
        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let s = v
                .iter()
                .enumerate()
                .fold(Complex::zero(), |acc: Complex<T>, (i, vi)| {
                    acc + vi.conj() * h[(k + 1 + i, j)]
                });
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * s * two;
            }
        }
        // H <- H (I - 2 v v^H), Z <- Z (I - 2 v v^H)
        for m in [&mut h, &mut z] {
            for i in 0..n {
                let s = v
                    .iter()
                    .enumerate()
                    .fold(Complex::zero(), |acc: Complex<T>, (j, vj)| {
                        acc + m[(i, k + 1 + j)] * *vj
                    });
                for (j, vj) in v.iter().enumerate() {
                    m[(i, k + 1 + j)] -= s * vj.conj() * two;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    (h, z)
}

/// Givens rotation `[c, s; -conj(s), c]` with real `c` mapping `(x, y)` to `(r, 0)`.
fn givens<T: Scalar>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), Complex::zero());
    }
    if ax == T::zero() {
        return (T::zero(), y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn schur_qr<T: Scalar>(h: &mut CMatrix<T>, z: &mut CMatrix<T>) -> Result<()> {
    let n = h.rows();
    let eps = T::epsilon();
    let hnorm = h.complex_frobenius_norm().max(T::min_positive_value());
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // find start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == T::zero() {
                diag = hnorm;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = Complex::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > MAX_ITER_PER_EIGENVALUE * n {
            return Err(HopfError::NumericalFailure(
                "QR iteration did not converge".into(),
            ));
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex::new(h[(hi, hi - 1)].norm(), T::zero()) * lit::<T>(0.75)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let cc = Complex::new(c, T::zero());
            let start = if k == lo { lo } else { k - 1 };
            for j in start..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = cc * a + s * b;
                h[(k + 1, j)] = cc * b - s.conj() * a;
            }
            if k > lo {
                h[(k + 1, k - 1)] = Complex::zero();
            }
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = cc * a + s.conj() * b;
                h[(i, k + 1)] = cc * b - s * a;
            }
            for i in 0..n {
                let a = z[(i, k)];
                let b = z[(i, k + 1)];
                z[(i, k)] = cc * a + s.conj() * b;
                z[(i, k + 1)] = cc * b - s * a;
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = Complex::zero();
        }
    }
    Ok(())
}

fn wilkinson_shift<T: Scalar>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
) -> Complex<T> {
    let half = lit::<T>(0.5);
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    let m1 = mean + disc;
    let m2 = mean - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

fn triangular_eigenvectors<T: Scalar>(t: &CMatrix<T>, z: &CMatrix<T>) -> Vec<EigenPair<T>> {
    let n = t.rows();
    let small = T::epsilon() * t.complex_frobenius_norm().max(T::min_positive_value());
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut y = vec![Complex::<T>::zero(); n];
            y[k] = Complex::new(T::one(), T::zero());
            for i in (0..k).rev() {
                let mut s = Complex::<T>::zero();
                for j in i + 1..=k {
                    s += t[(i, j)] * y[j];
                }
                let mut denom = t[(i, i)] - lambda;
                if denom.norm() < small {
                    denom = Complex::new(small, T::zero());
                }
                y[i] = -s / denom;
            }
            let mut x = z.mul_vec(&y);
            let nrm = cnorm(&x);
            for v in &mut x {
                *v /= nrm;
            }
            EigenPair {
                value: lambda,
                vector: x,
            }
        })
        .collect()
}
