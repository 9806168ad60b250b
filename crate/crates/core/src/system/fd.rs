//! Central finite-difference stencils for the derivative tensors at the origin.
//! Complex directions never reach the vector field: each tensor is expanded
//! multilinearly over real and imaginary parts.

use num_complex::Complex;

use super::ParameterizedSystem;
use crate::error::Result;
use crate::linalg::RMatrix;
use crate::scalar::{czero, imag_part, lit, norm, real_part, Scalar};

fn eps_pow<T: Scalar>(p: f64) -> T {
    T::epsilon().powf(lit(p))
}

fn step_for<T: Scalar>(base: T, dir: &[T]) -> T {
    base / T::one().max(norm(dir))
}

fn lambda_step<T: Scalar>(base: T, lambda: T) -> T {
    base * T::one().max(lambda.abs())
}

fn eval<T: Scalar>(sys: &ParameterizedSystem<T>, x: &[T], lambda: T) -> Vec<T> {
    let mut out = vec![T::zero(); sys.dim()];
    sys.eval_unchecked(x, lambda, &mut out);
    out
}

fn combo<T: Scalar>(terms: &[(T, &[T])]) -> Vec<T> {
    let n = terms[0].1.len();
    (0..n)
        .map(|i| terms.iter().fold(T::zero(), |acc, (c, v)| acc + *c * v[i]))
        .collect()
}

fn is_zero<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|x| *x == T::zero())
}

pub(super) fn jacobian_at<T: Scalar>(sys: &ParameterizedSystem<T>, x: &[T], lambda: T) -> RMatrix<T> {
    let n = sys.dim();
    let base = eps_pow::<T>(0.5);
    let mut jac = RMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = base * T::one().max(x[j].abs());
        xp[j] = x[j] + h;
        let fp = eval(sys, &xp, lambda);
        xp[j] = x[j] - h;
        let fm = eval(sys, &xp, lambda);
        xp[j] = x[j];
        let two_h = h + h;
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / two_h;
        }
    }
    jac
}

fn bilinear_real<T: Scalar>(sys: &ParameterizedSystem<T>, lambda: T, a: &[T], b: &[T]) -> Vec<T> {
    if is_zero(a) || is_zero(b) {
        return vec![T::zero(); sys.dim()];
    }
    let base = eps_pow::<T>(0.25);
    let t = step_for(base, a);
    let s = step_for(base, b);
    let one = T::one();
    let pp = eval(sys, &combo(&[(t, a), (s, b)]), lambda);
    let pm = eval(sys, &combo(&[(t, a), (-s, b)]), lambda);
    let mp = eval(sys, &combo(&[(-t, a), (s, b)]), lambda);
    let mm = eval(sys, &combo(&[(-t, a), (-s, b)]), lambda);
    let denom = lit::<T>(4.0) * t * s;
    combo(&[(one, &pp), (-one, &pm), (-one, &mp), (one, &mm)])
        .into_iter()
        .map(|v| v / denom)
        .collect()
}

pub(super) fn bilinear<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    a: &[Complex<T>],
    b: &[Complex<T>],
) -> Vec<Complex<T>> {
    let (ar, ai) = (real_part(a), imag_part(a));
    let (br, bi) = (real_part(b), imag_part(b));
    let rr = bilinear_real(sys, lambda, &ar, &br);
    let ii = bilinear_real(sys, lambda, &ai, &bi);
    let ri = bilinear_real(sys, lambda, &ar, &bi);
    let ir = bilinear_real(sys, lambda, &ai, &br);
    (0..sys.dim())
        .map(|k| Complex::new(rr[k] - ii[k], ri[k] + ir[k]))
        .collect()
}

fn trilinear_real<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    a: &[T],
    b: &[T],
    c: &[T],
) -> Vec<T> {
    let n = sys.dim();
    if is_zero(a) || is_zero(b) || is_zero(c) {
        return vec![T::zero(); n];
    }
    let base = eps_pow::<T>(1.0 / 6.0);
    let (ta, tb, tc) = (step_for(base, a), step_for(base, b), step_for(base, c));
    let mut acc = vec![T::zero(); n];
    for mask in 0..8u8 {
        let sa = if mask & 1 == 0 { T::one() } else { -T::one() };
        let sb = if mask & 2 == 0 { T::one() } else { -T::one() };
        let sc = if mask & 4 == 0 { T::one() } else { -T::one() };
        let x = combo(&[(sa * ta, a), (sb * tb, b), (sc * tc, c)]);
        let f = eval(sys, &x, lambda);
        let sign = sa * sb * sc;
        for i in 0..n {
            acc[i] += sign * f[i];
        }
    }
    let denom = lit::<T>(8.0) * ta * tb * tc;
    acc.into_iter().map(|v| v / denom).collect()
}

pub(super) fn trilinear<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    a: &[Complex<T>],
    b: &[Complex<T>],
    c: &[Complex<T>],
) -> Vec<Complex<T>> {
    let parts = |v: &[Complex<T>]| [real_part(v), imag_part(v)];
    let (pa, pb, pc) = (parts(a), parts(b), parts(c));
    let n = sys.dim();
    let mut out = vec![czero::<T>(); n];
    // i^k for k = number of imaginary factors
    let unit = [
        Complex::new(T::one(), T::zero()),
        Complex::new(T::zero(), T::one()),
        Complex::new(-T::one(), T::zero()),
        Complex::new(T::zero(), -T::one()),
    ];
    for mask in 0..8usize {
        let (ia, ib, ic) = (mask & 1, (mask >> 1) & 1, (mask >> 2) & 1);
        let w = unit[ia + ib + ic];
        let t = trilinear_real(sys, lambda, &pa[ia], &pb[ib], &pc[ic]);
        for k in 0..n {
            out[k] += w * t[k];
        }
    }
    out
}

fn mixed_real<T: Scalar>(sys: &ParameterizedSystem<T>, lambda: T, a: &[T]) -> Vec<T> {
    if is_zero(a) {
        return vec![T::zero(); sys.dim()];
    }
    let base = eps_pow::<T>(0.25);
    let t = step_for(base, a);
    let k = lambda_step(base, lambda);
    let one = T::one();
    let xp = combo(&[(t, a)]);
    let xm = combo(&[(-t, a)]);
    let f1 = eval(sys, &xp, lambda + k);
    let f2 = eval(sys, &xm, lambda + k);
    let f3 = eval(sys, &xp, lambda - k);
    let f4 = eval(sys, &xm, lambda - k);
    let denom = lit::<T>(4.0) * t * k;
    combo(&[(one, &f1), (-one, &f2), (-one, &f3), (one, &f4)])
        .into_iter()
        .map(|v| v / denom)
        .collect()
}

fn complexify<T: Scalar>(
    a: &[Complex<T>],
    f: impl Fn(&[T]) -> Vec<T>,
) -> Vec<Complex<T>> {
    let re = f(&real_part(a));
    let im = f(&imag_part(a));
    re.into_iter()
        .zip(im)
        .map(|(r, i)| Complex::new(r, i))
        .collect()
}

pub(super) fn mixed_xlambda<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    a: &[Complex<T>],
) -> Vec<Complex<T>> {
    complexify(a, |v| mixed_real(sys, lambda, v))
}

fn jvp_fd<T: Scalar>(sys: &ParameterizedSystem<T>, lambda: T, a: &[T], t: T) -> Vec<T> {
    let fp = eval(sys, &combo(&[(t, a)]), lambda);
    let fm = eval(sys, &combo(&[(-t, a)]), lambda);
    let two_t = t + t;
    fp.into_iter().zip(fm).map(|(p, m)| (p - m) / two_t).collect()
}

fn mixed2_real<T: Scalar>(sys: &ParameterizedSystem<T>, lambda: T, a: &[T]) -> Vec<T> {
    if is_zero(a) {
        return vec![T::zero(); sys.dim()];
    }
    let base = eps_pow::<T>(0.2);
    let t = step_for(base, a);
    let k = lambda_step(base, lambda);
    let jp = jvp_fd(sys, lambda + k, a, t);
    let j0 = jvp_fd(sys, lambda, a, t);
    let jm = jvp_fd(sys, lambda - k, a, t);
    let two = lit::<T>(2.0);
    (0..sys.dim())
        .map(|i| (jp[i] - two * j0[i] + jm[i]) / (k * k))
        .collect()
}

pub(super) fn mixed_xlambda2<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    a: &[Complex<T>],
) -> Vec<Complex<T>> {
    complexify(a, |v| mixed2_real(sys, lambda, v))
}

pub(super) fn mixed_xlambda_from_jacobian<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    a: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let k = lambda_step(eps_pow::<T>(1.0 / 3.0), lambda);
    let jp = sys.jacobian(lambda + k)?.mul_cvec(a);
    let jm = sys.jacobian(lambda - k)?.mul_cvec(a);
    let two_k = k + k;
    Ok(jp.into_iter().zip(jm).map(|(p, m)| (p - m) / two_k).collect())
}

pub(super) fn mixed_xlambda2_from_jacobian<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    a: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let k = lambda_step(eps_pow::<T>(0.25), lambda);
    let jp = sys.jacobian(lambda + k)?.mul_cvec(a);
    let j0 = sys.jacobian(lambda)?.mul_cvec(a);
    let jm = sys.jacobian(lambda - k)?.mul_cvec(a);
    let two = lit::<T>(2.0);
    let kk = k * k;
    Ok((0..a.len())
        .map(|i| (jp[i] - j0[i] * two + jm[i]) / kk)
        .collect())
}
