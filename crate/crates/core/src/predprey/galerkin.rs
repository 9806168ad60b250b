//! Cosine-Galerkin truncation. Coordinates are weighted coefficients
//! `y_j = √w_j · c_j` of `u = Σ c_j cos(jx/ℓ)` (and likewise for `v`), with
//! `w_0 = ℓπ`, `w_j = ℓπ/2`, so that the Euclidean pairing of coordinate
//! vectors is the `L²(0, ℓπ)` product. Layout: `[u_0..u_N, v_0..v_N]`.

use std::sync::Arc;

use num_complex::Complex;

use super::PredPreyParams;
use crate::error::{HopfError, Result};
use crate::linalg::RMatrix;
use crate::scalar::{lit, Scalar};
use crate::system::{ParameterizedSystem, VectorField};

/// `‖cos(jx/ℓ)‖²` on `(0, ℓπ)`.
pub fn mode_weight<T: Scalar>(ell: T, j: usize) -> T {
    let full = ell * T::PI();
    if j == 0 {
        full
    } else {
        full / lit(2.0)
    }
}

pub struct PredPreyGalerkin<T: Scalar> {
    params: PredPreyParams<T>,
    modes: usize,
    sqrt_w: Vec<T>,
    /// `cos(j x_m / ℓ)` on the cell-centred collocation grid, row per mode.
    cos: Vec<Vec<T>>,
    /// Discrete cosine projection weights `c_j / M` (`c_0 = 1`, `c_j = 2`).
    proj: Vec<T>,
}

/// Second- and third-order partials of the kinetics at the equilibrium.
/// Only `u`-heavy partials are nonzero (the kinetics are linear in `v`).
struct Partials<T> {
    fuu: T,
    fuv: T,
    fuuu: T,
    fuuv: T,
    guu: T,
    guv: T,
    guuu: T,
    guuv: T,
}

impl<T: Scalar> PredPreyGalerkin<T> {
    pub fn new(params: PredPreyParams<T>, modes: usize) -> Result<Self> {
        params.validate()?;
        if modes == 0 {
            return Err(HopfError::InvalidArgument("need at least one cosine mode".into()));
        }
        let n1 = modes + 1;
        let m = 4 * n1;
        let mf = T::from_usize(m).unwrap();
        let cos = (0..n1)
            .map(|j| {
                (0..m)
                    .map(|i| {
                        let s = (T::from_usize(i).unwrap() + lit(0.5)) / mf;
                        (T::from_usize(j).unwrap() * T::PI() * s).cos()
                    })
                    .collect()
            })
            .collect();
        let proj = (0..n1)
            .map(|j| if j == 0 { T::one() / mf } else { lit::<T>(2.0) / mf })
            .collect();
        let sqrt_w = (0..n1).map(|j| mode_weight(params.ell, j).sqrt()).collect();
        Ok(Self {
            params,
            modes,
            sqrt_w,
            cos,
            proj,
        })
    }

    pub fn params(&self) -> &PredPreyParams<T> {
        &self.params
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    fn n1(&self) -> usize {
        self.modes + 1
    }

    fn wave2(&self, j: usize) -> T {
        T::from_usize(j * j).unwrap() / (self.params.ell * self.params.ell)
    }

    /// Kinetics `(f, g)` at `p = u + λ`, `q = v + v_λ`.
    fn kinetics(&self, lambda: T, u: T, v: T) -> (T, T) {
        let p = u + lambda;
        let q = v + self.params.v_lambda(lambda);
        let m = self.params.m(lambda);
        let pred = m * p * q / (T::one() + p);
        let f = p * (T::one() - p / self.params.k) - pred;
        let g = -self.params.theta * q + pred;
        (f, g)
    }

    /// First partials `(f_u, f_v, g_u, g_v)` at a state.
    fn gradient(&self, lambda: T, u: T, v: T) -> (T, T, T, T) {
        let p = u + lambda;
        let q = v + self.params.v_lambda(lambda);
        let m = self.params.m(lambda);
        let s = T::one() + p;
        let h = p / s;
        let h1 = T::one() / (s * s);
        let fu = T::one() - lit::<T>(2.0) * p / self.params.k - m * q * h1;
        let fv = -m * h;
        let gu = m * q * h1;
        let gv = -self.params.theta + m * h;
        (fu, fv, gu, gv)
    }

    fn partials(&self, lambda: T) -> Partials<T> {
        let p = lambda;
        let q = self.params.v_lambda(lambda);
        let m = self.params.m(lambda);
        let s = T::one() + p;
        let h1 = T::one() / (s * s);
        let h2 = -lit::<T>(2.0) / (s * s * s);
        let h3 = lit::<T>(6.0) / (s * s * s * s);
        Partials {
            fuu: -lit::<T>(2.0) / self.params.k - m * q * h2,
            fuv: -m * h1,
            fuuu: -m * q * h3,
            fuuv: -m * h2,
            guu: m * q * h2,
            guv: m * h1,
            guuu: m * q * h3,
            guuv: m * h2,
        }
    }

    /// Splits weighted coordinates into plain cosine coefficients.
    fn unweight<E>(&self, y: &[E]) -> (Vec<E>, Vec<E>)
    where
        E: Copy + std::ops::Div<T, Output = E>,
    {
        let n1 = self.n1();
        let u = (0..n1).map(|j| y[j] / self.sqrt_w[j]).collect();
        let v = (0..n1).map(|j| y[n1 + j] / self.sqrt_w[j]).collect();
        (u, v)
    }

    fn reweight(&self, u: &[Complex<T>], v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n1 = self.n1();
        (0..n1)
            .map(|j| u[j] * self.sqrt_w[j])
            .chain((0..n1).map(|j| v[j] * self.sqrt_w[j]))
            .collect()
    }

    /// Per-mode 2×2 block `[[a, b], [c, d]]` acting on `(u_j, v_j)`.
    fn blockwise(&self, a: &[Complex<T>], block: impl Fn(usize) -> [T; 4]) -> Vec<Complex<T>> {
        let n1 = self.n1();
        let mut out = vec![Complex::new(T::zero(), T::zero()); 2 * n1];
        for j in 0..n1 {
            let [m00, m01, m10, m11] = block(j);
            out[j] = a[j] * m00 + a[n1 + j] * m01;
            out[n1 + j] = a[j] * m10 + a[n1 + j] * m11;
        }
        out
    }
}

/// Cosine-series product via `cos a cos b = ½cos(a−b) + ½cos(a+b)`,
/// untruncated (length `len(a) + len(b) − 1`).
fn cos_product<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let half = lit::<T>(0.5);
    let mut c = vec![Complex::new(T::zero(), T::zero()); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai.re == T::zero() && ai.im == T::zero() {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let t = ai * bj * half;
            c[i.abs_diff(j)] += t;
            c[i + j] += t;
        }
    }
    c
}

fn truncated<T: Scalar>(mut v: Vec<Complex<T>>, n1: usize) -> Vec<Complex<T>> {
    v.truncate(n1);
    v
}

fn axpy<T: Scalar>(a: T, x: &[Complex<T>], b: T, y: &[Complex<T>], n1: usize) -> Vec<Complex<T>> {
    (0..n1).map(|j| x[j] * a + y[j] * b).collect()
}

impl<T: Scalar> VectorField<T> for PredPreyGalerkin<T> {
    fn dim(&self) -> usize {
        2 * self.n1()
    }

    fn eval(&self, y: &[T], lambda: T, out: &mut [T]) {
        let n1 = self.n1();
        let (u, v) = self.unweight(y);
        let m = self.cos[0].len();
        let (f0, g0) = self.kinetics(lambda, T::zero(), T::zero());
        let mut fk = vec![T::zero(); m];
        let mut gk = vec![T::zero(); m];
        for i in 0..m {
            let mut ui = T::zero();
            let mut vi = T::zero();
            for j in 0..n1 {
                ui += u[j] * self.cos[j][i];
                vi += v[j] * self.cos[j][i];
            }
            let (f, g) = self.kinetics(lambda, ui, vi);
            // subtracting the equilibrium value keeps F(0, λ) = 0 exactly
            fk[i] = f - f0;
            gk[i] = g - g0;
        }
        let p = &self.params;
        for j in 0..n1 {
            let mut pf = T::zero();
            let mut pg = T::zero();
            for i in 0..m {
                pf += fk[i] * self.cos[j][i];
                pg += gk[i] * self.cos[j][i];
            }
            let w2 = self.wave2(j);
            out[j] = self.sqrt_w[j] * (-p.d1 * w2 * u[j] + self.proj[j] * pf);
            out[n1 + j] = self.sqrt_w[j] * (-p.d2 * w2 * v[j] + self.proj[j] * pg);
        }
    }

    fn jacobian(&self, lambda: T) -> Option<RMatrix<T>> {
        let n1 = self.n1();
        let p = &self.params;
        let (a, c) = (p.a(lambda), p.c(lambda));
        Some(RMatrix::from_fn(2 * n1, 2 * n1, |r, s| {
            let (jr, js) = (r % n1, s % n1);
            if jr != js {
                return T::zero();
            }
            let w2 = self.wave2(jr);
            match (r < n1, s < n1) {
                (true, true) => -p.d1 * w2 + a,
                (true, false) => -p.theta,
                (false, true) => c,
                (false, false) => -p.d2 * w2,
            }
        }))
    }

    fn jacobian_at(&self, y: &[T], lambda: T) -> Option<RMatrix<T>> {
        let n1 = self.n1();
        let (u, v) = self.unweight(y);
        let m = self.cos[0].len();
        let mut grads = Vec::with_capacity(m);
        for i in 0..m {
            let mut ui = T::zero();
            let mut vi = T::zero();
            for j in 0..n1 {
                ui += u[j] * self.cos[j][i];
                vi += v[j] * self.cos[j][i];
            }
            grads.push(self.gradient(lambda, ui, vi));
        }
        let p = &self.params;
        let mut jac = RMatrix::zeros(2 * n1, 2 * n1);
        let data = jac.as_mut_slice();
        let dim = 2 * n1;
        for r in 0..n1 {
            for s in 0..n1 {
                let (mut fu, mut fv, mut gu, mut gv) = (T::zero(), T::zero(), T::zero(), T::zero());
                for (i, g) in grads.iter().enumerate() {
                    let w = self.cos[r][i] * self.cos[s][i];
                    fu += g.0 * w;
                    fv += g.1 * w;
                    gu += g.2 * w;
                    gv += g.3 * w;
                }
                let scale = self.proj[r] * self.sqrt_w[r] / self.sqrt_w[s];
                data[r * dim + s] = fu * scale;
                data[r * dim + n1 + s] = fv * scale;
                data[(n1 + r) * dim + s] = gu * scale;
                data[(n1 + r) * dim + n1 + s] = gv * scale;
            }
            let w2 = self.wave2(r);
            data[r * dim + r] -= p.d1 * w2;
            data[(n1 + r) * dim + n1 + r] -= p.d2 * w2;
        }
        Some(jac)
    }

    fn bilinear(&self, lambda: T, a: &[Complex<T>], b: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        let n1 = self.n1();
        let d = self.partials(lambda);
        let (au, av) = self.unweight(a);
        let (bu, bv) = self.unweight(b);
        let uu = cos_product(&au, &bu);
        let uv: Vec<Complex<T>> = cos_product(&au, &bv)
            .into_iter()
            .zip(cos_product(&av, &bu))
            .map(|(x, y)| x + y)
            .collect();
        let f = axpy(d.fuu, &uu, d.fuv, &uv, n1);
        let g = axpy(d.guu, &uu, d.guv, &uv, n1);
        Some(self.reweight(&f, &g))
    }

    fn trilinear(
        &self,
        lambda: T,
        a: &[Complex<T>],
        b: &[Complex<T>],
        c: &[Complex<T>],
    ) -> Option<Vec<Complex<T>>> {
        let n1 = self.n1();
        let d = self.partials(lambda);
        let (au, av) = self.unweight(a);
        let (bu, bv) = self.unweight(b);
        let (cu, cv) = self.unweight(c);
        let ab = cos_product(&au, &bu);
        let uuu = truncated(cos_product(&ab, &cu), n1);
        let t1 = cos_product(&ab, &cv);
        let t2 = cos_product(&cos_product(&au, &cu), &bv);
        let t3 = cos_product(&cos_product(&bu, &cu), &av);
        let uuv: Vec<Complex<T>> = (0..n1).map(|j| t1[j] + t2[j] + t3[j]).collect();
        let f = axpy(d.fuuu, &uuu, d.fuuv, &uuv, n1);
        let g = axpy(d.guuu, &uuu, d.guuv, &uuv, n1);
        Some(self.reweight(&f, &g))
    }

    fn mixed_xlambda(&self, lambda: T, a: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        let p = &self.params;
        let (da, dc) = (p.a_prime(lambda), p.c_prime(lambda));
        Some(self.blockwise(a, |_| [da, T::zero(), dc, T::zero()]))
    }

    fn mixed_xlambda2(&self, lambda: T, a: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        let p = &self.params;
        let (da, dc) = (p.a_second(lambda), p.c_second(lambda));
        Some(self.blockwise(a, |_| [da, T::zero(), dc, T::zero()]))
    }

    fn linear_diagonal(&self, _lambda: T) -> Option<Vec<T>> {
        let n1 = self.n1();
        let p = &self.params;
        Some(
            (0..n1)
                .map(|j| -p.d1 * self.wave2(j))
                .chain((0..n1).map(|j| -p.d2 * self.wave2(j)))
                .collect(),
        )
    }
}

/// The `2(N+1)`-dimensional truncation with modes `0..=N`, defined for
/// `λ ∈ (0, k)`.
pub fn galerkin_system<T: Scalar>(params: &PredPreyParams<T>, modes: usize) -> Result<ParameterizedSystem<T>> {
    let field = PredPreyGalerkin::new(*params, modes)?;
    ParameterizedSystem::new("predprey", Arc::new(field), (T::zero(), params.k))
}
