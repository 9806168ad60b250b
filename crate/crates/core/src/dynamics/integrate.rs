//! Dormand–Prince 5(4) with PI step control and cubic Hermite dense output.
//! When a diagonal linear part `L` is supplied, the step is taken in Lawson
//! (integrating-factor) form, treating `L` exactly.

use serde::Serialize;

use crate::error::{HopfError, Result};
use crate::scalar::{lit, norm, Scalar};
use crate::system::ParameterizedSystem;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegratorOptions<T: Scalar> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    /// States with norm above this count as blow-up.
    pub blowup_norm: T,
    /// Use the diagonal linear part exactly when the system provides one.
    pub integrating_factor: bool,
}

impl<T: Scalar> IntegratorOptions<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self {
            rtol,
            atol,
            max_steps: 2_000_000,
            blowup_norm: lit(1e8),
            integrating_factor: true,
        }
    }
}

impl<T: Scalar> Default for IntegratorOptions<T> {
    fn default() -> Self {
        Self::new(lit(1e-9), lit(1e-12))
    }
}

pub(crate) type Rhs<'a, T> = dyn Fn(&[T], &mut [T]) + Sync + 'a;

pub(crate) struct Stepper<'a, T: Scalar> {
    rhs: &'a Rhs<'a, T>,
    lin: Option<Vec<T>>,
    opts: IntegratorOptions<T>,
    dir: T,
    pub t: T,
    pub x: Vec<T>,
    pub f: Vec<T>,
    nl: Vec<T>,
    pub t_prev: T,
    pub x_prev: Vec<T>,
    pub f_prev: Vec<T>,
    h: T,
    err_old: T,
    steps: usize,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    pub fn new(
        rhs: &'a Rhs<'a, T>,
        lin: Option<Vec<T>>,
        x0: &[T],
        t0: T,
        direction: T,
        opts: IntegratorOptions<T>,
    ) -> Result<Self> {
        if !(opts.rtol > T::zero() && opts.atol > T::zero()) {
            return Err(HopfError::InvalidArgument("tolerances must be positive".into()));
        }
        if x0.iter().any(|v| !v.is_finite()) || !t0.is_finite() {
            return Err(HopfError::InvalidArgument("non-finite initial data".into()));
        }
        let n = x0.len();
        let mut f = vec![T::zero(); n];
        rhs(x0, &mut f);
        let nl = match &lin {
            Some(l) => (0..n).map(|i| f[i] - l[i] * x0[i]).collect(),
            None => f.clone(),
        };
        let mut s = Self {
            rhs,
            lin,
            opts,
            dir: direction.signum(),
            t: t0,
            x: x0.to_vec(),
            f: f.clone(),
            nl,
            t_prev: t0,
            x_prev: x0.to_vec(),
            f_prev: f,
            h: T::zero(),
            err_old: lit(1e-4),
            steps: 0,
        };
        s.h = s.initial_step();
        Ok(s)
    }

    fn scaled_norm(&self, v: &[T], x: &[T]) -> T {
        let n = T::from_usize(v.len().max(1)).unwrap();
        let s: T = v
            .iter()
            .zip(x)
            .map(|(e, xi)| {
                let sc = self.opts.atol + self.opts.rtol * xi.abs();
                (*e / sc) * (*e / sc)
            })
            .sum();
        (s / n).sqrt()
    }

    fn initial_step(&self) -> T {
        let d0 = self.scaled_norm(&self.x, &self.x);
        let d1 = self.scaled_norm(&self.f, &self.x);
        let h0 = if d0 < lit(1e-5) || d1 < lit(1e-5) {
            lit(1e-6)
        } else {
            lit::<T>(0.01) * d0 / d1
        };
        let n = self.x.len();
        let x1: Vec<T> = (0..n).map(|i| self.x[i] + self.dir * h0 * self.f[i]).collect();
        let mut f1 = vec![T::zero(); n];
        (self.rhs)(&x1, &mut f1);
        let df: Vec<T> = (0..n).map(|i| f1[i] - self.f[i]).collect();
        let d2 = self.scaled_norm(&df, &self.x) / h0;
        let h1 = if d1.max(d2) <= lit(1e-15) {
            (h0 * lit(1e-3)).max(lit(1e-6))
        } else {
            (lit::<T>(0.01) / d1.max(d2)).powf(lit(0.2))
        };
        self.dir * (h0 * lit(100.0)).min(h1)
    }

    fn expo(&self, s: T) -> Option<Vec<T>> {
        self.lin.as_ref().map(|l| l.iter().map(|li| (*li * s).exp()).collect())
    }

    /// One Lawson–Dormand–Prince attempt from the current state with step `h`.
    /// Returns the new state, `N` at the new state, and the scaled error.
    fn attempt(&self, h: T) -> (Vec<T>, Vec<T>, T) {
        let n = self.x.len();
        let c: Vec<T> = C.iter().map(|v| lit(*v)).collect();
        let mut ks: Vec<Vec<T>> = Vec::with_capacity(7);
        ks.push(self.nl.clone());
        let mut stage = vec![T::zero(); n];
        let mut fbuf = vec![T::zero(); n];
        for i in 1..7 {
            let ei = self.expo(c[i] * h);
            for q in 0..n {
                stage[q] = match &ei {
                    Some(e) => e[q] * self.x[q],
                    None => self.x[q],
                };
            }
            for (j, kj) in ks.iter().enumerate() {
                let aij = A[i][j];
                if aij == 0.0 {
                    continue;
                }
                let coef = h * lit::<T>(aij);
                match self.expo((c[i] - c[j]) * h) {
                    Some(e) => {
                        for q in 0..n {
                            stage[q] += coef * e[q] * kj[q];
                        }
                    }
                    None => {
                        for q in 0..n {
                            stage[q] += coef * kj[q];
                        }
                    }
                }
            }
            (self.rhs)(&stage, &mut fbuf);
            let nl: Vec<T> = match &self.lin {
                Some(l) => (0..n).map(|q| fbuf[q] - l[q] * stage[q]).collect(),
                None => fbuf.clone(),
            };
            ks.push(nl);
        }
        // stage 7 sits at c = 1 and equals the 5th-order solution (FSAL)
        let x_new = stage.clone();
        let mut err = vec![T::zero(); n];
        for (j, kj) in ks.iter().enumerate() {
            let coef = h * lit::<T>(E[j]);
            if E[j] == 0.0 {
                continue;
            }
            match self.expo((T::one() - c[j]) * h) {
                Some(e) => {
                    for q in 0..n {
                        err[q] += coef * e[q] * kj[q];
                    }
                }
                None => {
                    for q in 0..n {
                        err[q] += coef * kj[q];
                    }
                }
            }
        }
        let n_sc = T::from_usize(n.max(1)).unwrap();
        let s: T = (0..n)
            .map(|q| {
                let sc = self.opts.atol + self.opts.rtol * self.x[q].abs().max(x_new[q].abs());
                (err[q] / sc) * (err[q] / sc)
            })
            .sum();
        let nl_new = ks.pop().unwrap();
        (x_new, nl_new, (s / n_sc).sqrt())
    }

    /// Takes one accepted step, never passing `t_stop` (if given).
    pub fn step(&mut self, t_stop: Option<T>) -> Result<()> {
        let beta = lit::<T>(0.04);
        let expo = lit::<T>(0.2) - beta * lit(0.75);
        let safety = lit::<T>(0.9);
        let mut facmax = lit::<T>(10.0);
        let mut h = self.h;
        loop {
            self.steps += 1;
            if self.steps > self.opts.max_steps {
                return Err(HopfError::NumericalFailure(format!(
                    "step budget exhausted at t = {}",
                    self.t
                )));
            }
            let mut clipped = false;
            if let Some(ts) = t_stop {
                let remaining = ts - self.t;
                if (remaining * self.dir) <= (h * self.dir) {
                    h = remaining;
                    clipped = true;
                }
            }
            let hmin = lit::<T>(16.0) * T::epsilon() * T::one().max(self.t.abs());
            if h.abs() < hmin {
                if clipped && h != T::zero() {
                    // landing exactly on the stop time; accept the tiny step
                } else {
                    return Err(HopfError::StiffnessFailure(self.t.to_f64().unwrap_or(f64::NAN)));
                }
            }
            let (x_new, nl_new, err) = self.attempt(h);
            if x_new.iter().any(|v| !v.is_finite()) || !err.is_finite() {
                if h.abs() < hmin * lit(1e3) {
                    return Err(HopfError::BlowUp(self.t.to_f64().unwrap_or(f64::NAN)));
                }
                h *= lit(0.25);
                facmax = T::one();
                continue;
            }
            if err <= T::one() {
                let n = x_new.len();
                let mut f_new = vec![T::zero(); n];
                match &self.lin {
                    Some(l) => {
                        for q in 0..n {
                            f_new[q] = l[q] * x_new[q] + nl_new[q];
                        }
                    }
                    None => f_new.copy_from_slice(&nl_new),
                }
                self.t_prev = self.t;
                self.x_prev = std::mem::replace(&mut self.x, x_new);
                self.f_prev = std::mem::replace(&mut self.f, f_new);
                self.nl = nl_new;
                self.t = if clipped { t_stop.unwrap() } else { self.t + h };
                let e = err.max(lit(1e-10));
                let fac = (safety * e.powf(-expo) * self.err_old.powf(beta))
                    .min(facmax)
                    .max(lit(0.2));
                self.err_old = e;
                // a clipped step says nothing about the natural step size
                let h_next = h * fac;
                self.h = if clipped && h_next.abs() < self.h.abs() { self.h } else { h_next };
                if norm(&self.x) > self.opts.blowup_norm {
                    return Err(HopfError::BlowUp(self.t.to_f64().unwrap_or(f64::NAN)));
                }
                return Ok(());
            }
            let fac = (safety * err.powf(-lit::<T>(0.2))).max(lit(0.2));
            h *= fac;
            facmax = T::one();
        }
    }

    /// Cubic Hermite interpolation on the last accepted step.
    pub fn interpolate(&self, t: T) -> Vec<T> {
        hermite(self.t_prev, &self.x_prev, &self.f_prev, self.t, &self.x, &self.f, t)
    }
}

pub(crate) fn hermite<T: Scalar>(t0: T, x0: &[T], f0: &[T], t1: T, x1: &[T], f1: &[T], t: T) -> Vec<T> {
    let h = t1 - t0;
    if h == T::zero() {
        return x1.to_vec();
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let h00 = two * s3 - three * s2 + T::one();
    let h10 = s3 - two * s2 + s;
    let h01 = -two * s3 + three * s2;
    let h11 = s3 - s2;
    (0..x0.len())
        .map(|i| h00 * x0[i] + h10 * h * f0[i] + h01 * x1[i] + h11 * h * f1[i])
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<T: Scalar> {
    /// Strictly increasing (backward runs are stored reversed).
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    #[serde(skip)]
    pub derivatives: Vec<Vec<T>>,
    pub lambda: T,
    pub rtol: T,
    pub atol: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn final_state(&self) -> &[T] {
        self.states.last().unwrap()
    }

    /// Dense output at `t` within the recorded span.
    pub fn interpolate(&self, t: T) -> Result<Vec<T>> {
        let (lo, hi) = (self.times[0], *self.times.last().unwrap());
        if !(t >= lo && t <= hi) {
            return Err(HopfError::InvalidArgument(format!(
                "t = {t} outside the trajectory span [{lo}, {hi}]"
            )));
        }
        let idx = match self.times.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.states[i].clone()),
            Err(i) => i,
        };
        let (a, b) = (idx - 1, idx);
        Ok(hermite(
            self.times[a],
            &self.states[a],
            &self.derivatives[a],
            self.times[b],
            &self.states[b],
            &self.derivatives[b],
            t,
        ))
    }
}

pub(crate) fn system_rhs<'a, T: Scalar>(
    sys: &'a ParameterizedSystem<T>,
    lambda: T,
) -> impl Fn(&[T], &mut [T]) + Sync + 'a {
    move |x: &[T], out: &mut [T]| sys.eval_unchecked(x, lambda, out)
}

pub(crate) fn linear_part<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    opts: &IntegratorOptions<T>,
) -> Option<Vec<T>> {
    if opts.integrating_factor {
        sys.linear_diagonal(lambda)
    } else {
        None
    }
}

/// Integrates `x' = F(x, λ)` over `t_span = (t0, t1)` (either orientation).
pub fn integrate<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    x0: &[T],
    lambda: T,
    t_span: (T, T),
    opts: &IntegratorOptions<T>,
) -> Result<Trajectory<T>> {
    if x0.len() != sys.dim() {
        return Err(HopfError::InvalidArgument(format!(
            "initial state has length {}, expected {}",
            x0.len(),
            sys.dim()
        )));
    }
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(HopfError::InvalidArgument("time span must be finite and non-empty".into()));
    }
    let rhs = system_rhs(sys, lambda);
    let mut st = Stepper::new(&rhs, linear_part(sys, lambda, opts), x0, t0, t1 - t0, *opts)?;
    let mut times = vec![t0];
    let mut states = vec![x0.to_vec()];
    let mut derivs = vec![st.f.clone()];
    while st.t != t1 {
        st.step(Some(t1))?;
        times.push(st.t);
        states.push(st.x.clone());
        derivs.push(st.f.clone());
    }
    if t1 < t0 {
        times.reverse();
        states.reverse();
        derivs.reverse();
    }
    Ok(Trajectory {
        times,
        states,
        derivatives: derivs,
        lambda,
        rtol: opts.rtol,
        atol: opts.atol,
    })
}

/// Flow map `Φ_T(x0)` together with the monodromy-type sensitivity
/// `∂Φ_T/∂x0`, from the variational equation `Y' = DₓF(x(t), λ) Y`.
pub fn flow_with_sensitivity<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    x0: &[T],
    lambda: T,
    period: T,
    opts: &IntegratorOptions<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let n = sys.dim();
    let rhs = move |z: &[T], out: &mut [T]| {
        let x = &z[..n];
        sys.eval_unchecked(x, lambda, &mut out[..n]);
        let jac = match sys.jacobian_at(x, lambda) {
            Ok(j) => j,
            Err(_) => {
                out.iter_mut().for_each(|v| *v = T::nan());
                return;
            }
        };
        let j = jac.as_slice();
        for r in 0..n {
            for c in 0..n {
                let mut s = T::zero();
                for k in 0..n {
                    s += j[r * n + k] * z[n + k * n + c];
                }
                out[n + r * n + c] = s;
            }
        }
    };
    let lin = linear_part(sys, lambda, opts).map(|l| {
        let mut full = l.clone();
        for r in 0..n {
            full.extend(std::iter::repeat_n(l[r], n));
        }
        full
    });
    let mut z0 = x0.to_vec();
    for r in 0..n {
        for c in 0..n {
            z0.push(if r == c { T::one() } else { T::zero() });
        }
    }
    let mut vopts = *opts;
    vopts.blowup_norm = T::infinity();
    let mut st = Stepper::new(&rhs, lin, &z0, T::zero(), period, vopts)?;
    while st.t != period {
        st.step(Some(period))?;
    }
    let xt = st.x[..n].to_vec();
    let y = st.x[n..].to_vec();
    Ok((xt, y))
}
