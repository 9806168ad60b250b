//! Limit cycles: relaxation to a Poincaré section, shooting refinement,
//! Floquet analysis and the first-harmonic modal amplitude.

use num_complex::Complex;
use serde::Serialize;

use super::integrate::{flow_with_sensitivity, linear_part, system_rhs, IntegratorOptions, Stepper};
use crate::error::{HopfError, Result};
use crate::hopf::HopfAnalysis;
use crate::linalg::{eigenpairs, CMatrix, ComplexLu, RMatrix};
use crate::scalar::{lit, norm, pairing, Scalar};
use crate::spectral::SpectralData;
use crate::system::ParameterizedSystem;

/// The critical eigenvector pair a cycle is measured against.
#[derive(Debug, Clone, Serialize)]
pub struct ModalFrame<T: Scalar> {
    pub lambda0: T,
    pub kappa0: T,
    pub phi0: Vec<Complex<T>>,
    pub phi0_star: Vec<Complex<T>>,
}

impl<T: Scalar> From<&SpectralData<T>> for ModalFrame<T> {
    fn from(s: &SpectralData<T>) -> Self {
        Self {
            lambda0: s.lambda0,
            kappa0: s.kappa0,
            phi0: s.phi0.clone(),
            phi0_star: s.phi0_star.clone(),
        }
    }
}

impl<T: Scalar> From<&HopfAnalysis<T>> for ModalFrame<T> {
    fn from(a: &HopfAnalysis<T>) -> Self {
        Self {
            lambda0: a.lambda0,
            kappa0: a.kappa0,
            phi0: a.phi0.clone(),
            phi0_star: a.phi0_star.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDirection {
    Forward,
    Backward,
}

impl TimeDirection {
    fn sign<T: Scalar>(self) -> T {
        match self {
            TimeDirection::Forward => T::one(),
            TimeDirection::Backward => -T::one(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitCycle<T: Scalar> {
    pub lambda: T,
    pub period: T,
    /// One period of states on the uniform phase grid `t_j = jT/M`.
    pub samples: Vec<Vec<T>>,
    pub amplitude_r: T,
    /// `‖x(T) − x(0)‖` of the sampling run.
    pub closure: T,
}

impl<T: Scalar> LimitCycle<T> {
    pub fn scale(&self) -> T {
        self.samples.iter().map(|s| norm(s)).fold(T::one(), T::max)
    }

    pub fn max_abs_component(&self, i: usize) -> T {
        self.samples.iter().map(|s| s[i].abs()).fold(T::zero(), T::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FloquetResult<T: Scalar> {
    pub multipliers: Vec<Complex<T>>,
    /// `μ = −log(ρ)/T` (principal branch); positive real part means decay.
    pub exponents: Vec<Complex<T>>,
    pub trivial_index: usize,
    /// Least stable nontrivial exponent.
    pub leading_exponent: Option<Complex<T>>,
    /// Real nontrivial exponent from a real positive multiplier, if the
    /// least stable multiplier is of that kind.
    pub mu2: Option<T>,
    pub stable: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CycleOptions<T: Scalar> {
    pub max_crossings: usize,
    /// Relative change of successive section returns accepted as settled.
    pub settle_tol: T,
    pub relax_rtol: T,
    pub relax_atol: T,
    pub shoot_rtol: T,
    pub shoot_atol: T,
    pub newton_tol: T,
    pub max_newton: usize,
    pub samples: usize,
}

impl<T: Scalar> Default for CycleOptions<T> {
    fn default() -> Self {
        Self {
            max_crossings: 200,
            settle_tol: lit(1e-3),
            relax_rtol: lit(1e-8),
            relax_atol: lit(1e-11),
            shoot_rtol: lit(1e-12),
            shoot_atol: lit(1e-14),
            newton_tol: lit(1e-10),
            max_newton: 40,
            samples: 256,
        }
    }
}

fn re_vec<T: Scalar>(v: &[Complex<T>]) -> Vec<T> {
    v.iter().map(|c| c.re).collect()
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Locates a periodic orbit near `λ` starting from `amplitude · 2Re(φ₀)`.
pub fn find_limit_cycle<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    frame: &ModalFrame<T>,
    guess_amplitude: T,
    direction: TimeDirection,
    opts: &CycleOptions<T>,
) -> Result<LimitCycle<T>> {
    let n = sys.dim();
    if frame.phi0.len() != n {
        return Err(HopfError::InvalidArgument("eigenvector length mismatch".into()));
    }
    if !(guess_amplitude > T::zero()) {
        return Err(HopfError::InvalidArgument("guess amplitude must be positive".into()));
    }
    let normal = re_vec(&frame.phi0);
    let two = lit::<T>(2.0);
    let seed: Vec<T> = normal.iter().map(|v| two * guess_amplitude * *v).collect();
    let seed_norm = norm(&seed);

    // relaxation
    let ropts = IntegratorOptions {
        blowup_norm: lit::<T>(1e4) * T::one().max(seed_norm),
        ..IntegratorOptions::new(opts.relax_rtol, opts.relax_atol)
    };
    let rhs = system_rhs(sys, lambda);
    let dir = direction.sign::<T>();
    let mut st = Stepper::new(&rhs, linear_part(sys, lambda, &ropts), &seed, T::zero(), dir, ropts)?;
    let nominal = lit::<T>(2.0) * T::PI() / frame.kappa0;
    let t_cap = nominal * T::from_usize(4 * opts.max_crossings + 40).unwrap();
    let mut crossings: Vec<(T, Vec<T>)> = Vec::new();
    let mut settled: Option<(T, Vec<T>)> = None;
    loop {
        let g_prev = dot(&normal, &st.x);
        match st.step(None) {
            Ok(()) => {}
            Err(HopfError::BlowUp(_)) => {
                return Err(HopfError::NoCycleFound("trajectory escaped to infinity".into()))
            }
            Err(e) => return Err(e),
        }
        if (st.t.abs()) > t_cap {
            return Err(HopfError::NoCycleFound("no section recurrence within the time budget".into()));
        }
        let g_now = dot(&normal, &st.x);
        if !(g_prev < T::zero() && g_now >= T::zero()) {
            continue;
        }
        let (tc, xc) = section_point(&st, &normal);
        let xc_norm = norm(&xc);
        if xc_norm < lit::<T>(1e-3) * seed_norm {
            return Err(HopfError::NoCycleFound("trajectory collapsed onto the equilibrium".into()));
        }
        if let Some((tp, xp)) = crossings.last() {
            let change = norm(&xc.iter().zip(xp).map(|(a, b)| *a - *b).collect::<Vec<_>>());
            if change <= opts.settle_tol * xc_norm {
                settled = Some(((tc - *tp).abs(), xc.clone()));
            }
        }
        crossings.push((tc, xc));
        if settled.is_some() {
            break;
        }
        if crossings.len() >= opts.max_crossings {
            return Err(HopfError::NoCycleFound(format!(
                "section returns did not settle within {} crossings",
                opts.max_crossings
            )));
        }
    }
    let (t_guess, x_guess) = settled.unwrap();

    // shooting Newton on (Φ_T(x) − x, n·x) = 0
    let sopts = IntegratorOptions::new(opts.shoot_rtol, opts.shoot_atol);
    let (x, period) = shoot(sys, lambda, &normal, x_guess, t_guess, &sopts, opts)?;
    if norm(&x) < lit::<T>(1e-6) * T::one().max(seed_norm) {
        return Err(HopfError::NoCycleFound("shooting converged to the equilibrium".into()));
    }
    if period < nominal * lit(0.5) || period > nominal * two {
        return Err(HopfError::NoCycleFound(format!(
            "period {period} is far from 2π/κ₀ = {nominal}"
        )));
    }
    let (samples, closure) = sample_cycle(sys, lambda, &x, period, opts.samples, &sopts)?;
    let mut cycle = LimitCycle {
        lambda,
        period,
        samples,
        amplitude_r: T::zero(),
        closure,
    };
    cycle.amplitude_r = fourier_amplitude(&cycle, frame);
    Ok(cycle)
}

/// Locates the section crossing inside the last step by bisection on the
/// Hermite interpolant.
fn section_point<T: Scalar>(st: &Stepper<'_, T>, normal: &[T]) -> (T, Vec<T>) {
    let (mut a, mut b) = (st.t_prev, st.t);
    let mut ga = dot(normal, &st.x_prev);
    for _ in 0..60 {
        let m = (a + b) * lit(0.5);
        let gm = dot(normal, &st.interpolate(m));
        if (gm < T::zero()) == (ga < T::zero()) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    let t = (a + b) * lit(0.5);
    (t, st.interpolate(t))
}

fn shoot<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    normal: &[T],
    mut x: Vec<T>,
    mut period: T,
    iopts: &IntegratorOptions<T>,
    opts: &CycleOptions<T>,
) -> Result<(Vec<T>, T)> {
    let n = x.len();
    let residual = |x: &[T], period: T| -> Result<(Vec<T>, Vec<T>, T)> {
        let (xt, y) = flow_with_sensitivity(sys, x, lambda, period, iopts)?;
        let mut r: Vec<T> = xt.iter().zip(x).map(|(a, b)| *a - *b).collect();
        r.push(dot(normal, x));
        let rn = norm(&r);
        Ok((xt, y, rn))
    };
    let (mut xt, mut y, mut rn) = residual(&x, period)?;
    for _ in 0..opts.max_newton {
        if rn <= opts.newton_tol * T::one().max(norm(&x)) {
            return Ok((x, period));
        }
        let mut fxt = vec![T::zero(); n];
        sys.eval_unchecked(&xt, lambda, &mut fxt);
        let jac = CMatrix::from_fn(n + 1, n + 1, |r, c| {
            let v = match (r < n, c < n) {
                (true, true) => y[r * n + c] - if r == c { T::one() } else { T::zero() },
                (true, false) => fxt[r],
                (false, true) => normal[c],
                (false, false) => T::zero(),
            };
            Complex::new(v, T::zero())
        });
        let mut rhs: Vec<Complex<T>> = xt
            .iter()
            .zip(&x)
            .map(|(a, b)| Complex::new(*b - *a, T::zero()))
            .collect();
        rhs.push(Complex::new(-dot(normal, &x), T::zero()));
        let lu = ComplexLu::new(&jac)
            .map_err(|e| HopfError::ShootingFailure(format!("singular shooting Jacobian: {e}")))?;
        let delta: Vec<T> = lu.solve(&rhs).into_iter().map(|c| c.re).collect();
        let mut step = T::one();
        let mut accepted = false;
        for _ in 0..12 {
            let xn: Vec<T> = (0..n).map(|i| x[i] + step * delta[i]).collect();
            let pn = period + step * delta[n];
            if pn > T::zero() {
                if let Ok((xt2, y2, rn2)) = residual(&xn, pn) {
                    if rn2 < rn || rn2 <= opts.newton_tol * T::one().max(norm(&xn)) {
                        x = xn;
                        period = pn;
                        xt = xt2;
                        y = y2;
                        rn = rn2;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= lit(0.5);
        }
        if !accepted {
            return Err(HopfError::ShootingFailure(format!(
                "Newton stalled with residual {rn}"
            )));
        }
    }
    if rn <= opts.newton_tol * T::one().max(norm(&x)) {
        Ok((x, period))
    } else {
        Err(HopfError::ShootingFailure(format!(
            "no convergence after {} Newton steps (residual {rn})",
            opts.max_newton
        )))
    }
}

/// States at `t_j = jT/M`, `j = 0..M`, landing exactly on each sample time.
fn sample_cycle<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    x0: &[T],
    period: T,
    m: usize,
    iopts: &IntegratorOptions<T>,
) -> Result<(Vec<Vec<T>>, T)> {
    let rhs = system_rhs(sys, lambda);
    let mut st = Stepper::new(&rhs, linear_part(sys, lambda, iopts), x0, T::zero(), T::one(), *iopts)?;
    let mut samples = Vec::with_capacity(m);
    samples.push(x0.to_vec());
    let mf = T::from_usize(m).unwrap();
    for j in 1..=m {
        let tj = if j == m {
            period
        } else {
            period * T::from_usize(j).unwrap() / mf
        };
        while st.t != tj {
            st.step(Some(tj))?;
        }
        if j < m {
            samples.push(st.x.clone());
        }
    }
    let closure = norm(&st.x.iter().zip(x0).map(|(a, b)| *a - *b).collect::<Vec<_>>());
    Ok((samples, closure))
}

/// `r = |<(1/M) Σ_j x_j e^{−2πij/M}, φ₀*>|`.
pub fn fourier_amplitude<T: Scalar>(cycle: &LimitCycle<T>, frame: &ModalFrame<T>) -> T {
    let m = cycle.samples.len();
    if m == 0 {
        return T::zero();
    }
    let n = frame.phi0_star.len();
    let mf = T::from_usize(m).unwrap();
    let mut coef = vec![Complex::new(T::zero(), T::zero()); n];
    for (j, s) in cycle.samples.iter().enumerate() {
        let ang = -lit::<T>(2.0) * T::PI() * T::from_usize(j).unwrap() / mf;
        let w = Complex::new(ang.cos(), ang.sin());
        for i in 0..n {
            coef[i] += w * s[i];
        }
    }
    let coef: Vec<Complex<T>> = coef.into_iter().map(|c| c / mf).collect();
    pairing(&coef, &frame.phi0_star).norm()
}

/// `S_θ x(t) = x(t + θ)` resampled by trigonometric interpolation.
pub fn phase_shift<T: Scalar>(cycle: &LimitCycle<T>, theta: T) -> LimitCycle<T> {
    let m = cycle.samples.len();
    let n = cycle.samples.first().map_or(0, |s| s.len());
    let mf = T::from_usize(m).unwrap();
    let tau = lit::<T>(2.0) * T::PI();
    let shift = theta / cycle.period;
    // spectrum per component
    let mut spec = vec![vec![Complex::new(T::zero(), T::zero()); m]; n];
    for k in 0..m {
        for (j, s) in cycle.samples.iter().enumerate() {
            let ang = -tau * T::from_usize((j * k) % m).unwrap() / mf;
            let w = Complex::new(ang.cos(), ang.sin());
            for i in 0..n {
                spec[i][k] += w * s[i];
            }
        }
    }
    let freq = |k: usize| -> T {
        if 2 * k < m {
            T::from_usize(k).unwrap()
        } else {
            -T::from_usize(m - k).unwrap()
        }
    };
    for (k, _) in (0..m).enumerate() {
        let factor = if m.is_multiple_of(2) && 2 * k == m {
            Complex::new((tau * mf / lit(2.0) * shift).cos(), T::zero())
        } else {
            let ang = tau * freq(k) * shift;
            Complex::new(ang.cos(), ang.sin())
        };
        for row in spec.iter_mut() {
            row[k] *= factor;
        }
    }
    let mut samples = vec![vec![T::zero(); n]; m];
    for (j, out) in samples.iter_mut().enumerate() {
        for k in 0..m {
            let ang = tau * T::from_usize((j * k) % m).unwrap() / mf;
            let w = Complex::new(ang.cos(), ang.sin());
            for i in 0..n {
                out[i] += (spec[i][k] * w).re / mf;
            }
        }
    }
    LimitCycle {
        samples,
        ..cycle.clone()
    }
}

/// Floquet multipliers from the variational equation over one period.
pub fn monodromy<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    cycle: &LimitCycle<T>,
    opts: &IntegratorOptions<T>,
) -> Result<FloquetResult<T>> {
    let n = sys.dim();
    let x0 = cycle
        .samples
        .first()
        .ok_or_else(|| HopfError::InvalidCycle("cycle has no samples".into()))?;
    let (xt, y) = flow_with_sensitivity(sys, x0, lambda, cycle.period, opts)?;
    let closure = norm(&xt.iter().zip(x0).map(|(a, b)| *a - *b).collect::<Vec<_>>());
    if !(closure <= lit::<T>(1e-8) * cycle.scale()) {
        return Err(HopfError::InvalidCycle(format!("closure error {closure}")));
    }
    let mono = RMatrix::from_fn(n, n, |r, c| y[r * n + c]);
    let multipliers: Vec<Complex<T>> = eigenpairs(&mono.to_complex())?
        .into_iter()
        .map(|p| p.value)
        .collect();
    let period = cycle.period;
    let exponents: Vec<Complex<T>> = multipliers.iter().map(|rho| -rho.ln() / period).collect();
    let one = Complex::new(T::one(), T::zero());
    let trivial_index = (0..n)
        .min_by(|&a, &b| {
            (multipliers[a] - one)
                .norm()
                .partial_cmp(&(multipliers[b] - one).norm())
                .unwrap()
        })
        .unwrap();
    let lead = (0..n)
        .filter(|&i| i != trivial_index)
        .min_by(|&a, &b| exponents[a].re.partial_cmp(&exponents[b].re).unwrap());
    let leading_exponent = lead.map(|i| exponents[i]);
    let mu2 = lead.and_then(|i| {
        let rho = multipliers[i];
        let real_positive = rho.re > T::zero() && rho.im.abs() <= lit::<T>(1e-9) * rho.norm();
        real_positive.then(|| -rho.re.ln() / period)
    });
    let stable = (0..n)
        .filter(|&i| i != trivial_index)
        .all(|i| exponents[i].re > T::zero());
    Ok(FloquetResult {
        multipliers,
        exponents,
        trivial_index,
        leading_exponent,
        mu2,
        stable,
    })
}
