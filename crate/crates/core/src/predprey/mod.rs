//! Diffusive Holling type-II predator–prey model on `(0, ℓπ)` with Neumann
//! boundary conditions, translated so that the coexistence state `(λ, v_λ)`
//! sits at the origin:
//!
//! ```text
//! u_t = d₁u_xx + f(u, v),   f = p(1 − p/k) − m p q /(1 + p)
//! v_t = d₂v_xx + g(u, v),   g = −θ q + m p q /(1 + p)
//! ```
//!
//! with `p = u + λ`, `q = v + v_λ`, `m = θ(1 + λ)/λ`.

mod galerkin;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{HopfError, Result};
use crate::hopf::{analyze_spectral, HopfAnalysis, Tag, Tolerances};
use crate::scalar::{lit, Scalar};
use crate::spectral::SpectralData;

pub use galerkin::{galerkin_system, mode_weight, PredPreyGalerkin};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredPreyParams<T: Scalar> {
    pub d1: T,
    pub d2: T,
    pub k: T,
    pub theta: T,
    /// Domain is `(0, ℓπ)`; defaults to the first critical length `ℓ₁`.
    pub ell: T,
}

impl<T: Scalar> PredPreyParams<T> {
    pub fn new(d1: T, d2: T, k: T, theta: T) -> Result<Self> {
        let pos = |v: T| v.is_finite() && v > T::zero();
        if !(pos(d1) && pos(d2) && pos(theta)) {
            return Err(HopfError::InvalidArgument(
                "d1, d2 and theta must be positive".into(),
            ));
        }
        if !(k.is_finite() && k > T::one()) {
            return Err(HopfError::InvalidArgument("k must exceed 1".into()));
        }
        let mut p = Self {
            d1,
            d2,
            k,
            theta,
            ell: T::one(),
        };
        p.ell = p.critical_length(1);
        Ok(p)
    }

    pub fn with_length(mut self, ell: T) -> Self {
        self.ell = ell;
        self
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.d1, self.d2, self.k, self.theta)?;
        if !(self.ell.is_finite() && self.ell > T::zero()) {
            return Err(HopfError::InvalidArgument("ell must be positive".into()));
        }
        Ok(())
    }

    /// Predation rate `m = θ(1 + λ)/λ`.
    pub fn m(&self, lambda: T) -> T {
        self.theta * (T::one() + lambda) / lambda
    }

    /// The coexistence equilibrium `(λ, v_λ)`.
    pub fn equilibrium(&self, lambda: T) -> Result<(T, T)> {
        if !(lambda > T::zero() && lambda < self.k) {
            return Err(HopfError::InvalidArgument(format!(
                "λ = {lambda} outside (0, k) has no coexistence state"
            )));
        }
        Ok((lambda, self.v_lambda(lambda)))
    }

    pub(crate) fn v_lambda(&self, lambda: T) -> T {
        lambda * (self.k - lambda) / (self.k * self.theta)
    }

    /// `A(λ) = λ(k − 1 − 2λ)/(k(1 + λ))`.
    pub fn a(&self, l: T) -> T {
        let k = self.k;
        l * (k - T::one() - lit::<T>(2.0) * l) / (k * (T::one() + l))
    }

    pub fn a_prime(&self, l: T) -> T {
        let k = self.k;
        let s = T::one() + l;
        (k - T::one() - lit::<T>(4.0) * l - lit::<T>(2.0) * l * l) / (k * s * s)
    }

    pub fn a_second(&self, l: T) -> T {
        let k = self.k;
        let s = T::one() + l;
        -lit::<T>(2.0) * (k + T::one()) / (k * s * s * s)
    }

    /// `c(λ) = g_u` at the equilibrium, `(k − λ)/(k(1 + λ))`.
    pub fn c(&self, l: T) -> T {
        (self.k - l) / (self.k * (T::one() + l))
    }

    pub fn c_prime(&self, l: T) -> T {
        let s = T::one() + l;
        -(self.k + T::one()) / (self.k * s * s)
    }

    pub fn c_second(&self, l: T) -> T {
        let s = T::one() + l;
        lit::<T>(2.0) * (self.k + T::one()) / (self.k * s * s * s)
    }

    fn wavenumber2(&self, n: usize) -> T {
        let nn = T::from_usize(n * n).unwrap();
        nn / (self.ell * self.ell)
    }

    pub fn spectrum_curves(&self) -> PredPreySpectrum<T> {
        PredPreySpectrum {
            params: *self,
            lambda_star: self.lambda_star(),
            m_star: self.m_star(),
            lambda0_h: self.lambda0_h(),
        }
    }

    /// `λ* = √((1 + k)/2) − 1`, where `A′(λ*) = 0`.
    pub fn lambda_star(&self) -> T {
        ((T::one() + self.k) / lit(2.0)).sqrt() - T::one()
    }

    /// `M* = A(λ*) = (√(k+1) − √2)²/k`.
    pub fn m_star(&self) -> T {
        let s = (self.k + T::one()).sqrt() - lit::<T>(2.0).sqrt();
        s * s / self.k
    }

    /// Homogeneous Hopf point `λ₀ᴴ = (k − 1)/2`.
    pub fn lambda0_h(&self) -> T {
        (self.k - T::one()) / lit(2.0)
    }

    /// `ℓₙ = n √((d₁ + d₂)/M*)`.
    pub fn critical_length(&self, n: usize) -> T {
        T::from_usize(n).unwrap() * ((self.d1 + self.d2) / self.m_star()).sqrt()
    }

    /// Roots of `α_j(λ) = 0` in `(0, λ₀ᴴ)` for every mode `j ≥ 1` with
    /// `ℓ_j < ℓ` (i.e. `j ≤ n` when `ℓ ∈ (ℓₙ, ℓₙ₊₁]`), plus `λ₀ᴴ`; ascending.
    pub fn hopf_points(&self, ell: T) -> Result<Vec<T>> {
        if !(ell.is_finite() && ell > T::zero()) {
            return Err(HopfError::InvalidArgument("ell must be positive".into()));
        }
        let k = self.k;
        let lh = self.lambda0_h();
        let mut out = Vec::new();
        let mut j = 1usize;
        loop {
            let lj = self.critical_length(j);
            if lj > ell * (T::one() + lit(1e-14)) {
                break;
            }
            let c = (self.d1 + self.d2) * T::from_usize(j * j).unwrap() / (ell * ell);
            let b = c * k - (k - T::one());
            let disc = b * b - lit::<T>(8.0) * c * k;
            let disc_tol = lit::<T>(1e-12) * b * b;
            let roots: Vec<T> = if disc.abs() <= disc_tol {
                vec![-b / lit(4.0)]
            } else if disc > T::zero() {
                // stable quadratic formula
                let q = -(b + b.signum() * disc.sqrt()) / lit(2.0);
                vec![q / lit(2.0), c * k / q]
            } else {
                vec![]
            };
            for r in roots {
                if r > T::zero() && r < lh {
                    out.push(r);
                }
            }
            j += 1;
        }
        out.push(lh);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() <= lit::<T>(1e-12) * T::one().max(a.abs()));
        Ok(out)
    }

    /// The two diffusion-ratio hypotheses `(olddd, newdd)`, evaluated as
    /// `d₁/d₂ > (√(k+1) − √2)⁴/(4θk)` and
    /// `d₁/d₂ > (√(k+1) − √2)⁴/(4θk(√(2(k+1)) − 1))`.
    pub fn condition_checks(&self) -> (bool, bool) {
        let k = self.k;
        let s = (k + T::one()).sqrt() - lit::<T>(2.0).sqrt();
        let s4 = s * s * s * s;
        let base = lit::<T>(4.0) * self.theta * k;
        let ratio = self.d1 / self.d2;
        let old = ratio > s4 / base;
        let new = ratio > s4 / (base * ((lit::<T>(2.0) * (k + T::one())).sqrt() - T::one()));
        (old, new)
    }
}

/// Closed-form eigenvalue curves `μ = αₙ(λ) ± iωₙ(λ)` of the mode-`n` blocks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PredPreySpectrum<T: Scalar> {
    pub params: PredPreyParams<T>,
    pub lambda_star: T,
    pub m_star: T,
    pub lambda0_h: T,
}

impl<T: Scalar> PredPreySpectrum<T> {
    pub fn a(&self, l: T) -> T {
        self.params.a(l)
    }

    /// Trace `Tₙ(λ) = A(λ) − (d₁ + d₂)n²/ℓ²`.
    pub fn t_n(&self, l: T, n: usize) -> T {
        let p = &self.params;
        p.a(l) - (p.d1 + p.d2) * p.wavenumber2(n)
    }

    /// Determinant `Dₙ(λ) = θ(k − λ)/(k(1 + λ)) − A(λ)d₂n²/ℓ² + d₁d₂n⁴/ℓ⁴`.
    pub fn d_n(&self, l: T, n: usize) -> T {
        let p = &self.params;
        let w = p.wavenumber2(n);
        p.theta * p.c(l) - p.a(l) * p.d2 * w + p.d1 * p.d2 * w * w
    }

    pub fn alpha_n(&self, l: T, n: usize) -> T {
        self.t_n(l, n) / lit(2.0)
    }

    /// `α′ₙ(λ) = A′(λ)/2` (independent of `n`).
    pub fn alpha_prime(&self, l: T) -> T {
        self.params.a_prime(l) / lit(2.0)
    }

    /// `ωₙ(λ) = √(Dₙ − αₙ²)`, `None` when the roots are real.
    pub fn omega_n(&self, l: T, n: usize) -> Option<T> {
        let a = self.alpha_n(l, n);
        let disc = self.d_n(l, n) - a * a;
        (disc > T::zero()).then(|| disc.sqrt())
    }

    /// Both roots of `β² − Tₙβ + Dₙ = 0`.
    pub fn roots(&self, l: T, n: usize) -> [Complex<T>; 2] {
        let a = self.alpha_n(l, n);
        let disc = self.d_n(l, n) - a * a;
        if disc >= T::zero() {
            let w = disc.sqrt();
            [Complex::new(a, w), Complex::new(a, -w)]
        } else {
            let w = (-disc).sqrt();
            [Complex::new(a + w, T::zero()), Complex::new(a - w, T::zero())]
        }
    }
}

/// Everything the predator–prey report needs at `λ*` for mode `n`.
#[derive(Debug, Clone, Serialize)]
pub struct PredPreyReport<T: Scalar> {
    pub params: PredPreyParams<T>,
    pub mode: usize,
    pub lambda_star: T,
    pub m_star: T,
    pub lambda0_h: T,
    pub critical_lengths: Vec<T>,
    pub olddd: bool,
    pub newdd: bool,
    pub hopf_points_ell: T,
    pub hopf_points: Vec<T>,
    pub omega0: T,
    pub h11: T,
    pub h22: T,
    pub h22_closed_form: T,
    pub eta_closed_form: Option<T>,
    /// `ω̇(0) = −(θ/(kω₀))η` with the closed-form `η`.
    pub omega_dot_closed_form: Option<T>,
    pub analysis: HopfAnalysis<T>,
}

/// Generic analysis at `(λ*, ℓₙ)` on the Galerkin truncation with `2n`
/// modes, with the eigenvector scaled so its `u`-coefficient on
/// `cos(nx/ℓₙ)` equals one (and `φ₀*` following from `<φ₀, φ₀*> = 1` in
/// the `L²(0, ℓₙπ)` pairing).
pub fn analyze_at_lambda_star<T: Scalar>(
    params: &PredPreyParams<T>,
    n: usize,
    tol: &Tolerances<T>,
) -> Result<HopfAnalysis<T>> {
    analyze_at_lambda_star_with_modes(params, n, 2 * n, tol)
}

pub fn analyze_at_lambda_star_with_modes<T: Scalar>(
    params: &PredPreyParams<T>,
    n: usize,
    modes: usize,
    tol: &Tolerances<T>,
) -> Result<HopfAnalysis<T>> {
    if n == 0 {
        return Err(HopfError::InvalidArgument("mode index must be at least 1".into()));
    }
    if modes < n {
        return Err(HopfError::InvalidArgument(
            "the truncation must contain the critical mode".into(),
        ));
    }
    let p = params.with_length(params.critical_length(n));
    p.validate()?;
    let curves = p.spectrum_curves();
    let ls = curves.lambda_star;
    for j in 0..=modes {
        if j != n && curves.d_n(ls, j) <= T::zero() {
            return Err(HopfError::SingularResolvent(format!(
                "mode {j} has a zero or negative determinant at λ*"
            )));
        }
    }
    let omega0 = curves.omega_n(ls, n).ok_or_else(|| {
        HopfError::InvalidArgument("the critical mode has real eigenvalues at λ*".into())
    })?;
    let sys = galerkin_system(&p, modes)?;
    let spec = SpectralData::at(&sys, ls, omega0)?;
    let sw = mode_weight(p.ell, n).sqrt();
    let c = Complex::new(sw, T::zero()) / spec.phi0[n];
    let spec = spec.rescaled(c);
    analyze_spectral(&sys, &spec, tol)
}

/// `H11` at `(λ*, ℓₙ)` in the normalization described above.
pub fn h11_star<T: Scalar>(params: &PredPreyParams<T>, n: usize) -> Result<T> {
    Ok(analyze_at_lambda_star(params, n, &Tolerances::default())?.coefficients.h11)
}

/// `H22 = −α″(λ*) = 2√2/(k√(k+1))`.
pub fn h22_closed_form<T: Scalar>(params: &PredPreyParams<T>) -> T {
    let k = params.k;
    lit::<T>(2.0) * lit::<T>(2.0).sqrt() / (k * (k + T::one()).sqrt())
}

/// `η = 2^{−3/4} k^{1/2} (k+1)^{1/4} (−H11)^{1/2}`, defined for `H11 < 0`.
pub fn eta_closed_form<T: Scalar>(params: &PredPreyParams<T>, h11: T) -> Option<T> {
    if h11 >= T::zero() {
        return None;
    }
    let k = params.k;
    Some(lit::<T>(2.0).powf(lit(-0.75)) * k.sqrt() * (k + T::one()).powf(lit(0.25)) * (-h11).sqrt())
}

/// Builds the full report; `ell` selects the domain for the Hopf-point list
/// (default `ℓₙ`), while the coefficients are always computed at `ℓₙ`.
pub fn report<T: Scalar>(
    params: &PredPreyParams<T>,
    n: usize,
    ell: Option<T>,
    tol: &Tolerances<T>,
) -> Result<PredPreyReport<T>> {
    let analysis = analyze_at_lambda_star(params, n, tol)?;
    let p = params.with_length(params.critical_length(n));
    let curves = p.spectrum_curves();
    let ls = curves.lambda_star;
    let omega0 = analysis.kappa0;
    let h11 = analysis.coefficients.h11;
    let (olddd, newdd) = p.condition_checks();
    let hp_ell = ell.unwrap_or(p.ell);
    let eta = eta_closed_form(&p, h11);
    let omega_dot = match analysis.classification.tag {
        Tag::DegenerateTranscritical => eta.map(|e| -(p.theta / (p.k * omega0)) * e),
        _ => None,
    };
    Ok(PredPreyReport {
        params: p,
        mode: n,
        lambda_star: ls,
        m_star: curves.m_star,
        lambda0_h: curves.lambda0_h,
        critical_lengths: (1..=4).map(|j| p.critical_length(j)).collect(),
        olddd,
        newdd,
        hopf_points_ell: hp_ell,
        hopf_points: p.hopf_points(hp_ell)?,
        omega0,
        h11,
        h22: analysis.coefficients.h22_formula,
        h22_closed_form: h22_closed_form(&p),
        eta_closed_form: eta,
        omega_dot_closed_form: omega_dot,
        analysis,
    })
}
