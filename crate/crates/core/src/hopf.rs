//! Bifurcation coefficients `Re μ′(λ₀)`, `H11`, `H22`, the resulting
//! classification and the tangent data of the bifurcating branch.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{HopfError, Result};
use crate::scalar::{conj_vec, lit, Scalar};
use crate::spectral::{bordered_solve, locate_hopf, track_eigenvalue, EigenTrack, LocateOptions, SpectralData};
use crate::system::ParameterizedSystem;

/// Classification thresholds. `tau_trans` and `tau_deg` are relative to the
/// spectral scale `max(1, ‖A₀‖_F)`; `tau_coeff` is absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances<T: Scalar> {
    pub tau_trans: T,
    pub tau_deg: T,
    pub tau_coeff: T,
    /// Margin for "strictly in the left half-plane" in the F7 check.
    pub f7_margin: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            tau_trans: lit(1e-3),
            tau_deg: lit(1e-6),
            tau_coeff: lit(1e-8),
            f7_margin: lit(1e-8),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.tau_trans, self.tau_deg, self.tau_coeff, self.f7_margin]
            .iter()
            .all(|v| v.is_finite() && *v > T::zero());
        if !ok {
            return Err(HopfError::InvalidArgument("tolerances must be positive".into()));
        }
        if self.tau_deg > self.tau_trans {
            return Err(HopfError::InvalidArgument(
                "tau_deg must not exceed tau_trans".into(),
            ));
        }
        Ok(())
    }
}

/// The three complex contributions whose sum, paired with `φ₀*`, gives `H11`.
#[derive(Debug, Clone, Serialize)]
pub struct H11Terms<T: Scalar> {
    /// `−C[φ₀, φ₀, φ̄₀]`
    pub cubic: Vec<Complex<T>>,
    /// `A₀⁻¹ B[φ₀, φ̄₀]`
    pub w_zero: Vec<Complex<T>>,
    /// `(2iκ₀I − A₀)⁻¹ B[φ₀, φ₀]`
    pub w_two: Vec<Complex<T>>,
    /// `2B[φ₀, w_zero]`
    pub zero_mode: Vec<Complex<T>>,
    /// `−B[φ̄₀, w_two]`
    pub second_harmonic: Vec<Complex<T>>,
    /// Projections of the three contributions onto `φ₀*`.
    pub projections: [Complex<T>; 3],
}

impl<T: Scalar> H11Terms<T> {
    pub fn h11(&self) -> T {
        self.projections.iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b).re
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfCoefficients<T: Scalar> {
    pub re_mu_prime: T,
    pub im_mixed: T,
    pub h11: T,
    pub h22_formula: T,
    /// `−Re μ″(λ₀)` from eigenvalue tracking.
    pub h22_track: T,
    pub det_h0: T,
    /// `μ′(λ₀)` from eigenvalue tracking, for the transversality cross-check.
    pub mu_prime_track: Complex<T>,
}

impl<T: Scalar> HopfCoefficients<T> {
    /// `|H22(formula) − H22(track)| ≤ max(1e-6, 1e-3·|H22|)`.
    pub fn h22_consistent(&self) -> bool {
        let tol = lit::<T>(1e-6).max(lit::<T>(1e-3) * self.h22_formula.abs());
        (self.h22_formula - self.h22_track).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tag {
    NondegenerateHopf,
    DegenerateNoBifurcation,
    DegenerateTranscritical,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Subcritical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

/// Linear stability of the trivial branch on either side of `λ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrivialStability {
    pub below: Stability,
    pub above: Stability,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub tag: Tag,
    pub direction: Option<Direction>,
    pub stability_trivial: Option<TrivialStability>,
    pub stability_cycle: Option<Stability>,
    pub f7_holds: bool,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchPrediction<T: Scalar> {
    pub eta: Option<T>,
    pub lambda_dot0: T,
    pub kappa_dot0: T,
    pub lambda_ddot0: Option<T>,
    /// `ẋ(0) = factor · Re(φ₀ e^{iκ₀t})`.
    pub amplitude_factor: T,
    pub kappa0: T,
    pub phi0: Vec<Complex<T>>,
}

impl<T: Scalar> BranchPrediction<T> {
    /// Predicted modal amplitude `r` of the cycle at parameter `λ`, if the
    /// prediction places a cycle there.
    pub fn amplitude_at(&self, lambda0: T, lambda: T) -> Option<T> {
        let d = lambda - lambda0;
        if let Some(eta) = self.eta {
            return Some(d.abs() / eta);
        }
        let ldd = self.lambda_ddot0?;
        if ldd == T::zero() || d * ldd <= T::zero() {
            return None;
        }
        Some((lit::<T>(2.0) * d / ldd).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

/// Full analysis at one candidate point.
#[derive(Debug, Clone, Serialize)]
pub struct HopfAnalysis<T: Scalar> {
    pub label: String,
    pub lambda0: T,
    pub kappa0: T,
    pub spectral_scale: T,
    pub spectrum: Vec<Complex<T>>,
    pub phi0: Vec<Complex<T>>,
    pub phi0_star: Vec<Complex<T>>,
    pub coefficients: HopfCoefficients<T>,
    pub h11_terms: H11Terms<T>,
    pub track: EigenTrack<T>,
    pub classification: Classification,
    pub prediction: Option<BranchPrediction<T>>,
    pub conditions: Vec<ConditionCheck>,
    pub tolerances: Tolerances<T>,
    pub h22_cross_check: bool,
}

/// `μ′(λ₀) = <D²ₓλF(0,λ₀)[φ₀], φ₀*>` as `(re, im)`.
pub fn transversality<T: Scalar>(sys: &ParameterizedSystem<T>, spec: &SpectralData<T>) -> Result<(T, T)> {
    let v = sys.mixed_xlambda(spec.lambda0, &spec.phi0)?;
    let p = spec.project(&v);
    Ok((p.re, p.im))
}

pub fn h11_terms<T: Scalar>(sys: &ParameterizedSystem<T>, spec: &SpectralData<T>) -> Result<H11Terms<T>> {
    let l0 = spec.lambda0;
    let phi = &spec.phi0;
    let phib = conj_vec(phi);
    let zero = Complex::new(T::zero(), T::zero());

    let cubic: Vec<Complex<T>> = sys.trilinear(l0, phi, phi, &phib)?.into_iter().map(|v| -v).collect();

    // resolvent(σ, z) = (σI − A₀)⁻¹ z, hence A₀⁻¹ z = −resolvent(0, z)
    let b_mixed = sys.bilinear(l0, phi, &phib)?;
    let w_zero: Vec<Complex<T>> = spec.resolvent(zero, &b_mixed)?.into_iter().map(|v| -v).collect();
    let b_same = sys.bilinear(l0, phi, phi)?;
    let w_two = spec.resolvent(Complex::new(T::zero(), lit::<T>(2.0) * spec.kappa0), &b_same)?;

    let two = Complex::new(lit::<T>(2.0), T::zero());
    let zero_mode: Vec<Complex<T>> = sys.bilinear(l0, phi, &w_zero)?.into_iter().map(|v| v * two).collect();
    let second_harmonic: Vec<Complex<T>> = sys.bilinear(l0, &phib, &w_two)?.into_iter().map(|v| -v).collect();
    let projections = [
        spec.project(&cubic),
        spec.project(&zero_mode),
        spec.project(&second_harmonic),
    ];
    Ok(H11Terms {
        cubic,
        w_zero,
        w_two,
        zero_mode,
        second_harmonic,
        projections,
    })
}

pub fn compute_h11<T: Scalar>(sys: &ParameterizedSystem<T>, spec: &SpectralData<T>) -> Result<T> {
    Ok(h11_terms(sys, spec)?.h11())
}

pub fn compute_h22<T: Scalar>(sys: &ParameterizedSystem<T>, spec: &SpectralData<T>) -> Result<T> {
    let l0 = spec.lambda0;
    let d2 = sys.mixed_xlambda2(l0, &spec.phi0)?;
    let d1 = sys.mixed_xlambda(l0, &spec.phi0)?;
    let x = bordered_solve(spec, &d1)?;
    let dx = sys.mixed_xlambda(l0, &x)?;
    let two = lit::<T>(2.0);
    let z: Vec<Complex<T>> = d2.iter().zip(&dx).map(|(a, b)| -*a - *b * two).collect();
    Ok(spec.project(&z).re)
}

/// Coefficients at the point described by `spec`, including the tracked
/// eigenvalue derivatives used for cross-checking.
pub fn coefficients<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    spec: &SpectralData<T>,
) -> Result<(HopfCoefficients<T>, H11Terms<T>, EigenTrack<T>)> {
    let (re, im) = transversality(sys, spec)?;
    let terms = h11_terms(sys, spec)?;
    let h11 = terms.h11();
    let h22 = compute_h22(sys, spec)?;
    let track = track_eigenvalue(sys, spec.lambda0, spec.kappa0, &spec.phi0, None)?;
    let coeffs = HopfCoefficients {
        re_mu_prime: re,
        im_mixed: im,
        h11,
        h22_formula: h22,
        h22_track: -track.mu_second.re,
        det_h0: h11 * h22,
        mu_prime_track: track.mu_prime,
    };
    Ok((coeffs, terms, track))
}

fn f7_holds<T: Scalar>(spec: &SpectralData<T>, tol: &Tolerances<T>) -> bool {
    spec.left_half_plane(tol.f7_margin * spec.scale())
}

pub fn classify<T: Scalar>(
    coeffs: &HopfCoefficients<T>,
    spec: &SpectralData<T>,
    tol: &Tolerances<T>,
) -> Classification {
    let scale = spec.scale();
    let f7 = f7_holds(spec, tol);
    let rmp = coeffs.re_mu_prime;
    let sign_stab = |v: T| if v < T::zero() { Stability::Stable } else { Stability::Unstable };
    if rmp.abs() > tol.tau_trans * scale {
        // Re μ(λ) ≈ Re μ′·(λ − λ₀) near λ₀
        let stability_trivial = Some(if f7 {
            TrivialStability {
                below: sign_stab(-rmp),
                above: sign_stab(rmp),
            }
        } else {
            TrivialStability {
                below: Stability::Unstable,
                above: Stability::Unstable,
            }
        });
        let (direction, stability_cycle, note) = if coeffs.h11.abs() <= tol.tau_coeff {
            (None, None, "H11 vanishes within tau_coeff: direction undetermined".to_string())
        } else {
            let lambda_ddot = coeffs.h11 / rmp;
            let dir = if lambda_ddot > T::zero() {
                Direction::Supercritical
            } else {
                Direction::Subcritical
            };
            // μ₂(r) ≈ H11·r², positive exponents mean stability
            let cyc = if coeffs.h11 > T::zero() {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            (Some(dir), Some(cyc), String::new())
        };
        return Classification {
            tag: Tag::NondegenerateHopf,
            direction,
            stability_trivial,
            stability_cycle,
            f7_holds: f7,
            note,
        };
    }
    if rmp.abs() <= tol.tau_deg * scale && coeffs.det_h0.abs() > tol.tau_coeff {
        // Re μ(λ) ≈ −H22·(λ − λ₀)²/2 on both sides
        let side = if f7 { sign_stab(-coeffs.h22_formula) } else { Stability::Unstable };
        let stability_trivial = Some(TrivialStability {
            below: side,
            above: side,
        });
        if coeffs.det_h0 > T::zero() {
            return Classification {
                tag: Tag::DegenerateNoBifurcation,
                direction: None,
                stability_trivial,
                stability_cycle: None,
                f7_holds: f7,
                note: "H0 definite: only the trivial branch near λ0".into(),
            };
        }
        let cyc = if coeffs.h22_formula > T::zero() {
            Stability::Unstable
        } else {
            Stability::Stable
        };
        return Classification {
            tag: Tag::DegenerateTranscritical,
            direction: None,
            stability_trivial,
            stability_cycle: Some(cyc),
            f7_holds: f7,
            note: "H0 indefinite: cycles on both sides of λ0".into(),
        };
    }
    let note = if rmp.abs() <= tol.tau_deg * scale {
        "Re μ′ vanishes but det H0 is within tau_coeff of zero"
    } else {
        "Re μ′ lies between tau_deg and tau_trans"
    };
    Classification {
        tag: Tag::Indeterminate,
        direction: None,
        stability_trivial: None,
        stability_cycle: None,
        f7_holds: f7,
        note: note.into(),
    }
}

pub fn branch_tangent<T: Scalar>(
    coeffs: &HopfCoefficients<T>,
    spec: &SpectralData<T>,
    class: &Classification,
) -> Result<BranchPrediction<T>> {
    match class.tag {
        Tag::DegenerateTranscritical => {
            let eta = (-coeffs.h11 / coeffs.h22_formula).sqrt();
            Ok(BranchPrediction {
                eta: Some(eta),
                lambda_dot0: eta,
                kappa_dot0: coeffs.im_mixed * eta,
                lambda_ddot0: None,
                amplitude_factor: lit(2.0),
                kappa0: spec.kappa0,
                phi0: spec.phi0.clone(),
            })
        }
        Tag::NondegenerateHopf => Ok(BranchPrediction {
            eta: None,
            lambda_dot0: T::zero(),
            kappa_dot0: T::zero(),
            lambda_ddot0: Some(coeffs.h11 / coeffs.re_mu_prime),
            amplitude_factor: T::one(),
            kappa0: spec.kappa0,
            phi0: spec.phi0.clone(),
        }),
        Tag::DegenerateNoBifurcation => Err(HopfError::InvalidState(
            "no bifurcating branch when H0 is definite".into(),
        )),
        Tag::Indeterminate => Err(HopfError::InvalidState(
            "classification is indeterminate".into(),
        )),
    }
}

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

pub fn condition_checklist<T: Scalar>(
    coeffs: &HopfCoefficients<T>,
    spec: &SpectralData<T>,
    tol: &Tolerances<T>,
) -> Vec<ConditionCheck> {
    let scale = spec.scale();
    let rmp = coeffs.re_mu_prime.abs();
    let f4 = if rmp > tol.tau_trans * scale {
        (CheckStatus::Pass, format!("|Re μ′| = {rmp:e}"))
    } else if rmp <= tol.tau_deg * scale {
        (CheckStatus::Fail, format!("|Re μ′| = {rmp:e}: degenerate crossing"))
    } else {
        (CheckStatus::Fail, format!("|Re μ′| = {rmp:e}: inside the indeterminate band"))
    };
    let f7 = f7_holds(spec, tol);
    let lead = spec
        .leading_other_real_part()
        .map(|v| format!("leading Re of the remaining spectrum = {v:e}"))
        .unwrap_or_else(|| "no other eigenvalues".into());
    vec![
        ConditionCheck {
            name: "F1",
            status: CheckStatus::NotApplicable,
            detail: "smoothness is assumed; all derivative tensors evaluated finite".into(),
        },
        ConditionCheck {
            name: "F2",
            status: CheckStatus::Pass,
            detail: "trivial branch verified on the parameter window at construction".into(),
        },
        ConditionCheck {
            name: "F3",
            status: status(spec.is_simple()),
            detail: format!("iκ₀ = {}i", spec.kappa0),
        },
        ConditionCheck {
            name: "F4",
            status: f4.0,
            detail: f4.1,
        },
        ConditionCheck {
            name: "F5",
            status: status(spec.nonresonant()),
            detail: "no eigenvalue i·n·κ₀ with n ≠ ±1".into(),
        },
        ConditionCheck {
            name: "F6",
            status: CheckStatus::NotApplicable,
            detail: "holds trivially in finite dimensions".into(),
        },
        ConditionCheck {
            name: "F7",
            status: status(f7),
            detail: lead,
        },
    ]
}

/// Runs the whole pipeline at `(λ₀, κ₀)` with the default eigenvector phase.
pub fn analyze_point<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda0: T,
    kappa_hint: T,
    tol: &Tolerances<T>,
) -> Result<HopfAnalysis<T>> {
    let spec = SpectralData::at(sys, lambda0, kappa_hint)?;
    analyze_spectral(sys, &spec, tol)
}

/// Runs the pipeline for given spectral data (e.g. with a custom eigenvector
/// normalization).
pub fn analyze_spectral<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    spec: &SpectralData<T>,
    tol: &Tolerances<T>,
) -> Result<HopfAnalysis<T>> {
    tol.validate()?;
    let (coeffs, terms, track) = coefficients(sys, spec)?;
    let classification = classify(&coeffs, spec, tol);
    let prediction = branch_tangent(&coeffs, spec, &classification).ok();
    let conditions = condition_checklist(&coeffs, spec, tol);
    Ok(HopfAnalysis {
        label: sys.label().to_string(),
        lambda0: spec.lambda0,
        kappa0: spec.kappa0,
        spectral_scale: spec.scale(),
        spectrum: spec.spectrum.clone(),
        phi0: spec.phi0.clone(),
        phi0_star: spec.phi0_star.clone(),
        h22_cross_check: coeffs.h22_consistent(),
        coefficients: coeffs,
        h11_terms: terms,
        track,
        classification,
        prediction,
        conditions,
        tolerances: *tol,
    })
}

/// Locates every candidate in `window` and analyzes each.
pub fn analyze_window<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    window: (T, T),
    locate: &LocateOptions<T>,
    tol: &Tolerances<T>,
) -> Result<Vec<HopfAnalysis<T>>> {
    let candidates = locate_hopf(sys, window, locate)?;
    candidates
        .iter()
        .map(|c| analyze_point(sys, c.lambda0, c.kappa0, tol))
        .collect()
}
