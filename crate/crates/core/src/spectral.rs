//! Linear analysis at a candidate bifurcation point: locating the Hopf pair,
//! the adjoint eigenvector, resolvent and bordered solves, and eigenvalue
//! tracking in λ.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{HopfError, Result};
use crate::linalg::{eigenpairs, CMatrix, ComplexLu, EigenPair, RMatrix};
use crate::scalar::{cnorm, lit, pairing, scale_vec, Scalar};
use crate::system::ParameterizedSystem;

/// Hopf pair `±iκ₀`, its right eigenvector and the normalized adjoint
/// eigenvector at `λ₀`, together with the whole spectrum of `A₀ = D_xF(0, λ₀)`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralData<T: Scalar> {
    pub lambda0: T,
    pub kappa0: T,
    /// Eigenvalue of `A₀` selected as the Hopf eigenvalue; its real part is
    /// the residual distance from the imaginary axis.
    pub mu0: Complex<T>,
    pub phi0: Vec<Complex<T>>,
    pub phi0_star: Vec<Complex<T>>,
    pub spectrum: Vec<Complex<T>>,
    #[serde(skip)]
    pub a0: RMatrix<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateKind {
    Crossing,
    Tangency,
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfCandidate<T: Scalar> {
    pub lambda0: T,
    pub kappa0: T,
    pub kind: CandidateKind,
    /// Finite-difference estimate of `Re μ′(λ₀)` along the branch.
    pub re_mu_prime: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenTrack<T: Scalar> {
    pub lambda0: T,
    pub h: T,
    /// `μ(λ₀ − h), μ(λ₀), μ(λ₀ + h)`.
    pub samples: [Complex<T>; 3],
    pub mu_prime: Complex<T>,
    pub mu_second: Complex<T>,
    pub min_overlap: T,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocateOptions<T: Scalar> {
    pub grid_points: usize,
    /// Bisection target for `|Re μ|` at a crossing (relative to the spectral scale).
    pub crossing_tol: T,
    /// `|Re μ|` below which a refined extremum counts as touching the axis.
    pub touch_tol: T,
    /// `|Re μ′|` at or below which a candidate is declared a tangency.
    pub tau_deg: T,
}

impl<T: Scalar> Default for LocateOptions<T> {
    fn default() -> Self {
        Self {
            grid_points: 200,
            crossing_tol: lit(1e-10),
            touch_tol: lit(1e-9),
            tau_deg: lit(1e-6),
        }
    }
}

pub fn spectral_scale<T: Scalar>(a: &RMatrix<T>) -> T {
    T::one().max(a.frobenius_norm())
}

/// Eigenpairs of a real matrix (computed over ℂ).
pub fn eigenpairs_real<T: Scalar>(a: &RMatrix<T>) -> Result<Vec<EigenPair<T>>> {
    eigenpairs(&a.to_complex())
}

fn eigenvalues<T: Scalar>(a: &RMatrix<T>) -> Result<Vec<Complex<T>>> {
    Ok(eigenpairs_real(a)?.into_iter().map(|p| p.value).collect())
}

/// Index of the first component within relative 1e-8 of the largest modulus.
fn pivot_component<T: Scalar>(v: &[Complex<T>]) -> usize {
    let max = v.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    let cut = max * (T::one() - lit(1e-8));
    v.iter().position(|c| c.norm() >= cut).unwrap_or(0)
}

/// Fixes the phase of `phi0` (largest component real-positive) and builds the
/// adjoint eigenvector with `<φ₀, φ₀*> = 1` and `A₀ᴴ φ₀* = −iκ₀ φ₀*`.
pub fn adjoint_pair<T: Scalar>(
    a0: &RMatrix<T>,
    kappa0: T,
    phi0: &[Complex<T>],
) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
    let n = a0.rows();
    if phi0.len() != n {
        return Err(HopfError::InvalidArgument(
            "eigenvector length does not match the matrix".into(),
        ));
    }
    let nrm = cnorm(phi0);
    if nrm == T::zero() {
        return Err(HopfError::InvalidArgument("zero eigenvector".into()));
    }
    let p = pivot_component(phi0);
    let phase = phi0[p] / phi0[p].norm();
    let phi: Vec<Complex<T>> = phi0.iter().map(|v| v / phase).collect();

    let ah = a0.to_complex().conj_transpose();
    let target = Complex::new(T::zero(), -kappa0);
    let pairs = eigenpairs(&ah)?;
    let best = pairs
        .iter()
        .min_by(|x, y| {
            (x.value - target)
                .norm()
                .partial_cmp(&(y.value - target).norm())
                .unwrap()
        })
        .ok_or_else(|| HopfError::DegenerateEigenstructure("empty spectrum".into()))?;
    let raw = &best.vector;
    let overlap = pairing(&phi, raw);
    if overlap.norm() < lit::<T>(1e-8) * cnorm(&phi) * cnorm(raw) {
        return Err(HopfError::DegenerateEigenstructure(format!(
            "left and right eigenvectors are nearly orthogonal (|<φ, ψ>| = {})",
            overlap.norm()
        )));
    }
    let c = Complex::new(T::one(), T::zero()) / overlap.conj();
    let star = scale_vec(raw, c);
    Ok((phi, star))
}

impl<T: Scalar> SpectralData<T> {
    /// Spectral data at `λ₀` for the eigenvalue closest to `i·kappa_hint`.
    pub fn at(sys: &ParameterizedSystem<T>, lambda0: T, kappa_hint: T) -> Result<Self> {
        let a0 = sys.jacobian(lambda0)?;
        Self::from_matrix(a0, lambda0, kappa_hint)
    }

    pub fn from_matrix(a0: RMatrix<T>, lambda0: T, kappa_hint: T) -> Result<Self> {
        let scale = spectral_scale(&a0);
        let pairs = eigenpairs_real(&a0)?;
        let target = Complex::new(T::zero(), kappa_hint.abs());
        let (idx, hopf) = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.value.im > T::zero())
            .min_by(|(_, x), (_, y)| {
                (x.value - target)
                    .norm()
                    .partial_cmp(&(y.value - target).norm())
                    .unwrap()
            })
            .ok_or_else(|| {
                HopfError::InvalidArgument("no complex eigenvalue pair at λ₀".into())
            })?;
        if hopf.value.re.abs() > lit::<T>(1e-7) * scale {
            return Err(HopfError::InvalidArgument(format!(
                "no eigenvalue on the imaginary axis near i·{kappa_hint} at λ₀ = {lambda0} \
                 (closest is {})",
                hopf.value
            )));
        }
        let simple_tol = lit::<T>(1e-8) * scale;
        let dup = pairs
            .iter()
            .enumerate()
            .any(|(j, p)| j != idx && (p.value - hopf.value).norm() <= simple_tol);
        if dup {
            return Err(HopfError::DegenerateEigenstructure(format!(
                "eigenvalue {} is not simple",
                hopf.value
            )));
        }
        let kappa0 = hopf.value.im;
        let (phi0, phi0_star) = adjoint_pair(&a0, kappa0, &hopf.vector)?;
        Ok(Self {
            lambda0,
            kappa0,
            mu0: hopf.value,
            phi0,
            phi0_star,
            spectrum: pairs.iter().map(|p| p.value).collect(),
            a0,
        })
    }

    pub fn dim(&self) -> usize {
        self.phi0.len()
    }

    pub fn scale(&self) -> T {
        spectral_scale(&self.a0)
    }

    /// `φ₀ ← cφ₀`, `φ₀* ← φ₀*/conj(c)`; keeps `<φ₀, φ₀*> = 1`.
    pub fn rescaled(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        out.phi0 = scale_vec(&self.phi0, c);
        out.phi0_star = scale_vec(&self.phi0_star, Complex::new(T::one(), T::zero()) / c.conj());
        out
    }

    pub fn phi0_bar(&self) -> Vec<Complex<T>> {
        self.phi0.iter().map(|v| v.conj()).collect()
    }

    /// `<z, φ₀*>`.
    pub fn project(&self, z: &[Complex<T>]) -> Complex<T> {
        pairing(z, &self.phi0_star)
    }

    /// `(σI − A₀)⁻¹ z` using the stored spectrum for the singularity test.
    pub fn resolvent(&self, sigma: Complex<T>, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        resolvent_with_spectrum(&self.a0, &self.spectrum, sigma, z)
    }

    /// Algebraic simplicity of `iκ₀` within the simplicity tolerance.
    pub fn is_simple(&self) -> bool {
        let tol = lit::<T>(1e-8) * self.scale();
        self.spectrum
            .iter()
            .filter(|m| (**m - self.mu0).norm() <= tol)
            .count()
            == 1
    }

    /// No other eigenvalue of the form `i n κ₀`, `n ∈ ℤ \ {±1}`.
    pub fn nonresonant(&self) -> bool {
        let tol = lit::<T>(1e-8) * self.scale();
        self.spectrum.iter().all(|m| {
            if m.re.abs() > tol {
                return true;
            }
            let ratio = m.im / self.kappa0;
            let n = ratio.round();
            let hits_multiple = (m.im - n * self.kappa0).abs() <= tol;
            !hits_multiple || n.abs() == T::one()
        })
    }

    /// Apart from `±iκ₀`, the spectrum lies in `Re < −tol`.
    pub fn left_half_plane(&self, tol: T) -> bool {
        let pair_tol = lit::<T>(1e-8) * self.scale();
        self.spectrum.iter().all(|m| {
            let is_pair =
                (*m - self.mu0).norm() <= pair_tol || (*m - self.mu0.conj()).norm() <= pair_tol;
            is_pair || m.re < -tol
        })
    }

    /// Largest real part outside the Hopf pair, if any.
    pub fn leading_other_real_part(&self) -> Option<T> {
        let pair_tol = lit::<T>(1e-8) * self.scale();
        self.spectrum
            .iter()
            .filter(|m| {
                (**m - self.mu0).norm() > pair_tol && (**m - self.mu0.conj()).norm() > pair_tol
            })
            .map(|m| m.re)
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))
    }
}

fn resolvent_with_spectrum<T: Scalar>(
    a0: &RMatrix<T>,
    spectrum: &[Complex<T>],
    sigma: Complex<T>,
    z: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    if z.len() != a0.rows() {
        return Err(HopfError::InvalidArgument(
            "right-hand side length does not match the matrix".into(),
        ));
    }
    let tol = lit::<T>(1e-8) * spectral_scale(a0);
    if let Some(m) = spectrum.iter().find(|m| (**m - sigma).norm() < tol) {
        return Err(HopfError::SingularResolvent(format!(
            "σ = {sigma} lies on the eigenvalue {m}"
        )));
    }
    let lu = ComplexLu::new(&a0.to_complex().shifted_negative(sigma))
        .map_err(|e| HopfError::SingularResolvent(e.to_string()))?;
    Ok(lu.solve(z))
}

/// `(σI − A₀)⁻¹ z` by LU with partial pivoting.
pub fn resolvent_solve<T: Scalar>(
    a0: &RMatrix<T>,
    sigma: Complex<T>,
    z: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let spectrum = eigenvalues(a0)?;
    resolvent_with_spectrum(a0, &spectrum, sigma, z)
}

/// Solves `[[iκ₀I − A₀, φ₀], [φ₀*ᴴ, 0]] (x, s) = (z, 0)`; the returned `x`
/// satisfies `(iκ₀I − A₀) x = z − <z, φ₀*> φ₀` and `<x, φ₀*> = 0`.
pub fn bordered_solve<T: Scalar>(spec: &SpectralData<T>, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let n = spec.dim();
    if z.len() != n {
        return Err(HopfError::InvalidArgument(
            "right-hand side length does not match the system".into(),
        ));
    }
    let sigma = Complex::new(T::zero(), spec.kappa0);
    let core = spec.a0.to_complex().shifted_negative(sigma);
    let m = CMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
        (true, true) => core[(i, j)],
        (true, false) => spec.phi0[i],
        (false, true) => spec.phi0_star[j].conj(),
        (false, false) => Complex::new(T::zero(), T::zero()),
    });
    let lu = ComplexLu::new(&m)
        .map_err(|e| HopfError::DegenerateEigenstructure(format!("bordered matrix: {e}")))?;
    if lu.min_pivot_ratio < lit::<T>(1e-13) {
        return Err(HopfError::DegenerateEigenstructure(
            "bordered matrix is numerically singular".into(),
        ));
    }
    let mut rhs = z.to_vec();
    rhs.push(Complex::new(T::zero(), T::zero()));
    let mut sol = lu.solve(&rhs);
    sol.truncate(n);
    Ok(sol)
}

fn overlap<T: Scalar>(v: &[Complex<T>], phi: &[Complex<T>]) -> T {
    pairing(v, phi).norm() / (cnorm(v) * cnorm(phi))
}

fn select_by_overlap<T: Scalar>(
    pairs: &[EigenPair<T>],
    phi0: &[Complex<T>],
    target: Complex<T>,
) -> (Complex<T>, T) {
    let scored: Vec<(Complex<T>, T)> = pairs
        .iter()
        .map(|p| (p.value, overlap(&p.vector, phi0)))
        .collect();
    let best = scored.iter().map(|s| s.1).fold(T::zero(), T::max);
    let tie = lit::<T>(1e-9);
    scored
        .into_iter()
        .filter(|s| s.1 >= best - tie)
        .min_by(|x, y| (x.0 - target).norm().partial_cmp(&(y.0 - target).norm()).unwrap())
        .unwrap()
}

/// Follows the Hopf eigenvalue to `λ₀ ± h` by eigenvector overlap and forms
/// central differences for `μ′(λ₀)` and `μ″(λ₀)`.
pub fn track_eigenvalue<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda0: T,
    kappa0: T,
    phi0: &[Complex<T>],
    h: Option<T>,
) -> Result<EigenTrack<T>> {
    let h = h.unwrap_or_else(|| lit::<T>(1e-4) * T::one().max(lambda0.abs()));
    if !(h > T::zero()) {
        return Err(HopfError::InvalidArgument("tracking step must be positive".into()));
    }
    let target = Complex::new(T::zero(), kappa0);
    let mut samples = [target; 3];
    let mut min_overlap = T::one();
    for (slot, lam) in [lambda0 - h, lambda0, lambda0 + h].into_iter().enumerate() {
        let pairs = eigenpairs_real(&sys.jacobian(lam)?)?;
        let (value, ov) = select_by_overlap(&pairs, phi0, target);
        if ov < lit(0.5) {
            return Err(HopfError::TrackingAmbiguity(format!(
                "best eigenvector overlap {ov} at λ = {lam}"
            )));
        }
        min_overlap = min_overlap.min(ov);
        samples[slot] = value;
    }
    let two = lit::<T>(2.0);
    let mu_prime = (samples[2] - samples[0]) / (two * h);
    let mu_second = (samples[2] - samples[1] * two + samples[0]) / (h * h);
    Ok(EigenTrack {
        lambda0,
        h,
        samples,
        mu_prime,
        mu_second,
        min_overlap,
    })
}

fn upper_eigenvalues<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    im_tol: T,
) -> Result<Vec<Complex<T>>> {
    Ok(eigenvalues(&sys.jacobian(lambda)?)?
        .into_iter()
        .filter(|m| m.im > im_tol)
        .collect())
}

fn nearest<T: Scalar>(set: &[Complex<T>], target: Complex<T>) -> Option<Complex<T>> {
    set.iter()
        .copied()
        .min_by(|x, y| (*x - target).norm().partial_cmp(&(*y - target).norm()).unwrap())
}

struct BranchEval<'a, T: Scalar> {
    sys: &'a ParameterizedSystem<T>,
    im_tol: T,
}

impl<T: Scalar> BranchEval<'_, T> {
    fn at(&self, lambda: T, reference: Complex<T>) -> Result<Complex<T>> {
        let set = upper_eigenvalues(self.sys, lambda, self.im_tol)?;
        nearest(&set, reference).ok_or_else(|| {
            HopfError::NumericalFailure(format!("branch lost its complex pair at λ = {lambda}"))
        })
    }

    fn re_derivative(&self, lambda: T, reference: Complex<T>) -> Result<T> {
        let h = lit::<T>(1e-4) * T::one().max(lambda.abs());
        let p = self.at(lambda + h, reference)?;
        let m = self.at(lambda - h, reference)?;
        Ok((p.re - m.re) / (h + h))
    }
}

/// Scans a parameter window for Hopf candidates: sign changes of `Re μ` on
/// each complex eigenvalue branch (crossings) and interior extrema of `Re μ`
/// touching zero (tangencies).
pub fn locate_hopf<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    window: (T, T),
    opts: &LocateOptions<T>,
) -> Result<Vec<HopfCandidate<T>>> {
    let (lo, hi) = window;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(HopfError::InvalidArgument(format!(
            "empty parameter window ({lo}, {hi})"
        )));
    }
    if opts.grid_points < 3 {
        return Err(HopfError::InvalidArgument("need at least 3 grid points".into()));
    }
    let npts = opts.grid_points;
    let grid: Vec<T> = (0..npts)
        .map(|i| {
            let s = (T::from_usize(i).unwrap() + lit(0.5)) / T::from_usize(npts).unwrap();
            lo + (hi - lo) * s
        })
        .collect();
    let scale = spectral_scale(&sys.jacobian(grid[npts / 2])?);
    let im_tol = lit::<T>(1e-7) * scale;
    let eval = BranchEval { sys, im_tol };

    let sets: Vec<Vec<Complex<T>>> = grid
        .iter()
        .map(|&l| upper_eigenvalues(sys, l, im_tol))
        .collect::<Result<_>>()?;

    // greedy nearest-neighbour continuation of branches across the grid
    let mut branches: Vec<Vec<(usize, Complex<T>)>> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        let mut taken = vec![false; set.len()];
        let mut next_open = Vec::new();
        let mut pairs: Vec<(T, usize, usize)> = Vec::new();
        for (bi, &b) in open.iter().enumerate() {
            let last = branches[b].last().unwrap().1;
            for (k, &m) in set.iter().enumerate() {
                pairs.push(((m - last).norm(), bi, k));
            }
        }
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut used_branch = vec![false; open.len()];
        for (_, bi, k) in pairs {
            if used_branch[bi] || taken[k] {
                continue;
            }
            used_branch[bi] = true;
            taken[k] = true;
            branches[open[bi]].push((i, set[k]));
            next_open.push(open[bi]);
        }
        for (k, &m) in set.iter().enumerate() {
            if !taken[k] {
                branches.push(vec![(i, m)]);
                next_open.push(branches.len() - 1);
            }
        }
        open = next_open;
    }

    let mut found: Vec<HopfCandidate<T>> = Vec::new();
    let cross_tol = opts.crossing_tol * scale;
    let touch_tol = opts.touch_tol * scale;
    for branch in &branches {
        for w in branch.windows(2) {
            let ((i0, m0), (i1, m1)) = (w[0], w[1]);
            if i1 != i0 + 1 {
                continue;
            }
            let crosses = (m0.re < T::zero() && m1.re >= T::zero())
                || (m0.re > T::zero() && m1.re <= T::zero());
            if !crosses {
                continue;
            }
            let (lam, mu) = bisect_crossing(&eval, (grid[i0], m0), (grid[i1], m1), cross_tol)?;
            found.push(HopfCandidate {
                lambda0: lam,
                kappa0: mu.im,
                kind: CandidateKind::Crossing,
                re_mu_prime: eval.re_derivative(lam, mu)?,
            });
        }
        for w in branch.windows(3) {
            let ((ia, a), (ib, b), (ic, c)) = (w[0], w[1], w[2]);
            if ib != ia + 1 || ic != ib + 1 {
                continue;
            }
            let is_max = a.re < b.re && b.re >= c.re && b.re <= T::zero();
            let is_min = a.re > b.re && b.re <= c.re && b.re >= T::zero();
            if !(is_max || is_min) {
                continue;
            }
            let sign = if is_max { T::one() } else { -T::one() };
            let (lam, mu) = golden_extremum(&eval, grid[ia], grid[ic], b, sign)?;
            if mu.re.abs() <= touch_tol {
                found.push(HopfCandidate {
                    lambda0: lam,
                    kappa0: mu.im,
                    kind: CandidateKind::Crossing,
                    re_mu_prime: eval.re_derivative(lam, mu)?,
                });
            }
        }
    }
    for c in &mut found {
        if c.re_mu_prime.abs() <= opts.tau_deg * scale {
            c.kind = CandidateKind::Tangency;
        }
    }
    found.sort_by(|x, y| x.lambda0.partial_cmp(&y.lambda0).unwrap());
    let mut out: Vec<HopfCandidate<T>> = Vec::new();
    let merge = lit::<T>(1e-6) * T::one().max(hi.abs().max(lo.abs()));
    for c in found {
        let dup = out.iter().any(|o| {
            (o.lambda0 - c.lambda0).abs() <= merge
                && (o.kappa0 - c.kappa0).abs() <= lit::<T>(1e-6) * scale
        });
        if !dup {
            out.push(c);
        }
    }
    Ok(out)
}

fn bisect_crossing<T: Scalar>(
    eval: &BranchEval<'_, T>,
    (mut a, mut ma): (T, Complex<T>),
    (mut b, mut mb): (T, Complex<T>),
    tol: T,
) -> Result<(T, Complex<T>)> {
    for _ in 0..200 {
        let m = (a + b) * lit(0.5);
        let w = (m - a) / (b - a);
        let reference = ma + (mb - ma) * w;
        let mm = eval.at(m, reference)?;
        // keep halving past the |Re μ| target so λ₀ is resolved to rounding level
        let narrow = (b - a) <= lit::<T>(4.0) * T::epsilon() * T::one().max(m.abs());
        if mm.re == T::zero() || (narrow && mm.re.abs() <= tol) {
            return Ok((m, mm));
        }
        if narrow {
            break;
        }
        if (mm.re < T::zero()) == (ma.re < T::zero()) {
            a = m;
            ma = mm;
        } else {
            b = m;
            mb = mm;
        }
    }
    Ok(if ma.re.abs() < mb.re.abs() { (a, ma) } else { (b, mb) })
}

fn golden_extremum<T: Scalar>(
    eval: &BranchEval<'_, T>,
    mut a: T,
    mut b: T,
    reference: Complex<T>,
    sign: T,
) -> Result<(T, Complex<T>)> {
    let inv_phi = lit::<T>((5f64.sqrt() - 1.0) / 2.0);
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let mut m1 = eval.at(x1, reference)?;
    let mut m2 = eval.at(x2, reference)?;
    for _ in 0..120 {
        if (b - a) <= lit::<T>(1e-13) * T::one().max(a.abs()) {
            break;
        }
        if sign * m1.re >= sign * m2.re {
            b = x2;
            x2 = x1;
            m2 = m1;
            x1 = b - (b - a) * inv_phi;
            m1 = eval.at(x1, reference)?;
        } else {
            a = x1;
            x1 = x2;
            m1 = m2;
            x2 = a + (b - a) * inv_phi;
            m2 = eval.at(x2, reference)?;
        }
    }
    Ok(if sign * m1.re >= sign * m2.re { (x1, m1) } else { (x2, m2) })
}
