//! Parameterized vector fields `dx/dt = F(x, λ)` with a trivial branch at the
//! origin, plus the Fréchet derivative tensors the coefficient formulas need.

mod constructed;
mod fd;
mod polynomial;
mod registry;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{HopfError, Result};
use crate::linalg::RMatrix;
use crate::scalar::{lit, norm, Scalar};

pub use constructed::ForcedTangency;
pub use polynomial::{Monomial, PolynomialField};
pub use registry::{builtin, builtin_labels, example21, Example21Case};

/// A smooth parameterized vector field. Only `dim` and `eval` are mandatory;
/// every derivative hook defaults to `None`, in which case
/// [`ParameterizedSystem`] falls back to finite differences.
///
/// All derivative hooks are evaluated at the origin `x = 0` except
/// [`VectorField::jacobian_at`].
pub trait VectorField<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[T], lambda: T, out: &mut [T]);

    fn jacobian(&self, _lambda: T) -> Option<RMatrix<T>> {
        None
    }

    fn jacobian_at(&self, _x: &[T], _lambda: T) -> Option<RMatrix<T>> {
        None
    }

    fn bilinear(&self, _lambda: T, _a: &[Complex<T>], _b: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        None
    }

    fn trilinear(
        &self,
        _lambda: T,
        _a: &[Complex<T>],
        _b: &[Complex<T>],
        _c: &[Complex<T>],
    ) -> Option<Vec<Complex<T>>> {
        None
    }

    fn mixed_xlambda(&self, _lambda: T, _a: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        None
    }

    fn mixed_xlambda2(&self, _lambda: T, _a: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        None
    }

    /// Diagonal stiff linear part `L` (so that `F(x) = L x + N(x)`), used by
    /// the integrating-factor integrator.
    fn linear_diagonal(&self, _lambda: T) -> Option<Vec<T>> {
        None
    }
}

/// Which derivative tensor a [`DerivativeRequest`] asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    Jacobian,
    Bilinear,
    Trilinear,
    MixedXLambda,
    MixedXLambda2,
}

impl DerivativeOrder {
    pub fn arity(self) -> usize {
        match self {
            DerivativeOrder::Jacobian
            | DerivativeOrder::MixedXLambda
            | DerivativeOrder::MixedXLambda2 => 1,
            DerivativeOrder::Bilinear => 2,
            DerivativeOrder::Trilinear => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DerivativeRequest<T: Scalar> {
    pub order: DerivativeOrder,
    pub directions: Vec<Vec<Complex<T>>>,
    pub lambda: T,
}

/// A registered system: a vector field plus a label and the parameter window
/// over which the trivial branch was verified.
#[derive(Clone)]
pub struct ParameterizedSystem<T: Scalar> {
    label: String,
    field: Arc<dyn VectorField<T>>,
    window: (T, T),
    use_analytic: bool,
}

impl<T: Scalar> fmt::Debug for ParameterizedSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParameterizedSystem")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("window", &self.window)
            .field("use_analytic", &self.use_analytic)
            .finish()
    }
}

const REGISTRATION_GRID: usize = 21;

impl<T: Scalar> ParameterizedSystem<T> {
    /// Registers a field, checking `F(0, λ) = 0` on a grid over `window`.
    pub fn new(
        label: impl Into<String>,
        field: Arc<dyn VectorField<T>>,
        window: (T, T),
    ) -> Result<Self> {
        let label = label.into();
        let n = field.dim();
        if n < 2 {
            return Err(HopfError::InvalidArgument(format!(
                "system '{label}' has dimension {n}; a Hopf pair needs at least 2"
            )));
        }
        if !(window.0 < window.1) {
            return Err(HopfError::InvalidArgument(
                "parameter window must satisfy lo < hi".into(),
            ));
        }
        let zero = vec![T::zero(); n];
        let mut out = vec![T::zero(); n];
        let tol = lit::<T>(1e-10);
        for i in 0..REGISTRATION_GRID {
            // cell centres keep open windows (e.g. λ ∈ (0, k)) well defined
            let s = (T::from_usize(i).unwrap() + lit(0.5)) / T::from_usize(REGISTRATION_GRID).unwrap();
            let lambda = window.0 + (window.1 - window.0) * s;
            field.eval(&zero, lambda, &mut out);
            let viol = norm(&out);
            if !(viol < tol * T::one().max(lambda.abs())) {
                return Err(HopfError::InvalidArgument(format!(
                    "system '{label}' violates F(0, λ) = 0 at λ = {lambda}: |F| = {viol}"
                )));
            }
        }
        Ok(Self {
            label,
            field,
            window,
            use_analytic: true,
        })
    }

    /// The same system with every analytic derivative hook ignored.
    pub fn finite_difference_only(&self) -> Self {
        Self {
            use_analytic: false,
            ..self.clone()
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn window(&self) -> (T, T) {
        self.window
    }

    pub fn field(&self) -> &Arc<dyn VectorField<T>> {
        &self.field
    }

    pub fn uses_analytic(&self) -> bool {
        self.use_analytic
    }

    fn check_len(&self, v: usize, what: &str) -> Result<()> {
        if v != self.dim() {
            return Err(HopfError::InvalidArgument(format!(
                "{what} has length {v}, system dimension is {}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[T], lambda: T) -> Result<Vec<T>> {
        self.check_len(x.len(), "state")?;
        let mut out = vec![T::zero(); self.dim()];
        self.field.eval(x, lambda, &mut out);
        Ok(out)
    }

    pub(crate) fn eval_unchecked(&self, x: &[T], lambda: T, out: &mut [T]) {
        self.field.eval(x, lambda, out);
    }

    /// `D_x F(0, λ)`.
    pub fn jacobian(&self, lambda: T) -> Result<RMatrix<T>> {
        let j = match self.analytic(|f| f.jacobian(lambda)) {
            Some(j) => j,
            None => fd::jacobian_at(self, &vec![T::zero(); self.dim()], lambda),
        };
        finite_matrix(j)
    }

    /// `D_x F(x, λ)` at an arbitrary state.
    pub fn jacobian_at(&self, x: &[T], lambda: T) -> Result<RMatrix<T>> {
        self.check_len(x.len(), "state")?;
        let j = match self.analytic(|f| f.jacobian_at(x, lambda)) {
            Some(j) => j,
            None => fd::jacobian_at(self, x, lambda),
        };
        finite_matrix(j)
    }

    /// `D²_xx F(0, λ)[a, b]`.
    pub fn bilinear(&self, lambda: T, a: &[Complex<T>], b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_len(a.len(), "direction a")?;
        self.check_len(b.len(), "direction b")?;
        let v = self
            .analytic(|f| f.bilinear(lambda, a, b))
            .unwrap_or_else(|| fd::bilinear(self, lambda, a, b));
        finite_vec(v)
    }

    /// `D³_xxx F(0, λ)[a, b, c]`.
    pub fn trilinear(
        &self,
        lambda: T,
        a: &[Complex<T>],
        b: &[Complex<T>],
        c: &[Complex<T>],
    ) -> Result<Vec<Complex<T>>> {
        self.check_len(a.len(), "direction a")?;
        self.check_len(b.len(), "direction b")?;
        self.check_len(c.len(), "direction c")?;
        let v = self
            .analytic(|f| f.trilinear(lambda, a, b, c))
            .unwrap_or_else(|| fd::trilinear(self, lambda, a, b, c));
        finite_vec(v)
    }

    /// `D²_xλ F(0, λ)[a]`.
    pub fn mixed_xlambda(&self, lambda: T, a: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_len(a.len(), "direction")?;
        let v = match self.analytic(|f| f.mixed_xlambda(lambda, a)) {
            Some(v) => v,
            None => match self.analytic(|f| f.jacobian(lambda)) {
                Some(_) => fd::mixed_xlambda_from_jacobian(self, lambda, a)?,
                None => fd::mixed_xlambda(self, lambda, a),
            },
        };
        finite_vec(v)
    }

    /// `D³_xλλ F(0, λ)[a]`.
    pub fn mixed_xlambda2(&self, lambda: T, a: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_len(a.len(), "direction")?;
        let v = match self.analytic(|f| f.mixed_xlambda2(lambda, a)) {
            Some(v) => v,
            None => match self.analytic(|f| f.jacobian(lambda)) {
                Some(_) => fd::mixed_xlambda2_from_jacobian(self, lambda, a)?,
                None => fd::mixed_xlambda2(self, lambda, a),
            },
        };
        finite_vec(v)
    }

    /// Dispatches a [`DerivativeRequest`]; the Jacobian order returns `D_xF(0,λ) a`.
    pub fn derivative(&self, req: &DerivativeRequest<T>) -> Result<Vec<Complex<T>>> {
        let k = req.order.arity();
        if req.directions.len() != k {
            return Err(HopfError::InvalidArgument(format!(
                "{:?} takes {k} direction(s), got {}",
                req.order,
                req.directions.len()
            )));
        }
        let d = &req.directions;
        match req.order {
            DerivativeOrder::Jacobian => Ok(self.jacobian(req.lambda)?.mul_cvec(&d[0])),
            DerivativeOrder::Bilinear => self.bilinear(req.lambda, &d[0], &d[1]),
            DerivativeOrder::Trilinear => self.trilinear(req.lambda, &d[0], &d[1], &d[2]),
            DerivativeOrder::MixedXLambda => self.mixed_xlambda(req.lambda, &d[0]),
            DerivativeOrder::MixedXLambda2 => self.mixed_xlambda2(req.lambda, &d[0]),
        }
    }

    pub fn linear_diagonal(&self, lambda: T) -> Option<Vec<T>> {
        self.field.linear_diagonal(lambda)
    }

    fn analytic<R>(&self, f: impl FnOnce(&dyn VectorField<T>) -> Option<R>) -> Option<R> {
        if self.use_analytic {
            f(self.field.as_ref())
        } else {
            None
        }
    }
}

fn finite_vec<T: Scalar>(v: Vec<Complex<T>>) -> Result<Vec<Complex<T>>> {
    if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(v)
    } else {
        Err(HopfError::NumericalFailure(
            "non-finite derivative value".into(),
        ))
    }
}

fn finite_matrix<T: Scalar>(m: RMatrix<T>) -> Result<RMatrix<T>> {
    if m.as_slice().iter().all(|v| v.is_finite()) {
        Ok(m)
    } else {
        Err(HopfError::NumericalFailure("non-finite Jacobian".into()))
    }
}
