use std::sync::Arc;

use super::{Monomial, ParameterizedSystem, PolynomialField};
use crate::error::Result;
use crate::predprey::{galerkin_system, PredPreyParams};
use crate::scalar::{lit, Scalar};

/// The three choices of `β(λ)` for the planar cubic reference system
/// `x' = [[β, 1], [-1, β]] x + (x₁³, x₂³)` with `λ₀ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example21Case {
    /// β = λ: transversal crossing.
    Linear,
    /// β = λ²: degenerate, definite `H₀`.
    Quadratic,
    /// β = −λ²: degenerate, indefinite `H₀`.
    NegativeQuadratic,
}

impl Example21Case {
    pub fn label(self) -> &'static str {
        match self {
            Example21Case::Linear => "example21-case1",
            Example21Case::Quadratic => "example21-case2",
            Example21Case::NegativeQuadratic => "example21-case3",
        }
    }

    pub fn beta_coeffs(self) -> Vec<f64> {
        match self {
            Example21Case::Linear => vec![0.0, 1.0],
            Example21Case::Quadratic => vec![0.0, 0.0, 1.0],
            Example21Case::NegativeQuadratic => vec![0.0, 0.0, -1.0],
        }
    }
}

/// Monomial terms of the planar cubic reference system.
pub(crate) fn example21_terms<T: Scalar>(case: Example21Case) -> Vec<Monomial<T>> {
    let beta: Vec<T> = case.beta_coeffs().into_iter().map(lit).collect();
    let one = vec![T::one()];
    let m = |component, exponents: [u32; 2], coeffs: Vec<T>| Monomial {
        component,
        exponents: exponents.to_vec(),
        coeffs,
    };
    vec![
        m(0, [1, 0], beta.clone()),
        m(0, [0, 1], one.clone()),
        m(0, [3, 0], one.clone()),
        m(1, [1, 0], vec![-T::one()]),
        m(1, [0, 1], beta),
        m(1, [0, 3], one),
    ]
}

pub fn example21<T: Scalar>(case: Example21Case) -> ParameterizedSystem<T> {
    let field = PolynomialField::new(2, example21_terms(case)).expect("valid reference system");
    ParameterizedSystem::new(case.label(), Arc::new(field), (-T::one(), T::one()))
        .expect("reference system has a trivial branch")
}

pub fn builtin_labels() -> &'static [&'static str] {
    &["example21-case1", "example21-case2", "example21-case3", "predprey"]
}

/// Looks up a built-in system. `"predprey"` is the Galerkin truncation for
/// `(d₁, d₂, k, θ) = (1, 3, 17, 4)` on the first critical domain length.
pub fn builtin<T: Scalar>(label: &str) -> Option<Result<ParameterizedSystem<T>>> {
    let case = match label {
        "example21-case1" => Example21Case::Linear,
        "example21-case2" => Example21Case::Quadratic,
        "example21-case3" => Example21Case::NegativeQuadratic,
        "predprey" => {
            let params = PredPreyParams::<T>::new(lit(1.0), lit(3.0), lit(17.0), lit(4.0));
            return Some(params.and_then(|p| {
                let ell = p.critical_length(1);
                galerkin_system(&p.with_length(ell), 4)
            }));
        }
        _ => return None,
    };
    Some(Ok(example21(case)))
}
