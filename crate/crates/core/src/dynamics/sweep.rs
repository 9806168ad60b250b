use rayon::prelude::*;
use serde::Serialize;

use super::cycle::{find_limit_cycle, monodromy, CycleOptions, ModalFrame, TimeDirection};
use super::integrate::IntegratorOptions;
use crate::error::{HopfError, Result};
use crate::hopf::{BranchPrediction, Classification, Stability};
use crate::linalg::eigenpairs;
use crate::scalar::{lit, Scalar};
use crate::system::ParameterizedSystem;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Cycle,
    NoCycle,
    Failed(String),
}

impl RowStatus {
    pub fn as_str(&self) -> String {
        match self {
            RowStatus::Cycle => "cycle".into(),
            RowStatus::NoCycle => "no-cycle".into(),
            RowStatus::Failed(m) => format!("failed: {m}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow<T: Scalar> {
    pub lambda: T,
    pub r: Option<T>,
    pub period: Option<T>,
    pub mu2: Option<T>,
    /// Distance of the trivial multiplier from 1.
    pub trivial_defect: Option<T>,
    pub cycle_stable: Option<bool>,
    pub direction: Option<TimeDirection>,
    /// Largest real part of the spectrum of `DₓF(0, λ)`.
    pub trivial_leading_re: T,
    pub status: RowStatus,
}

/// What the classifier predicted, used to seed and orient each row.
#[derive(Debug, Clone, Default)]
pub struct SweepPlan<'a, T: Scalar> {
    pub prediction: Option<&'a BranchPrediction<T>>,
    pub classification: Option<&'a Classification>,
}

fn guess_amplitude<T: Scalar>(plan: &SweepPlan<'_, T>, lambda0: T, lambda: T) -> T {
    let d = (lambda - lambda0).abs();
    let g = match plan.prediction {
        Some(p) => match (p.eta, p.lambda_ddot0) {
            (Some(eta), _) => d / eta,
            (None, Some(ldd)) if ldd != T::zero() => (lit::<T>(2.0) * d / ldd.abs()).sqrt(),
            _ => d.sqrt(),
        },
        None => d.sqrt(),
    };
    if g > T::zero() {
        g
    } else {
        T::zero()
    }
}

fn directions(plan: &SweepPlan<'_, impl Scalar>) -> Vec<TimeDirection> {
    match plan.classification.and_then(|c| c.stability_cycle) {
        Some(Stability::Unstable) => vec![TimeDirection::Backward],
        Some(Stability::Stable) => vec![TimeDirection::Forward],
        None => vec![TimeDirection::Backward, TimeDirection::Forward],
    }
}

fn leading_re<T: Scalar>(sys: &ParameterizedSystem<T>, lambda: T) -> Result<T> {
    let j = sys.jacobian(lambda)?;
    Ok(eigenpairs(&j.to_complex())?
        .into_iter()
        .map(|p| p.value.re)
        .fold(T::neg_infinity(), T::max))
}

fn sweep_row<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda: T,
    frame: &ModalFrame<T>,
    plan: &SweepPlan<'_, T>,
    copts: &CycleOptions<T>,
) -> SweepRow<T> {
    let mut row = SweepRow {
        lambda,
        r: None,
        period: None,
        mu2: None,
        trivial_defect: None,
        cycle_stable: None,
        direction: None,
        trivial_leading_re: T::nan(),
        status: RowStatus::NoCycle,
    };
    match leading_re(sys, lambda) {
        Ok(v) => row.trivial_leading_re = v,
        Err(e) => {
            row.status = RowStatus::Failed(e.to_string());
            return row;
        }
    }
    let amp = guess_amplitude(plan, frame.lambda0, lambda);
    if !(amp > lit::<T>(1e-12)) {
        return row;
    }
    let mut last_err: Option<HopfError> = None;
    for dir in directions(plan) {
        match find_limit_cycle(sys, lambda, frame, amp, dir, copts) {
            Ok(cycle) => {
                let iopts = IntegratorOptions::new(copts.shoot_rtol, copts.shoot_atol);
                row.r = Some(cycle.amplitude_r);
                row.period = Some(cycle.period);
                row.direction = Some(dir);
                match monodromy(sys, lambda, &cycle, &iopts) {
                    Ok(fl) => {
                        let one = num_complex::Complex::new(T::one(), T::zero());
                        row.trivial_defect = Some((fl.multipliers[fl.trivial_index] - one).norm());
                        row.mu2 = fl.mu2;
                        row.cycle_stable = Some(fl.stable);
                        row.status = RowStatus::Cycle;
                    }
                    Err(e) => row.status = RowStatus::Failed(e.to_string()),
                }
                return row;
            }
            Err(HopfError::NoCycleFound(_)) => {}
            Err(e) => last_err = Some(e),
        }
    }
    if let Some(e) = last_err {
        row.status = RowStatus::Failed(e.to_string());
    }
    row
}

/// Runs [`find_limit_cycle`] and [`monodromy`] for every `λ` in the grid.
/// Rows are computed in parallel and returned in grid order.
pub fn amplitude_sweep<T: Scalar>(
    sys: &ParameterizedSystem<T>,
    lambda_grid: &[T],
    frame: &ModalFrame<T>,
    plan: &SweepPlan<'_, T>,
    copts: &CycleOptions<T>,
) -> Vec<SweepRow<T>> {
    lambda_grid
        .par_iter()
        .map(|&l| sweep_row(sys, l, frame, plan, copts))
        .collect()
}
