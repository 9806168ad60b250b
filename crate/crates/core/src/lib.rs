//! Detection, classification and dynamical verification of Hopf
//! bifurcations, including the degenerate case `Re μ′(λ₀) = 0` where the
//! outcome is decided by the coefficients `H11`, `H22`.
//!
//! The numerical core is generic over the scalar type ([`Scalar`], i.e.
//! `f32` or `f64`); the aliases at the crate root fix it to `f64`.

pub mod dynamics;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod predprey;
pub mod scalar;
pub mod spectral;
pub mod system;

pub use error::{HopfError, Result};
pub use hopf::{
    analyze_point, analyze_spectral, analyze_window, branch_tangent, classify, compute_h11, compute_h22,
    transversality, CheckStatus, Direction, Stability, Tag,
};
pub use scalar::Scalar;
pub use spectral::{adjoint_pair, bordered_solve, locate_hopf, resolvent_solve, track_eigenvalue, CandidateKind};
pub use system::{builtin, builtin_labels, example21, Example21Case, VectorField};

pub type System = system::ParameterizedSystem<f64>;
pub type Spectral = spectral::SpectralData<f64>;
pub type Coefficients = hopf::HopfCoefficients<f64>;
pub type Analysis = hopf::HopfAnalysis<f64>;
pub type Prediction = hopf::BranchPrediction<f64>;
pub type Tolerances = hopf::Tolerances<f64>;
pub type Cycle = dynamics::LimitCycle<f64>;
pub type Floquet = dynamics::FloquetResult<f64>;
pub type PredPrey = predprey::PredPreyParams<f64>;
pub type Complex64 = num_complex::Complex<f64>;
