//! Direct numerical dynamics used to verify the classifier: integration,
//! limit cycles, Floquet exponents and amplitude sweeps.

mod cycle;
mod integrate;
mod sweep;

pub use cycle::{
    find_limit_cycle, fourier_amplitude, monodromy, phase_shift, CycleOptions, FloquetResult, LimitCycle,
    ModalFrame, TimeDirection,
};
pub use integrate::{flow_with_sensitivity, integrate, IntegratorOptions, Trajectory};
pub use sweep::{amplitude_sweep, RowStatus, SweepPlan, SweepRow};
