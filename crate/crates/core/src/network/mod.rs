//! Cascaded master equation for one or two interface nodes, its RK4
//! integrator and an exact-propagator oracle.

mod generator;
mod integrate;
mod oracle;
mod sparse;
mod trajectory;
mod unidirectional;

pub use generator::{
    assemble_generator, collective_mode_observables, rhs, CascadePair, Dissipator, NetworkGenerator, NetworkNode,
    NetworkSpec,
};
pub use integrate::{
    integrate, max_step, propagate, Propagation, PropagationResult, DEFAULT_SAMPLE_EVERY, HERMITICITY_TOL,
    POSITIVITY_FLOOR, STEPS_PER_PERIOD, TRACE_DRIFT_TOL,
};
pub use oracle::{expm_oracle, liouvillian, ORACLE_DIM_CAP};
pub use trajectory::{Trajectory, TrajectoryMeta};
pub use unidirectional::unidirectionality_check;
