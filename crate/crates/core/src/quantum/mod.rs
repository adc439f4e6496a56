//! Tensor-product operator algebra, canonical states and measurement
//! functionals.
//!
//! Basis conventions used throughout the crate:
//! - qubit basis is (|e⟩, |g⟩) at indices (0, 1), so σ_z = diag(1, −1);
//! - bosonic modes use ascending Fock order |0⟩, |1⟩, …;
//! - composite indices are row-major over the layout order, so the last
//!   subsystem varies fastest.

mod layout;
mod measure;
mod operator;
mod states;
mod wigner;

pub use layout::SubsystemLayout;
pub use measure::{
    expectation, expectation_real, min_eigenvalue, partial_trace, sqrt_fidelity, trace_distance,
    top_level_population,
};
pub use operator::{embed, DensityMatrix, Operator};
pub use states::{
    annihilation_op, coherent_state, displacement_op, fock_state, pure_qubit, qubit_ops,
    thermal_populations, thermal_state, QubitOps,
};
pub use wigner::{wigner, GridSpec, WignerGrid};

pub(crate) use measure::trace_of_product;
pub(crate) use operator::max_abs;

/// Tolerances attached to the density-matrix invariants.
pub mod tol {
    pub const HERMITIAN: f64 = 1e-10;
    pub const TRACE: f64 = 1e-10;
    pub const EIGEN_FLOOR: f64 = -1e-8;
}
