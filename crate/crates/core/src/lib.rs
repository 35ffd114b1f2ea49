//! Time integration for second-order evolution equations
//! `C u'' + B u' + A u = f` with symmetric positive definite `A`, `B`, `C`.
//!
//! The integrators are unconditionally stable on non-uniform time grids and
//! come with runtime monitors for their discrete energy estimates. The
//! [`biparabolic`] module supplies a one-dimensional benchmark with a
//! closed-form solution.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod biparabolic;
pub mod error;
pub mod linops;
pub mod schemes;
pub mod timegrid;

pub use analysis::{
    check_three_level_estimate, check_vector_estimate, energy_operator, l2_error, observed_order,
    three_level_energy, vector_monitor, MonitorMode, StabilityRecord, StabilityReport,
};
pub use biparabolic::{assemble, BiparabolicProblem};
pub use error::{Error, Result};
pub use linops::{spd_check, FactoredOperator, PolyOperator, SymTridiag};
pub use schemes::{
    init_vector_state, run_three_level_nonuniform, run_three_level_uniform, run_vector_scheme,
    sample_rhs, vector_step, RhsSampling, SchemeKind, SecondOrderProblem, Trajectory, VectorState,
};
pub use timegrid::{grid_stats, random_grid, uniform_grid, GridStats, TimeGrid};
