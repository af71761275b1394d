//! Finite-time quantum absorption refrigerator ("tricycle") built from a
//! driven two-level system coupled in turn to a cold, a hot and a pump bath.
//!
//! Units: `ħ = k_B = 1`.

pub mod cycle;
pub mod error;
pub mod heat_model;
pub mod lindblad;
pub mod numerics;
pub mod optimize;
pub mod oracle;
pub mod protocol;
pub mod registry;
pub mod thermo;

pub use cycle::{
    evaluate_cycle, evaluate_cycle_with, reversible_amplitude, reversible_cop, zeroth_heat_sum, CycleCoefficients,
    CycleMetrics,
};
pub use error::{Error, Result};
pub use heat_model::{heat_models, HeatModel};
pub use protocol::{BranchProtocol, PerReservoir, Reservoir, TricycleConfig, TricycleParams};
pub use registry::{Named, Registry};
pub use thermo::BranchThermo;
