//! Optimal time allocation and the sweeps built on it.

pub mod allocation;
pub mod curve;
pub mod objective;
pub mod sweeps;

pub use allocation::{
    check_sign_structure, solve_time_allocation, stationarity_residual, AllocationGrid, AllocationSolution, Allocator,
};
pub use curve::{
    allocation_at_psi, max_cooling_rate, max_figure_of_merit, maximize, optimal_curve, CurveOptions, OptimalCurve,
    Optimum, SkippedPoint, SweepRecord, TauCurve,
};
pub use objective::{objectives, CoolingRate, FigureOfMerit, Objective};
pub use sweeps::{
    alpha_sweep, envelope_curve, free_time_sweep, is_single_peaked, profile_gap, time_allocation_profile,
    AllocationProfile, AlphaPoint, AlphaSweep, Envelope, EnvelopeOptions, FreeTimePoint, FreeTimeSweep, ProfileRow,
};
