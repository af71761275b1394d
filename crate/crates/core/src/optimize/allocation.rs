//! Optimal split of the cycle time between the three branches at fixed τ_c.
//!
//! The Lagrange multipliers for fixed COP and zero net work are eliminated
//! analytically, which leaves
//!
//! ```text
//! ΔS_h τ_h²/Σ_h + ΔS_p τ_p²/Σ_p + ΔS_c τ_c²/Σ_c + 2(τ_c + τ_h + τ_p) = 0
//! ```
//!
//! together with the energy balance, solved for τ_h by
//! [`CycleCoefficients::balanced_tau_h`]. Substituting τ_h(τ_p) leaves one
//! scalar equation in τ_p, bracketed on a log grid and bisected.

use serde::Serialize;

use crate::cycle::{CycleCoefficients, CycleMetrics};
use crate::error::{Error, Result};
use crate::numerics::{bisect, logspace, sign_change_brackets, CompositeGaussLegendre};
use crate::protocol::{PerReservoir, TricycleConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllocationGrid {
    pub tau_p_min: f64,
    pub tau_p_max: f64,
    pub points: usize,
}

impl Default for AllocationGrid {
    fn default() -> Self {
        Self {
            tau_p_min: 1e-2,
            tau_p_max: 1e5,
            points: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllocationSolution {
    pub tau_c: f64,
    pub tau_h: f64,
    pub tau_p: f64,
    /// Left side of the stationarity condition.
    pub residual_constraint: f64,
    /// `Q_c + Q_h + Q_p`.
    pub residual_energy: f64,
    pub metrics: CycleMetrics,
    /// Highest cooling rate among the roots found at this τ_c.
    pub principal: bool,
}

impl AllocationSolution {
    pub fn taus(&self) -> PerReservoir<f64> {
        PerReservoir::new(self.tau_c, self.tau_h, self.tau_p)
    }

    pub fn total_time(&self) -> f64 {
        self.tau_c + self.tau_h + self.tau_p
    }
}

/// Left side of the stationarity condition for a time triple.
pub fn stationarity_residual(coeffs: &CycleCoefficients, taus: &PerReservoir<f64>) -> f64 {
    let (d, s) = (&coeffs.d_s, &coeffs.sigma);
    d.h * taus.h * taus.h / s.h
        + d.p * taus.p * taus.p / s.p
        + d.c * taus.c * taus.c / s.c
        + 2.0 * (taus.c + taus.h + taus.p)
}

/// Signs the elimination relies on: every `Σ < 0`, `ΔS_c, ΔS_h > 0`,
/// `ΔS_p < 0`, and a positive zeroth-order heat sum (amplitude above the
/// reversible one).
pub fn check_sign_structure(coeffs: &CycleCoefficients) -> Result<()> {
    let (d, s) = (&coeffs.d_s, &coeffs.sigma);
    let mut bad = Vec::new();
    for (r, &v) in s.iter() {
        if !(v < 0.0) {
            bad.push(format!("Sigma_{} = {v:e} is not negative", r.label()));
        }
    }
    if !(d.c > 0.0) {
        bad.push(format!("dS_c = {:e} is not positive", d.c));
    }
    if !(d.h > 0.0) {
        bad.push(format!("dS_h = {:e} is not positive", d.h));
    }
    if !(d.p < 0.0) {
        bad.push(format!("dS_p = {:e} is not negative", d.p));
    }
    if !bad.is_empty() {
        return Err(Error::SignStructure(bad.join("; ")));
    }
    let sum_q0 = coeffs.zeroth_heat_sum();
    if !(sum_q0 > 0.0) {
        return Err(Error::BelowReversibleAmplitude { sum_q0 });
    }
    Ok(())
}

/// Solver bound to one set of cycle coefficients.
#[derive(Debug, Clone)]
pub struct Allocator {
    coeffs: CycleCoefficients,
    grid: AllocationGrid,
    scan: Vec<f64>,
}

impl Allocator {
    pub fn new(coeffs: CycleCoefficients, grid: AllocationGrid) -> Result<Self> {
        check_sign_structure(&coeffs)?;
        if !(grid.tau_p_min > 0.0 && grid.tau_p_max > grid.tau_p_min && grid.points >= 2) {
            return Err(Error::invalid("tau_p grid", format!("{grid:?} is not a valid log grid")));
        }
        Ok(Self {
            coeffs,
            grid,
            scan: logspace(grid.tau_p_min, grid.tau_p_max, grid.points),
        })
    }

    pub fn from_config(config: &TricycleConfig, quadrature: &CompositeGaussLegendre) -> Result<Self> {
        Self::new(CycleCoefficients::new(config, quadrature)?, AllocationGrid::default())
    }

    pub fn coefficients(&self) -> &CycleCoefficients {
        &self.coeffs
    }

    pub fn grid(&self) -> &AllocationGrid {
        &self.grid
    }

    fn reduced(&self, tau_c: f64, tau_p: f64) -> Option<f64> {
        let tau_h = self.coeffs.balanced_tau_h(tau_c, tau_p)?;
        Some(stationarity_residual(&self.coeffs, &PerReservoir::new(tau_c, tau_h, tau_p)))
    }

    /// Every energy-balanced stationary allocation at this τ_c that runs as a
    /// refrigerator, ordered by descending cooling rate. The first one is
    /// marked principal.
    pub fn solve(&self, tau_c: f64) -> Result<Vec<AllocationSolution>> {
        if !(tau_c > 0.0 && tau_c.is_finite()) {
            return Err(Error::invalid("tau_c", format!("must be positive and finite, got {tau_c}")));
        }
        let scan = &self.scan;
        let values: Vec<Option<f64>> = scan.iter().map(|&tp| self.reduced(tau_c, tp)).collect();
        if values.iter().all(Option::is_none) {
            return Err(Error::NoEnergyBalance { tau_c });
        }
        let brackets = sign_change_brackets(&values);
        if brackets.is_empty() {
            return Err(Error::NoBracket { tau_c });
        }
        let mut solutions = Vec::with_capacity(brackets.len());
        let mut last_err = None;
        for i in brackets {
            let (lo, hi) = (scan[i], scan[i + 1]);
            // Both ends are energy-balanced and the denominator is monotone in
            // τ_p, so every interior point is too.
            let f = |tp: f64| self.reduced(tau_c, tp).unwrap_or(f64::NAN);
            let Some(tau_p) = bisect(f, lo, hi, 1e-13 * hi) else {
                continue;
            };
            let Some(tau_h) = self.coeffs.balanced_tau_h(tau_c, tau_p) else {
                continue;
            };
            if !(tau_h > 0.0 && tau_p > 0.0) {
                continue;
            }
            let taus = PerReservoir::new(tau_c, tau_h, tau_p);
            match self.coeffs.metrics(&taus) {
                Ok(metrics) if metrics.branches.c.q > 0.0 => solutions.push(AllocationSolution {
                    tau_c,
                    tau_h,
                    tau_p,
                    residual_constraint: stationarity_residual(&self.coeffs, &taus),
                    residual_energy: metrics.heat_sum(),
                    metrics,
                    principal: false,
                }),
                Ok(metrics) => {
                    last_err = Some(Error::NotRefrigerator {
                        q_c: metrics.branches.c.q,
                        q_h: metrics.branches.h.q,
                    })
                }
                Err(e) => last_err = Some(e),
            }
        }
        if solutions.is_empty() {
            return Err(last_err.unwrap_or(Error::NoBracket { tau_c }));
        }
        solutions.sort_by(|a, b| b.metrics.cooling_rate.total_cmp(&a.metrics.cooling_rate));
        solutions[0].principal = true;
        Ok(solutions)
    }

    pub fn principal(&self, tau_c: f64) -> Result<AllocationSolution> {
        Ok(self.solve(tau_c)?[0])
    }
}

/// All stationary energy-balanced allocations at `tau_c` with the default
/// quadrature and τ_p scan.
pub fn solve_time_allocation(config: &TricycleConfig, tau_c: f64) -> Result<Vec<AllocationSolution>> {
    Allocator::from_config(config, &CompositeGaussLegendre::default())?.solve(tau_c)
}
