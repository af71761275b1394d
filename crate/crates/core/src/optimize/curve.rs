//! Optimal ψ–R curve at fixed α, traced by sweeping τ_c.

use rayon::prelude::*;
use serde::Serialize;

use super::allocation::{AllocationGrid, AllocationSolution, Allocator};
use super::objective::{CoolingRate, FigureOfMerit, Objective};
use crate::cycle::CycleCoefficients;
use crate::error::{Error, Result};
use crate::numerics::{bisect, golden_section_max, logspace, CompositeGaussLegendre};
use crate::protocol::TricycleConfig;

/// Curves with fewer converged τ_c points than this are rejected.
pub const MIN_CONVERGED: usize = 10;
pub const MIN_CURVE_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub psi: f64,
    #[serde(rename = "R")]
    pub cooling_rate: f64,
    pub chi: f64,
    pub tau_c: f64,
    pub tau_h: f64,
    pub tau_p: f64,
}

impl SweepRecord {
    pub fn from_solution(alpha: f64, sol: &AllocationSolution) -> Self {
        let m = &sol.metrics;
        Self {
            alpha,
            psi: m.psi,
            cooling_rate: m.cooling_rate,
            chi: m.chi,
            tau_c: sol.tau_c,
            tau_h: sol.tau_h,
            tau_p: sol.tau_p,
        }
    }
}

/// A grid point that produced no usable allocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub at: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveOptions {
    pub tau_c_min: f64,
    pub tau_c_max: f64,
    pub points: usize,
    pub allocation: AllocationGrid,
    #[serde(skip)]
    pub quadrature: CompositeGaussLegendre,
    /// Golden-section tolerance on `ln τ_c`.
    pub refine_tol: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            tau_c_min: 1.0,
            tau_c_max: 1e3,
            points: 200,
            allocation: AllocationGrid::default(),
            quadrature: CompositeGaussLegendre::default(),
            refine_tol: 1e-9,
        }
    }
}

impl CurveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_c_min > 0.0 && self.tau_c_max > self.tau_c_min && self.tau_c_max.is_finite()) {
            return Err(Error::invalid(
                "tau_c grid",
                format!("need 0 < min < max, got [{}, {}]", self.tau_c_min, self.tau_c_max),
            ));
        }
        if self.points < MIN_CURVE_POINTS {
            return Err(Error::invalid(
                "tau_c grid",
                format!("need at least {MIN_CURVE_POINTS} points, got {}", self.points),
            ));
        }
        Ok(())
    }
}

/// Principal allocations along a log-spaced τ_c grid, kept in τ_c order.
#[derive(Debug, Clone)]
pub struct TauCurve {
    pub alpha: f64,
    allocator: Allocator,
    refine_tol: f64,
    pub samples: Vec<AllocationSolution>,
    pub skipped: Vec<SkippedPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub alpha: f64,
    pub psi: f64,
    pub value: f64,
    /// Best value on the τ_c grid before refinement.
    pub coarse_value: f64,
    pub allocation: AllocationSolution,
}

impl TauCurve {
    pub fn build(config: &TricycleConfig, opts: &CurveOptions) -> Result<Self> {
        opts.validate()?;
        let coeffs = CycleCoefficients::new(config, &opts.quadrature)?;
        let allocator = Allocator::new(coeffs, opts.allocation)?;
        let grid = logspace(opts.tau_c_min, opts.tau_c_max, opts.points);
        let results: Vec<Result<AllocationSolution>> = grid.par_iter().map(|&tc| allocator.principal(tc)).collect();
        let mut samples = Vec::with_capacity(grid.len());
        let mut skipped = Vec::new();
        for (&tc, r) in grid.iter().zip(results) {
            match r {
                Ok(sol) => samples.push(sol),
                Err(e) => skipped.push(SkippedPoint {
                    at: tc,
                    reason: e.to_string(),
                }),
            }
        }
        if samples.len() < MIN_CONVERGED {
            return Err(Error::TooFewPoints {
                got: samples.len(),
                need: MIN_CONVERGED,
            });
        }
        Ok(Self {
            alpha: config.params().alpha,
            allocator,
            refine_tol: opts.refine_tol,
            samples,
            skipped,
        })
    }

    pub fn allocator(&self) -> &Allocator {
        &self.allocator
    }

    /// Records sorted by ψ.
    pub fn records(&self) -> Vec<SweepRecord> {
        let mut out: Vec<SweepRecord> = self.samples.iter().map(|s| SweepRecord::from_solution(self.alpha, s)).collect();
        out.sort_by(|a, b| a.psi.total_cmp(&b.psi).then(a.tau_c.total_cmp(&b.tau_c)));
        out
    }

    pub fn psi_range(&self) -> (f64, f64) {
        self.samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.metrics.psi), hi.max(s.metrics.psi))
        })
    }

    /// Maximum of `objective` along the curve. The grid argmax is refined by
    /// golden-section search in `ln τ_c` between its neighbours; the refined
    /// point replaces it only if it is better.
    pub fn maximize(&self, objective: &dyn Objective) -> Optimum {
        let values: Vec<f64> = self.samples.iter().map(|s| objective.evaluate(&s.metrics)).collect();
        let best = (0..values.len()).fold(0, |b, i| if values[i] > values[b] { i } else { b });
        let coarse = self.samples[best];
        let coarse_value = values[best];
        let lo = self.samples[best.saturating_sub(1)].tau_c.ln();
        let hi = self.samples[(best + 1).min(self.samples.len() - 1)].tau_c.ln();
        let mut optimum = Optimum {
            alpha: self.alpha,
            psi: coarse.metrics.psi,
            value: coarse_value,
            coarse_value,
            allocation: coarse,
        };
        if hi > lo {
            let f = |u: f64| match self.allocator.principal(u.exp()) {
                Ok(sol) => objective.evaluate(&sol.metrics),
                Err(_) => f64::NEG_INFINITY,
            };
            let (u, v) = golden_section_max(f, lo, hi, self.refine_tol);
            if v > coarse_value {
                if let Ok(sol) = self.allocator.principal(u.exp()) {
                    optimum.allocation = sol;
                    optimum.psi = sol.metrics.psi;
                    optimum.value = objective.evaluate(&sol.metrics);
                }
            }
        }
        optimum
    }

    /// Best-R principal allocation whose COP is exactly `psi`. Every τ_c
    /// interval of the grid that straddles `psi` is bisected; the candidate
    /// with the highest cooling rate wins.
    pub fn at_psi(&self, psi: f64) -> Result<AllocationSolution> {
        let mut best: Option<AllocationSolution> = None;
        for w in self.samples.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if (a.metrics.psi - psi) * (b.metrics.psi - psi) > 0.0 {
                continue;
            }
            let f = |tc: f64| match self.allocator.principal(tc) {
                Ok(sol) => sol.metrics.psi - psi,
                Err(_) => f64::NAN,
            };
            let Some(tc) = bisect(f, a.tau_c, b.tau_c, 1e-13 * b.tau_c) else {
                continue;
            };
            let Ok(sol) = self.allocator.principal(tc) else {
                continue;
            };
            if best.map_or(true, |bs| sol.metrics.cooling_rate > bs.metrics.cooling_rate) {
                best = Some(sol);
            }
        }
        best.ok_or(Error::Unreachable { psi })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalCurve {
    pub alpha: f64,
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<SkippedPoint>,
}

pub fn optimal_curve(config: &TricycleConfig, opts: &CurveOptions) -> Result<OptimalCurve> {
    let curve = TauCurve::build(config, opts)?;
    Ok(OptimalCurve {
        alpha: curve.alpha,
        records: curve.records(),
        skipped: curve.skipped,
    })
}

pub fn maximize(config: &TricycleConfig, objective: &dyn Objective, opts: &CurveOptions) -> Result<Optimum> {
    Ok(TauCurve::build(config, opts)?.maximize(objective))
}

/// `ψ_{α,R}` and `R_{α,max}`.
pub fn max_cooling_rate(config: &TricycleConfig, opts: &CurveOptions) -> Result<Optimum> {
    maximize(config, &CoolingRate, opts)
}

/// `ψ_{α,χ}` and `χ_{α,max}`.
pub fn max_figure_of_merit(config: &TricycleConfig, opts: &CurveOptions) -> Result<Optimum> {
    maximize(config, &FigureOfMerit, opts)
}

/// Principal allocation with COP `psi` on the fixed-α optimal curve.
pub fn allocation_at_psi(config: &TricycleConfig, psi: f64, opts: &CurveOptions) -> Result<AllocationSolution> {
    TauCurve::build(config, opts)?.at_psi(psi)
}
