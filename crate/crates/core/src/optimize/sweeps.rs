//! Sweeps built on the fixed-α optimal curve: over α, over target COP
//! (upper envelope across α), the time split along the optimal region, and
//! the free (τ_c, τ_p) plane.

use rayon::prelude::*;
use serde::Serialize;

use super::curve::{CurveOptions, Optimum, SkippedPoint, SweepRecord, TauCurve};
use super::objective::{CoolingRate, FigureOfMerit, Objective};
use crate::cycle::{reversible_cop, CycleCoefficients};
use crate::error::{Error, Result};
use crate::numerics::{golden_section_max, linspace};
use crate::protocol::{PerReservoir, TricycleConfig};

pub const ALPHA_WINDOW: (f64, f64) = (-0.5, 1.5);
pub const MIN_ALPHA_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub psi_at_r_max: f64,
    pub r_max: f64,
    pub psi_at_chi_max: f64,
    pub chi_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSweep {
    pub points: Vec<AlphaPoint>,
    pub failed: Vec<SkippedPoint>,
    /// `argmax_α χ_{α,max}`, refined.
    pub alpha_chi: f64,
    pub chi_peak: f64,
    /// `argmax_α R_{α,max}`, refined.
    pub alpha_r: f64,
    pub r_peak: f64,
}

fn optimum_at(config: &TricycleConfig, alpha: f64, objective: &dyn Objective, opts: &CurveOptions) -> Result<Optimum> {
    Ok(TauCurve::build(&config.with_alpha(alpha)?, opts)?.maximize(objective))
}

fn argmax(values: &[f64]) -> usize {
    (0..values.len()).fold(0, |b, i| if values[i] > values[b] { i } else { b })
}

/// Golden refinement of a sampled maximum between the neighbours of the
/// grid argmax. Keeps the grid point unless the search does better.
fn refine_peak(xs: &[f64], ys: &[f64], tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let i = argmax(ys);
    let (lo, hi) = (xs[i.saturating_sub(1)], xs[(i + 1).min(xs.len() - 1)]);
    if hi <= lo {
        return (xs[i], ys[i]);
    }
    let (x, y) = golden_section_max(f, lo, hi, tol);
    if y > ys[i] {
        (x, y)
    } else {
        (xs[i], ys[i])
    }
}

/// For each α, the maxima of R and χ along the optimal curve; then the α at
/// which each maximum peaks.
pub fn alpha_sweep(config: &TricycleConfig, alphas: &[f64], opts: &CurveOptions) -> Result<AlphaSweep> {
    if alphas.len() < MIN_ALPHA_POINTS {
        return Err(Error::invalid(
            "alpha grid",
            format!("need at least {MIN_ALPHA_POINTS} points, got {}", alphas.len()),
        ));
    }
    if let Some(a) = alphas.iter().find(|a| !(ALPHA_WINDOW.0..=ALPHA_WINDOW.1).contains(*a)) {
        return Err(Error::invalid(
            "alpha grid",
            format!("{a} lies outside [{}, {}]", ALPHA_WINDOW.0, ALPHA_WINDOW.1),
        ));
    }
    let results: Vec<Result<AlphaPoint>> = alphas
        .par_iter()
        .map(|&alpha| {
            let curve = TauCurve::build(&config.with_alpha(alpha)?, opts)?;
            let r = curve.maximize(&CoolingRate);
            let chi = curve.maximize(&FigureOfMerit);
            Ok(AlphaPoint {
                alpha,
                psi_at_r_max: r.psi,
                r_max: r.value,
                psi_at_chi_max: chi.psi,
                chi_max: chi.value,
            })
        })
        .collect();
    let mut points = Vec::new();
    let mut failed = Vec::new();
    for (&alpha, r) in alphas.iter().zip(results) {
        match r {
            Ok(p) => points.push(p),
            Err(e) => failed.push(SkippedPoint {
                at: alpha,
                reason: e.to_string(),
            }),
        }
    }
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            got: points.len(),
            need: 3,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.alpha).collect();
    let tol = 1e-6;
    let peak = |objective: &dyn Objective, ys: Vec<f64>| {
        refine_peak(&xs, &ys, tol, |a| {
            optimum_at(config, a, objective, opts).map_or(f64::NEG_INFINITY, |o| o.value)
        })
    };
    let (alpha_chi, chi_peak) = peak(&FigureOfMerit, points.iter().map(|p| p.chi_max).collect());
    let (alpha_r, r_peak) = peak(&CoolingRate, points.iter().map(|p| p.r_max).collect());
    Ok(AlphaSweep {
        points,
        failed,
        alpha_chi,
        chi_peak,
        alpha_r,
        r_peak,
    })
}

/// True when `values` rises up to its maximum and falls after it.
pub fn is_single_peaked(values: &[f64]) -> bool {
    let i = argmax(values);
    values[..=i].windows(2).all(|w| w[1] >= w[0]) && values[i..].windows(2).all(|w| w[1] <= w[0])
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeOptions {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Coarse α grid scanned before golden refinement at each ψ.
    pub alpha_points: usize,
    /// Size of the default ψ grid when none is supplied.
    pub psi_points: usize,
    pub alpha_tol: f64,
    pub curve: CurveOptions,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        Self {
            alpha_min: ALPHA_WINDOW.0,
            alpha_max: ALPHA_WINDOW.1,
            alpha_points: 41,
            psi_points: 41,
            alpha_tol: 1e-5,
            curve: CurveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    /// Per target ψ, the α-maximized cooling rate. Since χ = ψR at fixed ψ,
    /// the same α maximizes χ, so these rows are the χ envelope as well.
    pub rows: Vec<SweepRecord>,
    /// Envelope point of maximum R.
    pub psi_r: SweepRecord,
    /// Envelope point of maximum χ.
    pub psi_chi: SweepRecord,
}

struct EnvelopeSolver<'a> {
    config: &'a TricycleConfig,
    opts: &'a EnvelopeOptions,
    alphas: Vec<f64>,
    curves: Vec<Option<TauCurve>>,
}

impl<'a> EnvelopeSolver<'a> {
    fn new(config: &'a TricycleConfig, opts: &'a EnvelopeOptions) -> Result<Self> {
        if !(opts.alpha_min < opts.alpha_max && opts.alpha_points >= 3) {
            return Err(Error::invalid("alpha window", format!("[{}, {}]", opts.alpha_min, opts.alpha_max)));
        }
        let alphas = linspace(opts.alpha_min, opts.alpha_max, opts.alpha_points);
        let curves = alphas
            .par_iter()
            .map(|&a| config.with_alpha(a).and_then(|c| TauCurve::build(&c, &opts.curve)).ok())
            .collect();
        Ok(Self {
            config,
            opts,
            alphas,
            curves,
        })
    }

    fn reachable(&self) -> Option<(f64, f64)> {
        self.curves
            .iter()
            .flatten()
            .map(TauCurve::psi_range)
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    fn rate_at(&self, alpha: f64, psi: f64) -> Option<SweepRecord> {
        let cfg = self.config.with_alpha(alpha).ok()?;
        let sol = TauCurve::build(&cfg, &self.opts.curve).ok()?.at_psi(psi).ok()?;
        Some(SweepRecord::from_solution(alpha, &sol))
    }

    fn best_at(&self, psi: f64) -> Result<SweepRecord> {
        let coarse: Vec<Option<SweepRecord>> = self
            .curves
            .iter()
            .zip(&self.alphas)
            .map(|(c, &a)| {
                let sol = c.as_ref()?.at_psi(psi).ok()?;
                Some(SweepRecord::from_solution(a, &sol))
            })
            .collect();
        let values: Vec<f64> = coarse
            .iter()
            .map(|r| r.map_or(f64::NEG_INFINITY, |r| r.cooling_rate))
            .collect();
        let i = argmax(&values);
        let Some(grid_best) = coarse[i] else {
            return Err(Error::Unreachable { psi });
        };
        let (alpha, value) = refine_peak(&self.alphas, &values, self.opts.alpha_tol, |a| {
            self.rate_at(a, psi).map_or(f64::NEG_INFINITY, |r| r.cooling_rate)
        });
        if value > grid_best.cooling_rate {
            if let Some(r) = self.rate_at(alpha, psi) {
                return Ok(r);
            }
        }
        Ok(grid_best)
    }
}

/// Upper envelope over α of the fixed-α optimal curves, as a function of ψ.
/// Without a ψ grid, one is laid out strictly inside the COP range reached
/// on the coarse α grid, clipped to `(0, ψ_r)`.
pub fn envelope_curve(config: &TricycleConfig, psi_grid: Option<&[f64]>, opts: &EnvelopeOptions) -> Result<Envelope> {
    let solver = EnvelopeSolver::new(config, opts)?;
    let p = config.params();
    let psi_rev = reversible_cop(p.t_c, p.t_h, p.t_p)?;
    let grid: Vec<f64> = match psi_grid {
        Some(g) => {
            if let Some(&bad) = g.iter().find(|&&x| !(x > 0.0 && x < psi_rev)) {
                return Err(Error::Domain {
                    what: "psi",
                    value: bad,
                    domain: "(0, reversible COP)",
                });
            }
            g.to_vec()
        }
        None => {
            let (lo, hi) = solver.reachable().ok_or(Error::TooFewPoints { got: 0, need: 1 })?;
            let (lo, hi) = (lo.max(0.0), hi.min(psi_rev));
            let n = opts.psi_points.max(3);
            let full = linspace(lo, hi, n + 2);
            full[1..=n].to_vec()
        }
    };
    let rows = grid
        .par_iter()
        .map(|&psi| solver.best_at(psi))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.psi).collect();
    let peak_of = |f: &dyn Fn(&SweepRecord) -> f64| -> Result<SweepRecord> {
        let ys: Vec<f64> = rows.iter().map(f).collect();
        let (psi, _) = refine_peak(&xs, &ys, 1e-7, |psi| solver.best_at(psi).map_or(f64::NEG_INFINITY, |r| f(&r)));
        let best = rows[argmax(&ys)];
        match solver.best_at(psi) {
            Ok(r) if f(&r) > f(&best) => Ok(r),
            _ => Ok(best),
        }
    };
    let psi_r = peak_of(&|r| r.cooling_rate)?;
    let psi_chi = peak_of(&|r| r.chi)?;
    Ok(Envelope { rows, psi_r, psi_chi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub alpha: f64,
    pub psi: f64,
    pub tau_total: f64,
    pub tau_h_over_tau_p: f64,
    pub tau_c_over_tau_p: f64,
    pub tau_c: f64,
    pub tau_h: f64,
    pub tau_p: f64,
    #[serde(rename = "R")]
    pub cooling_rate: f64,
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationProfile {
    pub alpha: f64,
    pub rows: Vec<ProfileRow>,
    pub tau_total_increasing: bool,
    pub tau_h_ratio_decreasing: bool,
    pub tau_c_ratio_decreasing: bool,
}

/// How the optimal cycle splits its time across a range of target COPs at
/// the α of `config`.
pub fn time_allocation_profile(
    config: &TricycleConfig,
    psi_grid: &[f64],
    opts: &CurveOptions,
) -> Result<AllocationProfile> {
    let curve = TauCurve::build(config, opts)?;
    let rows = psi_grid
        .par_iter()
        .map(|&psi| {
            let sol = curve.at_psi(psi)?;
            Ok(ProfileRow {
                alpha: curve.alpha,
                psi: sol.metrics.psi,
                tau_total: sol.total_time(),
                tau_h_over_tau_p: sol.tau_h / sol.tau_p,
                tau_c_over_tau_p: sol.tau_c / sol.tau_p,
                tau_c: sol.tau_c,
                tau_h: sol.tau_h,
                tau_p: sol.tau_p,
                cooling_rate: sol.metrics.cooling_rate,
                chi: sol.metrics.chi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let increasing = |f: fn(&ProfileRow) -> f64| rows.windows(2).all(|w| f(&w[1]) > f(&w[0]));
    let decreasing = |f: fn(&ProfileRow) -> f64| rows.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    Ok(AllocationProfile {
        alpha: curve.alpha,
        tau_total_increasing: increasing(|r| r.tau_total),
        tau_h_ratio_decreasing: decreasing(|r| r.tau_h_over_tau_p),
        tau_c_ratio_decreasing: decreasing(|r| r.tau_c_over_tau_p),
        rows,
    })
}

/// Largest relative difference between two profiles on a shared ψ grid,
/// over total time and both time ratios.
pub fn profile_gap(a: &AllocationProfile, b: &AllocationProfile) -> f64 {
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs());
    a.rows
        .iter()
        .zip(&b.rows)
        .map(|(x, y)| {
            rel(x.tau_total, y.tau_total)
                .max(rel(x.tau_h_over_tau_p, y.tau_h_over_tau_p))
                .max(rel(x.tau_c_over_tau_p, y.tau_c_over_tau_p))
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeTimePoint {
    pub tau_h: f64,
    #[serde(rename = "R")]
    pub cooling_rate: f64,
    pub psi: f64,
    pub work_residual: f64,
}

/// Cooling rate over a (τ_c, τ_p) grid with τ_h fixed by the energy balance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeTimeSweep {
    pub tau_c: Vec<f64>,
    pub tau_p: Vec<f64>,
    /// Indexed `[i_c][i_p]`; `None` where no positive balancing τ_h exists or
    /// the cycle does not refrigerate.
    pub values: Vec<Vec<Option<FreeTimePoint>>>,
}

impl FreeTimeSweep {
    pub fn argmax(&self) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(p) = v {
                    if best.map_or(true, |(_, b)| p.cooling_rate > b) {
                        best = Some(((i, j), p.cooling_rate));
                    }
                }
            }
        }
        best.map(|(ij, _)| ij)
    }

    /// Whether the maximum sits strictly inside the grid.
    pub fn has_interior_maximum(&self) -> bool {
        self.argmax().map_or(false, |(i, j)| {
            i > 0 && j > 0 && i + 1 < self.tau_c.len() && j + 1 < self.tau_p.len()
        })
    }

    pub fn present(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_some()).count()
    }
}

pub fn free_time_sweep(coeffs: &CycleCoefficients, tau_c: &[f64], tau_p: &[f64]) -> Result<FreeTimeSweep> {
    for (name, g) in [("tau_c grid", tau_c), ("tau_p grid", tau_p)] {
        if g.is_empty() || g.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::invalid(name, "must be non-empty with positive finite entries"));
        }
    }
    let values = tau_c
        .par_iter()
        .map(|&tc| {
            tau_p
                .iter()
                .map(|&tp| {
                    let th = coeffs.balanced_tau_h(tc, tp)?;
                    let m = coeffs.metrics(&PerReservoir::new(tc, th, tp)).ok()?;
                    Some(FreeTimePoint {
                        tau_h: th,
                        cooling_rate: m.cooling_rate,
                        psi: m.psi,
                        work_residual: m.work_residual,
                    })
                })
                .collect()
        })
        .collect();
    Ok(FreeTimeSweep {
        tau_c: tau_c.to_vec(),
        tau_p: tau_p.to_vec(),
        values,
    })
}
