//! Six-step cycle assembly: three heat-exchange branches joined by
//! instantaneous, population-preserving quenches that carry no heat and take
//! no time. Any net work shows up in `work_residual`; nothing here forces the
//! heats to balance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::heat_model::HeatModel;
use crate::numerics::{bisect, linspace, CompositeGaussLegendre};
use crate::protocol::{PerReservoir, Reservoir, TricycleConfig, TricycleParams};
use crate::thermo::{self, check_tau, BranchThermo};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleMetrics {
    pub branches: PerReservoir<BranchThermo>,
    /// COP `Q_c / Q_h`.
    pub psi: f64,
    /// Cooling rate `Q_c / (τ_c + τ_h + τ_p)`.
    #[serde(rename = "R")]
    pub cooling_rate: f64,
    /// Figure of merit `ψ R`.
    pub chi: f64,
    pub work_residual: f64,
    pub entropy_production: f64,
    pub total_time: f64,
}

impl CycleMetrics {
    /// Fails with [`Error::NotRefrigerator`] when `Q_h ≤ 0`.
    pub fn from_branches(branches: PerReservoir<BranchThermo>) -> Result<Self> {
        let (c, h, p) = (&branches.c, &branches.h, &branches.p);
        if !(h.q > 0.0) {
            return Err(Error::NotRefrigerator { q_c: c.q, q_h: h.q });
        }
        let total_time = c.tau + h.tau + p.tau;
        let psi = c.q / h.q;
        let cooling_rate = c.q / total_time;
        Ok(Self {
            branches,
            psi,
            cooling_rate,
            chi: psi * cooling_rate,
            work_residual: -(c.q + h.q + p.q),
            entropy_production: -(c.q / c.temperature + h.q / h.temperature + p.q / p.temperature),
            total_time,
        })
    }

    pub fn taus(&self) -> PerReservoir<f64> {
        self.branches.map(|b| b.tau)
    }

    pub fn heats(&self) -> PerReservoir<f64> {
        self.branches.map(|b| b.q)
    }

    /// `Q_c + Q_h + Q_p`.
    pub fn heat_sum(&self) -> f64 {
        -self.work_residual
    }
}

/// τ-independent part of the slow-driving heats: per branch, `T`, `ΔS_eq`
/// and `Σ`. Everything the time-allocation optimizer needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleCoefficients {
    pub temperature: PerReservoir<f64>,
    pub d_s: PerReservoir<f64>,
    pub sigma: PerReservoir<f64>,
}

impl CycleCoefficients {
    pub fn new(config: &TricycleConfig, quadrature: &CompositeGaussLegendre) -> Result<Self> {
        let branches = config.branches();
        Ok(Self {
            temperature: config.temperatures(),
            d_s: PerReservoir::try_from_fn(|r| thermo::branch_entropy_change(&branches[r]))?,
            sigma: PerReservoir::try_from_fn(|r| thermo::sigma_coefficient(&branches[r], quadrature))?,
        })
    }

    /// `Σ_v T_v ΔS_eq,v`.
    pub fn zeroth_heat_sum(&self) -> f64 {
        Reservoir::CYCLE.iter().map(|&r| self.temperature[r] * self.d_s[r]).sum()
    }

    pub fn branch(&self, r: Reservoir, tau: f64) -> BranchThermo {
        BranchThermo::from_coefficients(r, self.temperature[r], tau, self.d_s[r], self.sigma[r])
    }

    pub fn metrics(&self, taus: &PerReservoir<f64>) -> Result<CycleMetrics> {
        for (_, &t) in taus.iter() {
            check_tau(t)?;
        }
        CycleMetrics::from_branches(PerReservoir::from_fn(|r| self.branch(r, taus[r])))
    }

    /// Hot-branch duration that makes the three heats sum to zero,
    /// `τ_h = −T_h Σ_h / (T_p(ΔS_p + Σ_p/τ_p) + T_c(ΔS_c + Σ_c/τ_c) + T_h ΔS_h)`.
    /// `None` when the denominator is not positive.
    pub fn balanced_tau_h(&self, tau_c: f64, tau_p: f64) -> Option<f64> {
        let (t, d, s) = (&self.temperature, &self.d_s, &self.sigma);
        let denom = t.p * (d.p + s.p / tau_p) + t.c * (d.c + s.c / tau_c) + t.h * d.h;
        if denom > 0.0 {
            Some(-t.h * s.h / denom)
        } else {
            None
        }
    }
}

/// Cycle metrics from the slow-driving heats with the default quadrature.
pub fn evaluate_cycle(config: &TricycleConfig, taus: &PerReservoir<f64>) -> Result<CycleMetrics> {
    CycleCoefficients::new(config, &CompositeGaussLegendre::default())?.metrics(taus)
}

pub fn evaluate_cycle_with(
    config: &TricycleConfig,
    taus: &PerReservoir<f64>,
    model: &dyn HeatModel,
) -> Result<CycleMetrics> {
    let branches = PerReservoir::try_from_fn(|r| model.branch_heat(&config.branch(r), taus[r]))?;
    CycleMetrics::from_branches(branches)
}

/// Quasi-static COP bound `T_c(T_h − T_p) / (T_h(T_p − T_c))`, evaluated in
/// the equivalent ratio form `(1 − T_p/T_h) / (T_p/T_c − 1)`.
pub fn reversible_cop(t_c: f64, t_h: f64, t_p: f64) -> Result<f64> {
    if !(t_c > 0.0 && t_c < t_p && t_p < t_h && t_h.is_finite()) {
        return Err(Error::invalid(
            "t_p",
            format!("temperatures must satisfy 0 < t_c < t_p < t_h, got t_c={t_c}, t_p={t_p}, t_h={t_h}"),
        ));
    }
    Ok((1.0 - t_p / t_h) / (t_p / t_c - 1.0))
}

/// `Σ_v T_v ΔS_eq,v` for a configuration.
pub fn zeroth_heat_sum(config: &TricycleConfig) -> Result<f64> {
    let temps = config.temperatures();
    Reservoir::CYCLE.iter().try_fold(0.0, |acc, &r| {
        Ok(acc + temps[r] * thermo::branch_entropy_change(&config.branch(r))?)
    })
}

pub fn zeroth_heat_sum_curve(params: &TricycleParams, delta_c: &[f64]) -> Result<Vec<(f64, f64)>> {
    delta_c
        .iter()
        .map(|&d| {
            let cfg = TricycleConfig::new(TricycleParams { delta_c: d, ..*params })?;
            Ok((d, zeroth_heat_sum(&cfg)?))
        })
        .collect()
}

/// Bracketing scan used by [`reversible_amplitude`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeScan {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for AmplitudeScan {
    fn default() -> Self {
        Self {
            lo: 0.01,
            hi: 2.0,
            points: 400,
        }
    }
}

/// Amplitude `δ_c,r` at which the zeroth-order heats sum to zero. Above it
/// the sum is positive and the cycle can only be balanced at finite times.
pub fn reversible_amplitude(params: &TricycleParams) -> Result<f64> {
    reversible_amplitude_with(params, AmplitudeScan::default())
}

pub fn reversible_amplitude_with(params: &TricycleParams, scan: AmplitudeScan) -> Result<f64> {
    let curve = zeroth_heat_sum_curve(params, &linspace(scan.lo, scan.hi, scan.points))?;
    let bracket = curve.windows(2).find(|w| w[0].1 <= 0.0 && w[1].1 > 0.0);
    let Some(w) = bracket else {
        return Err(Error::NoSignChange {
            lo: scan.lo,
            hi: scan.hi,
            scanned: curve,
        });
    };
    let f = |d: f64| {
        TricycleConfig::new(TricycleParams { delta_c: d, ..*params })
            .and_then(|cfg| zeroth_heat_sum(&cfg))
            .unwrap_or(f64::NAN)
    };
    // Bisect to the floating-point limit: the root residual must land well
    // under 1e-10, which a 1e-8 bracket alone does not guarantee.
    bisect(f, w[0].0, w[1].0, 0.0).ok_or(Error::NoSignChange {
        lo: w[0].0,
        hi: w[1].0,
        scanned: curve,
    })
}
