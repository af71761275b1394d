//! Branch thermodynamics in the slow-driving regime.
//!
//! The state along a branch of duration `τ` is the instantaneous Gibbs state
//! plus a `1/τ` lag, `ρ(s) = ρ_eq(s) + τ⁻¹ L⁻¹(s) ∂_s ρ_eq(s)`, with `L⁻¹`
//! the Drazin inverse of the generator. The heat drawn from the bath splits
//! into a quasi-static part `Q⁰ = T ΔS_eq` and a first-order correction
//! `Q¹ = T Σ / τ`.
//!
//! Integrating the correction by parts, and using `ω′(0) = ω′(1) = 0`, gives
//!
//! ```text
//! Σ = −β² ∫₀¹ ω′(s)² n(n+1) / (γ (2n+1)³) ds ≤ 0
//! ```
//!
//! which is what [`sigma_coefficient`] evaluates.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{self, DensityVector};
use crate::numerics::{linspace, CompositeGaussLegendre};
use crate::protocol::{BranchProtocol, PerReservoir, Reservoir, TricycleConfig};

/// Per-branch heat bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchThermo {
    pub reservoir: Reservoir,
    pub temperature: f64,
    pub tau: f64,
    #[serde(rename = "dS_eq")]
    pub d_s_eq: f64,
    #[serde(rename = "Sigma")]
    pub sigma: f64,
    #[serde(rename = "Q0")]
    pub q0: f64,
    #[serde(rename = "Q1")]
    pub q1: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

impl BranchThermo {
    pub fn from_coefficients(reservoir: Reservoir, temperature: f64, tau: f64, d_s_eq: f64, sigma: f64) -> Self {
        let q0 = temperature * d_s_eq;
        let q1 = temperature * sigma / tau;
        Self {
            reservoir,
            temperature,
            tau,
            d_s_eq,
            sigma,
            q0,
            q1,
            q: q0 + q1,
        }
    }
}

/// Binary entropy `−p ln p − (1−p) ln(1−p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    let a = if p > 0.0 { -p * p.ln() } else { 0.0 };
    let b = if p < 1.0 { -(1.0 - p) * (-p).ln_1p() } else { 0.0 };
    a + b
}

pub fn equilibrium_entropy(temperature: f64, omega: f64) -> Result<f64> {
    Ok(binary_entropy(lindblad::thermal_excitation(temperature, omega)?))
}

/// `S_eq(ω(1)) − S_eq(ω(0))`.
pub fn branch_entropy_change(branch: &BranchProtocol) -> Result<f64> {
    let t = branch.temperature();
    Ok(equilibrium_entropy(t, branch.omega_at(1.0))? - equilibrium_entropy(t, branch.omega_at(0.0))?)
}

/// Integrand of the closed-form dissipation coefficient, without the `−β²`.
fn sigma_integrand(branch: &BranchProtocol, s: f64) -> f64 {
    let w = branch.omega_at(s);
    let dw = branch.omega_prime_at(s);
    if dw == 0.0 {
        return 0.0;
    }
    let n = 1.0 / (w / branch.bath.temperature).exp_m1();
    let gamma = branch.bath.gamma0 * w.powf(branch.bath.alpha);
    let z = 2.0 * n + 1.0;
    dw * dw * n * (n + 1.0) / (gamma * z * z * z)
}

/// Dissipation coefficient `Σ` of a branch (dimensionless, `≤ 0`).
pub fn sigma_coefficient(branch: &BranchProtocol, quadrature: &CompositeGaussLegendre) -> Result<f64> {
    let beta = 1.0 / branch.temperature();
    let integral = quadrature.integrate(|s| sigma_integrand(branch, s), 0.0, 1.0)?;
    Ok(-beta * beta * integral)
}

pub fn branch_heat(branch: &BranchProtocol, tau: f64, quadrature: &CompositeGaussLegendre) -> Result<BranchThermo> {
    check_tau(tau)?;
    let d_s = branch_entropy_change(branch)?;
    let sigma = sigma_coefficient(branch, quadrature)?;
    Ok(BranchThermo::from_coefficients(branch.reservoir, branch.temperature(), tau, d_s, sigma))
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "tau",
            value: tau,
            domain: "(0, ∞)",
        })
    }
}

/// `∂_s ρ_eq` along the branch, from `dn/dx = −n(n+1)` with `x = βω`.
pub fn equilibrium_derivative(branch: &BranchProtocol, s: f64) -> Result<DensityVector> {
    let t = branch.temperature();
    let w = branch.frequency(s)?;
    let n = lindblad::bose_occupation(t, w)?;
    let z = 2.0 * n + 1.0;
    let dn_ds = -n * (n + 1.0) * branch.omega_prime_at(s) / t;
    let d_excited = dn_ds / (z * z);
    Ok(DensityVector::from_array([
        C64::new(d_excited, 0.0),
        C64::default(),
        C64::default(),
        C64::new(-d_excited, 0.0),
    ]))
}

/// First-order slow-driving state at rescaled time `s`.
///
/// Fails with [`Error::InvalidState`] if the lag pushes a population out of
/// `[0, 1]`, which means `τ` is too short for the expansion.
pub fn perturbed_state(branch: &BranchProtocol, s: f64, tau: f64) -> Result<DensityVector> {
    check_tau(tau)?;
    let w = branch.frequency(s)?;
    let eq = lindblad::gibbs_state(branch.temperature(), w)?;
    let lag = lindblad::drazin_inverse(&branch.bath, w)?.apply(&equilibrium_derivative(branch, s)?);
    let state = eq + (1.0 / tau) * lag;
    state.validate(1e-12).map_err(|e| match e {
        Error::InvalidState(msg) => Error::InvalidState(format!("{msg} at s = {s}, tau = {tau}: tau is too short for the slow-driving expansion")),
        other => other,
    })?;
    Ok(state)
}

/// Temperature inferred from the population ratio; negative when the
/// populations are inverted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveTemperature {
    pub value: f64,
    pub inverted: bool,
}

pub fn effective_temperature(state: &DensityVector, omega: f64) -> Result<EffectiveTemperature> {
    if !(omega > 0.0) {
        return Err(Error::Domain {
            what: "omega",
            value: omega,
            domain: "(0, ∞)",
        });
    }
    let (p1, p0) = (state.excited(), state.ground());
    if p1 == p0 {
        return Err(Error::InfiniteTemperature);
    }
    let value = omega / (p0 / p1).ln();
    Ok(EffectiveTemperature {
        value,
        inverted: p1 > p0,
    })
}

/// Where a point of the temperature-entropy diagram sits in the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    Branch { reservoir: Reservoir },
    Quench { from: Reservoir, to: Reservoir },
}

impl Segment {
    pub fn label(&self) -> String {
        match self {
            Segment::Branch { reservoir } => reservoir.label().to_string(),
            Segment::Quench { from, to } => format!("{}->{}", from.label(), to.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TsPoint {
    pub segment: Segment,
    pub s: f64,
    pub omega: f64,
    pub t_eff: f64,
    pub entropy: f64,
}

/// Temperature-entropy path of one cycle. Each branch contributes
/// `samples_per_branch` points of the perturbed state; each quench adds the
/// point right after the frequency jump (same populations, new `ω`).
pub fn ts_trajectory(
    config: &TricycleConfig,
    taus: &PerReservoir<f64>,
    samples_per_branch: usize,
) -> Result<Vec<TsPoint>> {
    if samples_per_branch < 2 {
        return Err(Error::TooFewSamples {
            got: samples_per_branch,
            need: 2,
        });
    }
    let mut out = Vec::with_capacity(3 * (samples_per_branch + 1));
    for r in Reservoir::CYCLE {
        let branch = config.branch(r);
        let mut last = None;
        for s in linspace(0.0, 1.0, samples_per_branch) {
            let state = perturbed_state(&branch, s, taus[r])?;
            let omega = branch.omega_at(s);
            out.push(TsPoint {
                segment: Segment::Branch { reservoir: r },
                s,
                omega,
                t_eff: effective_temperature(&state, omega)?.value,
                entropy: state.von_neumann_entropy(),
            });
            last = Some(state);
        }
        let state = last.expect("at least two samples");
        let next = config.branch(r.next());
        let omega = next.omega_at(0.0);
        out.push(TsPoint {
            segment: Segment::Quench { from: r, to: r.next() },
            s: 1.0,
            omega,
            t_eff: effective_temperature(&state, omega)?.value,
            entropy: state.von_neumann_entropy(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Bath, TricycleParams};

    fn defaults() -> TricycleConfig {
        TricycleConfig::new(TricycleParams::default()).unwrap()
    }

    #[test]
    fn entropy_limits() {
        assert!(equilibrium_entropy(1.0, 60.0).unwrap() < 1e-20);
        assert!((equilibrium_entropy(1.0, 1e-9).unwrap() - 2f64.ln()).abs() < 1e-12);
        // binary entropy at p = 1/3
        let expect = 3f64.ln() - 2.0 / 3.0 * 2f64.ln();
        assert!((equilibrium_entropy(1.0, 2f64.ln()).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.63651).abs() < 1e-5);
    }

    #[test]
    fn entropy_change_signs() {
        let cfg = defaults();
        assert!(branch_entropy_change(&cfg.branch(Reservoir::Cold)).unwrap() > 0.0);
        assert!(branch_entropy_change(&cfg.branch(Reservoir::Hot)).unwrap() > 0.0);
        assert!(branch_entropy_change(&cfg.branch(Reservoir::Pump)).unwrap() < 0.0);
        let bath = Bath { temperature: 0.3, gamma0: 1.0, alpha: 0.0 };
        let frozen = BranchProtocol::frozen(Reservoir::Cold, bath, 0.9).unwrap();
        assert_eq!(branch_entropy_change(&frozen).unwrap(), 0.0);
    }

    #[test]
    fn frozen_branch_has_no_dissipation() {
        let bath = Bath { temperature: 0.3, gamma0: 1.0, alpha: 0.5 };
        let frozen = BranchProtocol::frozen(Reservoir::Hot, bath, 0.9).unwrap();
        assert_eq!(sigma_coefficient(&frozen, &CompositeGaussLegendre::default()).unwrap(), 0.0);
    }

    #[test]
    fn heat_scaling_in_tau() {
        let q = CompositeGaussLegendre::default();
        let b = defaults().branch(Reservoir::Cold);
        let slow = branch_heat(&b, 1e9, &q).unwrap();
        assert!(slow.q1.abs() < 1e-8 * slow.q0.abs());
        let a = branch_heat(&b, 9.0, &q).unwrap();
        let half = branch_heat(&b, 4.5, &q).unwrap();
        assert_eq!(half.q1, 2.0 * a.q1);
        assert!(a.q < a.q0);
        assert!((a.q0 - a.temperature * a.d_s_eq).abs() <= 1e-12 * a.q0.abs());
        assert!((a.q1 - a.temperature * a.sigma / a.tau).abs() <= 1e-12 * a.q1.abs());
    }

    #[test]
    fn perturbed_state_endpoints_are_gibbs() {
        let cfg = defaults();
        for r in Reservoir::CYCLE {
            let b = cfg.branch(r);
            for s in [0.0, 1.0] {
                let st = perturbed_state(&b, s, 7.0).unwrap();
                let g = lindblad::gibbs_state(b.temperature(), b.omega_at(s)).unwrap();
                assert!(st.max_distance(&g) < 1e-15);
            }
        }
    }

    #[test]
    fn perturbed_state_lag_decays_as_inverse_tau() {
        let b = defaults().branch(Reservoir::Pump);
        let lag = |tau: f64| {
            linspace(0.0, 1.0, 101)
                .into_iter()
                .map(|s| {
                    let g = lindblad::gibbs_state(b.temperature(), b.omega_at(s)).unwrap();
                    perturbed_state(&b, s, tau).unwrap().max_distance(&g)
                })
                .fold(0.0, f64::max)
        };
        let (a, c) = (lag(10.0), lag(1000.0));
        assert!(a > 0.0);
        assert!((a / c - 100.0).abs() < 1e-9 * 100.0);
    }

    #[test]
    fn perturbed_state_trace_and_coherences() {
        let b = defaults().branch(Reservoir::Hot);
        for s in linspace(0.0, 1.0, 37) {
            let st = perturbed_state(&b, s, 5.0).unwrap();
            assert!((st.trace() - 1.0).norm() < 1e-12);
            assert_eq!(st.rho10, C64::default());
        }
    }

    #[test]
    fn too_short_tau_is_reported() {
        let b = defaults().branch(Reservoir::Pump);
        let err = (1..200)
            .map(|k| 1e-3 * k as f64)
            .find_map(|tau| perturbed_state(&b, 0.5, tau).err())
            .expect("tiny tau breaks positivity");
        assert!(matches!(err, Error::InvalidState(_)));
    }

    #[test]
    fn effective_temperature_cases() {
        let g = lindblad::gibbs_state(0.37, 1.3).unwrap();
        assert!((effective_temperature(&g, 1.3).unwrap().value - 0.37).abs() < 1e-12);
        assert_eq!(effective_temperature(&DensityVector::diagonal(0.5), 1.0), Err(Error::InfiniteTemperature));
        let t = effective_temperature(&DensityVector::diagonal(1.0 / 3.0), 1.0).unwrap();
        assert!((t.value - 1.0 / 2f64.ln()).abs() < 1e-12);
        let inv = effective_temperature(&DensityVector::diagonal(0.8), 1.0).unwrap();
        assert!(inv.inverted && inv.value < 0.0);
    }

    #[test]
    fn ts_quench_continuity() {
        let cfg = defaults();
        let taus = PerReservoir::new(9.0, 8.0, 11.0);
        let pts = ts_trajectory(&cfg, &taus, 21).unwrap();
        assert_eq!(pts.len(), 3 * 22);
        for (i, p) in pts.iter().enumerate() {
            if let Segment::Quench { from, to } = p.segment {
                let before = &pts[i - 1];
                assert!((p.entropy - before.entropy).abs() < 1e-10);
                let ratio = cfg.temperatures()[to] / cfg.temperatures()[from];
                assert!((p.t_eff / before.t_eff - ratio).abs() < 1e-10 * ratio);
                if to != Reservoir::Cold {
                    let after = &pts[i + 1];
                    assert!((after.entropy - p.entropy).abs() < 1e-10);
                    assert!((after.t_eff - p.t_eff).abs() < 1e-10);
                }
            }
        }
        let first = pts[0];
        let last = pts[pts.len() - 1];
        assert!((first.entropy - last.entropy).abs() < 1e-10);
        assert!((first.t_eff - last.t_eff).abs() < 1e-10);
    }

    #[test]
    fn ts_rejects_single_sample() {
        let taus = PerReservoir::new(9.0, 8.0, 11.0);
        assert!(ts_trajectory(&defaults(), &taus, 1).is_err());
    }
}
