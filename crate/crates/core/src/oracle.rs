//! Direct integration of the time-dependent master equation along one
//! branch, used to audit the slow-driving heats.
//!
//! Classic fixed-step RK4 with the generator rebuilt at every stage. Heat is
//! `∫ Tr[H 𝓛ρ] dt`, integrated from the sampled trajectory with Simpson's rule.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{self, DensityVector};
use crate::numerics::{linspace, simpson};
use crate::protocol::BranchProtocol;
use crate::thermo::check_tau;

pub const MIN_STEPS: usize = 1000;

/// Positivity slack tolerated during integration before the step size is
/// declared too coarse.
const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    #[serde(skip)]
    pub state: DensityVector,
    pub omega: f64,
    /// Mean energy `Tr[H ρ]`.
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub branch: BranchProtocol,
    pub tau: f64,
    pub samples: Vec<TrajectorySample>,
}

/// Fastest population relaxation rate `γ(2n+1)` over the branch, sampled.
pub fn max_relaxation_rate(branch: &BranchProtocol) -> Result<f64> {
    linspace(0.0, 1.0, 257).into_iter().try_fold(0.0f64, |acc, s| {
        let (g, n) = lindblad::rates(&branch.bath, branch.omega_at(s))?;
        Ok(acc.max(g * (2.0 * n + 1.0)))
    })
}

/// `max(1000, ⌈50 τ γ_max⌉)`, rounded up to an even count so Simpson's rule
/// applies without an end correction.
pub fn default_steps(branch: &BranchProtocol, tau: f64) -> Result<usize> {
    let n = (50.0 * tau * max_relaxation_rate(branch)?).ceil() as usize;
    let n = n.max(MIN_STEPS);
    Ok(n + n % 2)
}

fn generator(branch: &BranchProtocol, tau: f64, t: f64) -> Result<lindblad::Superoperator4> {
    let s = (t / tau).clamp(0.0, 1.0);
    lindblad::liouvillian(&branch.bath, branch.omega_at(s))
}

pub fn propagate(branch: &BranchProtocol, tau: f64, steps: usize, initial: DensityVector) -> Result<Trajectory> {
    check_tau(tau)?;
    if steps < MIN_STEPS {
        return Err(Error::TooFewSamples {
            got: steps,
            need: MIN_STEPS,
        });
    }
    initial.validate(1e-12)?;
    let h = tau / steps as f64;
    let sample = |t: f64, state: DensityVector| {
        let omega = branch.omega_at((t / tau).clamp(0.0, 1.0));
        TrajectorySample {
            t,
            state,
            omega,
            energy: state.energy(omega),
        }
    };
    let mut samples = Vec::with_capacity(steps + 1);
    let mut y = initial;
    samples.push(sample(0.0, y));
    for k in 0..steps {
        let t = k as f64 * h;
        let l_start = generator(branch, tau, t)?;
        let l_mid = generator(branch, tau, t + 0.5 * h)?;
        let l_end = generator(branch, tau, t + h)?;
        let k1 = l_start.apply(&y);
        let k2 = l_mid.apply(&(y + (0.5 * h) * k1));
        let k3 = l_mid.apply(&(y + (0.5 * h) * k2));
        let k4 = l_end.apply(&(y + h * k3));
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        y.validate(POSITIVITY_TOL).map_err(|e| {
            Error::InvalidState(format!("{e} at t = {}: reduce the step size", t + h))
        })?;
        let t_next = if k + 1 == steps { tau } else { (k + 1) as f64 * h };
        samples.push(sample(t_next, y));
    }
    Ok(Trajectory {
        branch: *branch,
        tau,
        samples,
    })
}

/// Heat `∫ Tr[H dρ/dt] dt` absorbed along a sampled trajectory.
pub fn heat_via_trajectory(trajectory: &Trajectory) -> Result<f64> {
    let samples = &trajectory.samples;
    if samples.len() < MIN_STEPS {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            need: MIN_STEPS,
        });
    }
    let flux = samples
        .iter()
        .map(|smp| {
            let l = lindblad::liouvillian(&trajectory.branch.bath, smp.omega)?;
            Ok(l.apply(&smp.state).energy(smp.omega))
        })
        .collect::<Result<Vec<f64>>>()?;
    let h = trajectory.tau / (samples.len() - 1) as f64;
    simpson(&flux, h).ok_or(Error::TooFewSamples {
        got: samples.len(),
        need: 3,
    })
}

impl Trajectory {
    pub fn heat(&self) -> Result<f64> {
        heat_via_trajectory(self)
    }

    pub fn final_state(&self) -> DensityVector {
        self.samples.last().expect("trajectory is never empty").state
    }
}

/// Branch started in its initial Gibbs state and integrated with
/// [`default_steps`].
pub fn propagate_from_equilibrium(branch: &BranchProtocol, tau: f64) -> Result<Trajectory> {
    let initial = lindblad::gibbs_state(branch.temperature(), branch.omega_at(0.0))?;
    propagate(branch, tau, default_steps(branch, tau)?, initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Bath, Reservoir, TricycleConfig, TricycleParams};
    use num_complex::Complex64 as C64;

    fn frozen() -> BranchProtocol {
        let bath = Bath { temperature: 0.4, gamma0: 1.0, alpha: 0.0 };
        BranchProtocol::frozen(Reservoir::Cold, bath, 0.9).unwrap()
    }

    #[test]
    fn equilibrium_is_stationary() {
        let b = frozen();
        let g = lindblad::gibbs_state(0.4, 0.9).unwrap();
        let tr = propagate(&b, 20.0, 1000, g).unwrap();
        for smp in &tr.samples {
            assert!(smp.state.max_distance(&g) < 1e-10);
        }
        assert!(tr.heat().unwrap().abs() < 1e-10);
    }

    #[test]
    fn relaxation_is_monotone() {
        let b = frozen();
        let g = lindblad::gibbs_state(0.4, 0.9).unwrap();
        let tr = propagate(&b, 10.0, 2000, DensityVector::diagonal(0.9)).unwrap();
        let dist: Vec<f64> = tr.samples.iter().map(|s| s.state.max_distance(&g)).collect();
        assert!(dist.windows(2).all(|w| w[1] < w[0]));
        assert!(dist[dist.len() - 1] < 1e-3 * dist[0]);
        for smp in &tr.samples {
            assert!((smp.state.trace() - 1.0).norm() < 1e-12);
            assert_eq!(smp.state.rho10, C64::default());
        }
    }

    #[test]
    fn slow_branch_ends_near_final_gibbs_state() {
        let cfg = TricycleConfig::new(TricycleParams::default()).unwrap();
        let b = cfg.branch(Reservoir::Cold);
        let tr = propagate_from_equilibrium(&b, 500.0).unwrap();
        let g = lindblad::gibbs_state(b.temperature(), b.omega_at(1.0)).unwrap();
        assert!(tr.final_state().max_distance(&g) < 1e-5);
    }

    #[test]
    fn coherences_rotate_and_decay() {
        let b = frozen();
        let mut init = DensityVector::diagonal(0.5);
        init.rho10 = C64::new(0.3, 0.0);
        init.rho01 = C64::new(0.3, 0.0);
        let tr = propagate(&b, 5.0, 4000, init).unwrap();
        let end = tr.final_state();
        assert!(end.rho10.norm() < 0.3);
        assert!((end.rho01 - end.rho10.conj()).norm() < 1e-12);
    }

    #[test]
    fn rejects_too_few_steps() {
        let g = lindblad::gibbs_state(0.4, 0.9).unwrap();
        assert!(matches!(propagate(&frozen(), 1.0, 10, g), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn steps_rule() {
        let b = frozen();
        assert_eq!(default_steps(&b, 1.0).unwrap(), 1000);
        let n = default_steps(&b, 400.0).unwrap();
        assert!(n % 2 == 0 && n > 1000);
    }
}
