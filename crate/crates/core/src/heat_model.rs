//! Interchangeable ways of computing the heat a branch draws from its bath.
//!
//! * `slow-driving`: first-order slow-driving expansion, `Q = T ΔS + T Σ / τ`.
//! * `master-equation`: RK4 integration of the full master equation from
//!   the branch's initial Gibbs state. Its `Q1` is whatever is left after
//!   subtracting `Q0`, and `Sigma` is the matching `τ Q1 / T`.

use crate::error::Result;
use crate::numerics::CompositeGaussLegendre;
use crate::oracle;
use crate::protocol::BranchProtocol;
use crate::registry::{Named, Registry};
use crate::thermo::{self, BranchThermo};

pub trait HeatModel: Named + Send + Sync {
    fn description(&self) -> &'static str;

    fn branch_heat(&self, branch: &BranchProtocol, tau: f64) -> Result<BranchThermo>;
}

#[derive(Debug, Clone, Default)]
pub struct SlowDriving {
    pub quadrature: CompositeGaussLegendre,
}

impl Named for SlowDriving {
    fn name(&self) -> &'static str {
        "slow-driving"
    }
}

impl HeatModel for SlowDriving {
    fn description(&self) -> &'static str {
        "first-order slow-driving expansion (closed-form dissipation coefficient)"
    }

    fn branch_heat(&self, branch: &BranchProtocol, tau: f64) -> Result<BranchThermo> {
        thermo::branch_heat(branch, tau, &self.quadrature)
    }
}

/// Master-equation integration; `steps = None` uses [`oracle::default_steps`].
#[derive(Debug, Clone, Default)]
pub struct MasterEquation {
    pub steps: Option<usize>,
}

impl Named for MasterEquation {
    fn name(&self) -> &'static str {
        "master-equation"
    }
}

impl HeatModel for MasterEquation {
    fn description(&self) -> &'static str {
        "RK4 integration of the full master equation from the initial Gibbs state"
    }

    fn branch_heat(&self, branch: &BranchProtocol, tau: f64) -> Result<BranchThermo> {
        let steps = match self.steps {
            Some(n) => n,
            None => oracle::default_steps(branch, tau)?,
        };
        let initial = crate::lindblad::gibbs_state(branch.temperature(), branch.omega_at(0.0))?;
        let q = oracle::propagate(branch, tau, steps, initial)?.heat()?;
        let t = branch.temperature();
        let d_s = thermo::branch_entropy_change(branch)?;
        let q0 = t * d_s;
        let q1 = q - q0;
        Ok(BranchThermo {
            reservoir: branch.reservoir,
            temperature: t,
            tau,
            d_s_eq: d_s,
            sigma: tau * q1 / t,
            q0,
            q1,
            q,
        })
    }
}

pub fn heat_models() -> Registry<dyn HeatModel> {
    let mut reg: Registry<dyn HeatModel> = Registry::new("heat model");
    reg.register(Box::new(SlowDriving::default()))
        .register(Box::new(MasterEquation::default()));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Reservoir, TricycleConfig, TricycleParams};

    #[test]
    fn registry_names() {
        let reg = heat_models();
        assert_eq!(reg.names(), vec!["slow-driving", "master-equation"]);
        assert!(reg.get("nope").is_err());
    }

    #[test]
    fn models_agree_for_slow_branches() {
        let cfg = TricycleConfig::new(TricycleParams::default()).unwrap();
        let reg = heat_models();
        let b = cfg.branch(Reservoir::Hot);
        let a = reg.get("slow-driving").unwrap().branch_heat(&b, 200.0).unwrap();
        let m = reg.get("master-equation").unwrap().branch_heat(&b, 200.0).unwrap();
        assert_eq!(a.q0, m.q0);
        assert!((a.q - m.q).abs() < 0.01 * a.q.abs());
        assert!((a.sigma - m.sigma).abs() < 0.05 * a.sigma.abs());
    }
}
