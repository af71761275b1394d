//! Cosine frequency schedules of the three heat-exchange branches and the
//! parameter linkage that keeps `βω` continuous across the diabatic quenches.
//!
//! Natural units throughout: `ħ = k_B = 1`.

use std::f64::consts::PI;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Heat reservoir a branch couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reservoir {
    #[serde(rename = "c")]
    Cold,
    #[serde(rename = "h")]
    Hot,
    #[serde(rename = "p")]
    Pump,
}

impl Reservoir {
    /// Branch order within one cycle: c, then h, then p, then back to c.
    pub const CYCLE: [Reservoir; 3] = [Reservoir::Cold, Reservoir::Hot, Reservoir::Pump];

    pub fn label(self) -> &'static str {
        match self {
            Reservoir::Cold => "c",
            Reservoir::Hot => "h",
            Reservoir::Pump => "p",
        }
    }

    pub fn next(self) -> Reservoir {
        match self {
            Reservoir::Cold => Reservoir::Hot,
            Reservoir::Hot => Reservoir::Pump,
            Reservoir::Pump => Reservoir::Cold,
        }
    }

    pub fn phase(self) -> Phase {
        match self {
            Reservoir::Pump => Phase::Increasing,
            _ => Phase::Decreasing,
        }
    }
}

/// Orientation of the cosine drive over rescaled time `s ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    /// `cos(πs)`: frequency falls from its maximum to its minimum.
    Decreasing,
    /// `cos(π(1 − s))`: frequency rises from its minimum to its maximum.
    Increasing,
}

/// One value per reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerReservoir<T> {
    pub c: T,
    pub h: T,
    pub p: T,
}

impl<T> PerReservoir<T> {
    pub fn new(c: T, h: T, p: T) -> Self {
        Self { c, h, p }
    }

    pub fn from_fn(mut f: impl FnMut(Reservoir) -> T) -> Self {
        Self {
            c: f(Reservoir::Cold),
            h: f(Reservoir::Hot),
            p: f(Reservoir::Pump),
        }
    }

    pub fn try_from_fn<E>(mut f: impl FnMut(Reservoir) -> Result<T, E>) -> Result<Self, E> {
        Ok(Self {
            c: f(Reservoir::Cold)?,
            h: f(Reservoir::Hot)?,
            p: f(Reservoir::Pump)?,
        })
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerReservoir<U> {
        PerReservoir {
            c: f(&self.c),
            h: f(&self.h),
            p: f(&self.p),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Reservoir, &T)> {
        [(Reservoir::Cold, &self.c), (Reservoir::Hot, &self.h), (Reservoir::Pump, &self.p)].into_iter()
    }
}

impl<T> Index<Reservoir> for PerReservoir<T> {
    type Output = T;

    fn index(&self, r: Reservoir) -> &T {
        match r {
            Reservoir::Cold => &self.c,
            Reservoir::Hot => &self.h,
            Reservoir::Pump => &self.p,
        }
    }
}

impl<T> IndexMut<Reservoir> for PerReservoir<T> {
    fn index_mut(&mut self, r: Reservoir) -> &mut T {
        match r {
            Reservoir::Cold => &mut self.c,
            Reservoir::Hot => &mut self.h,
            Reservoir::Pump => &mut self.p,
        }
    }
}

/// Independent model parameters. `delta_c` is the single free amplitude;
/// the pump displacement and the hot/pump amplitudes are derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TricycleParams {
    pub t_c: f64,
    pub t_h: f64,
    pub t_p: f64,
    pub zeta_c: f64,
    pub zeta_h: f64,
    pub delta_c: f64,
    pub gamma0: f64,
    pub alpha: f64,
}

impl Default for TricycleParams {
    fn default() -> Self {
        Self {
            t_c: 0.2,
            t_h: 1.0,
            t_p: 0.5,
            zeta_c: 2.0,
            zeta_h: 2.0,
            delta_c: 0.5333,
            gamma0: 1.0,
            alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkedParams {
    pub zeta_p: f64,
    pub delta_h: f64,
    pub delta_p: f64,
}

fn check_temperatures(t_c: f64, t_h: f64, t_p: f64) -> Result<()> {
    for (name, t) in [("t_c", t_c), ("t_h", t_h), ("t_p", t_p)] {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid(name, format!("temperature must be finite and > 0, got {t}")));
        }
    }
    if !(t_c < t_p && t_p < t_h) {
        return Err(Error::invalid(
            "t_p",
            format!("temperatures must satisfy t_c < t_p < t_h, got t_c={t_c}, t_p={t_p}, t_h={t_h}"),
        ));
    }
    Ok(())
}

/// Pump displacement and hot/pump amplitudes that make each quench preserve
/// `βω`, i.e. `ω_c(τ_c)/T_c = ω_h(0)/T_h`, `ω_h(τ_h)/T_h = ω_p(0)/T_p` and
/// `ω_p(τ_p)/T_p = ω_c(0)/T_c`.
pub fn derive_linked_params(
    t_c: f64,
    t_h: f64,
    t_p: f64,
    zeta_c: f64,
    zeta_h: f64,
    delta_c: f64,
) -> Result<LinkedParams> {
    check_temperatures(t_c, t_h, t_p)?;
    if !(zeta_c > 1.0 && zeta_c.is_finite()) {
        return Err(Error::invalid("zeta_c", format!("must be finite and > 1 so that ω_c stays positive, got {zeta_c}")));
    }
    if !(zeta_h > 1.0 && zeta_h.is_finite()) {
        return Err(Error::invalid("zeta_h", format!("must be finite and > 1 so that ω_h stays positive, got {zeta_h}")));
    }
    if !(delta_c > 0.0 && delta_c.is_finite()) {
        return Err(Error::invalid("delta_c", format!("must be finite and > 0, got {delta_c}")));
    }
    Ok(LinkedParams {
        zeta_p: (1.0 + zeta_c * zeta_h) / (zeta_c + zeta_h),
        delta_h: t_h * (zeta_c - 1.0) / (t_c * (1.0 + zeta_h)) * delta_c,
        delta_p: t_p * (zeta_c + zeta_h) / (t_c * (1.0 + zeta_h)) * delta_c,
    })
}

/// Bath seen by one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bath {
    pub temperature: f64,
    pub gamma0: f64,
    pub alpha: f64,
}

/// Validated parameter set with its linked parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TricycleConfig {
    params: TricycleParams,
    linked: LinkedParams,
}

impl TricycleConfig {
    pub fn new(params: TricycleParams) -> Result<Self> {
        let p = params;
        let linked = derive_linked_params(p.t_c, p.t_h, p.t_p, p.zeta_c, p.zeta_h, p.delta_c)?;
        if !(p.gamma0 > 0.0 && p.gamma0.is_finite()) {
            return Err(Error::invalid("gamma0", format!("must be finite and > 0, got {}", p.gamma0)));
        }
        if !p.alpha.is_finite() {
            return Err(Error::invalid("alpha", format!("must be finite, got {}", p.alpha)));
        }
        Ok(Self { params, linked })
    }

    pub fn params(&self) -> &TricycleParams {
        &self.params
    }

    pub fn linked(&self) -> &LinkedParams {
        &self.linked
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(TricycleParams { alpha, ..self.params })
    }

    pub fn with_delta_c(&self, delta_c: f64) -> Result<Self> {
        Self::new(TricycleParams { delta_c, ..self.params })
    }

    pub fn temperatures(&self) -> PerReservoir<f64> {
        PerReservoir::new(self.params.t_c, self.params.t_h, self.params.t_p)
    }

    pub fn bath(&self, r: Reservoir) -> Bath {
        Bath {
            temperature: self.temperatures()[r],
            gamma0: self.params.gamma0,
            alpha: self.params.alpha,
        }
    }

    pub fn branch(&self, r: Reservoir) -> BranchProtocol {
        let (delta, zeta) = match r {
            Reservoir::Cold => (self.params.delta_c, self.params.zeta_c),
            Reservoir::Hot => (self.linked.delta_h, self.params.zeta_h),
            Reservoir::Pump => (self.linked.delta_p, self.linked.zeta_p),
        };
        BranchProtocol {
            reservoir: r,
            bath: self.bath(r),
            amplitude: delta,
            offset: delta * zeta,
            phase: r.phase(),
        }
    }

    pub fn branches(&self) -> PerReservoir<BranchProtocol> {
        PerReservoir::from_fn(|r| self.branch(r))
    }
}

/// One heat-exchange branch: `ω(s) = offset + amplitude · cos(πs)` (or
/// `cos(π(1 − s))` for an increasing drive), with `offset = δζ`.
///
/// Storing the offset rather than `ζ` lets a frozen branch (`δ = 0`, constant
/// frequency) be represented with the same formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchProtocol {
    pub reservoir: Reservoir,
    pub bath: Bath,
    amplitude: f64,
    offset: f64,
    pub phase: Phase,
}

fn check_s(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "s",
            value: s,
            domain: "[0, 1]",
        })
    }
}

fn check_bath(bath: &Bath) -> Result<()> {
    if !(bath.temperature > 0.0 && bath.temperature.is_finite()) {
        return Err(Error::invalid("temperature", format!("must be finite and > 0, got {}", bath.temperature)));
    }
    if !(bath.gamma0 > 0.0 && bath.gamma0.is_finite()) {
        return Err(Error::invalid("gamma0", format!("must be finite and > 0, got {}", bath.gamma0)));
    }
    if !bath.alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("must be finite, got {}", bath.alpha)));
    }
    Ok(())
}

impl BranchProtocol {
    pub fn new(reservoir: Reservoir, bath: Bath, delta: f64, zeta: f64, phase: Phase) -> Result<Self> {
        check_bath(&bath)?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid("delta", format!("must be finite and > 0, got {delta}")));
        }
        if !(zeta > 1.0 && zeta.is_finite()) {
            return Err(Error::invalid("zeta", format!("must be finite and > 1, got {zeta}")));
        }
        Ok(Self {
            reservoir,
            bath,
            amplitude: delta,
            offset: delta * zeta,
            phase,
        })
    }

    /// Constant-frequency branch.
    pub fn frozen(reservoir: Reservoir, bath: Bath, omega: f64) -> Result<Self> {
        check_bath(&bath)?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", format!("must be finite and > 0, got {omega}")));
        }
        Ok(Self {
            reservoir,
            bath,
            amplitude: 0.0,
            offset: omega,
            phase: reservoir.phase(),
        })
    }

    pub fn with_bath(mut self, bath: Bath) -> Self {
        self.bath = bath;
        self
    }

    pub fn delta(&self) -> f64 {
        self.amplitude
    }

    /// Displacement `ζ`; infinite for a frozen branch.
    pub fn zeta(&self) -> f64 {
        if self.amplitude == 0.0 {
            f64::INFINITY
        } else {
            self.offset / self.amplitude
        }
    }

    pub fn temperature(&self) -> f64 {
        self.bath.temperature
    }

    /// `cos` of the drive phase, symmetric about `s = 1/2` so that both
    /// endpoints are exact.
    fn drive_cos(&self, s: f64) -> f64 {
        let c = if s <= 0.5 { (PI * s).cos() } else { -(PI * (1.0 - s)).cos() };
        match self.phase {
            Phase::Decreasing => c,
            Phase::Increasing => -c,
        }
    }

    fn drive_sin(s: f64) -> f64 {
        let u = if s <= 0.5 { s } else { 1.0 - s };
        (PI * u).sin()
    }

    pub(crate) fn omega_at(&self, s: f64) -> f64 {
        self.offset + self.amplitude * self.drive_cos(s)
    }

    pub(crate) fn omega_prime_at(&self, s: f64) -> f64 {
        let d = PI * self.amplitude * Self::drive_sin(s);
        match self.phase {
            Phase::Decreasing => -d,
            Phase::Increasing => d,
        }
    }

    pub fn frequency(&self, s: f64) -> Result<f64> {
        check_s(s)?;
        Ok(self.omega_at(s))
    }

    /// `dω/ds`; exactly zero at both endpoints.
    pub fn frequency_derivative(&self, s: f64) -> Result<f64> {
        check_s(s)?;
        Ok(self.omega_prime_at(s))
    }

    pub fn min_frequency(&self) -> f64 {
        self.offset - self.amplitude.abs()
    }

    pub fn max_frequency(&self) -> f64 {
        self.offset + self.amplitude.abs()
    }
}

/// A diabatic quench between consecutive branches. Populations are frozen
/// while the frequency jumps by `scale = T_to / T_from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quench {
    pub from: Reservoir,
    pub to: Reservoir,
    pub omega_before: f64,
    pub omega_after: f64,
    pub scale: f64,
}

impl Quench {
    /// Relative mismatch between the realized frequency ratio and the
    /// temperature ratio.
    pub fn ratio_error(&self) -> f64 {
        (self.omega_after / self.omega_before / self.scale - 1.0).abs()
    }
}

pub fn quench_targets(config: &TricycleConfig) -> [Quench; 3] {
    let temps = config.temperatures();
    Reservoir::CYCLE.map(|from| {
        let to = from.next();
        Quench {
            from,
            to,
            omega_before: config.branch(from).omega_at(1.0),
            omega_after: config.branch(to).omega_at(0.0),
            scale: temps[to] / temps[from],
        }
    })
}
