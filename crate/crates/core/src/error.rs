use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} = {value} lies outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("density vector violates {0}")]
    InvalidState(String),

    #[error("populations are equal, the effective temperature is infinite")]
    InfiniteTemperature,

    #[error("quadrature did not reach tolerance after {panels} panels (last relative change {rel_change:e})")]
    QuadratureNotConverged { panels: usize, rel_change: f64 },

    #[error("no sign change of the zeroth-order heat sum over delta_c in [{lo}, {hi}]")]
    NoSignChange {
        lo: f64,
        hi: f64,
        scanned: Vec<(f64, f64)>,
    },

    #[error("cycle does not run as a tricycle refrigerator: Q_c = {q_c:e}, Q_h = {q_h:e}")]
    NotRefrigerator { q_c: f64, q_h: f64 },

    #[error("sum of zeroth-order heats is {sum_q0:e}; delta_c must exceed the reversible amplitude")]
    BelowReversibleAmplitude { sum_q0: f64 },

    #[error("heat-balance denominator is non-positive for every scanned tau_p at tau_c = {tau_c}")]
    NoEnergyBalance { tau_c: f64 },

    #[error("stationarity condition has no sign change over the tau_p scan at tau_c = {tau_c}")]
    NoBracket { tau_c: f64 },

    #[error("unexpected sign structure: {0}")]
    SignStructure(String),

    #[error("only {got} grid points converged, at least {need} required")]
    TooFewPoints { got: usize, need: usize },

    #[error("COP {psi} is not reached by any optimal allocation")]
    Unreachable { psi: f64 },

    #[error("{got} samples supplied, at least {need} required")]
    TooFewSamples { got: usize, need: usize },

    #[error("no registered {kind} named `{name}` (known: {known})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
