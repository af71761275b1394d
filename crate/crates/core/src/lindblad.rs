//! Vectorized two-level Lindblad generator, its instantaneous Gibbs state and
//! the closed-form Drazin inverse.
//!
//! Density matrices are stored as the column `(ρ₁₁, ρ₁₀, ρ₀₁, ρ₀₀)`, where
//! `|1⟩` is the excited state of `H = ω σ_z / 2`. The generator couples the
//! two populations through emission at rate `γ(n + 1)` and absorption at
//! rate `γn`; the coherences decay at `γ(n + ½)` while rotating at `ω`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::protocol::Bath;

/// Vectorized two-level density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityVector {
    pub rho11: C64,
    pub rho10: C64,
    pub rho01: C64,
    pub rho00: C64,
}

impl DensityVector {
    pub const fn from_array(a: [C64; 4]) -> Self {
        Self {
            rho11: a[0],
            rho10: a[1],
            rho01: a[2],
            rho00: a[3],
        }
    }

    pub const fn to_array(self) -> [C64; 4] {
        [self.rho11, self.rho10, self.rho01, self.rho00]
    }

    /// Diagonal state with the given excited-state population.
    pub fn diagonal(excited: f64) -> Self {
        Self::from_array([C64::new(excited, 0.0), C64::default(), C64::default(), C64::new(1.0 - excited, 0.0)])
    }

    pub fn trace(&self) -> C64 {
        self.rho11 + self.rho00
    }

    pub fn excited(&self) -> f64 {
        self.rho11.re
    }

    pub fn ground(&self) -> f64 {
        self.rho00.re
    }

    /// `Tr[H ρ]` for `H = ω σ_z / 2`.
    pub fn energy(&self, omega: f64) -> f64 {
        0.5 * omega * (self.rho11 - self.rho00).re
    }

    /// Eigenvalues of the 2×2 Hermitian matrix, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.rho11.re + self.rho00.re);
        let half_gap = 0.5 * (self.rho11.re - self.rho00.re);
        let r = (half_gap * half_gap + self.rho10.norm_sqr()).sqrt();
        [mean - r, mean + r]
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| -l * l.ln())
            .sum()
    }

    /// Checks trace, Hermiticity and positivity, each to `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).norm() > tol {
            return Err(Error::InvalidState(format!("unit trace (trace = {tr})")));
        }
        if (self.rho01 - self.rho10.conj()).norm() > tol {
            return Err(Error::InvalidState(format!(
                "hermiticity (ρ10 = {}, ρ01 = {})",
                self.rho10, self.rho01
            )));
        }
        if self.rho11.im.abs() > tol || self.rho00.im.abs() > tol {
            return Err(Error::InvalidState("real populations".into()));
        }
        let (p1, p0) = (self.rho11.re, self.rho00.re);
        if p1 < -tol || p0 < -tol || p1 > 1.0 + tol || p0 > 1.0 + tol {
            return Err(Error::InvalidState(format!("positivity (ρ11 = {p1}, ρ00 = {p0})")));
        }
        if self.rho10.norm_sqr() > p1 * p0 + tol {
            return Err(Error::InvalidState(format!(
                "positivity (|ρ10|² = {} > ρ11·ρ00 = {})",
                self.rho10.norm_sqr(),
                p1 * p0
            )));
        }
        Ok(())
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_distance(&self, other: &DensityVector) -> f64 {
        (*self - *other).to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_max(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for DensityVector {
    type Output = DensityVector;

    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl Sub for DensityVector {
    type Output = DensityVector;

    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }
}

impl Mul<DensityVector> for f64 {
    type Output = DensityVector;

    fn mul(self, rhs: DensityVector) -> DensityVector {
        DensityVector::from_array(rhs.to_array().map(|z| z * self))
    }
}

/// 4×4 complex matrix acting on [`DensityVector`]s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator4(pub [[C64; 4]; 4]);

impl Superoperator4 {
    pub fn zeros() -> Self {
        Self([[C64::default(); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Entry at 1-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[row - 1][col - 1]
    }

    pub fn apply(&self, v: &DensityVector) -> DensityVector {
        let x = v.to_array();
        DensityVector::from_array(std::array::from_fn(|i| (0..4).map(|j| self.0[i][j] * x[j]).sum()))
    }

    pub fn compose(&self, rhs: &Superoperator4) -> Superoperator4 {
        Superoperator4(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
        }))
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `row 1 + row 4` for each column: the change in trace produced by
    /// each basis element. Zero for a trace-preserving generator.
    pub fn trace_column_sums(&self) -> [C64; 4] {
        std::array::from_fn(|j| self.0[0][j] + self.0[3][j])
    }
}

impl Sub for Superoperator4 {
    type Output = Superoperator4;

    fn sub(self, rhs: Self) -> Self {
        Superoperator4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - rhs.0[i][j])))
    }
}

fn check_positive(what: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: v,
            domain: "(0, ∞)",
        })
    }
}

/// Mean bath occupation `1/(exp(ω/T) − 1)`.
pub fn bose_occupation(temperature: f64, omega: f64) -> Result<f64> {
    check_positive("temperature", temperature)?;
    check_positive("omega", omega)?;
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// `γ = γ₀ ω^α`.
pub fn damping_rate(gamma0: f64, alpha: f64, omega: f64) -> Result<f64> {
    check_positive("gamma0", gamma0)?;
    check_positive("omega", omega)?;
    Ok(gamma0 * omega.powf(alpha))
}

/// Excited-state population of the Gibbs state, `1/(exp(ω/T) + 1)`.
pub fn thermal_excitation(temperature: f64, omega: f64) -> Result<f64> {
    check_positive("temperature", temperature)?;
    check_positive("omega", omega)?;
    Ok(1.0 / ((omega / temperature).exp() + 1.0))
}

pub fn gibbs_state(temperature: f64, omega: f64) -> Result<DensityVector> {
    let n = bose_occupation(temperature, omega)?;
    let z = 2.0 * n + 1.0;
    Ok(DensityVector::from_array([
        C64::new(n / z, 0.0),
        C64::default(),
        C64::default(),
        C64::new((n + 1.0) / z, 0.0),
    ]))
}

/// Rate parameters `(γ, n)` of the generator at frequency `omega`.
pub(crate) fn rates(bath: &Bath, omega: f64) -> Result<(f64, f64)> {
    Ok((
        damping_rate(bath.gamma0, bath.alpha, omega)?,
        bose_occupation(bath.temperature, omega)?,
    ))
}

pub fn liouvillian(bath: &Bath, omega: f64) -> Result<Superoperator4> {
    let (g, n) = rates(bath, omega)?;
    let mut m = Superoperator4::zeros();
    m.0[0][0] = C64::new(-g * (n + 1.0), 0.0);
    m.0[0][3] = C64::new(g * n, 0.0);
    m.0[1][1] = C64::new(-g * (n + 0.5), -omega);
    m.0[2][2] = C64::new(-g * (n + 0.5), omega);
    m.0[3][0] = C64::new(g * (n + 1.0), 0.0);
    m.0[3][3] = C64::new(-g * n, 0.0);
    Ok(m)
}

/// Drazin inverse of [`liouvillian`]: the inverse on the span of the decaying
/// modes and zero on the Gibbs state.
pub fn drazin_inverse(bath: &Bath, omega: f64) -> Result<Superoperator4> {
    let (g, n) = rates(bath, omega)?;
    let z = 2.0 * n + 1.0;
    let pop = g * z * z;
    let mut m = Superoperator4::zeros();
    m.0[0][0] = C64::new(-(n + 1.0) / pop, 0.0);
    m.0[0][3] = C64::new(n / pop, 0.0);
    m.0[1][1] = C64::new(1.0, 0.0) / C64::new(-g * (n + 0.5), -omega);
    m.0[2][2] = C64::new(1.0, 0.0) / C64::new(-g * (n + 0.5), omega);
    m.0[3][0] = C64::new((n + 1.0) / pop, 0.0);
    m.0[3][3] = C64::new(-n / pop, 0.0);
    Ok(m)
}
