mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tricycle::lindblad::drazin_inverse;
use tricycle::numerics::CompositeGaussLegendre;
use tricycle::protocol::BranchProtocol;
use tricycle::thermo::{branch_heat, equilibrium_derivative, sigma_coefficient};

const FD_STEP: f64 = 1e-5;

/// `L⁻¹(s) ∂_s ρ_eq(s)` along the branch.
fn lag(branch: &BranchProtocol, s: f64) -> [f64; 2] {
    let w = branch.frequency(s).unwrap();
    let v = drazin_inverse(&branch.bath, w).unwrap().apply(&equilibrium_derivative(branch, s).unwrap());
    [v.rho11.re, v.rho00.re]
}

/// `d/ds` of [`lag`] by central difference; the quadrature nodes never come
/// within one step of the endpoints.
fn lag_derivative(branch: &BranchProtocol, s: f64) -> [f64; 2] {
    let (a, b) = (lag(branch, s + FD_STEP), lag(branch, s - FD_STEP));
    [(a[0] - b[0]) / (2.0 * FD_STEP), (a[1] - b[1]) / (2.0 * FD_STEP)]
}

/// `β ∫ Tr[H d/ds{L⁻¹ ∂_s ρ_eq}] ds` evaluated directly.
fn sigma_direct(branch: &BranchProtocol) -> f64 {
    let quad = CompositeGaussLegendre::default();
    let f = |s: f64| {
        let d = lag_derivative(branch, s);
        0.5 * branch.frequency(s).unwrap() * (d[0] - d[1])
    };
    quad.fixed(&f, 0.0, 1.0, 256) / branch.temperature()
}

/// `(1/2τ) ∫ ω Tr{σ_z d/ds[L⁻¹ ∂_s ρ_eq]} ds`.
fn q1_direct(branch: &BranchProtocol, tau: f64) -> f64 {
    let quad = CompositeGaussLegendre::default();
    let f = |s: f64| {
        let d = lag_derivative(branch, s);
        branch.frequency(s).unwrap() * (d[0] - d[1])
    };
    quad.fixed(&f, 0.0, 1.0, 256) / (2.0 * tau)
}

#[test]
fn closed_form_sigma_matches_direct_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5167);
    let quad = CompositeGaussLegendre::default().with_rel_tol(1e-12);
    for _ in 0..20 {
        let b = common::random_branch(&mut rng);
        let closed = sigma_coefficient(&b, &quad).unwrap();
        let direct = sigma_direct(&b);
        assert!(closed <= 0.0);
        let rel = (closed - direct).abs() / closed.abs();
        assert!(rel < 1e-6, "{b:?}: closed {closed:e} direct {direct:e} rel {rel:e}");
    }
}

#[test]
fn first_order_heat_matches_direct_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a1);
    let quad = CompositeGaussLegendre::default().with_rel_tol(1e-12);
    for _ in 0..20 {
        let b = common::random_branch(&mut rng);
        let tau = 37.0;
        let q1 = branch_heat(&b, tau, &quad).unwrap().q1;
        let direct = q1_direct(&b, tau);
        let rel = (q1 - direct).abs() / q1.abs();
        assert!(rel < 1e-6, "{b:?}: {q1:e} vs {direct:e}");
    }
}
