use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Composite Gauss-Legendre rule with iterative panel doubling.
///
/// Starts from `initial_panels` equal panels and doubles until two
/// successive estimates agree to `rel_tol`, giving up past `max_panels`.
/// The node table is fixed, so repeated integrations of the same function
/// return bit-identical results.
#[derive(Debug, Clone)]
pub struct CompositeGaussLegendre {
    nodes: Vec<(f64, f64)>,
    initial_panels: usize,
    max_panels: usize,
    rel_tol: f64,
}

impl Default for CompositeGaussLegendre {
    fn default() -> Self {
        Self::new(8, 64, 1 << 16, 1e-9)
    }
}

impl CompositeGaussLegendre {
    pub fn new(order: usize, initial_panels: usize, max_panels: usize, rel_tol: f64) -> Self {
        let order = NonZeroUsize::new(order.max(2)).expect("order is at least two");
        let nodes = GaussLegendre::new(order).iter().map(|(x, w)| (*x, *w)).collect();
        Self {
            nodes,
            initial_panels: initial_panels.max(1),
            max_panels: max_panels.max(initial_panels.max(1)),
            rel_tol,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    /// Single pass over `panels` equal panels of `[a, b]`.
    pub fn fixed<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let half = 0.5 * h;
        (0..panels)
            .map(|k| {
                let mid = a + (k as f64 + 0.5) * h;
                self.nodes
                    .iter()
                    .map(|&(x, w)| w * f(mid + half * x))
                    .sum::<f64>()
                    * half
            })
            .sum()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        let mut panels = self.initial_panels;
        let mut prev = self.fixed(&f, a, b, panels);
        let mut rel_change = f64::INFINITY;
        while panels < self.max_panels {
            panels *= 2;
            let next = self.fixed(&f, a, b, panels);
            let diff = (next - prev).abs();
            rel_change = if next != 0.0 { diff / next.abs() } else { diff };
            if diff <= self.rel_tol * next.abs() {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::QuadratureNotConverged { panels, rel_change })
    }
}
