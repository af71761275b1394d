//! Small deterministic numerical building blocks shared by the physics
//! modules: composite Gauss-Legendre quadrature, bracketed scalar searches,
//! sampled-data integration and grid helpers.

mod quadrature;
mod roots;
mod sampled;

pub use quadrature::CompositeGaussLegendre;
pub use roots::{bisect, golden_section_max, sign_change_brackets};
pub use sampled::{interpolate_linear, linspace, logspace, simpson};
