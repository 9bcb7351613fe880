//! Small numerical kernels: quadrature, ODE integration, root finding, fits.

pub mod fit;
pub mod ode;
pub mod quad;
pub mod roots;
