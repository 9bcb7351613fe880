//! Numerical toolkit for the regularized electrostatic MEMS equations
//!
//! u_t = Δu − λ/(1+u)² + λε^{m−2}/(1+u)^m   or   u_t = −Δ²u − (same force)
//!
//! on [−1, 1] with Dirichlet (resp. clamped) boundary conditions.

pub mod asymptotics;
pub mod cli;
pub mod discretization;
pub mod equilibrium;
pub mod error;
pub mod evolution;
pub mod export;
pub mod model;
pub mod numerics;
pub mod phaseplane;

pub use error::{Error, Result};
