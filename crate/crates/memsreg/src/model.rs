//! Regularized electrostatic potential, force and gradient-flow energy.
//!
//! Every evaluation goes through the gap `g = 1 + u`, which is O(ε) in the
//! touchdown regime.

use serde::{Deserialize, Serialize};

use crate::discretization::Field;
use crate::error::{Error, Result};

/// Elastic operator: Laplacian (second order) or bi-Laplacian (fourth order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Second,
    Fourth,
}

impl Order {
    pub fn from_int(k: u32) -> Result<Order> {
        match k {
            2 => Ok(Order::Second),
            4 => Ok(Order::Fourth),
            _ => Err(Error::InvalidParams(format!("order must be 2 or 4, got {k}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Order::Second => 2,
            Order::Fourth => 4,
        }
    }
}

/// Voltage λ, regularization ε, exponent m and operator order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub eps: f64,
    pub m: u32,
    pub order: Order,
}

impl ModelParams {
    /// Validated constructor. `lambda = 0` is allowed (trivial solution).
    pub fn new(lambda: f64, eps: f64, m: u32, order: Order) -> Result<Self> {
        let p = ModelParams { lambda, eps, m, order };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidParams(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.eps.is_finite() && (0.0..1.0).contains(&self.eps)) {
            return Err(Error::InvalidParams(format!("eps must lie in [0,1), got {}", self.eps)));
        }
        if self.m < 3 {
            return Err(Error::InvalidParams(format!("m must be >= 3, got {}", self.m)));
        }
        Ok(())
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        ModelParams { lambda, ..self }
    }

    /// ε^{m−2}, the strength of the repulsive term.
    #[inline]
    pub fn eps_pow(&self) -> f64 {
        self.eps.powi(self.m as i32 - 2)
    }

    /// Force per unit λ as a function of the gap: 1/g² − ε^{m−2}/g^m.
    #[inline]
    pub fn fhat_g(&self, g: f64) -> f64 {
        let r = self.eps / g;
        (1.0 - r.powi(self.m as i32 - 2)) / (g * g)
    }

    /// d/du of [`fhat_g`](Self::fhat_g).
    #[inline]
    pub fn dfhat_g(&self, g: f64) -> f64 {
        let r = self.eps / g;
        (-2.0 + self.m as f64 * r.powi(self.m as i32 - 2)) / (g * g * g)
    }

    /// Potential per unit λ: −1/g + ε^{m−2}/((m−1) g^{m−1}).
    #[inline]
    pub fn phihat_g(&self, g: f64) -> f64 {
        let r = self.eps / g;
        (-1.0 + r.powi(self.m as i32 - 2) / (self.m as f64 - 1.0)) / g
    }

    /// λ/(1+u)² − λε^{m−2}/(1+u)^m.
    pub fn force(&self, u: f64) -> Result<f64> {
        let g = gap(u)?;
        Ok(self.lambda * self.fhat_g(g))
    }

    /// Derivative of [`force`](Self::force) with respect to u.
    pub fn dforce(&self, u: f64) -> Result<f64> {
        let g = gap(u)?;
        Ok(self.lambda * self.dfhat_g(g))
    }

    /// φ_ε(u) = −λ/(1+u) + λε^{m−2}/((m−1)(1+u)^{m−1}); d φ/du = force.
    pub fn potential_phi(&self, u: f64) -> Result<f64> {
        let g = gap(u)?;
        Ok(self.lambda * self.phihat_g(g))
    }
}

fn gap(u: f64) -> Result<f64> {
    let g = 1.0 + u;
    if g > 0.0 && g.is_finite() {
        Ok(g)
    } else {
        Err(Error::Domain(format!("gap closed: u = {u}")))
    }
}

/// Gradient-flow energy ∫ ½|u_x|² + φ (second order) or ∫ ½|u_xx|² + φ
/// (fourth order), trapezoid rule with the boundary values implied by the
/// boundary conditions.
///
/// The discrete energy is exactly ½h·uᵀAu + trapezoid(φ), so the spatially
/// discrete flow `u_t = −A u − force(u)` dissipates it.
pub fn energy(f: &Field, p: &ModelParams) -> Result<f64> {
    let h = f.grid.h;
    let u = &f.values;
    let n = u.len();
    let mut elastic = 0.0;
    match p.order {
        Order::Second => {
            let mut prev = 0.0;
            for &ui in u.iter().chain(std::iter::once(&0.0)) {
                let d = (ui - prev) / h;
                elastic += d * d;
                prev = ui;
            }
            elastic *= h;
        }
        Order::Fourth => {
            let at = |i: isize| -> f64 {
                if i < 0 || i >= n as isize {
                    0.0
                } else {
                    u[i as usize]
                }
            };
            let h2 = h * h;
            // boundary nodes: ghost reflection u_{-1} = u_1
            let b0 = 2.0 * at(0) / h2;
            let b1 = 2.0 * at(n as isize - 1) / h2;
            elastic += 0.5 * (b0 * b0 + b1 * b1);
            for i in 0..n as isize {
                let d = (at(i - 1) - 2.0 * at(i) + at(i + 1)) / h2;
                elastic += d * d;
            }
            elastic *= h;
        }
    }
    let mut pot = p.lambda * p.phihat_g(1.0); // two boundary nodes, weight h/2 each
    for &ui in u {
        pot += p.lambda * p.phihat_g(gap(ui)?);
    }
    Ok(0.5 * elastic + h * pot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Grid;

    fn p(lambda: f64, eps: f64) -> ModelParams {
        ModelParams::new(lambda, eps, 4, Order::Second).unwrap()
    }

    #[test]
    fn force_vanishes_at_potential_minimum() {
        for &eps in &[0.01, 0.05, 0.3] {
            for m in 3..8 {
                let q = ModelParams::new(2.5, eps, m, Order::Second).unwrap();
                assert!(q.force(-1.0 + eps).unwrap().abs() < 1e-12 / (eps * eps));
            }
        }
        assert_eq!(p(5.0, 0.0).force(0.0).unwrap(), 5.0);
    }

    #[test]
    fn force_matches_potential_derivative() {
        let q = ModelParams::new(1.0, 0.05, 4, Order::Second).unwrap();
        let u = -0.9;
        let d = 1e-6;
        let fd = (q.potential_phi(u + d).unwrap() - q.potential_phi(u - d).unwrap()) / (2.0 * d);
        let f = q.force(u).unwrap();
        assert!(((fd - f) / f).abs() < 1e-6, "{fd} vs {f}");
    }

    #[test]
    fn potential_closed_form() {
        let q = p(1.0, 0.1);
        let v = q.potential_phi(0.0).unwrap();
        assert!((v - (-1.0 + 0.01 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let q = p(1.0, 0.1);
        assert!(matches!(q.force(-1.0), Err(Error::Domain(_))));
        assert!(q.potential_phi(-1.5).is_err());
        assert!(ModelParams::new(1.0, 1.0, 4, Order::Second).is_err());
        assert!(ModelParams::new(1.0, 0.1, 2, Order::Second).is_err());
        assert!(ModelParams::new(-1.0, 0.1, 4, Order::Second).is_err());
    }

    #[test]
    fn zero_field_energy() {
        let g = Grid::new(64).unwrap();
        let f = Field::zeros(g);
        let e = energy(&f, &p(1.0, 0.0)).unwrap();
        assert!((e + 2.0).abs() < 1e-13);
        let q = ModelParams::new(1.0, 0.0, 4, Order::Fourth).unwrap();
        assert!((energy(&f, &q).unwrap() + 2.0).abs() < 1e-13);
    }
}
