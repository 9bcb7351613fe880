//! Matched asymptotics of the large-norm equilibrium branch.
//!
//! The upper branch consists of a flat plateau at u = −1 + ε, a boundary
//! layer that lifts u to the Dirichlet value, and an inner layer of width
//! ε^{3/2} (Laplacian) or ε^{3/4} (bi-Laplacian) where the two meet.

pub mod bilaplacian;
pub mod farfield;
pub mod laplacian;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::discretization::Field;
use crate::model::Order;
use crate::numerics::fit::parabola_vertex;

pub use bilaplacian::{
    composite_bilaplacian, contact_point_bilaplacian, contact_point_bilaplacian_leading,
    contact_point_bilaplacian_with, inner_bilaplacian, inner_bilaplacian_shoot, norm_sq_bilaplacian,
    ExpansionCoeffsB,
};
pub use farfield::{farfield_series, FarFieldCoeffs, SeriesOrder};
pub use laplacian::{
    composite_laplacian, contact_point_laplacian, contact_point_laplacian_leading, gamma_laplacian,
    inner_laplacian, norm_sq_laplacian, ExpansionCoeffsL,
};

/// Far-field constants attached to an inner profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FarField {
    /// v ~ Bξ − L ln ξ + γ.
    Laplacian { slope: f64, log_coeff: f64, gamma: f64 },
    /// v ~ b₀ξ² + c₀ξ + d₀ + (λ/(6b₀²)) ln ξ + …, with ξ₀ = c₀(λ₀c/λ)^{1/4}.
    BiLaplacian { b0: f64, c0: f64, d0: f64, xi0: f64 },
}

/// Tabulated inner-layer solution v(ξ) with Hermite interpolation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnerProfile {
    pub order: Order,
    pub lambda: f64,
    pub m: u32,
    pub xi_max: f64,
    pub xi: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub far: FarField,
    /// Largest deviation of the first integral from its far-field value along the table.
    pub first_integral_residual: f64,
    /// Exponential rate of approach to v = 1 on the left.
    pub(crate) left_rate: f64,
}

impl InnerProfile {
    pub fn gamma(&self) -> Option<f64> {
        match self.far {
            FarField::Laplacian { gamma, .. } => Some(gamma),
            _ => None,
        }
    }

    pub fn xi0(&self) -> Option<f64> {
        match self.far {
            FarField::BiLaplacian { xi0, .. } => Some(xi0),
            _ => None,
        }
    }

    /// Far-field approximation used beyond the table.
    pub fn far_value(&self, xi: f64) -> f64 {
        match self.far {
            FarField::Laplacian { slope, log_coeff, gamma } => slope * xi - log_coeff * xi.ln() + gamma,
            FarField::BiLaplacian { b0, c0, d0, .. } => {
                let mut c = FarFieldCoeffs::new(self.lambda, self.m);
                c.b0 = b0;
                c.c0 = c0;
                c.d0 = d0;
                farfield_series(SeriesOrder::V0, &c, xi)
            }
        }
    }

    /// v(ξ) for any ξ: table inside, exponential decay to 1 on the left, far field on the right.
    pub fn value(&self, xi: f64) -> f64 {
        let n = self.xi.len();
        if xi <= self.xi[0] {
            return 1.0 + (self.v[0] - 1.0) * (self.left_rate * (xi - self.xi[0])).exp();
        }
        if xi >= self.xi[n - 1] {
            let x1 = self.xi[n - 1];
            let off = self.v[n - 1] - self.far_value(x1);
            return self.far_value(xi) + off * x1 / xi;
        }
        let i = self.xi.partition_point(|&t| t <= xi) - 1;
        let (t0, t1) = (self.xi[i], self.xi[i + 1]);
        let h = t1 - t0;
        let s = (xi - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.v[i]
            + (s3 - 2.0 * s2 + s) * h * self.dv[i]
            + (-2.0 * s3 + 3.0 * s2) * self.v[i + 1]
            + (s3 - s2) * h * self.dv[i + 1]
    }

    pub fn min_value(&self) -> f64 {
        self.v.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

type Key = (u64, u32, u64);

fn key(lambda: f64, m: u32, extra: f64) -> Key {
    (lambda.to_bits(), m, extra.to_bits())
}

static SCALARS: OnceLock<Mutex<HashMap<(u8, Key), f64>>> = OnceLock::new();
static PROFILES: OnceLock<Mutex<HashMap<(u8, Key), Arc<InnerProfile>>>> = OnceLock::new();

pub(crate) fn cached_scalar<F>(tag: u8, k: Key, f: F) -> crate::Result<f64>
where
    F: FnOnce() -> crate::Result<f64>,
{
    let map = SCALARS.get_or_init(Default::default);
    if let Some(v) = map.lock().unwrap().get(&(tag, k)) {
        return Ok(*v);
    }
    let v = f()?;
    map.lock().unwrap().insert((tag, k), v);
    Ok(v)
}

pub(crate) fn cached_profile<F>(tag: u8, k: Key, f: F) -> crate::Result<Arc<InnerProfile>>
where
    F: FnOnce() -> crate::Result<InnerProfile>,
{
    let map = PROFILES.get_or_init(Default::default);
    if let Some(v) = map.lock().unwrap().get(&(tag, k)) {
        return Ok(v.clone());
    }
    let v = Arc::new(f()?);
    map.lock().unwrap().insert((tag, k), v.clone());
    Ok(v)
}

/// Contact point x_c > 0 read off a computed equilibrium.
///
/// Second order: location of the maximum of the discrete u″.
/// Fourth order: location of the minimum of u nearest x = 1.
/// Both are refined by a parabola through the three extreme samples.
pub fn contact_point_from_field(field: &Field, order: Order) -> Option<f64> {
    let g = &field.grid;
    let n = g.n;
    let u = &field.values;
    let h = g.h;
    let start = n / 2;
    let (vals, offset): (Vec<f64>, usize) = match order {
        Order::Second => {
            let d2: Vec<f64> =
                (start.max(1)..n - 1).map(|i| (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h)).collect();
            (d2, start.max(1))
        }
        Order::Fourth => (u[start..].iter().map(|v| -v).collect(), start),
    };
    let mut best = 1;
    match order {
        Order::Second => {
            for i in 1..vals.len() - 1 {
                if vals[i] > vals[best] {
                    best = i;
                }
            }
        }
        Order::Fourth => {
            // outermost interior local minimum of u
            best = 0;
            for i in 1..vals.len() - 1 {
                if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
                    best = i;
                }
            }
            if best == 0 {
                return None;
            }
        }
    }
    if best == 0 || best + 1 >= vals.len() {
        return None;
    }
    let xs = [g.x(offset + best - 1), g.x(offset + best), g.x(offset + best + 1)];
    let ys = [vals[best - 1], vals[best], vals[best + 1]];
    Some(parabola_vertex(xs, ys).0)
}
