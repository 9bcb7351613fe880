//! Laplacian inner layer: ½v′² = λ(−1/v + 1/((m−1)v^{m−1})) + λ(m−2)/(m−1).

use serde::{Deserialize, Serialize};

use super::{cached_profile, cached_scalar, key, FarField, InnerProfile};
use crate::discretization::{Field, Grid};
use crate::error::{Error, Result};
use crate::model::Order;
use crate::numerics::ode::{integrate, OdeOptions};
use crate::numerics::quad::{integrate as quad, integrate_breaks};

/// Default half-width of the tabulated inner profile.
pub const DEFAULT_XI_MAX: f64 = 50.0;

/// Coefficients of the contact-point expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoeffsL {
    pub lambda: f64,
    pub m: u32,
    pub lambda0c: f64,
    pub lambda1c: f64,
    pub a_half: f64,
    pub a1: f64,
    pub gamma: f64,
    pub lambda2c: f64,
}

impl ExpansionCoeffsL {
    pub fn new(lambda: f64, m: u32) -> Result<Self> {
        check(lambda, m)?;
        let gamma = gamma_laplacian(lambda, m)?;
        Ok(Self::with_gamma(lambda, m, gamma))
    }

    pub fn with_gamma(lambda: f64, m: u32, gamma: f64) -> Self {
        let l0 = lambda0c(m);
        let a1 = 0.5 * l0 * (l0 / lambda).ln() - gamma;
        ExpansionCoeffsL {
            lambda,
            m,
            lambda0c: l0,
            lambda1c: -2.0 * l0 * l0,
            a_half: -l0,
            a1,
            gamma,
            lambda2c: 2.0 * a1 * l0,
        }
    }

    /// x̄_c with 1 − x_c = ε^{1/2}x̄_c.
    pub fn xbar_c(&self, eps: f64) -> f64 {
        let l0 = self.lambda0c;
        let log_term = if eps > 0.0 { eps * eps.ln() } else { 0.0 };
        (l0 / self.lambda).sqrt() * (1.0 - l0 * log_term + self.a1 * eps)
    }
}

/// (m−1)/(2(m−2)).
pub fn lambda0c(m: u32) -> f64 {
    let m = m as f64;
    (m - 1.0) / (2.0 * (m - 2.0))
}

fn check(lambda: f64, m: u32) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParams(format!("lambda must be > 0, got {lambda}")));
    }
    if m < 3 {
        return Err(Error::InvalidParams(format!("m must be >= 3, got {m}")));
    }
    Ok(())
}

/// Σ_{k=0}^{m−3} (k+1) v^k, so that (m−2)v^{m−1} − (m−1)v^{m−2} + 1 = (v−1)²·S(v).
fn s_poly(v: f64, m: u32) -> f64 {
    (0..=m as i32 - 3).rev().fold(0.0, |acc, k| acc * v + (k + 1) as f64)
}

/// √(2λP(v)) without cancellation near v = 1.
fn slope(v: f64, lambda: f64, m: u32) -> f64 {
    let mf = m as f64;
    (v - 1.0).abs() * (2.0 * lambda * s_poly(v, m) / ((mf - 1.0) * v.powi(m as i32 - 1))).sqrt()
}

/// Point where v″ peaks: v^{m−2} = m/2.
fn v_star(m: u32) -> f64 {
    (m as f64 / 2.0).powf(1.0 / (m as f64 - 2.0))
}

/// γ from the exact far-field integral, with the tail split at `w_split`.
fn gamma_split(lambda: f64, m: u32, w_split: f64) -> Result<f64> {
    let mf = m as f64;
    let l = lambda0c(m);
    let b = (lambda / l).sqrt();
    let vs = v_star(m);
    // B/√(2λP) − 1 − L/w with B² − 2λP = 2λ(1/w − 1/((m−1)w^{m−1}))
    let g = |w: f64| {
        let s = slope(w, lambda, m);
        let num = 2.0 * lambda * (1.0 / w - 1.0 / ((mf - 1.0) * w.powi(m as i32 - 1)));
        num / (s * (b + s)) - l / w
    };
    let head = if w_split > vs { quad(g, vs, w_split, 1e-14, 1e-13)?.value } else { 0.0 };
    let mut tail_f = |t: f64| if t <= 0.0 { 0.0 } else { g(w_split / t) * w_split / (t * t) };
    let tail = integrate_breaks(&mut tail_f, &[0.0, 1e-6, 1e-3, 0.1, 1.0], 1e-14, 1e-13)?.value;
    Ok(vs + l * (vs / b).ln() - head - tail)
}

/// Far-field constant γ of v₀ ~ Bξ − L ln ξ + γ, normalized by v₀(0) = v* (peak of v″).
pub fn gamma_laplacian(lambda: f64, m: u32) -> Result<f64> {
    check(lambda, m)?;
    cached_scalar(0, key(lambda, m, 0.0), || gamma_checked(lambda, m, DEFAULT_XI_MAX))
}

fn gamma_checked(lambda: f64, m: u32, xi_max: f64) -> Result<f64> {
    let b = (lambda / lambda0c(m)).sqrt();
    let g1 = gamma_split(lambda, m, v_star(m))?;
    let g2 = gamma_split(lambda, m, b * xi_max)?;
    let g3 = gamma_split(lambda, m, 2.0 * b * xi_max)?;
    if (g1 - g2).abs() > 1e-6 || (g2 - g3).abs() > 1e-6 {
        return Err(Error::ConvergenceFailure(format!(
            "gamma estimates disagree: {g1:.9} {g2:.9} {g3:.9}"
        )));
    }
    Ok(g1)
}

/// Inner profile on [−xi_max, xi_max]; ξ = 0 where v = v*.
pub fn inner_laplacian(lambda: f64, m: u32, xi_max: f64) -> Result<InnerProfile> {
    check(lambda, m)?;
    if !(xi_max.is_finite() && xi_max > 1.0) {
        return Err(Error::InvalidParams(format!("xi_max must exceed 1, got {xi_max}")));
    }
    let gamma = gamma_checked(lambda, m, xi_max)?;
    let l = lambda0c(m);
    let b = (lambda / l).sqrt();
    let vs = v_star(m);
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, h0: 1e-3, ..Default::default() };
    // left half from the first integral itself (the second-order system is unstable backwards)
    // integrated in w = v − 1 with relative control so w never changes sign
    let back_opts = OdeOptions { atol: 1e-300, ..opts };
    let mf = m as f64;
    let back = integrate(
        |_, y: &[f64; 1]| {
            let v = 1.0 + y[0];
            [y[0] * (2.0 * lambda * s_poly(v, m) / ((mf - 1.0) * v.powi(m as i32 - 1))).sqrt()]
        },
        0.0,
        [vs - 1.0],
        -xi_max,
        back_opts,
        |_, _| false,
    )?;
    let fhat = |v: f64| lambda * (1.0 / (v * v) - 1.0 / v.powi(m as i32));
    let fwd = integrate(
        |_, y: &[f64; 2]| [y[1], fhat(y[0])],
        0.0,
        [vs, slope(vs, lambda, m)],
        xi_max,
        opts,
        |_, _| false,
    )?;
    let mut xi = Vec::new();
    let mut v = Vec::new();
    let mut dv = Vec::new();
    for i in (1..back.t.len()).rev() {
        xi.push(back.t[i]);
        v.push(1.0 + back.y[i][0]);
        dv.push(back.dy[i][0]);
    }
    let mut resid: f64 = 0.0;
    for (t, y) in fwd.t.iter().zip(&fwd.y) {
        xi.push(*t);
        v.push(y[0]);
        dv.push(y[1]);
        let s = slope(y[0], lambda, m);
        resid = resid.max((0.5 * y[1] * y[1] - 0.5 * s * s).abs());
    }
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::ConvergenceFailure("inner profile left v > 0".into()));
    }
    Ok(InnerProfile {
        order: Order::Second,
        lambda,
        m,
        xi_max,
        xi,
        v,
        dv,
        far: FarField::Laplacian { slope: b, log_coeff: l, gamma },
        first_integral_residual: resid,
        left_rate: (lambda * (m as f64 - 2.0)).sqrt(),
    })
}

/// Cached profile at the default extent.
pub(crate) fn default_profile(lambda: f64, m: u32) -> Result<std::sync::Arc<InnerProfile>> {
    cached_profile(0, key(lambda, m, DEFAULT_XI_MAX), || inner_laplacian(lambda, m, DEFAULT_XI_MAX))
}

/// Leading-order contact point 1 − ε^{1/2}√(λ₀c/λ).
pub fn contact_point_laplacian_leading(lambda: f64, eps: f64, m: u32) -> f64 {
    1.0 - eps.sqrt() * (lambda0c(m) / lambda).sqrt()
}

/// Three-term contact point 1 − ε^{1/2}x̄_c.
pub fn contact_point_laplacian(lambda: f64, eps: f64, m: u32, gamma: f64) -> f64 {
    1.0 - eps.sqrt() * ExpansionCoeffsL::with_gamma(lambda, m, gamma).xbar_c(eps)
}

/// ‖u‖² of the large solution: 2[1 − (2/3)√((m−1)/(2λ(m−2)))ε^{1/2} − 2ε].
pub fn norm_sq_laplacian(lambda: f64, eps: f64, m: u32) -> f64 {
    let mf = m as f64;
    2.0 * (1.0 - (2.0 / 3.0) * ((mf - 1.0) / (2.0 * lambda * (mf - 2.0))).sqrt() * eps.sqrt() - 2.0 * eps)
}

/// Composite expansion of the large solution sampled on `grid`.
pub fn composite_laplacian(lambda: f64, eps: f64, m: u32, grid: &Grid) -> Result<Field> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0,1), got {eps}")));
    }
    let prof = default_profile(lambda, m)?;
    let c = ExpansionCoeffsL::with_gamma(lambda, m, prof.gamma().expect("laplacian profile"));
    let xbar = c.xbar_c(eps);
    let xc = 1.0 - eps.sqrt() * xbar;
    let (l0, b) = (c.lambda0c, (lambda / c.lambda0c).sqrt());
    let le = eps * eps.ln();
    let raw = |s: f64| {
        let inner = -1.0 + eps * prof.value((s - xc) / eps.powf(1.5));
        if s < xc {
            return inner;
        }
        let eta = (s - xc) / (eps.sqrt() * xbar);
        // outer minus common part; the ln η terms cancel identically
        let d = eta * (1.0 - b * xbar) + le * c.a_half * (eta - 1.0) + eps * c.a1 * (eta - 1.0) - eps * c.gamma
            + eps * l0 * (xbar / eps).ln();
        inner + d
    };
    let r1 = raw(1.0);
    Ok(Field::from_fn(grid.clone(), |x| {
        let s = x.abs();
        let u = raw(s);
        if s < xc {
            u
        } else {
            u - r1 * (s - xc) / (1.0 - xc)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_poly_factorization() {
        for m in 3..8u32 {
            for &v in &[0.3f64, 1.7, 4.0] {
                let mf = m as f64;
                let n = (mf - 2.0) * v.powi(m as i32 - 1) - (mf - 1.0) * v.powi(m as i32 - 2) + 1.0;
                let f = (v - 1.0) * (v - 1.0) * s_poly(v, m);
                assert!((n - f).abs() < 1e-10 * n.abs().max(1.0), "m={m} v={v}");
            }
        }
    }

    #[test]
    fn profile_slope_and_gamma() {
        let p = inner_laplacian(10.0, 4, 50.0).unwrap();
        let n = p.xi.len();
        let slope_end = p.dv[n - 1];
        assert!((slope_end - (40.0f64 / 3.0).sqrt()).abs() < 0.02, "{slope_end}");
        let g = p.gamma().unwrap();
        let x = p.xi[n - 1];
        let est = p.v[n - 1] - (40.0f64 / 3.0).sqrt() * x + 0.75 * x.ln();
        assert!((est - g).abs() < 0.05, "{est} {g}");
        assert!(p.first_integral_residual < 1e-8);
    }
}
