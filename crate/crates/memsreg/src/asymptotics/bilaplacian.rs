//! Bi-Laplacian inner layer: −v⁗ = λ(1/v² − 1/v^m) on the two-dimensional
//! unstable manifold of v = 1, selected by the absence of cubic growth.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::farfield::{FarFieldCoeffs, SeriesOrder};
use super::{cached_profile, key, FarField, InnerProfile};
use crate::discretization::{Field, Grid};
use crate::error::{Error, Result};
use crate::model::Order;
use crate::numerics::ode::{integrate, OdeOptions, OdeSolution};

/// Default half-width of the tabulated inner profile.
pub const DEFAULT_XI_MAX: f64 = 40.0;

/// Amplitude of the initial displacement along the manifold.
const DELTA: f64 = 1e-6;
const THETA_SAMPLES: usize = 64;

/// Coefficients of the outer and contact-point expansions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoeffsB {
    pub lambda: f64,
    pub m: u32,
    pub lambda0c: f64,
    pub lambda1c: f64,
    pub lambda2c: f64,
    pub lambda3c: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub xi0: f64,
    pub c1: f64,
    pub b0: f64,
}

impl ExpansionCoeffsB {
    pub fn new(lambda: f64, m: u32, xi0: f64, c1: f64) -> Self {
        let l0 = lambda0c(m);
        let r = (l0 / lambda).powf(0.25);
        ExpansionCoeffsB {
            lambda,
            m,
            lambda0c: l0,
            lambda1c: -12.0 * (m as f64 - 1.0) * xi0 / (m as f64 - 2.0),
            lambda2c: -l0 * l0 / 162.0,
            lambda3c: -(28.0 / 243.0) * l0 * l0 + l0 * xi0 * xi0 / 18.0 - 5.0 * l0 / 729.0
                - (2.0 / 3.0) * r * l0 * c1,
            alpha1: -l0 / 108.0,
            alpha2: l0 / 27.0,
            beta1: 7.0 * l0 / 81.0 + xi0 * xi0 / 12.0,
            beta2: -xi0 * xi0 / 6.0 + r * c1,
            xi0,
            c1,
            b0: 3.0 * (lambda / l0).sqrt(),
        }
    }

    /// x̄_c with 1 − x_c = ε^{1/4}x̄_c; `third` adds the ε ln ε correction.
    pub fn xbar_c(&self, eps: f64, third: bool) -> f64 {
        let mut s = 1.0 - self.xi0 / 6.0 * eps.sqrt();
        if third && eps > 0.0 {
            s -= self.lambda0c / 648.0 * eps * eps.ln();
        }
        (self.lambda0c / self.lambda).powf(0.25) * s
    }
}

/// 18(m−1)/(m−2).
pub fn lambda0c(m: u32) -> f64 {
    let m = m as f64;
    18.0 * (m - 1.0) / (m - 2.0)
}

fn check(lambda: f64, m: u32, xi_max: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParams(format!("lambda must be > 0, got {lambda}")));
    }
    if m < 3 {
        return Err(Error::InvalidParams(format!("m must be >= 3, got {m}")));
    }
    if !(xi_max.is_finite() && xi_max >= 5.0) {
        return Err(Error::InvalidParams(format!("xi_max must be >= 5, got {xi_max}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    /// v fell below 0.01.
    Collapse,
    /// No local minimum below 1 before the end of the run.
    NoDip,
    /// v‴ at ξ_min + xi_max minus its series value.
    Hit(f64),
}

impl Outcome {
    fn sign(self) -> i32 {
        match self {
            Outcome::Collapse => -1,
            Outcome::NoDip => 0,
            Outcome::Hit(f) if f > 0.0 => 1,
            Outcome::Hit(_) => -1,
        }
    }
}

struct Shot {
    outcome: Outcome,
    sol: OdeSolution<4>,
    t_min: f64,
}

struct Problem {
    lambda: f64,
    m: u32,
    xi_max: f64,
    kappa: f64,
    b0: f64,
    /// Current far-field estimate used for the right-end condition.
    c0: f64,
    d0: f64,
}

impl Problem {
    fn new(lambda: f64, m: u32, xi_max: f64) -> Self {
        let kappa = (lambda * (m as f64 - 2.0)).powf(0.25) / 2f64.sqrt();
        let b0 = (lambda * (m as f64 - 2.0) / (2.0 * (m as f64 - 1.0))).sqrt();
        Problem { lambda, m, xi_max, kappa, b0, c0: 0.0, d0: 0.0 }
    }

    fn coeffs(&self, c0: f64, d0: f64) -> FarFieldCoeffs {
        let mut c = FarFieldCoeffs::new(self.lambda, self.m);
        c.b0 = self.b0;
        c.c0 = c0;
        c.d0 = d0;
        c
    }

    /// v‴ of the v₀ series at ξ = xi_max.
    fn target(&self) -> f64 {
        self.coeffs(self.c0, self.d0).series(SeriesOrder::V0).jet(self.xi_max, 3)[3]
    }

    /// Complex amplitude c and exponent z = κ(1+i) of the manifold point v − 1 = Re(c e^{zξ}).
    fn manifold(&self, theta: f64) -> ((f64, f64), (f64, f64)) {
        ((DELTA * theta.cos(), DELTA * theta.sin()), (self.kappa, self.kappa))
    }

    fn start(&self, theta: f64) -> [f64; 4] {
        let (mut c, z) = self.manifold(theta);
        let mut y = [1.0, 0.0, 0.0, 0.0];
        for yk in y.iter_mut() {
            *yk += c.0;
            c = (c.0 * z.0 - c.1 * z.1, c.0 * z.1 + c.1 * z.0);
        }
        y
    }

    fn shoot(&self, theta: f64) -> Result<Shot> {
        let (l, m) = (self.lambda, self.m as i32);
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, h0: 1e-3 / self.kappa, ..Default::default() };
        let t_end = 200.0 / self.kappa + 2.0 * self.xi_max;
        let mut prev_dv = 0.0;
        let mut t_min: Option<f64> = None;
        let mut collapsed = false;
        let xi_max = self.xi_max;
        let sol = integrate(
            |_, y: &[f64; 4]| [y[1], y[2], y[3], -l * (1.0 / (y[0] * y[0]) - 1.0 / y[0].powi(m))],
            0.0,
            self.start(theta),
            t_end,
            opts,
            |t, y| {
                if y[0] < 0.01 {
                    collapsed = true;
                    return true;
                }
                if prev_dv < 0.0 && y[1] >= 0.0 && y[0] < 1.0 {
                    t_min = Some(t);
                }
                prev_dv = y[1];
                matches!(t_min, Some(tm) if t > tm + 1.01 * xi_max + 1.0)
            },
        )?;
        if collapsed {
            return Ok(Shot { outcome: Outcome::Collapse, sol, t_min: f64::NAN });
        }
        let Some(t_min) = refine_min(&sol) else {
            return Ok(Shot { outcome: Outcome::NoDip, sol, t_min: f64::NAN });
        };
        let te = t_min + self.xi_max;
        if sol.last().0 < te {
            return Ok(Shot { outcome: Outcome::NoDip, sol, t_min });
        }
        let v3 = interp(&sol, 3, te);
        Ok(Shot { outcome: Outcome::Hit(v3 - self.target()), sol, t_min })
    }
}

fn step_index<const N: usize>(sol: &OdeSolution<N>, t: f64) -> usize {
    (sol.t.partition_point(|&s| s <= t).max(1) - 1).min(sol.t.len() - 2)
}

fn interp<const N: usize>(sol: &OdeSolution<N>, k: usize, t: f64) -> f64 {
    sol.hermite(step_index(sol, t), k, t)
}

/// Position of the last local minimum of v below 1, refined by bisection on the interpolated v′.
fn refine_min(sol: &OdeSolution<4>) -> Option<f64> {
    let mut idx = None;
    for i in 0..sol.t.len() - 1 {
        if sol.y[i][1] < 0.0 && sol.y[i + 1][1] >= 0.0 && sol.y[i + 1][0] < 1.0 {
            idx = Some(i);
        }
    }
    let i = idx?;
    let (mut a, mut b) = (sol.t[i], sol.t[i + 1]);
    for _ in 0..100 {
        let c = 0.5 * (a + b);
        if sol.hermite(i, 1, c) < 0.0 {
            a = c;
        } else {
            b = c;
        }
    }
    Some(0.5 * (a + b))
}

/// Bisect θ between endpoints of opposite sign; returns the endpoint with the smaller |F|.
fn bisect_theta(p: &Problem, mut a: f64, mut b: f64) -> Result<Option<f64>> {
    let sa = p.shoot(a)?.outcome.sign();
    let sb = p.shoot(b)?.outcome.sign();
    if sa == 0 || sb == 0 || sa == sb {
        return Ok(None);
    }
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if c <= a || c >= b {
            break;
        }
        let s = p.shoot(c)?.outcome.sign();
        if s == 0 {
            break;
        }
        if s == sa {
            a = c;
        } else {
            b = c;
        }
    }
    // a genuine separatrix has finite F on both sides of the final bracket
    match (p.shoot(a)?.outcome, p.shoot(b)?.outcome) {
        (Outcome::Hit(x), Outcome::Hit(y)) => Ok(Some(if x.abs() < y.abs() { a } else { b })),
        _ => Ok(None),
    }
}

/// Shooting parameter θ of the orbit without cubic growth, by a scan over the circle.
fn find_theta(p: &Problem) -> Result<f64> {
    let thetas: Vec<f64> =
        (0..=THETA_SAMPLES).map(|j| 2.0 * std::f64::consts::PI * j as f64 / THETA_SAMPLES as f64).collect();
    let shots: Vec<i32> = thetas.iter().map(|&t| p.shoot(t).map(|s| s.outcome.sign())).collect::<Result<_>>()?;
    let mut best: Option<(f64, f64)> = None;
    for j in 0..THETA_SAMPLES {
        let (sa, sb) = (shots[j], shots[j + 1]);
        if sa == 0 || sb == 0 || sa == sb {
            continue;
        }
        if let Some(th) = bisect_theta(p, thetas[j], thetas[j + 1])? {
            let shot = p.shoot(th)?;
            let vmin = interp(&shot.sol, 0, shot.t_min);
            if vmin > 0.0 && vmin < 1.0 && best.map_or(true, |(_, vb)| vmin < vb) {
                best = Some((th, vmin));
            }
        }
    }
    best.map(|b| b.0).ok_or_else(|| Error::ConvergenceFailure("no separatrix found on the unstable manifold".into()))
}

/// (c₀, d₀) making the v₀ series match v and v′ at ξ = s.
fn fit_constants(p: &Problem, s: f64, v: f64, dv: f64, guess: (f64, f64)) -> (f64, f64) {
    let res = |c0: f64, d0: f64| {
        let j = p.coeffs(c0, d0).series(SeriesOrder::V0).jet(s, 1);
        (v - j[0], dv - j[1])
    };
    let (mut c0, mut d0) = guess;
    for _ in 0..8 {
        let (r1, r2) = res(c0, d0);
        let h = 1e-6;
        let (a1, a2) = res(c0 + h, d0);
        let (b1, b2) = res(c0, d0 + h);
        let (j11, j21, j12, j22) = ((a1 - r1) / h, (a2 - r2) / h, (b1 - r1) / h, (b2 - r2) / h);
        let det = j11 * j22 - j12 * j21;
        let dc = (r1 * j22 - r2 * j12) / det;
        let dd = (j11 * r2 - j21 * r1) / det;
        c0 -= dc;
        d0 -= dd;
        if dc.abs() + dd.abs() < 1e-14 {
            break;
        }
    }
    (c0, d0)
}

fn build(mut p: Problem) -> Result<InnerProfile> {
    let mut theta = find_theta(&p)?;
    let mut shot = p.shoot(theta)?;
    let s = 0.5 * p.xi_max;
    for _ in 0..6 {
        let tm = shot.t_min;
        let (c0, d0) = fit_constants(&p, s, interp(&shot.sol, 0, tm + s), interp(&shot.sol, 1, tm + s), (p.c0, p.d0));
        let change = (c0 - p.c0).abs();
        p.c0 = c0;
        p.d0 = d0;
        if change < 1e-10 {
            break;
        }
        let w = 1e-3;
        theta = match bisect_theta(&p, theta - w, theta + w)? {
            Some(t) => t,
            None => find_theta(&p)?,
        };
        shot = p.shoot(theta)?;
    }
    let p = &p;
    let sol = &shot.sol;
    let tm = shot.t_min;
    let (l, mf, b0) = (p.lambda, p.m as f64, p.b0);
    let cst = l * (mf - 2.0) / (mf - 1.0);
    let mut xi = Vec::new();
    let mut v = Vec::new();
    let mut dv = Vec::new();
    // linear manifold continued to the left of the starting point
    let (c, z) = p.manifold(theta);
    let period = 2.0 * std::f64::consts::PI / p.kappa;
    let mut t = -p.xi_max + tm;
    while t < 0.0 {
        let e = (z.0 * t).exp();
        let ez = (e * (z.1 * t).cos(), e * (z.1 * t).sin());
        let w = (c.0 * ez.0 - c.1 * ez.1, c.0 * ez.1 + c.1 * ez.0);
        xi.push(t - tm);
        v.push(1.0 + w.0);
        dv.push(w.0 * z.0 - w.1 * z.1);
        t += period / 32.0;
    }
    let mut resid: f64 = 0.0;
    for (i, y) in sol.y.iter().enumerate() {
        let s = sol.t[i] - tm;
        if s > p.xi_max {
            break;
        }
        xi.push(s);
        v.push(y[0]);
        dv.push(y[1]);
        let fi = -y[3] * y[1] + 0.5 * y[2] * y[2] + l / y[0] - l / ((mf - 1.0) * y[0].powf(mf - 1.0)) - cst;
        resid = resid.max(fi.abs());
    }
    let te = tm + p.xi_max;
    xi.push(p.xi_max);
    v.push(interp(sol, 0, te));
    dv.push(interp(sol, 1, te));
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::ConvergenceFailure("inner profile left v > 0".into()));
    }
    let (c0, d0) = (p.c0, p.d0);
    let xi0 = c0 * (lambda0c(p.m) / l).powf(0.25);
    Ok(InnerProfile {
        order: Order::Fourth,
        lambda: l,
        m: p.m,
        xi_max: p.xi_max,
        xi,
        v,
        dv,
        far: FarField::BiLaplacian { b0, c0, d0, xi0 },
        first_integral_residual: resid,
        left_rate: p.kappa,
    })
}

/// Inner profile on [−xi_max, xi_max] with min v at ξ = 0.
///
/// Fails if ξ₀ moves by more than 1e−3 when xi_max is doubled.
pub fn inner_bilaplacian_shoot(lambda: f64, m: u32, xi_max: f64) -> Result<InnerProfile> {
    check(lambda, m, xi_max)?;
    let prof = build(Problem::new(lambda, m, xi_max))?;
    let wide = build(Problem::new(lambda, m, 2.0 * xi_max))?;
    let (a, b) = (prof.xi0().unwrap(), wide.xi0().unwrap());
    if (a - b).abs() > 1e-3 {
        return Err(Error::ConvergenceFailure(format!("xi0 = {a:.6} at xi_max, {b:.6} at 2 xi_max")));
    }
    Ok(prof)
}

/// Cached profile at the default extent.
pub fn inner_bilaplacian(lambda: f64, m: u32) -> Result<Arc<InnerProfile>> {
    cached_profile(1, key(lambda, m, DEFAULT_XI_MAX), || inner_bilaplacian_shoot(lambda, m, DEFAULT_XI_MAX))
}

/// Leading-order contact point 1 − ε^{1/4}[18(m−1)/(λ(m−2))]^{1/4}.
pub fn contact_point_bilaplacian_leading(lambda: f64, eps: f64, m: u32) -> f64 {
    1.0 - eps.powf(0.25) * (lambda0c(m) / lambda).powf(0.25)
}

/// Two-term contact point.
pub fn contact_point_bilaplacian(lambda: f64, eps: f64, m: u32, xi0: f64) -> f64 {
    contact_point_bilaplacian_with(lambda, eps, m, xi0, false)
}

/// Contact point with the optional ε ln ε term.
pub fn contact_point_bilaplacian_with(lambda: f64, eps: f64, m: u32, xi0: f64, third: bool) -> f64 {
    1.0 - eps.powf(0.25) * ExpansionCoeffsB::new(lambda, m, xi0, 0.0).xbar_c(eps, third)
}

/// ‖u‖² of the large solution: 2[1 − (22/35)(18(m−1)/(λ(m−2)))^{1/4}ε^{1/4}].
pub fn norm_sq_bilaplacian(lambda: f64, eps: f64, m: u32) -> f64 {
    2.0 * (1.0 - 22.0 / 35.0 * (lambda0c(m) / lambda).powf(0.25) * eps.powf(0.25))
}

/// Outer layer w₀ + ε^{1/2}w_{1/4} in the stretched variable η.
pub fn outer_bilaplacian(eta: f64, eps: f64, xi0: f64) -> f64 {
    -1.0 + 3.0 * eta * eta - 2.0 * eta.powi(3) + eps.sqrt() * xi0 * eta * (eta - 1.0).powi(2)
}

/// Composite expansion of the large solution sampled on `grid`.
pub fn composite_bilaplacian(lambda: f64, eps: f64, m: u32, profile: &InnerProfile, grid: &Grid) -> Result<Field> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0,1), got {eps}")));
    }
    let FarField::BiLaplacian { b0, c0, xi0, .. } = profile.far else {
        return Err(Error::InvalidParams("composite_bilaplacian needs a fourth-order profile".into()));
    };
    if profile.lambda != lambda || profile.m != m {
        return Err(Error::InvalidParams("profile was built for different (lambda, m)".into()));
    }
    let xbar = ExpansionCoeffsB::new(lambda, m, xi0, 0.0).xbar_c(eps, false);
    let xc = 1.0 - eps.powf(0.25) * xbar;
    let e34 = eps.powf(0.75);
    let scale = eps.powf(0.25) * xbar;
    // inner minus the common part ε(b₀ξ² + c₀ξ)
    let rem = |s: f64| {
        let xi = (s - xc) / e34;
        eps * (profile.value(xi) - b0 * xi * xi - c0 * xi)
    };
    let h = 1e-6 * scale;
    let (r1, dr1) = (rem(1.0), (rem(1.0 + h) - rem(1.0 - h)) / (2.0 * h));
    Ok(Field::from_fn(grid.clone(), |x| {
        let s = x.abs();
        if s < xc {
            return -1.0 + eps * profile.value((s - xc) / e34);
        }
        let eta = (s - xc) / scale;
        // Hermite correction restoring u(1) = u′(1) = 0 exactly
        let fix = r1 * (3.0 * eta * eta - 2.0 * eta.powi(3)) + dr1 * scale * (eta.powi(3) - eta * eta);
        outer_bilaplacian(eta, eps, xi0) + rem(s) - fix
    }))
}

/// Far-field coefficients of the computed profile, for tail comparisons.
pub fn profile_coeffs(profile: &InnerProfile) -> Option<FarFieldCoeffs> {
    let FarField::BiLaplacian { b0, c0, d0, .. } = profile.far else {
        return None;
    };
    let mut c = FarFieldCoeffs::new(profile.lambda, profile.m);
    c.b0 = b0;
    c.c0 = c0;
    c.d0 = d0;
    Some(c)
}

/// Profile minus the v₀ series at ξ.
pub fn tail_residual(profile: &InnerProfile, xi: f64) -> Option<f64> {
    profile_coeffs(profile).map(|c| profile.value(xi) - c.series(SeriesOrder::V0).eval(xi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = 1.0 / n as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn outer_boundary_values() {
        let xi0 = -3.78;
        for eps in [0.0, 1e-3, 0.01] {
            let w = |e: f64| outer_bilaplacian(e, eps, xi0);
            assert!((w(0.0) + 1.0).abs() < 1e-15);
            assert!(w(1.0).abs() < 1e-15);
            let d = (w(1.0 + 1e-6) - w(1.0 - 1e-6)) / 2e-6;
            assert!(d.abs() < 1e-8, "w'(1) = {d}");
        }
    }

    #[test]
    fn outer_quadratures() {
        let xi0 = -3.78;
        let w0 = |e: f64| outer_bilaplacian(e, 0.0, xi0);
        let w14 = |e: f64| xi0 * e * (e - 1.0).powi(2);
        assert!((simpson(|e| w0(e).powi(2), 1000) - 13.0 / 35.0).abs() < 1e-11);
        assert!((simpson(|e| w0(e) * w14(e), 1000) + 11.0 * xi0 / 210.0).abs() < 1e-11);
    }

    #[test]
    fn norm_formula_matches_outer_integral() {
        let (lambda, eps, m) = (50.0, 1e-4f64, 4);
        let xbar = (lambda0c(m) / lambda).powf(0.25);
        let plateau = 1.0 - eps.powf(0.25) * xbar;
        let outer = eps.powf(0.25) * xbar * simpson(|e| outer_bilaplacian(e, 0.0, 0.0).powi(2), 1000);
        assert!((2.0 * (plateau + outer) - norm_sq_bilaplacian(lambda, eps, m)).abs() < 1e-11);
    }

    #[test]
    fn lambda0c_values() {
        assert_eq!(lambda0c(4), 27.0);
        assert_eq!(lambda0c(3), 36.0);
    }
}
