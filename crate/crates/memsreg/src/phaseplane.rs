//! Laplacian equilibria through the first integral of u″ = λ f̂(u).
//!
//! A symmetric steady state with interior minimum −1 + α exists at
//! λ = l_ε(α)², where l_ε is the phase-plane length from the turning point
//! u = −1 + α to u = 0 in the variable y = √λ x.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quad::integrate_breaks;
use crate::numerics::roots::golden_max;

/// l₀(α) = √(α/2)(√(1−α) + α ln(1+√(1−α)) − α ln √α).
pub fn l0(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("l0 needs alpha in (0,1], got {alpha}")));
    }
    let r = (1.0 - alpha).sqrt();
    Ok((0.5 * alpha).sqrt() * (r + alpha * (1.0 + r).ln() - 0.5 * alpha * alpha.ln()))
}

/// Φ(g) − Φ(a) divided by (g − a), written without cancellation.
///
/// With Φ(g) = −1/g + ε^{m−2}/((m−1)g^{m−1}) the quotient is
/// (1/(ag)) (1/(m−1)) Σ_{k=0}^{m−2} [1 − (ε/a)^{m−2−k}(ε/g)^k]. Each bracket
/// is expanded through 1 − ε/a = (a − ε)/a, so nothing cancels as a → ε.
/// `da` and `dg` are a − ε and g − ε.
fn bracket_quotient(a: f64, g: f64, da: f64, dg: f64, eps: f64, m: u32) -> f64 {
    let (p, q) = (eps / a, eps / g);
    let (omp, omq) = (da / a, dg / g);
    // 1 − x^i given 1 − x
    let one_minus = |x: f64, omx: f64, i: u32| {
        let mut s = 0.0;
        let mut xl = 1.0;
        for _ in 0..i {
            s += xl;
            xl *= x;
        }
        omx * s
    };
    let mut sum = 0.0;
    for k in 0..=(m - 2) {
        let i = m - 2 - k;
        sum += one_minus(p, omp, i) + p.powi(i as i32) * one_minus(q, omq, k);
    }
    sum / ((m as f64 - 1.0) * a * g)
}

/// Phase-plane length l_ε(α) = (1/√2)∫_{−1+α}^{0} [Φ(1+u) − Φ(α)]^{−1/2} du.
///
/// The turning-point singularity is removed by g = α + s², leaving the
/// smooth integrand 2(2Q)^{−1/2} on [0, √(1−α)].
pub fn l_eps(alpha: f64, eps: f64, m: u32) -> Result<f64> {
    l_eps_tol(alpha, eps, m, 1e-12)
}

/// [`l_eps`] with an explicit relative quadrature tolerance.
pub fn l_eps_tol(alpha: f64, eps: f64, m: u32, rel_tol: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidParams(format!("m must be >= 3, got {m}")));
    }
    if !(alpha > eps && alpha <= 1.0) {
        return Err(Error::Domain(format!("l_eps needs eps < alpha <= 1, got alpha = {alpha}, eps = {eps}")));
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let top = (1.0 - alpha).sqrt();
    let da = alpha - eps;
    let mut f = |s: f64| 2.0 / (2.0 * bracket_quotient(alpha, alpha + s * s, da, da + s * s, eps, m)).sqrt();
    // the integrand varies on the scale s² ~ α − ε near the turning point
    let mut breaks = vec![0.0];
    let scale = (alpha - eps).sqrt().min(alpha.sqrt());
    for k in (0..=8).rev() {
        let b = scale * 10f64.powi(-k);
        if b < top {
            breaks.push(b);
        }
    }
    breaks.push(top);
    Ok(integrate_breaks(&mut f, &breaks, 0.0, rel_tol)?.value)
}

/// Sampled l_ε(α) with its extrema.
#[derive(Debug, Clone, Serialize)]
pub struct LengthCurve {
    pub eps: f64,
    pub m: u32,
    /// Increasing α.
    pub alpha: Vec<f64>,
    pub l: Vec<f64>,
    /// α of the sampled local maximum.
    pub alpha_max: Option<f64>,
    /// α of the sampled local minimum (between the divergence and the maximum).
    pub alpha_min: Option<f64>,
}

/// Sample l_ε on `n` points: half uniform in log(α − ε) near the divergence,
/// half uniform in α above it. Sampling is spread over threads.
pub fn sample_length_curve(eps: f64, m: u32, n: usize) -> Result<LengthCurve> {
    if n < 20 {
        return Err(Error::InvalidParams(format!("need at least 20 samples, got {n}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParams(format!("eps must lie in [0,1), got {eps}")));
    }
    let split = eps + 0.1 * (1.0 - eps);
    let d_lo = 1e-6 * eps.max(1e-3);
    let d_hi = split - eps;
    let n_log = n / 2;
    let n_lin = n - n_log;
    let mut alpha = Vec::with_capacity(n);
    for i in 0..n_log {
        let t = i as f64 / n_log as f64;
        alpha.push(eps + d_lo * (d_hi / d_lo).powf(t));
    }
    for i in 0..n_lin {
        let t = i as f64 / (n_lin - 1) as f64;
        alpha.push(split + t * (1.0 - split));
    }
    let workers = std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1).clamp(1, 16);
    let chunk = alpha.len().div_ceil(workers);
    let parts: Vec<Result<Vec<f64>>> = std::thread::scope(|sc| {
        let handles: Vec<_> = alpha
            .chunks(chunk)
            .map(|c| sc.spawn(move || c.iter().map(|&a| l_eps(a, eps, m)).collect::<Result<Vec<f64>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("length worker panicked")).collect()
    });
    let mut l = Vec::with_capacity(n);
    for p in parts {
        l.extend(p?);
    }
    let mut alpha_max = None;
    let mut i_max = None;
    for i in (1..n - 1).rev() {
        if l[i] > l[i - 1] && l[i] >= l[i + 1] {
            alpha_max = Some(alpha[i]);
            i_max = Some(i);
            break;
        }
    }
    let mut alpha_min = None;
    if let Some(im) = i_max {
        for i in (1..im).rev() {
            if l[i] < l[i - 1] && l[i] <= l[i + 1] {
                alpha_min = Some(alpha[i]);
                break;
            }
        }
    }
    Ok(LengthCurve { eps, m, alpha, l, alpha_max, alpha_min })
}

/// Fold values read off a length curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveFolds {
    pub lambda_c1: Option<f64>,
    pub alpha_c1: Option<f64>,
    pub lambda_c2: Option<f64>,
    pub alpha_c2: Option<f64>,
}

/// Squares of the local max and min of l_ε, each refined by golden-section
/// search between the neighbouring samples.
pub fn fold_points_from_curve(c: &LengthCurve) -> Result<CurveFolds> {
    let mut out = CurveFolds { lambda_c1: None, alpha_c1: None, lambda_c2: None, alpha_c2: None };
    let (eps, m) = (c.eps, c.m);
    let neighbours = |a: f64| {
        let i = c.alpha.iter().position(|v| *v == a).expect("extremum is a sample");
        (c.alpha[i - 1], c.alpha[i + 1])
    };
    if let Some(a) = c.alpha_max {
        let (lo, hi) = neighbours(a);
        let mut err = None;
        let (x, v) = golden_max(
            |x| l_eps(x, eps, m).unwrap_or_else(|e| {
                err = Some(e);
                f64::NAN
            }),
            lo,
            hi,
            1e-10,
        );
        if let Some(e) = err {
            return Err(e);
        }
        out.alpha_c1 = Some(x);
        out.lambda_c1 = Some(v * v);
    }
    if let Some(a) = c.alpha_min {
        let (lo, hi) = neighbours(a);
        // search in log(α − ε), where the minimum is well scaled
        let (tlo, thi) = ((lo - eps).ln(), (hi - eps).ln());
        let mut err = None;
        let (t, v) = golden_max(
            |t| -l_eps(eps + t.exp(), eps, m).unwrap_or_else(|e| {
                err = Some(e);
                f64::NAN
            }),
            tlo,
            thi,
            1e-10,
        );
        if let Some(e) = err {
            return Err(e);
        }
        out.alpha_c2 = Some(eps + t.exp());
        out.lambda_c2 = Some(v * v);
    }
    Ok(out)
}

/// Fold values of l_ε from a 400-point curve.
pub fn fold_points(eps: f64, m: u32) -> Result<CurveFolds> {
    fold_points_from_curve(&sample_length_curve(eps, m, 400)?)
}

/// Location α_c and value λ_c = l₀(α_c)² of the fold at ε = 0.
pub fn classical_fold() -> (f64, f64) {
    let (a, l) = golden_max(|a| l0(a).unwrap_or(f64::NAN), 0.3, 0.9, 1e-12);
    (a, l * l)
}

/// Coefficient C(m) in λ_c^(1)(ε) = λ_c + C ε^{m−2} + O(ε^{2(m−2)}).
///
/// C = α_c^{7/2−m}/(m−1) √(λ_c/2) ∫_0^{1/α_c−1} (v/(v+1))^{−1/2} ((1+v)^{m−1} − 1)/(v(1+v)^{m−2}) dv,
/// evaluated at the unperturbed α_c.
pub fn lambda_c1_coefficient(m: u32) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidParams(format!("m must be >= 3, got {m}")));
    }
    let (ac, lc) = classical_fold();
    let top = (1.0 / ac - 1.0).sqrt();
    // v = s²: 2√(1+s²) Σ_{k<m−1} (1+s²)^k / (1+s²)^{m−2}
    let mut f = |s: f64| {
        let w = 1.0 + s * s;
        let sum: f64 = (0..m - 1).map(|k| w.powi(k as i32)).sum();
        2.0 * w.sqrt() * sum / w.powi(m as i32 - 2)
    };
    let integral = integrate_breaks(&mut f, &[0.0, top], 0.0, 1e-13)?.value;
    Ok(ac.powf(3.5 - m as f64) / (m as f64 - 1.0) * (0.5 * lc).sqrt() * integral)
}

/// Regular expansion of the principal fold: λ_c + C(m) ε^{m−2}.
pub fn lambda_c1_expansion(eps: f64, m: u32) -> Result<f64> {
    let (_, lc) = classical_fold();
    Ok(lc + lambda_c1_coefficient(m)? * eps.powi(m as i32 - 2))
}

/// Leading-order lower and upper bounds on l_ε(ε(1+η)) for small η:
/// −ε^{3/2} ln η/√(m−2) and −(ε^{1/2}/√2)√((m−1)/(m−2)) ln η.
pub fn divergence_bounds(eta: f64, eps: f64, m: u32) -> Result<(f64, f64)> {
    if !(eta > 0.0 && eps > 0.0 && eps * (1.0 + eta) <= 1.0) {
        return Err(Error::Domain(format!("need eta > 0 and eps(1+eta) <= 1, got eta = {eta}, eps = {eps}")));
    }
    if m < 3 {
        return Err(Error::InvalidParams(format!("m must be >= 3, got {m}")));
    }
    let mm = m as f64;
    let ln = eta.ln();
    let lower = -eps.powf(1.5) * ln / (mm - 2.0).sqrt();
    let upper = -(eps / 2.0).sqrt() * ((mm - 1.0) / (mm - 2.0)).sqrt() * ln;
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l0_endpoints() {
        assert_eq!(l0(1.0).unwrap(), 0.0);
        assert!(l0(1e-12).unwrap() < 1e-5);
        assert!(l0(0.0).is_err() && l0(1.1).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for &a in &[0.05, 0.2, 0.612, 0.9, 0.999] {
            let q = l_eps(a, 0.0, 4).unwrap();
            let c = l0(a).unwrap();
            assert!(((q - c) / c).abs() < 1e-10, "{a}: {q} vs {c}");
        }
        assert!(l_eps(0.1, 0.1, 4).is_err());
    }

    #[test]
    fn classical_fold_value() {
        let (a, l) = classical_fold();
        assert!((a - 0.612).abs() < 5e-4, "{a}");
        assert!((l - 0.350004).abs() < 1e-6, "{l}");
    }
}
