//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h0: 1e-3, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

/// Accepted steps with states and derivatives (for Hermite interpolation).
#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
    /// True if the stop predicate fired before `t_end`.
    pub stopped: bool,
}

impl<const N: usize> OdeSolution<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    /// Cubic Hermite interpolant of component `k` on step `i` (between t[i] and t[i+1]).
    pub fn hermite(&self, i: usize, k: usize, t: f64) -> f64 {
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.y[i][k], self.y[i + 1][k]);
        let (d0, d1) = (self.dy[i][k] * h, self.dy[i + 1][k] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn comb<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], a: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (kj, aj) in ks.iter().zip(a) {
        if *aj != 0.0 {
            for i in 0..N {
                out[i] += h * aj * kj[i];
            }
        }
    }
    out
}

/// Integrate y′ = f(t, y) from `t0` to `t_end` (either direction).
///
/// `stop(t, y)` is checked after every accepted step; returning true ends
/// the integration early.
pub fn integrate<const N: usize, F, S>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: OdeOptions,
    mut stop: S,
) -> Result<OdeSolution<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    S: FnMut(f64, &[f64; N]) -> bool,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut sol = OdeSolution { t: vec![t], y: vec![y], dy: vec![k1], stopped: false };
    let mut h = opts.h0.min(opts.h_max).min((t_end - t0).abs()) * dir;
    if h == 0.0 {
        return Ok(sol);
    }
    let mut steps = 0;
    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::ConvergenceFailure(format!("ODE step budget exhausted at t = {t}")));
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        let k2 = f(t + C[1] * h, &comb(&y, h, &[k1], &A2));
        let k3 = f(t + C[2] * h, &comb(&y, h, &[k1, k2], &A3));
        let k4 = f(t + C[3] * h, &comb(&y, h, &[k1, k2, k3], &A4));
        let k5 = f(t + C[4] * h, &comb(&y, h, &[k1, k2, k3, k4], &A5));
        let k6 = f(t + h, &comb(&y, h, &[k1, k2, k3, k4, k5], &A6));
        let yn = comb(&y, h, &[k1, k2, k3, k4, k5, k6], &B);
        let k7 = f(t + h, &yn);
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = 0.0;
        let mut finite = true;
        for i in 0..N {
            let mut e = 0.0;
            for (kj, ej) in ks.iter().zip(&E) {
                e += ej * kj[i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(yn[i].abs());
            let r = h * e / sc;
            err += r * r;
            finite &= yn[i].is_finite();
        }
        err = (err / N as f64).sqrt();
        if !finite || !err.is_finite() {
            h *= 0.25;
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(Error::ConvergenceFailure(format!("ODE state not finite at t = {t}")));
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = yn;
            k1 = k7;
            sol.t.push(t);
            sol.y.push(y);
            sol.dy.push(k1);
            if stop(t, &y) {
                sol.stopped = true;
                return Ok(sol);
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).abs().min(opts.h_max) * dir;
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::ConvergenceFailure(format!("ODE step underflow at t = {t}")));
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let s = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 10.0, opts, |_, _| false)
            .unwrap();
        let (t, y) = s.last();
        assert_eq!(t, 10.0);
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn backward_and_stop() {
        let s = integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            -5.0,
            OdeOptions::default(),
            |_, y| y[0] < 0.1,
        )
        .unwrap();
        assert!(s.stopped);
        let (t, _) = s.last();
        assert!(t < -2.3 && t > -2.5);
    }
}
