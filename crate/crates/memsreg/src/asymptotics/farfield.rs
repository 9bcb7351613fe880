//! Truncated far-field series of the bi-Laplacian inner problem.
//!
//! Each series is a finite sum of monomials c·ξ^p·(ln ξ)^q, so values and
//! derivatives of any order are exact.

use serde::{Deserialize, Serialize};

/// One monomial c·ξ^p·(ln ξ)^q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub c: f64,
    pub p: i32,
    pub q: u32,
}

/// Sum of monomials.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub terms: Vec<Term>,
}

impl Series {
    fn push(&mut self, c: f64, p: i32, q: u32) {
        if c != 0.0 {
            self.terms.push(Term { c, p, q });
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let l = xi.ln();
        self.terms.iter().map(|t| t.c * xi.powi(t.p) * l.powi(t.q as i32)).sum()
    }

    pub fn derivative(&self) -> Series {
        let mut out = Series::default();
        for t in &self.terms {
            out.push(t.c * t.p as f64, t.p - 1, t.q);
            if t.q > 0 {
                out.push(t.c * t.q as f64, t.p - 1, t.q - 1);
            }
        }
        out
    }

    /// Value and first `k` derivatives at ξ.
    pub fn jet(&self, xi: f64, k: usize) -> Vec<f64> {
        let mut s = self.clone();
        let mut out = Vec::with_capacity(k + 1);
        for _ in 0..=k {
            out.push(s.eval(xi));
            s = s.derivative();
        }
        out
    }
}

/// Which correction of the inner expansion v = v₀ + ε^{1/2}v₁ + εv₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesOrder {
    V0,
    V1,
    V2,
}

/// Constants entering the series. Those not fixed by the first integral are free inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldCoeffs {
    pub lambda: f64,
    pub m: u32,
    pub b0: f64,
    pub c0: f64,
    pub d0: f64,
    pub a1: f64,
    pub c1: f64,
    pub d1: f64,
    pub gamma1: f64,
    pub g1: f64,
    pub a2: f64,
    pub c2: f64,
    pub d2: f64,
    pub gamma2: f64,
    pub g2: f64,
}

impl FarFieldCoeffs {
    /// Leading-order set with b₀ from the first integral and all other constants zero.
    pub fn new(lambda: f64, m: u32) -> Self {
        FarFieldCoeffs {
            lambda,
            m,
            b0: (lambda * (m as f64 - 2.0) / (2.0 * (m as f64 - 1.0))).sqrt(),
            c0: 0.0,
            d0: 0.0,
            a1: 0.0,
            c1: 0.0,
            d1: 0.0,
            gamma1: 0.0,
            g1: 0.0,
            a2: 0.0,
            c2: 0.0,
            d2: 0.0,
            gamma2: 0.0,
            g2: 0.0,
        }
    }

    /// Kronecker flag [m = 3].
    pub fn delta3(&self) -> f64 {
        if self.m == 3 {
            1.0
        } else {
            0.0
        }
    }

    /// Coefficient of 1/ξ² in v₀.
    pub fn g0(&self) -> f64 {
        let (l, b0, c0, d0, d3) = (self.lambda, self.b0, self.c0, self.d0, self.delta3());
        l * (77.0 * l - 540.0 * c0 * c0 * b0 + 180.0 * d3 * b0 * b0 + 360.0 * b0 * b0 * d0)
            / (21600.0 * b0.powi(5))
    }

    /// Coefficient of 1/ξ in v₁.
    pub fn f1(&self) -> f64 {
        let (l, b0, c0, d0, a1, c1, d3) =
            (self.lambda, self.b0, self.c0, self.d0, self.a1, self.c1, self.delta3());
        -l * (-36.0 * c0 * c0 * a1 * b0 + 72.0 * d0 * a1 * b0 * b0 - 24.0 * c1 * b0.powi(3) - 25.0 * l * a1
            + 36.0 * d3 * a1 * b0 * b0)
            / (288.0 * b0.powi(6))
    }

    pub fn eta3(&self) -> f64 {
        let (l, b0, c0, d0, a1, c1, a2, d3) =
            (self.lambda, self.b0, self.c0, self.d0, self.a1, self.c1, self.a2, self.delta3());
        l * (-18.0 * d3 * a1 * a1 * b0 * b0 + 16.0 * l * a1 * a1 + 9.0 * a2 * c0 * b0.powi(3)
            + 9.0 * a1 * a1 * c0 * c0 * b0
            - 36.0 * a1 * a1 * b0 * b0 * d0
            + 9.0 * a1 * c1 * b0.powi(3))
            / (18.0 * b0.powi(7))
    }

    pub fn eta4(&self) -> f64 {
        let (l, b0, c0, a1, a2) = (self.lambda, self.b0, self.c0, self.a1, self.a2);
        (6.0 * l * c0 * a1 * a1 + 4.0 * l * a2 * b0 * b0) / (4.0 * b0.powi(5))
    }

    pub fn eta5(&self) -> f64 {
        3.0 * self.lambda * self.a1 * self.a1 / (2.0 * self.b0.powi(4))
    }

    pub fn kappa2(&self) -> f64 {
        self.lambda * self.lambda * self.a1 * self.a1 / (12.0 * self.b0.powi(7))
    }

    pub fn b2(&self) -> f64 {
        let (l, b0, c0, a1, c1, a2) = (self.lambda, self.b0, self.c0, self.a1, self.c1, self.a2);
        -(14.0 * l * a1 * a1 - 12.0 * a2 * c0 * b0.powi(3) + 9.0 * a1 * a1 * c0 * c0 * b0
            - 12.0 * a1 * c1 * b0.powi(3))
            / (8.0 * b0.powi(4))
    }

    pub fn phi2(&self) -> f64 {
        let (l, b0, c0, a1, a2, g1) = (self.lambda, self.b0, self.c0, self.a1, self.a2, self.gamma1);
        -(-4.0 * l * l * a2 * b0 * b0 + 7.0 * l * l * c0 * a1 * a1 + 720.0 * a1 * g1 * b0.powi(7))
            / (96.0 * b0.powi(8))
    }

    pub fn f2(&self) -> f64 {
        let (l, b0, c0, d0, d3) = (self.lambda, self.b0, self.c0, self.d0, self.delta3());
        let (a1, c1, d1, gm1, g1, a2, c2) =
            (self.a1, self.c1, self.d1, self.gamma1, self.g1, self.a2, self.c2);
        l * c0 * (36.0 * c0 * c0 * b0 + 341.0 * l - 72.0 * b0 * b0 * d0 - 36.0 * d3 * b0 * b0) * a1 * a1
            / (1152.0 * b0.powi(8))
            - (l * c0 * c1 + l * d1 * b0 + 60.0 * g1 * b0.powi(4) + 48.0 * gm1 * b0.powi(4)) * a1
                / (8.0 * b0.powi(5))
            + l * (-72.0 * b0 * b0 * d0 + 25.0 * l + 36.0 * c0 * c0 * b0 - 36.0 * d3 * b0 * b0) * a2
                / (288.0 * b0.powi(6))
            + l * c2 / (12.0 * b0.powi(3))
    }

    pub fn series(&self, which: SeriesOrder) -> Series {
        let (l, b0, c0, d0, a1) = (self.lambda, self.b0, self.c0, self.d0, self.a1);
        let mut s = Series::default();
        match which {
            SeriesOrder::V0 => {
                s.push(b0, 2, 0);
                s.push(c0, 1, 0);
                s.push(d0, 0, 0);
                s.push(l / (6.0 * b0 * b0), 0, 1);
                s.push(l * l / (360.0 * b0.powi(5)), -2, 1);
                s.push(l * c0 / (12.0 * b0.powi(3)), -1, 0);
                s.push(self.g0(), -2, 0);
            }
            SeriesOrder::V1 => {
                s.push(a1, 3, 0);
                s.push(3.0 * a1 * c0 / (2.0 * b0), 2, 0);
                s.push(self.c1, 1, 0);
                s.push(self.d1, 0, 0);
                s.push(l * c0 * a1 / (2.0 * b0.powi(4)), 0, 1);
                s.push(l * a1 / b0.powi(3), 1, 1);
                s.push(l * l * a1 / (24.0 * b0.powi(6)), -1, 1);
                s.push(self.gamma1, -2, 1);
                s.push(self.f1(), -1, 0);
                s.push(self.g1, -2, 0);
            }
            SeriesOrder::V2 => {
                s.push(self.a2, 3, 0);
                s.push(self.b2(), 2, 0);
                s.push(self.c2, 1, 0);
                s.push(self.d2, 0, 0);
                s.push(self.kappa2(), 0, 2);
                s.push(self.eta3(), 0, 1);
                s.push(self.eta4(), 1, 1);
                s.push(self.eta5(), 2, 1);
                s.push(self.phi2(), -1, 1);
                s.push(self.gamma2, -2, 1);
                s.push(self.f2(), -1, 0);
                s.push(self.g2, -2, 0);
            }
        }
        s
    }
}

/// Evaluate one truncated far-field series at ξ (meant for ξ ≥ 10).
pub fn farfield_series(which: SeriesOrder, coeffs: &FarFieldCoeffs, xi: f64) -> f64 {
    coeffs.series(which).eval(xi)
}

/// Residuals of the first integral −v‴v′ + ½v″² + λ/v − λ/((m−1)v^{m−1}) − λ(m−2)/(m−1)
/// at orders 1, ε^{1/2} and ε for v = v₀ + ε^{1/2}v₁ + εv₂.
pub fn first_integral_orders(coeffs: &FarFieldCoeffs, xi: f64) -> [f64; 3] {
    let l = coeffs.lambda;
    let m = coeffs.m as f64;
    let a = coeffs.series(SeriesOrder::V0).jet(xi, 3);
    let b = coeffs.series(SeriesOrder::V1).jet(xi, 3);
    let c = coeffs.series(SeriesOrder::V2).jet(xi, 3);
    let v = a[0];
    let cst = l * (m - 2.0) / (m - 1.0);
    let i0 = -a[3] * a[1] + 0.5 * a[2] * a[2] + l / v - l / ((m - 1.0) * v.powf(m - 1.0)) - cst;
    // first and second variations of the potential part λ/v − λ/((m−1)v^{m−1})
    let p1 = l * (-1.0 / (v * v) + 1.0 / v.powf(m));
    let p2 = l * (2.0 / v.powi(3) - m / v.powf(m + 1.0));
    let i1 = -(a[3] * b[1] + b[3] * a[1]) + a[2] * b[2] + p1 * b[0];
    let i2 = -(a[3] * c[1] + c[3] * a[1] + b[3] * b[1])
        + a[2] * c[2]
        + 0.5 * b[2] * b[2]
        + p1 * c[0]
        + 0.5 * p2 * b[0] * b[0];
    [i0, i1, i2]
}
