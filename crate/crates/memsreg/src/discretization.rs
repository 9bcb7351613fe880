//! Uniform grids on [−1,1], fields, and banded difference operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Order;

/// n interior nodes x_i = −1 + i·h, i = 1..=n, h = 2/(n+1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub const MIN_NODES: usize = 16;

    pub fn new(n: usize) -> Result<Grid> {
        if n < Self::MIN_NODES {
            return Err(Error::InvalidParams(format!(
                "grid needs at least {} interior nodes, got {n}",
                Self::MIN_NODES
            )));
        }
        Ok(Grid { n, h: 2.0 / (n as f64 + 1.0) })
    }

    /// Node i (0-based over interior nodes).
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        // symmetric evaluation so that x(i) = −x(n−1−i) exactly
        let j = i as f64 + 1.0;
        let k = (self.n - i) as f64;
        (j - k) / (self.n as f64 + 1.0)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Default interior node count for a given operator order and ε.
///
/// Order two resolves the ε^{3/2} transition layer, order four the ε^{3/4}
/// one. The count is odd so that x = 0 is a node.
///
/// Order four is capped at 4001 nodes: the condition number of Δ_h² grows
/// like h⁻⁴, and roundoff in A u then dominates the discretization error.
pub fn default_nodes(order: Order, eps: f64) -> usize {
    let n = match order {
        Order::Second if eps > 0.0 => (8.0 / eps.powf(1.5)).ceil().min(400_001.0),
        Order::Fourth if eps > 0.0 => (40.0 / eps.powf(0.75)).ceil().min(MAX_FOURTH_ORDER_NODES as f64),
        _ => 0.0,
    };
    (n as usize).max(513) | 1
}

/// Practical resolution limit for the clamped bi-Laplacian in double precision.
pub const MAX_FOURTH_ORDER_NODES: usize = 4001;

/// Deflection values at the interior nodes; boundary values are implied.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Field {
        Field { grid, values: vec![0.0; grid.n] }
    }

    /// Checked constructor: length must match and every value must exceed −1.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.n {
            return Err(Error::InvalidParams(format!(
                "field has {} values for {} nodes",
                values.len(),
                grid.n
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v > -1.0)) {
            return Err(Error::Domain(format!("field value {v} <= -1")));
        }
        Ok(Field { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Field {
        let values = (0..grid.n).map(|i| f(grid.x(i))).collect();
        Field { grid, values }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// max |u(x) − u(−x)|.
    pub fn asymmetry(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2).map(|i| (self.values[i] - self.values[n - 1 - i]).abs()).fold(0.0, f64::max)
    }
}

/// Trapezoid approximation of ∫ u² over [−1,1] with zero boundary values.
pub fn norm_sq(f: &Field) -> f64 {
    f.grid.h * f.values.iter().map(|v| v * v).sum::<f64>()
}

/// Which elastic operator a [`LinearOperator`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Δ_h with homogeneous Dirichlet closure.
    Laplacian,
    /// Δ_h² with clamped closure (ghost reflection).
    Biharmonic,
}

/// Symmetric banded operator stored by diagonals of its positive definite
/// form A (A = −Δ_h or A = Δ_h²): `diags[k][i] = A[i][i+k]`.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub kind: OperatorKind,
    pub grid: Grid,
    diags: Vec<Vec<f64>>,
}

/// Three-point Laplacian with u(±1) = 0.
pub fn build_laplacian(g: Grid) -> LinearOperator {
    let n = g.n;
    let s = 1.0 / (g.h * g.h);
    LinearOperator {
        kind: OperatorKind::Laplacian,
        grid: g,
        diags: vec![vec![2.0 * s; n], vec![-s; n - 1]],
    }
}

/// Five-point bi-Laplacian with u(±1) = u′(±1) = 0.
pub fn build_biharmonic(g: Grid) -> LinearOperator {
    let n = g.n;
    let s = 1.0 / g.h.powi(4);
    let mut d0 = vec![6.0 * s; n];
    d0[0] = 7.0 * s;
    d0[n - 1] = 7.0 * s;
    LinearOperator {
        kind: OperatorKind::Biharmonic,
        grid: g,
        diags: vec![d0, vec![-4.0 * s; n - 1], vec![s; n - 2]],
    }
}

/// The positive definite elastic operator for a model order.
pub fn elastic_operator(order: Order, g: Grid) -> LinearOperator {
    match order {
        Order::Second => build_laplacian(g),
        Order::Fourth => build_biharmonic(g),
    }
}

impl LinearOperator {
    /// Half bandwidth (1 or 2).
    pub fn bandwidth(&self) -> usize {
        self.diags.len() - 1
    }

    pub fn diag(&self, k: usize) -> &[f64] {
        &self.diags[k]
    }

    /// A u with A positive definite.
    pub fn apply_spd(&self, u: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = u.iter().zip(&self.diags[0]).map(|(a, b)| a * b).collect();
        for (k, d) in self.diags.iter().enumerate().skip(1) {
            for (i, &c) in d.iter().enumerate() {
                r[i] += c * u[i + k];
                r[i + k] += c * u[i];
            }
        }
        r
    }

    /// The operator as it appears in the PDE: Δ_h u or Δ_h² u.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut r = self.apply_spd(u);
        if self.kind == OperatorKind::Laplacian {
            r.iter_mut().for_each(|v| *v = -*v);
        }
        r
    }

    /// Banded matrix `A + diag(shift)`.
    pub fn shifted(&self, shift: &[f64]) -> SymBand {
        let mut diags = self.diags.clone();
        for (a, s) in diags[0].iter_mut().zip(shift) {
            *a += s;
        }
        SymBand { diags }
    }

    /// Banded matrix `c·A + diag(shift)`.
    pub fn scaled_shifted(&self, c: f64, shift: &[f64]) -> SymBand {
        let mut diags: Vec<Vec<f64>> =
            self.diags.iter().map(|d| d.iter().map(|v| c * v).collect()).collect();
        for (a, s) in diags[0].iter_mut().zip(shift) {
            *a += s;
        }
        SymBand { diags }
    }

    pub fn to_band(&self) -> SymBand {
        SymBand { diags: self.diags.clone() }
    }

    /// Smallest eigenvalue of A by inverse power iteration.
    pub fn smallest_eigenvalue(&self, iters: usize) -> Result<f64> {
        let lu = self.to_band().lu()?;
        let n = self.grid.n;
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        let mut mu = 0.0;
        for _ in 0..iters {
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= nv);
            let w = lu.solve(&v);
            mu = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            v = w;
        }
        Ok(1.0 / mu)
    }
}

/// Symmetric banded matrix by diagonals.
#[derive(Debug, Clone)]
pub struct SymBand {
    pub diags: Vec<Vec<f64>>,
}

impl SymBand {
    pub fn n(&self) -> usize {
        self.diags[0].len()
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<BandLu> {
        let k = self.diags.len() - 1;
        let n = self.n();
        let w = 3 * k + 1;
        let mut a = vec![0.0; n * w];
        for (d, diag) in self.diags.iter().enumerate() {
            for (i, &v) in diag.iter().enumerate() {
                a[i * w + d + k] = v; // (i, i+d)
                a[(i + d) * w + k - d] = v; // (i+d, i)
            }
        }
        BandLu::factor(n, k, a)
    }

    /// Number of negative eigenvalues, from the pivots of an unpivoted
    /// LDLᵀ factorization (Sylvester's law of inertia).
    pub fn negative_inertia(&self) -> usize {
        let k = self.diags.len() - 1;
        let n = self.n();
        // l[i][j] = L[i][i-1-j] for j < k
        let mut l = vec![0.0; n * k];
        let mut d = vec![0.0; n];
        let mut neg = 0;
        let tiny = f64::EPSILON * self.diags[0].iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for i in 0..n {
            for r in (i.saturating_sub(k))..i {
                // L[i][r] = (A[i][r] − Σ_{j<r} L[i][j] L[r][j] d_j) / d_r
                let mut s = self.diags[i - r][r];
                for j in (i.saturating_sub(k))..r {
                    s -= l[i * k + (i - 1 - j)] * l[r * k + (r - 1 - j)] * d[j];
                }
                l[i * k + (i - 1 - r)] = s / d[r];
            }
            let mut s = self.diags[0][i];
            for j in (i.saturating_sub(k))..i {
                let lij = l[i * k + (i - 1 - j)];
                s -= lij * lij * d[j];
            }
            if s.abs() < tiny {
                s = -tiny;
            }
            if s < 0.0 {
                neg += 1;
            }
            d[i] = s;
        }
        neg
    }
}

/// Banded LU factors with row pivoting.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    k: usize,
    w: usize,
    a: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.w + j + self.k - i]
    }

    fn factor(n: usize, k: usize, mut a: Vec<f64>) -> Result<BandLu> {
        let w = 3 * k + 1;
        let idx = |i: usize, j: usize| i * w + j + k - i;
        let mut piv = vec![0; n];
        for c in 0..n {
            let last = (c + k).min(n - 1);
            let mut p = c;
            let mut best = a[idx(c, c)].abs();
            for r in c + 1..=last {
                let v = a[idx(r, c)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::NoConvergence(format!("singular banded matrix at row {c}")));
            }
            piv[c] = p;
            let right = (c + 2 * k).min(n - 1);
            if p != c {
                for j in c..=right {
                    a.swap(idx(c, j), idx(p, j));
                }
            }
            let inv = 1.0 / a[idx(c, c)];
            for r in c + 1..=last {
                let lr = a[idx(r, c)] * inv;
                a[idx(r, c)] = lr;
                if lr != 0.0 {
                    for j in c + 1..=right {
                        a[idx(r, j)] -= lr * a[idx(c, j)];
                    }
                }
            }
        }
        Ok(BandLu { n, k, w, a, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, k) = (self.n, self.k);
        for c in 0..n {
            x.swap(c, self.piv[c]);
            let xc = x[c];
            if xc != 0.0 {
                for r in c + 1..=(c + k).min(n - 1) {
                    x[r] -= self.at(r, c) * xc;
                }
            }
        }
        for c in (0..n).rev() {
            let mut s = x[c];
            for j in c + 1..=(c + 2 * k).min(n - 1) {
                s -= self.at(c, j) * x[j];
            }
            x[c] = s / self.at(c, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_symmetric() {
        let g = Grid::new(101).unwrap();
        for i in 0..g.n {
            assert_eq!(g.x(i), -g.x(g.n - 1 - i));
        }
        assert_eq!(g.x(50), 0.0);
        assert!((g.h * (g.n as f64 + 1.0) - 2.0).abs() < 1e-15);
        assert!(Grid::new(8).is_err());
    }

    #[test]
    fn laplacian_exact_on_quadratics() {
        let g = Grid::new(40).unwrap();
        let f = Field::from_fn(g, |x| x * x - 1.0);
        let r = build_laplacian(g).apply(&f.values);
        for v in r {
            assert!((v - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn biharmonic_on_quartic() {
        let g = Grid::new(200).unwrap();
        let f = Field::from_fn(g, |x| (1.0 - x * x).powi(2));
        let r = build_biharmonic(g).apply(&f.values);
        for (i, v) in r.iter().enumerate().skip(3).take(g.n - 6) {
            assert!((v - 24.0).abs() < 1e-4, "node {i}: {v}");
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = Grid::new(30).unwrap();
        let z = vec![0.0; 30];
        assert!(build_laplacian(g).apply(&z).iter().all(|v| *v == 0.0));
        assert!(build_biharmonic(g).apply(&z).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn norm_of_parabola() {
        let g = Grid::new(400).unwrap();
        let f = Field::from_fn(g, |x| 1.0 - x * x);
        assert!((norm_sq(&f) - 16.0 / 15.0).abs() < 1e-4);
        let ones = Field::from_fn(g, |_| 1.0);
        assert!((norm_sq(&ones) - (2.0 - g.h)).abs() < 1e-12);
    }

    #[test]
    fn lu_solves_indefinite_system() {
        let g = Grid::new(50).unwrap();
        let op = build_biharmonic(g);
        let shift: Vec<f64> = (0..50).map(|i| -3.0e6 * ((i as f64) * 0.3).sin()).collect();
        let m = op.shifted(&shift);
        let lu = m.lu().unwrap();
        let x: Vec<f64> = (0..50).map(|i| (i as f64).cos()).collect();
        let mut b = op.apply_spd(&x);
        for i in 0..50 {
            b[i] += shift[i] * x[i];
        }
        let y = lu.solve(&b);
        for i in 0..50 {
            assert!((x[i] - y[i]).abs() < 1e-8, "{i}: {} {}", x[i], y[i]);
        }
    }

    #[test]
    fn inertia_counts_negative_eigenvalues() {
        let g = Grid::new(63).unwrap();
        let op = build_laplacian(g);
        let lam1 = op.smallest_eigenvalue(30).unwrap();
        let exact = 4.0 / (g.h * g.h) * (std::f64::consts::PI * g.h / 4.0).sin().powi(2);
        assert!((lam1 - exact).abs() < 1e-8 * exact);
        // eigenvalues 4/h² sin²(jπh/4), j = 1..n
        let ev = |j: usize| 4.0 / (g.h * g.h) * (j as f64 * std::f64::consts::PI * g.h / 4.0).sin().powi(2);
        let sigma = 0.5 * (ev(3) + ev(4));
        let m = op.shifted(&vec![-sigma; g.n]);
        assert_eq!(m.negative_inertia(), 3);
        assert_eq!(op.to_band().negative_inertia(), 0);
    }
}
