//! Norm-constrained continuation of steady states `A u + λ f̂(u) = 0`.
//!
//! Here A = −Δ_h (order two) or Δ_h² (order four) and f̂ = force/λ. The
//! branch is parametrized by s = ‖u‖₂² with λ as an unknown, so Newton
//! solves a bordered system: two banded solves per iteration.

use serde::Serialize;

use crate::discretization::{default_nodes, elastic_operator, norm_sq, Field, Grid, LinearOperator};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Order};
use crate::numerics::fit::parabola_vertex;

/// Newton settings.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Bound on the Jacobi-scaled residual max|F_i/A_ii| and on |‖u‖² − s|.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, max_iter: 50 }
    }
}

/// Sign of the smallest eigenvalue of the linearization A + λ diag(f̂′(u)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Unknown,
    Stable,
    Unstable,
}

/// One steady state on a branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub lambda: f64,
    pub norm_sq: f64,
    pub min_u: f64,
    /// Profile; dropped for memory when tracing with `keep_fields = false`.
    pub field: Option<Field>,
    pub stability: Stability,
}

/// Branch traced by increasing s.
#[derive(Debug, Clone)]
pub struct Branch {
    pub eps: f64,
    pub m: u32,
    pub order: Order,
    pub n: usize,
    pub points: Vec<BranchPoint>,
    /// Norm at which an ε = 0 branch ended because min u approached −1.
    pub ended_at: Option<f64>,
}

/// Fold values along a branch: λ_c1 (first local max), λ_c2 (following local min).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldSet {
    pub eps: f64,
    pub m: u32,
    pub order: u32,
    pub lambda_c1: Option<f64>,
    pub s_c1: Option<f64>,
    pub lambda_c2: Option<f64>,
    pub s_c2: Option<f64>,
}

impl FoldSet {
    pub fn has_two_folds(&self) -> bool {
        self.lambda_c1.is_some() && self.lambda_c2.is_some()
    }
}

/// Continuation settings.
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    pub s_max: f64,
    /// Initial and maximal step in s.
    pub ds0: f64,
    /// Smallest step before giving up.
    pub ds_min: f64,
    /// Largest relative change of λ accepted in one step.
    pub max_rel_dlambda: f64,
    pub keep_fields: bool,
    pub stability: bool,
    /// End the trace once a local min of λ following a local max is confirmed.
    pub stop_after_folds: bool,
}

impl TraceOptions {
    pub fn new(s_max: f64, ds0: f64) -> Self {
        TraceOptions {
            s_max,
            ds0,
            ds_min: 1e-9,
            max_rel_dlambda: 0.2,
            keep_fields: true,
            stability: false,
            stop_after_folds: false,
        }
    }
}

/// Steady-state solver on a fixed grid.
#[derive(Debug, Clone)]
pub struct EquilibriumSolver {
    pub params: ModelParams,
    pub grid: Grid,
    pub op: LinearOperator,
    pub newton: NewtonOptions,
}

impl EquilibriumSolver {
    pub fn new(eps: f64, m: u32, order: Order, n: usize) -> Result<Self> {
        let params = ModelParams::new(0.0, eps, m, order)?;
        let grid = Grid::new(n)?;
        Ok(EquilibriumSolver { params, grid, op: elastic_operator(order, grid), newton: NewtonOptions::default() })
    }

    /// Solver with the default resolution for this ε.
    pub fn with_default_grid(eps: f64, m: u32, order: Order) -> Result<Self> {
        Self::new(eps, m, order, default_nodes(order, eps))
    }

    fn f_and_df(&self, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut f = Vec::with_capacity(u.len());
        let mut df = Vec::with_capacity(u.len());
        for &v in u {
            let g = 1.0 + v;
            if !(g > 0.0) {
                return Err(Error::Domain(format!("gap closed in Newton iterate: u = {v}")));
            }
            f.push(self.params.fhat_g(g));
            df.push(self.params.dfhat_g(g));
        }
        Ok((f, df))
    }

    /// F = A u + λ f̂(u).
    pub fn residual_vector(&self, u: &[f64], lambda: f64) -> Result<Vec<f64>> {
        let mut r = self.op.apply_spd(u);
        let (f, _) = self.f_and_df(u)?;
        for (ri, fi) in r.iter_mut().zip(f) {
            *ri += lambda * fi;
        }
        Ok(r)
    }

    /// Jacobi-scaled residual max|F_i / A_ii|, insensitive to the 1/h² (1/h⁴) scale of A.
    pub fn scaled_residual(&self, u: &[f64], lambda: f64) -> Result<f64> {
        let r = self.residual_vector(u, lambda)?;
        Ok(r.iter().zip(self.op.diag(0)).map(|(a, d)| (a / d).abs()).fold(0.0, f64::max))
    }

    fn point(&self, u: Vec<f64>, lambda: f64) -> BranchPoint {
        let field = Field { grid: self.grid, values: u };
        BranchPoint {
            lambda,
            norm_sq: norm_sq(&field),
            min_u: field.min(),
            field: Some(field),
            stability: Stability::Unknown,
        }
    }

    /// Largest t ≤ 1 keeping every gap above 5% of its current value.
    fn damping(u: &[f64], du: &[f64]) -> f64 {
        let mut t: f64 = 1.0;
        for (a, d) in u.iter().zip(du) {
            let g = 1.0 + a;
            if *d < 0.0 {
                // g + t d > 0.05 g  <=>  t < 0.95 g / (−d)
                t = t.min(0.95 * g / (-d) * 0.999);
            }
        }
        t
    }

    /// Steady state with ‖u‖² = s_target, starting from (init_u, init_lambda).
    pub fn solve_at_norm(&self, s_target: f64, init_u: &[f64], init_lambda: f64) -> Result<BranchPoint> {
        let n = self.grid.n;
        if s_target == 0.0 {
            return Ok(self.point(vec![0.0; n], 0.0));
        }
        let h = self.grid.h;
        let mut u = init_u.to_vec();
        let mut lambda = init_lambda;
        for _ in 0..=self.newton.max_iter {
            let (f, df) = self.f_and_df(&u)?;
            let mut fres = self.op.apply_spd(&u);
            for i in 0..n {
                fres[i] += lambda * f[i];
            }
            let gres = h * u.iter().map(|v| v * v).sum::<f64>() - s_target;
            let scaled = fres.iter().zip(self.op.diag(0)).map(|(a, d)| (a / d).abs()).fold(0.0, f64::max);
            if scaled < self.newton.tol && gres.abs() < self.newton.tol {
                return Ok(self.point(u, lambda));
            }
            let shift: Vec<f64> = df.iter().map(|d| lambda * d).collect();
            let lu = self.op.shifted(&shift).lu()?;
            let a = lu.solve(&fres);
            let b = lu.solve(&f);
            let ca: f64 = 2.0 * h * u.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>();
            let cb: f64 = 2.0 * h * u.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>();
            if cb == 0.0 || !cb.is_finite() {
                return Err(Error::NoConvergence("degenerate bordered system".into()));
            }
            let dlam = (gres - ca) / cb;
            let du: Vec<f64> = a.iter().zip(&b).map(|(x, y)| -x - dlam * y).collect();
            let t = Self::damping(&u, &du);
            if t < 1e-6 || !dlam.is_finite() {
                return Err(Error::NoConvergence(format!("Newton step collapsed (t = {t:.1e})")));
            }
            for i in 0..n {
                u[i] += t * du[i];
            }
            lambda += t * dlam;
        }
        Err(Error::NoConvergence(format!(
            "no convergence at s = {s_target} after {} iterations",
            self.newton.max_iter
        )))
    }

    /// Steady state at fixed λ by damped Newton from `init_u`.
    pub fn solve_at_lambda(&self, lambda: f64, init_u: &[f64]) -> Result<BranchPoint> {
        let n = self.grid.n;
        let mut u = init_u.to_vec();
        for _ in 0..=self.newton.max_iter {
            let (f, df) = self.f_and_df(&u)?;
            let mut fres = self.op.apply_spd(&u);
            for i in 0..n {
                fres[i] += lambda * f[i];
            }
            let scaled = fres.iter().zip(self.op.diag(0)).map(|(a, d)| (a / d).abs()).fold(0.0, f64::max);
            if scaled < self.newton.tol {
                return Ok(self.point(u, lambda));
            }
            let shift: Vec<f64> = df.iter().map(|d| lambda * d).collect();
            let mut du = self.op.shifted(&shift).lu()?.solve(&fres);
            du.iter_mut().for_each(|v| *v = -*v);
            let t = Self::damping(&u, &du);
            if t < 1e-6 {
                return Err(Error::NoConvergence(format!("Newton step collapsed (t = {t:.1e})")));
            }
            for i in 0..n {
                u[i] += t * du[i];
            }
        }
        Err(Error::NoConvergence(format!("no convergence at lambda = {lambda}")))
    }

    /// Stability from the inertia of the symmetric linearization.
    pub fn stability(&self, u: &[f64], lambda: f64) -> Result<Stability> {
        let (_, df) = self.f_and_df(u)?;
        let shift: Vec<f64> = df.iter().map(|d| lambda * d).collect();
        let neg = self.op.shifted(&shift).negative_inertia();
        Ok(if neg == 0 { Stability::Stable } else { Stability::Unstable })
    }

    /// Direction of the small-norm branch: u ≈ λ φ₁ with A φ₁ = −f̂(0).
    fn initial_direction(&self) -> Result<Vec<f64>> {
        let f0 = self.params.fhat_g(1.0);
        let rhs = vec![-f0; self.grid.n];
        Ok(self.op.to_band().lu()?.solve(&rhs))
    }

    /// March s from 0 to `opts.s_max`.
    pub fn trace(&self, opts: &TraceOptions) -> Result<Branch> {
        self.trace_with(opts, |_| false)
    }

    /// As [`trace`](Self::trace); `stop` sees each accepted point and may end the march.
    pub fn trace_with<S: FnMut(&BranchPoint) -> bool>(&self, opts: &TraceOptions, mut stop: S) -> Result<Branch> {
        if !(opts.ds0 > 0.0) {
            return Err(Error::InvalidParams("ds0 must be positive".into()));
        }
        let n = self.grid.n;
        let h = self.grid.h;
        let phi1 = self.initial_direction()?;
        let phi_norm = h * phi1.iter().map(|v| v * v).sum::<f64>();
        let mut points: Vec<BranchPoint> = Vec::new();
        let origin = self.point(vec![0.0; n], 0.0);
        // last two accepted states for the secant predictor
        let mut prev: (f64, f64, Vec<f64>) = (0.0, 0.0, vec![0.0; n]);
        let mut cur: (f64, f64, Vec<f64>) = (0.0, 0.0, vec![0.0; n]);
        let mut have_two = false;
        let keep = |p: BranchPoint, pts: &mut Vec<BranchPoint>| {
            let mut p = p;
            if !opts.keep_fields {
                p.field = None;
            }
            pts.push(p);
        };
        let mut o = origin;
        if opts.stability {
            o.stability = Stability::Stable;
        }
        keep(o, &mut points);
        let mut s = 0.0;
        let mut ds = opts.ds0;
        let mut successes = 0;
        let mut fold_state = FoldTracker::default();
        let mut ended_at = None;
        while s < opts.s_max {
            let st = (s + ds).min(opts.s_max);
            let (ug, lg) = if !have_two {
                let l = (st / phi_norm).sqrt();
                (phi1.iter().map(|v| l * v).collect::<Vec<f64>>(), l)
            } else {
                let t = (st - cur.0) / (cur.0 - prev.0);
                let ug: Vec<f64> = cur.2.iter().zip(&prev.2).map(|(a, b)| a + t * (a - b)).collect();
                (ug, cur.1 + t * (cur.1 - prev.1))
            };
            let ug = if ug.iter().all(|v| *v > -1.0) { ug } else { cur.2.clone() };
            let attempt = self.solve_at_norm(st, &ug, lg);
            let accepted = match attempt {
                Ok(p) => {
                    let lam_scale = cur.1.abs().max(1e-12);
                    let dl = (p.lambda - cur.1).abs() / lam_scale;
                    let g_old = 1.0 + cur.2.iter().copied().fold(f64::INFINITY, f64::min);
                    let g_new = 1.0 + p.min_u;
                    let g_ok = !have_two || (g_new / g_old < 2.0 && g_old / g_new < 2.0);
                    if have_two && (dl > opts.max_rel_dlambda || !g_ok) && ds > opts.ds0 / 64.0 {
                        None
                    } else {
                        Some(p)
                    }
                }
                Err(Error::NoConvergence(_)) | Err(Error::Domain(_)) => None,
                Err(e) => return Err(e),
            };
            match accepted {
                None => {
                    ds *= 0.5;
                    successes = 0;
                    if ds < opts.ds_min {
                        // without regularization the branch runs into the singular solution
                        if self.params.eps == 0.0 && points.len() > 2 {
                            ended_at = Some(s);
                            break;
                        }
                        return Err(Error::NoConvergence(format!("continuation step underflow at s = {s}")));
                    }
                }
                Some(mut p) => {
                    let u = p.field.as_ref().map(|f| f.values.clone()).expect("solver returns fields");
                    if opts.stability {
                        p.stability = self.stability(&u, p.lambda)?;
                    }
                    prev = std::mem::replace(&mut cur, (st, p.lambda, u));
                    have_two = true;
                    s = st;
                    let done_folds = opts.stop_after_folds && fold_state.push(p.lambda);
                    let user_stop = stop(&p);
                    keep(p, &mut points);
                    if done_folds || user_stop {
                        break;
                    }
                    successes += 1;
                    if successes >= 3 {
                        ds = (ds * 1.3).min(opts.ds0);
                        successes = 0;
                    }
                }
            }
        }
        Ok(Branch { eps: self.params.eps, m: self.params.m, order: self.params.order, n, points, ended_at })
    }

    /// Upper-branch steady state at a given λ > λ_c2.
    ///
    /// Traces past the second fold until λ exceeds the target, then corrects
    /// at fixed λ from the interpolated profile.
    pub fn upper_branch_at(&self, lambda: f64, ds0: f64) -> Result<BranchPoint> {
        let s_max = 2.0 * (1.0 - self.params.eps).powi(2) * 0.999;
        let mut opts = TraceOptions::new(s_max, ds0);
        opts.keep_fields = false;
        let mut tracker = FoldTracker::default();
        let mut last: Vec<(f64, Vec<f64>)> = Vec::new();
        let mut found = false;
        self.trace_with(&opts, |p| {
            let past = tracker.push(p.lambda);
            let u = p.field.as_ref().unwrap().values.clone();
            if last.len() == 2 {
                last.remove(0);
            }
            last.push((p.lambda, u));
            if (past || tracker.after_min) && p.lambda >= lambda {
                found = true;
                return true;
            }
            false
        })?;
        if !found || last.len() < 2 {
            return Err(Error::NoConvergence(format!("upper branch did not reach lambda = {lambda}")));
        }
        let (l0, u0) = &last[0];
        let (l1, u1) = &last[1];
        let t = if l1 != l0 { (lambda - l0) / (l1 - l0) } else { 1.0 };
        let guess: Vec<f64> = u0.iter().zip(u1).map(|(a, b)| a + t * (b - a)).collect();
        self.solve_at_lambda(lambda, &guess).or_else(|_| self.solve_at_lambda(lambda, u1))
    }
}

/// Online detection of "local max then local min" in a λ sequence.
#[derive(Debug, Default, Clone)]
struct FoldTracker {
    last: Option<f64>,
    rising: bool,
    seen_max: bool,
    run_min: f64,
    after_min: bool,
}

impl FoldTracker {
    /// Returns true once λ has turned back up (by 10%) after a max and a min.
    fn push(&mut self, l: f64) -> bool {
        if let Some(prev) = self.last {
            if !self.seen_max {
                if l > prev {
                    self.rising = true;
                } else if self.rising && l < prev {
                    self.seen_max = true;
                    self.run_min = l;
                }
            } else if !self.after_min {
                if l < self.run_min {
                    self.run_min = l;
                } else if l > 1.1 * self.run_min {
                    self.after_min = true;
                    self.last = Some(l);
                    return true;
                }
            }
        }
        self.last = Some(l);
        false
    }
}

/// Locate the first local max of λ(s) and the first local min after it,
/// each refined by a parabola through the discrete extremum and its neighbours.
pub fn find_folds(b: &Branch) -> FoldSet {
    let p = &b.points;
    let mut out = FoldSet {
        eps: b.eps,
        m: b.m,
        order: b.order.as_int(),
        lambda_c1: None,
        s_c1: None,
        lambda_c2: None,
        s_c2: None,
    };
    if p.len() < 3 {
        return out;
    }
    let refine = |i: usize| {
        guarded_vertex(
            [p[i - 1].norm_sq, p[i].norm_sq, p[i + 1].norm_sq],
            [p[i - 1].lambda, p[i].lambda, p[i + 1].lambda],
        )
    };
    let mut imax = None;
    for i in 1..p.len() - 1 {
        if p[i].lambda > p[i - 1].lambda && p[i].lambda >= p[i + 1].lambda {
            imax = Some(i);
            break;
        }
    }
    let Some(i1) = imax else { return out };
    let (s1, l1) = refine(i1);
    out.lambda_c1 = Some(l1);
    out.s_c1 = Some(s1);
    for i in i1 + 1..p.len() - 1 {
        if p[i].lambda < p[i - 1].lambda && p[i].lambda <= p[i + 1].lambda {
            let (s2, l2) = refine(i);
            out.lambda_c2 = Some(l2);
            out.s_c2 = Some(s2);
            break;
        }
    }
    out
}

/// Steady state at ‖u‖² = s_target on the default grid, from `init`.
pub fn solve_at_norm(eps: f64, m: u32, order: Order, s_target: f64, init: &BranchPoint) -> Result<BranchPoint> {
    let n = init.field.as_ref().map(|f| f.grid.n).unwrap_or_else(|| default_nodes(order, eps));
    let solver = EquilibriumSolver::new(eps, m, order, n)?;
    let u0 = init.field.as_ref().map(|f| f.values.clone()).unwrap_or_else(|| vec![0.0; n]);
    solver.solve_at_norm(s_target, &u0, init.lambda)
}

/// Branch from s = 0 to s_max on the default grid.
pub fn trace_branch(eps: f64, m: u32, order: Order, s_max: f64, ds0: f64) -> Result<Branch> {
    EquilibriumSolver::with_default_grid(eps, m, order)?.trace(&TraceOptions::new(s_max, ds0))
}

/// Three consecutive branch states (s, λ, u) bracketing a discrete extremum.
type Window = Vec<(f64, f64, Vec<f64>)>;

/// Shrink a bracket around a local extremum of λ(s) by resampling, then
/// return the parabola vertex (s, λ).
fn refine_extremum(solver: &EquilibriumSolver, w: &Window, maximize: bool) -> (f64, f64) {
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut pts: Vec<(f64, f64, Vec<f64>)> = w.clone();
    for _ in 0..3 {
        let (a, b) = (pts[0].0, pts[2].0);
        let mut samples: Vec<(f64, f64, Vec<f64>)> = Vec::new();
        for k in 0..5 {
            let s = a + (b - a) * k as f64 / 4.0;
            let near = pts
                .iter()
                .min_by(|x, y| (x.0 - s).abs().total_cmp(&(y.0 - s).abs()))
                .expect("window has points");
            match solver.solve_at_norm(s, &near.2, near.1) {
                // a resample far from the bracket has landed on another solution
                Ok(p) if (p.lambda - near.1).abs() <= 0.05 * near.1.abs() => {
                    samples.push((s, p.lambda, p.field.expect("solver returns fields").values))
                }
                _ => return vertex(&pts),
            }
        }
        let best = (1..4)
            .max_by(|&i, &j| (sign * samples[i].1).total_cmp(&(sign * samples[j].1)))
            .expect("interior samples");
        if sign * samples[0].1 > sign * samples[best].1 || sign * samples[4].1 > sign * samples[best].1 {
            break;
        }
        pts = samples[best - 1..=best + 1].to_vec();
    }
    vertex(&pts)
}

fn vertex(w: &Window) -> (f64, f64) {
    guarded_vertex([w[0].0, w[1].0, w[2].0], [w[0].1, w[1].1, w[2].1])
}

/// Parabola vertex through three samples around a discrete extremum.
///
/// Falls back to the middle sample when the vertex leaves the bracket or
/// the two neighbour differences are lopsided, as happens when the march
/// has stepped over an s-fold.
fn guarded_vertex(s: [f64; 3], l: [f64; 3]) -> (f64, f64) {
    let (d0, d2) = ((l[0] - l[1]).abs(), (l[2] - l[1]).abs());
    if d0.max(d2) > 100.0 * d0.min(d2) {
        return (s[1], l[1]);
    }
    let (sv, lv) = parabola_vertex(s, l);
    if sv < s[0].min(s[2]) || sv > s[0].max(s[2]) || !lv.is_finite() {
        return (s[1], l[1]);
    }
    (sv, lv)
}

/// Fold set of the branch at ε, tracing only until both folds are seen.
///
/// Discrete extrema are refined by local resampling of the branch.
pub fn folds_at(eps: f64, m: u32, order: Order, n: Option<usize>) -> Result<FoldSet> {
    let n = n.unwrap_or_else(|| default_nodes(order, eps));
    let solver = EquilibriumSolver::new(eps, m, order, n)?;
    let mut opts = TraceOptions::new(0.9 * 2.0 * (1.0 - eps).powi(2), 0.005);
    opts.keep_fields = false;
    opts.stop_after_folds = true;
    let mut ring: Window = Vec::new();
    let mut max_w: Option<Window> = None;
    let mut min_w: Option<Window> = None;
    let b = solver.trace_with(&opts, |p| {
        if ring.len() == 3 {
            ring.remove(0);
        }
        let u = p.field.as_ref().expect("solver returns fields").values.clone();
        ring.push((p.norm_sq, p.lambda, u));
        if ring.len() == 3 {
            let (l0, l1, l2) = (ring[0].1, ring[1].1, ring[2].1);
            if max_w.is_none() && l1 > l0 && l1 >= l2 {
                max_w = Some(ring.clone());
            } else if max_w.is_some() && min_w.is_none() && l1 < l0 && l1 <= l2 {
                min_w = Some(ring.clone());
            }
        }
        false
    })?;
    let mut f = find_folds(&b);
    if let (Some(w), Some(_)) = (&max_w, f.lambda_c1) {
        let (s, l) = refine_extremum(&solver, w, true);
        f.s_c1 = Some(s);
        f.lambda_c1 = Some(l);
    }
    if let (Some(w), Some(_)) = (&min_w, f.lambda_c2) {
        let (s, l) = refine_extremum(&solver, w, false);
        f.s_c2 = Some(s);
        f.lambda_c2 = Some(l);
    }
    Ok(f)
}

/// Critical ε at which the two folds merge.
///
/// Halves ε from 0.5 until two folds appear, then bisects the predicate
/// "branch has two folds" to a bracket narrower than 1e−3.
pub fn find_eps_c(m: u32, order: Order) -> Result<f64> {
    let two = |e: f64| folds_at(e, m, order, None).map(|f| f.has_two_folds());
    let mut hi = 0.5;
    if two(hi)? {
        return Err(Error::BracketFailure("two folds persist at eps = 0.5".into()));
    }
    let mut lo = hi;
    loop {
        lo *= 0.5;
        if lo < 1e-3 {
            return Err(Error::BracketFailure("no two-fold branch for eps in (1e-3, 0.5)".into()));
        }
        if two(lo)? {
            break;
        }
        hi = lo;
    }
    while hi - lo >= 1e-3 {
        let mid = 0.5 * (lo + hi);
        if two(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// λ_c2(ε) for each ε, computed concurrently.
pub fn fold_scaling(order: Order, m: u32, eps_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    let results: Vec<Result<FoldSet>> = std::thread::scope(|sc| {
        let handles: Vec<_> = eps_list.iter().map(|&e| sc.spawn(move || folds_at(e, m, order, None))).collect();
        handles.into_iter().map(|h| h.join().expect("fold worker panicked")).collect()
    });
    let mut out = Vec::new();
    for (e, r) in eps_list.iter().zip(results) {
        let f = r?;
        let l2 = f
            .lambda_c2
            .ok_or_else(|| Error::NoConvergence(format!("no second fold at eps = {e}")))?;
        out.push((*e, l2));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_norm_gives_trivial_solution() {
        let s = EquilibriumSolver::new(0.05, 4, Order::Second, 65).unwrap();
        let p = s.solve_at_norm(0.0, &vec![0.3; 65], 1.0).unwrap();
        assert_eq!(p.lambda, 0.0);
        assert!(p.field.unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn classical_branch_single_fold() {
        let s = EquilibriumSolver::new(0.0, 4, Order::Second, 401).unwrap();
        let b = s.trace(&TraceOptions::new(0.6, 0.01)).unwrap();
        let f = find_folds(&b);
        let l1 = f.lambda_c1.unwrap();
        assert!((l1 - 0.35).abs() < 2e-3, "{l1}");
        assert!(f.lambda_c2.is_none());
        assert!(b.points[1].lambda > 0.0 && b.points[2].lambda > b.points[1].lambda);
    }

    #[test]
    fn fold_tracker_sequence() {
        let mut t = FoldTracker::default();
        let seq = [0.0, 0.1, 0.3, 0.2, 0.05, 0.04, 0.0425, 0.05];
        let hits: Vec<bool> = seq.iter().map(|l| t.push(*l)).collect();
        assert_eq!(hits.iter().filter(|h| **h).count(), 1);
        assert!(hits[7]);
    }
}
