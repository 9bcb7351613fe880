//! Time integration of the gradient flows u_t = Δu − force(u) and
//! u_t = −Δ²u − force(u).
//!
//! Each step is linearly implicit: the elastic operator and the positive part
//! of the force Jacobian are implicit, the rest of the force is explicit.
//! Steps that close the gap or raise the discrete energy are retried at half
//! the step size. For the Laplacian a step is also retried if it undershoots
//! min(min u_old, −1 + ε), which the continuous flow cannot do.

use serde::Serialize;

use crate::discretization::{default_nodes, elastic_operator, Field, Grid, LinearOperator};
use crate::error::{Error, Result};
use crate::model::{energy, ModelParams, Order};
use crate::numerics::ode::{self, OdeOptions};

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolveConfig {
    pub dt0: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// Steady state once ‖(u_new − u_old)/dt‖_∞ drops below this.
    pub steady_tol: f64,
    /// Allowed energy rise per step, relative to |E|.
    pub energy_tol: f64,
    /// Time between stored snapshots.
    pub record_every: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            dt0: 1e-4,
            dt_max: 1.0,
            t_end: 500.0,
            steady_tol: 1e-8,
            energy_tol: 1e-10,
            record_every: 0.5,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt0 > 0.0
            && self.dt_max >= self.dt0
            && self.t_end > 0.0
            && self.steady_tol > 0.0
            && self.energy_tol >= 0.0
            && self.record_every > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid evolution config {self:?}")))
        }
    }
}

/// Scalar diagnostics of one accepted step.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub front: Option<(f64, f64)>,
    /// (E_new − E_old)/|E_old|; negative when energy decreases.
    pub rel_energy_change: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    pub config: EvolveConfig,
    /// Snapshot times, starting with t = 0; the final state is always included.
    pub times: Vec<f64>,
    pub snapshots: Vec<Field>,
    pub energies: Vec<f64>,
    pub fronts: Vec<Option<(f64, f64)>>,
    /// Every accepted step.
    pub steps: Vec<StepRecord>,
    pub rejected: usize,
    /// First time min u < −1 + 2ε.
    pub touchdown_time: Option<f64>,
    /// Local minima below −1 + 2ε at the touchdown step.
    pub touchdown_points: Option<Vec<f64>>,
    pub steady: bool,
}

impl Trajectory {
    pub fn final_field(&self) -> &Field {
        self.snapshots.last().expect("trajectory holds the initial state")
    }

    /// Largest (E_new − E_old)/|E_old| over accepted steps.
    pub fn max_rel_energy_increase(&self) -> f64 {
        self.steps.iter().map(|s| s.rel_energy_change).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Stepper bound to a grid and operator.
#[derive(Debug, Clone)]
pub struct Evolver {
    pub params: ModelParams,
    pub op: LinearOperator,
}

impl Evolver {
    pub fn new(params: ModelParams, n: usize) -> Result<Evolver> {
        params.validate()?;
        let grid = Grid::new(n)?;
        Ok(Evolver { params, op: elastic_operator(params.order, grid) })
    }

    pub fn with_default_grid(params: ModelParams) -> Result<Evolver> {
        Self::new(params, default_nodes(params.order, params.eps))
    }

    pub fn grid(&self) -> Grid {
        self.op.grid
    }

    /// One linearly implicit step of size dt, without acceptance checks.
    ///
    /// Solves (I + dt(A + D)) u_new = u_old − dt (force(u_old) − D u_old)
    /// with D = diag(max(force′(u_old), 0)).
    pub fn raw_step(&self, u: &[f64], dt: f64) -> Result<Vec<f64>> {
        let p = &self.params;
        let mut rhs = Vec::with_capacity(u.len());
        let mut shift = Vec::with_capacity(u.len());
        for &v in u {
            let g = 1.0 + v;
            if !(g > 0.0) {
                return Err(Error::Domain(format!("gap closed: u = {v}")));
            }
            let f = p.lambda * p.fhat_g(g);
            let d = (p.lambda * p.dfhat_g(g)).max(0.0);
            rhs.push(v - dt * (f - d * v));
            shift.push(1.0 + dt * d);
        }
        self.op.scaled_shifted(dt, &shift).lu()?.solve_in_place(&mut rhs);
        Ok(rhs)
    }

    /// Accepted step starting from dt, halving on rejection.
    ///
    /// Returns the new state, the step actually taken, its energy, and the
    /// number of rejections.
    pub fn step(&self, f: &Field, dt: f64, e_old: f64, cfg: &EvolveConfig) -> Result<(Field, f64, f64, usize)> {
        let mut dt = dt;
        let mut rejected = 0;
        let floor = match self.params.order {
            Order::Second => f.min().min(-1.0 + self.params.eps) - 1e-12,
            Order::Fourth => -1.0,
        };
        loop {
            let un = self.raw_step(&f.values, dt)?;
            if un.iter().all(|v| *v > floor && *v > -1.0 && v.is_finite()) {
                let nf = Field { grid: f.grid, values: un };
                let e_new = energy(&nf, &self.params)?;
                if e_new <= e_old + cfg.energy_tol * e_old.abs() {
                    return Ok((nf, dt, e_new, rejected));
                }
            }
            rejected += 1;
            dt *= 0.5;
            if dt < cfg.dt0 * 1e-12 {
                return Err(Error::StepFailure { t: f64::NAN, dt });
            }
        }
    }

    /// Integrate from u0 until `cfg.t_end` or a steady state.
    pub fn evolve(&self, u0: &Field, cfg: &EvolveConfig) -> Result<Trajectory> {
        cfg.validate()?;
        if u0.grid != self.grid() {
            return Err(Error::InvalidParams("initial field lives on a different grid".into()));
        }
        let p = self.params;
        let level = -1.0 + 2.0 * p.eps;
        let mut u = Field::new(u0.grid, u0.values.clone())?;
        let mut e = energy(&u, &p)?;
        let mut traj = Trajectory {
            params: p,
            config: *cfg,
            times: vec![0.0],
            snapshots: vec![u.clone()],
            energies: vec![e],
            fronts: vec![detect_fronts(&u, p.eps)],
            steps: Vec::new(),
            rejected: 0,
            touchdown_time: None,
            touchdown_points: None,
            steady: false,
        };
        if u.min() < level {
            traj.touchdown_time = Some(0.0);
            traj.touchdown_points = Some(local_minima_below(&u, level));
        }
        let mut t = 0.0;
        let mut dt = cfg.dt0;
        let mut next_record = cfg.record_every;
        while t < cfg.t_end {
            let trial = dt.min(cfg.t_end - t);
            let (nu, taken, e_new, rej) = self.step(&u, trial, e, cfg).map_err(|err| match err {
                Error::StepFailure { dt, .. } => Error::StepFailure { t, dt },
                other => other,
            })?;
            traj.rejected += rej;
            let rate = nu.values.iter().zip(&u.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / taken;
            t += taken;
            let rel = (e_new - e) / e.abs().max(f64::MIN_POSITIVE);
            u = nu;
            e = e_new;
            let front = detect_fronts(&u, p.eps);
            traj.steps.push(StepRecord {
                t,
                dt: taken,
                energy: e,
                min_u: u.min(),
                max_u: u.max(),
                front,
                rel_energy_change: rel,
            });
            if traj.touchdown_time.is_none() && u.min() < level {
                traj.touchdown_time = Some(t);
                traj.touchdown_points = Some(local_minima_below(&u, level));
            }
            let steady = rate < cfg.steady_tol;
            let done = steady || t >= cfg.t_end;
            if t >= next_record || done {
                traj.times.push(t);
                traj.snapshots.push(u.clone());
                traj.energies.push(e);
                traj.fronts.push(front);
                while next_record <= t {
                    next_record += cfg.record_every;
                }
            }
            if steady {
                traj.steady = true;
                break;
            }
            dt = if rej == 0 { (taken * 1.1).min(cfg.dt_max) } else { taken };
        }
        Ok(traj)
    }
}

/// Evolve on the grid of `u0`.
pub fn evolve(u0: &Field, p: &ModelParams, c: &EvolveConfig) -> Result<Trajectory> {
    Evolver::new(*p, u0.grid.n)?.evolve(u0, c)
}

/// One accepted step (see [`Evolver::step`]); returns the new field and the dt used.
pub fn step(f: &Field, p: &ModelParams, dt: f64) -> Result<(Field, f64)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")));
    }
    let ev = Evolver::new(*p, f.grid.n)?;
    let cfg = EvolveConfig { dt0: dt, dt_max: dt, ..EvolveConfig::default() };
    let e = energy(f, p)?;
    let (nf, taken, _, _) = ev.step(f, dt, e, &cfg)?;
    Ok((nf, taken))
}

fn local_minima_below(f: &Field, level: f64) -> Vec<f64> {
    let u = &f.values;
    let n = u.len();
    let mut out = Vec::new();
    for i in 0..n {
        let left = if i == 0 { 0.0 } else { u[i - 1] };
        let right = if i + 1 == n { 0.0 } else { u[i + 1] };
        if u[i] < level && u[i] <= left && u[i] <= right {
            out.push(f.grid.x(i));
        }
    }
    out
}

/// Outermost crossings of the level −1 + 2ε, linearly interpolated.
///
/// Boundary values are the implied zeros. Returns `None` if no node lies
/// below the level.
pub fn detect_fronts(f: &Field, eps: f64) -> Option<(f64, f64)> {
    let level = -1.0 + 2.0 * eps;
    let u = &f.values;
    let n = u.len();
    let first = u.iter().position(|v| *v < level)?;
    let last = u.iter().rposition(|v| *v < level)?;
    let g = f.grid;
    let cross = |i_in: usize, outward: isize| -> f64 {
        let j = i_in as isize + outward;
        let (xo, uo) = if j < 0 {
            (-1.0, 0.0)
        } else if j >= n as isize {
            (1.0, 0.0)
        } else {
            (g.x(j as usize), u[j as usize])
        };
        let (xi, ui) = (g.x(i_in), u[i_in]);
        xi + (level - ui) / (uo - ui) * (xo - xi)
    };
    Some((cross(first, -1), cross(last, 1)))
}

/// Solutions of the comparison ODE du/dt = −force(u) from inf u₀ and sup u₀.
///
/// The upper value is clipped at 0, the boundary data, so that it bounds
/// the Dirichlet problem for all time. Only the second-order flow obeys a
/// comparison principle; fourth-order solutions can leave this band.
pub fn comparison_bounds(u0: &Field, p: &ModelParams, t: f64) -> Result<(f64, f64)> {
    Ok(comparison_bounds_at(u0, p, &[t])?[0])
}

/// [`comparison_bounds`] at several times from a single integration.
pub fn comparison_bounds_at(u0: &Field, p: &ModelParams, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    let lo = u0.min().min(0.0);
    let hi = u0.max().max(0.0);
    if !(lo > -1.0) {
        return Err(Error::Domain(format!("inf u0 = {lo} <= -1")));
    }
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let minus = scalar_flow(lo, p, t_end)?;
    let plus = scalar_flow(hi, p, t_end)?;
    Ok(times.iter().map(|&t| (minus(t), plus(t).max(0.0))).collect())
}

/// Dense solution of du/dt = −force(u) from u(0) = y0 on [0, t_end].
fn scalar_flow(y0: f64, p: &ModelParams, t_end: f64) -> Result<impl Fn(f64) -> f64> {
    let q = *p;
    let fixed = -1.0 + q.eps;
    let rhs = move |_t: f64, y: &[f64; 1]| [-q.lambda * q.fhat_g((1.0 + y[0]).max(f64::MIN_POSITIVE))];
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, h0: 1e-6, ..OdeOptions::default() };
    let sol = if t_end > 0.0 && q.lambda > 0.0 {
        // stop near the fixed point (or on quenching when ε = 0)
        Some(ode::integrate(rhs, 0.0, [y0], t_end, opts, |_, y| {
            (q.eps > 0.0 && (y[0] - fixed).abs() < 1e-9) || 1.0 + y[0] < 1e-12
        })?)
    } else {
        None
    };
    if let Some(s) = &sol {
        let (tl, yl) = s.last();
        if q.eps == 0.0 && 1.0 + yl[0] < 1e-12 && tl < t_end {
            return Err(Error::Domain(format!("comparison ODE quenches at t = {tl}")));
        }
    }
    // linear decay onto the fixed point after the integration stops
    let rate = q.lambda * q.dfhat_g(q.eps.max(f64::MIN_POSITIVE));
    Ok(move |t: f64| match &sol {
        None => y0,
        Some(s) => {
            let (tl, yl) = s.last();
            if t >= tl {
                if s.stopped {
                    fixed + (yl[0] - fixed) * (-rate * (t - tl)).exp()
                } else {
                    yl[0]
                }
            } else {
                let i = s.t.partition_point(|v| *v <= t).saturating_sub(1).min(s.t.len() - 2);
                s.hermite(i, 0, t)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_force_keeps_zero() {
        let p = ModelParams::new(0.0, 0.01, 4, Order::Second).unwrap();
        let ev = Evolver::new(p, 101).unwrap();
        let u0 = Field::zeros(ev.grid());
        let cfg = EvolveConfig { t_end: 1.0, ..EvolveConfig::default() };
        let tr = ev.evolve(&u0, &cfg).unwrap();
        assert!(tr.final_field().values.iter().all(|v| *v == 0.0));
        assert!(tr.touchdown_time.is_none());
    }

    #[test]
    fn fronts_of_synthetic_plateau() {
        let eps = 0.05;
        let g = Grid::new(399).unwrap();
        let f = Field::from_fn(g, |x| {
            if x.abs() <= 0.5 {
                -1.0 + eps
            } else {
                (-1.0 + eps) * (1.0 - x.abs()) / 0.5
            }
        });
        let (l, r) = detect_fronts(&f, eps).unwrap();
        // ramp crosses −1+2ε where (1−ε)(1−|x|)/0.5 = 1−2ε
        let x = 1.0 - 0.5 * (1.0 - 2.0 * eps) / (1.0 - eps);
        assert!((r - x).abs() < 1e-12 && (l + x).abs() < 1e-12, "{l} {r} {x}");
        assert!(detect_fronts(&Field::zeros(g), eps).is_none());
    }

    #[test]
    fn comparison_ode_limits() {
        let p = ModelParams::new(5.0, 0.01, 4, Order::Second).unwrap();
        let u0 = Field::zeros(Grid::new(32).unwrap());
        let b = comparison_bounds_at(&u0, &p, &[0.0, 0.01, 0.1, 10.0]).unwrap();
        assert_eq!(b[0], (0.0, 0.0));
        assert!(b[1].0 < 0.0 && b[1].0 > -1.0);
        assert!((b[3].0 - (-0.99)).abs() < 1e-12);
        assert!(b.iter().all(|x| x.1 == 0.0));
    }
}
