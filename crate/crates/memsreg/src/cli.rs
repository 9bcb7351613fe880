//! Command-line front end: parameter resolution, dispatch and artifact output.
//!
//! Parameters come from an optional flat `key = value` file and from flags;
//! flags win. Every command writes CSV/JSON into `--out` and prints a JSON
//! summary on stdout.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::asymptotics::{self, contact_point_from_field};
use crate::discretization::{default_nodes, norm_sq, Field, Grid};
use crate::equilibrium::{folds_at, find_eps_c, EquilibriumSolver, FoldSet, Stability, TraceOptions};
use crate::error::{Error, Result};
use crate::evolution::{EvolveConfig, Evolver};
use crate::export::{write_json, write_plot_script, CsvTable, Panel};
use crate::model::{ModelParams, Order};
use crate::numerics::fit::loglog_slope;
use crate::phaseplane;

#[derive(Debug, Parser)]
#[command(name = "memsreg", version, about = "Regularized MEMS touchdown: evolution, branches, folds and asymptotics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Time-dependent run from u ≡ 0.
    Evolve,
    /// Bifurcation diagram λ versus ‖u‖².
    Branch,
    /// Fold values λ_c1, λ_c2.
    Folds,
    /// Critical ε where the folds merge.
    Epscrit,
    /// Phase-plane length curve l_ε(α) and its extrema.
    Phaseplane,
    /// Inner-layer profile and far-field constants.
    Inner,
    /// Composite expansion against the computed equilibrium.
    Composite,
    /// Fold extraction over a list of ε, run concurrently.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Branch => "branch",
            Command::Folds => "folds",
            Command::Epscrit => "epscrit",
            Command::Phaseplane => "phaseplane",
            Command::Inner => "inner",
            Command::Composite => "composite",
            Command::Sweep => "sweep",
        }
    }
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Operator order, 2 or 4.
    #[arg(long, global = true)]
    pub order: Option<u32>,
    /// Load parameter λ.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// ε, or a comma-separated list for `sweep`.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    /// Exponent of the repulsive term, m ≥ 3.
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Grid nodes (or curve samples for `phaseplane`).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Largest ‖u‖² for `branch`.
    #[arg(long, global = true)]
    pub smax: Option<f64>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key = value file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also write matplotlib scripts for the CSVs.
    #[arg(long, global = true)]
    pub emit_plots: bool,
    /// Final time for `evolve`.
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    /// Half-width of the inner profile table.
    #[arg(long, global = true)]
    pub xi_max: Option<f64>,
    /// Initial continuation step in ‖u‖².
    #[arg(long, global = true)]
    pub ds: Option<f64>,
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub order: Order,
    pub lambda: f64,
    pub eps: Vec<f64>,
    pub m: u32,
    pub n: Option<usize>,
    pub smax: Option<f64>,
    pub out: PathBuf,
    pub emit_plots: bool,
    pub t_end: f64,
    pub xi_max: Option<f64>,
    pub ds: f64,
}

fn invalid(msg: String) -> Error {
    Error::InvalidParams(msg)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| invalid(format!("cannot parse {key} = {v:?}")))
}

fn parse_eps_list(v: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = v.split(',').map(|s| parse_num("eps", s)).collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(invalid("empty eps list".into()));
    }
    Ok(out)
}

/// Parse a flat `key = value` config file into flags.
pub fn parse_config(text: &str) -> Result<Flags> {
    let mut f = Flags::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("config line {}: expected key = value", i + 1)))?;
        let (k, v) = (k.trim().replace('-', "_"), v.trim());
        match k.as_str() {
            "order" => f.order = Some(parse_num(&k, v)?),
            "lambda" => f.lambda = Some(parse_num(&k, v)?),
            "eps" => f.eps = Some(v.to_string()),
            "m" => f.m = Some(parse_num(&k, v)?),
            "n" => f.n = Some(parse_num(&k, v)?),
            "smax" => f.smax = Some(parse_num(&k, v)?),
            "out" => f.out = Some(PathBuf::from(v)),
            "emit_plots" => f.emit_plots = parse_num(&k, v)?,
            "t_end" => f.t_end = Some(parse_num(&k, v)?),
            "xi_max" => f.xi_max = Some(parse_num(&k, v)?),
            "ds" => f.ds = Some(parse_num(&k, v)?),
            _ => return Err(invalid(format!("config line {}: unknown key {k:?}", i + 1))),
        }
    }
    Ok(f)
}

fn merge(file: Flags, cli: &Flags) -> Flags {
    Flags {
        order: cli.order.or(file.order),
        lambda: cli.lambda.or(file.lambda),
        eps: cli.eps.clone().or(file.eps),
        m: cli.m.or(file.m),
        n: cli.n.or(file.n),
        smax: cli.smax.or(file.smax),
        out: cli.out.clone().or(file.out),
        config: None,
        emit_plots: cli.emit_plots || file.emit_plots,
        t_end: cli.t_end.or(file.t_end),
        xi_max: cli.xi_max.or(file.xi_max),
        ds: cli.ds.or(file.ds),
    }
}

impl RunConfig {
    /// Merge `flags` over the config file they name (if any), apply defaults and validate.
    pub fn resolve(command: Command, flags: &Flags) -> Result<RunConfig> {
        let file = match &flags.config {
            Some(p) => parse_config(&std::fs::read_to_string(p)?)?,
            None => Flags::default(),
        };
        let f = merge(file, flags);
        let order = Order::from_int(f.order.unwrap_or(2))?;
        let default_lambda = match (command, order) {
            (Command::Evolve, Order::Second) => 5.0,
            (Command::Evolve, Order::Fourth) => 24.82,
            (_, Order::Second) => 10.0,
            (_, Order::Fourth) => 50.0,
        };
        let eps = match &f.eps {
            Some(s) => parse_eps_list(s)?,
            None if command == Command::Sweep => vec![0.005, 0.01, 0.02, 0.04],
            None => vec![0.01],
        };
        if command != Command::Sweep && eps.len() != 1 {
            return Err(invalid(format!("{} takes a single eps", command.name())));
        }
        let cfg = RunConfig {
            command,
            order,
            lambda: f.lambda.unwrap_or(default_lambda),
            eps,
            m: f.m.unwrap_or(4),
            n: f.n,
            smax: f.smax,
            out: f.out.unwrap_or_else(|| PathBuf::from("out")),
            emit_plots: f.emit_plots,
            t_end: f.t_end.unwrap_or(500.0),
            xi_max: f.xi_max,
            ds: f.ds.unwrap_or(0.005),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for &e in &self.eps {
            ModelParams::new(self.lambda, e, self.m, self.order)?;
        }
        if let Some(n) = self.n {
            if n < 5 {
                return Err(invalid(format!("n must be >= 5, got {n}")));
            }
        }
        if !(self.t_end > 0.0) {
            return Err(invalid(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if !(self.ds > 0.0) {
            return Err(invalid(format!("ds must be > 0, got {}", self.ds)));
        }
        if matches!(self.command, Command::Inner | Command::Composite) && !(self.lambda > 0.0) {
            return Err(invalid("lambda must be > 0 for inner/composite".into()));
        }
        let needs_eps = matches!(self.command, Command::Composite);
        if needs_eps && self.eps[0] <= 0.0 {
            return Err(invalid("composite needs eps > 0".into()));
        }
        Ok(())
    }

    pub fn eps0(&self) -> f64 {
        self.eps[0]
    }

    fn nodes(&self) -> usize {
        self.n.unwrap_or_else(|| default_nodes(self.order, self.eps0()))
    }

    fn csv(&self, columns: &[&str]) -> CsvTable {
        let mut t = CsvTable::new(columns.iter().copied())
            .meta("command", self.command.name())
            .meta("order", self.order.as_int())
            .meta("m", self.m);
        if self.command != Command::Sweep && self.command != Command::Epscrit {
            t = t.meta("eps", self.eps0());
        } else {
            let list: Vec<String> = self.eps.iter().map(|e| e.to_string()).collect();
            t = t.meta("eps", list.join(";"));
        }
        if matches!(self.command, Command::Evolve | Command::Inner | Command::Composite) {
            t = t.meta("lambda", self.lambda);
        }
        t
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidParams(s) => Error::InvalidParams(format!("{name}: {s}")),
        Error::Domain(s) => Error::Domain(format!("{name}: {s}")),
        Error::NoConvergence(s) => Error::NoConvergence(format!("{name}: {s}")),
        Error::BracketFailure(s) => Error::BracketFailure(format!("{name}: {s}")),
        Error::ConvergenceFailure(s) => Error::ConvergenceFailure(format!("{name}: {s}")),
        other => other,
    })
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Run one command and return its JSON summary.
pub fn run(cfg: &RunConfig) -> Result<Value> {
    std::fs::create_dir_all(&cfg.out)?;
    let summary = match cfg.command {
        Command::Evolve => cmd_evolve(cfg)?,
        Command::Branch => cmd_branch(cfg)?,
        Command::Folds => cmd_folds(cfg)?,
        Command::Epscrit => cmd_epscrit(cfg)?,
        Command::Phaseplane => cmd_phaseplane(cfg)?,
        Command::Inner => cmd_inner(cfg)?,
        Command::Composite => cmd_composite(cfg)?,
        Command::Sweep => cmd_sweep(cfg)?,
    };
    write_json(&cfg.path(&format!("{}.json", cfg.command.name())), &summary)?;
    Ok(summary)
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Value> {
    let p = ModelParams::new(cfg.lambda, cfg.eps0(), cfg.m, cfg.order)?;
    let ev = Evolver::new(p, cfg.nodes())?;
    let ec = EvolveConfig { t_end: cfg.t_end, ..EvolveConfig::default() };
    let traj = stage("evolve", ev.evolve(&Field::zeros(ev.grid()), &ec))?;
    let mut t = cfg.csv(&["t", "dt", "energy", "min_u", "max_u", "front_left", "front_right", "rel_energy_change"]);
    for s in &traj.steps {
        let (fl, fr) = s.front.map_or((f64::NAN, f64::NAN), |(a, b)| (a, b));
        t.push(vec![s.t, s.dt, s.energy, s.min_u, s.max_u, fl, fr, s.rel_energy_change]);
    }
    t.write(&cfg.path("evolve_trajectory.csv"))?;
    let mut snaps = cfg.csv(&["t", "x", "u"]);
    let g = ev.grid();
    let stride = g.n.div_ceil(400).max(1);
    for (time, f) in traj.times.iter().zip(&traj.snapshots) {
        for i in (0..g.n).step_by(stride).chain(std::iter::once(g.n - 1)).collect::<std::collections::BTreeSet<_>>() {
            snaps.push(vec![*time, g.x(i), f.values[i]]);
        }
    }
    snaps.write(&cfg.path("evolve_snapshots.csv"))?;
    if cfg.emit_plots {
        write_plot_script(
            &cfg.out,
            "evolve",
            "evolution from u = 0",
            &[
                Panel::new("evolve_snapshots.csv", "x", &["u"]).group("t"),
                Panel::new("evolve_trajectory.csv", "t", &["front_left", "front_right"]).labels("t", "front"),
                Panel::new("evolve_trajectory.csv", "t", &["energy"]),
            ],
        )?;
    }
    let fin = traj.final_field();
    let fronts = traj.steps.iter().filter(|s| s.front.is_some()).count();
    Ok(json!({
        "command": "evolve",
        "order": cfg.order.as_int(), "lambda": cfg.lambda, "eps": cfg.eps0(), "m": cfg.m, "n": g.n,
        "steps": traj.steps.len(), "rejected": traj.rejected,
        "t_final": traj.times.last(),
        "steady": traj.steady,
        "touchdown_time": traj.touchdown_time,
        "touchdown_points": traj.touchdown_points,
        "steps_with_front": fronts,
        "final_front": traj.fronts.last().cloned().flatten(),
        "final_min_u": fin.min(), "final_max_u": fin.max(),
        "final_norm_sq": norm_sq(fin),
        "max_rel_energy_increase": traj.max_rel_energy_increase(),
    }))
}

fn stability_code(s: Stability) -> f64 {
    match s {
        Stability::Stable => 1.0,
        Stability::Unstable => 0.0,
        Stability::Unknown => f64::NAN,
    }
}

pub fn cmd_branch(cfg: &RunConfig) -> Result<Value> {
    let eps = cfg.eps0();
    let solver = EquilibriumSolver::new(eps, cfg.m, cfg.order, cfg.nodes())?;
    let cap = 0.999 * 2.0 * (1.0 - eps).powi(2);
    let smax = cfg.smax.unwrap_or(if eps > 0.0 { cap } else { 1.0 }).min(cap);
    let mut opts = TraceOptions::new(smax, cfg.ds);
    opts.keep_fields = false;
    opts.stability = true;
    let b = stage("branch", solver.trace(&opts))?;
    let mut t = cfg.csv(&["norm_sq", "lambda", "min_u", "stable"]).meta("n", solver.grid.n).meta("smax", smax);
    for p in &b.points {
        t.push(vec![p.norm_sq, p.lambda, p.min_u, stability_code(p.stability)]);
    }
    t.write(&cfg.path("branch.csv"))?;
    if cfg.emit_plots {
        write_plot_script(
            &cfg.out,
            "branch",
            "bifurcation diagram",
            &[Panel::new("branch.csv", "lambda", &["norm_sq"]).labels("lambda", "|u|^2")],
        )?;
    }
    let f = crate::equilibrium::find_folds(&b);
    Ok(json!({
        "command": "branch", "order": cfg.order.as_int(), "eps": eps, "m": cfg.m, "n": solver.grid.n,
        "points": b.points.len(), "smax": smax,
        "s_reached": b.points.last().map(|p| p.norm_sq),
        "folds": f,
    }))
}

fn fold_json(f: &FoldSet) -> Value {
    json!({
        "eps": f.eps, "order": f.order, "m": f.m,
        "lambda_c1": f.lambda_c1, "s_c1": f.s_c1, "lambda_c2": f.lambda_c2, "s_c2": f.s_c2,
        "two_folds": f.has_two_folds(),
    })
}

pub fn cmd_folds(cfg: &RunConfig) -> Result<Value> {
    let eps = cfg.eps0();
    let f = stage("folds", folds_at(eps, cfg.m, cfg.order, cfg.n))?;
    let mut v = fold_json(&f);
    v["command"] = json!("folds");
    if cfg.order == Order::Second {
        let pp = stage("phaseplane", if eps > 0.0 { phaseplane::fold_points(eps, cfg.m) } else { Ok(classical_curve_folds()) })?;
        v["phaseplane"] = json!(pp);
    }
    let mut t = cfg.csv(&["lambda_c1", "s_c1", "lambda_c2", "s_c2"]);
    t.push(vec![opt(f.lambda_c1), opt(f.s_c1), opt(f.lambda_c2), opt(f.s_c2)]);
    t.write(&cfg.path("folds.csv"))?;
    Ok(v)
}

fn classical_curve_folds() -> phaseplane::CurveFolds {
    let (a, l) = phaseplane::classical_fold();
    phaseplane::CurveFolds { lambda_c1: Some(l), alpha_c1: Some(a), lambda_c2: None, alpha_c2: None }
}

pub fn cmd_epscrit(cfg: &RunConfig) -> Result<Value> {
    let ec = stage("epscrit", find_eps_c(cfg.m, cfg.order))?;
    let below = stage("epscrit check", folds_at(0.9 * ec, cfg.m, cfg.order, None))?;
    let above = stage("epscrit check", folds_at(1.1 * ec, cfg.m, cfg.order, None))?;
    let mut t = cfg.csv(&["eps_c", "two_folds_below", "two_folds_above"]);
    t.push(vec![ec, below.has_two_folds() as u8 as f64, above.has_two_folds() as u8 as f64]);
    t.write(&cfg.path("epscrit.csv"))?;
    Ok(json!({
        "command": "epscrit", "order": cfg.order.as_int(), "m": cfg.m, "eps_c": ec,
        "two_folds_at_0.9": below.has_two_folds(), "two_folds_at_1.1": above.has_two_folds(),
    }))
}

pub fn cmd_phaseplane(cfg: &RunConfig) -> Result<Value> {
    let eps = cfg.eps0();
    let n = cfg.n.unwrap_or(400);
    let c = stage("phaseplane", phaseplane::sample_length_curve(eps, cfg.m, n))?;
    let folds = stage("phaseplane folds", phaseplane::fold_points_from_curve(&c))?;
    let mut t = cfg.csv(&["alpha", "l", "lambda"]);
    for (a, l) in c.alpha.iter().zip(&c.l) {
        t.push(vec![*a, *l, l * l]);
    }
    t.write(&cfg.path("phaseplane.csv"))?;
    if cfg.emit_plots {
        write_plot_script(
            &cfg.out,
            "phaseplane",
            "phase-plane length",
            &[Panel::new("phaseplane.csv", "alpha", &["l"]).labels("alpha", "l_eps(alpha)")],
        )?;
    }
    Ok(json!({ "command": "phaseplane", "eps": eps, "m": cfg.m, "samples": n, "folds": folds }))
}

fn inner_profile(cfg: &RunConfig) -> Result<asymptotics::InnerProfile> {
    match cfg.order {
        Order::Second => asymptotics::inner_laplacian(
            cfg.lambda,
            cfg.m,
            cfg.xi_max.unwrap_or(asymptotics::laplacian::DEFAULT_XI_MAX),
        ),
        Order::Fourth => asymptotics::inner_bilaplacian_shoot(
            cfg.lambda,
            cfg.m,
            cfg.xi_max.unwrap_or(asymptotics::bilaplacian::DEFAULT_XI_MAX),
        ),
    }
}

pub fn cmd_inner(cfg: &RunConfig) -> Result<Value> {
    let p = stage("inner", inner_profile(cfg))?;
    let mut t = cfg.csv(&["xi", "v", "dv"]).meta("xi_max", p.xi_max);
    for i in 0..p.xi.len() {
        t.push(vec![p.xi[i], p.v[i], p.dv[i]]);
    }
    t.write(&cfg.path("inner.csv"))?;
    if cfg.emit_plots {
        write_plot_script(&cfg.out, "inner", "inner-layer profile", &[Panel::new("inner.csv", "xi", &["v"])])?;
    }
    Ok(json!({
        "command": "inner", "order": cfg.order.as_int(), "lambda": cfg.lambda, "m": cfg.m,
        "xi_max": p.xi_max, "far_field": p.far, "min_v": p.min_value(),
        "first_integral_residual": p.first_integral_residual,
    }))
}

/// Large-norm equilibrium by Newton at fixed λ seeded with the composite expansion.
pub fn large_equilibrium(order: Order, lambda: f64, eps: f64, m: u32, n: usize) -> Result<(Field, Field)> {
    let grid = Grid::new(n)?;
    let comp = match order {
        Order::Second => asymptotics::composite_laplacian(lambda, eps, m, &grid)?,
        Order::Fourth => {
            let prof = asymptotics::inner_bilaplacian(lambda, m)?;
            asymptotics::composite_bilaplacian(lambda, eps, m, &prof, &grid)?
        }
    };
    let solver = EquilibriumSolver::new(eps, m, order, n)?;
    let p = solver.solve_at_lambda(lambda, &comp.values)?;
    Ok((p.field.expect("solver returns fields"), comp))
}

pub fn cmd_composite(cfg: &RunConfig) -> Result<Value> {
    let (eps, l, m) = (cfg.eps0(), cfg.lambda, cfg.m);
    let (pde, comp) = stage("composite", large_equilibrium(cfg.order, l, eps, m, cfg.nodes()))?;
    let g = pde.grid;
    let mut t = cfg.csv(&["x", "composite", "pde"]).meta("n", g.n);
    for i in 0..g.n {
        t.push(vec![g.x(i), comp.values[i], pde.values[i]]);
    }
    t.write(&cfg.path("composite.csv"))?;
    if cfg.emit_plots {
        write_plot_script(
            &cfg.out,
            "composite",
            "composite expansion and computed equilibrium",
            &[Panel::new("composite.csv", "x", &["pde", "composite"]).labels("x", "u")],
        )?;
    }
    let gap = pde.values.iter().zip(&comp.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let xc_pde = contact_point_from_field(&pde, cfg.order);
    let (xc1, xc2, norm_asym) = match cfg.order {
        Order::Second => {
            let gm = asymptotics::gamma_laplacian(l, m)?;
            (
                asymptotics::contact_point_laplacian_leading(l, eps, m),
                asymptotics::contact_point_laplacian(l, eps, m, gm),
                asymptotics::norm_sq_laplacian(l, eps, m),
            )
        }
        Order::Fourth => {
            let xi0 = asymptotics::inner_bilaplacian(l, m)?.xi0().expect("fourth-order profile");
            (
                asymptotics::contact_point_bilaplacian_leading(l, eps, m),
                asymptotics::contact_point_bilaplacian(l, eps, m, xi0),
                asymptotics::norm_sq_bilaplacian(l, eps, m),
            )
        }
    };
    Ok(json!({
        "command": "composite", "order": cfg.order.as_int(), "lambda": l, "eps": eps, "m": m, "n": g.n,
        "max_gap": gap, "max_gap_over_eps": gap / eps,
        "contact_pde": xc_pde, "contact_leading": xc1, "contact_corrected": xc2,
        "norm_sq_pde": norm_sq(&pde), "norm_sq_asymptotic": norm_asym,
    }))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Value> {
    let (m, order, n) = (cfg.m, cfg.order, cfg.n);
    // one worker per ε; each owns its solver, results are gathered after the joins
    let results: Vec<Result<FoldSet>> = std::thread::scope(|sc| {
        let hs: Vec<_> = cfg.eps.iter().map(|&e| sc.spawn(move || folds_at(e, m, order, n))).collect();
        hs.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(Error::NoConvergence("worker panicked".into())))).collect()
    });
    let folds: Vec<FoldSet> = stage("sweep", results.into_iter().collect::<Result<_>>())?;
    let mut t = cfg.csv(&["eps", "lambda_c1", "lambda_c2"]);
    for f in &folds {
        t.push(vec![f.eps, opt(f.lambda_c1), opt(f.lambda_c2)]);
    }
    t.write(&cfg.path("sweep.csv"))?;
    if cfg.emit_plots {
        write_plot_script(
            &cfg.out,
            "sweep",
            "second fold versus eps",
            &[Panel::new("sweep.csv", "eps", &["lambda_c2"]).loglog()],
        )?;
    }
    let pairs: Vec<(f64, f64)> = folds.iter().filter_map(|f| f.lambda_c2.map(|l| (f.eps, l))).collect();
    let slope = (pairs.len() >= 2).then(|| {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
        loglog_slope(&x, &y)
    });
    Ok(json!({
        "command": "sweep", "order": order.as_int(), "m": m,
        "folds": folds.iter().map(fold_json).collect::<Vec<_>>(),
        "lambda_c2_loglog_slope": slope,
    }))
}

/// Entry point for the binary: parse, run, print, and map errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match RunConfig::resolve(cli.command, &cli.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(&cfg) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            0
        }
        Err(e) => {
            eprintln!("error in {}: {e}", cfg.command.name());
            e.exit_code()
        }
    }
}
