//! Touchdown, front spreading and pinning for the Laplacian flow.
//!
//! Starts from u ≡ 0 at λ = 5, ε = 0.01 and prints the contact region
//! [x₋, x₊] (where u < −1 + 2ε) as it widens and stops.
//!
//!     cargo run --release --example spreading

use memsreg::discretization::Field;
use memsreg::equilibrium::EquilibriumSolver;
use memsreg::evolution::{EvolveConfig, Evolver};
use memsreg::model::{ModelParams, Order};

fn main() -> memsreg::Result<()> {
    let p = ModelParams::new(5.0, 0.01, 4, Order::Second)?;
    let ev = Evolver::with_default_grid(p)?;
    let cfg = EvolveConfig { record_every: 2.0, ..Default::default() };
    let tr = ev.evolve(&Field::zeros(ev.grid()), &cfg)?;

    println!("n = {} nodes, {} steps ({} rejected)", ev.grid().n, tr.steps.len(), tr.rejected);
    match (tr.touchdown_time, &tr.touchdown_points) {
        (Some(t), Some(x)) => println!("touchdown at t = {t:.4}, x = {x:?}"),
        _ => println!("no touchdown"),
    }
    println!("{:>10} {:>12} {:>10} {:>10}", "t", "E", "min u", "x+");
    for ((t, e), (f, fr)) in tr.times.iter().zip(&tr.energies).zip(tr.snapshots.iter().zip(&tr.fronts)) {
        let x = fr.map_or(f64::NAN, |(_, r)| r);
        println!("{t:>10.3} {e:>12.6} {:>10.6} {x:>10.5}", f.min());
    }
    println!("steady = {}, largest relative energy rise {:.1e}", tr.steady, tr.max_rel_energy_increase());

    // the pinned state is the upper-branch equilibrium at the same λ
    let solver = EquilibriumSolver::new(p.eps, p.m, p.order, ev.grid().n)?;
    let eq = solver.upper_branch_at(p.lambda, 0.005)?;
    let d = eq
        .field
        .expect("solver returns fields")
        .values
        .iter()
        .zip(&tr.final_field().values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max |u(T) - u_eq| = {d:.2e}");
    Ok(())
}
