//! Energy decay for both flows, and the comparison-ODE bounds that hold
//! for the Laplacian one. The fourth-order flow has no maximum principle and
//! its minimum dips below −1 + ε.
//!
//!     cargo run --release --example energy_and_bounds

use memsreg::discretization::Field;
use memsreg::evolution::{comparison_bounds_at, EvolveConfig, Evolver};
use memsreg::model::{energy, ModelParams, Order};

fn main() -> memsreg::Result<()> {
    for (order, lambda) in [(Order::Second, 5.0), (Order::Fourth, 24.82)] {
        let p = ModelParams::new(lambda, 0.01, 4, order)?;
        let ev = Evolver::with_default_grid(p)?;
        let u0 = Field::zeros(ev.grid());
        let cfg = EvolveConfig { t_end: 20.0, record_every: 1.0, ..Default::default() };
        let tr = ev.evolve(&u0, &cfg)?;
        let bounds = comparison_bounds_at(&u0, &p, &tr.times)?;
        println!("order {}, lambda = {lambda}: E(0) = {:.6}", order.as_int(), energy(&u0, &p)?);
        println!("  {:>7} {:>12} {:>10} {:>10} {:>10} {:>10}", "t", "E", "u-", "min u", "max u", "u+");
        for ((t, e), (f, (lo, hi))) in tr.times.iter().zip(&tr.energies).zip(tr.snapshots.iter().zip(&bounds)) {
            let (lo, hi) = match order {
                Order::Second => (format!("{lo:.6}"), format!("{hi:.6}")),
                Order::Fourth => ("-".into(), "-".into()),
            };
            println!("  {t:>7.3} {e:>12.6} {lo:>10} {:>10.6} {:>10.6} {hi:>10}", f.min(), f.max());
        }
        println!(
            "  {} accepted, {} rejected, largest relative energy rise {:.1e}",
            tr.steps.len(),
            tr.rejected,
            tr.max_rel_energy_increase()
        );
    }
    Ok(())
}
