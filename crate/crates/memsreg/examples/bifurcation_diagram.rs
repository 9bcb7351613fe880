//! λ against ‖u‖² for both operators, with linear stability.
//!
//!     cargo run --release --example bifurcation_diagram [eps]

use memsreg::equilibrium::{find_folds, EquilibriumSolver, Stability, TraceOptions};
use memsreg::model::Order;

fn main() -> memsreg::Result<()> {
    let eps: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    for order in [Order::Second, Order::Fourth] {
        let solver = EquilibriumSolver::with_default_grid(eps, 4, order)?;
        let mut opts = TraceOptions::new(1.8 * (1.0 - eps).powi(2), 0.01);
        opts.keep_fields = false;
        opts.stability = true;
        let b = solver.trace(&opts)?;
        let f = find_folds(&b);
        println!("order {} (n = {}): {} points", order.as_int(), b.n, b.points.len());
        println!("  lambda_c1 = {:?} at s = {:?}", f.lambda_c1, f.s_c1);
        println!("  lambda_c2 = {:?} at s = {:?}", f.lambda_c2, f.s_c2);
        println!("  {:>8} {:>12} {:>10}  stable", "s", "lambda", "1+min u");
        for p in b.points.iter().step_by((b.points.len() / 20).max(1)) {
            let st = match p.stability {
                Stability::Stable => "yes",
                Stability::Unstable => "no",
                Stability::Unknown => "?",
            };
            println!("  {:>8.4} {:>12.6e} {:>10.3e}  {st}", p.norm_sq, p.lambda, 1.0 + p.min_u);
        }
    }
    Ok(())
}
