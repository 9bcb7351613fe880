//! How the lower fold λ_c2 shrinks with ε, fitted on a log-log scale.
//!
//!     cargo run --release --example fold_scaling

use memsreg::equilibrium::fold_scaling;
use memsreg::model::Order;
use memsreg::numerics::fit::loglog_slope;

fn main() -> memsreg::Result<()> {
    let eps = [0.005, 0.01, 0.02, 0.04];
    for order in [Order::Second, Order::Fourth] {
        let v = fold_scaling(order, 4, &eps)?;
        let (e, l): (Vec<f64>, Vec<f64>) = v.iter().copied().unzip();
        println!("order {}", order.as_int());
        for (e, l) in &v {
            println!("  eps = {e:<6} lambda_c2 = {l:.6e}");
        }
        println!("  slope over all points {:.4}", loglog_slope(&e, &l));
        for w in v.windows(2) {
            let s = (w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln();
            println!("  local slope [{}, {}]: {s:.4}", w[0].0, w[1].0);
        }
    }
    Ok(())
}
