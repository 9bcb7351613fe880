//! Fold values from continuation, from the phase plane and from the
//! regular expansion of the principal fold.
//!
//!     cargo run --release --example folds

use memsreg::equilibrium::{find_eps_c, folds_at};
use memsreg::model::Order;
use memsreg::phaseplane::{classical_fold, fold_points, lambda_c1_coefficient, lambda_c1_expansion};

fn main() -> memsreg::Result<()> {
    let (ac, lc) = classical_fold();
    println!("eps = 0: alpha_c = {ac:.6}, lambda_c = {lc:.6}");
    println!("lambda_c1 ~ lambda_c + C eps^2 with C = {:.6}\n", lambda_c1_coefficient(4)?);

    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}", "eps", "c1 (FD)", "c1 (plane)", "c1 (expan)", "c2 (FD)", "c2 (plane)");
    for eps in [0.01, 0.02, 0.05, 0.1] {
        let fd = folds_at(eps, 4, Order::Second, None)?;
        let pp = fold_points(eps, 4)?;
        println!(
            "{eps:>6} {:>12.8} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
            fd.lambda_c1.unwrap_or(f64::NAN),
            pp.lambda_c1.unwrap_or(f64::NAN),
            lambda_c1_expansion(eps, 4)?,
            fd.lambda_c2.unwrap_or(f64::NAN),
            pp.lambda_c2.unwrap_or(f64::NAN),
        );
    }

    let b = folds_at(0.01, 4, Order::Fourth, None)?;
    println!("\nbi-Laplacian, eps = 0.01: lambda_c1 = {:?}, lambda_c2 = {:?}", b.lambda_c1, b.lambda_c2);

    // above eps_c the branch is monotone and there is no bistable range
    for order in [Order::Second, Order::Fourth] {
        println!("order {}: eps_c = {:.4}", order.as_int(), find_eps_c(4, order)?);
    }
    Ok(())
}
