//! The length curve l_ε(α) whose square is λ on the Laplacian branch.
//!
//!     cargo run --release --example phase_plane

use memsreg::phaseplane::{divergence_bounds, fold_points_from_curve, l0, l_eps, sample_length_curve};

fn main() -> memsreg::Result<()> {
    println!("{:>8} {:>10} {:>10} {:>10}", "alpha", "l0", "l(0.01)", "l(0.05)");
    for k in 1..=12 {
        let a = 0.08 * k as f64;
        let show = |e: f64| if a > e { l_eps(a, e, 4).map(|v| format!("{v:>10.6}")) } else { Ok(format!("{:>10}", "-")) };
        println!("{a:>8.3} {:>10.6} {} {}", l0(a)?, show(0.01)?, show(0.05)?);
    }

    for eps in [0.01, 0.05, 0.2] {
        let c = sample_length_curve(eps, 4, 2000)?;
        let f = fold_points_from_curve(&c)?;
        println!(
            "eps = {eps}: max of l at alpha = {:?} (lambda_c1 = {:?}), min at alpha = {:?} (lambda_c2 = {:?})",
            f.alpha_c1, f.lambda_c1, f.alpha_c2, f.lambda_c2
        );
    }

    // near α = ε the length diverges logarithmically between two bounds
    let eps = 0.05;
    for eta in [1e-2, 1e-3, 1e-4, 1e-6] {
        let (lo, hi) = divergence_bounds(eta, eps, 4)?;
        println!("eta = {eta:.0e}: {lo:.4} <= l = {:.4} <= {hi:.4}", l_eps(eps * (1.0 + eta), eps, 4)?);
    }
    Ok(())
}
