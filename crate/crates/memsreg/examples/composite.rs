//! Composite expansions of the large-norm equilibrium against the
//! computed solution, for both operators.
//!
//!     cargo run --release --example composite

use memsreg::asymptotics::{
    self, contact_point_from_field, inner_bilaplacian, norm_sq_bilaplacian, norm_sq_laplacian,
};
use memsreg::cli::large_equilibrium;
use memsreg::discretization::{default_nodes, norm_sq};
use memsreg::model::Order;

fn main() -> memsreg::Result<()> {
    let (lambda, m) = (10.0, 4);
    let gamma = asymptotics::gamma_laplacian(lambda, m)?;
    println!("Laplacian, lambda = {lambda}, gamma = {gamma:.8}");
    println!("{:>7} {:>10} {:>10} {:>10} {:>9} {:>9} {:>9}", "eps", "x_c", "3-term", "1-term", "|u|^2", "formula", "gap/eps");
    for eps in [1e-3, 5e-3, 2e-2, 5e-2] {
        let (pde, comp) = large_equilibrium(Order::Second, lambda, eps, m, default_nodes(Order::Second, eps))?;
        let gap = pde.values.iter().zip(&comp.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "{eps:>7} {:>10.6} {:>10.6} {:>10.6} {:>9.5} {:>9.5} {:>9.4}",
            contact_point_from_field(&pde, Order::Second).unwrap_or(f64::NAN),
            asymptotics::contact_point_laplacian(lambda, eps, m, gamma),
            asymptotics::contact_point_laplacian_leading(lambda, eps, m),
            norm_sq(&pde),
            norm_sq_laplacian(lambda, eps, m),
            gap / eps
        );
    }

    let lambda = 50.0;
    let xi0 = inner_bilaplacian(lambda, m)?.xi0().expect("fourth-order profile");
    println!("\nbi-Laplacian, lambda = {lambda}, xi0 = {xi0:.6}");
    println!("{:>7} {:>10} {:>10} {:>10} {:>9} {:>9} {:>9}", "eps", "x_c", "2-term", "1-term", "|u|^2", "formula", "gap/eps");
    for eps in [2e-4, 1e-3, 5e-3, 1e-2] {
        let (pde, comp) = large_equilibrium(Order::Fourth, lambda, eps, m, default_nodes(Order::Fourth, eps))?;
        let gap = pde.values.iter().zip(&comp.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "{eps:>7} {:>10.6} {:>10.6} {:>10.6} {:>9.5} {:>9.5} {:>9.4}",
            contact_point_from_field(&pde, Order::Fourth).unwrap_or(f64::NAN),
            asymptotics::contact_point_bilaplacian(lambda, eps, m, xi0),
            asymptotics::contact_point_bilaplacian_leading(lambda, eps, m),
            norm_sq(&pde),
            norm_sq_bilaplacian(lambda, eps, m),
            gap / eps
        );
    }
    Ok(())
}
