//! Inner-layer problems at the edge of the contact set.
//!
//! Second order: v″ = λ(1/v² − 1/v^m) with v ~ Bξ − L ln ξ + γ.
//! Fourth order: −v⁗ = λ(1/v² − 1/v^m), shot along the unstable manifold
//! of v = 1, with v ~ b₀ξ² + c₀ξ + d₀ + … and ξ₀ = c₀(λ₀c/λ)^{1/4}.
//!
//!     cargo run --release --example inner_layers

use memsreg::asymptotics::bilaplacian::{tail_residual, DEFAULT_XI_MAX};
use memsreg::asymptotics::{gamma_laplacian, inner_bilaplacian_shoot, inner_laplacian, FarField};

fn main() -> memsreg::Result<()> {
    println!("Laplacian inner constant gamma(lambda, m)");
    for m in [3, 4, 6] {
        let row: Vec<String> =
            [1.0, 10.0, 100.0].iter().map(|&l| gamma_laplacian(l, m).map(|g| format!("{g:>12.8}"))).collect::<Result<_, _>>()?;
        println!("  m = {m}: {}", row.join(" "));
    }
    let p = inner_laplacian(10.0, 4, 50.0)?;
    println!("  lambda = 10, m = 4: {} samples, first-integral residual {:.1e}", p.xi.len(), p.first_integral_residual);

    println!("\nbi-Laplacian separatrix");
    for (lambda, m) in [(10.0, 4), (50.0, 4), (50.0, 3), (50.0, 5)] {
        let p = inner_bilaplacian_shoot(lambda, m, DEFAULT_XI_MAX)?;
        let FarField::BiLaplacian { b0, c0, d0, xi0 } = p.far else { unreachable!() };
        println!(
            "  lambda = {lambda}, m = {m}: xi0 = {xi0:.6}, b0 = {b0:.5}, c0 = {c0:.5}, d0 = {d0:.5}, min v = {:.6}, residual {:.1e}",
            p.min_value(),
            p.first_integral_residual
        );
    }
    let p = inner_bilaplacian_shoot(50.0, 4, DEFAULT_XI_MAX)?;
    println!("  tail minus v0 series (lambda = 50, m = 4):");
    for xi in [5.0, 10.0, 20.0, 40.0] {
        println!("    xi = {xi:>4}: {:.3e}", tail_residual(&p, xi).unwrap());
    }
    Ok(())
}
