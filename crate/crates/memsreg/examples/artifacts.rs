//! Writing CSV tables and a plot script from library results.
//!
//!     cargo run --release --example artifacts -- /tmp/memsreg-artifacts
//!     python3 /tmp/memsreg-artifacts/plot_lengths.py

use std::path::PathBuf;

use memsreg::export::{write_plot_script, CsvTable, Panel};
use memsreg::phaseplane::sample_length_curve;

fn main() -> memsreg::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "artifacts".into()));
    let mut t = CsvTable::new(["eps", "alpha", "lambda"]).meta("m", 4).meta("what", "lambda = l(alpha)^2");
    for eps in [0.0, 0.02, 0.1] {
        let c = sample_length_curve(eps, 4, 400)?;
        for (a, l) in c.alpha.iter().zip(&c.l) {
            t.push(vec![eps, *a, l * l]);
        }
    }
    t.write(&dir.join("lengths.csv"))?;
    let script = write_plot_script(
        &dir,
        "lengths",
        "phase-plane branch",
        &[Panel::new("lengths.csv", "alpha", &["lambda"]).labels("1 + min u", "lambda").group("eps")],
    )?;
    println!("wrote {} and {}", dir.join("lengths.csv").display(), script.display());
    Ok(())
}
