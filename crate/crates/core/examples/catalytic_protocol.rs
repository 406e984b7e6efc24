//! Single-copy catalytic protocol built from an n-copy channel, then repeated reuse of a catalyst.

use entcat::catalysim::{preset, report, sequential_preset, sequential_reuse, PRESETS};

fn main() -> entcat::Result<()> {
    for name in PRESETS {
        for n in 1..=3 {
            let r = report(&preset(name, n, 0.1)?)?;
            println!(
                "{name:<10} n={n}  eps_in {:.4}  eps_out {:.4}  residual {:.1e}  I(S:rest) {:.4}",
                r.eps_in, r.eps_out, r.catalyst_residual, r.mi
            );
        }
    }
    let (rho, sigma, ch, tau) = sequential_preset(0.1)?;
    let run = sequential_reuse(&rho, &sigma, &ch, &tau, 4)?;
    println!(
        "reuse: single error {:.4}, distances {:?}",
        run.eps, run.dists
    );
    Ok(())
}
