//! Sampled upper bound on squashed entanglement next to entanglement of formation for the
//! dephasing Choi states. Pass a sample count as the first argument (default 20000).

use entcat::capacity::{fig3_grid, fig3_rows, pauli_converse_esq_mc};
use entcat::cli::DEFAULT_SEED;

fn main() -> entcat::Result<()> {
    let samples = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000);
    println!("{:>6} {:>8} {:>8}", "p", "E_f", "E_sq_MC");
    for r in fig3_rows(&fig3_grid(11), samples, DEFAULT_SEED)? {
        println!("{:6.3} {:8.4} {:8.4}", r.p, r.ef, r.esq_mc);
    }
    let c = pauli_converse_esq_mc(0.817, 2, 1, samples, DEFAULT_SEED)?;
    println!(
        "two uses at p = 0.817: bound {:.5} vs {:.1} -> {:?}",
        c.bound, c.target, c.verdict
    );
    Ok(())
}
