//! Entropy, log-negativity and entanglement of formation for a few two-qubit states.

use entcat::linalg::DensityMatrix;
use entcat::measures::{concurrence, eof_two_qubit, log_negativity, von_neumann_entropy};

fn main() -> entcat::Result<()> {
    let bell = DensityMatrix::max_entangled(2);
    let werner = |w: f64| {
        DensityMatrix::bell_diagonal([w, (1.0 - w) / 3.0, (1.0 - w) / 3.0, (1.0 - w) / 3.0])
    };

    println!(
        "{:>8} {:>8} {:>8} {:>8} {:>8}",
        "state", "S(A)", "E_N", "C", "E_f"
    );
    for (name, rho) in [
        ("bell", bell),
        ("w=0.9", werner(0.9)),
        ("w=0.6", werner(0.6)),
        ("w=0.5", werner(0.5)),
    ] {
        println!(
            "{name:>8} {:8.4} {:8.4} {:8.4} {:8.4}",
            von_neumann_entropy(&rho.partial_trace(&[0])?).value,
            log_negativity(&rho, 1)?.value,
            concurrence(&rho)?,
            eof_two_qubit(&rho)?.value,
        );
    }
    Ok(())
}
