//! Sufficient and necessary p_max thresholds for sending one qubit through n Pauli channels.

use entcat::capacity::{fig2_curves, pauli_transmit_limit};

fn main() -> entcat::Result<()> {
    let ns: Vec<u32> = [1, 2, 3, 5, 10, 20, 50].into();
    println!("{:>4} {:>8} {:>8}", "n", "solid", "dashed");
    for r in fig2_curves(&ns)? {
        println!("{:>4} {:8.4} {:8.4}", r.n, r.solid_pmax, r.dashed_pmax);
    }
    println!(
        "large-n limit of the sufficient threshold: {:.5}",
        pauli_transmit_limit()
    );
    Ok(())
}
