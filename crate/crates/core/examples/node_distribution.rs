//! Entanglement distribution over a depolarizing line with a node in the middle.

use entcat::nodedist::{det_grid, entanglement_breaking_length, feasibility, LN3};

fn main() -> entcat::Result<()> {
    let alpha = 1.0;
    println!(
        "Choi state breaks at l = {:.6} (ln 3 = {LN3:.6})",
        entanglement_breaking_length(alpha, 1e-9)?
    );
    for l in [0.5, 1.0, 1.5, 2.0, 2.5] {
        let f = feasibility(alpha, l)?;
        println!(
            "l = {l:3.1}: {:?}  half-length det {:+.3e}",
            f.verdict, f.half_choi_det
        );
    }
    let cells = det_grid(50, 50)?;
    let min = cells.iter().map(|c| c.det).fold(f64::INFINITY, f64::min);
    println!("min det over the node grid at l = ln 3: {min:.3e}");
    Ok(())
}
