//! Largest damping at which the qudit amplitude-damping channel still carries a qubit.

use entcat::capacity::adc_transmit_range;

fn main() -> entcat::Result<()> {
    for d in 3..=8 {
        let r = adc_transmit_range(d, 1)?;
        println!(
            "d = {d}: p < {:.4}  (hashing at p*: closed form {:.6}, numeric {:.6})",
            r.p_star, r.hashing_closed, r.hashing_numeric
        );
    }
    Ok(())
}
