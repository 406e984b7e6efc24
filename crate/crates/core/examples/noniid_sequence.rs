//! Non-identical source sequence: certified parameters and a few prefix rows.

use entcat::noniid::{build_sequence, prefix_rows};

fn main() -> entcat::Result<()> {
    let (f, eps) = (0.9, 0.01);
    let seq = build_sequence(f, eps, 1.0)?;
    println!(
        "delta = {}, tail starts at 2^{:.2}",
        seq.delta, seq.tail.log2
    );
    for r in prefix_rows(&seq, 1, 100_000, 20_000)? {
        println!(
            "i = {:>6}  p_i = {:.3e}  prod = {:.12}  P_f = {:.3e}",
            r.i,
            r.p_i,
            r.prod,
            seq.singlet_probability(r.i, f)?
        );
    }
    let b = seq.entropy_budget(100_000)?;
    println!(
        "entropy sum {:.6e} within [{:.6e}, {:.6e}]: {}",
        b.sum,
        b.lower,
        b.upper,
        b.within_bracket()
    );
    Ok(())
}
