use entcat::capacity::capacity_report;
use entcat::channels::{dephasing, gad_channel, identity, pauli_channel, PauliWeights};

fn main() -> entcat::Result<()> {
    let channels = [
        ("identity(4)", identity(4)),
        ("dephasing(0.95)", dephasing(0.95)?),
        (
            "pauli(0.7,0.1,0.1,0.1)",
            pauli_channel(&PauliWeights::new([0.7, 0.1, 0.1, 0.1])?),
        ),
        ("amplitude damping d=4 p=0.2", gad_channel(4, 0.2)?),
    ];
    for (name, ch) in channels {
        let r = capacity_report(&ch, name, None)?;
        println!(
            "{name:<30} hashing {:7.4}  Q_c in [{}, {}]",
            r.hashing_bound, r.qc_lower, r.qc_upper
        );
    }
    Ok(())
}
