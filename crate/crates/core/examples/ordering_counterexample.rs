//! Two qutrit states whose entanglement entropy and log-negativity disagree on the ordering,
//! so catalytic convertibility is not decided by log-negativity. No such pair exists for qubits.

use entcat::convertibility::{
    catalytic_convertible, nielsen_convertible, ordering_example, pure_log_negativity,
    two_qubit_ordering_violations,
};

fn main() {
    let (psi, phi) = ordering_example();
    for (name, s) in [("psi", &psi), ("phi", &phi)] {
        println!(
            "{name}: {:?}  E = {:.4}  E_N = {:.4}",
            s.probs(),
            s.entropy(),
            pure_log_negativity(s)
        );
    }
    println!(
        "psi -> phi  LOCC: {}  catalytic: {}",
        nielsen_convertible(&psi, &phi),
        catalytic_convertible(&psi, &phi)
    );
    println!(
        "phi -> psi  LOCC: {}  catalytic: {}",
        nielsen_convertible(&phi, &psi),
        catalytic_convertible(&phi, &psi)
    );

    let v = two_qubit_ordering_violations(1e-3);
    println!("two-qubit grid (step 1e-3): {} ordering reversals", v.len());
}
