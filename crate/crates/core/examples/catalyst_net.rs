//! Builds the finite target net for qutrit conversions and snaps a few random targets onto it.

use entcat::convertibility::{build_eps_net, is_valid_target, select_target};
use entcat::linalg::random::{random_sorted_simplex, seeded_rng};
use entcat::linalg::SchmidtVector;

fn main() -> entcat::Result<()> {
    let net = build_eps_net(3, 0.5)?;
    println!(
        "{} points, entropy gap {:.3e}, delta {:.3e}",
        net.len(),
        net.pairwise_gap,
        net.delta
    );
    let mut rng = seeded_rng(1, 0);
    for _ in 0..5 {
        let phi = SchmidtVector::new(random_sorted_simplex(3, &mut rng))?;
        let g = select_target(&phi, &net)?;
        println!(
            "{:?} -> {:?}  distance {:.4}  valid {}",
            phi.probs(),
            g.probs(),
            g.pure_trace_distance(&phi),
            is_valid_target(&g, &phi, &net)
        );
    }
    Ok(())
}
