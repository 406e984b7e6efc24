//! Seeded random matrices and states.
//!
//! Every Monte-Carlo consumer derives its generator from `(seed, stream)` so
//! results are independent of thread count and scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::density::DensityMatrix;
use super::eig::qr;
use super::matrix::ComplexMatrix;

pub type SimRng = ChaCha8Rng;

/// Generator for substream `stream` of master seed `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal phases divided out.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "haar_unitary needs dim >= 1");
    let z = ginibre(dim, dim, rng);
    let (mut q, r) = qr(&z);
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(dim, dim, rng).hermitian_part()
}

/// Haar-random pure state vector.
pub fn random_pure_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
    v
}

/// Random mixed state `G G† / Tr` with `G` a `dim × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    let g = ginibre(dim, rank, rng);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::from_parts_unchecked(m.scale_real(1.0 / tr), dims.to_vec())
}

/// Uniform point of the probability simplex, sorted nonincreasing.
pub fn random_sorted_simplex<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..d)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = x.iter().sum();
    for v in x.iter_mut() {
        *v /= s;
    }
    x.sort_by(|a, b| b.total_cmp(a));
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_one_is_a_phase() {
        let mut rng = seeded_rng(1, 0);
        let u = haar_unitary(1, &mut rng);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = haar_unitary(4, &mut seeded_rng(42, 3));
        let b = haar_unitary(4, &mut seeded_rng(42, 3));
        assert_eq!(a, b);
        let c = haar_unitary(4, &mut seeded_rng(42, 4));
        assert_ne!(a, c);
    }

    #[test]
    fn unitary_and_unit_columns() {
        let mut rng = seeded_rng(7, 0);
        for _ in 0..1000 {
            let u = haar_unitary(4, &mut rng);
            assert!(u.unitarity_error() < 1e-10);
            for j in 0..4 {
                let n: f64 = u.column(j).iter().map(|z| z.norm_sqr()).sum();
                assert!((n.sqrt() - 1.0).abs() < 1e-10);
            }
        }
    }

    /// Moments of |U_00|^2 are 1/d and 2/(d(d+1)) for Haar; left-multiplying by a fixed
    /// unitary must leave them unchanged.
    #[test]
    fn left_invariance_statistics() {
        let d = 3usize;
        let samples = 20_000;
        let mut rng = seeded_rng(99, 0);
        let v = haar_unitary(d, &mut seeded_rng(5, 5));
        let (mut m1, mut m2, mut l1, mut l2) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..samples {
            let u = haar_unitary(d, &mut rng);
            let x = u[(0, 0)].norm_sqr();
            let y = v.matmul(&u)[(0, 0)].norm_sqr();
            m1 += x;
            m2 += x * x;
            l1 += y;
            l2 += y * y;
        }
        let n = samples as f64;
        let (e1, e2) = (1.0 / d as f64, 2.0 / (d * (d + 1)) as f64);
        for (got, want) in [(m1 / n, e1), (l1 / n, e1), (m2 / n, e2), (l2 / n, e2)] {
            assert!((got - want).abs() < 0.01, "{got} vs {want}");
        }
    }
}
