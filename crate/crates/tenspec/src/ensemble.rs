//! Seeded random tensor ensembles.
//!
//! Entries are i.i.d. uniform on (0, 1], thinned to a target density, then
//! tail-symmetrized. Structural requirements (weak irreducibility, complete
//! action sets) are enforced by rejection sampling so that ensembles remain
//! exactly reproducible from a seed.

use crate::error::{Result, TenspecError};
use crate::structure;
use crate::tensor::{DenseTensor, Shape, SparseSupportTensor};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform (0,1] entries thinned to `density`, tail-symmetrized.
pub fn random_tensor(n: usize, d: usize, density: f64, rng: &mut ChaCha8Rng) -> DenseTensor {
    let shape = Shape::equidimensional(n, d).expect("valid shape");
    let values: Vec<f64> = (0..shape.len())
        .map(|_| {
            let keep = rng.gen::<f64>() < density;
            // Draw unconditionally to keep the stream position independent
            // of the thinning outcome.
            let v = 1.0 - rng.gen::<f64>();
            if keep {
                v
            } else {
                0.0
            }
        })
        .collect();
    DenseTensor::new(shape, values, false)
        .expect("length matches shape")
        .symmetrize_tail()
}

/// Fully positive tensor with uniform (0,1] entries, tail-symmetrized.
pub fn random_positive_tensor(n: usize, d: usize, rng: &mut ChaCha8Rng) -> DenseTensor {
    random_tensor(n, d, 1.1, rng)
}

/// Rejection sampling until the support digraph is strongly connected.
pub fn random_weakly_irreducible(
    n: usize,
    d: usize,
    density: f64,
    rng: &mut ChaCha8Rng,
) -> Result<DenseTensor> {
    for _ in 0..10_000 {
        let t = random_tensor(n, d, density, rng);
        if structure::weak_irreducibility(&t)?.0 {
            return Ok(t);
        }
    }
    Err(TenspecError::Domain(format!(
        "rejection sampling failed to draw a weakly irreducible tensor at n={n}, d={d}, density={density}"
    )))
}

/// Weakly irreducible concise-support tensor in which every state has at
/// least one entry.
pub fn random_sparse_support(
    n: usize,
    d: usize,
    density: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SparseSupportTensor> {
    for _ in 0..10_000 {
        let t = random_tensor(n, d, density, rng);
        if !structure::weak_irreducibility(&t)?.0 {
            continue;
        }
        let s = SparseSupportTensor::from_dense(&t)?;
        if (0..n).all(|i| s.entries_for_state(i).next().is_some()) {
            return Ok(s);
        }
    }
    Err(TenspecError::Domain(
        "rejection sampling failed to draw a usable sparse support".into(),
    ))
}

/// Strictly positive vector with entries in (lo, lo + range).
pub fn random_positive_vector(n: usize, lo: f64, range: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| lo + range * rng.gen::<f64>()).collect()
}

/// Uniform sample from the interior of the probability simplex.
pub fn random_simplex_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    for v in &mut e {
        *v /= s;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensembles_are_reproducible() {
        let a = random_tensor(3, 3, 0.5, &mut rng_from_seed(5));
        let b = random_tensor(3, 3, 0.5, &mut rng_from_seed(5));
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn weak_irreducibility_is_enforced() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let t = random_weakly_irreducible(3, 3, 0.3, &mut rng).unwrap();
            assert!(structure::weak_irreducibility(&t).unwrap().0);
        }
    }

    #[test]
    fn sparse_supports_cover_every_state() {
        let mut rng = rng_from_seed(13);
        for _ in 0..20 {
            let s = random_sparse_support(4, 3, 0.25, &mut rng).unwrap();
            for i in 0..4 {
                assert!(s.entries_for_state(i).next().is_some());
            }
        }
    }

    #[test]
    fn simplex_points_are_normalized() {
        let mut rng = rng_from_seed(17);
        let p = random_simplex_point(5, &mut rng);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&v| v > 0.0));
    }
}
