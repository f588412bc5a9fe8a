//! Seeded random states, unitaries and density matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::{ComplexMatrix, C64};

/// Deterministic generator used everywhere randomness is needed.
pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn random_state(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ginibre(dim, 1, rng).normalized()
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let columns = gram_schmidt(&g.columns());
    ComplexMatrix::from_columns(&columns).expect("uniform columns")
}

/// Random density matrix `G G^dagger / tr` with full rank almost surely.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Orthonormalizes vectors in order (modified Gram-Schmidt, two passes).
///
/// Vectors that become numerically dependent are dropped.
pub fn gram_schmidt(vectors: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.inner(&w);
                w.add_scaled(-c, q);
            }
        }
        let n = w.norm();
        if n > 1e-10 {
            out.push(w.scale_real(1.0 / n));
        }
    }
    out
}
