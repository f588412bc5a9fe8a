use proptest::prelude::*;
use rand::Rng;

use qcausal::causality::{semicausal_test, signaling_search, unitary_product_test, Direction};
use qcausal::fixtures::{causal_basis, conditional_product_basis, random_basis, semicausal_basis};
use qcausal::measurement::{
    constructive_witness, measurement_channel, partition_structure, reduced_state_dichotomy,
    reduced_states,
};
use qcausal::random::{haar_unitary, rng};
use qcausal::tensor::{schmidt_decomposition, tensor_product, BiDims, ComplexMatrix, Side};
use qcausal::{KrausChannel, OrthogonalBasis};

fn dims_strategy() -> impl Strategy<Value = BiDims> {
    (2..=4usize, 2..=4usize).prop_map(|(a, b)| BiDims::new(a, b).unwrap())
}

/// Splits `na` into parts no larger than `nb`.
fn random_split(na: usize, nb: usize, r: &mut impl Rng) -> Vec<usize> {
    let mut left = na;
    let mut parts = Vec::new();
    while left > 0 {
        let p = r.random_range(1..=left.min(nb));
        parts.push(p);
        left -= p;
    }
    parts
}

fn one_way(dims: BiDims, seed: u64) -> OrthogonalBasis {
    let mut r = rng(seed);
    let split = random_split(dims.dim_a, dims.dim_b, &mut r);
    semicausal_basis(dims, &split, &mut r).unwrap()
}

/// A channel at (2, 2) through which Bob cannot signal Alice.
fn blocked_qubit_channel(kind: u8, seed: u64) -> KrausChannel {
    let dims = BiDims::QUBITS;
    let mut r = rng(seed);
    match kind % 4 {
        0 => measurement_channel(&one_way(dims, seed)),
        1 => measurement_channel(&conditional_product_basis(dims, &mut r)),
        2 => measurement_channel(&causal_basis(dims, 2, &mut r).unwrap()),
        _ => {
            let u = tensor_product(&haar_unitary(2, &mut r), &haar_unitary(2, &mut r));
            KrausChannel::unitary(u, dims).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reduced_states_sum_to_scaled_identity(seed: u64, dims in dims_strategy()) {
        let basis = random_basis(dims, &mut rng(seed));
        for side in [Side::A, Side::B] {
            let n = dims.dim(side);
            let mut total = ComplexMatrix::zeros(n, n);
            for s in reduced_states(&basis, side) {
                total.add_assign(&s);
            }
            let expected = ComplexMatrix::identity(n).scale_real(dims.dim(side.other()) as f64);
            prop_assert!(total.distance(&expected) < 1e-9);
        }
    }

    #[test]
    fn dichotomy_agrees_with_choi_test(seed: u64, dims in dims_strategy(), kind in 0..3u8) {
        let mut r = rng(seed);
        let basis = match kind {
            0 => random_basis(dims, &mut r),
            1 => one_way(dims, seed),
            _ => conditional_product_basis(dims, &mut r),
        };
        let ch = measurement_channel(&basis);
        for (side, dir) in [(Side::A, Direction::BtoA), (Side::B, Direction::AtoB)] {
            prop_assert_eq!(reduced_state_dichotomy(&basis, side).semicausal, semicausal_test(&ch, dir));
        }
    }

    #[test]
    fn constructive_witness_exists_when_dichotomy_fails(seed: u64, dims in dims_strategy()) {
        let basis = one_way(dims, seed);
        if !reduced_state_dichotomy(&basis, Side::B).semicausal {
            let w = constructive_witness(&basis, Side::B).unwrap();
            prop_assert!(w.separation > 1e-6);
        }
    }

    #[test]
    fn partition_members_are_maximally_entangled(seed: u64, dims in dims_strategy()) {
        let basis = one_way(dims, seed);
        let part = partition_structure(&basis, Side::A).unwrap();
        for sub in &part.subspaces {
            let expected = 1.0 / (sub.dim as f64).sqrt();
            for &m in &sub.member_indices {
                let s = schmidt_decomposition(basis.vector(m), dims).unwrap();
                prop_assert_eq!(s.rank(1e-9), sub.dim);
                for c in &s.coefficients[..sub.dim] {
                    prop_assert!((c - expected).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn search_is_sound_on_blocked_directions(seed: u64, dims in dims_strategy()) {
        let ch = measurement_channel(&one_way(dims, seed));
        prop_assert!(semicausal_test(&ch, Direction::BtoA));
        prop_assert!(signaling_search(&ch, Direction::BtoA, 8, seed).is_none());
    }

    #[test]
    fn entangling_unitaries_signal_both_ways(seed: u64, nb in 2..=3usize) {
        let dims = BiDims::new(2, nb).unwrap();
        let u = haar_unitary(dims.total(), &mut rng(seed));
        let verdict = unitary_product_test(&u, dims).unwrap();
        prop_assert!(!verdict.is_product);
        let ch = KrausChannel::unitary(u, dims).unwrap();
        prop_assert!(!semicausal_test(&ch, Direction::BtoA));
        prop_assert!(!semicausal_test(&ch, Direction::AtoB));
    }

    #[test]
    fn composition_preserves_semicausality(k1 in 0..4u8, k2 in 0..4u8, s1: u64, s2: u64) {
        let e1 = blocked_qubit_channel(k1, s1);
        let e2 = blocked_qubit_channel(k2, s2);
        let c = KrausChannel::compose(&e2, &e1).unwrap();
        prop_assert!(c.validate().tp);
        prop_assert!(semicausal_test(&c, Direction::BtoA));
    }

    #[test]
    fn mixture_preserves_semicausality(k1 in 0..4u8, k2 in 0..4u8, s1: u64, s2: u64) {
        let e1 = blocked_qubit_channel(k1, s1);
        let e2 = blocked_qubit_channel(k2, s2);
        let m = KrausChannel::mixture(&[(0.5, &e1), (0.5, &e2)]).unwrap();
        prop_assert!(m.validate().tp);
        prop_assert!(semicausal_test(&m, Direction::BtoA));
    }
}
