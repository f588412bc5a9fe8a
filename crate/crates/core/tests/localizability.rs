use proptest::prelude::*;

use qcausal::causality::{semicausal_test, Direction};
use qcausal::fixtures::{bell_basis, named_qubit_unitary};
use qcausal::games::{
    and_box_channel, channel_game_value, chsh_success_quantum, classical_max,
    entangled_local_protocol, QuantumStrategy, CIRELSON_VALUE,
};
use qcausal::localizability::{
    basis_from_unitaries, extract_unitaries, pauli_basis_unitaries, projective_group_test,
    search_eigenstate_closure,
};
use qcausal::random::{haar_unitary, random_density, random_state, rng};
use qcausal::tensor::{tensor_product, BiDims, ComplexMatrix};
use qcausal::twirl::{
    close_group, pauli_group, singlet_fidelity, stabilizer_channel, twirl_channel, werner_twirl,
    PauliLetter, PauliString, ProjectiveUnitaryGroup,
};
use qcausal::KrausChannel;

fn equal_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    let d = a.rows() as f64;
    (a.hs_inner(b).norm() - d).abs() < 1e-9 * d
}

fn qubit_paulis() -> Vec<ComplexMatrix> {
    [
        PauliLetter::I,
        PauliLetter::X,
        PauliLetter::Y,
        PauliLetter::Z,
    ]
    .iter()
    .map(|p| p.matrix())
    .collect()
}

#[test]
fn common_twist_keeps_closure_and_only_normalizers_fix_the_paulis() {
    let paulis = qubit_paulis();
    for (name, normalizes) in [("i", true), ("h", true), ("t", false)] {
        let w = named_qubit_unitary(name).unwrap();
        let twisted: Vec<ComplexMatrix> = pauli_basis_unitaries(2).iter().map(|p| p * &w).collect();
        let us = extract_unitaries(&basis_from_unitaries(&twisted).unwrap()).unwrap();
        assert!(projective_group_test(&us).unwrap().is_none(), "W = {name}");

        let conjugated: Vec<ComplexMatrix> =
            paulis.iter().map(|p| &(&w.adjoint() * p) * &w).collect();
        let same = conjugated
            .iter()
            .all(|c| paulis.iter().any(|p| equal_up_to_phase(c, p)));
        assert_eq!(same, normalizes, "W = {name}");
    }
}

#[test]
fn generalized_bell_sets_pass_group_test() {
    for d in 2..=4 {
        let us =
            extract_unitaries(&basis_from_unitaries(&pauli_basis_unitaries(d)).unwrap()).unwrap();
        assert!(projective_group_test(&us).unwrap().is_none(), "d = {d}");
    }
}

#[test]
fn stabilizer_channel_matches_group_twirl() {
    let sets: [(&[&str], (usize, usize)); 5] = [
        (&["XX", "ZZ"], (2, 2)),
        (&["ZZ"], (2, 2)),
        (&["XI"], (2, 2)),
        (&["ZZI", "IZZ"], (2, 4)),
        (&["XXX", "ZZI", "IZZ"], (4, 2)),
    ];
    for (gens, (na, nb)) in sets {
        let gens: Vec<PauliString> = gens.iter().map(|g| g.parse().unwrap()).collect();
        let dims = BiDims::new(na, nb).unwrap();
        let stab = stabilizer_channel(&gens, dims).unwrap();
        let mats: Vec<ComplexMatrix> = gens.iter().map(|g| g.matrix()).collect();
        let group = close_group(&mats, 64).unwrap();
        let twirl = twirl_channel(&group, dims).unwrap();
        assert!(stab.choi().distance(&twirl.choi()) < 1e-9, "{gens:?}");
        assert!(semicausal_test(&stab, Direction::BtoA) && semicausal_test(&stab, Direction::AtoB));
    }
}

#[test]
fn game_value_hierarchy() {
    let local = channel_game_value(
        &entangled_local_protocol(&QuantumStrategy::cirelson_optimal()).unwrap(),
    )
    .unwrap();
    let magic = channel_game_value(&and_box_channel()).unwrap();
    assert!(classical_max() < local && local < magic);
    assert!((local - CIRELSON_VALUE).abs() < 1e-9);
    assert_eq!(magic, 1.0);
}

fn pauli_string_strategy(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0..4usize, n), any::<bool>()).prop_map(|(idx, neg)| {
        let letters = idx
            .into_iter()
            .map(|i| {
                [
                    PauliLetter::I,
                    PauliLetter::X,
                    PauliLetter::Y,
                    PauliLetter::Z,
                ][i]
            })
            .collect();
        PauliString::new(letters, if neg { -1 } else { 1 }).unwrap()
    })
}

/// A projective group of product unitaries across a 2x2 cut.
fn product_group(seed: u64, size: usize) -> ProjectiveUnitaryGroup {
    let mut r = rng(seed);
    let v = tensor_product(&haar_unitary(2, &mut r), &haar_unitary(2, &mut r));
    let paulis = pauli_basis_unitaries(2);
    let gens: Vec<ComplexMatrix> = (0..size)
        .map(|k| {
            let p = tensor_product(&paulis[(k + 1) % 4], &paulis[(3 * k + 2) % 4]);
            &(&v * &p) * &v.adjoint()
        })
        .collect();
    close_group(&gens, 16).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn extracted_unitaries_round_trip(seed: u64, d in 2..=4usize) {
        let v = haar_unitary(d, &mut rng(seed));
        let conjugated: Vec<ComplexMatrix> = pauli_basis_unitaries(d)
            .iter()
            .map(|p| &(&v * p) * &v.adjoint())
            .collect();
        let us = extract_unitaries(&basis_from_unitaries(&conjugated).unwrap()).unwrap();
        prop_assert_eq!(us.unitaries.len(), conjugated.len());
        for (got, want) in us.unitaries.iter().zip(&conjugated) {
            prop_assert!(equal_up_to_phase(got, want));
        }
    }

    #[test]
    fn product_twirls_are_causal_idempotent_and_unobstructed(seed: u64, size in 1..=3usize) {
        let group = product_group(seed, size);
        let ch = twirl_channel(&group, BiDims::QUBITS).unwrap();
        prop_assert!(semicausal_test(&ch, Direction::BtoA));
        prop_assert!(semicausal_test(&ch, Direction::AtoB));
        let twice = KrausChannel::compose(&ch, &ch).unwrap();
        prop_assert!(twice.choi().distance(&ch.choi()) < 1e-9);

        let mut r = rng(seed ^ 1);
        let mut candidates: Vec<ComplexMatrix> = bell_basis().vectors().to_vec();
        candidates.extend((0..4).map(|_| random_state(4, &mut r)));
        prop_assert!(search_eigenstate_closure(&ch, &candidates).is_none());
    }

    #[test]
    fn pauli_twirls_match_stabilizer_form(p in pauli_string_strategy(2), q in pauli_string_strategy(2)) {
        prop_assume!(p.commutes_with(&q));
        let gens = vec![p, q];
        let group = pauli_group(&gens).unwrap();
        let twirl = twirl_channel(&group, BiDims::QUBITS).unwrap();
        prop_assert!(semicausal_test(&twirl, Direction::BtoA) && semicausal_test(&twirl, Direction::AtoB));
        if let Ok(stab) = stabilizer_channel(&gens, BiDims::QUBITS) {
            prop_assert!(stab.choi().distance(&twirl.choi()) < 1e-9);
        }
    }

    #[test]
    fn werner_twirl_preserves_singlet_fidelity(seed: u64) {
        let rho = random_density(4, &mut rng(seed));
        let out = werner_twirl().apply(&rho).unwrap();
        prop_assert!((singlet_fidelity(&out) - singlet_fidelity(&rho)).abs() < 1e-9);
    }

    #[test]
    fn werner_twirl_is_idempotent(seed: u64) {
        let rho = random_density(4, &mut rng(seed));
        let w = werner_twirl();
        let once = w.apply(&rho).unwrap();
        prop_assert!(w.apply(&once).unwrap().distance(&once) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_strategies_respect_quantum_bound(seed: u64) {
        let s = QuantumStrategy::random(2, &mut rng(seed));
        prop_assert!(chsh_success_quantum(&s).unwrap() <= CIRELSON_VALUE + 1e-9);
    }
}
