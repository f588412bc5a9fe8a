use proptest::prelude::*;
use rand::Rng;

use qcausal::fixtures::{nested_partition_basis, one_way_basis, semicausal_basis};
use qcausal::games::{inner_product, ip_demo};
use qcausal::localizability::twisted_partition_basis;
use qcausal::measurement::measurement_channel;
use qcausal::protocols::{
    entanglement_swap_demo, run_theorem4, run_twisted_partition_classical, semilocal_channel,
    twisted_protocol_channel, BellLabel, CommDirection, SemilocalMode,
};
use qcausal::random::{haar_unitary, random_density, random_state, rng};
use qcausal::tensor::{product_ket, BiDims};

const SAMPLES: u64 = 10_000;

fn within_four_standard_errors(count: u64, p: f64) -> bool {
    let n = SAMPLES as f64;
    let se = (p * (1.0 - p) / n).sqrt().max(1.0 / n);
    (count as f64 / n - p).abs() <= 4.0 * se
}

#[test]
fn one_way_protocol_outcomes_follow_born_rule() {
    let basis = one_way_basis();
    let rho = random_density(4, &mut rng(3));
    let mut counts = [0u64; 4];
    for seed in 0..SAMPLES {
        let run = run_theorem4(&basis, &rho, seed, SemilocalMode::Optimized).unwrap();
        assert!(run.trace.is_semilocal());
        counts[run.outcome] += 1;
    }
    for (a, &count) in counts.iter().enumerate() {
        let v = basis.vector(a);
        let p = (&(&v.adjoint() * &rho) * v)[(0, 0)].re;
        assert!(
            within_four_standard_errors(count, p),
            "outcome {a}: {count} vs p = {p}"
        );
    }
}

#[test]
fn literal_runs_emit_the_measured_state() {
    let basis = nested_partition_basis(2);
    let rho = random_state(36, &mut rng(8)).projector();
    for seed in 0..20 {
        let run = run_theorem4(&basis, &rho, seed, SemilocalMode::Literal).unwrap();
        assert_eq!(run.trace.messages(CommDirection::BtoA).count(), 0);
        assert!(run
            .final_state
            .approx_eq(&basis.vector(run.outcome).projector(), 1e-9));
    }
}

#[test]
fn swap_outcomes_follow_bell_overlaps() {
    let mut r = rng(12);
    let input = product_ket(&random_state(2, &mut r), &random_state(2, &mut r));
    let mut counts = [0u64; 4];
    for seed in 0..SAMPLES {
        let run = entanglement_swap_demo(&input, seed).unwrap();
        counts[run.ab.index()] += 1;
    }
    for label in BellLabel::ALL {
        let p = label.ket().inner(&input).norm_sqr();
        let count = counts[label.index()];
        assert!(
            within_four_standard_errors(count, p),
            "{}: {count} vs p = {p}",
            label.name()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn one_way_protocol_matches_measurement(seed: u64, na in 2..=3usize, nb in 2..=3usize) {
        let dims = BiDims::new(na, nb).unwrap();
        let mut r = rng(seed);
        let first = r.random_range(1..=na.min(nb));
        let split: Vec<usize> = if first == na { vec![na] } else { vec![first, na - first] };
        let basis = semicausal_basis(dims, &split, &mut r).unwrap();
        let target = measurement_channel(&basis).choi();
        for mode in [SemilocalMode::Literal, SemilocalMode::Optimized] {
            let ch = semilocal_channel(&basis, mode).unwrap();
            prop_assert!(ch.choi().distance(&target) < 1e-9);
        }
    }

    #[test]
    fn twisted_protocol_matches_measurement(seed: u64) {
        let u = haar_unitary(2, &mut rng(seed));
        let ch = twisted_protocol_channel(&u).unwrap();
        let target = measurement_channel(&twisted_partition_basis(&u).unwrap());
        prop_assert!(ch.choi().distance(&target.choi()) < 1e-9);

        let rho = random_density(16, &mut rng(seed ^ 7));
        let run = run_twisted_partition_classical(&u, &rho, seed).unwrap();
        prop_assert_eq!(run.trace.messages(CommDirection::AtoB).count(), 1);
        prop_assert_eq!(run.trace.messages(CommDirection::BtoA).count(), 0);
    }

    #[test]
    fn inner_product_is_always_correct(x in prop::collection::vec(any::<bool>(), 1..8), seed: u64) {
        let y: Vec<bool> = {
            let mut r = rng(seed);
            x.iter().map(|_| r.random()).collect()
        };
        let run = ip_demo(&x, &y, seed).unwrap();
        prop_assert_eq!(run.result, inner_product(&x, &y));
    }
}
