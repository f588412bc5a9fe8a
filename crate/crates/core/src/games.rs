//! CHSH-type games, the AND box channel and the one-bit inner product
//! protocol it enables.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::random::{haar_unitary, random_state, rng};
use crate::tensor::{tensor_product, BiDims, ComplexMatrix, C64, TOL};

/// `cos^2(pi/8) = 1/2 + 1/(2 sqrt 2)`, the best quantum CHSH success probability.
pub const CIRELSON_VALUE: f64 = 0.853_553_390_593_273_7;

/// Best classical CHSH success probability.
pub const CLASSICAL_BOUND: f64 = 0.75;

fn pair_ket(a: usize, b: usize) -> ComplexMatrix {
    ComplexMatrix::basis_ket(4, 2 * a + b)
}

fn transition(out: usize, input: usize, amp: f64) -> ComplexMatrix {
    ComplexMatrix::basis_ket(4, out)
        .outer(&ComplexMatrix::basis_ket(4, input))
        .scale_real(amp)
}

/// Outputs uniformly random bits `a, b` with `a xor b = x and y`.
///
/// Kraus operators are `(|u> +- |v>)<in| / 2` for the two allowed outputs
/// `u, v`, so every amplitude is exactly representable.
pub fn and_box_channel() -> KrausChannel {
    let mut kraus = Vec::with_capacity(8);
    for input in 0..4 {
        let [u, v] = if input == 3 { [1, 2] } else { [0, 3] };
        for sign in [1.0, -1.0] {
            kraus.push(&transition(u, input, 0.5) + &transition(v, input, 0.5 * sign));
        }
    }
    KrausChannel::new(BiDims::QUBITS, kraus).expect("valid Kraus list")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalStrategy {
    pub a0: bool,
    pub a1: bool,
    pub b0: bool,
    pub b1: bool,
}

impl ClassicalStrategy {
    /// All sixteen deterministic strategies.
    pub fn all() -> impl Iterator<Item = ClassicalStrategy> {
        (0u8..16).map(|m| ClassicalStrategy {
            a0: m & 1 != 0,
            a1: m & 2 != 0,
            b0: m & 4 != 0,
            b1: m & 8 != 0,
        })
    }

    fn a(&self, x: bool) -> bool {
        if x {
            self.a1
        } else {
            self.a0
        }
    }

    fn b(&self, y: bool) -> bool {
        if y {
            self.b1
        } else {
            self.b0
        }
    }
}

fn inputs() -> [(bool, bool); 4] {
    [(false, false), (false, true), (true, false), (true, true)]
}

pub fn chsh_success_classical(s: &ClassicalStrategy) -> f64 {
    inputs()
        .iter()
        .filter(|&&(x, y)| s.a(x) ^ s.b(y) == (x && y))
        .count() as f64
        / 4.0
}

pub fn classical_max() -> f64 {
    ClassicalStrategy::all()
        .map(|s| chsh_success_classical(&s))
        .fold(0.0, f64::max)
}

/// Shared pure state and +-1 observables for each input.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantumStrategy {
    #[serde(rename = "sharedState")]
    pub shared_state: ComplexMatrix,
    pub a0: ComplexMatrix,
    pub a1: ComplexMatrix,
    pub b0: ComplexMatrix,
    pub b1: ComplexMatrix,
}

fn check_observable(m: &ComplexMatrix, name: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidStrategy(format!("{name} is not square")));
    }
    let dev = m.hermiticity_deviation();
    if dev > TOL {
        return Err(Error::InvalidStrategy(format!(
            "{name} is not Hermitian ({dev:.3e})"
        )));
    }
    let sq = (&(m * m) - &ComplexMatrix::identity(m.rows())).frobenius_norm();
    if sq > TOL {
        return Err(Error::InvalidStrategy(format!(
            "{name} does not square to the identity ({sq:.3e})"
        )));
    }
    Ok(())
}

impl QuantumStrategy {
    /// `A = Z, A' = X, B = (Z+X)/sqrt 2, B' = (Z-X)/sqrt 2` on `|phi+>`.
    pub fn cirelson_optimal() -> Self {
        let (x, z) = (pauli_x(), pauli_z());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QuantumStrategy {
            shared_state: phi_plus(),
            a0: z.clone(),
            a1: x.clone(),
            b0: (&z + &x).scale_real(s),
            b1: (&z - &x).scale_real(s),
        }
    }

    /// Haar-random state with random +-1 observables at local dimension `d`.
    pub fn random(d: usize, rng: &mut impl Rng) -> Self {
        QuantumStrategy {
            shared_state: random_state(d * d, rng),
            a0: random_observable(d, rng),
            a1: random_observable(d, rng),
            b0: random_observable(d, rng),
            b1: random_observable(d, rng),
        }
    }

    pub fn dims(&self) -> BiDims {
        BiDims {
            dim_a: self.a0.rows(),
            dim_b: self.b0.rows(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (m, name) in [
            (&self.a0, "A"),
            (&self.a1, "A'"),
            (&self.b0, "B"),
            (&self.b1, "B'"),
        ] {
            check_observable(m, name)?;
        }
        if self.a0.rows() != self.a1.rows() || self.b0.rows() != self.b1.rows() {
            return Err(Error::InvalidStrategy(
                "observables on one side differ in size".into(),
            ));
        }
        let dims = self.dims();
        if self.shared_state.shape() != (dims.total(), 1) {
            return Err(Error::InvalidStrategy(format!(
                "shared state must be a {}-dimensional ket",
                dims.total()
            )));
        }
        let n = self.shared_state.norm();
        if (n - 1.0).abs() > TOL {
            return Err(Error::InvalidStrategy(format!("shared state has norm {n}")));
        }
        Ok(())
    }

    /// Joint distribution `p[a][b]` of the +-1 outcomes (encoded as bits,
    /// 0 for +1) on inputs `x, y`.
    pub fn outcome_distribution(&self, x: bool, y: bool) -> [[f64; 2]; 2] {
        let a = if x { &self.a1 } else { &self.a0 };
        let b = if y { &self.b1 } else { &self.b0 };
        let proj = |m: &ComplexMatrix, bit: usize| {
            let sign = if bit == 0 { 0.5 } else { -0.5 };
            &ComplexMatrix::identity(m.rows()).scale_real(0.5) + &m.scale_real(sign)
        };
        let psi = &self.shared_state;
        let mut p = [[0.0; 2]; 2];
        for (i, row) in p.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let v = &tensor_product(&proj(a, i), &proj(b, j)) * psi;
                *cell = v.norm().powi(2);
            }
        }
        p
    }
}

/// `U diag(+-1) U^dagger` with Haar `U` and independent random signs.
pub fn random_observable(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let u = haar_unitary(d, rng);
    let signs: Vec<C64> = (0..d)
        .map(|_| C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0))
        .collect();
    let m = u.conjugate(&ComplexMatrix::diag(&signs));
    (&m + &m.adjoint()).scale_real(0.5)
}

/// Average over inputs of `P(a xor b = x and y)`.
pub fn chsh_success_quantum(s: &QuantumStrategy) -> Result<f64> {
    s.validate()?;
    let mut total = 0.0;
    for (x, y) in inputs() {
        let p = s.outcome_distribution(x, y);
        for (a, row) in p.iter().enumerate() {
            for (b, prob) in row.iter().enumerate() {
                if ((a ^ b) == 1) == (x && y) {
                    total += prob;
                }
            }
        }
    }
    Ok(total / 4.0)
}

/// Feed `|x, y>`, measure both outputs in the computational basis and score
/// `a xor b = x and y`.
pub fn channel_game_value(ch: &KrausChannel) -> Result<f64> {
    if ch.dims() != BiDims::QUBITS {
        return Err(Error::dims("2x2 channel", format!("{:?}", ch.dims())));
    }
    let mut total = 0.0;
    for (x, y) in inputs() {
        let out = ch.apply(&pair_ket(x as usize, y as usize).projector())?;
        for a in 0..2 {
            for b in 0..2 {
                if ((a ^ b) == 1) == (x && y) {
                    total += out[(2 * a + b, 2 * a + b)].re;
                }
            }
        }
    }
    Ok(total / 4.0)
}

/// Issued when a channel wins the CHSH game more often than any
/// entanglement-assisted local strategy can.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameCertificate {
    pub value: f64,
    pub bound: f64,
}

pub fn game_certificate(ch: &KrausChannel) -> Result<Option<GameCertificate>> {
    let value = channel_game_value(ch)?;
    Ok((value > CIRELSON_VALUE + TOL).then_some(GameCertificate {
        value,
        bound: CIRELSON_VALUE,
    }))
}

/// Compiles `s` into the channel `|x,y> -> |a,b>` that a no-communication
/// protocol with that strategy realizes.
pub fn entangled_local_protocol(s: &QuantumStrategy) -> Result<KrausChannel> {
    s.validate()?;
    let mut kraus = Vec::with_capacity(16);
    for (x, y) in inputs() {
        let p = s.outcome_distribution(x, y);
        let input = 2 * x as usize + y as usize;
        for (a, row) in p.iter().enumerate() {
            for (b, prob) in row.iter().enumerate() {
                if *prob > 0.0 {
                    kraus.push(transition(2 * a + b, input, prob.sqrt()));
                }
            }
        }
    }
    KrausChannel::new(BiDims::QUBITS, kraus)
}

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidInput(format!("not a bit string: {s:?}"))),
        })
        .collect()
}

pub fn inner_product(x: &[bool], y: &[bool]) -> bool {
    x.iter().zip(y).fold(false, |acc, (a, b)| acc ^ (a & b))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IpRun {
    pub alice_outputs: Vec<bool>,
    pub bob_outputs: Vec<bool>,
    /// The single bit Alice sends.
    pub message: bool,
    /// Bob's answer.
    pub result: bool,
}

fn and_box_outcomes() -> [[f64; 4]; 4] {
    let ch = and_box_channel();
    let mut table = [[0.0; 4]; 4];
    for (input, row) in table.iter_mut().enumerate() {
        let out = ch
            .apply(&ComplexMatrix::basis_ket(4, input).projector())
            .expect("4x4");
        for (k, p) in row.iter_mut().enumerate() {
            *p = out[(k, k)].re;
        }
    }
    table
}

fn check_lengths(x: &[bool], y: &[bool]) -> Result<()> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "bit strings must be nonempty and equal length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn ip_from_outputs(alice: Vec<bool>, bob: Vec<bool>) -> IpRun {
    let message = alice.iter().fold(false, |acc, b| acc ^ b);
    let result = bob.iter().fold(message, |acc, b| acc ^ b);
    IpRun {
        alice_outputs: alice,
        bob_outputs: bob,
        message,
        result,
    }
}

/// Computes `IP(x, y)` with one AND box per bit and one bit from Alice to Bob.
pub fn ip_demo(x: &[bool], y: &[bool], seed: u64) -> Result<IpRun> {
    check_lengths(x, y)?;
    let table = and_box_outcomes();
    let mut rng = rng(seed);
    let (mut alice, mut bob) = (Vec::new(), Vec::new());
    for (&xi, &yi) in x.iter().zip(y) {
        let probs = table[2 * xi as usize + yi as usize];
        let r: f64 = rng.random();
        let mut acc = 0.0;
        let k = (0..4)
            .find(|&k| {
                acc += probs[k];
                r < acc
            })
            .unwrap_or(3);
        alice.push(k >> 1 == 1);
        bob.push(k & 1 == 1);
    }
    Ok(ip_from_outputs(alice, bob))
}

/// Every run of the protocol with nonzero probability, with its probability.
pub fn ip_demo_branches(x: &[bool], y: &[bool]) -> Result<Vec<(f64, IpRun)>> {
    check_lengths(x, y)?;
    let table = and_box_outcomes();
    let mut branches = vec![(1.0, Vec::new(), Vec::new())];
    for (&xi, &yi) in x.iter().zip(y) {
        let probs = table[2 * xi as usize + yi as usize];
        branches = branches
            .into_iter()
            .flat_map(|(w, a, b)| {
                probs
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > TOL)
                    .map(move |(k, p)| {
                        let mut a = a.clone();
                        let mut b = b.clone();
                        a.push(k >> 1 == 1);
                        b.push(k & 1 == 1);
                        (w * p, a, b)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    Ok(branches
        .into_iter()
        .map(|(w, a, b)| (w, ip_from_outputs(a, b)))
        .collect())
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

fn phi_plus() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(4, 1, &[s, 0.0, 0.0, s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causality::causal_test;
    use crate::tensor::partial_trace;
    use crate::tensor::Side;

    fn zz_strategy() -> QuantumStrategy {
        let z = pauli_z();
        QuantumStrategy {
            shared_state: phi_plus(),
            a0: z.clone(),
            a1: z.clone(),
            b0: z.clone(),
            b1: z,
        }
    }

    /// `(1/2) + (1/8) (<A B> + <A B'> + <A' B> - <A' B'>)`.
    fn correlator_value(s: &QuantumStrategy) -> f64 {
        let e = |a: &ComplexMatrix, b: &ComplexMatrix| {
            let v = &tensor_product(a, b) * &s.shared_state;
            s.shared_state.inner(&v).re
        };
        0.5 + (e(&s.a0, &s.b0) + e(&s.a0, &s.b1) + e(&s.a1, &s.b0) - e(&s.a1, &s.b1)) / 8.0
    }

    #[test]
    fn and_box_examples() {
        let ch = and_box_channel();
        assert!(ch.validate().tp);
        assert_eq!(ch.kraus().len(), 8);
        let out = ch.apply(&pair_ket(0, 0).projector()).unwrap();
        let expected = &pair_ket(0, 0).projector().scale_real(0.5)
            + &pair_ket(1, 1).projector().scale_real(0.5);
        assert!(out.approx_eq(&expected, 1e-15));
        let out = ch.apply(&pair_ket(1, 1).projector()).unwrap();
        let expected = &pair_ket(0, 1).projector().scale_real(0.5)
            + &pair_ket(1, 0).projector().scale_real(0.5);
        assert!(out.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn and_box_marginals_are_maximally_mixed() {
        let mut r = rng(3);
        let ch = and_box_channel();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        for _ in 0..10 {
            let rho = crate::random::random_density(4, &mut r);
            let out = ch.apply(&rho).unwrap();
            for side in [Side::A, Side::B] {
                assert!(partial_trace(&out, BiDims::QUBITS, side)
                    .unwrap()
                    .approx_eq(&half, 1e-12));
            }
        }
    }

    #[test]
    fn classical_values() {
        let zero = ClassicalStrategy {
            a0: false,
            a1: false,
            b0: false,
            b1: false,
        };
        assert_eq!(chsh_success_classical(&zero), 0.75);
        let ones = ClassicalStrategy {
            a0: true,
            a1: true,
            b0: true,
            b1: true,
        };
        assert_eq!(chsh_success_classical(&ones), 0.75);
        let mixed = ClassicalStrategy {
            a0: false,
            a1: true,
            b0: false,
            b1: false,
        };
        // Inputs (0,0),(0,1) pass, (1,0) fails, (1,1) passes.
        assert_eq!(chsh_success_classical(&mixed), 0.75);
        let bad = ClassicalStrategy {
            a0: true,
            a1: false,
            b0: false,
            b1: false,
        };
        assert_eq!(chsh_success_classical(&bad), 0.25);
        assert_eq!(classical_max(), 0.75);
    }

    #[test]
    fn quantum_values() {
        let opt = QuantumStrategy::cirelson_optimal();
        let v = chsh_success_quantum(&opt).unwrap();
        assert!((v - CIRELSON_VALUE).abs() < 1e-12);
        assert!((v - correlator_value(&opt)).abs() < 1e-12);
        assert!(((std::f64::consts::PI / 8.0).cos().powi(2) - CIRELSON_VALUE).abs() < 1e-15);
        assert!((chsh_success_quantum(&zz_strategy()).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_observable() {
        let mut s = zz_strategy();
        s.b1 = s.b1.scale_real(0.5);
        assert!(matches!(
            chsh_success_quantum(&s),
            Err(Error::InvalidStrategy(_))
        ));
    }

    #[test]
    fn product_states_stay_classical() {
        let mut r = rng(11);
        for _ in 0..30 {
            let mut s = QuantumStrategy::random(2, &mut r);
            s.shared_state =
                crate::tensor::product_ket(&random_state(2, &mut r), &random_state(2, &mut r));
            assert!(chsh_success_quantum(&s).unwrap() <= 0.75 + 1e-9);
        }
    }

    #[test]
    fn channel_game_values() {
        assert_eq!(channel_game_value(&and_box_channel()).unwrap(), 1.0);
        let id = KrausChannel::identity(BiDims::QUBITS);
        // a = x, b = y wins only on (0, 0).
        assert_eq!(channel_game_value(&id).unwrap(), 0.25);
        let dep = KrausChannel::completely_depolarizing(BiDims::QUBITS);
        assert!((channel_game_value(&dep).unwrap() - 0.5).abs() < 1e-12);
        assert!(game_certificate(&and_box_channel()).unwrap().is_some());
        assert!(game_certificate(&id).unwrap().is_none());
    }

    #[test]
    fn and_box_is_causal() {
        assert!(causal_test(&and_box_channel()).causal());
    }

    #[test]
    fn local_protocol_game_values() {
        for s in [QuantumStrategy::cirelson_optimal(), zz_strategy()] {
            let ch = entangled_local_protocol(&s).unwrap();
            assert!(ch.validate().tp);
            let v = channel_game_value(&ch).unwrap();
            assert!((v - chsh_success_quantum(&s).unwrap()).abs() < 1e-9);
        }
        let opt = entangled_local_protocol(&QuantumStrategy::cirelson_optimal()).unwrap();
        let v = channel_game_value(&opt).unwrap();
        assert!(0.75 < v && v < 1.0);
    }

    #[test]
    fn ip_examples() {
        let cases = [
            ("1", "1", true),
            ("101", "110", true),
            ("1111", "1111", false),
        ];
        for (x, y, expected) in cases {
            let (x, y) = (parse_bits(x).unwrap(), parse_bits(y).unwrap());
            assert_eq!(inner_product(&x, &y), expected);
            for seed in 0..5 {
                assert_eq!(ip_demo(&x, &y, seed).unwrap().result, expected);
            }
        }
        assert!(ip_demo(&[true], &[true, false], 0).is_err());
        assert!(parse_bits("12").is_err());
    }

    #[test]
    fn ip_exhaustive_small() {
        for n in 1..=3usize {
            for xm in 0..1u32 << n {
                for ym in 0..1u32 << n {
                    let x: Vec<bool> = (0..n).map(|i| xm >> i & 1 == 1).collect();
                    let y: Vec<bool> = (0..n).map(|i| ym >> i & 1 == 1).collect();
                    let branches = ip_demo_branches(&x, &y).unwrap();
                    assert_eq!(branches.len(), 1 << n);
                    let total: f64 = branches.iter().map(|(w, _)| w).sum();
                    assert!((total - 1.0).abs() < 1e-12);
                    assert!(branches
                        .iter()
                        .all(|(_, r)| r.result == inner_product(&x, &y)));
                }
            }
        }
    }
}
