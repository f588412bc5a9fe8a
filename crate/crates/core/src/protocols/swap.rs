use rand::Rng;
use serde::{Deserialize, Serialize};

use super::register::{pauli_x, pauli_z, plus_ket, BellLabel, QubitRegister};
use crate::error::{Error, Result};
use crate::random::rng;
use crate::tensor::{schmidt_decomposition, BiDims, ComplexMatrix, TOL};

// Qubit order: A, B, R, S, R', S'.
const A: usize = 0;
const B: usize = 1;
const R: usize = 2;
const S: usize = 3;
const R2: usize = 4;
const S2: usize = 5;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SwapBranch {
    /// Bell outcome on `RS`: parity of `AB` and a random phase bit.
    pub rs: BellLabel,
    /// Bell outcome on `R'S'`: a random parity bit and the remaining phase.
    pub rs_prime: BellLabel,
    pub probability: f64,
    /// The `AB` Bell state the input was projected onto.
    pub ab: BellLabel,
    /// `Z` on Alice when the `RS` phase bit is set.
    #[serde(rename = "aliceZ")]
    pub alice_z: bool,
    /// `X` on Bob when the `R'S'` parity bit is set.
    #[serde(rename = "bobX")]
    pub bob_x: bool,
    /// Normalized `AB` state after the correction.
    #[serde(rename = "finalAB")]
    pub final_ab: ComplexMatrix,
}

pub type SwapRun = SwapBranch;

fn prepared_register(input: &ComplexMatrix) -> Result<QubitRegister> {
    if input.shape() != (4, 1) {
        return Err(Error::dims(
            "4-dimensional ket",
            format!("{:?}", input.shape()),
        ));
    }
    let schmidt = schmidt_decomposition(input, BiDims::QUBITS)?;
    if schmidt.rank(TOL) != 1 {
        return Err(Error::Precondition("input must be a product state".into()));
    }
    let zero = ComplexMatrix::basis_ket(2, 0);
    let mut reg = QubitRegister::from_ket(&input.normalized())?;
    for q in [&zero, &zero, &plus_ket(), &plus_ket()] {
        reg = reg.append(q)?;
    }
    reg.cnot(A, R);
    reg.cnot(B, S);
    reg.cnot(R2, A);
    reg.cnot(S2, B);
    Ok(reg)
}

fn branch(reg: &QubitRegister, rs: BellLabel, rs_prime: BellLabel) -> SwapBranch {
    // Contract R'S' first so that R, S keep their indices.
    let ab = reg
        .contract_pair(R2, S2, &rs_prime.ket())
        .contract_pair(R, S, &rs.ket());
    let probability = ab.norm_sqr();
    let mut corrected = ab;
    if rs.phase {
        corrected.apply_single(A, &pauli_z());
    }
    if rs_prime.parity {
        corrected.apply_single(B, &pauli_x());
    }
    let final_ab = if probability > 0.0 {
        corrected.to_ket().scale_real(1.0 / probability.sqrt())
    } else {
        corrected.to_ket()
    };
    SwapBranch {
        rs,
        rs_prime,
        probability,
        ab: BellLabel {
            parity: rs.parity,
            phase: rs.phase ^ rs_prime.phase,
        },
        alice_z: rs.phase,
        bob_x: rs_prime.parity,
        final_ab,
    }
}

/// All sixteen ancilla outcome pairs with their probabilities.
pub fn entanglement_swap_branches(input: &ComplexMatrix) -> Result<Vec<SwapBranch>> {
    let reg = prepared_register(input)?;
    Ok(BellLabel::ALL
        .iter()
        .flat_map(|&rs| BellLabel::ALL.map(|rp| (rs, rp)))
        .map(|(rs, rp)| branch(&reg, rs, rp))
        .collect())
}

/// Local CNOTs onto four ancillas, then Bell measurements on `RS` and
/// `R'S'`. Returns the sampled run with the inferred `AB` Bell outcome.
pub fn entanglement_swap_demo(input: &ComplexMatrix, seed: u64) -> Result<SwapRun> {
    let branches = entanglement_swap_branches(input)?;
    let r: f64 = rng(seed).random();
    let mut acc = 0.0;
    let last = branches.len() - 1;
    let pick = branches
        .iter()
        .position(|b| {
            acc += b.probability;
            r < acc
        })
        .unwrap_or(last);
    Ok(branches.into_iter().nth(pick).expect("index in range"))
}
