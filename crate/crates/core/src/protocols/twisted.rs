//! One-way classical protocol for the twisted partition basis. Both parties
//! learn which block they occupy; Alice tells Bob hers and they apply a
//! shared random Pauli, which Bob conjugates by `u_B` in the twisted
//! quadrant.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Actor, PayloadKind, ProtocolTrace};
use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::localizability::lower_block;
use crate::random::rng;
use crate::tensor::{tensor_product, BiDims, ComplexMatrix, C64, ONE, TOL, ZERO};
use crate::twirl::PauliLetter;

const PAULIS: [PauliLetter; 4] = [
    PauliLetter::I,
    PauliLetter::X,
    PauliLetter::Y,
    PauliLetter::Z,
];

/// Projector onto block `{|2k>, |2k+1>}` of a 4-dimensional space.
fn block_projector(k: usize) -> ComplexMatrix {
    let diag: Vec<C64> = (0..4)
        .map(|i| if i / 2 == k { ONE } else { ZERO })
        .collect();
    ComplexMatrix::diag(&diag)
}

/// `sigma` acting on the qubit inside whichever block the state occupies.
fn within_blocks(sigma: &ComplexMatrix) -> ComplexMatrix {
    tensor_product(&ComplexMatrix::identity(2), sigma)
}

fn check_u(u_b: &ComplexMatrix) -> Result<()> {
    if u_b.shape() != (2, 2) {
        return Err(Error::dims("2x2 unitary", format!("{:?}", u_b.shape())));
    }
    let deviation = u_b.unitarity_deviation();
    if deviation > TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// Kraus operator for Alice's block `alpha`, Bob's block `beta` and shared
/// Pauli `sigma`.
fn branch_operator(
    u_b: &ComplexMatrix,
    alpha: usize,
    beta: usize,
    sigma: PauliLetter,
) -> ComplexMatrix {
    let s = sigma.matrix();
    let alice = &within_blocks(&s) * &block_projector(alpha);
    let bob_op = if alpha == 1 && beta == 1 {
        let twisted = lower_block(u_b);
        twisted.conjugate(&within_blocks(&s))
    } else {
        within_blocks(&s)
    };
    let bob = &bob_op * &block_projector(beta);
    tensor_product(&alice, &bob).scale_real(0.5)
}

/// The branch-averaged channel: sixteen Kraus operators
/// `(1/2) (sigma_A (x) tau_B)(P_alpha (x) P_beta)`.
pub fn twisted_protocol_channel(u_b: &ComplexMatrix) -> Result<KrausChannel> {
    check_u(u_b)?;
    let mut kraus = Vec::with_capacity(16);
    for alpha in 0..2 {
        for beta in 0..2 {
            for sigma in PAULIS {
                kraus.push(branch_operator(u_b, alpha, beta, sigma));
            }
        }
    }
    KrausChannel::new(BiDims::new(4, 4)?, kraus)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistedRun {
    /// Alice's block, the bit she sends.
    pub alpha: usize,
    /// Bob's block.
    pub beta: usize,
    /// Index into `I, X, Y, Z` drawn from the shared random table.
    pub pauli: usize,
    #[serde(rename = "finalState")]
    pub final_state: ComplexMatrix,
    pub trace: ProtocolTrace,
}

pub fn run_twisted_partition_classical(
    u_b: &ComplexMatrix,
    rho: &ComplexMatrix,
    seed: u64,
) -> Result<TwistedRun> {
    check_u(u_b)?;
    let dims = BiDims::new(4, 4)?;
    dims.check_square(rho)?;
    let mut rng = rng(seed);
    let pauli = rng.random_range(0..4);

    let mut trace = ProtocolTrace::default();
    let blocks: Vec<(usize, usize, f64)> = (0..2)
        .flat_map(|a| (0..2).map(move |b| (a, b)))
        .map(|(a, b)| {
            let p = tensor_product(&block_projector(a), &block_projector(b));
            (a, b, (&p * rho).trace().re.max(0.0))
        })
        .collect();
    let total: f64 = blocks.iter().map(|b| b.2).sum();
    if total < TOL {
        return Err(Error::InvalidInput("state has zero trace".into()));
    }
    let r: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let &(alpha, beta, _) = blocks
        .iter()
        .find(|b| {
            acc += b.2;
            r < acc
        })
        .unwrap_or(&blocks[3]);

    trace.local(
        Actor::Alice,
        format!("partial measurement finds block {alpha}"),
    );
    trace.send(
        Actor::Alice,
        "send block bit and shared random table to Bob",
        PayloadKind::Classical,
    );
    trace.local(
        Actor::Bob,
        format!("partial measurement finds block {beta}"),
    );
    trace.local(
        Actor::Alice,
        format!("apply {:?} within block", PAULIS[pauli]),
    );
    let bob_action = if alpha == 1 && beta == 1 {
        format!("apply u {:?} u^dagger within block", PAULIS[pauli])
    } else {
        format!("apply {:?} within block", PAULIS[pauli])
    };
    trace.local(Actor::Bob, bob_action);

    let k = branch_operator(u_b, alpha, beta, PAULIS[pauli]);
    let out = k.conjugate(rho);
    let final_state = out.scale_real(1.0 / out.trace().re);
    Ok(TwistedRun {
        alpha,
        beta,
        pauli,
        final_state,
        trace,
    })
}
