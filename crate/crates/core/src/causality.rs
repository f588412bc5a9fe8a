//! Signaling decisions for bipartite channels.
//!
//! The decision procedure works on the Choi state built from unnormalized
//! probes `|Phi>_RA (x) |Phi'>_BS`: Bob cannot signal Alice exactly when, after
//! tracing out B, the state on `R A S` factorizes as `rho_RA (x) I_S / N_B`.
//! A separate heuristic search looks for explicit product-state witnesses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::optim::NelderMead;
use crate::random::{random_state, rng};
use crate::tensor::{
    ket_to_coefficients, operator_schmidt, tensor_product, trace_distance, BiDims, ComplexMatrix,
    C64, TOL,
};

/// Direction in which a signal would travel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Bob signals Alice.
    BtoA,
    /// Alice signals Bob.
    AtoB,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::BtoA => Direction::AtoB,
            Direction::AtoB => Direction::BtoA,
        }
    }
}

/// Frobenius distance between the traced Choi state and its product form.
///
/// For `BtoA` this is `||rho_RAS - rho_RA (x) I_S / N_B||_F`; `AtoB` is the
/// mirror image `||rho_RBS - I_R / N_A (x) rho_BS||_F`.
pub fn semicausal_deviation(ch: &KrausChannel, direction: Direction) -> f64 {
    let choi = ch.choi();
    let (na, nb) = (ch.dims().dim_a, ch.dims().dim_b);
    match direction {
        Direction::BtoA => {
            let ras = choi.reduce([true, true, false, true]);
            let ra = choi.reduce([true, true, false, false]);
            let expected =
                tensor_product(&ra, &ComplexMatrix::identity(nb)).scale_real(1.0 / nb as f64);
            ras.distance(&expected)
        }
        Direction::AtoB => {
            let rbs = choi.reduce([true, false, true, true]);
            let bs = choi.reduce([false, false, true, true]);
            let expected =
                tensor_product(&ComplexMatrix::identity(na), &bs).scale_real(1.0 / na as f64);
            rbs.distance(&expected)
        }
    }
}

/// Tolerance for [`semicausal_test`]: `1e-9` times the Choi dimension.
pub fn semicausal_tolerance(dims: BiDims) -> f64 {
    TOL * (dims.total() * dims.total()) as f64
}

/// True when the channel blocks signaling in `direction`.
pub fn semicausal_test(ch: &KrausChannel, direction: Direction) -> bool {
    semicausal_deviation(ch, direction) < semicausal_tolerance(ch.dims())
}

/// A product-state signaling protocol: the receiver holds `phi`, the sender
/// prepares `psi` or `psi_prime`, and the receiver's post-channel states
/// differ by `separation` in trace distance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignalWitness {
    pub direction: Direction,
    pub phi: ComplexMatrix,
    pub psi: ComplexMatrix,
    #[serde(rename = "psiPrime")]
    pub psi_prime: ComplexMatrix,
    pub separation: f64,
}

impl SignalWitness {
    /// Receiver states for the two preparations, recomputed from the channel.
    pub fn receiver_states(&self, ch: &KrausChannel) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let (frame, _) = receiver_first(ch, self.direction);
        Ok((
            receiver_state(&frame, &self.phi, &self.psi),
            receiver_state(&frame, &self.phi, &self.psi_prime),
        ))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CausalityVerdict {
    #[serde(rename = "bToABlocked")]
    pub b_to_a_blocked: bool,
    #[serde(rename = "aToBBlocked")]
    pub a_to_b_blocked: bool,
    pub witness: Option<SignalWitness>,
}

impl CausalityVerdict {
    pub fn causal(&self) -> bool {
        self.b_to_a_blocked && self.a_to_b_blocked
    }
}

/// Parameters of the heuristic witness search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 32,
            seed: 0,
        }
    }
}

pub fn causal_test(ch: &KrausChannel) -> CausalityVerdict {
    causal_test_with(ch, SearchConfig::default())
}

/// Decides both directions; on failure attaches a witness from
/// [`signaling_search`] for the first open direction (Bob to Alice first).
pub fn causal_test_with(ch: &KrausChannel, config: SearchConfig) -> CausalityVerdict {
    let b_to_a_blocked = semicausal_test(ch, Direction::BtoA);
    let a_to_b_blocked = semicausal_test(ch, Direction::AtoB);
    let witness = [
        (Direction::BtoA, b_to_a_blocked),
        (Direction::AtoB, a_to_b_blocked),
    ]
    .into_iter()
    .filter(|(_, blocked)| !blocked)
    .find_map(|(d, _)| signaling_search(ch, d, config.budget, config.seed));
    CausalityVerdict {
        b_to_a_blocked,
        a_to_b_blocked,
        witness,
    }
}

/// Minimum separation for a search result to count as a witness.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

/// Heuristic search for a product-state signaling witness.
///
/// Maximizes `D(tr_S E(phi (x) psi), tr_S E(phi (x) psi'))` over unit vectors,
/// where `S` is the sender. Structured candidates (basis vectors and their
/// pairwise superpositions) seed a few local searches, followed by `budget`
/// random restarts. The best value wins, ties broken by the lowest start
/// index, so the result does not depend on thread scheduling. `None` does
/// not prove that the direction is blocked.
pub fn signaling_search(
    ch: &KrausChannel,
    direction: Direction,
    budget: usize,
    seed: u64,
) -> Option<SignalWitness> {
    let (frame, receiver_dims) = receiver_first(ch, direction);
    let (nr, ns) = (receiver_dims.dim_a, receiver_dims.dim_b);

    let mut starts = structured_starts(&frame, nr, ns, 4);
    let mut r = rng(seed);
    for _ in 0..budget {
        starts.push(Triple {
            phi: random_state(nr, &mut r),
            psi: random_state(ns, &mut r),
            psi_prime: random_state(ns, &mut r),
        });
    }

    let nm = NelderMead {
        initial_step: 0.4,
        max_evals: 150 * (nr + 2 * ns),
        f_tol: 1e-12,
    };
    let best = starts
        .par_iter()
        .enumerate()
        .map(|(idx, start)| {
            let x0 = start.encode();
            let m = nm.minimize(
                |x| {
                    let t = Triple::decode(x, nr, ns);
                    -t.separation(&frame)
                },
                &x0,
            );
            (idx, -m.value, Triple::decode(&m.x, nr, ns))
        })
        .reduce_with(|a, b| {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        })?;

    let (_, separation, t) = best;
    (separation > WITNESS_THRESHOLD).then_some(SignalWitness {
        direction,
        phi: t.phi,
        psi: t.psi,
        psi_prime: t.psi_prime,
        separation,
    })
}

/// The channel relabeled so the receiver is the first factor.
fn receiver_first(ch: &KrausChannel, direction: Direction) -> (KrausChannel, BiDims) {
    let frame = match direction {
        Direction::BtoA => ch.clone(),
        Direction::AtoB => ch.swap_parties(),
    };
    let dims = frame.dims();
    (frame, dims)
}

/// Receiver's reduced output for the product input `phi (x) psi`.
fn receiver_state(frame: &KrausChannel, phi: &ComplexMatrix, psi: &ComplexMatrix) -> ComplexMatrix {
    let dims = frame.dims();
    let input = tensor_product(phi, psi);
    let mut out = ComplexMatrix::zeros(dims.dim_a, dims.dim_a);
    for m in frame.kraus() {
        let c = ket_to_coefficients(&(m * &input), dims);
        out.add_assign(&(&c * &c.adjoint()));
    }
    out
}

#[derive(Clone, Debug)]
struct Triple {
    phi: ComplexMatrix,
    psi: ComplexMatrix,
    psi_prime: ComplexMatrix,
}

impl Triple {
    fn separation(&self, frame: &KrausChannel) -> f64 {
        let r0 = receiver_state(frame, &self.phi, &self.psi);
        let r1 = receiver_state(frame, &self.phi, &self.psi_prime);
        trace_distance(&r0, &r1).unwrap_or(0.0)
    }

    fn encode(&self) -> Vec<f64> {
        [&self.phi, &self.psi, &self.psi_prime]
            .iter()
            .flat_map(|v| v.as_slice().iter().flat_map(|z| [z.re, z.im]))
            .collect()
    }

    /// Inverse of `encode`, projecting each block back onto the unit sphere.
    fn decode(x: &[f64], nr: usize, ns: usize) -> Triple {
        let block = |offset: usize, d: usize| {
            let amps: Vec<C64> = (0..d)
                .map(|k| C64::new(x[offset + 2 * k], x[offset + 2 * k + 1]))
                .collect();
            let v = ComplexMatrix::ket(&amps);
            if v.norm() < 1e-300 {
                ComplexMatrix::basis_ket(d, 0)
            } else {
                v.normalized()
            }
        };
        Triple {
            phi: block(0, nr),
            psi: block(2 * nr, ns),
            psi_prime: block(2 * nr + 2 * ns, ns),
        }
    }
}

/// Basis vectors and `(|i> + c|j>)/sqrt 2` for `c` in `{1, -1, i}`.
fn candidate_states(d: usize) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = (0..d).map(|i| ComplexMatrix::basis_ket(d, i)).collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            for c in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut v = ComplexMatrix::zeros(d, 1);
                v.as_mut_slice()[i] = C64::new(s, 0.0);
                v.as_mut_slice()[j] = c * s;
                out.push(v);
            }
        }
    }
    out
}

/// The `keep` best triples over all structured candidates.
fn structured_starts(frame: &KrausChannel, nr: usize, ns: usize, keep: usize) -> Vec<Triple> {
    let phis = candidate_states(nr);
    let psis = candidate_states(ns);
    let mut scored: Vec<(f64, usize, usize, usize)> = Vec::new();
    for (p, phi) in phis.iter().enumerate() {
        let outputs: Vec<ComplexMatrix> = psis
            .iter()
            .map(|psi| receiver_state(frame, phi, psi))
            .collect();
        for i in 0..psis.len() {
            for j in i + 1..psis.len() {
                // Cheap screen before the eigen-decomposition.
                if outputs[i].distance(&outputs[j]) < TOL {
                    continue;
                }
                let d = trace_distance(&outputs[i], &outputs[j]).unwrap_or(0.0);
                scored.push((d, p, i, j));
            }
        }
    }
    scored.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then((a.1, a.2, a.3).cmp(&(b.1, b.2, b.3)))
    });
    scored
        .into_iter()
        .take(keep)
        .map(|(_, p, i, j)| Triple {
            phi: phis[p].clone(),
            psi: psis[i].clone(),
            psi_prime: psis[j].clone(),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductVerdict {
    #[serde(rename = "isProduct")]
    pub is_product: bool,
    #[serde(rename = "schmidtRank")]
    pub schmidt_rank: usize,
    /// `(U_A, U_B)` with `U = U_A (x) U_B`; the global phase sits in `U_A`.
    pub factors: Option<(ComplexMatrix, ComplexMatrix)>,
}

/// Decides whether a unitary factorizes across the cut; a unitary channel
/// is semicausal exactly when it does.
pub fn unitary_product_test(u: &ComplexMatrix, dims: BiDims) -> Result<ProductVerdict> {
    dims.check_square(u)?;
    let deviation = u.unitarity_deviation();
    if deviation > TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let dec = operator_schmidt(u, dims)?;
    let schmidt_rank = dec.rank();
    let factors = (schmidt_rank == 1).then(|| {
        let t = &dec.terms[0];
        let mut ub = t.b.clone();
        let phase = ub.fix_phase(1e-12);
        (t.a.scale(phase * t.coefficient), ub)
    });
    Ok(ProductVerdict {
        is_product: schmidt_rank == 1,
        schmidt_rank,
        factors,
    })
}
