//! One-way protocol for a semicausal complete measurement: Alice identifies
//! her subspace, ships her half of the state to Bob together with half of a
//! fresh maximally entangled pair, and Bob finishes the measurement and
//! rotates the pair into the measured basis state.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Actor, PayloadKind, ProtocolTrace};
use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::measurement::{partition_structure, OrthogonalBasis, PartitionStructure};
use crate::random::{gram_schmidt, rng};
use crate::tensor::{
    hermitian_spectrum, ket_to_coefficients, permute_ket, tensor_product, BiDims, ComplexMatrix,
    Side, SPECTRAL_TOL, TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemilocalMode {
    /// Simulate the ancillas, swaps, transmission and rotation step by step.
    Literal,
    /// Sample the outcome and emit the basis state directly.
    Optimized,
}

/// One `(subspace, outcome)` branch of the protocol applied to an input.
#[derive(Clone, Debug)]
pub struct SemilocalBranch {
    pub subspace: usize,
    pub outcome: usize,
    /// Unnormalized output on `AB`; its trace is the branch probability.
    pub state: ComplexMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemilocalRun {
    pub subspace: usize,
    pub outcome: usize,
    pub probability: f64,
    #[serde(rename = "finalState")]
    pub final_state: ComplexMatrix,
    pub trace: ProtocolTrace,
}

/// Kraus operators of one branch, from `AB` to `AB`, indexed by the
/// discarded `RS` basis state.
struct BranchKraus {
    subspace: usize,
    outcome: usize,
    kraus: Vec<ComplexMatrix>,
}

fn structure(basis: &OrthogonalBasis) -> Result<PartitionStructure> {
    partition_structure(basis, Side::A).map_err(|e| match e {
        Error::Precondition(m) => Error::Precondition(format!("basis is not semicausal: {m}")),
        other => other,
    })
}

/// Orthonormal basis `e_k` of the subspace.
fn subspace_basis(projector: &ComplexMatrix, d: usize) -> Result<Vec<ComplexMatrix>> {
    let spec = hermitian_spectrum(projector)?;
    Ok((0..d).map(|k| spec.vector(k)).collect())
}

/// Unitary on B with `(I (x) V) sum_k |e_k>|k> / sqrt d = |a>`.
fn aligning_unitary(e: &[ComplexMatrix], a: &ComplexMatrix, dims: BiDims) -> Result<ComplexMatrix> {
    let d = e.len();
    let c = ket_to_coefficients(a, dims);
    let scale = (d as f64).sqrt();
    let targets: Vec<ComplexMatrix> = e
        .iter()
        .map(|ek| (&ek.adjoint() * &c).transpose().scale_real(scale))
        .collect();
    for (i, hi) in targets.iter().enumerate() {
        for (j, hj) in targets.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            if (hi.inner(hj).norm() - expected).abs() > 1e-7 {
                return Err(Error::Numerical(
                    "basis state is not maximally entangled on its subspace".into(),
                ));
            }
        }
    }
    let mut cols = targets;
    cols.extend((0..dims.dim_b).map(|k| ComplexMatrix::basis_ket(dims.dim_b, k)));
    let cols = gram_schmidt(&cols);
    ComplexMatrix::from_columns(&cols[..dims.dim_b])
}

/// Pushes each computational input through the literal protocol and reads
/// off Kraus operators.
fn literal_kraus(basis: &OrthogonalBasis, part: &PartitionStructure) -> Result<Vec<BranchKraus>> {
    let dims = basis.dims();
    let (na, nb) = (dims.dim_a, dims.dim_b);
    let n = dims.total();
    let four = [na, nb, na, nb];
    let joint = BiDims::new(n, n)?;
    let id_b = ComplexMatrix::identity(nb);
    let mut out = Vec::new();

    for (alpha, sub) in part.subspaces.iter().enumerate() {
        let d = sub.dim;
        let e = subspace_basis(&sub.projector, d)?;
        // |Phi> on R S: sum_k |e_k>_R |k>_S / sqrt d.
        let phi: ComplexMatrix = e
            .iter()
            .enumerate()
            .map(|(k, ek)| tensor_product(ek, &ComplexMatrix::basis_ket(nb, k)))
            .sum::<ComplexMatrix>()
            .scale_real(1.0 / (d as f64).sqrt());
        let alice_projector = tensor_product(&sub.projector, &id_b);

        // State after Alice's projection, the two swaps, as AB x RS coefficients.
        let after_swaps: Vec<ComplexMatrix> = (0..n)
            .map(|i| {
                let v = tensor_product(&alice_projector.column(i), &phi);
                let v = permute_ket(&v, &four, &[2, 1, 0, 3]);
                let v = permute_ket(&v, &four, &[0, 3, 2, 1]);
                ket_to_coefficients(&v, joint)
            })
            .collect();

        for &a in &sub.member_indices {
            let ket_a = basis.vector(a);
            let measure = ket_a.projector().transpose();
            let v = aligning_unitary(&e, ket_a, dims)?;
            let rotate = tensor_product(&ComplexMatrix::identity(na), &v);
            let finals: Vec<ComplexMatrix> = after_swaps
                .iter()
                .map(|c| &(&rotate * c) * &measure)
                .collect();
            let kraus = (0..n)
                .map(|m| {
                    let cols: Vec<ComplexMatrix> = finals.iter().map(|f| f.column(m)).collect();
                    ComplexMatrix::from_columns(&cols).expect("equal-length columns")
                })
                .filter(|k| k.frobenius_norm() > 1e-12)
                .collect();
            out.push(BranchKraus {
                subspace: alpha,
                outcome: a,
                kraus,
            });
        }
    }
    Ok(out)
}

fn optimized_kraus(basis: &OrthogonalBasis, part: &PartitionStructure) -> Vec<BranchKraus> {
    (0..basis.len())
        .map(|a| BranchKraus {
            subspace: part.subspace_of(a).expect("every member has a subspace"),
            outcome: a,
            kraus: vec![basis.vector(a).projector()],
        })
        .collect()
}

fn branch_kraus(basis: &OrthogonalBasis, mode: SemilocalMode) -> Result<Vec<BranchKraus>> {
    let part = structure(basis)?;
    match mode {
        SemilocalMode::Literal => literal_kraus(basis, &part),
        SemilocalMode::Optimized => Ok(optimized_kraus(basis, &part)),
    }
}

fn apply_branch(b: &BranchKraus, rho: &ComplexMatrix) -> SemilocalBranch {
    let n = rho.rows();
    let mut state = ComplexMatrix::zeros(n, n);
    for k in &b.kraus {
        state.add_assign(&k.conjugate(rho));
    }
    SemilocalBranch {
        subspace: b.subspace,
        outcome: b.outcome,
        state,
    }
}

/// Every branch of the protocol on `rho`, without sampling. Linear in `rho`.
pub fn semilocal_branches(
    basis: &OrthogonalBasis,
    rho: &ComplexMatrix,
    mode: SemilocalMode,
) -> Result<Vec<SemilocalBranch>> {
    basis.dims().check_square(rho)?;
    let branches = branch_kraus(basis, mode)?;
    Ok(branches.iter().map(|b| apply_branch(b, rho)).collect())
}

/// The branch-averaged channel the protocol implements.
pub fn semilocal_channel(basis: &OrthogonalBasis, mode: SemilocalMode) -> Result<KrausChannel> {
    let kraus = branch_kraus(basis, mode)?
        .into_iter()
        .flat_map(|b| b.kraus)
        .collect();
    KrausChannel::new(basis.dims(), kraus)
}

fn check_state(rho: &ComplexMatrix, dims: BiDims) -> Result<()> {
    dims.check_square(rho)?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
        return Err(Error::InvalidInput(format!("state has trace {tr}")));
    }
    let spec = hermitian_spectrum(rho)?;
    let min = spec.values.last().copied().unwrap_or(0.0);
    if min < -SPECTRAL_TOL {
        return Err(Error::InvalidInput(format!(
            "state has eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

fn sample(weights: &[f64], r: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    weights
        .iter()
        .position(|w| {
            acc += w / total;
            r < acc
        })
        .unwrap_or(weights.len() - 1)
}

fn trace_for(mode: SemilocalMode, alpha: usize, outcome: usize) -> ProtocolTrace {
    let mut t = ProtocolTrace::default();
    t.local(
        Actor::Alice,
        format!("partial measurement finds subspace {alpha}"),
    );
    match mode {
        SemilocalMode::Literal => {
            t.local(
                Actor::Alice,
                "prepare maximally entangled ancilla on R and S",
            );
            t.local(Actor::Alice, "swap A with R");
            t.send(Actor::Alice, "send R and S to Bob", PayloadKind::Quantum);
            t.local(Actor::Bob, "swap B with S");
            t.local(Actor::Bob, format!("measure RS, outcome {outcome}"));
            t.local(
                Actor::Bob,
                format!("rotate B so that AB holds basis state {outcome}"),
            );
            t.local(Actor::Bob, "discard R, S and the outcome records");
        }
        SemilocalMode::Optimized => {
            t.send(Actor::Alice, "send A to Bob", PayloadKind::Quantum);
            t.local(
                Actor::Bob,
                format!("complete the measurement, outcome {outcome}"),
            );
            t.local(Actor::Bob, format!("emit basis state {outcome}"));
        }
    }
    t
}

/// Runs the protocol once on `rho`: samples Alice's subspace, then Bob's
/// outcome given that subspace.
pub fn run_theorem4(
    basis: &OrthogonalBasis,
    rho: &ComplexMatrix,
    seed: u64,
    mode: SemilocalMode,
) -> Result<SemilocalRun> {
    check_state(rho, basis.dims())?;
    let branches = semilocal_branches(basis, rho, mode)?;
    let weight = |b: &SemilocalBranch| b.state.trace().re.max(0.0);
    let n_sub = branches.iter().map(|b| b.subspace).max().unwrap_or(0) + 1;
    let mut p_alpha = vec![0.0; n_sub];
    for b in &branches {
        p_alpha[b.subspace] += weight(b);
    }
    let mut rng = rng(seed);
    let alpha = sample(&p_alpha, rng.random());
    let within: Vec<&SemilocalBranch> = branches.iter().filter(|b| b.subspace == alpha).collect();
    let pick = within[sample(
        &within.iter().map(|b| weight(b)).collect::<Vec<_>>(),
        rng.random(),
    )];
    let probability = weight(pick);
    Ok(SemilocalRun {
        subspace: alpha,
        outcome: pick.outcome,
        probability,
        final_state: pick.state.scale_real(1.0 / probability),
        trace: trace_for(mode, alpha, pick.outcome),
    })
}
