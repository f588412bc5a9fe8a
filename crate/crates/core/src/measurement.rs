//! Complete orthogonal measurements: reduced-state analysis, partition
//! structure, and constructive signaling witnesses.
//!
//! A basis `{|a>}` defines the channel `rho -> sum_a |a><a| rho |a><a|`. Its
//! reduced states `sigma^a = tr_other |a><a|` decide which parties can signal:
//! the receiver is blocked exactly when every pair of its reduced states is
//! either identical or orthogonal.

use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::random::gram_schmidt;
use crate::tensor::{
    embed, hermitian_spectrum, ket_to_coefficients, schmidt_decomposition, swap_parties_ket,
    trace_distance, BiDims, ComplexMatrix, Side, C64, TOL,
};

/// An ordered orthonormal basis of `H_A (x) H_B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBasis", into = "RawBasis")]
pub struct OrthogonalBasis {
    dims: BiDims,
    vectors: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct RawBasis {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    vectors: Vec<ComplexMatrix>,
}

impl TryFrom<RawBasis> for OrthogonalBasis {
    type Error = Error;

    fn try_from(raw: RawBasis) -> Result<Self> {
        OrthogonalBasis::new(BiDims::new(raw.dim_a, raw.dim_b)?, raw.vectors)
    }
}

impl From<OrthogonalBasis> for RawBasis {
    fn from(b: OrthogonalBasis) -> Self {
        RawBasis {
            dim_a: b.dims.dim_a,
            dim_b: b.dims.dim_b,
            vectors: b.vectors,
        }
    }
}

impl OrthogonalBasis {
    /// Validates completeness and orthonormality (Gram matrix within [`TOL`] of `I`).
    pub fn new(dims: BiDims, vectors: Vec<ComplexMatrix>) -> Result<Self> {
        let n = dims.total();
        if vectors.len() != n {
            return Err(Error::InvalidBasis(format!(
                "{} vectors for a space of dimension {n}",
                vectors.len()
            )));
        }
        if let Some(k) = vectors.iter().position(|v| v.shape() != (n, 1)) {
            return Err(Error::InvalidBasis(format!(
                "vector {k} has shape {:?}, expected ({n}, 1)",
                vectors[k].shape()
            )));
        }
        let stacked = ComplexMatrix::from_columns(&vectors)?;
        let deviation = stacked.unitarity_deviation();
        if deviation.is_nan() || deviation >= TOL {
            return Err(Error::InvalidBasis(format!(
                "vectors are not orthonormal (Gram deviation {deviation:.3e})"
            )));
        }
        Ok(OrthogonalBasis { dims, vectors })
    }

    /// The columns of a unitary matrix.
    pub fn from_unitary(u: &ComplexMatrix, dims: BiDims) -> Result<Self> {
        Self::new(dims, u.columns())
    }

    pub fn computational(dims: BiDims) -> Self {
        let n = dims.total();
        OrthogonalBasis {
            dims,
            vectors: (0..n).map(|i| ComplexMatrix::basis_ket(n, i)).collect(),
        }
    }

    /// `{|a_i>|b_j>}` in row-major order over `(i, j)`.
    pub fn product(a_basis: &[ComplexMatrix], b_basis: &[ComplexMatrix]) -> Result<Self> {
        let dims = BiDims::new(a_basis.len(), b_basis.len())?;
        let vectors = a_basis
            .iter()
            .flat_map(|a| {
                b_basis
                    .iter()
                    .map(move |b| crate::tensor::tensor_product(a, b))
            })
            .collect();
        Self::new(dims, vectors)
    }

    pub fn dims(&self) -> BiDims {
        self.dims
    }

    pub fn vectors(&self) -> &[ComplexMatrix] {
        &self.vectors
    }

    pub fn vector(&self, index: usize) -> &ComplexMatrix {
        &self.vectors[index]
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The unitary whose columns are the basis vectors.
    pub fn as_unitary(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.vectors).expect("validated basis")
    }

    /// The same basis with the parties relabeled.
    pub fn swap_parties(&self) -> OrthogonalBasis {
        OrthogonalBasis {
            dims: self.dims.swapped(),
            vectors: self
                .vectors
                .iter()
                .map(|v| swap_parties_ket(v, self.dims))
                .collect(),
        }
    }

    /// `(U_A (x) U_B)` applied to every vector.
    pub fn rotated(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<Self> {
        let u = crate::tensor::tensor_product(u_a, u_b);
        let vectors = self.vectors.iter().map(|v| &u * v).collect();
        Self::new(self.dims, vectors)
    }
}

/// Kraus operators `|a><a|` of the complete measurement in `basis`.
pub fn measurement_channel(basis: &OrthogonalBasis) -> KrausChannel {
    KrausChannel::new(
        basis.dims(),
        basis.vectors().iter().map(|v| v.projector()).collect(),
    )
    .expect("validated basis gives square projectors")
}

/// `sigma^a` on `side` (the other party is traced out) for every basis vector.
pub fn reduced_states(basis: &OrthogonalBasis, side: Side) -> Vec<ComplexMatrix> {
    basis
        .vectors()
        .iter()
        .map(|v| reduced_pure(v, basis.dims(), side))
        .collect()
}

/// Reduced state of a pure bipartite vector, computed from its coefficient matrix.
pub(crate) fn reduced_pure(v: &ComplexMatrix, dims: BiDims, side: Side) -> ComplexMatrix {
    let c = ket_to_coefficients(v, dims);
    match side {
        Side::A => &c * &c.adjoint(),
        Side::B => (&c.adjoint() * &c).transpose(),
    }
}

/// Result of the identical-or-orthogonal test on one party's reduced states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    /// True when the party on the tested side cannot be signaled.
    pub semicausal: bool,
    /// A pair whose reduced states overlap without being equal.
    pub violating_pair: Option<(usize, usize)>,
}

/// Checks that every pair of reduced states on `side` is either identical or
/// orthogonal. Passing on side A means Bob cannot signal Alice.
pub fn reduced_state_dichotomy(basis: &OrthogonalBasis, side: Side) -> DichotomyVerdict {
    reduced_state_dichotomy_with_tol(basis, side, TOL)
}

pub fn reduced_state_dichotomy_with_tol(
    basis: &OrthogonalBasis,
    side: Side,
    tol: f64,
) -> DichotomyVerdict {
    let sigmas = reduced_states(basis, side);
    for a in 0..sigmas.len() {
        for b in a + 1..sigmas.len() {
            if !identical_or_orthogonal(&sigmas[a], &sigmas[b], tol) {
                return DichotomyVerdict {
                    semicausal: false,
                    violating_pair: Some((a, b)),
                };
            }
        }
    }
    DichotomyVerdict {
        semicausal: true,
        violating_pair: None,
    }
}

fn identical_or_orthogonal(x: &ComplexMatrix, y: &ComplexMatrix, tol: f64) -> bool {
    x.distance(y) < tol || (x * y).frobenius_norm() < tol
}

/// One block `H^alpha` of a party's orthogonal decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Subspace {
    pub projector: ComplexMatrix,
    pub dim: usize,
    #[serde(rename = "memberIndices")]
    pub member_indices: Vec<usize>,
}

/// Decomposition `H_side = (+)_alpha H^alpha` induced by a basis that passes
/// the dichotomy test on `side`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionStructure {
    pub side: Side,
    pub subspaces: Vec<Subspace>,
}

impl PartitionStructure {
    pub fn dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(|s| s.dim).collect()
    }

    pub fn member_counts(&self) -> Vec<usize> {
        self.subspaces
            .iter()
            .map(|s| s.member_indices.len())
            .collect()
    }

    /// Index of the subspace containing basis vector `member`.
    pub fn subspace_of(&self, member: usize) -> Option<usize> {
        self.subspaces
            .iter()
            .position(|s| s.member_indices.contains(&member))
    }
}

/// Partition of Alice's space for a basis through which Bob cannot signal.
pub fn semicausal_structure(basis: &OrthogonalBasis) -> Result<PartitionStructure> {
    partition_structure(basis, Side::A)
}

/// Partition of `side`'s space; requires the dichotomy test to pass on `side`.
///
/// Each reduced state must be `I^alpha / d`, each block must hold
/// `N_other * d` members, and every member must be maximally entangled
/// between `H^alpha` and the other party.
pub fn partition_structure(basis: &OrthogonalBasis, side: Side) -> Result<PartitionStructure> {
    let verdict = reduced_state_dichotomy(basis, side);
    if let Some((a, b)) = verdict.violating_pair {
        return Err(Error::Precondition(format!(
            "reduced states {a} and {b} on side {side:?} are neither identical nor orthogonal"
        )));
    }
    let dims = basis.dims();
    let other_dim = dims.dim(side.other());
    let sigmas = reduced_states(basis, side);

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, sigma) in sigmas.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| sigmas[g[0]].distance(sigma) < TOL)
        {
            Some(g) => g.push(k),
            None => groups.push(vec![k]),
        }
    }

    let mut subspaces = Vec::with_capacity(groups.len());
    for members in groups {
        let sigma = &sigmas[members[0]];
        let purity = sigma.hs_inner(sigma).re;
        let dim = (1.0 / purity).round() as usize;
        let projector = sigma.scale_real(dim as f64);
        if dim == 0 || !(&projector * &projector).approx_eq(&projector, TOL * dim as f64) {
            return Err(Error::Numerical(format!(
                "reduced state of vector {} is not a normalized projector",
                members[0]
            )));
        }
        if members.len() != other_dim * dim {
            return Err(Error::Numerical(format!(
                "subspace of dimension {dim} has {} members, expected {}",
                members.len(),
                other_dim * dim
            )));
        }
        for &m in &members {
            check_maximally_entangled(basis.vector(m), dims, dim, m)?;
        }
        subspaces.push(Subspace {
            projector,
            dim,
            member_indices: members,
        });
    }

    let n = dims.dim(side);
    let total: ComplexMatrix = subspaces.iter().map(|s| s.projector.clone()).sum();
    if !total.approx_eq(&ComplexMatrix::identity(n), TOL * n as f64) {
        return Err(Error::Numerical(
            "subspace projectors do not sum to I".into(),
        ));
    }
    Ok(PartitionStructure { side, subspaces })
}

fn check_maximally_entangled(
    v: &ComplexMatrix,
    dims: BiDims,
    d: usize,
    index: usize,
) -> Result<()> {
    let schmidt = schmidt_decomposition(v, dims)?;
    let expected = 1.0 / (d as f64).sqrt();
    let ok = schmidt.coefficients.iter().enumerate().all(|(k, &c)| {
        let target = if k < d { expected } else { 0.0 };
        (c - target).abs() < TOL
    });
    if ok {
        Ok(())
    } else {
        Err(Error::NotMaximallyEntangled(format!(
            "vector {index} has Schmidt coefficients {:?}, expected {d} equal to {expected:.6}",
            schmidt.coefficients
        )))
    }
}

/// Grid structure of a causal basis: both parties split into blocks of a
/// common dimension `d`, with `d^2` maximally entangled members per cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CausalGrid {
    pub d: usize,
    #[serde(rename = "rA")]
    pub r_a: usize,
    #[serde(rename = "rB")]
    pub r_b: usize,
    /// `cells[alpha][beta]` lists the basis indices in block `(alpha, beta)`.
    pub cells: Vec<Vec<Vec<usize>>>,
    #[serde(rename = "partitionA")]
    pub partition_a: PartitionStructure,
    #[serde(rename = "partitionB")]
    pub partition_b: PartitionStructure,
}

pub fn causal_structure(basis: &OrthogonalBasis) -> Result<CausalGrid> {
    let part_a = partition_structure(basis, Side::A)?;
    let part_b = partition_structure(basis, Side::B)?;
    let d = part_a.subspaces[0].dim;
    if part_a
        .subspaces
        .iter()
        .chain(&part_b.subspaces)
        .any(|s| s.dim != d)
    {
        return Err(Error::Numerical(format!(
            "inconsistent block dimensions A {:?}, B {:?}",
            part_a.dims(),
            part_b.dims()
        )));
    }
    let (r_a, r_b) = (part_a.subspaces.len(), part_b.subspaces.len());
    let mut cells = vec![vec![Vec::new(); r_b]; r_a];
    for idx in 0..basis.len() {
        let alpha = part_a.subspace_of(idx).expect("every member is assigned");
        let beta = part_b.subspace_of(idx).expect("every member is assigned");
        cells[alpha][beta].push(idx);
    }
    if let Some(bad) = cells.iter().flatten().find(|c| c.len() != d * d) {
        return Err(Error::Numerical(format!(
            "cell holds {} members, expected {}",
            bad.len(),
            d * d
        )));
    }
    Ok(CausalGrid {
        d,
        r_a,
        r_b,
        cells,
        partition_a: part_a,
        partition_b: part_b,
    })
}

/// A two-message signaling protocol built from basis vectors: prepare `|b>`;
/// the sender either does nothing or applies `unitary`; the receiver's
/// post-measurement states differ by `separation` in trace distance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructiveWitness {
    pub receiver: Side,
    #[serde(rename = "bIndex")]
    pub b_index: usize,
    /// Basis vector whose reduced state the rotation mixes in.
    #[serde(rename = "aIndex")]
    pub a_index: usize,
    /// Sender-side unitary.
    pub unitary: ComplexMatrix,
    /// Receiver state when the sender does nothing (`sigma^b`).
    pub unrotated: ComplexMatrix,
    /// Receiver state after the sender's rotation.
    pub rotated: ComplexMatrix,
    pub separation: f64,
}

/// Builds a signaling witness when the dichotomy test fails on `receiver`.
///
/// `|b>` is chosen with maximal purity `tr(sigma^b)^2` among vectors whose
/// overlap set `{sigma^a : sigma^a sigma^b != 0}` holds at least two distinct
/// operators; this makes `sigma^b` extremal there, so any rotation that
/// mixes in a different `sigma^a` changes the receiver's state. The rotation
/// aligns the sender-side Schmidt vectors of `|b>` with those of `|a>` after
/// phases are chosen so every receiver-side overlap is nonnegative.
pub fn constructive_witness(
    basis: &OrthogonalBasis,
    receiver: Side,
) -> Result<ConstructiveWitness> {
    match receiver {
        Side::A => witness_for_alice(basis),
        Side::B => {
            let mut w = witness_for_alice(&basis.swap_parties())?;
            w.receiver = Side::B;
            Ok(w)
        }
    }
}

fn witness_for_alice(basis: &OrthogonalBasis) -> Result<ConstructiveWitness> {
    let dims = basis.dims();
    let sigmas = reduced_states(basis, Side::A);
    let n = sigmas.len();

    let overlapping_distinct = |b: usize| -> Vec<usize> {
        (0..n)
            .filter(|&a| {
                (&sigmas[a] * &sigmas[b]).frobenius_norm() >= TOL
                    && sigmas[a].distance(&sigmas[b]) >= TOL
            })
            .collect()
    };

    let mut best: Option<(usize, f64)> = None;
    for (b, sigma) in sigmas.iter().enumerate() {
        if overlapping_distinct(b).is_empty() {
            continue;
        }
        let purity = sigma.hs_inner(sigma).re;
        if best.is_none_or(|(_, p)| purity > p + 1e-12) {
            best = Some((b, purity));
        }
    }
    let Some((b_index, _)) = best else {
        return Err(Error::Precondition(
            "reduced states are pairwise identical or orthogonal; no signaling witness exists"
                .into(),
        ));
    };

    let mut chosen: Option<ConstructiveWitness> = None;
    for a_index in overlapping_distinct(b_index) {
        let unitary = aligning_unitary(basis.vector(a_index), basis.vector(b_index), dims)?;
        let rotated_state = &embed(&unitary, dims, Side::B) * basis.vector(b_index);
        let mut rotated = ComplexMatrix::zeros(dims.dim_a, dims.dim_a);
        for (c, v) in basis.vectors().iter().enumerate() {
            let p = v.inner(&rotated_state).norm_sqr();
            if p > 0.0 {
                rotated.add_scaled(C64::new(p, 0.0), &sigmas[c]);
            }
        }
        let separation = trace_distance(&sigmas[b_index], &rotated)?;
        if chosen.as_ref().is_none_or(|w| separation > w.separation) {
            chosen = Some(ConstructiveWitness {
                receiver: Side::A,
                b_index,
                a_index,
                unitary,
                unrotated: sigmas[b_index].clone(),
                rotated,
                separation,
            });
        }
    }
    let witness = chosen.expect("candidate set is nonempty");
    if witness.separation <= TOL {
        return Err(Error::Numerical(format!(
            "constructed witness has separation {:.3e}",
            witness.separation
        )));
    }
    Ok(witness)
}

/// Full Schmidt bases `(lambda, A vectors, B vectors)` of a bipartite ket,
/// each completed to an orthonormal basis of its factor.
fn full_schmidt(
    v: &ComplexMatrix,
    dims: BiDims,
) -> Result<(Vec<f64>, Vec<ComplexMatrix>, Vec<ComplexMatrix>)> {
    let s = schmidt_decomposition(v, dims)?;
    let complete = |mut vs: Vec<ComplexMatrix>, d: usize| {
        vs.extend((0..d).map(|i| ComplexMatrix::basis_ket(d, i)));
        let mut out = gram_schmidt(&vs);
        out.truncate(d);
        out
    };
    Ok((
        s.coefficients.iter().map(|c| c * c).collect(),
        complete(s.a_vectors, dims.dim_a),
        complete(s.b_vectors, dims.dim_b),
    ))
}

/// Unitary on B mapping the B-side Schmidt vectors of `|b>` to those of
/// `|a>`, with labels and phases chosen so that `<a|(I (x) U)|b>` is a sum of
/// nonnegative terms, the first of them strictly positive.
fn aligning_unitary(a: &ComplexMatrix, b: &ComplexMatrix, dims: BiDims) -> Result<ComplexMatrix> {
    let (lam_a, mut a_a, mut a_b) = full_schmidt(a, dims)?;
    let (lam_b, mut b_a, mut b_b) = full_schmidt(b, dims)?;
    let k = lam_a.len();

    // Label the strongest overlapping pair as index 0 on both sides.
    let mut best = (0, 0, -1.0);
    for i in 0..k {
        for j in 0..k {
            let w = (lam_a[i] * lam_b[j]).sqrt() * b_a[j].inner(&a_a[i]).norm();
            if w > best.2 {
                best = (i, j, w);
            }
        }
    }
    let (i0, j0, _) = best;
    a_a.swap(0, i0);
    a_b.swap(0, i0);
    b_a.swap(0, j0);
    b_b.swap(0, j0);

    // Make <b,i|a,i>_A real and nonnegative; the B vector takes the inverse
    // phase so |a> itself is unchanged.
    for i in 0..k {
        let overlap = b_a[i].inner(&a_a[i]);
        if overlap.norm() > 0.0 {
            let phase = overlap / overlap.norm();
            a_a[i] = a_a[i].scale(phase.conj());
            a_b[i] = a_b[i].scale(phase);
        }
    }

    let mut u = ComplexMatrix::zeros(dims.dim_b, dims.dim_b);
    for (x, y) in a_b.iter().zip(&b_b) {
        u.add_assign(&x.outer(y));
    }
    let deviation = u.unitarity_deviation();
    if deviation > TOL {
        return Err(Error::Numerical(format!(
            "aligning map is not unitary (deviation {deviation:.3e})"
        )));
    }
    Ok(u)
}

/// Number of eigenvalues above [`TOL`].
pub fn support_rank(sigma: &ComplexMatrix) -> Result<usize> {
    Ok(hermitian_spectrum(sigma)?
        .values
        .iter()
        .filter(|&&x| x > TOL)
        .count())
}
