//! Necessary conditions for implementing a channel without communication,
//! and the counterexample bases that violate them.
//!
//! Both tests only ever certify *non*-localizability. When they find nothing
//! the answer is "no obstruction found", never "localizable".

use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::measurement::OrthogonalBasis;
use crate::tensor::{
    ket_to_coefficients, max_entangled, schmidt_decomposition, svd, tensor_product, BiDims,
    ComplexMatrix, C64, ONE, TOL, ZERO,
};

/// True when `E(|psi><psi|) = |psi><psi|` for the normalized `psi`.
pub fn is_eigenstate(ch: &KrausChannel, psi: &ComplexMatrix) -> bool {
    eigenstate_residual(ch, psi).is_ok_and(|r| r < TOL)
}

/// `||E(|psi><psi|) - |psi><psi|||_F` after normalizing `psi`.
pub fn eigenstate_residual(ch: &KrausChannel, psi: &ComplexMatrix) -> Result<f64> {
    let n = psi.norm();
    if n < TOL {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    let psi = psi.scale_real(1.0 / n);
    let out = ch.apply_pure(&psi)?;
    Ok(out.distance(&psi.projector()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObstructionKind {
    /// Product images of eigenstates are not closed under the local operators.
    EigenstateClosure,
    /// The basis unitaries are not a group up to phase.
    ProjectiveGroup,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Evidence {
    /// `psi`, `(a (x) I) psi` and `(I (x) b) psi` are eigenstates but
    /// `(a (x) b) psi` (normalized as `product_state`) is not.
    EigenstateClosure {
        psi: ComplexMatrix,
        a: ComplexMatrix,
        b: ComplexMatrix,
        #[serde(rename = "productState")]
        product_state: ComplexMatrix,
    },
    /// `U_i U_j` is not proportional to any member of the set.
    ProjectiveGroup {
        i: usize,
        j: usize,
        product: ComplexMatrix,
        /// Largest `|tr(U_k^dagger U_i U_j)|` over the set; closure needs `d`.
        #[serde(rename = "bestOverlap")]
        best_overlap: f64,
    },
}

/// A certificate that no zero-communication protocol implements the channel.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub kind: ObstructionKind,
    pub evidence: Evidence,
    /// How far the violated condition is from holding.
    pub residual: f64,
}

fn smallest_singular_value(m: &ComplexMatrix) -> f64 {
    svd(m).smallest()
}

fn require_invertible(m: &ComplexMatrix, name: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Precondition(format!("{name} is not square")));
    }
    let smallest = smallest_singular_value(m);
    if smallest > TOL {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{name} is not invertible (smallest singular value {smallest:.3e})"
        )))
    }
}

/// If `psi`, `(a (x) I) psi` and `(I (x) b) psi` are all eigenstates of a
/// localizable channel, so is `(a (x) b) psi`. Returns a certificate when
/// that last vector is not an eigenstate, `None` when closure holds.
///
/// Each premise that fails is reported as a distinct precondition error.
pub fn eigenstate_closure_test(
    ch: &KrausChannel,
    psi: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<Option<ObstructionCertificate>> {
    let dims = ch.dims();
    dims.check_ket(psi)?;
    if a.shape() != (dims.dim_a, dims.dim_a) {
        return Err(Error::dims(
            format!("{0}x{0} operator a", dims.dim_a),
            format!("{:?}", a.shape()),
        ));
    }
    if b.shape() != (dims.dim_b, dims.dim_b) {
        return Err(Error::dims(
            format!("{0}x{0} operator b", dims.dim_b),
            format!("{:?}", b.shape()),
        ));
    }
    require_invertible(a, "a")?;
    require_invertible(b, "b")?;

    let id_a = ComplexMatrix::identity(dims.dim_a);
    let id_b = ComplexMatrix::identity(dims.dim_b);
    let premises = [
        ("psi", psi.clone()),
        ("(a x I) psi", &tensor_product(a, &id_b) * psi),
        ("(I x b) psi", &tensor_product(&id_a, b) * psi),
    ];
    for (name, v) in &premises {
        let r = eigenstate_residual(ch, v)?;
        if r >= TOL {
            return Err(Error::Precondition(format!(
                "{name} is not an eigenstate (residual {r:.3e})"
            )));
        }
    }
    let product_state = (&tensor_product(a, b) * psi).normalized();
    let residual = eigenstate_residual(ch, &product_state)?;
    Ok((residual >= TOL).then(|| ObstructionCertificate {
        kind: ObstructionKind::EigenstateClosure,
        evidence: Evidence::EigenstateClosure {
            psi: psi.normalized(),
            a: a.clone(),
            b: b.clone(),
            product_state,
        },
        residual,
    }))
}

/// Scans candidate states against all pairs of generalized Pauli operators
/// and returns the first closure violation. `candidates` should be states
/// expected to be eigenstates (basis vectors of a measurement channel).
pub fn search_eigenstate_closure(
    ch: &KrausChannel,
    candidates: &[ComplexMatrix],
) -> Option<ObstructionCertificate> {
    let dims = ch.dims();
    let ops_a = local_operator_family(dims.dim_a);
    let ops_b = local_operator_family(dims.dim_b);
    let id_a = ComplexMatrix::identity(dims.dim_a);
    let id_b = ComplexMatrix::identity(dims.dim_b);
    let eigen = |v: &ComplexMatrix| is_eigenstate(ch, v);

    for psi in candidates.iter().filter(|v| eigen(v)) {
        let good_a: Vec<&ComplexMatrix> = ops_a
            .iter()
            .filter(|a| eigen(&(&tensor_product(a, &id_b) * psi)))
            .collect();
        let good_b: Vec<&ComplexMatrix> = ops_b
            .iter()
            .filter(|b| eigen(&(&tensor_product(&id_a, b) * psi)))
            .collect();
        for a in &good_a {
            for b in &good_b {
                if let Ok(Some(cert)) = eigenstate_closure_test(ch, psi, a, b) {
                    return Some(cert);
                }
            }
        }
    }
    None
}

/// `X^i Z^j` for all `i, j < d` (just the identity when `d = 1`).
fn local_operator_family(d: usize) -> Vec<ComplexMatrix> {
    if d < 2 {
        return vec![ComplexMatrix::identity(d)];
    }
    pauli_basis_unitaries(d)
}

/// Shift and clock operators: `X|i> = |i+1 mod d>`, `Z|i> = w^i |i>`.
pub fn generalized_pauli(d: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "Pauli dimension must be at least 2, got {d}"
        )));
    }
    let x = ComplexMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO });
    let z = ComplexMatrix::diag(
        &(0..d)
            .map(|i| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / d as f64))
            .collect::<Vec<_>>(),
    );
    Ok((x, z))
}

pub fn matrix_power(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    (0..k).fold(ComplexMatrix::identity(m.rows()), |acc, _| &acc * m)
}

/// `X^a Z^b` in row-major order over `(a, b)`.
pub fn pauli_basis_unitaries(d: usize) -> Vec<ComplexMatrix> {
    let (x, z) = generalized_pauli(d).expect("d >= 2");
    (0..d)
        .flat_map(|a| {
            let xa = matrix_power(&x, a);
            let z = z.clone();
            (0..d).map(move |b| &xa * &matrix_power(&z, b))
        })
        .collect()
}

/// The unitaries `U_a` of a maximally entangled basis `|Phi_a> = (U_a (x) I)|Phi+>`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MEBasisUnitaries {
    pub d: usize,
    pub unitaries: Vec<ComplexMatrix>,
}

/// `(U (x) I)|Phi+>` for each unitary, with normalized `|Phi+>`.
pub fn basis_from_unitaries(unitaries: &[ComplexMatrix]) -> Result<OrthogonalBasis> {
    let d = unitaries.first().map_or(0, |u| u.rows());
    let dims = BiDims::new(d, d)?;
    let phi = max_entangled(d, true);
    let id = ComplexMatrix::identity(d);
    let vectors = unitaries
        .iter()
        .map(|u| &tensor_product(u, &id) * &phi)
        .collect();
    OrthogonalBasis::new(dims, vectors)
}

/// Recovers `U_a = sqrt(d) C_a` from the coefficient matrix of each vector,
/// after a change of Alice's basis that maps an anchor element to `|Phi+>`.
///
/// The anchor is the element with the largest overlap with the unnormalized
/// `|Phi+>` in the given computational basis; its unitary becomes `I`.
pub fn extract_unitaries(basis: &OrthogonalBasis) -> Result<MEBasisUnitaries> {
    let dims = basis.dims();
    if dims.dim_a != dims.dim_b {
        return Err(Error::NotMaximallyEntangled(format!(
            "local dimensions differ ({} vs {})",
            dims.dim_a, dims.dim_b
        )));
    }
    let d = dims.dim_a;
    let expected = 1.0 / (d as f64).sqrt();
    for (k, v) in basis.vectors().iter().enumerate() {
        let s = schmidt_decomposition(v, dims)?;
        if s.coefficients.iter().any(|c| (c - expected).abs() > TOL) {
            return Err(Error::NotMaximallyEntangled(format!(
                "vector {k} has Schmidt coefficients {:?}",
                s.coefficients
            )));
        }
    }
    let phi_plus = max_entangled(d, false);
    let anchor = (0..basis.len())
        .max_by(|&i, &j| {
            let oi = phi_plus.inner(basis.vector(i)).norm();
            let oj = phi_plus.inner(basis.vector(j)).norm();
            oi.total_cmp(&oj).then(j.cmp(&i))
        })
        .expect("nonempty basis");
    let scale = (d as f64).sqrt();
    let raw: Vec<ComplexMatrix> = basis
        .vectors()
        .iter()
        .map(|v| ket_to_coefficients(v, dims).scale_real(scale))
        .collect();
    let u0_inv = raw[anchor].adjoint();
    let mut unitaries = Vec::with_capacity(raw.len());
    for (k, u) in raw.iter().enumerate() {
        let mut aligned = &u0_inv * u;
        aligned.fix_phase(1e-12);
        let deviation = aligned.unitarity_deviation();
        if deviation > TOL * d as f64 {
            return Err(Error::Numerical(format!(
                "recovered operator {k} is not unitary (deviation {deviation:.3e})"
            )));
        }
        unitaries.push(aligned);
    }
    let us = MEBasisUnitaries { d, unitaries };
    us.check_orthogonality()?;
    Ok(us)
}

impl MEBasisUnitaries {
    /// `tr(U_a^dagger U_b) = d delta_ab`.
    pub fn check_orthogonality(&self) -> Result<()> {
        let d = self.d as f64;
        for (i, ui) in self.unitaries.iter().enumerate() {
            for (j, uj) in self.unitaries.iter().enumerate() {
                let target = if i == j { d } else { 0.0 };
                let got = ui.hs_inner(uj);
                if (got - C64::new(target, 0.0)).norm() > TOL * d {
                    return Err(Error::Precondition(format!(
                        "tr(U_{i}^dagger U_{j}) = {got:.6}, expected {target}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Index of the member equal to `m` up to phase, if any.
    pub fn find_up_to_phase(&self, m: &ComplexMatrix) -> Option<usize> {
        let d = self.d as f64;
        self.unitaries
            .iter()
            .position(|u| (u.hs_inner(m).norm() - d).abs() < TOL * d)
    }

    /// All ordered pairs `(i, j)` whose product is not proportional to a member.
    pub fn closure_violations(&self) -> Vec<(usize, usize)> {
        let n = self.unitaries.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let p = &self.unitaries[i] * &self.unitaries[j];
                self.find_up_to_phase(&p).is_none()
            })
            .collect()
    }
}

/// Localizable maximally entangled bases have unitaries forming a group up to
/// phase. Returns the first pair (row-major) whose product leaves the set.
pub fn projective_group_test(us: &MEBasisUnitaries) -> Result<Option<ObstructionCertificate>> {
    us.check_orthogonality()?;
    if us
        .find_up_to_phase(&ComplexMatrix::identity(us.d))
        .is_none()
    {
        return Err(Error::Precondition(
            "the set does not contain the identity up to phase".into(),
        ));
    }
    let d = us.d as f64;
    let n = us.unitaries.len();
    for i in 0..n {
        for j in 0..n {
            let product = &us.unitaries[i] * &us.unitaries[j];
            let best_overlap = us
                .unitaries
                .iter()
                .map(|u| u.hs_inner(&product).norm())
                .fold(0.0, f64::max);
            if (best_overlap - d).abs() >= TOL * d {
                return Ok(Some(ObstructionCertificate {
                    kind: ObstructionKind::ProjectiveGroup,
                    residual: d - best_overlap,
                    evidence: Evidence::ProjectiveGroup {
                        i,
                        j,
                        product,
                        best_overlap,
                    },
                }));
            }
        }
    }
    Ok(None)
}

/// The sixteen 4x4 unitaries of the mismatched table: rows `X^a Z^b` for
/// `a < 3`, and a fourth row built from `Z~ = diag(1,1,-1,-1)` instead of `Z`.
pub fn mismatch_unitaries() -> Vec<ComplexMatrix> {
    let (x, z) = generalized_pauli(4).expect("d = 4");
    let z2 = matrix_power(&z, 2);
    let z_tilde = ComplexMatrix::from_real(4, 4, &diag4(1.0, 1.0, -1.0, -1.0));
    let mut out = Vec::with_capacity(16);
    for a in 0..3 {
        let xa = matrix_power(&x, a);
        for b in 0..4 {
            out.push(&xa * &matrix_power(&z, b));
        }
    }
    let x3 = matrix_power(&x, 3);
    out.push(x3.clone());
    out.push(&x3 * &z_tilde);
    out.push(&x3 * &z2);
    out.push(&(&x3 * &z_tilde) * &z2);
    out
}

fn diag4(a: f64, b: f64, c: f64, d: f64) -> [f64; 16] {
    let mut m = [0.0; 16];
    m[0] = a;
    m[5] = b;
    m[10] = c;
    m[15] = d;
    m
}

/// The 4x4 maximally entangled basis built from [`mismatch_unitaries`].
pub fn mismatch_basis() -> OrthogonalBasis {
    basis_from_unitaries(&mismatch_unitaries()).expect("the table is orthogonal")
}

/// Quadrant offsets `(A, B)` in basis order: 00, 02, 20, 22.
pub const QUADRANTS: [(usize, usize); 4] = [(0, 0), (0, 2), (2, 0), (2, 2)];

/// Two-qubit Bell vectors `phi+, phi-, psi+, psi-` as coefficient pairs.
fn bell_patterns() -> [[(usize, usize, f64); 2]; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [(0, 0, s), (1, 1, s)],
        [(0, 0, s), (1, 1, -s)],
        [(0, 1, s), (1, 0, s)],
        [(0, 1, s), (1, 0, -s)],
    ]
}

/// `I_2 (+) u` acting on a 4-dimensional space.
pub fn lower_block(u: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |i, j| match (i < 2, j < 2) {
        (true, true) => {
            if i == j {
                ONE
            } else {
                ZERO
            }
        }
        (false, false) => u[(i - 2, j - 2)],
        _ => ZERO,
    })
}

/// 4x4 basis of Bell states in each 2x2 quadrant, with the `(23, 23)`
/// quadrant rotated by `I (x) u_b` on Bob's `{|2>, |3>}` block.
pub fn twisted_partition_basis(u_b: &ComplexMatrix) -> Result<OrthogonalBasis> {
    if u_b.shape() != (2, 2) {
        return Err(Error::dims("2x2 unitary", format!("{:?}", u_b.shape())));
    }
    let deviation = u_b.unitarity_deviation();
    if deviation > TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let dims = BiDims::new(4, 4)?;
    let twist = tensor_product(&ComplexMatrix::identity(4), &lower_block(u_b));
    let mut vectors = Vec::with_capacity(16);
    for (qa, qb) in QUADRANTS {
        for pattern in bell_patterns() {
            let mut v = ComplexMatrix::zeros(16, 1);
            for (i, j, amp) in pattern {
                v.as_mut_slice()[(qa + i) * 4 + qb + j] = C64::new(amp, 0.0);
            }
            if (qa, qb) == (2, 2) {
                v = &twist * &v;
            }
            vectors.push(v);
        }
    }
    OrthogonalBasis::new(dims, vectors)
}
