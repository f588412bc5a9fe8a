//! Spectral and singular-value decompositions, backed by nalgebra.

use serde::{Deserialize, Serialize};

use super::{BiDims, ComplexMatrix, C64, TOL};
use crate::error::{Error, Result};

/// Entries below this modulus are skipped when choosing the phase pivot.
const PHASE_PIVOT: f64 = 1e-12;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> ComplexMatrix {
        self.vectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vector(k);
            out.add_scaled(C64::new(lambda, 0.0), &v.projector());
        }
        out
    }
}

/// Eigenvalues (descending) and phase-fixed eigenvectors of a Hermitian matrix.
pub fn hermitian_spectrum(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > TOL * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Spectrum {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = (m + &m.adjoint()).scale_real(0.5);
    let eig = sym.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let columns: Vec<ComplexMatrix> = order
        .iter()
        .map(|&k| {
            let mut v = vecs.column(k);
            v.fix_phase(PHASE_PIVOT);
            v
        })
        .collect();
    Ok(Spectrum {
        values,
        vectors: ComplexMatrix::from_columns(&columns)?,
    })
}

/// `||m||_1 = sum |lambda|` for a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_spectrum(m)?.values.iter().map(|x| x.abs()).sum())
}

/// `1/2 ||rho - sigma||_1` for Hermitian arguments.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm(&(rho - sigma))?)
}

/// Thin singular value decomposition `m = U diag(s) V^dagger`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Left singular vectors as columns (`rows x k`).
    pub u: ComplexMatrix,
    /// Singular values, descending, length `k = min(rows, cols)`.
    pub singular: Vec<f64>,
    /// Right singular vectors as columns (`cols x k`).
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn rank(&self, tol: f64) -> usize {
        self.singular.iter().filter(|&&s| s > tol).count()
    }

    pub fn smallest(&self) -> f64 {
        self.singular.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.u.rows(), self.v.rows());
        for (k, &s) in self.singular.iter().enumerate() {
            out.add_scaled(C64::new(s, 0.0), &self.u.column(k).outer(&self.v.column(k)));
        }
        out
    }
}

/// Singular value decomposition with descending values and phase-fixed
/// left vectors (the right vectors absorb the compensating phase).
pub fn svd(m: &ComplexMatrix) -> Svd {
    let k = m.rows().min(m.cols());
    if k == 0 {
        return Svd {
            u: ComplexMatrix::zeros(m.rows(), 0),
            singular: vec![],
            v: ComplexMatrix::zeros(m.cols(), 0),
        };
    }
    let dec = m.to_nalgebra().svd(true, true);
    let u = ComplexMatrix::from_nalgebra(dec.u.as_ref().expect("requested U"));
    let v = ComplexMatrix::from_nalgebra(dec.v_t.as_ref().expect("requested V^T")).adjoint();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));

    let mut us = Vec::with_capacity(k);
    let mut vs = Vec::with_capacity(k);
    for &idx in &order {
        let mut uk = u.column(idx);
        let phase = uk.fix_phase(PHASE_PIVOT);
        us.push(uk);
        vs.push(v.column(idx).scale(phase.conj()));
    }
    Svd {
        u: ComplexMatrix::from_columns(&us).expect("uniform columns"),
        singular: order.iter().map(|&i| dec.singular_values[i]).collect(),
        v: ComplexMatrix::from_columns(&vs).expect("uniform columns"),
    }
}

/// One term `lambda * A (x) B` of an operator Schmidt decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchmidtTerm {
    pub coefficient: f64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

/// Operator Schmidt decomposition with factors normalized to
/// `tr(A^dagger A) = N_A`, `tr(B^dagger B) = N_B`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorSchmidt {
    pub dims: BiDims,
    /// Terms with coefficient above [`TOL`], descending.
    pub terms: Vec<SchmidtTerm>,
}

impl OperatorSchmidt {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dims.total();
        let mut out = ComplexMatrix::zeros(n, n);
        for t in &self.terms {
            out.add_scaled(
                C64::new(t.coefficient, 0.0),
                &super::tensor_product(&t.a, &t.b),
            );
        }
        out
    }
}

/// Decomposes `m = sum_mu lambda_mu A_mu (x) B_mu` by reshuffling `m` into an
/// `N_A^2 x N_B^2` matrix and taking its SVD.
pub fn operator_schmidt(m: &ComplexMatrix, dims: BiDims) -> Result<OperatorSchmidt> {
    dims.check_square(m)?;
    let (na, nb) = (dims.dim_a, dims.dim_b);
    let reshuffled = ComplexMatrix::from_fn(na * na, nb * nb, |row, col| {
        let (i, ip) = (row / na, row % na);
        let (j, jp) = (col / nb, col % nb);
        m[(i * nb + j, ip * nb + jp)]
    });
    let dec = svd(&reshuffled);
    let scale_a = (na as f64).sqrt();
    let scale_b = (nb as f64).sqrt();
    let terms = dec
        .singular
        .iter()
        .enumerate()
        .map(|(k, &s)| (k, s / (scale_a * scale_b)))
        .filter(|&(_, lambda)| lambda > TOL)
        .map(|(k, lambda)| {
            // Columns of the SVD are already phase-fixed on the A side.
            let a = dec.u.column(k).reshape(na, na).expect("square factor");
            let b = dec
                .v
                .column(k)
                .conj()
                .reshape(nb, nb)
                .expect("square factor");
            SchmidtTerm {
                coefficient: lambda,
                a: a.scale_real(scale_a),
                b: b.scale_real(scale_b),
            }
        })
        .collect();
    Ok(OperatorSchmidt { dims, terms })
}

/// Schmidt decomposition of a pure bipartite state,
/// `|psi> = sum_k s_k |a_k> |b_k>`.
#[derive(Clone, Debug)]
pub struct StateSchmidt {
    /// All `min(N_A, N_B)` coefficients, descending (zeros included).
    pub coefficients: Vec<f64>,
    pub a_vectors: Vec<ComplexMatrix>,
    pub b_vectors: Vec<ComplexMatrix>,
}

impl StateSchmidt {
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&s| s > tol).count()
    }
}

pub fn schmidt_decomposition(psi: &ComplexMatrix, dims: BiDims) -> Result<StateSchmidt> {
    dims.check_ket(psi)?;
    let c = super::ket_to_coefficients(psi, dims);
    let dec = svd(&c);
    let k = dec.singular.len();
    Ok(StateSchmidt {
        coefficients: dec.singular.clone(),
        a_vectors: (0..k).map(|i| dec.u.column(i)).collect(),
        b_vectors: (0..k).map(|i| dec.v.column(i).conj()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_entangled, tensor_product, ONE, ZERO};

    fn cnot() -> ComplexMatrix {
        ComplexMatrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
    }

    fn swap() -> ComplexMatrix {
        ComplexMatrix::from_fn(4, 4, |i, j| {
            if (i / 2, i % 2) == (j % 2, j / 2) {
                ONE
            } else {
                ZERO
            }
        })
    }

    #[test]
    fn spectrum_of_z_and_mixed_state() {
        let z = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let s = hermitian_spectrum(&z).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-12 && (s.values[1] + 1.0).abs() < 1e-12);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let s = hermitian_spectrum(&half).unwrap();
        assert!(s.values.iter().all(|x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn spectrum_of_bell_projector() {
        let p = max_entangled(2, true).projector();
        let s = hermitian_spectrum(&p).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0];
        for (x, e) in s.values.iter().zip(expected) {
            assert!((x - e).abs() < 1e-12);
        }
        assert!(s.reconstruct().approx_eq(&p, 1e-12));
        assert!(s.vectors.is_unitary(1e-10));
    }

    #[test]
    fn spectrum_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            hermitian_spectrum(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn svd_reconstructs() {
        let m = ComplexMatrix::from_fn(3, 5, |i, j| C64::new((i * j) as f64 - 1.0, i as f64 + 0.5));
        let d = svd(&m);
        assert!(d.reconstruct().approx_eq(&m, 1e-10));
        assert!(d.singular.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn schmidt_ranks_of_standard_gates() {
        let q = BiDims::QUBITS;
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0]).scale_real(0.5f64.sqrt());
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(
            operator_schmidt(&tensor_product(&h, &x), q).unwrap().rank(),
            1
        );
        assert_eq!(operator_schmidt(&cnot(), q).unwrap().rank(), 2);
        assert_eq!(operator_schmidt(&swap(), q).unwrap().rank(), 4);
    }

    #[test]
    fn schmidt_factors_follow_trace_normalization() {
        let dec = operator_schmidt(&cnot(), BiDims::QUBITS).unwrap();
        for t in &dec.terms {
            assert!((t.a.hs_inner(&t.a).re - 2.0).abs() < 1e-10);
            assert!((t.b.hs_inner(&t.b).re - 2.0).abs() < 1e-10);
        }
        let total: f64 = dec.coefficients().iter().map(|l| l * l).sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(dec.reconstruct().approx_eq(&cnot(), 1e-10));
    }

    #[test]
    fn state_schmidt_of_bell_state() {
        let s = schmidt_decomposition(&max_entangled(3, true), BiDims::new(3, 3).unwrap()).unwrap();
        for c in &s.coefficients {
            assert!((c - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }
}
