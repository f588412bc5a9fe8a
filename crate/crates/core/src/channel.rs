//! Quantum operations in Kraus form and their Choi states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    partial_trace_multi, permute_operator, swap_parties, BiDims, ComplexMatrix, C64, TOL,
};

/// A bipartite quantum operation `rho -> sum_mu M_mu rho M_mu^dagger`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct KrausChannel {
    dims: BiDims,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    kraus: Vec<ComplexMatrix>,
}

impl TryFrom<RawChannel> for KrausChannel {
    type Error = Error;

    fn try_from(raw: RawChannel) -> Result<Self> {
        KrausChannel::new(BiDims::new(raw.dim_a, raw.dim_b)?, raw.kraus)
    }
}

impl From<KrausChannel> for RawChannel {
    fn from(ch: KrausChannel) -> Self {
        RawChannel {
            dim_a: ch.dims.dim_a,
            dim_b: ch.dims.dim_b,
            kraus: ch.kraus,
        }
    }
}

/// Outcome of [`KrausChannel::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TpReport {
    pub tp: bool,
    /// `||sum M^dagger M - I||_F`.
    pub deviation: f64,
}

impl KrausChannel {
    /// Checks shapes only; trace preservation is reported by [`validate`](Self::validate).
    pub fn new(dims: BiDims, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::EmptyChannel);
        }
        let n = dims.total();
        if kraus.iter().any(|m| m.shape() != (n, n)) {
            if kraus.iter().all(|m| m.shape() == kraus[0].shape()) {
                return Err(Error::dims(
                    format!("{n}x{n} Kraus operators"),
                    format!("{}x{}", kraus[0].rows(), kraus[0].cols()),
                ));
            }
            return Err(Error::RaggedKraus);
        }
        if kraus.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidInput("non-finite Kraus entries".into()));
        }
        Ok(KrausChannel { dims, kraus })
    }

    /// Like [`new`](Self::new) but also rejects operations that are not trace preserving.
    pub fn new_tp(dims: BiDims, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new(dims, kraus)?;
        ch.require_tp()?;
        Ok(ch)
    }

    pub fn identity(dims: BiDims) -> Self {
        KrausChannel {
            dims,
            kraus: vec![ComplexMatrix::identity(dims.total())],
        }
    }

    pub fn unitary(u: ComplexMatrix, dims: BiDims) -> Result<Self> {
        let deviation = u.unitarity_deviation();
        if deviation > TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Self::new(dims, vec![u])
    }

    /// Replaces every input by `I/N`.
    pub fn completely_depolarizing(dims: BiDims) -> Self {
        let n = dims.total();
        let s = 1.0 / (n as f64).sqrt();
        let kraus = (0..n)
            .flat_map(|i| {
                (0..n).map(move |j| {
                    let mut m = ComplexMatrix::zeros(n, n);
                    m[(i, j)] = C64::new(s, 0.0);
                    m
                })
            })
            .collect();
        KrausChannel { dims, kraus }
    }

    /// Orthogonal measurement with the given projectors as Kraus operators.
    pub fn from_projectors(dims: BiDims, projectors: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new_tp(dims, projectors)
    }

    pub fn dims(&self) -> BiDims {
        self.dims
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn validate(&self) -> TpReport {
        let n = self.dims.total();
        let mut sum = ComplexMatrix::zeros(n, n);
        for m in &self.kraus {
            sum.add_assign(&(&m.adjoint() * m));
        }
        let deviation = sum.distance(&ComplexMatrix::identity(n));
        TpReport {
            tp: deviation < TOL,
            deviation,
        }
    }

    pub fn require_tp(&self) -> Result<()> {
        let report = self.validate();
        if report.tp {
            Ok(())
        } else {
            Err(Error::NotTracePreserving {
                deviation: report.deviation,
            })
        }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.dims.check_square(rho)?;
        Ok(self.apply_unchecked(rho))
    }

    pub(crate) fn apply_unchecked(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.kraus.iter().map(|m| m.conjugate(rho)).sum()
    }

    /// Output for a pure input, computed from `M_mu |psi>` without forming `|psi><psi|`.
    pub fn apply_pure(&self, psi: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.dims.check_ket(psi)?;
        Ok(self.kraus.iter().map(|m| (m * psi).projector()).sum())
    }

    /// `e2 after e1`: Kraus operators `M2_nu M1_mu`.
    pub fn compose(e2: &KrausChannel, e1: &KrausChannel) -> Result<KrausChannel> {
        if e1.dims != e2.dims {
            return Err(Error::dims(
                format!("{:?}", e1.dims),
                format!("{:?}", e2.dims),
            ));
        }
        let kraus = e2
            .kraus
            .iter()
            .flat_map(|m2| e1.kraus.iter().map(move |m1| m2 * m1))
            .collect();
        Ok(KrausChannel {
            dims: e1.dims,
            kraus,
        })
    }

    /// Convex combination `sum_k w_k E_k`, weights summing to one.
    pub fn mixture(parts: &[(f64, &KrausChannel)]) -> Result<KrausChannel> {
        let first = parts.first().ok_or(Error::EmptyChannel)?.1;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > TOL {
            return Err(Error::InvalidInput(format!(
                "mixture weights must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        let mut kraus = Vec::new();
        for (w, ch) in parts {
            if ch.dims != first.dims {
                return Err(Error::dims(
                    format!("{:?}", first.dims),
                    format!("{:?}", ch.dims),
                ));
            }
            kraus.extend(ch.kraus.iter().map(|m| m.scale_real(w.sqrt())));
        }
        Ok(KrausChannel {
            dims: first.dims,
            kraus,
        })
    }

    /// The same operation with the parties relabeled.
    pub fn swap_parties(&self) -> KrausChannel {
        KrausChannel {
            dims: self.dims.swapped(),
            kraus: self
                .kraus
                .iter()
                .map(|m| swap_parties(m, self.dims))
                .collect(),
        }
    }

    pub fn choi(&self) -> ChoiState {
        let (na, nb) = (self.dims.dim_a, self.dims.dim_b);
        let n = na * nb;
        let big = n * n;
        let mut matrix = ComplexMatrix::zeros(big, big);
        for m in &self.kraus {
            let v = ComplexMatrix::from_fn(big, 1, |idx, _| {
                let s = idx % nb;
                let b = (idx / nb) % nb;
                let a = (idx / (nb * nb)) % na;
                let r = idx / (nb * nb * na);
                m[(a * nb + b, r * nb + s)]
            });
            matrix.add_assign(&v.projector());
        }
        ChoiState {
            dims: self.dims,
            matrix,
        }
    }

    /// True when the two operations have the same Choi state.
    pub fn equivalent(&self, other: &KrausChannel, tol: f64) -> bool {
        self.dims == other.dims && self.choi().distance(&other.choi()) < tol
    }
}

/// `(E (x) id)` applied to unnormalized maximally entangled probes
/// `|Phi>_RA (x) |Phi'>_BS`, with factors ordered R, A, B, S.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState {
    pub dims: BiDims,
    pub matrix: ComplexMatrix,
}

impl ChoiState {
    /// Factor dimensions in storage order R, A, B, S.
    pub fn factor_dims(&self) -> [usize; 4] {
        let (na, nb) = (self.dims.dim_a, self.dims.dim_b);
        [na, na, nb, nb]
    }

    pub fn distance(&self, other: &ChoiState) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        self.matrix.distance(&other.matrix)
    }

    /// Reduced operator on the factors flagged in `keep` (order R, A, B, S).
    pub fn reduce(&self, keep: [bool; 4]) -> ComplexMatrix {
        partial_trace_multi(&self.matrix, &self.factor_dims(), &keep)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let spec = crate::tensor::hermitian_spectrum(&self.matrix)?;
        Ok(spec.values.last().copied().unwrap_or(0.0))
    }
}

/// Choi state of an arbitrary linear map given by its action on operators,
/// built from matrix units: the block at input `|r s><r' s'|` is `f` of it.
pub fn choi_from_map(dims: BiDims, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ChoiState {
    let (na, nb) = (dims.dim_a, dims.dim_b);
    let n = na * nb;
    // Assemble in (A, B, R, S) order, then permute to (R, A, B, S).
    let mut abrs = ComplexMatrix::zeros(n * n, n * n);
    for row_in in 0..n {
        for col_in in 0..n {
            let mut unit = ComplexMatrix::zeros(n, n);
            unit[(row_in, col_in)] = C64::new(1.0, 0.0);
            let out = f(&unit);
            for i in 0..n {
                for j in 0..n {
                    abrs[(i * n + row_in, j * n + col_in)] = out[(i, j)];
                }
            }
        }
    }
    // Input factor order A, B, R, S -> output R, A, B, S.
    let matrix = permute_operator(&abrs, &[na, nb, na, nb], &[2, 0, 1, 3]);
    ChoiState { dims, matrix }
}
