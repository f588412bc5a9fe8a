//! Dense complex linear algebra specialized to bipartite tensor structure.
//!
//! Index convention used throughout the crate: subsystem A is the left
//! (slow) Kronecker factor, so `|i>_A |j>_B` sits at flat index
//! `i * dim_b + j`. Multipartite helpers follow the same rule: the first
//! listed factor varies slowest.

mod decomp;
mod matrix;

pub use decomp::{
    hermitian_spectrum, operator_schmidt, schmidt_decomposition, svd, trace_distance, trace_norm,
    OperatorSchmidt, SchmidtTerm, Spectrum, StateSchmidt, Svd,
};
pub use matrix::{ComplexMatrix, C64, I, ONE, ZERO};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute Frobenius tolerance for equality and orthogonality decisions.
pub const TOL: f64 = 1e-9;

/// Relative tolerance for spectral quantities.
pub const SPECTRAL_TOL: f64 = 1e-7;

/// Local dimensions `(N_A, N_B)` of a bipartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BiDims {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
}

impl BiDims {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidInput(format!(
                "local dimensions must be positive, got ({dim_a}, {dim_b})"
            )));
        }
        Ok(BiDims { dim_a, dim_b })
    }

    /// Two qubits.
    pub const QUBITS: BiDims = BiDims { dim_a: 2, dim_b: 2 };

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn swapped(&self) -> BiDims {
        BiDims {
            dim_a: self.dim_b,
            dim_b: self.dim_a,
        }
    }

    pub fn dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.dim_a,
            Side::B => self.dim_b,
        }
    }

    pub(crate) fn check_square(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if m.shape() != (n, n) {
            return Err(Error::dims(
                format!("{n}x{n} operator for dims ({}, {})", self.dim_a, self.dim_b),
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        Ok(())
    }

    pub(crate) fn check_ket(&self, v: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if v.shape() != (n, 1) {
            return Err(Error::dims(
                format!("ket of length {n}"),
                format!("{}x{}", v.rows(), v.cols()),
            ));
        }
        Ok(())
    }
}

/// One party of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Kronecker product with `a` as the slow factor.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// Kronecker product of a list of factors, first factor slowest.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| tensor_product(&acc, f))
}

/// Traces out `traced` and returns the operator on the remaining factor.
pub fn partial_trace(m: &ComplexMatrix, dims: BiDims, traced: Side) -> Result<ComplexMatrix> {
    dims.check_square(m)?;
    let keep = match traced {
        Side::A => [false, true],
        Side::B => [true, false],
    };
    Ok(partial_trace_multi(m, &[dims.dim_a, dims.dim_b], &keep))
}

/// Partial trace over a multipartite operator; `keep[k]` selects the factors
/// that survive. `m` must be square of dimension `dims.iter().product()`.
pub fn partial_trace_multi(m: &ComplexMatrix, dims: &[usize], keep: &[bool]) -> ComplexMatrix {
    assert_eq!(dims.len(), keep.len());
    let total: usize = dims.iter().product();
    assert_eq!(m.shape(), (total, total), "partial trace dimension");
    let kept_dims: Vec<usize> = dims
        .iter()
        .zip(keep)
        .filter_map(|(&d, &k)| k.then_some(d))
        .collect();
    let traced_dims: Vec<usize> = dims
        .iter()
        .zip(keep)
        .filter_map(|(&d, &k)| (!k).then_some(d))
        .collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Flat index of a full multi-index assembled from kept and traced parts.
    let compose = |kept: usize, traced: usize| -> usize {
        let mut kept_digits = digits(kept, &kept_dims);
        let mut traced_digits = digits(traced, &traced_dims);
        kept_digits.reverse();
        traced_digits.reverse();
        let mut idx = 0;
        for (&d, &k) in dims.iter().zip(keep) {
            let digit = if k {
                kept_digits.pop().unwrap()
            } else {
                traced_digits.pop().unwrap()
            };
            idx = idx * d + digit;
        }
        idx
    };

    let mut index_table = vec![0usize; kept_total * traced_total];
    for k in 0..kept_total {
        for t in 0..traced_total {
            index_table[k * traced_total + t] = compose(k, t);
        }
    }

    ComplexMatrix::from_fn(kept_total, kept_total, |i, j| {
        (0..traced_total)
            .map(|t| {
                m[(
                    index_table[i * traced_total + t],
                    index_table[j * traced_total + t],
                )]
            })
            .sum()
    })
}

/// Mixed-radix digits of `index`, most significant first.
pub(crate) fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

pub(crate) fn from_digits(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// `sum_i |i>|i>`, optionally scaled by `1/sqrt(d)`.
///
/// Both normalizations are in use: reference-system constructions (Choi
/// states, operator Schmidt arguments) take the unnormalized form.
pub fn max_entangled(d: usize, normalized: bool) -> ComplexMatrix {
    assert!(d >= 1);
    let mut v = ComplexMatrix::zeros(d * d, 1);
    let amp = if normalized {
        1.0 / (d as f64).sqrt()
    } else {
        1.0
    };
    for i in 0..d {
        v.as_mut_slice()[i * d + i] = C64::new(amp, 0.0);
    }
    v
}

/// Product ket `|a>|b>`.
pub fn product_ket(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    tensor_product(a, b)
}

/// Reorders the factors of a multipartite ket: output factor `k` is input
/// factor `perm[k]`.
pub fn permute_ket(v: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> ComplexMatrix {
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut out = ComplexMatrix::zeros(v.rows(), 1);
    for (idx, &amp) in v.as_slice().iter().enumerate() {
        let d = digits(idx, dims);
        let nd: Vec<usize> = perm.iter().map(|&p| d[p]).collect();
        out.as_mut_slice()[from_digits(&nd, &new_dims)] = amp;
    }
    out
}

/// Reorders the factors of a multipartite square operator.
pub fn permute_operator(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> ComplexMatrix {
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let n = m.rows();
    let map: Vec<usize> = (0..n)
        .map(|idx| {
            let d = digits(idx, dims);
            let nd: Vec<usize> = perm.iter().map(|&p| d[p]).collect();
            from_digits(&nd, &new_dims)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    out
}

/// Exchanges the roles of A and B in a bipartite ket.
pub fn swap_parties_ket(v: &ComplexMatrix, dims: BiDims) -> ComplexMatrix {
    permute_ket(v, &[dims.dim_a, dims.dim_b], &[1, 0])
}

/// Exchanges the roles of A and B in a bipartite operator.
pub fn swap_parties(m: &ComplexMatrix, dims: BiDims) -> ComplexMatrix {
    permute_operator(m, &[dims.dim_a, dims.dim_b], &[1, 0])
}

/// Applies `op` to factor `target` of a multipartite ket.
pub fn apply_local_ket(
    op: &ComplexMatrix,
    v: &ComplexMatrix,
    dims: &[usize],
    target: usize,
) -> ComplexMatrix {
    let d = dims[target];
    assert_eq!(op.shape(), (d, d), "local operator dimension");
    let inner: usize = dims[target + 1..].iter().product();
    let outer: usize = dims[..target].iter().product();
    let src = v.as_slice();
    let mut out = ComplexMatrix::zeros(v.rows(), 1);
    let dst = out.as_mut_slice();
    for o in 0..outer {
        for r in 0..d {
            for c in 0..d {
                let z = op[(r, c)];
                if z == ZERO {
                    continue;
                }
                for k in 0..inner {
                    dst[(o * d + r) * inner + k] += z * src[(o * d + c) * inner + k];
                }
            }
        }
    }
    out
}

/// `op` acting on `side` of a bipartite space, identity elsewhere.
pub fn embed(op: &ComplexMatrix, dims: BiDims, side: Side) -> ComplexMatrix {
    match side {
        Side::A => tensor_product(op, &ComplexMatrix::identity(dims.dim_b)),
        Side::B => tensor_product(&ComplexMatrix::identity(dims.dim_a), op),
    }
}

/// Reshapes a bipartite ket into its `N_A x N_B` coefficient matrix.
pub fn ket_to_coefficients(v: &ComplexMatrix, dims: BiDims) -> ComplexMatrix {
    v.reshape(dims.dim_a, dims.dim_b)
        .expect("ket length matches dims")
}

pub fn coefficients_to_ket(c: &ComplexMatrix) -> ComplexMatrix {
    c.reshape(c.rows() * c.cols(), 1)
        .expect("reshape to column")
}
