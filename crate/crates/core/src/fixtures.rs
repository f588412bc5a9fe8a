//! Named channels and bases, and generators for bases with prescribed
//! semicausal or causal structure.

use rand::Rng;
use serde::Deserialize;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::games::and_box_channel;
use crate::localizability::{
    basis_from_unitaries, mismatch_basis, pauli_basis_unitaries, twisted_partition_basis,
};
use crate::measurement::OrthogonalBasis;
use crate::random::{haar_unitary, rng};
use crate::tensor::{max_entangled, tensor_product, BiDims, ComplexMatrix, C64, ZERO};
use crate::twirl::{stabilizer_channel, werner_twirl, PauliString};

/// Either kind of input the analyses accept.
#[derive(Clone, Debug)]
pub enum Artifact {
    Channel(KrausChannel),
    Basis(OrthogonalBasis),
}

impl Artifact {
    pub fn dims(&self) -> BiDims {
        match self {
            Artifact::Channel(c) => c.dims(),
            Artifact::Basis(b) => b.dims(),
        }
    }

    /// Detects the kind by the presence of a `kraus` or `vectors` key.
    ///
    /// Malformed JSON is reported as [`Error::InvalidInput`]; well-formed
    /// input that violates a channel or basis invariant keeps its own error.
    pub fn from_json(text: &str) -> Result<Artifact> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(rename = "dimA")]
            dim_a: usize,
            #[serde(rename = "dimB")]
            dim_b: usize,
            kraus: Option<Vec<ComplexMatrix>>,
            vectors: Option<Vec<ComplexMatrix>>,
        }

        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("invalid JSON: {e}")))?;
        if !value.is_object() {
            return Err(Error::InvalidInput("expected a JSON object".into()));
        }
        let raw: Raw =
            serde_json::from_value(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let dims = BiDims::new(raw.dim_a, raw.dim_b)?;
        match (raw.kraus, raw.vectors) {
            (Some(kraus), None) => Ok(Artifact::Channel(KrausChannel::new(dims, kraus)?)),
            (None, Some(vectors)) => Ok(Artifact::Basis(OrthogonalBasis::new(dims, vectors)?)),
            (Some(_), Some(_)) => Err(Error::InvalidInput(
                "object has both \"kraus\" and \"vectors\"".into(),
            )),
            (None, None) => Err(Error::InvalidInput(
                "object has neither \"kraus\" nor \"vectors\"".into(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Artifact::Channel(c) => serde_json::to_string_pretty(c),
            Artifact::Basis(b) => serde_json::to_string_pretty(b),
        }
        .expect("plain data")
    }
}

/// Two-outcome incomplete Bell measurement `{|phi+><phi+|, I - |phi+><phi+|}`.
pub fn sorkin_channel() -> KrausChannel {
    let e1 = max_entangled(2, true).projector();
    let e2 = &ComplexMatrix::identity(4) - &e1;
    KrausChannel::from_projectors(BiDims::QUBITS, vec![e1, e2]).expect("projectors")
}

/// `phi+, phi-, psi+, psi-` in that order.
pub fn bell_basis() -> OrthogonalBasis {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let vectors = [
        [s, 0.0, 0.0, s],
        [s, 0.0, 0.0, -s],
        [0.0, s, s, 0.0],
        [0.0, s, -s, 0.0],
    ]
    .iter()
    .map(|v| ComplexMatrix::from_real(4, 1, v))
    .collect();
    OrthogonalBasis::new(BiDims::QUBITS, vectors).expect("orthonormal")
}

/// `|00>, |01>, |1+>, |1->`: Bob cannot signal Alice, Alice can signal Bob.
pub fn one_way_basis() -> OrthogonalBasis {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let vectors = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, s, s],
        [0.0, 0.0, s, -s],
    ]
    .iter()
    .map(|v| ComplexMatrix::from_real(4, 1, v))
    .collect();
    OrthogonalBasis::new(BiDims::QUBITS, vectors).expect("orthonormal")
}

pub fn hadamard() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0])
        .scale_real(std::f64::consts::FRAC_1_SQRT_2)
}

/// Maps names accepted by `--u` to 2x2 unitaries.
pub fn named_qubit_unitary(name: &str) -> Option<ComplexMatrix> {
    let t = ComplexMatrix::diag(&[
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
    ]);
    match name.to_ascii_lowercase().as_str() {
        "i" | "identity" => Some(ComplexMatrix::identity(2)),
        "h" | "hadamard" => Some(hadamard()),
        "x" => Some(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])),
        "z" => Some(ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])),
        "t" => Some(t),
        _ => None,
    }
}

/// Names understood by [`named_fixture`].
pub const FIXTURE_NAMES: [&str; 8] = [
    "sorkin",
    "bell_basis",
    "one_way_basis",
    "twisted_hadamard",
    "mismatch_basis",
    "andbox",
    "werner_twirl",
    "bell_stabilizer",
];

pub fn named_fixture(name: &str) -> Option<Artifact> {
    let artifact = match name {
        "sorkin" => Artifact::Channel(sorkin_channel()),
        "bell_basis" => Artifact::Basis(bell_basis()),
        "one_way_basis" => Artifact::Basis(one_way_basis()),
        "twisted_hadamard" => Artifact::Basis(twisted_partition_basis(&hadamard()).ok()?),
        "mismatch_basis" => Artifact::Basis(mismatch_basis()),
        "andbox" => Artifact::Channel(and_box_channel()),
        "werner_twirl" => Artifact::Channel(werner_twirl()),
        "bell_stabilizer" => {
            let gens: Vec<PauliString> = ["+XX", "+ZZ"]
                .iter()
                .map(|s| s.parse().ok())
                .collect::<Option<_>>()?;
            Artifact::Channel(stabilizer_channel(&gens, BiDims::QUBITS).ok()?)
        }
        _ => return None,
    };
    Some(artifact)
}

/// Coefficient matrices `C[i, (i + n) mod nb] = w^(m i) / sqrt d` for
/// `m < d, n < nb`: `nb d` orthonormal maximally entangled states of
/// `C^d (x) C^nb`.
fn entangled_family(d: usize, nb: usize) -> Vec<ComplexMatrix> {
    let amp = 1.0 / (d as f64).sqrt();
    let mut out = Vec::with_capacity(d * nb);
    for m in 0..d {
        for n in 0..nb {
            out.push(ComplexMatrix::from_fn(d, nb, |i, j| {
                if j == (i + n) % nb {
                    C64::from_polar(amp, 2.0 * std::f64::consts::PI * (m * i) as f64 / d as f64)
                } else {
                    ZERO
                }
            }));
        }
    }
    out
}

/// Embeds a `d x nb` coefficient matrix as rows `offset..offset+d` of an
/// `na x nb` matrix and returns the ket.
fn embed_rows(c: &ComplexMatrix, na: usize, offset: usize) -> ComplexMatrix {
    let nb = c.cols();
    let full = ComplexMatrix::from_fn(na, nb, |i, j| {
        if i >= offset && i < offset + c.rows() {
            c[(i - offset, j)]
        } else {
            ZERO
        }
    });
    crate::tensor::coefficients_to_ket(&full)
}

/// A random basis whose Alice-side reduced states split `C^na` into
/// orthogonal subspaces of the given dimensions, each fully entangled with
/// Bob. Bob's frame is rotated independently per subspace, so Alice can
/// usually signal Bob.
pub fn semicausal_basis(
    dims: BiDims,
    subspace_dims: &[usize],
    rng: &mut impl Rng,
) -> Result<OrthogonalBasis> {
    if subspace_dims.iter().sum::<usize>() != dims.dim_a {
        return Err(Error::InvalidInput(format!(
            "subspace dimensions {subspace_dims:?} do not sum to {}",
            dims.dim_a
        )));
    }
    if subspace_dims.iter().any(|&d| d == 0 || d > dims.dim_b) {
        return Err(Error::InvalidInput(
            "each subspace needs 1 <= d <= dimB".into(),
        ));
    }
    let u_a = haar_unitary(dims.dim_a, rng);
    let mut vectors = Vec::with_capacity(dims.total());
    let mut offset = 0;
    for &d in subspace_dims {
        let local = tensor_product(&u_a, &haar_unitary(dims.dim_b, rng));
        for c in entangled_family(d, dims.dim_b) {
            vectors.push(&local * &embed_rows(&c, dims.dim_a, offset));
        }
        offset += d;
    }
    OrthogonalBasis::new(dims, vectors)
}

/// A random causal basis: both sides split into `dim / d` blocks of size
/// `d`, with `d^2` maximally entangled states per pair of blocks.
pub fn causal_basis(dims: BiDims, d: usize, rng: &mut impl Rng) -> Result<OrthogonalBasis> {
    if d == 0 || !dims.dim_a.is_multiple_of(d) || !dims.dim_b.is_multiple_of(d) {
        return Err(Error::InvalidInput(format!(
            "block size {d} must divide both dimensions {dims:?}"
        )));
    }
    let (ra, rb) = (dims.dim_a / d, dims.dim_b / d);
    let local = tensor_product(
        &haar_unitary(dims.dim_a, rng),
        &haar_unitary(dims.dim_b, rng),
    );
    let bell = basis_from_unitaries_or_product(d);
    let mut vectors = Vec::with_capacity(dims.total());
    for alpha in 0..ra {
        for beta in 0..rb {
            let twist = tensor_product(&haar_unitary(d, rng), &ComplexMatrix::identity(d));
            for v in &bell {
                let cell = &twist * v;
                let mut full = ComplexMatrix::zeros(dims.total(), 1);
                for i in 0..d {
                    for j in 0..d {
                        let idx = (alpha * d + i) * dims.dim_b + beta * d + j;
                        full.as_mut_slice()[idx] = cell[(i * d + j, 0)];
                    }
                }
                vectors.push(&local * &full);
            }
        }
    }
    OrthogonalBasis::new(dims, vectors)
}

fn basis_from_unitaries_or_product(d: usize) -> Vec<ComplexMatrix> {
    if d == 1 {
        return vec![ComplexMatrix::identity(1)];
    }
    basis_from_unitaries(&pauli_basis_unitaries(d))
        .expect("generalized Bell basis")
        .vectors()
        .to_vec()
}

/// 6x6 semicausal basis with Alice subspaces of dimensions 3, 2 and 1.
pub fn nested_partition_basis(seed: u64) -> OrthogonalBasis {
    semicausal_basis(BiDims::new(6, 6).expect("6x6"), &[3, 2, 1], &mut rng(seed))
        .expect("valid subspace split")
}

/// 6x6 causal basis with three 2-dimensional blocks per side.
pub fn grid_structure_basis(seed: u64) -> OrthogonalBasis {
    causal_basis(BiDims::new(6, 6).expect("6x6"), 2, &mut rng(seed)).expect("2 divides 6")
}

/// A Haar-random orthonormal basis.
pub fn random_basis(dims: BiDims, rng: &mut impl Rng) -> OrthogonalBasis {
    OrthogonalBasis::from_unitary(&haar_unitary(dims.total(), rng), dims).expect("unitary columns")
}

/// Product basis `|i>_A (x) |b_(i,j)>_B` whose Bob basis depends on Alice's
/// index: Bob cannot signal Alice, but Alice signals Bob when `nb > 1`.
pub fn conditional_product_basis(dims: BiDims, rng: &mut impl Rng) -> OrthogonalBasis {
    let u_a = haar_unitary(dims.dim_a, rng);
    let mut vectors = Vec::with_capacity(dims.total());
    for i in 0..dims.dim_a {
        let u_b = haar_unitary(dims.dim_b, rng);
        for j in 0..dims.dim_b {
            vectors.push(tensor_product(&u_a.column(i), &u_b.column(j)));
        }
    }
    OrthogonalBasis::new(dims, vectors).expect("orthonormal")
}

/// A labelled mix of random and structured bases with local dimensions in
/// `{2, 3, 4}`, covering acausal, one-way and causal cases.
pub fn criterion_corpus(seed: u64) -> Vec<(String, OrthogonalBasis)> {
    let mut r = rng(seed);
    let mut out: Vec<(String, OrthogonalBasis)> = vec![
        ("bell".into(), bell_basis()),
        ("one_way".into(), one_way_basis()),
        ("one_way_swapped".into(), one_way_basis().swap_parties()),
        (
            "twisted_identity".into(),
            twisted_partition_basis(&ComplexMatrix::identity(2)).expect("unitary"),
        ),
        (
            "twisted_hadamard".into(),
            twisted_partition_basis(&hadamard()).expect("unitary"),
        ),
        ("mismatch".into(), mismatch_basis()),
    ];
    let sizes = [2, 3, 4];
    for &na in &sizes {
        for &nb in &sizes {
            let dims = BiDims::new(na, nb).expect("positive");
            out.push((format!("random_{na}x{nb}"), random_basis(dims, &mut r)));
            out.push((
                format!("conditional_{na}x{nb}"),
                conditional_product_basis(dims, &mut r),
            ));
            out.push((
                format!("conditional_swapped_{na}x{nb}"),
                conditional_product_basis(dims.swapped(), &mut r).swap_parties(),
            ));
            out.push((
                format!("product_{na}x{nb}"),
                causal_basis(dims, 1, &mut r).expect("d = 1"),
            ));
        }
    }
    let splits: [(usize, usize, &[usize]); 6] = [
        (2, 2, &[2]),
        (3, 2, &[2, 1]),
        (3, 3, &[2, 1]),
        (4, 3, &[3, 1]),
        (4, 4, &[2, 2]),
        (4, 2, &[1, 2, 1]),
    ];
    for (na, nb, split) in splits {
        let dims = BiDims::new(na, nb).expect("positive");
        out.push((
            format!("semicausal_{na}x{nb}_{split:?}"),
            semicausal_basis(dims, split, &mut r).expect("valid split"),
        ));
    }
    for (na, nb, d) in [
        (2, 2, 2),
        (4, 4, 2),
        (2, 4, 2),
        (4, 2, 2),
        (3, 3, 3),
        (4, 4, 4),
    ] {
        let dims = BiDims::new(na, nb).expect("positive");
        out.push((
            format!("causal_{na}x{nb}_d{d}"),
            causal_basis(dims, d, &mut r).expect("d divides"),
        ));
    }
    out
}
