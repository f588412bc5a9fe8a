//! One-call classification of a channel or basis into the causality and
//! localizability hierarchy, with the evidence behind every verdict.

use serde::{Deserialize, Serialize};

use crate::causality::{
    semicausal_deviation, signaling_search, unitary_product_test, Direction, SignalWitness,
};
use crate::channel::{KrausChannel, TpReport};
use crate::error::{Error, Result};
use crate::fixtures::Artifact;
use crate::games::{channel_game_value, game_certificate, GameCertificate};
use crate::localizability::{
    extract_unitaries, pauli_basis_unitaries, projective_group_test, search_eigenstate_closure,
    ObstructionCertificate,
};
use crate::measurement::{
    causal_structure, constructive_witness, measurement_channel, partition_structure,
    reduced_state_dichotomy_with_tol, ConstructiveWitness, OrthogonalBasis,
};
use crate::tensor::{hermitian_spectrum, schmidt_decomposition, BiDims, Side, TOL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub seed: u64,
    /// Random restarts for the signaling search.
    pub budget: usize,
    /// Base tolerance for matrix comparisons.
    pub tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            seed: 0,
            budget: 32,
            tol: TOL,
        }
    }
}

/// The test that settled a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Reduced states of basis vectors on the receiver are equal or orthogonal.
    ReducedStateDichotomy,
    /// The Choi state's receiver-plus-reference marginal is a product.
    ChoiMarginal,
    /// The unitary has operator Schmidt rank one.
    ProductUnitary,
    /// An explicit protocol implements the channel.
    Construction,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Witness {
    Constructive(ConstructiveWitness),
    Search(SignalWitness),
}

impl Witness {
    pub fn separation(&self) -> f64 {
        match self {
            Witness::Constructive(w) => w.separation,
            Witness::Search(w) => w.separation,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DirectionReport {
    pub direction: Direction,
    pub semicausal: bool,
    pub criterion: Criterion,
    /// Choi marginal deviation, reported for every input.
    pub choi_deviation: f64,
    /// Outcome of the Choi test, which must agree with `semicausal`.
    pub choi_semicausal: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InputDescriptor {
    pub kind: String,
    pub dim_a: usize,
    pub dim_b: usize,
    pub kraus_count: usize,
    /// Set when a Kraus input is a complete orthogonal measurement.
    pub complete_measurement: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StructureReport {
    /// Dimensions of Alice's subspaces when Bob cannot signal Alice.
    pub alice_subspaces: Option<Vec<usize>>,
    /// Dimensions of Bob's subspaces when Alice cannot signal Bob.
    pub bob_subspaces: Option<Vec<usize>>,
    /// `(d, rA, rB)` of the causal grid.
    pub grid: Option<(usize, usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Certificate {
    Obstruction(ObstructionCertificate),
    Game(GameCertificate),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Localizability {
    /// A no-communication protocol is known.
    LocalizableByConstruction { construction: String },
    /// At least one certificate rules out a no-communication protocol.
    NotLocalizable { certificates: Vec<Certificate> },
    /// Not causal, hence not localizable; the witness is in the direction reports.
    NotCausal,
    /// Causal, but neither a protocol nor an obstruction was found.
    Undetermined,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    pub input: InputDescriptor,
    pub tp: TpReport,
    pub b_to_a: DirectionReport,
    pub a_to_b: DirectionReport,
    pub causal: bool,
    /// One-way protocol from Alice to Bob, when one is known.
    pub semilocalizable: Option<Criterion>,
    pub structure: StructureReport,
    pub localizability: Localizability,
    /// CHSH-style game value for two-qubit channels.
    pub game_value: Option<f64>,
}

/// If every Kraus operator is a rank-one projector and they sum to `I`,
/// returns the basis they measure.
pub fn as_complete_measurement(ch: &KrausChannel) -> Option<OrthogonalBasis> {
    let dims = ch.dims();
    if ch.kraus().len() != dims.total() {
        return None;
    }
    let mut vectors = Vec::with_capacity(dims.total());
    for k in ch.kraus() {
        if !k.is_hermitian(TOL) || !(k * k).approx_eq(k, TOL) {
            return None;
        }
        let spec = hermitian_spectrum(k).ok()?;
        if (spec.values[0] - 1.0).abs() > TOL || spec.values.get(1).is_some_and(|v| v.abs() > TOL) {
            return None;
        }
        vectors.push(spec.vector(0));
    }
    OrthogonalBasis::new(dims, vectors).ok()
}

fn choi_test(ch: &KrausChannel, direction: Direction, tol: f64) -> (f64, bool) {
    let dev = semicausal_deviation(ch, direction);
    let n = ch.dims().total() as f64;
    (dev, dev < tol * n * n)
}

fn receiver(direction: Direction) -> Side {
    match direction {
        Direction::BtoA => Side::A,
        Direction::AtoB => Side::B,
    }
}

fn search_witness(
    ch: &KrausChannel,
    direction: Direction,
    opts: &ClassifyOptions,
) -> Option<Witness> {
    signaling_search(ch, direction, opts.budget, opts.seed).map(Witness::Search)
}

fn basis_direction(
    basis: &OrthogonalBasis,
    ch: &KrausChannel,
    direction: Direction,
    opts: &ClassifyOptions,
) -> DirectionReport {
    let side = receiver(direction);
    let dichotomy = reduced_state_dichotomy_with_tol(basis, side, opts.tol);
    let (choi_deviation, choi_semicausal) = choi_test(ch, direction, opts.tol);
    let witness = (!dichotomy.semicausal).then(|| {
        constructive_witness(basis, side)
            .ok()
            .filter(|w| w.separation > crate::causality::WITNESS_THRESHOLD)
            .map(Witness::Constructive)
            .or_else(|| search_witness(ch, direction, opts))
    });
    DirectionReport {
        direction,
        semicausal: dichotomy.semicausal,
        criterion: Criterion::ReducedStateDichotomy,
        choi_deviation,
        choi_semicausal,
        witness: witness.flatten(),
    }
}

fn channel_direction(
    ch: &KrausChannel,
    direction: Direction,
    opts: &ClassifyOptions,
) -> DirectionReport {
    let (choi_deviation, choi_semicausal) = choi_test(ch, direction, opts.tol);
    DirectionReport {
        direction,
        semicausal: choi_semicausal,
        criterion: Criterion::ChoiMarginal,
        choi_deviation,
        choi_semicausal,
        witness: if choi_semicausal {
            None
        } else {
            search_witness(ch, direction, opts)
        },
    }
}

fn is_pauli_bell(basis: &OrthogonalBasis) -> bool {
    let Ok(us) = extract_unitaries(basis) else {
        return false;
    };
    if us.d < 2 {
        return false;
    }
    pauli_basis_unitaries(us.d)
        .iter()
        .all(|p| us.find_up_to_phase(p).is_some())
}

fn is_product_basis(basis: &OrthogonalBasis) -> bool {
    basis
        .vectors()
        .iter()
        .all(|v| schmidt_decomposition(v, basis.dims()).is_ok_and(|s| s.rank(TOL) == 1))
}

/// `K = c U_A (x) U_B` for every Kraus operator: a shared random choice of
/// local unitaries implements the channel.
fn is_product_unitary_mixture(ch: &KrausChannel) -> bool {
    let dims = ch.dims();
    ch.kraus().iter().all(|k| {
        let norm = k.frobenius_norm();
        if norm < TOL {
            return true;
        }
        let u = k.scale_real((dims.total() as f64).sqrt() / norm);
        u.is_unitary(1e-8) && unitary_product_test(&u, dims).is_ok_and(|v| v.is_product)
    })
}

fn basis_localizability(
    basis: &OrthogonalBasis,
    ch: &KrausChannel,
    causal: bool,
) -> Localizability {
    if !causal {
        return Localizability::NotCausal;
    }
    if is_product_basis(basis) {
        return Localizability::LocalizableByConstruction {
            construction: "product basis: each party measures locally".into(),
        };
    }
    if is_pauli_bell(basis) {
        return Localizability::LocalizableByConstruction {
            construction: "generalized Pauli twirl on a shared maximally entangled basis".into(),
        };
    }
    let mut certificates = Vec::new();
    if let Ok(us) = extract_unitaries(basis) {
        if let Ok(Some(c)) = projective_group_test(&us) {
            certificates.push(Certificate::Obstruction(c));
        }
    }
    if let Some(c) = search_eigenstate_closure(ch, basis.vectors()) {
        certificates.push(Certificate::Obstruction(c));
    }
    if certificates.is_empty() {
        Localizability::Undetermined
    } else {
        Localizability::NotLocalizable { certificates }
    }
}

fn structure_of(basis: &OrthogonalBasis, b_to_a: bool, a_to_b: bool) -> StructureReport {
    let dims_of = |side| partition_structure(basis, side).ok().map(|p| p.dims());
    StructureReport {
        alice_subspaces: if b_to_a { dims_of(Side::A) } else { None },
        bob_subspaces: if a_to_b { dims_of(Side::B) } else { None },
        grid: if b_to_a && a_to_b {
            causal_structure(basis).ok().map(|g| (g.d, g.r_a, g.r_b))
        } else {
            None
        },
    }
}

fn game_value(ch: &KrausChannel) -> Option<f64> {
    (ch.dims() == BiDims::QUBITS)
        .then(|| channel_game_value(ch).ok())
        .flatten()
}

fn classify_basis(
    basis: &OrthogonalBasis,
    input: InputDescriptor,
    opts: &ClassifyOptions,
) -> ClassificationReport {
    let ch = measurement_channel(basis);
    let b_to_a = basis_direction(basis, &ch, Direction::BtoA, opts);
    let a_to_b = basis_direction(basis, &ch, Direction::AtoB, opts);
    let causal = b_to_a.semicausal && a_to_b.semicausal;
    let structure = structure_of(basis, b_to_a.semicausal, a_to_b.semicausal);
    ClassificationReport {
        input,
        tp: ch.validate(),
        semilocalizable: b_to_a.semicausal.then_some(Criterion::Construction),
        causal,
        structure,
        localizability: basis_localizability(basis, &ch, causal),
        game_value: game_value(&ch),
        b_to_a,
        a_to_b,
    }
}

fn classify_channel(
    ch: &KrausChannel,
    input: InputDescriptor,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    let tp = ch.validate();
    if !tp.tp {
        return Err(Error::NotTracePreserving {
            deviation: tp.deviation,
        });
    }
    if let Some(basis) = as_complete_measurement(ch) {
        return Ok(classify_basis(
            &basis,
            InputDescriptor {
                complete_measurement: true,
                ..input
            },
            opts,
        ));
    }
    let b_to_a = channel_direction(ch, Direction::BtoA, opts);
    let a_to_b = channel_direction(ch, Direction::AtoB, opts);
    let causal = b_to_a.semicausal && a_to_b.semicausal;
    let unitary = ch.kraus().len() == 1 && ch.kraus()[0].is_unitary(1e-8);
    let (b_to_a, a_to_b) = if unitary {
        let product = unitary_product_test(&ch.kraus()[0], ch.dims()).is_ok_and(|v| v.is_product);
        let relabel = |mut r: DirectionReport| {
            r.criterion = Criterion::ProductUnitary;
            r.semicausal = product;
            r
        };
        (relabel(b_to_a), relabel(a_to_b))
    } else {
        (b_to_a, a_to_b)
    };
    let value = game_value(ch);
    let localizability = if !causal {
        Localizability::NotCausal
    } else if is_product_unitary_mixture(ch) {
        Localizability::LocalizableByConstruction {
            construction: "shared random choice of product unitaries".into(),
        }
    } else {
        match game_certificate(ch).ok().flatten() {
            Some(c) => Localizability::NotLocalizable {
                certificates: vec![Certificate::Game(c)],
            },
            None => Localizability::Undetermined,
        }
    };
    Ok(ClassificationReport {
        input,
        tp,
        causal,
        semilocalizable: None,
        structure: StructureReport::default(),
        localizability,
        game_value: value,
        b_to_a,
        a_to_b,
    })
}

pub fn classify(artifact: &Artifact, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let dims = artifact.dims();
    match artifact {
        Artifact::Basis(b) => Ok(classify_basis(
            b,
            InputDescriptor {
                kind: "basis".into(),
                dim_a: dims.dim_a,
                dim_b: dims.dim_b,
                kraus_count: b.len(),
                complete_measurement: true,
            },
            opts,
        )),
        Artifact::Channel(ch) => classify_channel(
            ch,
            InputDescriptor {
                kind: "channel".into(),
                dim_a: dims.dim_a,
                dim_b: dims.dim_b,
                kraus_count: ch.kraus().len(),
                complete_measurement: false,
            },
            opts,
        ),
    }
}

impl ClassificationReport {
    /// Checks that every negative verdict carries evidence and that the two
    /// semicausality tests agree on complete measurements.
    pub fn check_consistency(&self) -> Result<()> {
        for r in [&self.b_to_a, &self.a_to_b] {
            if !r.semicausal && r.witness.is_none() {
                return Err(Error::Numerical(format!(
                    "{:?} is open but no signaling witness was found",
                    r.direction
                )));
            }
            if r.criterion == Criterion::ReducedStateDichotomy && r.semicausal != r.choi_semicausal
            {
                return Err(Error::Numerical(format!(
                    "dichotomy and Choi tests disagree for {:?}",
                    r.direction
                )));
            }
        }
        if let Localizability::NotLocalizable { certificates } = &self.localizability {
            if certificates.is_empty() {
                return Err(Error::Numerical(
                    "non-localizable verdict without certificate".into(),
                ));
            }
        }
        Ok(())
    }
}
