//! Channels that are localizable by construction: group twirls and
//! stabilizer measurements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::tensor::{tensor_all, tensor_product, BiDims, ComplexMatrix, C64, I, ONE, TOL, ZERO};

/// A finite group of unitaries modulo phase, one canonical representative
/// per class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectiveUnitaryGroup {
    elements: Vec<ComplexMatrix>,
}

/// Entries smaller than this are skipped when choosing the phase reference.
const PHASE_CUTOFF: f64 = 1e-6;

fn canonical(mut u: ComplexMatrix) -> ComplexMatrix {
    u.fix_phase(PHASE_CUTOFF);
    u
}

fn same_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    let d = a.rows() as f64;
    (a.hs_inner(b).norm() - d).abs() < TOL * d.max(1.0) * 10.0
}

impl ProjectiveUnitaryGroup {
    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn trivial(dim: usize) -> Self {
        ProjectiveUnitaryGroup {
            elements: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Index of the element equal to `u` up to phase.
    pub fn position(&self, u: &ComplexMatrix) -> Option<usize> {
        self.elements.iter().position(|g| same_up_to_phase(g, u))
    }
}

/// Breadth-first closure of `generators` under multiplication modulo phase.
pub fn close_group(
    generators: &[ComplexMatrix],
    max_order: usize,
) -> Result<ProjectiveUnitaryGroup> {
    let dim = generators
        .first()
        .map(|g| g.rows())
        .ok_or_else(|| Error::InvalidInput("no generators".into()))?;
    for g in generators {
        if g.shape() != (dim, dim) {
            return Err(Error::dims(
                format!("{dim}x{dim}"),
                format!("{:?}", g.shape()),
            ));
        }
        let deviation = g.unitarity_deviation();
        if deviation > TOL * dim as f64 {
            return Err(Error::NotUnitary { deviation });
        }
    }
    let mut group = ProjectiveUnitaryGroup::trivial(dim);
    let mut frontier = 0;
    while frontier < group.elements.len() {
        let current = group.elements[frontier].clone();
        frontier += 1;
        for g in generators {
            let next = g * &current;
            if group.position(&next).is_none() {
                if group.elements.len() == max_order {
                    return Err(Error::GroupOverflow { max_order });
                }
                group.elements.push(canonical(next));
            }
        }
    }
    Ok(group)
}

/// `rho -> (1/|G|) sum_g U(g) rho U(g)^dagger`.
pub fn twirl_channel(group: &ProjectiveUnitaryGroup, dims: BiDims) -> Result<KrausChannel> {
    if group.dim() != dims.total() {
        return Err(Error::dims(dims.total(), group.dim()));
    }
    let w = 1.0 / (group.order() as f64).sqrt();
    let kraus = group.elements.iter().map(|u| u.scale_real(w)).collect();
    KrausChannel::new(dims, kraus)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// `Y = iXZ`.
    pub fn matrix(self) -> ComplexMatrix {
        let m = |e: [C64; 4]| ComplexMatrix::from_vec(2, 2, e.to_vec()).expect("2x2");
        match self {
            PauliLetter::I => ComplexMatrix::identity(2),
            PauliLetter::X => m([ZERO, ONE, ONE, ZERO]),
            PauliLetter::Y => m([ZERO, -I, I, ZERO]),
            PauliLetter::Z => m([ONE, ZERO, ZERO, -ONE]),
        }
    }

    /// `(x, z)` bits of the symplectic representation.
    fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// A signed tensor product of single-qubit Paulis, e.g. `+XXI`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<PauliLetter>,
    negative: bool,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>, sign: i8) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidPauli("empty Pauli string".into()));
        }
        let negative = match sign {
            1 => false,
            -1 => true,
            s => {
                return Err(Error::InvalidPauli(format!(
                    "sign must be +1 or -1, got {s}"
                )))
            }
        };
        Ok(PauliString { letters, negative })
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let factors: Vec<ComplexMatrix> = self.letters.iter().map(|l| l.matrix()).collect();
        tensor_all(&factors).scale_real(self.sign() as f64)
    }

    fn symplectic(&self) -> Vec<bool> {
        let (x, z): (Vec<bool>, Vec<bool>) = self.letters.iter().map(|l| l.bits()).unzip();
        x.into_iter().chain(z).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| {
                let ((ax, az), (bx, bz)) = (a.bits(), b.bits());
                (ax && bz) ^ (az && bx)
            })
            .count();
        anti % 2 == 0
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sign, rest) = match s.chars().next() {
            Some('+') => (1, &s[1..]),
            Some('-') => (-1, &s[1..]),
            _ => (1, s),
        };
        let letters = rest
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(PauliLetter::I),
                'X' => Ok(PauliLetter::X),
                'Y' => Ok(PauliLetter::Y),
                'Z' => Ok(PauliLetter::Z),
                other => Err(Error::InvalidPauli(format!(
                    "unknown letter {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters, sign)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for l in &self.letters {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rank of a set of bit vectors over GF(2).
fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x ^= p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn check_stabilizer_generators(generators: &[PauliString], dims: BiDims) -> Result<usize> {
    let n = generators
        .first()
        .map(|g| g.num_qubits())
        .ok_or_else(|| Error::InvalidInput("no stabilizer generators".into()))?;
    if let Some(g) = generators.iter().find(|g| g.num_qubits() != n) {
        return Err(Error::InvalidPauli(format!(
            "{g} does not act on {n} qubits"
        )));
    }
    if dims.total() != 1 << n {
        return Err(Error::dims(dims.total(), 1usize << n));
    }
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            if !generators[i].commutes_with(&generators[j]) {
                return Err(Error::NonCommuting(i, j));
            }
        }
    }
    let rank = gf2_rank(generators.iter().map(|g| g.symplectic()).collect());
    if rank < generators.len() {
        return Err(Error::DependentGenerators);
    }
    Ok(n)
}

/// Projects onto the joint eigenspaces of commuting, independent Pauli
/// strings: `rho -> sum_r E_r rho E_r` with `E_r = prod_i (I + r_i P_i) / 2`.
pub fn stabilizer_channel(generators: &[PauliString], dims: BiDims) -> Result<KrausChannel> {
    let n = check_stabilizer_generators(generators, dims)?;
    let dim = 1 << n;
    let id = ComplexMatrix::identity(dim);
    let paulis: Vec<ComplexMatrix> = generators.iter().map(|g| g.matrix()).collect();
    let k = paulis.len();
    let projectors = (0..1usize << k)
        .map(|signs| {
            paulis.iter().enumerate().fold(id.clone(), |acc, (i, p)| {
                let s = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
                let factor = (&id + &p.scale_real(s)).scale_real(0.5);
                &acc * &factor
            })
        })
        .collect();
    KrausChannel::new(dims, projectors)
}

/// The group generated by the given Pauli strings, modulo phase.
pub fn pauli_group(generators: &[PauliString]) -> Result<ProjectiveUnitaryGroup> {
    let mats: Vec<ComplexMatrix> = generators.iter().map(|g| g.matrix()).collect();
    let max = 1usize << (2 * generators.first().map_or(0, |g| g.num_qubits()));
    close_group(&mats, max.max(1))
}

/// Single-qubit generators of the tetrahedral rotation group: a half turn
/// about x and a third of a turn about (1,1,1).
pub fn tetrahedral_generators() -> [ComplexMatrix; 2] {
    let x = PauliLetter::X.matrix();
    let sum = &(&x + &PauliLetter::Y.matrix()) + &PauliLetter::Z.matrix();
    let g3 = &ComplexMatrix::identity(2).scale_real(0.5) - &sum.scale(C64::new(0.0, 0.5));
    [x, g3]
}

/// The order-12 group `{g (x) g}` over tetrahedral rotations `g`.
pub fn werner_group() -> ProjectiveUnitaryGroup {
    let gens: Vec<ComplexMatrix> = tetrahedral_generators()
        .iter()
        .map(|g| tensor_product(g, g))
        .collect();
    close_group(&gens, 12).expect("tetrahedral group has order 12")
}

/// Twirl by the tetrahedral `g (x) g`, mapping any two-qubit state to the
/// Werner state with the same singlet fidelity.
pub fn werner_twirl() -> KrausChannel {
    twirl_channel(&werner_group(), BiDims::QUBITS).expect("two-qubit group")
}

/// Twirl by `{I, XX, YY, ZZ}`, which equals the Bell measurement channel.
pub fn bell_twirl() -> KrausChannel {
    let gens: Vec<PauliString> = ["XX", "ZZ"]
        .iter()
        .map(|s| s.parse().expect("valid"))
        .collect();
    twirl_channel(&pauli_group(&gens).expect("abelian"), BiDims::QUBITS).expect("two qubits")
}

/// `(|01> - |10>) / sqrt 2`.
pub fn singlet() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(4, 1, &[0.0, s, -s, 0.0])
}

/// `F |psi-><psi-| + (1 - F)/3 (I - |psi-><psi-|)`.
pub fn werner_state(f: f64) -> ComplexMatrix {
    let p = singlet().projector();
    let rest = &ComplexMatrix::identity(4) - &p;
    &p.scale_real(f) + &rest.scale_real((1.0 - f) / 3.0)
}

/// `<psi-| rho |psi->`.
pub fn singlet_fidelity(rho: &ComplexMatrix) -> f64 {
    let s = singlet();
    (&(&s.adjoint() * rho) * &s)[(0, 0)].re
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrepReport {
    /// Largest `||[E(rho), U(g)]||` over matrix-unit inputs and group elements.
    pub max_commutator: f64,
    /// Choi distance between `E o E` and `E`.
    pub idempotence_deviation: f64,
    pub commutes: bool,
    pub idempotent: bool,
}

impl IrrepReport {
    pub fn holds(&self) -> bool {
        self.commutes && self.idempotent
    }
}

/// Checks that twirl outputs commute with the group and that the twirl is a
/// projection. Fails if `ch` is not the twirl of `group`.
pub fn irrep_structure_check(
    group: &ProjectiveUnitaryGroup,
    ch: &KrausChannel,
) -> Result<IrrepReport> {
    let dims = ch.dims();
    let expected = twirl_channel(group, dims)?;
    let dist = expected.choi().distance(&ch.choi());
    if dist > TOL * dims.total() as f64 {
        return Err(Error::Precondition(format!(
            "channel is not the twirl of the group (Choi distance {dist:.3e})"
        )));
    }
    let n = dims.total();
    let mut max_commutator: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let unit =
                ComplexMatrix::from_fn(n, n, |r, c| if (r, c) == (i, j) { ONE } else { ZERO });
            let out = ch.apply(&unit)?;
            for u in group.elements() {
                max_commutator = max_commutator.max(out.commutator(u).frobenius_norm());
            }
        }
    }
    let twice = KrausChannel::compose(ch, ch)?;
    let idempotence_deviation = twice.choi().distance(&ch.choi());
    let tol = TOL * n as f64;
    Ok(IrrepReport {
        max_commutator,
        idempotence_deviation,
        commutes: max_commutator < tol,
        idempotent: idempotence_deviation < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causality::{semicausal_test, Direction};
    use crate::localizability::basis_from_unitaries;
    use crate::localizability::pauli_basis_unitaries;
    use crate::measurement::measurement_channel;

    fn paulis(list: &[&str]) -> Vec<PauliString> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn group_orders() {
        let x = PauliLetter::X.matrix();
        assert_eq!(close_group(&[x], 8).unwrap().order(), 2);
        assert_eq!(pauli_group(&paulis(&["XX", "ZZ"])).unwrap().order(), 4);
        assert_eq!(werner_group().order(), 12);
        let [_, g3] = tetrahedral_generators();
        assert!(g3.is_unitary(1e-12));
        assert!(matches!(
            close_group(&tetrahedral_generators(), 5),
            Err(Error::GroupOverflow { max_order: 5 })
        ));
    }

    #[test]
    fn rejects_non_unitary_generator() {
        let m = ComplexMatrix::diag(&[ONE, C64::new(2.0, 0.0)]);
        assert!(matches!(
            close_group(&[m], 4),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn y_is_i_x_z() {
        let xz = &PauliLetter::X.matrix() * &PauliLetter::Z.matrix();
        assert!(PauliLetter::Y.matrix().approx_eq(&xz.scale(I), 1e-15));
    }

    #[test]
    fn pauli_string_parsing() {
        let p: PauliString = "-ZIY".parse().unwrap();
        assert_eq!(p.sign(), -1);
        assert_eq!(p.to_string(), "-ZIY");
        assert_eq!("XX".parse::<PauliString>().unwrap().to_string(), "+XX");
        assert!("+".parse::<PauliString>().is_err());
        assert!("+XQ".parse::<PauliString>().is_err());
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"-ZIY\"");
    }

    #[test]
    fn stabilizer_checks() {
        assert!(matches!(
            stabilizer_channel(&paulis(&["XI", "ZI"]), BiDims::QUBITS),
            Err(Error::NonCommuting(0, 1))
        ));
        assert!(matches!(
            stabilizer_channel(&paulis(&["XX", "ZZ", "-YY"]), BiDims::QUBITS),
            Err(Error::DependentGenerators)
        ));
    }

    #[test]
    fn bell_stabilizer_is_bell_measurement() {
        let bell = measurement_channel(&basis_from_unitaries(&pauli_basis_unitaries(2)).unwrap());
        let stab = stabilizer_channel(&paulis(&["XX", "ZZ"]), BiDims::QUBITS).unwrap();
        assert!(stab.equivalent(&bell, 1e-9));
        assert!(bell_twirl().equivalent(&bell, 1e-9));
    }

    #[test]
    fn single_z_dephases() {
        let dims = BiDims::new(2, 1).unwrap();
        let ch = stabilizer_channel(&paulis(&["Z"]), dims).unwrap();
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let out = ch.apply(&plus).unwrap();
        assert!(out.approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-12));
    }

    #[test]
    fn parity_projection_keeps_in_sector_coherence() {
        let ch = stabilizer_channel(&paulis(&["ZZ"]), BiDims::QUBITS).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi_p = ComplexMatrix::from_real(4, 1, &[s, 0.0, 0.0, s]);
        let phi_m = ComplexMatrix::from_real(4, 1, &[s, 0.0, 0.0, -s]);
        let psi_p = ComplexMatrix::from_real(4, 1, &[0.0, s, s, 0.0]);
        // Oracle: E_+ = diag(1,0,0,1), E_- = diag(0,1,1,0).
        let e_plus = ComplexMatrix::diag(&[ONE, ZERO, ZERO, ONE]);
        let e_minus = ComplexMatrix::diag(&[ZERO, ONE, ONE, ZERO]);
        for (x, y) in [(&phi_p, &phi_m), (&phi_p, &psi_p)] {
            let coherence = x.outer(y);
            let expected =
                &(&(&e_plus * &coherence) * &e_plus) + &(&(&e_minus * &coherence) * &e_minus);
            assert!(ch.apply(&coherence).unwrap().approx_eq(&expected, 1e-12));
        }
        assert!(ch.apply(&phi_p.outer(&phi_m)).unwrap().frobenius_norm() > 0.99);
        assert!(ch.apply(&phi_p.outer(&psi_p)).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn werner_outputs() {
        let ch = werner_twirl();
        let singlet_proj = singlet().projector();
        assert!(ch
            .apply(&singlet_proj)
            .unwrap()
            .approx_eq(&singlet_proj, 1e-12));
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(ch.apply(&mixed).unwrap().approx_eq(&mixed, 1e-12));
        let zero = ComplexMatrix::basis_ket(4, 0).projector();
        assert!(ch
            .apply(&zero)
            .unwrap()
            .approx_eq(&werner_state(0.0), 1e-12));
    }

    #[test]
    fn werner_twirl_matches_direct_sum() {
        // Oracle: enumerate words in the generators until twelve distinct
        // classes appear, then average without using close_group.
        let gens = tetrahedral_generators();
        let mut reps: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(2)];
        let mut i = 0;
        while i < reps.len() {
            for g in &gens {
                let next = g * &reps[i];
                if !reps
                    .iter()
                    .any(|r| (r.hs_inner(&next).norm() - 2.0).abs() < 1e-9)
                {
                    reps.push(next);
                }
            }
            i += 1;
        }
        assert_eq!(reps.len(), 12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi_p = ComplexMatrix::from_real(4, 1, &[s, 0.0, 0.0, s]).projector();
        let mut direct = ComplexMatrix::zeros(4, 4);
        for g in &reps {
            let gg = tensor_product(g, g);
            direct = &direct + &gg.conjugate(&phi_p).scale_real(1.0 / 12.0);
        }
        assert!(werner_twirl()
            .apply(&phi_p)
            .unwrap()
            .approx_eq(&direct, 1e-12));
        assert!(direct.approx_eq(&werner_state(0.0), 1e-12));
    }

    #[test]
    fn twirls_are_projections_onto_commutant() {
        let bell_group = pauli_group(&paulis(&["XX", "ZZ"])).unwrap();
        for (g, ch) in [
            (bell_group, bell_twirl()),
            (werner_group(), werner_twirl()),
            (
                ProjectiveUnitaryGroup::trivial(4),
                KrausChannel::identity(BiDims::QUBITS),
            ),
        ] {
            let report = irrep_structure_check(&g, &ch).unwrap();
            assert!(report.holds(), "{report:?}");
        }
        let err = irrep_structure_check(&werner_group(), &bell_twirl());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn product_twirls_are_causal() {
        for ch in [bell_twirl(), werner_twirl()] {
            assert!(semicausal_test(&ch, Direction::BtoA));
            assert!(semicausal_test(&ch, Direction::AtoB));
        }
    }
}
