use super::register::{BellLabel, QubitRegister};
use crate::channel::KrausChannel;
use crate::tensor::{BiDims, ComplexMatrix};

// Qubit order: A, B, R, S, R', S'.
const A: usize = 0;
const B: usize = 1;
const R: usize = 2;
const S: usize = 3;
const R2: usize = 4;
const S2: usize = 5;

/// The 64x4 isometry from `AB` into `AB RS R'S'`: both ancilla pairs start
/// in `|phi+>`, then `A->R`, `B->S` copy the parity and `R'->A`, `S'->B`
/// kick back the phase.
pub fn bell_circuit_isometry() -> ComplexMatrix {
    let phi = BellLabel::ALL[0].ket();
    let columns: Vec<ComplexMatrix> = (0..4)
        .map(|i| {
            let mut reg = QubitRegister::from_ket(&ComplexMatrix::basis_ket(4, i))
                .and_then(|r| r.append(&phi))
                .and_then(|r| r.append(&phi))
                .expect("qubit kets");
            reg.cnot(A, R);
            reg.cnot(B, S);
            reg.cnot(R2, A);
            reg.cnot(S2, B);
            reg.to_ket()
        })
        .collect();
    ComplexMatrix::from_columns(&columns).expect("equal-length columns")
}

/// The channel on `AB` left after tracing out the four ancillas.
pub fn bell_circuit_channel() -> KrausChannel {
    let v = bell_circuit_isometry();
    let kraus: Vec<ComplexMatrix> = (0..16)
        .map(|k| ComplexMatrix::from_fn(4, 4, |o, i| v[(o * 16 + k, i)]))
        .filter(|m| m.frobenius_norm() > 1e-12)
        .collect();
    KrausChannel::new(BiDims::QUBITS, kraus).expect("isometry slices")
}
