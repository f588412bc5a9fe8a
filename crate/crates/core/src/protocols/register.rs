//! A small pure-state qubit register. Qubit 0 is the most significant bit
//! of the amplitude index.

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64, ONE, ZERO};

#[derive(Clone, Debug)]
pub struct QubitRegister {
    n: usize,
    amps: Vec<C64>,
}

/// A two-qubit Bell state labelled by its parity and phase bits:
/// `(|0,p> + (-1)^s |1,1-p>) / sqrt 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BellLabel {
    pub parity: bool,
    pub phase: bool,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel {
            parity: false,
            phase: false,
        },
        BellLabel {
            parity: false,
            phase: true,
        },
        BellLabel {
            parity: true,
            phase: false,
        },
        BellLabel {
            parity: true,
            phase: true,
        },
    ];

    /// `phi+, phi-, psi+, psi-` map to 0..4.
    pub fn index(self) -> usize {
        2 * self.parity as usize + self.phase as usize
    }

    pub fn name(self) -> &'static str {
        match (self.parity, self.phase) {
            (false, false) => "phi+",
            (false, true) => "phi-",
            (true, false) => "psi+",
            (true, true) => "psi-",
        }
    }

    pub fn ket(self) -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![ZERO; 4];
        let p = self.parity as usize;
        v[p] = C64::new(s, 0.0);
        v[2 + (1 - p)] = C64::new(if self.phase { -s } else { s }, 0.0);
        ComplexMatrix::ket(&v)
    }
}

impl std::fmt::Display for BellLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl QubitRegister {
    pub fn from_ket(v: &ComplexMatrix) -> Result<Self> {
        let len = v.rows();
        if !v.is_column() || !len.is_power_of_two() || len < 2 {
            return Err(Error::dims(
                "a 2^n-dimensional ket",
                format!("{:?}", v.shape()),
            ));
        }
        Ok(QubitRegister {
            n: len.trailing_zeros() as usize,
            amps: v.as_slice().to_vec(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn to_ket(&self) -> ComplexMatrix {
        ComplexMatrix::ket(&self.amps)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Appends the qubits of `v` after the existing ones.
    pub fn append(&self, v: &ComplexMatrix) -> Result<Self> {
        let other = QubitRegister::from_ket(v)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(QubitRegister {
            n: self.n + other.n,
            amps,
        })
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_single(&mut self, q: usize, m: &ComplexMatrix) {
        let mask = self.bit(q);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                self.amps[i | mask] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (self.bit(control), self.bit(target));
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    /// Projects qubits `(q1, q2)` onto `<pair|` and removes them. The result
    /// is unnormalized; its squared norm is the outcome probability.
    pub fn contract_pair(&self, q1: usize, q2: usize, pair: &ComplexMatrix) -> QubitRegister {
        let (b1, b2) = (self.bit(q1), self.bit(q2));
        let rest: Vec<usize> = (0..self.n).filter(|&q| q != q1 && q != q2).collect();
        let mut amps = vec![ZERO; 1 << rest.len()];
        for (i, amp) in self.amps.iter().enumerate() {
            let k = 2 * usize::from(i & b1 != 0) + usize::from(i & b2 != 0);
            let j = rest
                .iter()
                .fold(0, |acc, &q| 2 * acc + usize::from(i & self.bit(q) != 0));
            amps[j] += pair[(k, 0)].conj() * amp;
        }
        QubitRegister {
            n: rest.len(),
            amps,
        }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ONE, ZERO, ZERO, -ONE]).expect("2x2")
}

pub fn plus_ket() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 1, &[s, s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::tensor_product;

    #[test]
    fn bell_kets_are_orthonormal() {
        for a in BellLabel::ALL {
            for b in BellLabel::ALL {
                let ip = a.ket().inner(&b.ket()).norm();
                assert!((ip - if a == b { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let phi_minus = BellLabel {
            parity: false,
            phase: true,
        }
        .ket();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(phi_minus.approx_eq(&ComplexMatrix::from_real(4, 1, &[s, 0.0, 0.0, -s]), 1e-15));
    }

    #[test]
    fn gates_match_dense_operators() {
        let v = ComplexMatrix::ket(&[
            C64::new(0.1, 0.2),
            C64::new(0.3, 0.0),
            C64::new(-0.4, 0.1),
            C64::new(0.0, 0.5),
        ]);
        let mut r = QubitRegister::from_ket(&v).unwrap();
        r.apply_single(1, &pauli_z());
        r.cnot(0, 1);
        let cnot = ComplexMatrix::from_real(
            4,
            4,
            &[
                1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.,
            ],
        );
        let expected = &cnot * &(&tensor_product(&ComplexMatrix::identity(2), &pauli_z()) * &v);
        assert!(r.to_ket().approx_eq(&expected, 1e-15));
    }

    #[test]
    fn contracting_middle_pair() {
        let phi = BellLabel::ALL[0].ket();
        let one = ComplexMatrix::basis_ket(2, 1);
        let reg = QubitRegister::from_ket(&one)
            .unwrap()
            .append(&phi)
            .unwrap()
            .append(&plus_ket())
            .unwrap();
        let rest = reg.contract_pair(1, 2, &phi);
        assert!((rest.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(rest
            .to_ket()
            .approx_eq(&tensor_product(&one, &plus_ket()), 1e-15));
        assert!(reg.contract_pair(1, 2, &BellLabel::ALL[3].ket()).norm_sqr() < 1e-30);
    }
}
