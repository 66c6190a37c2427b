use num_complex::Complex64;

use super::circuit::{GateKind, GateOp};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Pure state of a qubit register. Qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `qubits` qubits.
    pub fn zero(qubits: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << qubits];
        amplitudes[0] = ONE;
        StateVector { qubits, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        Ok(StateVector {
            qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate` with the already resolved rotation angle (ignored for CNOT).
    pub fn apply(&mut self, gate: &GateOp, angle: f64) -> Result<()> {
        gate.validate(self.qubits)?;
        let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        match gate.kind {
            GateKind::Rx => self.apply_single(
                gate.target,
                [[Complex64::new(c, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]],
            ),
            GateKind::Ry => self.apply_single(
                gate.target,
                [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]],
            ),
            GateKind::Rz => self.apply_single(
                gate.target,
                [[Complex64::new(c, -s), ZERO], [ZERO, Complex64::new(c, s)]],
            ),
            GateKind::Cnot => {
                // validated above
                let control = gate.control.unwrap_or_default();
                self.apply_cnot(control, gate.target)
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, target: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
    }

    /// Applies a Pauli (0 = I, 1 = X, 2 = Y, 3 = Z) to one qubit.
    pub(crate) fn apply_pauli(&mut self, qubit: usize, pauli: u8) {
        let bit = 1usize << qubit;
        let i_unit = Complex64::new(0.0, 1.0);
        match pauli {
            1 => {
                for i in 0..self.amplitudes.len() {
                    if i & bit == 0 {
                        self.amplitudes.swap(i, i | bit);
                    }
                }
            }
            2 => {
                for i in 0..self.amplitudes.len() {
                    if i & bit == 0 {
                        let a0 = self.amplitudes[i];
                        let a1 = self.amplitudes[i | bit];
                        self.amplitudes[i] = -i_unit * a1;
                        self.amplitudes[i | bit] = i_unit * a0;
                    }
                }
            }
            3 => {
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            _ => {}
        }
    }

    /// Probability of reading 1 on `qubit`.
    pub fn prob_one(&self, qubit: usize) -> f64 {
        let bit = 1usize << qubit;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// ⟨Z⟩ on `qubit`, with |0⟩ ↦ +1.
    pub fn expectation_z(&self, qubit: usize) -> f64 {
        1.0 - 2.0 * self.prob_one(qubit)
    }
}

/// Functional form of [`StateVector::apply`].
pub fn apply_gate(mut state: StateVector, gate: &GateOp, angle: f64) -> Result<StateVector> {
    state.apply(gate, angle)?;
    Ok(state)
}
