//! Circuit description: gates, parameter bindings and the JSON wire format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "RX")]
    Rx,
    #[serde(rename = "RY")]
    Ry,
    #[serde(rename = "RZ")]
    Rz,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        !matches!(self, GateKind::Cnot)
    }
}

/// Where a rotation gate takes its angle from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleSource {
    Feature(usize),
    Control(usize),
    Constant(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<AngleSource>,
}

impl GateOp {
    pub fn rx(target: usize, angle: AngleSource) -> Self {
        Self::rotation(GateKind::Rx, target, angle)
    }

    pub fn ry(target: usize, angle: AngleSource) -> Self {
        Self::rotation(GateKind::Ry, target, angle)
    }

    pub fn rz(target: usize, angle: AngleSource) -> Self {
        Self::rotation(GateKind::Rz, target, angle)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::Cnot,
            target,
            control: Some(control),
            angle: None,
        }
    }

    fn rotation(kind: GateKind, target: usize, angle: AngleSource) -> Self {
        GateOp {
            kind,
            target,
            control: None,
            angle: Some(angle),
        }
    }

    /// Checks the gate against a register of `qubits` qubits.
    pub fn validate(&self, qubits: usize) -> Result<()> {
        if self.target >= qubits {
            return Err(Error::QubitOutOfRange {
                index: self.target,
                qubits,
            });
        }
        match (self.kind, self.control, self.angle) {
            (GateKind::Cnot, Some(c), None) => {
                if c >= qubits {
                    Err(Error::QubitOutOfRange { index: c, qubits })
                } else if c == self.target {
                    Err(Error::InvalidCircuit(format!(
                        "CNOT control and target are both qubit {c}"
                    )))
                } else {
                    Ok(())
                }
            }
            (GateKind::Cnot, _, _) => Err(Error::InvalidCircuit(
                "CNOT needs a control qubit and no angle".into(),
            )),
            (_, None, Some(_)) => Ok(()),
            (kind, _, _) => Err(Error::InvalidCircuit(format!(
                "{kind:?} needs an angle and no control qubit"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawCircuit {
    qubits: usize,
    measured: usize,
    gates: Vec<GateOp>,
}

/// A validated parameterized circuit measured in Z on one qubit.
///
/// Feature and control counts are derived from the gate bindings; indices
/// must be dense, so every feature in `0..feature_count` is encoded by at
/// least one gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct CircuitSpec {
    qubit_count: usize,
    measured_qubit: usize,
    gates: Vec<GateOp>,
    feature_count: usize,
    control_count: usize,
    encoding_multiplicity: Vec<usize>,
}

impl CircuitSpec {
    pub fn new(qubit_count: usize, measured_qubit: usize, gates: Vec<GateOp>) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidCircuit("circuit needs at least one qubit".into()));
        }
        if qubit_count > 24 {
            return Err(Error::InvalidCircuit(format!(
                "{qubit_count} qubits is beyond the state-vector budget"
            )));
        }
        if measured_qubit >= qubit_count {
            return Err(Error::QubitOutOfRange {
                index: measured_qubit,
                qubits: qubit_count,
            });
        }
        let mut features: Vec<usize> = Vec::new();
        let mut controls: Vec<usize> = Vec::new();
        for gate in &gates {
            gate.validate(qubit_count)?;
            match gate.angle {
                Some(AngleSource::Feature(i)) => bump(&mut features, i),
                Some(AngleSource::Control(j)) => bump(&mut controls, j),
                Some(AngleSource::Constant(a)) if !a.is_finite() => {
                    return Err(Error::InvalidCircuit("constant angle is not finite".into()))
                }
                _ => {}
            }
        }
        if let Some(i) = features.iter().position(|&c| c == 0) {
            return Err(Error::InvalidCircuit(format!(
                "feature {i} is not encoded by any gate"
            )));
        }
        if let Some(j) = controls.iter().position(|&c| c == 0) {
            return Err(Error::InvalidCircuit(format!(
                "control {j} is not bound to any gate"
            )));
        }
        Ok(CircuitSpec {
            qubit_count,
            measured_qubit,
            gates,
            feature_count: features.len(),
            control_count: controls.len(),
            encoding_multiplicity: features,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn measured_qubit(&self) -> usize {
        self.measured_qubit
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn control_count(&self) -> usize {
        self.control_count
    }

    /// Number of rotation gates bound to each feature.
    pub fn encoding_multiplicity(&self) -> &[usize] {
        &self.encoding_multiplicity
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::Cnot)
            .count()
    }

    pub(crate) fn check_inputs(&self, features: &[f64], controls: &[f64]) -> Result<()> {
        crate::error::check_dim("features", self.feature_count, features.len())?;
        crate::error::check_dim("controls", self.control_count, controls.len())
    }
}

fn bump(counts: &mut Vec<usize>, index: usize) {
    if counts.len() <= index {
        counts.resize(index + 1, 0);
    }
    counts[index] += 1;
}

impl TryFrom<RawCircuit> for CircuitSpec {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        CircuitSpec::new(raw.qubits, raw.measured, raw.gates)
    }
}

impl From<CircuitSpec> for RawCircuit {
    fn from(c: CircuitSpec) -> Self {
        RawCircuit {
            qubits: c.qubit_count,
            measured: c.measured_qubit,
            gates: c.gates,
        }
    }
}
