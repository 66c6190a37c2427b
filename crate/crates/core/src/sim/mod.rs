//! State-vector simulation of parameterized circuits with shot sampling and
//! parametric noise.

mod circuit;
mod noise;
mod state;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;

pub use circuit::{AngleSource, CircuitSpec, GateKind, GateOp};
pub use noise::NoiseSpec;
pub use state::{apply_gate, StateVector};

use crate::error::Result;
use crate::model::Model;

/// Runs the circuit on |0…0⟩. `paulis` holds one two-qubit Pauli index
/// (0..16, 0 = identity) per CNOT, applied right after that gate.
fn run(
    circuit: &CircuitSpec,
    features: &[f64],
    controls: &[f64],
    paulis: Option<&[u8]>,
) -> StateVector {
    run_shifted(circuit, features, controls, paulis, None)
}

fn run_shifted(
    circuit: &CircuitSpec,
    features: &[f64],
    controls: &[f64],
    paulis: Option<&[u8]>,
    shift: Option<(usize, f64)>,
) -> StateVector {
    let mut state = StateVector::zero(circuit.qubit_count());
    let mut cnot_index = 0;
    for (g, gate) in circuit.gates().iter().enumerate() {
        let offset = match shift {
            Some((at, delta)) if at == g => delta,
            _ => 0.0,
        };
        let angle = offset + match gate.angle {
            Some(AngleSource::Feature(i)) => features[i],
            Some(AngleSource::Control(j)) => controls[j],
            Some(AngleSource::Constant(a)) => a,
            None => 0.0,
        };
        // the circuit was validated on construction
        state
            .apply(gate, angle)
            .expect("validated gate failed to apply");
        if gate.kind == GateKind::Cnot {
            if let Some(p) = paulis.and_then(|ps| ps.get(cnot_index)) {
                if *p != 0 {
                    state.apply_pauli(gate.control.unwrap_or_default(), p / 4);
                    state.apply_pauli(gate.target, p % 4);
                }
            }
            cnot_index += 1;
        }
    }
    state
}

/// Noiseless final state.
pub fn final_state(circuit: &CircuitSpec, features: &[f64], controls: &[f64]) -> Result<StateVector> {
    circuit.check_inputs(features, controls)?;
    Ok(run(circuit, features, controls, None))
}

fn sample_trajectory(rng: &mut ChaCha8Rng, cnots: usize, p: f64) -> Vec<u8> {
    (0..cnots)
        .map(|_| {
            if rng.random::<f64>() < p {
                rng.random_range(0..16u8)
            } else {
                0
            }
        })
        .collect()
}

fn expectation(
    circuit: &CircuitSpec,
    features: &[f64],
    controls: &[f64],
    noise: &NoiseSpec,
    stream: u64,
) -> f64 {
    let measured = circuit.measured_qubit();
    if noise.is_noiseless() {
        return run(circuit, features, controls, None).expectation_z(measured);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    rng.set_stream(stream);
    let cnots = circuit.two_qubit_gate_count();
    let depolarize = noise.depolarizing_p > 0.0 && cnots > 0;
    let flip = noise.readout_flip_p;

    let mut value = match noise.shots {
        None => {
            let state = if depolarize {
                let t = sample_trajectory(&mut rng, cnots, noise.depolarizing_p);
                run(circuit, features, controls, Some(&t))
            } else {
                run(circuit, features, controls, None)
            };
            (1.0 - 2.0 * flip) * state.expectation_z(measured)
        }
        Some(shots) => {
            // Shots sharing a trajectory are drawn together; the binomial
            // draw has the same law as per-shot Bernoulli sampling.
            let mut groups: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
            if depolarize {
                for _ in 0..shots {
                    *groups
                        .entry(sample_trajectory(&mut rng, cnots, noise.depolarizing_p))
                        .or_default() += 1;
                }
            } else {
                groups.insert(Vec::new(), shots);
            }
            let mut ones = 0u64;
            for (trajectory, count) in &groups {
                let p1 = run(circuit, features, controls, Some(trajectory)).prob_one(measured);
                let p1 = (p1 * (1.0 - flip) + (1.0 - p1) * flip).clamp(0.0, 1.0);
                ones += Binomial::new(*count, p1)
                    .expect("probability clamped to [0, 1]")
                    .sample(&mut rng);
            }
            (shots as f64 - 2.0 * ones as f64) / shots as f64
        }
    };
    if noise.additive_sigma > 0.0 {
        value += Normal::new(0.0, noise.additive_sigma)
            .expect("sigma validated")
            .sample(&mut rng);
    }
    value
}

/// Exact gradient of ⟨Z⟩ with respect to the controls by the
/// parameter-shift rule, summing over every gate bound to a control.
pub fn parameter_shift_gradient(
    circuit: &CircuitSpec,
    features: &[f64],
    controls: &[f64],
) -> Result<Vec<f64>> {
    circuit.check_inputs(features, controls)?;
    let shift = std::f64::consts::FRAC_PI_2;
    let measured = circuit.measured_qubit();
    let mut grad = vec![0.0; circuit.control_count()];
    for (g, gate) in circuit.gates().iter().enumerate() {
        if let Some(AngleSource::Control(j)) = gate.angle {
            let plus = run_shifted(circuit, features, controls, None, Some((g, shift)));
            let minus = run_shifted(circuit, features, controls, None, Some((g, -shift)));
            grad[j] += (plus.expectation_z(measured) - minus.expectation_z(measured)) / 2.0;
        }
    }
    Ok(grad)
}

/// ⟨Z⟩ on the measured qubit using RNG stream 0 of `noise.seed`.
pub fn evaluate(
    circuit: &CircuitSpec,
    features: &[f64],
    controls: &[f64],
    noise: &NoiseSpec,
) -> Result<f64> {
    evaluate_stream(circuit, features, controls, noise, 0)
}

/// As [`evaluate`], drawing noise from the given stream of `noise.seed`.
pub fn evaluate_stream(
    circuit: &CircuitSpec,
    features: &[f64],
    controls: &[f64],
    noise: &NoiseSpec,
    stream: u64,
) -> Result<f64> {
    circuit.check_inputs(features, controls)?;
    noise.validate()?;
    Ok(expectation(circuit, features, controls, noise, stream))
}

/// Row `i` draws its noise from stream `i`.
pub fn evaluate_batch(
    circuit: &CircuitSpec,
    rows: &[Vec<f64>],
    controls: &[f64],
    noise: &NoiseSpec,
) -> Result<Vec<f64>> {
    noise.validate()?;
    for row in rows {
        circuit.check_inputs(row, controls)?;
    }
    Ok(rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| expectation(circuit, row, controls, noise, i as u64))
        .collect())
}

/// A circuit with bound controls and noise. Every evaluation takes the next
/// RNG stream, so repeated calls see fresh but reproducible noise.
#[derive(Debug)]
pub struct Evaluator {
    circuit: CircuitSpec,
    controls: Vec<f64>,
    noise: NoiseSpec,
    calls: AtomicU64,
}

impl Clone for Evaluator {
    fn clone(&self) -> Self {
        Evaluator {
            circuit: self.circuit.clone(),
            controls: self.controls.clone(),
            noise: self.noise.clone(),
            calls: AtomicU64::new(self.calls.load(Ordering::SeqCst)),
        }
    }
}

impl Evaluator {
    pub fn new(circuit: CircuitSpec, controls: Vec<f64>, noise: NoiseSpec) -> Result<Self> {
        crate::error::check_dim("controls", circuit.control_count(), controls.len())?;
        noise.validate()?;
        Ok(Evaluator {
            circuit,
            controls,
            noise,
            calls: AtomicU64::new(0),
        })
    }

    pub fn circuit(&self) -> &CircuitSpec {
        &self.circuit
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    /// Number of evaluations so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn evaluate(&self, features: &[f64]) -> Result<f64> {
        self.circuit.check_inputs(features, &self.controls)?;
        let stream = self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(expectation(&self.circuit, features, &self.controls, &self.noise, stream))
    }

    pub fn evaluate_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        for row in rows {
            self.circuit.check_inputs(row, &self.controls)?;
        }
        let first = self.calls.fetch_add(rows.len() as u64, Ordering::SeqCst);
        Ok(rows
            .par_iter()
            .enumerate()
            .map(|(i, row)| {
                expectation(&self.circuit, row, &self.controls, &self.noise, first + i as u64)
            })
            .collect())
    }
}

impl Model for Evaluator {
    fn feature_count(&self) -> usize {
        self.circuit.feature_count()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.evaluate(x).expect("feature dimension checked by caller")
    }

    fn eval_batch(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        self.evaluate_batch(xs)
            .expect("feature dimension checked by caller")
    }
}
