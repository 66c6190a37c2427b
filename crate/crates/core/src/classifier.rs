//! The 2×2 bars-and-stripes task, the three reference circuits and a
//! parameter-shift trainer.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::Model;
use crate::sim::{
    evaluate, parameter_shift_gradient, AngleSource, CircuitSpec, Evaluator, GateOp, NoiseSpec,
};

pub const PIXELS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Bars,
    Stripes,
}

impl Label {
    /// Classifier target: Stripes ↦ +1, Bars ↦ −1.
    pub fn target(self) -> f64 {
        match self {
            Label::Stripes => 1.0,
            Label::Bars => -1.0,
        }
    }

    pub fn from_output(value: f64) -> Self {
        if value >= 0.0 {
            Label::Stripes
        } else {
            Label::Bars
        }
    }
}

/// A 2×2 binary image in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarsStripesImage {
    pub pixels: [u8; PIXELS],
    pub label: Label,
}

impl BarsStripesImage {
    /// Labels a pixel pattern; `None` for patterns that are neither bars nor
    /// stripes, and for the two uniform images which are both.
    pub fn classify(pixels: [u8; PIXELS]) -> Option<Self> {
        if pixels.iter().any(|&p| p > 1) {
            return None;
        }
        let stripes = pixels[0] == pixels[1] && pixels[2] == pixels[3];
        let bars = pixels[0] == pixels[2] && pixels[1] == pixels[3];
        let label = match (stripes, bars) {
            (true, false) => Label::Stripes,
            (false, true) => Label::Bars,
            _ => return None,
        };
        Some(BarsStripesImage { pixels, label })
    }
}

/// The four non-degenerate images: two stripes followed by two bars.
pub fn dataset() -> Vec<BarsStripesImage> {
    [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
        .into_iter()
        .map(|p| BarsStripesImage::classify(p).expect("valid pattern"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    SingleQubit,
    TwoQubit,
    FourQubit,
}

impl ReferenceKind {
    pub const ALL: [ReferenceKind; 3] = [
        ReferenceKind::SingleQubit,
        ReferenceKind::TwoQubit,
        ReferenceKind::FourQubit,
    ];

    /// Pixel read by each circuit feature.
    pub fn feature_pixels(self) -> Vec<usize> {
        match self {
            ReferenceKind::SingleQubit | ReferenceKind::TwoQubit => vec![0, 1],
            ReferenceKind::FourQubit => vec![0, 1, 2, 3],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReferenceKind::SingleQubit => "single-qubit",
            ReferenceKind::TwoQubit => "two-qubit",
            ReferenceKind::FourQubit => "four-qubit",
        }
    }
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReferenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReferenceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown circuit kind `{s}`")))
    }
}

pub fn reference_circuit(kind: ReferenceKind) -> CircuitSpec {
    use AngleSource::{Control as C, Feature as F};
    let gates = match kind {
        ReferenceKind::SingleQubit => vec![
            GateOp::rx(0, F(0)),
            GateOp::ry(0, C(0)),
            GateOp::rx(0, F(1)),
        ],
        ReferenceKind::TwoQubit => vec![
            GateOp::rx(0, F(0)),
            GateOp::rx(1, F(1)),
            GateOp::ry(0, C(0)),
            GateOp::ry(1, C(1)),
            GateOp::cnot(0, 1),
            GateOp::ry(0, C(2)),
            GateOp::ry(1, C(3)),
            GateOp::rx(0, C(4)),
            GateOp::rx(1, C(5)),
            GateOp::cnot(0, 1),
            GateOp::ry(0, C(6)),
            GateOp::ry(1, C(7)),
        ],
        ReferenceKind::FourQubit => {
            let ladder = [(0, 1), (0, 2), (1, 3), (2, 3)];
            let mut g = Vec::new();
            g.extend((0..4).map(|q| GateOp::rx(q, F(q))));
            g.extend((0..4).map(|q| GateOp::ry(q, C(q))));
            g.extend(ladder.iter().map(|&(c, t)| GateOp::cnot(c, t)));
            g.extend((0..4).map(|q| GateOp::ry(q, C(4 + q))));
            g.extend((0..4).map(|q| GateOp::rx(q, C(8 + q))));
            g.extend(ladder.iter().map(|&(c, t)| GateOp::cnot(c, t)));
            g.extend((0..4).map(|q| GateOp::ry(q, C(12 + q))));
            g
        }
    };
    let (qubits, measured) = match kind {
        ReferenceKind::SingleQubit => (1, 0),
        ReferenceKind::TwoQubit => (2, 1),
        ReferenceKind::FourQubit => (4, 3),
    };
    CircuitSpec::new(qubits, measured, gates).expect("reference circuits are valid")
}

/// The shipped parameters for a reference circuit, trained with
/// [`TrainConfig::default`].
pub fn reference_model(kind: ReferenceKind) -> TrainedModel {
    let text = match kind {
        ReferenceKind::SingleQubit => include_str!("../fixtures/single-qubit.json"),
        ReferenceKind::TwoQubit => include_str!("../fixtures/two-qubit.json"),
        ReferenceKind::FourQubit => include_str!("../fixtures/four-qubit.json"),
    };
    serde_json::from_str(text).expect("bundled fixture parses")
}

/// Affine map from pixel value to rotation angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaling {
    pub zero: f64,
    pub one: f64,
}

impl Default for FeatureScaling {
    fn default() -> Self {
        FeatureScaling { zero: 0.0, one: PI }
    }
}

impl FeatureScaling {
    pub fn angle(&self, pixel: f64) -> f64 {
        self.zero + pixel * (self.one - self.zero)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub circuit: CircuitSpec,
    pub controls: Vec<f64>,
    #[serde(default)]
    pub scaling: FeatureScaling,
    /// Pixel feeding each circuit feature; defaults to the identity map.
    #[serde(default, rename = "pixels", skip_serializing_if = "Option::is_none")]
    pub feature_pixels: Option<Vec<usize>>,
}

impl TrainedModel {
    pub fn new(circuit: CircuitSpec, controls: Vec<f64>, feature_pixels: Vec<usize>) -> Result<Self> {
        let m = TrainedModel {
            circuit,
            controls,
            scaling: FeatureScaling::default(),
            feature_pixels: Some(feature_pixels),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim("controls", self.circuit.control_count(), self.controls.len())?;
        let pixels = self.pixel_map();
        check_dim("pixel map", self.circuit.feature_count(), pixels.len())?;
        if let Some(&p) = pixels.iter().find(|&&p| p >= PIXELS) {
            return Err(Error::InvalidConfig(format!("pixel index {p} out of range")));
        }
        Ok(())
    }

    pub fn pixel_map(&self) -> Vec<usize> {
        self.feature_pixels
            .clone()
            .unwrap_or_else(|| (0..self.circuit.feature_count()).collect())
    }

    /// Pixel-space angles of an image.
    pub fn image_angles(&self, pixels: &[u8; PIXELS]) -> Vec<f64> {
        pixels.iter().map(|&p| self.scaling.angle(p as f64)).collect()
    }

    /// Exact classifier output for an image.
    pub fn predict(&self, pixels: &[u8; PIXELS]) -> Result<f64> {
        let angles = self.image_angles(pixels);
        let features: Vec<f64> = self.pixel_map().iter().map(|&p| angles[p]).collect();
        evaluate(&self.circuit, &features, &self.controls, &NoiseSpec::exact())
    }

    pub fn accuracy(&self, data: &[BarsStripesImage]) -> Result<usize> {
        let mut correct = 0;
        for img in data {
            if Label::from_output(self.predict(&img.pixels)?) == img.label {
                correct += 1;
            }
        }
        Ok(correct)
    }

    /// The classifier as a model over all four pixel angles.
    pub fn image_model(&self, noise: NoiseSpec) -> Result<ImageModel> {
        self.validate()?;
        Ok(ImageModel {
            evaluator: Evaluator::new(self.circuit.clone(), self.controls.clone(), noise)?,
            pixels: self.pixel_map(),
        })
    }
}

/// A trained classifier seen as a function of the four pixel angles. Pixels
/// the circuit does not read are ignored.
#[derive(Clone, Debug)]
pub struct ImageModel {
    evaluator: Evaluator,
    pixels: Vec<usize>,
}

impl ImageModel {
    /// Largest frequency reachable per pixel: the encoding multiplicity of
    /// the feature reading it, 0 for unread pixels.
    pub fn frequency_bounds(&self) -> Vec<usize> {
        let mult = self.evaluator.circuit().encoding_multiplicity();
        let mut bounds = vec![0; PIXELS];
        for (feature, &p) in self.pixels.iter().enumerate() {
            bounds[p] += mult[feature];
        }
        bounds
    }

    pub fn calls(&self) -> u64 {
        self.evaluator.calls()
    }

    fn features(&self, x: &[f64]) -> Vec<f64> {
        self.pixels.iter().map(|&p| x[p]).collect()
    }
}

impl Model for ImageModel {
    fn feature_count(&self) -> usize {
        PIXELS
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.evaluator.eval(&self.features(x))
    }

    fn eval_batch(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        let rows: Vec<Vec<f64>> = xs.iter().map(|x| self.features(x)).collect();
        self.evaluator.eval_batch(&rows)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.2,
            epochs: 200,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub model: TrainedModel,
    pub correct: usize,
    pub total: usize,
    pub loss: f64,
}

impl TrainReport {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

fn mean_squared_loss(model: &TrainedModel, data: &[BarsStripesImage]) -> Result<f64> {
    let mut loss = 0.0;
    for img in data {
        loss += (model.predict(&img.pixels)? - img.label.target()).powi(2);
    }
    Ok(loss / data.len().max(1) as f64)
}

/// Full-batch gradient descent on the mean squared error between the
/// circuit output and the ±1 labels, with exact parameter-shift gradients.
/// Controls start uniform in [−π, π). The best parameters seen (accuracy
/// first, then loss) are returned; not reaching 4/4 is reported, not an error.
pub fn train(
    circuit: CircuitSpec,
    feature_pixels: Vec<usize>,
    data: &[BarsStripesImage],
    config: &TrainConfig,
) -> Result<TrainReport> {
    if !(config.learning_rate.is_finite() && config.learning_rate > 0.0) {
        return Err(Error::InvalidConfig("learning rate must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let controls = (0..circuit.control_count())
        .map(|_| rng.random_range(-PI..PI))
        .collect();
    let mut model = TrainedModel::new(circuit, controls, feature_pixels)?;
    let pixels = model.pixel_map();
    let scale = 2.0 / data.len().max(1) as f64;

    let score = |m: &TrainedModel| -> Result<(usize, f64)> {
        Ok((m.accuracy(data)?, mean_squared_loss(m, data)?))
    };
    let mut best = (model.clone(), score(&model)?);

    for _ in 0..config.epochs {
        let mut grad = vec![0.0; model.controls.len()];
        for img in data {
            let angles = model.image_angles(&img.pixels);
            let features: Vec<f64> = pixels.iter().map(|&p| angles[p]).collect();
            let out = evaluate(&model.circuit, &features, &model.controls, &NoiseSpec::exact())?;
            let residual = out - img.label.target();
            let g = parameter_shift_gradient(&model.circuit, &features, &model.controls)?;
            for (acc, gi) in grad.iter_mut().zip(g) {
                *acc += scale * residual * gi;
            }
        }
        for (theta, g) in model.controls.iter_mut().zip(&grad) {
            *theta -= config.learning_rate * g;
        }
        let s = score(&model)?;
        if s.0 > best.1 .0 || (s.0 == best.1 .0 && s.1 < best.1 .1) {
            best = (model.clone(), s);
        }
    }

    let (model, (correct, loss)) = best;
    Ok(TrainReport {
        model,
        correct,
        total: data.len(),
        loss,
    })
}
