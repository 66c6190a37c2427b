use serde::{Deserialize, Serialize};

use super::{check_request, AttributionResult, Method};
use crate::error::{check_dim, Error, Result};
use crate::model::Model;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IgConfig {
    /// Mesh size N of the path b → x.
    pub mesh: usize,
    /// Finite-difference shift per feature; [`default_delta`] when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
}

impl Default for IgConfig {
    fn default() -> Self {
        IgConfig { mesh: 20, delta: None }
    }
}

/// δₑ = 10⁻³·max(1, |xₑ − bₑ|).
pub fn default_delta(x: &[f64], b: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(b)
        .map(|(x, b)| 1e-3 * (x - b).abs().max(1.0))
        .collect()
}

/// Integrated Gradients by the interior trapezoid nodes and central
/// differences:
///
/// IG(e) = (xₑ−bₑ)/(2Nδₑ) Σ_{i=1}^{N−1} [f(γᵢ + δₑeₑ) − f(γᵢ − δₑeₑ)],
/// γᵢ = (i/N)x + (1 − i/N)b.
///
/// The two end nodes are dropped, so the estimate carries an O(1/N)
/// completeness error. Uses exactly 2(N−1)n model calls.
pub fn integrated_gradients<M: Model + ?Sized>(
    model: &M,
    x: &[f64],
    b: &[f64],
    config: &IgConfig,
) -> Result<AttributionResult> {
    let n = check_request(model, x, b)?;
    let mesh = config.mesh;
    if mesh < 2 {
        return Err(Error::InvalidConfig(format!("IG mesh must be at least 2, got {mesh}")));
    }
    let delta = match &config.delta {
        Some(d) => {
            check_dim("delta", n, d.len())?;
            if d.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
                return Err(Error::InvalidConfig("IG shifts must be positive".into()));
            }
            d.clone()
        }
        None => default_delta(x, b),
    };

    let mut points = Vec::with_capacity(2 * (mesh - 1) * n);
    for e in 0..n {
        for i in 1..mesh {
            let s = i as f64 / mesh as f64;
            let node: Vec<f64> = x.iter().zip(b).map(|(x, b)| s * x + (1.0 - s) * b).collect();
            let mut plus = node.clone();
            let mut minus = node;
            plus[e] += delta[e];
            minus[e] -= delta[e];
            points.push(plus);
            points.push(minus);
        }
    }
    let values = model.eval_batch(&points);

    let per_feature = 2 * (mesh - 1);
    let attributions = (0..n)
        .map(|e| {
            let diff: f64 = values[e * per_feature..(e + 1) * per_feature]
                .chunks_exact(2)
                .map(|pm| pm[0] - pm[1])
                .sum();
            (x[e] - b[e]) / (2.0 * mesh as f64 * delta[e]) * diff
        })
        .collect();
    Ok(
        AttributionResult::new(Method::Ig, attributions, points.len() as u64, x, b).with_config(
            IgConfig {
                mesh,
                delta: Some(delta),
            },
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FnModel;

    #[test]
    fn linear_model_is_exact() {
        let w = [0.5, -2.0, 3.0];
        let f = FnModel::new(3, |x: &[f64]| x.iter().zip(&w).map(|(x, w)| x * w).sum());
        let x = [1.0, 2.0, -1.0];
        let b = [0.0, 0.5, 1.0];
        for mesh in [2, 5, 20] {
            let r = integrated_gradients(&f, &x, &b, &IgConfig { mesh, delta: None }).unwrap();
            for e in 0..3 {
                // the dropped end nodes make IG exact only up to (N−1)/N
                let expect = w[e] * (x[e] - b[e]) * (mesh - 1) as f64 / mesh as f64;
                assert!((r.values[e] - expect).abs() < 1e-9, "{mesh} {e}");
            }
            assert_eq!(r.evaluations, (2 * (mesh - 1) * 3) as u64);
        }
    }

    #[test]
    fn zero_path() {
        let f = FnModel::new(2, |x: &[f64]| x[0].sin() * x[1]);
        let r = integrated_gradients(&f, &[0.3, 0.4], &[0.3, 0.4], &IgConfig::default()).unwrap();
        assert_eq!(r.values, vec![0.0, 0.0]);
    }

    #[test]
    fn square_integral() {
        let f = FnModel::new(1, |x: &[f64]| x[0] * x[0]);
        let cfg = IgConfig { mesh: 1000, delta: Some(vec![1e-4]) };
        let r = integrated_gradients(&f, &[1.0], &[0.0], &cfg).unwrap();
        assert!((r.values[0] - 1.0).abs() < 5e-3, "{}", r.values[0]);
    }

    #[test]
    fn rejects_bad_config() {
        let f = FnModel::new(1, |x: &[f64]| x[0]);
        assert!(integrated_gradients(&f, &[1.0], &[0.0], &IgConfig { mesh: 1, delta: None }).is_err());
        let cfg = IgConfig { mesh: 4, delta: Some(vec![0.0]) };
        assert!(integrated_gradients(&f, &[1.0], &[0.0], &cfg).is_err());
        assert!(integrated_gradients(&f, &[1.0, 2.0], &[0.0], &IgConfig::default()).is_err());
    }
}
