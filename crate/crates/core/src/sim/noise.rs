use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parametric evaluation noise.
///
/// With `shots` absent the circuit returns its exact expectation (after any
/// sampled depolarizing trajectory and the analytic readout damping). The
/// additive Gaussian is applied last in every mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub depolarizing_p: f64,
    #[serde(default)]
    pub readout_flip_p: f64,
    #[serde(default)]
    pub additive_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::exact()
    }
}

impl NoiseSpec {
    pub fn exact() -> Self {
        NoiseSpec {
            shots: None,
            depolarizing_p: 0.0,
            readout_flip_p: 0.0,
            additive_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn shots(shots: u64, seed: u64) -> Self {
        NoiseSpec {
            shots: Some(shots),
            seed,
            ..Self::exact()
        }
    }

    pub fn with_depolarizing(mut self, p: f64) -> Self {
        self.depolarizing_p = p;
        self
    }

    pub fn with_readout(mut self, p: f64) -> Self {
        self.readout_flip_p = p;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.additive_sigma = sigma;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("depolarizing_p", self.depolarizing_p),
            ("readout_flip_p", self.readout_flip_p),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidNoise(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        if !(self.additive_sigma >= 0.0 && self.additive_sigma.is_finite()) {
            return Err(Error::InvalidNoise(format!(
                "additive_sigma = {} must be finite and non-negative",
                self.additive_sigma
            )));
        }
        if self.shots == Some(0) {
            return Err(Error::InvalidNoise("shots must be positive".into()));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.shots.is_none()
            && self.depolarizing_p == 0.0
            && self.readout_flip_p == 0.0
            && self.additive_sigma == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(NoiseSpec::exact().validate().is_ok());
        assert!(NoiseSpec::exact().with_depolarizing(1.5).validate().is_err());
        assert!(NoiseSpec::exact().with_readout(-0.1).validate().is_err());
        assert!(NoiseSpec::exact().with_sigma(-1.0).validate().is_err());
        assert!(NoiseSpec::exact().with_sigma(f64::NAN).validate().is_err());
        assert!(NoiseSpec::shots(0, 1).validate().is_err());
        assert!(NoiseSpec::exact().is_noiseless());
        assert!(!NoiseSpec::shots(10, 1).is_noiseless());
    }
}
