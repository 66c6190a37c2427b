use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bs::{canonical_mask, corner};
use super::{check_request, AttributionResult, Method};
use crate::error::{Error, Result};
use crate::model::Model;

/// Largest n for which all n! orderings may be enumerated.
pub const EXHAUSTIVE_MAX_FEATURES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PermutationCount {
    Sampled(usize),
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationConfig {
    pub permutations: PermutationCount,
    pub seed: u64,
    /// Evaluate the model afresh at every point of every permutation instead
    /// of caching one value per corner.
    pub resample: bool,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        PermutationConfig {
            permutations: PermutationCount::Sampled(100),
            seed: 0,
            resample: false,
        }
    }
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    // lexicographic successor
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// Baseline SHAP as the mean marginal contribution f(g_{Pₑ∪{e}}) − f(g_{Pₑ})
/// over orderings P, Pₑ the features preceding e.
pub fn permutation_shap<M: Model + ?Sized>(
    model: &M,
    x: &[f64],
    b: &[f64],
    config: &PermutationConfig,
) -> Result<AttributionResult> {
    let n = check_request(model, x, b)?;
    if n > 63 {
        return Err(Error::TooManyFeatures { n, cap: 63 });
    }
    let orders = match config.permutations {
        PermutationCount::All => {
            if n > EXHAUSTIVE_MAX_FEATURES {
                return Err(Error::TooManyFeatures {
                    n,
                    cap: EXHAUSTIVE_MAX_FEATURES,
                });
            }
            all_permutations(n)
        }
        PermutationCount::Sampled(0) => {
            return Err(Error::InvalidConfig("at least one permutation is needed".into()))
        }
        PermutationCount::Sampled(p) => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut perm: Vec<usize> = (0..n).collect();
            (0..p)
                .map(|_| {
                    perm.shuffle(&mut rng);
                    perm.clone()
                })
                .collect()
        }
    };

    // corner masks along each walk b → x
    let walks: Vec<Vec<u64>> = orders
        .iter()
        .map(|order| {
            let mut mask = 0u64;
            std::iter::once(0)
                .chain(order.iter().map(|&e| {
                    mask |= 1 << e;
                    mask
                }))
                .collect()
        })
        .collect();

    let (values, evaluations): (Vec<Vec<f64>>, usize) = if config.resample {
        let points: Vec<Vec<f64>> = walks
            .iter()
            .flatten()
            .map(|&m| corner(x, b, m))
            .collect();
        let flat = model.eval_batch(&points);
        (flat.chunks(n + 1).map(<[f64]>::to_vec).collect(), points.len())
    } else {
        let live = canonical_mask(x, b);
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut unique = Vec::new();
        for &m in walks.iter().flatten() {
            index.entry(m & live).or_insert_with(|| {
                unique.push(m & live);
                unique.len() - 1
            });
        }
        let points: Vec<Vec<f64>> = unique.iter().map(|&m| corner(x, b, m)).collect();
        let evaluated = model.eval_batch(&points);
        let values = walks
            .iter()
            .map(|w| w.iter().map(|m| evaluated[index[&(m & live)]]).collect())
            .collect();
        (values, points.len())
    };

    let mut sums = vec![0.0; n];
    for (order, vals) in orders.iter().zip(&values) {
        for (step, &e) in order.iter().enumerate() {
            sums[e] += vals[step + 1] - vals[step];
        }
    }
    let count = orders.len() as f64;
    let attributions = sums.into_iter().map(|s| s / count).collect();
    Ok(
        AttributionResult::new(Method::Perm, attributions, evaluations as u64, x, b)
            .with_seed(config.seed)
            .with_config(config),
    )
}
