use super::{check_request, AttributionResult, Method};
use crate::error::{Error, Result};
use crate::model::Model;

/// Exact Baseline SHAP enumerates 2ⁿ corners.
pub const EXACT_BS_MAX_FEATURES: usize = 20;

/// Shapley kernel |S|!(n−1−|S|)!/n! for a coalition of size `s` out of the
/// n − 1 features other than the one explained.
pub fn shapley_weight(n: usize, s: usize) -> f64 {
    // 1 / (n · C(n−1, s))
    let mut binom = 1.0;
    for i in 0..s {
        binom *= (n - 1 - i) as f64 / (i + 1) as f64;
    }
    1.0 / (n as f64 * binom)
}

/// The corner g_S takes xᵢ for i ∈ S and bᵢ otherwise.
pub(crate) fn corner(x: &[f64], b: &[f64], mask: u64) -> Vec<f64> {
    x.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&x, &b))| if mask >> i & 1 == 1 { x } else { b })
        .collect()
}

/// Clears the bits of features whose input equals the baseline, so
/// coinciding corners share one evaluation.
pub(crate) fn canonical_mask(x: &[f64], b: &[f64]) -> u64 {
    x.iter()
        .zip(b)
        .enumerate()
        .filter(|(_, (x, b))| x.to_bits() != b.to_bits())
        .fold(0u64, |m, (i, _)| m | 1 << i)
}

/// Powerset Baseline SHAP with every distinct corner of the box spanned by
/// `x` and `b` evaluated once:
///
/// Sh(e) = Σ_{S ⊆ F∖{e}} |S|!(n−1−|S|)!/n! · (f(g_{S∪{e}}) − f(g_S)).
///
/// A feature the model ignores, or with xₑ = bₑ, gets exactly zero.
pub fn baseline_shap_exact<M: Model + ?Sized>(
    model: &M,
    x: &[f64],
    b: &[f64],
) -> Result<AttributionResult> {
    let n = check_request(model, x, b)?;
    if n > EXACT_BS_MAX_FEATURES {
        return Err(Error::TooManyFeatures {
            n,
            cap: EXACT_BS_MAX_FEATURES,
        });
    }
    if n == 0 {
        return Ok(AttributionResult::new(Method::Bs, Vec::new(), 0, x, b));
    }
    let live = canonical_mask(x, b);
    let corners: Vec<u64> = (0..1u64 << n).filter(|m| m & !live == 0).collect();
    let points: Vec<Vec<f64>> = corners.iter().map(|&m| corner(x, b, m)).collect();
    let values = model.eval_batch(&points);
    let mut table = vec![0.0; 1 << n];
    for (&m, v) in corners.iter().zip(values) {
        table[m as usize] = v;
    }

    let weights: Vec<f64> = (0..n).map(|s| shapley_weight(n, s)).collect();
    let attributions = (0..n)
        .map(|e| {
            let bit = 1u64 << e;
            let mut acc = 0.0;
            for s in 0..1u64 << n {
                if s & bit != 0 {
                    continue;
                }
                let with = ((s | bit) & live) as usize;
                let without = (s & live) as usize;
                acc += weights[s.count_ones() as usize] * (table[with] - table[without]);
            }
            acc
        })
        .collect();
    Ok(AttributionResult::new(
        Method::Bs,
        attributions,
        points.len() as u64,
        x,
        b,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FnModel;

    #[test]
    fn weights_sum_to_one() {
        for n in 1..12 {
            let total: f64 = (0..n)
                .map(|s| {
                    let c: f64 = (0..s).fold(1.0, |a, i| a * (n - 1 - i) as f64 / (i + 1) as f64);
                    c * shapley_weight(n, s)
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn additive_and_product_models() {
        let sum = FnModel::new(2, |x: &[f64]| x[0] + x[1]);
        let r = baseline_shap_exact(&sum, &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(r.values, vec![1.0, 1.0]);
        assert_eq!(r.evaluations, 4);
        let prod = FnModel::new(2, |x: &[f64]| x[0] * x[1]);
        let r = baseline_shap_exact(&prod, &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(r.values, vec![0.5, 0.5]);
    }

    #[test]
    fn dummy_feature_is_exactly_zero() {
        let f = FnModel::new(3, |x: &[f64]| (x[0] * x[1]).sin() + x[1].exp());
        let r = baseline_shap_exact(&f, &[0.3, -1.2, 4.0], &[1.0, 0.4, -2.0]).unwrap();
        assert_eq!(r.values[2], 0.0);
        let r = baseline_shap_exact(&f, &[0.3, 0.4, 4.0], &[1.0, 0.4, -2.0]).unwrap();
        assert_eq!(r.values[1], 0.0);
        assert_eq!(r.evaluations, 4);
    }

    #[test]
    fn cap() {
        let f = FnModel::new(21, |_: &[f64]| 0.0);
        let z = vec![0.0; 21];
        assert!(matches!(
            baseline_shap_exact(&f, &z, &z),
            Err(Error::TooManyFeatures { n: 21, .. })
        ));
    }
}
