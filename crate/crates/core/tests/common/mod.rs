#![allow(dead_code)]

use qxai_core::classifier::{dataset, reference_circuit, train, ReferenceKind, TrainConfig, TrainReport, TrainedModel};
use qxai_core::polytensor::{RankOnePoly, RankOneTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shapley values by direct enumeration of coalitions, with the kernel
/// computed from factorials.
pub fn powerset_shap(f: &dyn Fn(&[f64]) -> f64, x: &[f64], b: &[f64]) -> Vec<f64> {
    let n = x.len();
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let point = |mask: usize| -> Vec<f64> {
        (0..n).map(|i| if mask >> i & 1 == 1 { x[i] } else { b[i] }).collect()
    };
    (0..n)
        .map(|e| {
            let mut sh = 0.0;
            for mask in 0..1usize << n {
                if mask >> e & 1 == 1 {
                    continue;
                }
                let s = mask.count_ones() as usize;
                let w = fact(s) * fact(n - 1 - s) / fact(n);
                sh += w * (f(&point(mask | 1 << e)) - f(&point(mask)));
            }
            sh
        })
        .collect()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Random rank-one polynomial with `terms` terms of order in 1..=max_order
/// plus a constant.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_order: usize, terms: usize) -> RankOnePoly {
    let mut t = vec![RankOneTerm::constant(n, rng.random_range(-1.0..1.0))];
    for _ in 0..terms {
        let order = rng.random_range(1..=max_order);
        let weight = rng.random_range(-1.0..1.0);
        t.push(RankOneTerm::new(order, weight, random_vec(rng, n, 1.0)));
    }
    RankOnePoly::new(n, t).unwrap()
}

/// Direct evaluation of Σ λ ⟨v, x⟩^k, independent of the library's own.
pub fn poly_value(p: &RankOnePoly, x: &[f64]) -> f64 {
    p.terms
        .iter()
        .map(|t| {
            let dot: f64 = t.direction.iter().zip(x).map(|(v, x)| v * x).sum();
            t.weight * dot.powi(t.order as i32)
        })
        .sum()
}

/// Golden trained parameters shipped with the crate.
pub fn trained(kind: ReferenceKind) -> TrainedModel {
    let path = format!("{}/fixtures/{}.json", env!("CARGO_MANIFEST_DIR"), kind.name());
    let text = std::fs::read_to_string(&path).unwrap();
    let model: TrainedModel = serde_json::from_str(&text).unwrap();
    model.validate().unwrap();
    model
}

pub fn retrained(kind: ReferenceKind) -> TrainReport {
    train(
        reference_circuit(kind),
        kind.feature_pixels(),
        &dataset(),
        &TrainConfig::default(),
    )
    .unwrap()
}

pub fn std_dev(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}
