//! End-to-end acceptance checks. Run with `cargo test --test acceptance`;
//! prints one line per criterion and exits non-zero if any fails.

mod common;

use std::time::Instant;

use common::*;
use qxai_core::classifier::{dataset, ReferenceKind};
use qxai_core::explainers::*;
use qxai_core::fourier::{fit, FitConfig, FrequencyLattice};
use qxai_core::model::FnModel;
use qxai_core::polytensor::*;
use qxai_core::sim::{evaluate, NoiseSpec};
use qxai_core::stability::{ig_error_scan, shap_error_scan, ShapMode};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(1..=6);
        let terms = rng.random_range(1..=4);
        let poly = random_poly(&mut rng, n, 5, terms);
        let x = random_vec(&mut rng, n, 1.5);
        let b = random_vec(&mut rng, n, 1.5);
        let got = polynomial_shap(&poly, &x, &b).unwrap().values;
        let want = powerset_shap(&|z| poly_value(&poly, z), &x, &b);
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-8 && secs < 60.0,
        format!("max diff {worst:.2e} (<= 1e-8), {secs:.2}s (< 60s)"),
    )
}

fn quadratic_lemma() -> Outcome {
    let mut rng = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let mut c = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.random_range(-1.0..1.0);
                c[i][j] = v;
                c[j][i] = v;
            }
        }
        let x = random_vec(&mut rng, n, 2.0);
        let b = random_vec(&mut rng, n, 2.0);
        let form = |z: &[f64]| -> f64 {
            (0..n).map(|i| (0..n).map(|j| z[i] * c[i][j] * z[j]).sum::<f64>()).sum()
        };
        let got = shap_quadratic(&c, &x, &b).unwrap().values;
        let want = powerset_shap(&form, &x, &b);
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max diff {worst:.2e} (<= 1e-10)"))
}

fn efficiency_and_completeness() -> Outcome {
    let mut rng = rng(3);
    let mut worst_eff: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let w = random_vec(&mut rng, n, 2.0);
        let f = move |z: &[f64]| {
            let s: f64 = z.iter().zip(&w).map(|(z, w)| z * w).sum();
            s.sin() + z.iter().map(|v| v * v).product::<f64>() + (z[0] - z[n - 1]).cos()
        };
        let x = random_vec(&mut rng, n, 2.0);
        let b = random_vec(&mut rng, n, 2.0);
        let model = FnModel::new(n, &f);
        let r = baseline_shap_exact(&model, &x, &b).unwrap();
        worst_eff = worst_eff.max((r.total() - (f(&x) - f(&b))).abs());
    }

    let mut ratios = Vec::new();
    for _ in 0..20 {
        let n = 3;
        let w = random_vec(&mut rng, n, 1.0);
        let shift = rng.random_range(-1.0..1.0);
        let f = move |z: &[f64]| {
            let s: f64 = z.iter().zip(&w).map(|(z, w)| z * w).sum();
            (s + shift).exp() + z[0] * z[1] * z[2]
        };
        let x = random_vec(&mut rng, n, 1.0);
        let b = random_vec(&mut rng, n, 1.0);
        let model = FnModel::new(n, &f);
        let gap = |mesh: usize| {
            let r = integrated_gradients(&model, &x, &b, &IgConfig { mesh, delta: None }).unwrap();
            (r.total() - (f(&x) - f(&b))).abs()
        };
        ratios.push(gap(20) / gap(40));
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    outcome(
        worst_eff <= 1e-10 && lo >= 1.5 && hi <= 3.0,
        format!(
            "efficiency gap {worst_eff:.2e} (<= 1e-10); IG completeness ratio N=20/40 in [{lo:.3}, {hi:.3}] (within [1.5, 3])"
        ),
    )
}

fn fourier_exactness() -> Outcome {
    let model = trained(ReferenceKind::SingleQubit);
    let circuit_model = FnModel::new(2, |phi: &[f64]| {
        evaluate(&model.circuit, phi, &model.controls, &NoiseSpec::exact()).unwrap()
    });
    let lattice = FrequencyLattice::new(vec![1, 1]);
    let samples = 250;
    let fitted = fit(&circuit_model, &lattice, &FitConfig { samples: Some(samples), seed: 4, ..Default::default() }).unwrap();
    let mut rng = rng(4_000);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let phi: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        worst = worst.max((fitted.series.eval(&phi).unwrap() - qxai_core::model::Model::eval(&circuit_model, &phi)).abs());
    }
    outcome(
        worst <= 1e-8 && fitted.evaluations == samples && (250..=300).contains(&samples),
        format!("held-out max diff {worst:.2e} (<= 1e-8) from {} evaluations", fitted.evaluations),
    )
}

/// Worst per-feature |qSHAP − exact BS| over the four images, baseline all
/// zeros.
fn fidelity(kind: ReferenceKind, expansion: &ExpansionConfig) -> f64 {
    let model = trained(kind).image_model(NoiseSpec::exact()).unwrap();
    let lattice = FrequencyLattice::new(model.frequency_bounds());
    let fitted = fit(&model, &lattice, &FitConfig { samples: Some(250), seed: 5, ..Default::default() }).unwrap();
    let trained = trained(kind);
    let mut worst: f64 = 0.0;
    for img in dataset() {
        let x = trained.image_angles(&img.pixels);
        let b = vec![0.0; 4];
        let exact = baseline_shap_exact(&model, &x, &b).unwrap();
        let (q, _) = qshap_from_series(&fitted.series, &x, &b, expansion).unwrap();
        for (q, e) in q.iter().zip(&exact.values) {
            worst = worst.max((q - e).abs());
        }
    }
    worst
}

fn qshap_fidelity() -> Outcome {
    let bound = 1e-2;
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in [ReferenceKind::SingleQubit, ReferenceKind::TwoQubit] {
        let taylor9 = fidelity(kind, &ExpansionConfig::taylor(9));
        let cheb5 = fidelity(kind, &ExpansionConfig::chebyshev(5, None));
        let smallest = |cheb: bool| {
            (1..=15).find(|&k| {
                let cfg = if cheb { ExpansionConfig::chebyshev(k, None) } else { ExpansionConfig::taylor(k) };
                fidelity(kind, &cfg) <= bound
            })
        };
        let (kt, kc) = (smallest(false), smallest(true));
        let order_ok = match (kt, kc) {
            (Some(kt), Some(kc)) => kc <= (kt + 1).div_ceil(2) + 1,
            _ => false,
        };
        pass &= taylor9 <= bound && cheb5 <= bound && order_ok;
        parts.push(format!(
            "{kind}: Taylor K=9 {taylor9:.2e}, Chebyshev K=5 {cheb5:.2e}, smallest K Taylor {kt:?} Chebyshev {kc:?}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn dummy_features() -> Outcome {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut exact_zero = true;
    for kind in [ReferenceKind::SingleQubit, ReferenceKind::TwoQubit] {
        let trained = trained(kind);
        let model = trained.image_model(NoiseSpec::exact()).unwrap();
        let lattice = FrequencyLattice::new(model.frequency_bounds());
        let cfg = QShapConfig { fit: FitConfig { samples: Some(250), seed: 6, ..Default::default() }, ..Default::default() };
        for img in dataset() {
            let x = trained.image_angles(&img.pixels);
            let b = vec![0.0; 4];
            let bs = baseline_shap_exact(&model, &x, &b).unwrap().values;
            let q = qshap(&model, &lattice, &x, &b, &cfg).unwrap().values;
            // bottom row of the 2×2 image
            for e in [2, 3] {
                worst = worst.max(bs[e].abs()).max(q[e].abs());
            }
            for e in 0..4 {
                if x[e] == b[e] && bs[e].to_bits() != 0f64.to_bits() {
                    exact_zero = false;
                }
            }
        }
    }
    pass &= worst < 0.05 && exact_zero;
    outcome(
        pass,
        format!("bottom-pixel max |attribution| {worst:.2e} (< 0.05); BS exactly 0 where x=b: {exact_zero}"),
    )
}

fn noise_ordering() -> Outcome {
    let trained = trained(ReferenceKind::SingleQubit);
    let shots = 1000;
    let prune = 3.0 / (shots as f64).sqrt();
    let seeds = 20;
    let mut runs: Vec<[Vec<f64>; 3]> = Vec::new();
    for seed in 0..seeds {
        let noise = NoiseSpec::shots(shots, seed).with_depolarizing(0.02);
        let model = trained.image_model(noise).unwrap();
        let lattice = FrequencyLattice::new(model.frequency_bounds());
        let cfg = QShapConfig {
            fit: FitConfig { samples: Some(250), seed, ..Default::default() },
            prune_threshold: Some(prune),
            ..Default::default()
        };
        let (mut q, mut bs, mut ig) = (Vec::new(), Vec::new(), Vec::new());
        for img in dataset() {
            let x = trained.image_angles(&img.pixels);
            let b = vec![0.0; 4];
            q.extend(qshap(&model, &lattice, &x, &b, &cfg).unwrap().values);
            bs.extend(baseline_shap_exact(&model, &x, &b).unwrap().values);
            ig.extend(integrated_gradients(&model, &x, &b, &IgConfig::default()).unwrap().values);
        }
        runs.push([q, bs, ig]);
    }
    let slots = runs[0][0].len();
    let spread = |method: usize, slot: usize| std_dev(&runs.iter().map(|r| r[method][slot]).collect::<Vec<_>>());
    let q_le_bs = (0..slots).filter(|&s| spread(0, s) <= spread(1, s)).count();
    let bs_le_ig = (0..slots).filter(|&s| spread(1, s) <= spread(2, s)).count();
    let need = (0.8 * slots as f64).ceil() as usize;
    outcome(
        q_le_bs >= need && bs_le_ig >= need,
        format!("std qSHAP <= BS at {q_le_bs}/{slots}, BS <= IG at {bs_le_ig}/{slots} slots (need {need})"),
    )
}

fn clt_scaling() -> Outcome {
    let start = Instant::now();
    let f = |z: &[f64]| z.iter().enumerate().map(|(i, v)| (v * (i + 1) as f64).sin()).sum::<f64>();
    let model = FnModel::new(3, f);
    let x = [1.0, 0.5, -0.8];
    let b = [0.0; 3];
    let reports = ig_error_scan(&model, &x, &b, 0.1, &[10, 20, 40, 80], 200, 8).unwrap();
    let ratios: Vec<f64> = reports
        .windows(2)
        .map(|w| w[0].mean_empirical() / w[1].mean_empirical())
        .collect();
    let ig_ok = ratios.iter().all(|r| (1.4..=2.8).contains(r));

    let memo = shap_error_scan(f, &[1.0; 4], &[0.0; 4], 0.1, &[4], 500, ShapMode::Memoized, 8).unwrap();
    let resampled = shap_error_scan(f, &[1.0; 4], &[0.0; 4], 0.1, &[4], 500, ShapMode::Resampled, 8).unwrap();
    let (vm, vr) = (memo[0].mean_empirical(), resampled[0].mean_empirical());
    let secs = start.elapsed().as_secs_f64();
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    outcome(
        ig_ok && vr < vm && secs < 300.0,
        format!(
            "IG variance ratio per doubling [{}] (within [1.4, 2.8]); n=4 resampled {vr:.2e} < memoized {vm:.2e}; {secs:.1}s",
            shown.join(", ")
        ),
    )
}

fn runtime_substitute() -> Outcome {
    let trained = trained(ReferenceKind::SingleQubit);
    let model = trained.image_model(NoiseSpec::exact()).unwrap();
    let lattice = FrequencyLattice::new(model.frequency_bounds());
    let samples = 270;
    let cfg = QShapConfig { fit: FitConfig { samples: Some(samples), seed: 9, ..Default::default() }, ..Default::default() };
    let before = model.calls();
    let r = qshap(&model, &lattice, &[3.1, 3.1, 0.0, 0.0], &[0.0; 4], &cfg).unwrap();
    let counted = r.evaluations == samples as u64 && model.calls() - before == samples as u64;

    let mut rng = rng(9);
    let mut pass = counted;
    let mut parts = Vec::new();
    for order in [2usize, 3, 4] {
        let sizes = [4usize, 6, 8, 12, 16];
        let ops: Vec<f64> = sizes
            .iter()
            .map(|&n| {
                let terms = (0..3)
                    .map(|_| RankOneTerm::new(order, 1.0, random_vec(&mut rng, n, 1.0)))
                    .collect();
                let poly = RankOnePoly::new(n, terms).unwrap();
                let x = random_vec(&mut rng, n, 1.0);
                let b = random_vec(&mut rng, n, 1.0);
                polynomial_shap_values(&poly, &x, &b).unwrap().1.operations() as f64
            })
            .collect();
        // least-squares slope of log ops against log n
        let lx: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
        let ly: Vec<f64> = ops.iter().map(|o| o.ln()).collect();
        let (mx, my) = (lx.iter().sum::<f64>() / 5.0, ly.iter().sum::<f64>() / 5.0);
        let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
            / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
        pass &= slope <= order as f64 + 0.5;
        parts.push(format!("r={order} exponent {slope:.2}"));
    }
    outcome(
        pass,
        format!("evaluations == S ({samples}): {counted}; {}", parts.join(", ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("polynomial SHAP vs brute force", oracle_equivalence),
        ("quadratic form SHAP", quadratic_lemma),
        ("efficiency and IG completeness", efficiency_and_completeness),
        ("Fourier fit exactness", fourier_exactness),
        ("qSHAP fidelity", qshap_fidelity),
        ("dummy features", dummy_features),
        ("noise robustness ordering", noise_ordering),
        ("error scaling under noise", clt_scaling),
        ("evaluation and operation counts", runtime_substitute),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!(
            "criterion {} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
