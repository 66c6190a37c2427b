//! Truncated Fourier series of circuit models: the frequency lattice, least
//! squares fitting from model samples, evaluation and pruning.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::Model;

/// Integer wave vectors ω with |ω_i| ≤ N_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyLattice {
    bounds: Vec<usize>,
}

impl FrequencyLattice {
    pub fn new(bounds: Vec<usize>) -> Self {
        FrequencyLattice { bounds }
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    pub fn feature_count(&self) -> usize {
        self.bounds.len()
    }

    /// |Ω| = ∏ (2N_i + 1).
    pub fn size(&self) -> usize {
        self.bounds.iter().map(|&b| 2 * b + 1).product()
    }

    /// Every ω in the lattice, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i32>> + '_ {
        let size = self.size();
        (0..size).map(move |mut idx| {
            let mut omega = vec![0i32; self.bounds.len()];
            for (i, &b) in self.bounds.iter().enumerate().rev() {
                let width = 2 * b + 1;
                omega[i] = (idx % width) as i32 - b as i32;
                idx /= width;
            }
            omega
        })
    }

    /// One representative of each {ω, −ω}: the zero vector first, then the
    /// vectors whose first nonzero component is positive.
    pub fn canonical(&self) -> Vec<Vec<i32>> {
        let mut out = vec![vec![0; self.bounds.len()]];
        out.extend(self.iter().filter(|w| is_canonical(w) && w.iter().any(|&c| c != 0)));
        out
    }

    /// Real unknowns of the fit: a sine and a cosine coefficient per
    /// canonical ω, minus the sine of ω = 0.
    pub fn unknown_count(&self) -> usize {
        2 * self.canonical().len() - 1
    }
}

fn is_canonical(omega: &[i32]) -> bool {
    omega.iter().find(|&&c| c != 0).is_none_or(|&c| c > 0)
}

fn dot(omega: &[i32], phi: &[f64]) -> f64 {
    omega.iter().zip(phi).map(|(&w, &p)| w as f64 * p).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub omega: Vec<i32>,
    /// sine coefficient
    pub a: f64,
    /// cosine coefficient
    pub b: f64,
}

/// f(φ) = Σ a_ω sin⟨ω, φ⟩ + b_ω cos⟨ω, φ⟩ over canonical ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct FourierSeries {
    pub n: usize,
    pub terms: Vec<FourierTerm>,
}

#[derive(Deserialize)]
struct RawSeries {
    n: usize,
    terms: Vec<FourierTerm>,
}

impl TryFrom<RawSeries> for FourierSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        FourierSeries::new(raw.n, raw.terms)
    }
}

impl FourierSeries {
    /// Builds a series, folding each ω onto its canonical representative
    /// (sin is odd, cos even) and merging duplicates.
    pub fn new(n: usize, terms: Vec<FourierTerm>) -> Result<Self> {
        let mut out: Vec<FourierTerm> = Vec::with_capacity(terms.len());
        for mut t in terms {
            check_dim("wave vector", n, t.omega.len())?;
            if !is_canonical(&t.omega) {
                t.omega.iter_mut().for_each(|c| *c = -*c);
                t.a = -t.a;
            }
            if t.omega.iter().all(|&c| c == 0) {
                t.a = 0.0;
            }
            match out.iter_mut().find(|o| o.omega == t.omega) {
                Some(o) => {
                    o.a += t.a;
                    o.b += t.b;
                }
                None => out.push(t),
            }
        }
        Ok(FourierSeries { n, terms: out })
    }

    pub fn zero(n: usize) -> Self {
        FourierSeries { n, terms: Vec::new() }
    }

    pub fn term(&self, omega: &[i32]) -> Option<&FourierTerm> {
        self.terms.iter().find(|t| t.omega == omega)
    }

    pub fn eval(&self, phi: &[f64]) -> Result<f64> {
        check_dim("features", self.n, phi.len())?;
        Ok(self.eval_unchecked(phi))
    }

    fn eval_unchecked(&self, phi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let x = dot(&t.omega, phi);
                t.a * x.sin() + t.b * x.cos()
            })
            .sum()
    }

    /// Drops terms with max(|a|, |b|) below `threshold`.
    pub fn prune(&self, threshold: f64) -> FourierSeries {
        FourierSeries {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|t| t.a.abs().max(t.b.abs()) >= threshold)
                .cloned()
                .collect(),
        }
    }

    /// Wave vectors with a nonzero coefficient.
    pub fn support(&self) -> Vec<Vec<i32>> {
        self.terms
            .iter()
            .filter(|t| t.a != 0.0 || t.b != 0.0)
            .map(|t| t.omega.clone())
            .collect()
    }
}

pub fn eval_series(series: &FourierSeries, phi: &[f64]) -> Result<f64> {
    series.eval(phi)
}

pub fn prune(series: &FourierSeries, threshold: f64) -> FourierSeries {
    series.prune(threshold)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingStrategy {
    UniformRandom,
    /// Tensor grid with c·(2N_i + 1) points per axis, c the smallest
    /// multiplier reaching the requested sample count.
    RegularGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Defaults to three times the number of unknowns.
    pub samples: Option<usize>,
    pub strategy: SamplingStrategy,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            samples: None,
            strategy: SamplingStrategy::UniformRandom,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub series: FourierSeries,
    pub residual_rms: f64,
    pub evaluations: usize,
}

/// Sample points in [0, 2π)ⁿ.
pub fn sample_points(lattice: &FrequencyLattice, config: &FitConfig) -> Result<Vec<Vec<f64>>> {
    let unknowns = lattice.unknown_count();
    let requested = config.samples.unwrap_or(3 * unknowns);
    if requested < unknowns {
        return Err(Error::Underdetermined {
            required: unknowns,
            got: requested,
        });
    }
    let n = lattice.feature_count();
    Ok(match config.strategy {
        SamplingStrategy::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..requested)
                .map(|_| (0..n).map(|_| rng.random_range(0.0..TAU)).collect())
                .collect()
        }
        SamplingStrategy::RegularGrid => {
            let base: Vec<usize> = lattice.bounds().iter().map(|&b| 2 * b + 1).collect();
            let mut c = 1;
            while base.iter().map(|&m| m * c).product::<usize>() < requested {
                c += 1;
            }
            let sizes: Vec<usize> = base.iter().map(|&m| m * c).collect();
            let total: usize = sizes.iter().product();
            (0..total)
                .map(|mut idx| {
                    let mut p = vec![0.0; n];
                    for i in (0..n).rev() {
                        p[i] = TAU * (idx % sizes[i]) as f64 / sizes[i] as f64;
                        idx /= sizes[i];
                    }
                    p
                })
                .collect()
        }
    })
}

/// Least-squares fit of the lattice-limited Fourier basis to model samples.
pub fn fit<M: Model + ?Sized>(
    model: &M,
    lattice: &FrequencyLattice,
    config: &FitConfig,
) -> Result<FitResult> {
    check_dim("lattice", model.feature_count(), lattice.feature_count())?;
    let points = sample_points(lattice, config)?;
    let values = model.eval_batch(&points);
    fit_samples(lattice, &points, &values)
}

/// Least-squares fit to given sample points and values.
pub fn fit_samples(
    lattice: &FrequencyLattice,
    points: &[Vec<f64>],
    values: &[f64],
) -> Result<FitResult> {
    check_dim("sample values", points.len(), values.len())?;
    let omegas = lattice.canonical();
    let unknowns = 2 * omegas.len() - 1;
    if points.len() < unknowns {
        return Err(Error::Underdetermined {
            required: unknowns,
            got: points.len(),
        });
    }
    for p in points {
        check_dim("sample point", lattice.feature_count(), p.len())?;
    }

    let design = DMatrix::from_fn(points.len(), unknowns, |row, col| {
        // column 0 is the constant; then (sin, cos) per nonzero ω
        if col == 0 {
            return 1.0;
        }
        let omega = &omegas[(col + 1) / 2];
        let x = dot(omega, &points[row]);
        if col % 2 == 1 {
            x.sin()
        } else {
            x.cos()
        }
    });
    let rhs = DVector::from_column_slice(values);

    let qr = design.clone().qr();
    let r = qr.r();
    let scale = (0..unknowns).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let rank = (0..unknowns)
        .filter(|&i| r[(i, i)].abs() > 1e-10 * scale.max(f64::MIN_POSITIVE))
        .count();
    if rank < unknowns {
        return Err(Error::RankDeficient { rank, unknowns });
    }
    let qty = qr.q().transpose() * &rhs;
    let coeffs = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { rank, unknowns })?;

    let residual = &design * &coeffs - &rhs;
    let residual_rms = (residual.norm_squared() / points.len() as f64).sqrt();

    let mut terms = vec![FourierTerm {
        omega: omegas[0].clone(),
        a: 0.0,
        b: coeffs[0],
    }];
    for (k, omega) in omegas.iter().enumerate().skip(1) {
        terms.push(FourierTerm {
            omega: omega.clone(),
            a: coeffs[2 * k - 1],
            b: coeffs[2 * k],
        });
    }
    Ok(FitResult {
        series: FourierSeries {
            n: lattice.feature_count(),
            terms,
        },
        residual_rms,
        evaluations: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FnModel;

    #[test]
    fn lattice_sizes() {
        let l = FrequencyLattice::new(vec![1, 1]);
        assert_eq!(l.size(), 9);
        assert_eq!(l.iter().count(), 9);
        assert_eq!(l.canonical().len(), 5);
        assert_eq!(l.unknown_count(), 9);
        let l = FrequencyLattice::new(vec![2, 0, 1]);
        assert_eq!(l.size(), 15);
        assert_eq!(l.canonical().len(), 8);
        for w in l.canonical().iter().skip(1) {
            let neg: Vec<i32> = w.iter().map(|c| -c).collect();
            assert!(!l.canonical().contains(&neg));
        }
    }

    #[test]
    fn fits_a_cosine() {
        let model = FnModel::new(2, |x: &[f64]| x[0].cos());
        let lattice = FrequencyLattice::new(vec![1, 1]);
        let r = fit(&model, &lattice, &FitConfig { seed: 3, ..Default::default() }).unwrap();
        assert!(r.residual_rms < 1e-9);
        for t in &r.series.terms {
            let (ea, eb) = if t.omega == [1, 0] { (0.0, 1.0) } else { (0.0, 0.0) };
            assert!((t.a - ea).abs() < 1e-9 && (t.b - eb).abs() < 1e-9, "{t:?}");
        }
    }

    #[test]
    fn zero_model_gives_zero_series() {
        let model = FnModel::new(2, |_: &[f64]| 0.0);
        let r = fit(&model, &FrequencyLattice::new(vec![1, 1]), &FitConfig::default()).unwrap();
        assert!(r.series.terms.iter().all(|t| t.a == 0.0 && t.b == 0.0));
    }

    #[test]
    fn underdetermined_and_rank_deficient() {
        let model = FnModel::new(2, |x: &[f64]| x[0].sin());
        let lattice = FrequencyLattice::new(vec![1, 1]);
        let err = fit(&model, &lattice, &FitConfig { samples: Some(5), ..Default::default() });
        assert!(matches!(err, Err(Error::Underdetermined { required: 9, got: 5 })));
        // all samples on one point
        let pts = vec![vec![0.3, 0.3]; 20];
        let vals = vec![0.0; 20];
        assert!(matches!(
            fit_samples(&lattice, &pts, &vals),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn regular_grid_is_exact() {
        let f = |x: &[f64]| 0.3 + (x[0] - 2.0 * x[1]).sin() - 0.5 * (x[1]).cos();
        let model = FnModel::new(2, f);
        let lattice = FrequencyLattice::new(vec![1, 2]);
        let cfg = FitConfig { samples: Some(15), strategy: SamplingStrategy::RegularGrid, seed: 0 };
        let r = fit(&model, &lattice, &cfg).unwrap();
        assert_eq!(r.evaluations, 15);
        assert!((r.series.term(&[1, -2]).unwrap().a - 1.0).abs() < 1e-12);
        assert!((r.series.term(&[0, 1]).unwrap().b + 0.5).abs() < 1e-12);
        assert!((r.series.term(&[0, 0]).unwrap().b - 0.3).abs() < 1e-12);
    }

    #[test]
    fn eval_and_prune() {
        let s = FourierSeries::new(2, vec![FourierTerm { omega: vec![0, 0], a: 0.0, b: 0.5 }]).unwrap();
        assert_eq!(s.eval(&[1.0, 2.0]).unwrap(), 0.5);
        assert!(s.eval(&[1.0]).is_err());
        let s = FourierSeries::new(2, vec![FourierTerm { omega: vec![1, 0], a: 0.0, b: 1.0 }]).unwrap();
        for x in [0.0, 1.0, -3.0] {
            assert_eq!(s.eval(&[0.0, x]).unwrap(), 1.0);
        }
        assert_eq!(s.prune(0.0), s);
        assert!(s.prune(2.0).terms.is_empty());
    }

    #[test]
    fn canonicalizes_negative_vectors() {
        let s = FourierSeries::new(
            2,
            vec![
                FourierTerm { omega: vec![-1, 1], a: 0.7, b: 0.2 },
                FourierTerm { omega: vec![1, -1], a: 0.1, b: 0.1 },
            ],
        )
        .unwrap();
        assert_eq!(s.terms.len(), 1);
        let t = &s.terms[0];
        assert_eq!(t.omega, vec![1, -1]);
        assert!((t.a - (-0.6)).abs() < 1e-15 && (t.b - 0.3).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let s = FourierSeries::new(2, vec![FourierTerm { omega: vec![1, 0], a: 0.0, b: 1.0 }]).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v, serde_json::json!({"n": 2, "terms": [{"omega": [1, 0], "a": 0.0, "b": 1.0}]}));
        assert!(serde_json::from_str::<FourierSeries>(r#"{"n":2,"terms":[{"omega":[1],"a":0,"b":1}]}"#).is_err());
    }
}
