//! Dense monomial polynomials, mainly for building test cases.

use std::collections::BTreeMap;

use super::poly::{RankOnePoly, RankOneTerm};
use crate::error::{check_dim, Result};

/// Σ c_α x^α keyed by exponent vector α.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DensePoly {
    pub n: usize,
    pub coeffs: BTreeMap<Vec<u32>, f64>,
}

impl DensePoly {
    pub fn new(n: usize) -> Self {
        DensePoly {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, exponents: Vec<u32>, coeff: f64) -> Result<()> {
        check_dim("exponent vector", self.n, exponents.len())?;
        *self.coeffs.entry(exponents).or_default() += coeff;
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim("input", self.n, x.len())?;
        Ok(self
            .coeffs
            .iter()
            .map(|(alpha, c)| {
                c * alpha
                    .iter()
                    .zip(x)
                    .map(|(&a, &xi)| xi.powi(a as i32))
                    .product::<f64>()
            })
            .sum())
    }

    /// Rank-one form via the polarization identity
    /// x^α = (1/k!) Σ_{0≤β≤α} (−1)^{|α−β|} ∏ C(α_i, β_i) ⟨β, x⟩^k, k = |α|.
    pub fn to_rank_one(&self) -> RankOnePoly {
        let mut terms = Vec::new();
        for (alpha, &c) in &self.coeffs {
            let k: u32 = alpha.iter().sum();
            if k == 0 {
                terms.push(RankOneTerm::constant(self.n, c));
                continue;
            }
            let k_fact: f64 = (1..=k).map(f64::from).product();
            let mut beta = vec![0u32; self.n];
            loop {
                if beta.iter().any(|&b| b > 0) {
                    let mut w = c / k_fact;
                    for (&a, &b) in alpha.iter().zip(&beta) {
                        w *= binomial(a, b);
                        if (a - b) % 2 == 1 {
                            w = -w;
                        }
                    }
                    terms.push(RankOneTerm::new(
                        k as usize,
                        w,
                        beta.iter().map(|&b| f64::from(b)).collect(),
                    ));
                }
                // odometer over 0 ≤ β ≤ α
                let mut i = 0;
                while i < self.n && beta[i] == alpha[i] {
                    beta[i] = 0;
                    i += 1;
                }
                if i == self.n {
                    break;
                }
                beta[i] += 1;
            }
        }
        RankOnePoly {
            n: self.n,
            terms,
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// xᵀCx as a rank-one polynomial. `c` must be square and symmetric.
pub fn quadratic_form_poly(c: &[Vec<f64>]) -> Result<RankOnePoly> {
    super::shap::check_symmetric(c)?;
    let n = c.len();
    let mut dense = DensePoly::new(n);
    for i in 0..n {
        for j in i..n {
            let mut alpha = vec![0u32; n];
            alpha[i] += 1;
            alpha[j] += 1;
            let coeff = if i == j { c[i][i] } else { 2.0 * c[i][j] };
            if coeff != 0.0 {
                dense.add(alpha, coeff)?;
            }
        }
    }
    Ok(dense.to_rank_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_via_polarization() {
        let mut d = DensePoly::new(2);
        d.add(vec![1, 1], 1.0).unwrap();
        let p = d.to_rank_one();
        for x in [[1.0, 1.0], [2.0, -3.0], [0.5, 0.25]] {
            assert!((p.eval(&x).unwrap() - x[0] * x[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn higher_monomials_agree() {
        let mut d = DensePoly::new(3);
        d.add(vec![2, 1, 0], 0.7).unwrap();
        d.add(vec![1, 1, 3], -1.2).unwrap();
        d.add(vec![0, 0, 0], 2.0).unwrap();
        let p = d.to_rank_one();
        for x in [[0.3, -1.1, 0.8], [1.0, 2.0, -0.5]] {
            assert!((p.eval(&x).unwrap() - d.eval(&x).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn quadratic_form() {
        let c = vec![vec![1.0, 0.5], vec![0.5, -2.0]];
        let p = quadratic_form_poly(&c).unwrap();
        let x = [0.7, -1.3];
        let expect = x[0] * x[0] + x[0] * x[1] - 2.0 * x[1] * x[1];
        assert!((p.eval(&x).unwrap() - expect).abs() < 1e-12);
    }
}
