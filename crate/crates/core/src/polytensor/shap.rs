//! Closed-form Baseline SHAP for polynomials in rank-one form.
//!
//! Write A = M + Δₑ/2 + D_S and A' = M − Δₑ/2 + D_S with M = (x+b)/2,
//! Δ = x − b and D_S = Σ_{h≠e} ±Δ_h/2 (plus for h ∈ S). Then for one term
//! λ⟨v,·⟩^r the marginal contribution is
//!
//! ```text
//! λ Σ_{j+m+k=r} r!/(j! m! k!) ⟨v,M⟩^j ⟨v,Δₑ/2⟩^m (1 − (−1)^m) ⟨v,D_S⟩^k
//! ```
//!
//! and under the Shapley weighting the expected value of ∏_{h∈L} ±1 over a
//! set L of q coordinates is 1/(q+1) for even q and 0 for odd q. Expanding
//! ⟨v,D_S⟩^k with the multinomial theorem gives
//!
//! ```text
//! Sh(e) = 2 Σ_{m odd, k even} r!/(j! m! k!) λ ⟨v,M⟩^j ⟨v,Δₑ/2⟩^m
//!           Σ_{|γ|=k, γₑ=0} k!/γ! ∏_h (v_h Δ_h/2)^{γ_h} / (l(γ)+1)
//! ```
//!
//! with l(γ) the number of odd entries of γ.

use super::poly::RankOnePoly;
use crate::error::{check_dim, Error, Result};
use crate::explainers::{AttributionResult, Method};

/// Work counters for one PolynomialSHAP call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShapStats {
    /// multi-indices γ visited
    pub multi_indices: u64,
    /// (term, feature) pairs with a nonzero contribution
    pub term_features: u64,
}

impl ShapStats {
    pub fn operations(&self) -> u64 {
        self.multi_indices + self.term_features
    }
}

struct Moments<'a> {
    coords: &'a [f64],
    kmax: usize,
    factorial: &'a [f64],
    sums: Vec<f64>,
    visits: u64,
}

impl Moments<'_> {
    /// Accumulates Σ_{|γ|=k} k!/γ! ∏ c^γ / (l(γ)+1) into `sums[k]` for even k.
    fn walk(&mut self, idx: usize, total: usize, acc: f64, odd: usize) {
        if idx == self.coords.len() {
            self.visits += 1;
            if total % 2 == 0 {
                self.sums[total] += self.factorial[total] * acc / (odd + 1) as f64;
            }
            return;
        }
        let c = self.coords[idx];
        let mut pow = 1.0; // c^g / g!
        for g in 0..=(self.kmax - total) {
            self.walk(idx + 1, total + g, acc * pow, odd + g % 2);
            pow *= c / (g + 1) as f64;
        }
    }
}

/// Per-feature PolynomialSHAP values together with work counters.
pub fn polynomial_shap_values(
    poly: &RankOnePoly,
    x: &[f64],
    b: &[f64],
) -> Result<(Vec<f64>, ShapStats)> {
    let n = poly.n;
    check_dim("input", n, x.len())?;
    check_dim("baseline", n, b.len())?;
    let mut sh = vec![0.0; n];
    let mut stats = ShapStats::default();
    if x == b {
        return Ok((sh, stats));
    }
    let mid: Vec<f64> = x.iter().zip(b).map(|(x, b)| 0.5 * (x + b)).collect();
    let half: Vec<f64> = x.iter().zip(b).map(|(x, b)| 0.5 * (x - b)).collect();
    let max_order = poly.max_order();
    let factorial: Vec<f64> = std::iter::once(1.0)
        .chain((1..=max_order).scan(1.0, |f, i| {
            *f *= i as f64;
            Some(*f)
        }))
        .collect();

    let mut others = Vec::with_capacity(n);
    for term in poly.terms.iter().filter(|t| t.order > 0) {
        let r = term.order;
        let v = &term.direction;
        let along_mid: f64 = v.iter().zip(&mid).map(|(v, m)| v * m).sum();
        let coords: Vec<f64> = v.iter().zip(&half).map(|(v, h)| v * h).collect();
        // largest even k with k ≤ r − 1
        let kmax = (r - 1) & !1;
        for e in 0..n {
            let along_e = coords[e];
            if along_e == 0.0 {
                continue;
            }
            stats.term_features += 1;
            others.clear();
            others.extend(
                coords
                    .iter()
                    .enumerate()
                    .filter(|&(h, &c)| h != e && c != 0.0)
                    .map(|(_, &c)| c),
            );
            let mut moments = Moments {
                coords: &others,
                kmax,
                factorial: &factorial,
                sums: vec![0.0; kmax + 1],
                visits: 0,
            };
            moments.walk(0, 0, 1.0, 0);
            stats.multi_indices += moments.visits;

            let mut total = 0.0;
            for m in (1..=r).step_by(2) {
                for k in (0..=(r - m)).step_by(2) {
                    let j = r - m - k;
                    let multinomial = factorial[r] / (factorial[j] * factorial[m] * factorial[k]);
                    total += multinomial
                        * along_mid.powi(j as i32)
                        * along_e.powi(m as i32)
                        * moments.sums[k];
                }
            }
            sh[e] += 2.0 * term.weight * total;
        }
    }
    Ok((sh, stats))
}

/// Exact Baseline SHAP of a rank-one polynomial at input `x`, baseline `b`.
pub fn polynomial_shap(poly: &RankOnePoly, x: &[f64], b: &[f64]) -> Result<AttributionResult> {
    let (values, _) = polynomial_shap_values(poly, x, b)?;
    Ok(AttributionResult::new(Method::PolynomialShap, values, 0, x, b))
}

pub(crate) fn check_symmetric(c: &[Vec<f64>]) -> Result<()> {
    let n = c.len();
    for (i, row) in c.iter().enumerate() {
        check_dim("matrix row", n, row.len())?;
        for j in 0..i {
            let diff = (c[i][j] - c[j][i]).abs();
            if diff > 1e-12 {
                return Err(Error::AsymmetricMatrix { i, j, diff });
            }
        }
    }
    Ok(())
}

/// Baseline SHAP of the quadratic form xᵀCx: Sh(e) = 2 MᵀC Δₑ.
pub fn shap_quadratic(c: &[Vec<f64>], x: &[f64], b: &[f64]) -> Result<AttributionResult> {
    check_symmetric(c)?;
    let n = c.len();
    check_dim("input", n, x.len())?;
    check_dim("baseline", n, b.len())?;
    let values = (0..n)
        .map(|e| {
            let cm: f64 = (0..n).map(|h| c[e][h] * 0.5 * (x[h] + b[h])).sum();
            2.0 * cm * (x[e] - b[e])
        })
        .collect();
    Ok(AttributionResult::new(Method::QuadraticShap, values, 0, x, b))
}
