//! Trigonometric to polynomial conversion of Fourier series.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::poly::{RankOnePoly, RankOneTerm};
use crate::error::{check_dim, Error, Result};
use crate::fourier::FourierSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionScheme {
    Taylor,
    Chebyshev,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    pub scheme: ExpansionScheme,
    /// Highest polynomial order K.
    pub order: usize,
    /// Bound on |⟨ω, φ⟩| for Chebyshev fits. When absent, callers that know
    /// the box being explained derive a radius per wave vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_radius: Option<f64>,
}

impl ExpansionConfig {
    pub fn taylor(order: usize) -> Self {
        ExpansionConfig {
            scheme: ExpansionScheme::Taylor,
            order,
            domain_radius: None,
        }
    }

    pub fn chebyshev(order: usize, domain_radius: Option<f64>) -> Self {
        ExpansionConfig {
            scheme: ExpansionScheme::Chebyshev,
            order,
            domain_radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.domain_radius {
            Some(r) if !(r > 0.0 && r.is_finite()) => Err(Error::InvalidConfig(format!(
                "domain radius {r} must be positive"
            ))),
            _ => Ok(()),
        }
    }
}

/// Taylor coefficients of (sin t, cos t) up to t^order.
fn taylor_coefficients(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut sin = vec![0.0; order + 1];
    let mut cos = vec![0.0; order + 1];
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            cos[k] = sign / fact;
        } else {
            sin[k] = sign / fact;
        }
    }
    (sin, cos)
}

/// Monomial coefficients of the degree-`order` Chebyshev interpolant of `f`
/// on [−radius, radius], from a discrete cosine projection at the
/// `order + 1` Chebyshev nodes.
pub fn chebyshev_monomials(f: impl Fn(f64) -> f64, order: usize, radius: f64) -> Vec<f64> {
    let nodes = order + 1;
    let theta: Vec<f64> = (0..nodes)
        .map(|i| PI * (i as f64 + 0.5) / nodes as f64)
        .collect();
    let values: Vec<f64> = theta.iter().map(|t| f(radius * t.cos())).collect();
    let cheb: Vec<f64> = (0..nodes)
        .map(|j| {
            let s: f64 = values
                .iter()
                .zip(&theta)
                .map(|(v, t)| v * (j as f64 * t).cos())
                .sum();
            let c = 2.0 * s / nodes as f64;
            if j == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect();

    // T_j in the monomial basis of s = t / radius
    let mut monomial = vec![0.0; nodes];
    let mut prev = vec![0.0; nodes];
    let mut cur = vec![0.0; nodes];
    prev[0] = 1.0;
    if nodes > 1 {
        cur[1] = 1.0;
    }
    for (j, c) in cheb.iter().enumerate() {
        let tj = if j == 0 { &prev } else { &cur };
        for (m, t) in monomial.iter_mut().zip(tj) {
            *m += c * t;
        }
        if j >= 1 && j + 1 < nodes {
            let mut next = vec![0.0; nodes];
            for k in 0..nodes {
                let shifted = if k > 0 { 2.0 * cur[k - 1] } else { 0.0 };
                next[k] = shifted - prev[k];
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    let mut scale = 1.0;
    for m in monomial.iter_mut() {
        *m *= scale;
        scale /= radius;
    }
    monomial
}

fn chebyshev_coefficients(order: usize, radius: f64) -> (Vec<f64>, Vec<f64>) {
    let mut sin = chebyshev_monomials(f64::sin, order, radius);
    let mut cos = chebyshev_monomials(f64::cos, order, radius);
    // exact parity: sin is odd, cos even
    for k in 0..=order {
        if k % 2 == 0 {
            sin[k] = 0.0;
        } else {
            cos[k] = 0.0;
        }
    }
    for (name, coeffs) in [("sin", &sin), ("cos", &cos)] {
        if coeffs
            .iter()
            .any(|c| !c.is_finite() || (*c != 0.0 && c.abs() < f64::MIN_POSITIVE))
        {
            log::warn!(
                "Chebyshev {name} coefficients of order {order} on radius {radius} under- or overflow"
            );
        }
    }
    (sin, cos)
}

/// Replaces every Fourier term by a polynomial in ⟨ω, φ⟩ of order at most
/// K, expanded about the origin. Chebyshev needs `domain_radius`.
pub fn expand_series(series: &FourierSeries, config: &ExpansionConfig) -> Result<RankOnePoly> {
    expand_series_about(series, config, &vec![0.0; series.n], None)
}

/// Expansion in ψ = φ − `center`: each term a sin⟨ω,φ⟩ + b cos⟨ω,φ⟩ is
/// rewritten as A sin⟨ω,ψ⟩ + B cos⟨ω,ψ⟩ and the two univariate functions
/// are replaced by polynomials. For Chebyshev without a configured radius,
/// the radius for ω is Σ|ω_i|·`half_width`_i, the exact bound of |⟨ω,ψ⟩| on
/// the box center ± half_width.
pub fn expand_series_about(
    series: &FourierSeries,
    config: &ExpansionConfig,
    center: &[f64],
    half_width: Option<&[f64]>,
) -> Result<RankOnePoly> {
    config.validate()?;
    let n = series.n;
    check_dim("expansion center", n, center.len())?;
    if let Some(h) = half_width {
        check_dim("box half width", n, h.len())?;
    }
    let order = config.order;
    let taylor = match config.scheme {
        ExpansionScheme::Taylor => Some(taylor_coefficients(order)),
        ExpansionScheme::Chebyshev => None,
    };

    let mut constant = 0.0;
    let mut has_constant = false;
    let mut terms = Vec::new();
    for t in &series.terms {
        let shift: f64 = t.omega.iter().zip(center).map(|(&w, c)| w as f64 * c).sum();
        let (sin_c, cos_c) = shift.sin_cos();
        let sin_part = t.a * cos_c - t.b * sin_c;
        let cos_part = t.a * sin_c + t.b * cos_c;
        if t.omega.iter().all(|&w| w == 0) {
            constant += t.b;
            has_constant = true;
            continue;
        }
        let owned;
        let (sin_k, cos_k) = match &taylor {
            Some((s, c)) => (s, c),
            None => {
                let radius = match (config.domain_radius, half_width) {
                    (Some(r), _) => r,
                    (None, Some(h)) => t
                        .omega
                        .iter()
                        .zip(h)
                        .map(|(&w, h)| (w as f64).abs() * h.abs())
                        .sum(),
                    (None, None) => {
                        return Err(Error::InvalidConfig(
                            "Chebyshev expansion needs a domain radius".into(),
                        ))
                    }
                };
                if radius == 0.0 {
                    // ⟨ω, ψ⟩ vanishes on the whole box
                    constant += cos_part;
                    has_constant = true;
                    continue;
                }
                owned = chebyshev_coefficients(order, radius);
                (&owned.0, &owned.1)
            }
        };
        let direction: Vec<f64> = t.omega.iter().map(|&w| w as f64).collect();
        for k in 0..=order {
            let coeff = sin_part * sin_k[k] + cos_part * cos_k[k];
            if k == 0 {
                constant += coeff;
                has_constant = true;
            } else if coeff != 0.0 {
                terms.push(RankOneTerm::new(k, coeff, direction.clone()));
            }
        }
    }
    if has_constant && constant != 0.0 {
        terms.insert(0, RankOneTerm::constant(n, constant));
    }
    RankOnePoly::new(n, terms)
}
