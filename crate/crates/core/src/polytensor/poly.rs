use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};

/// λ·⟨v, x⟩^k. Order-0 terms are constants with a zero direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneTerm {
    #[serde(rename = "k")]
    pub order: usize,
    #[serde(rename = "lambda")]
    pub weight: f64,
    #[serde(rename = "v")]
    pub direction: Vec<f64>,
}

impl RankOneTerm {
    pub fn new(order: usize, weight: f64, direction: Vec<f64>) -> Self {
        let direction = if order == 0 {
            vec![0.0; direction.len()]
        } else {
            direction
        };
        RankOneTerm {
            order,
            weight,
            direction,
        }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        RankOneTerm {
            order: 0,
            weight: value,
            direction: vec![0.0; n],
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        if self.order == 0 {
            return self.weight;
        }
        let t: f64 = self.direction.iter().zip(x).map(|(v, x)| v * x).sum();
        self.weight * t.powi(self.order as i32)
    }
}

/// A multivariate polynomial stored as a sum of weighted symmetric tensor
/// powers λ·v^⊗k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoly")]
pub struct RankOnePoly {
    pub n: usize,
    pub terms: Vec<RankOneTerm>,
}

#[derive(Deserialize)]
struct RawPoly {
    n: usize,
    terms: Vec<RankOneTerm>,
}

impl TryFrom<RawPoly> for RankOnePoly {
    type Error = crate::error::Error;

    fn try_from(raw: RawPoly) -> Result<Self> {
        RankOnePoly::new(raw.n, raw.terms)
    }
}

impl RankOnePoly {
    pub fn new(n: usize, terms: Vec<RankOneTerm>) -> Result<Self> {
        for t in &terms {
            check_dim("term direction", n, t.direction.len())?;
        }
        Ok(RankOnePoly { n, terms })
    }

    pub fn zero(n: usize) -> Self {
        RankOnePoly { n, terms: Vec::new() }
    }

    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.order).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim("input", self.n, x.len())?;
        Ok(self.terms.iter().map(|t| t.eval(x)).sum())
    }

    /// Scales every weight by `alpha`.
    pub fn scaled(&self, alpha: f64) -> RankOnePoly {
        RankOnePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| RankOneTerm {
                    weight: alpha * t.weight,
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// Sum of two polynomials (concatenated terms).
    pub fn plus(&self, other: &RankOnePoly) -> Result<RankOnePoly> {
        check_dim("polynomial", self.n, other.n)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(RankOnePoly { n: self.n, terms })
    }
}

pub fn eval_poly(poly: &RankOnePoly, x: &[f64]) -> Result<f64> {
    poly.eval(x)
}
