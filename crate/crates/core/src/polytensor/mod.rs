//! Polynomials as sums of weighted symmetric tensor powers, their
//! construction from Fourier series, and closed-form Baseline SHAP.

pub mod dense;
mod expand;
mod poly;
mod shap;

pub use dense::{quadratic_form_poly, DensePoly};
pub use expand::{
    chebyshev_monomials, expand_series, expand_series_about, ExpansionConfig, ExpansionScheme,
};
pub use poly::{eval_poly, RankOnePoly, RankOneTerm};
pub use shap::{polynomial_shap, polynomial_shap_values, shap_quadratic, ShapStats};
