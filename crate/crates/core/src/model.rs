//! The black-box model interface shared by every explainer.

/// A real-valued model over `feature_count` inputs.
///
/// Implementations must be safe to call from several threads; noisy models
/// draw fresh noise on every call.
pub trait Model: Sync {
    fn feature_count(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// Evaluates each row. Row order fixes the noise streams, so results are
    /// reproducible however the work is scheduled.
    fn eval_batch(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.eval(x)).collect()
    }
}

/// Wraps a closure as a [`Model`].
pub struct FnModel<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnModel<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnModel { n, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Model for FnModel<F> {
    fn feature_count(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl<M: Model + ?Sized> Model for &M {
    fn feature_count(&self) -> usize {
        (**self).feature_count()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }

    fn eval_batch(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        (**self).eval_batch(xs)
    }
}
