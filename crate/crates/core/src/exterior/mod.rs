//! Dense exterior algebra on `R^6` and `R^7` (any dimension up to 8 works).
//!
//! Forms are constant-coefficient and stored in the lexicographic basis of
//! k-subsets. Metric-dependent operations take an explicit [`Metric`].

mod basis;
mod form;
mod metric;
mod wave;

pub use basis::{binomial, MAX_DIM};
pub use form::Form;
pub(crate) use form::unit;
pub use metric::{Endomorphism, Metric};
pub use wave::{symbol_d, symbol_dstar, PlaneWave};

use crate::error::{Error, Result};

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{a} vs {b}")))
    }
}

/// Exterior product.
pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    same_dim(a.dim(), b.dim())?;
    if a.degree() + b.degree() > a.dim() {
        return Err(Error::DegreeMismatch(format!(
            "degree {} exceeds dimension {}",
            a.degree() + b.degree(),
            a.dim()
        )));
    }
    Ok(a.wedge(b))
}

/// Contraction `x ⌟ a`.
pub fn interior(x: &[f64], a: &Form) -> Result<Form> {
    same_dim(x.len(), a.dim())?;
    if a.degree() == 0 {
        return Err(Error::DegreeMismatch("contraction into a function".into()));
    }
    Ok(a.interior(x))
}

/// Hodge star for the metric `g` and orientation `±1`.
pub fn hodge(g: &Metric, orientation: f64, a: &Form) -> Result<Form> {
    same_dim(g.dim(), a.dim())?;
    if orientation.abs() != 1.0 {
        return Err(Error::InvalidInput("orientation must be +1 or -1".into()));
    }
    Ok(g.hodge(a, orientation))
}

/// Induced inner product of two k-forms.
pub fn form_inner(g: &Metric, a: &Form, b: &Form) -> Result<f64> {
    same_dim(g.dim(), a.dim())?;
    same_dim(a.dim(), b.dim())?;
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch(format!("{} vs {}", a.degree(), b.degree())));
    }
    Ok(g.inner(a, b))
}

/// Natural action `S_*`.
pub fn endo_action(s: &Endomorphism, a: &Form) -> Result<Form> {
    same_dim(s.dim(), a.dim())?;
    Ok(s.act(a))
}

/// Sign of `⋆⋆` on k-forms in dimension n for a Riemannian metric.
pub fn star_star_sign(n: usize, k: usize) -> f64 {
    if (k * (n - k)).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Inverse of the Hodge star.
pub fn hodge_inverse(g: &Metric, orientation: f64, a: &Form) -> Form {
    let n = a.dim();
    let k = n - a.degree();
    g.hodge(a, orientation).scale(star_star_sign(n, k))
}
