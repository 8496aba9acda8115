use serde::{Deserialize, Serialize};

use super::form::Form;
use super::metric::Metric;

/// A plane-wave form `e^{i<ξ,x>} (re + i·im)` with constant complex amplitude.
///
/// Principal symbols act on the amplitude: `d ↦ iξ∧` and `d* ↦ -i ξ♯⌟`, so
/// that `dd* + d*d ↦ |ξ|²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub xi: Vec<f64>,
    pub re: Form,
    pub im: Form,
}

impl PlaneWave {
    pub fn real(xi: &[f64], amplitude: Form) -> Self {
        assert_eq!(xi.len(), amplitude.dim());
        let im = Form::zero(amplitude.dim(), amplitude.degree());
        PlaneWave { xi: xi.to_vec(), re: amplitude, im }
    }

    pub fn degree(&self) -> usize {
        self.re.degree()
    }

    /// Multiplication of the amplitude by `i`.
    pub fn times_i(&self) -> PlaneWave {
        PlaneWave { xi: self.xi.clone(), re: -&self.im, im: self.re.clone() }
    }

    pub fn scale(&self, c: f64) -> PlaneWave {
        PlaneWave { xi: self.xi.clone(), re: self.re.scale(c), im: self.im.scale(c) }
    }

    pub fn add(&self, other: &PlaneWave) -> PlaneWave {
        PlaneWave { xi: self.xi.clone(), re: &self.re + &other.re, im: &self.im + &other.im }
    }

    /// Applies a real linear map to both parts of the amplitude.
    pub fn map(&self, f: impl Fn(&Form) -> Form) -> PlaneWave {
        PlaneWave { xi: self.xi.clone(), re: f(&self.re), im: f(&self.im) }
    }

    pub fn max_abs(&self) -> f64 {
        self.re.max_abs().max(self.im.max_abs())
    }
}

/// Symbol of `d`: `α ↦ iξ ∧ α`.
pub fn symbol_d(w: &PlaneWave) -> PlaneWave {
    let xi = Form::one_form(&w.xi);
    PlaneWave { xi: w.xi.clone(), re: -xi.wedge(&w.im), im: xi.wedge(&w.re) }
}

/// Symbol of `d*`: `α ↦ -i ξ♯ ⌟ α`.
pub fn symbol_dstar(g: &Metric, w: &PlaneWave) -> PlaneWave {
    let v = g.raise(&w.xi);
    PlaneWave { xi: w.xi.clone(), re: w.im.interior(&v), im: -w.re.interior(&v) }
}
