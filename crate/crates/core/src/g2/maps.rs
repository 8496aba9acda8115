use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::structure::G2Structure;
use crate::error::{Error, Result};
use crate::exterior::{Endomorphism, Form};
use crate::linalg::{matrix_of, pinv, to_dvec};

/// Tolerance used to decide membership of an irreducible summand.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// First-order change of `g_φ` as `δg = c·g + g(S·, ·)` with `S` traceless and
/// `g`-symmetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricVariation {
    pub conformal: f64,
    pub traceless: Endomorphism,
}

impl MetricVariation {
    /// `δg` as a symmetric matrix.
    pub fn tensor(&self, s: &G2Structure) -> DMatrix<f64> {
        let g = s.metric().matrix();
        g * self.conformal + g * self.traceless.matrix()
    }
}

fn unvectorize(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(7, 7, |i, j| v[7 * i + j])
}

impl G2Structure {
    /// Traceless `g`-self-adjoint part of an endomorphism.
    fn sym0(&self, s: &DMatrix<f64>) -> DMatrix<f64> {
        let g = self.metric().matrix();
        let gi = self.metric().inverse();
        let p = (s + gi * s.transpose() * g) * 0.5;
        let t = p.trace() / 7.0;
        p - DMatrix::identity(7, 7) * t
    }

    fn i_phi_matrix(&self) -> DMatrix<f64> {
        matrix_of(49, 35, |v| Endomorphism::from_matrix(self.sym0(&unvectorize(v))).act(self.phi()).coeffs().to_vec())
    }

    /// `i_φ(S) = S_*φ` on traceless symmetric endomorphisms.
    pub fn i_phi(&self, s: &Endomorphism) -> Result<Form> {
        let m = s.matrix();
        if m.nrows() != 7 {
            return Err(Error::DimensionMismatch("expected an endomorphism of R^7".into()));
        }
        let scale = 1.0 + m.amax();
        if (self.sym0(m) - m).amax() > MEMBERSHIP_TOL * scale {
            return Err(Error::InvalidInput("endomorphism is not traceless and g-symmetric".into()));
        }
        Ok(s.act(self.phi()))
    }

    /// Inverse of `i_φ` on `Λ³₂₇`.
    pub fn i_phi_inverse(&self, gamma: &Form) -> Result<Endomorphism> {
        self.require_in(gamma, 3, "27")?;
        let v = pinv(&self.i_phi_matrix()) * to_dvec(gamma);
        Ok(Endomorphism::from_matrix(self.sym0(&unvectorize(v.as_slice()))))
    }

    /// Rank of `i_φ` on traceless symmetric endomorphisms.
    pub fn i_phi_rank(&self) -> usize {
        crate::linalg::numerical_rank(&self.i_phi_matrix(), 1e-9)
    }

    pub(crate) fn require_in(&self, a: &Form, degree: usize, label: &str) -> Result<()> {
        if a.dim() != 7 || a.degree() != degree {
            return Err(Error::DegreeMismatch(format!("expected a {degree}-form on R^7")));
        }
        let off = (&self.part(a, label) - a).max_abs();
        if off > MEMBERSHIP_TOL * (1.0 + a.max_abs()) {
            return Err(Error::InvalidInput(format!("form is not in the {label}-dimensional summand (off by {off:.3e})")));
        }
        Ok(())
    }

    fn require_degree(&self, a: &Form, degree: usize) -> Result<()> {
        if a.dim() != 7 || a.degree() != degree {
            return Err(Error::DegreeMismatch(format!("expected a {degree}-form on R^7")));
        }
        Ok(())
    }

    /// Linearisation of `ψ ↦ φ`: `𝒥(χ) = ¾⋆χ₁ + ⋆χ₇ − ⋆χ₂₇`.
    pub fn jmap(&self, chi: &Form) -> Result<Form> {
        self.require_degree(chi, 4)?;
        let c = self.project(chi)?;
        let mut out = self.hodge(c.get("1")).scale(0.75);
        out += &self.hodge(c.get("7"));
        out -= &self.hodge(c.get("27"));
        Ok(out)
    }

    /// Change of `g_φ` along `δψ = χ`. Writing `χ₁ = fψ`, the conformal part is
    /// `f/2` and the traceless part is `2 i_φ⁻¹(⋆χ₂₇) = −2 i_φ⁻¹(δφ₂₇)`.
    pub fn metric_variation(&self, chi: &Form) -> Result<MetricVariation> {
        self.require_degree(chi, 4)?;
        let c = self.project(chi)?;
        let f = self.metric().inner(c.get("1"), self.psi()) / self.metric().norm_sq(self.psi());
        let s = self.i_phi_inverse(&self.hodge(c.get("27")))?;
        Ok(MetricVariation { conformal: 0.5 * f, traceless: s.scale(2.0) })
    }
}
