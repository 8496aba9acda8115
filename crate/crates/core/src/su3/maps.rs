use nalgebra::DMatrix;

use super::structure::Su3Structure;
use crate::error::{Error, Result};
use crate::exterior::{Endomorphism, Form};
use crate::linalg::{from_dvec, matrix_of, pinv, to_dvec};

/// Tolerance used to decide membership of an irreducible summand.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Solves `ω ∧ ω = 2σ` by Newton iteration started from `hint` (the model
/// `ω0` when absent), returning the root on the side of the hint.
pub fn dual_of_4form(sigma: &Form, hint: Option<&Form>) -> Result<Form> {
    if sigma.dim() != 6 || sigma.degree() != 4 {
        return Err(Error::DegreeMismatch("expected a 4-form on R^6".into()));
    }
    let target = sigma.scale(2.0);
    let size = sigma.coeff_norm();
    if size == 0.0 {
        return Err(Error::Stability("the zero 4-form has no square root".into()));
    }
    let model = Su3Structure::model().omega().clone();
    let hint = hint.cloned().unwrap_or(model);
    if hint.dim() != 6 || hint.degree() != 2 {
        return Err(Error::DegreeMismatch("hint must be a 2-form on R^6".into()));
    }
    let h2 = hint.wedge(&hint).coeff_norm();
    if h2 == 0.0 {
        return Err(Error::InvalidInput("hint squares to zero".into()));
    }
    let mut omega = hint.scale((2.0 * size / h2).sqrt());
    for _ in 0..100 {
        let resid = &omega.wedge(&omega) - &target;
        if resid.coeff_norm() <= 1e-14 * size {
            return finish(omega, &hint, size);
        }
        let jac = matrix_of(15, 15, |c| omega.wedge(&Form::new(6, 2, c.to_vec()).unwrap()).scale(2.0).coeffs().to_vec());
        let step = match jac.clone().lu().solve(&to_dvec(&resid)) {
            Some(s) if s.iter().all(|x| x.is_finite()) => s,
            _ => pinv(&jac) * to_dvec(&resid),
        };
        omega = &omega - &from_dvec(6, 2, &step);
        if !omega.coeff_norm().is_finite() {
            break;
        }
    }
    let resid = (&omega.wedge(&omega) - &target).coeff_norm();
    if resid <= 1e-10 * size {
        return finish(omega, &hint, size);
    }
    Err(Error::Stability(format!("Newton iteration did not converge (residual {resid:.3e})")))
}

fn finish(omega: Form, hint: &Form, size: f64) -> Result<Form> {
    let top = omega.wedge(&omega).wedge(&omega).max_abs();
    if top <= 1e-8 * size.powf(1.5) {
        return Err(Error::Stability("the 4-form is not the square of a non-degenerate 2-form".into()));
    }
    Ok(if omega.dot(hint) < 0.0 { -omega } else { omega })
}


fn unvectorize(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(6, 6, |i, j| v[6 * i + j])
}

impl Su3Structure {
    /// Self-adjoint part with respect to `g`.
    fn sym_part(&self, s: &DMatrix<f64>) -> DMatrix<f64> {
        let g = self.metric().matrix();
        let gi = self.metric().inverse();
        (s + gi * s.transpose() * g) * 0.5
    }

    /// Part commuting (`sign = 1`) or anticommuting (`sign = -1`) with `J`.
    fn j_part(&self, s: &DMatrix<f64>, sign: f64) -> DMatrix<f64> {
        let j = self.j().matrix();
        (s - j * s * j * sign) * 0.5
    }

    fn project_sym_plus(&self, s: &DMatrix<f64>) -> DMatrix<f64> {
        let p = self.j_part(&self.sym_part(s), 1.0);
        let t = p.trace() / 6.0;
        p - DMatrix::identity(6, 6) * t
    }

    fn project_sym_minus(&self, s: &DMatrix<f64>) -> DMatrix<f64> {
        self.j_part(&self.sym_part(s), -1.0)
    }

    fn check_sym_traceless(&self, s: &Endomorphism) -> Result<()> {
        let m = s.matrix();
        let scale = 1.0 + m.amax();
        if (self.sym_part(m) - m).amax() > MEMBERSHIP_TOL * scale {
            return Err(Error::InvalidInput("endomorphism is not g-symmetric".into()));
        }
        if m.trace().abs() > MEMBERSHIP_TOL * scale {
            return Err(Error::InvalidInput("endomorphism is not traceless".into()));
        }
        Ok(())
    }

    /// `(I(S₊), Υ(S₋))` with `I(S) = S_*ω` on the `J`-commuting part and
    /// `Υ(S) = S_*ρ` on the `J`-anticommuting part.
    pub fn iso_sym(&self, s: &Endomorphism) -> Result<(Form, Form)> {
        self.check_sym_traceless(s)?;
        let plus = Endomorphism::from_matrix(self.j_part(s.matrix(), 1.0));
        let minus = Endomorphism::from_matrix(self.j_part(s.matrix(), -1.0));
        Ok((plus.act(self.omega()), minus.act(self.rho())))
    }

    fn plus_map(&self) -> DMatrix<f64> {
        matrix_of(36, 15, |v| {
            let s = Endomorphism::from_matrix(self.project_sym_plus(&unvectorize(v)));
            s.act(self.omega()).coeffs().to_vec()
        })
    }

    fn minus_map(&self) -> DMatrix<f64> {
        matrix_of(36, 20, |v| {
            let s = Endomorphism::from_matrix(self.project_sym_minus(&unvectorize(v)));
            s.act(self.rho()).coeffs().to_vec()
        })
    }

    /// Ranks of `I` on `Sym²₊` and `Υ` on `Sym²₋`.
    pub fn iso_sym_ranks(&self) -> (usize, usize) {
        use crate::linalg::numerical_rank;
        (numerical_rank(&self.plus_map(), 1e-9), numerical_rank(&self.minus_map(), 1e-9))
    }

    /// `I⁻¹ : Λ²₈ → Sym²₊`.
    pub fn iso_sym_plus_inverse(&self, beta: &Form) -> Result<Endomorphism> {
        self.require_in(beta, 2, "8")?;
        let v = pinv(&self.plus_map()) * to_dvec(beta);
        Ok(Endomorphism::from_matrix(self.project_sym_plus(&unvectorize(v.as_slice()))))
    }

    /// `Υ⁻¹ : Λ³₁₂ → Sym²₋`.
    pub fn iso_sym_minus_inverse(&self, gamma: &Form) -> Result<Endomorphism> {
        self.require_in(gamma, 3, "12")?;
        let v = pinv(&self.minus_map()) * to_dvec(gamma);
        Ok(Endomorphism::from_matrix(self.project_sym_minus(&unvectorize(v.as_slice()))))
    }

    /// `ι = ⋆ ∘ I : Sym²₊ → Λ⁴₈`.
    pub fn iota(&self, s: &Endomorphism) -> Result<Form> {
        Ok(self.hodge(&self.iso_sym(s)?.0))
    }

    /// `ι⁻¹ : Λ⁴₈ → Sym²₊`.
    pub fn iota_inverse(&self, chi: &Form) -> Result<Endomorphism> {
        self.require_in(chi, 4, "8")?;
        self.iso_sym_plus_inverse(&self.hodge(chi))
    }

    /// Errors unless `a` is a `degree`-form lying in the summand `label`.
    pub fn require_in(&self, a: &Form, degree: usize, label: &str) -> Result<()> {
        if a.dim() != 6 || a.degree() != degree {
            return Err(Error::DegreeMismatch(format!("expected a {degree}-form on R^6")));
        }
        let off = (&self.part(a, label) - a).max_abs();
        if off > MEMBERSHIP_TOL * (1.0 + a.max_abs()) {
            return Err(Error::InvalidInput(format!("form is not in the {label}-dimensional summand (off by {off:.3e})")));
        }
        Ok(())
    }

    /// Linearisation of `σ ↦ σ̂`: `𝒦(χ) = ½⋆χ₁ + ⋆χ₆ − ⋆χ₈`.
    pub fn kmap(&self, chi: &Form) -> Result<Form> {
        if chi.dim() != 6 || chi.degree() != 4 {
            return Err(Error::DegreeMismatch("𝒦 acts on 4-forms".into()));
        }
        let c = self.project(chi)?;
        let mut out = self.hodge(c.get("1")).scale(0.5);
        out += &self.hodge(c.get("6"));
        out -= &self.hodge(c.get("8"));
        Ok(out)
    }

    /// Linearisation of `ρ ↦ ρ̂`: `ℐ(γ) = ⋆γ₁₊₁ + ⋆γ₆ − ⋆γ₁₂`.
    pub fn imap(&self, gamma: &Form) -> Result<Form> {
        if gamma.dim() != 6 || gamma.degree() != 3 {
            return Err(Error::DegreeMismatch("ℐ acts on 3-forms".into()));
        }
        let c = self.project(gamma)?;
        let mut out = self.hodge(c.get("1+1"));
        out += &self.hodge(c.get("6"));
        out -= &self.hodge(c.get("12"));
        Ok(out)
    }
}

