use serde::{Deserialize, Serialize};

use super::structure::G2Structure;
use crate::error::{Error, Result};
use crate::exterior::{Form, Metric};
use crate::linalg::{apply, from_dvec, matrix_of, pinv, solve_within, to_dvec};
use crate::su3::JET_CONSISTENCY_TOL;

/// Intrinsic torsion of a G₂-structure,
///
/// ```text
/// dφ = 4τ₀ψ + 3τ₁∧φ + ⋆τ₃
/// dψ = 4τ₁∧ψ + τ₂∧φ
/// ```
///
/// with `τ₂ ∈ Λ²₁₄` and `τ₃ ∈ Λ³₂₇`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2Torsion {
    pub tau0: f64,
    pub tau1: Form,
    pub tau2: Form,
    pub tau3: Form,
    pub metric: Metric,
}

impl G2Torsion {
    pub fn zero(s: &G2Structure) -> Self {
        G2Torsion {
            tau0: 0.0,
            tau1: Form::zero(7, 1),
            tau2: Form::zero(7, 2),
            tau3: Form::zero(7, 3),
            metric: s.metric().clone(),
        }
    }

    /// `(dφ, dψ)` determined by this torsion.
    pub fn jet(&self, s: &G2Structure) -> (Form, Form) {
        let dphi = s.psi().scale(4.0 * self.tau0) + self.tau1.wedge(s.phi()).scale(3.0) + s.hodge(&self.tau3);
        let dpsi = self.tau1.wedge(s.psi()).scale(4.0) + self.tau2.wedge(s.phi());
        (dphi, dpsi)
    }
}

/// Reads the torsion off `(dφ, dψ)`; `τ₁` is read from both and must agree.
pub fn torsion_from_jet_g2(s: &G2Structure, dphi: &Form, dpsi: &Form) -> Result<G2Torsion> {
    for (f, k, name) in [(dphi, 4, "dφ"), (dpsi, 5, "dψ")] {
        if f.dim() != 7 || f.degree() != k {
            return Err(Error::DegreeMismatch(format!("{name} must be a {k}-form on R^7")));
        }
    }
    let g = s.metric();
    let tau0 = g.inner(dphi, s.psi()) / (4.0 * g.norm_sq(s.psi()));
    let tau1 = solve_covector(s.phi(), &s.part(dphi, "7")).scale(1.0 / 3.0);
    let tau3 = s.hodge(&s.part(dphi, "27"));
    let tau1_b = solve_covector(s.psi(), &s.part(dpsi, "7")).scale(0.25);
    let tau2 = solve_fourteen(s, &s.part(dpsi, "14"));

    let scale = 1.0 + dphi.max_abs().max(dpsi.max_abs());
    let gap = tau1.distance(&tau1_b);
    if gap > JET_CONSISTENCY_TOL * scale {
        return Err(Error::JetInconsistency(format!("τ₁ differs by {gap:.3e} between dφ and dψ")));
    }
    let t = G2Torsion { tau0, tau1: (&tau1 + &tau1_b).scale(0.5), tau2, tau3, metric: g.clone() };
    let (a, b) = t.jet(s);
    let resid = a.distance(dphi).max(b.distance(dpsi));
    if resid > JET_CONSISTENCY_TOL * scale {
        return Err(Error::JetInconsistency(format!("jet is not reproduced by its torsion (residual {resid:.3e})")));
    }
    Ok(t)
}

fn solve_covector(base: &Form, target: &Form) -> Form {
    let m = matrix_of(7, target.len(), |x| Form::one_form(x).wedge(base).coeffs().to_vec());
    from_dvec(7, 1, &(pinv(&m) * to_dvec(target)))
}

/// Solves `β ∧ φ = target` for `β ∈ Λ²₁₄`.
fn solve_fourteen(s: &G2Structure, target: &Form) -> Form {
    let m = matrix_of(21, 21, |c| Form::new(7, 2, c.to_vec()).unwrap().wedge(s.phi()).coeffs().to_vec());
    let p = s.projector(2, "14");
    apply(p, &from_dvec(7, 2, &solve_within(&m, p, &to_dvec(target))))
}

/// `s = 42τ₀² + 12 d*τ₁ + 30|τ₁|² − ½|τ₂|² − ½|τ₃|²`.
pub fn scalar_curvature_g2(t: &G2Torsion, dstar_tau1: f64) -> f64 {
    let g = &t.metric;
    42.0 * t.tau0 * t.tau0 + 12.0 * dstar_tau1 + 30.0 * g.norm_sq(&t.tau1)
        - 0.5 * g.norm_sq(&t.tau2)
        - 0.5 * g.norm_sq(&t.tau3)
}

/// Integrands of the torsion functional and of Einstein–Hilbert per unit
/// `vol_g`: `(7τ₀² − 5, 7τ₀² − 5 − |τ₂|²/12)`.
pub fn t_vs_eh_density(t: &G2Torsion) -> (f64, f64) {
    let base = 7.0 * t.tau0 * t.tau0 - 5.0;
    (base, base - t.metric.norm_sq(&t.tau2) / 12.0)
}
