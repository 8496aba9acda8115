use serde::{Deserialize, Serialize};

use super::structure::Su3Structure;
use crate::error::{Error, Result};
use crate::exterior::{Form, Metric};
use crate::linalg::{apply, from_dvec, matrix_of, pinv, solve_within, to_dvec};

/// Agreement required between torsion components read off from different
/// structure equations.
pub const JET_CONSISTENCY_TOL: f64 = 1e-8;

/// Intrinsic torsion of an SU(3)-structure, defined by
///
/// ```text
/// dω = 3τ₀ρ + 3τ̂₀ρ̂ + τ₁∧ω + τ₃
/// dρ = 2τ̂₀ω² + τ̂₁∧ρ + τ₂∧ω
/// dρ̂ = −2τ₀ω² + τ̂₁∧ρ̂ + τ̂₂∧ω
/// ```
///
/// with `τ₂, τ̂₂ ∈ Λ²₈` and `τ₃ ∈ Λ³₁₂`. The `Λ⁴₆` term of `dρ̂` equals
/// `−Jτ̂₁ ∧ ρ` for `J` acting on 1-forms through the metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Su3Torsion {
    pub tau0: f64,
    pub tauhat0: f64,
    pub tau1: Form,
    pub tauhat1: Form,
    pub tau2: Form,
    pub tauhat2: Form,
    pub tau3: Form,
    /// Metric used for the norms of the components.
    pub metric: Metric,
}

impl Su3Torsion {
    pub fn zero(s: &Su3Structure) -> Self {
        Su3Torsion {
            tau0: 0.0,
            tauhat0: 0.0,
            tau1: Form::zero(6, 1),
            tauhat1: Form::zero(6, 1),
            tau2: Form::zero(6, 2),
            tauhat2: Form::zero(6, 2),
            tau3: Form::zero(6, 3),
            metric: s.metric().clone(),
        }
    }

    /// Exterior derivatives `(dω, dρ, dρ̂)` determined by this torsion.
    pub fn jet(&self, s: &Su3Structure) -> (Form, Form, Form) {
        let w2 = s.omega().wedge(s.omega());
        let domega = s.rho().scale(3.0 * self.tau0)
            + s.rhohat().scale(3.0 * self.tauhat0)
            + self.tau1.wedge(s.omega())
            + self.tau3.clone();
        let drho = w2.scale(2.0 * self.tauhat0) + self.tauhat1.wedge(s.rho()) + self.tau2.wedge(s.omega());
        let drhohat = w2.scale(-2.0 * self.tau0) + self.tauhat1.wedge(s.rhohat()) + self.tauhat2.wedge(s.omega());
        (domega, drho, drhohat)
    }

    fn magnitude(&self) -> f64 {
        [
            self.tau0.abs(),
            self.tauhat0.abs(),
            self.tau1.max_abs(),
            self.tauhat1.max_abs(),
            self.tau2.max_abs(),
            self.tauhat2.max_abs(),
            self.tau3.max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Reads the torsion off the first jet `(dω, dρ, dρ̂)`.
///
/// `τ₀`, `τ̂₀` and `τ̂₁` each appear in two of the equations; disagreement
/// beyond [`JET_CONSISTENCY_TOL`] is a [`Error::JetInconsistency`].
pub fn torsion_from_jet(s: &Su3Structure, domega: &Form, drho: &Form, drhohat: &Form) -> Result<Su3Torsion> {
    for (f, k, name) in [(domega, 3, "dω"), (drho, 4, "dρ"), (drhohat, 4, "dρ̂")] {
        if f.dim() != 6 || f.degree() != k {
            return Err(Error::DegreeMismatch(format!("{name} must be a {k}-form on R^6")));
        }
    }
    let g = s.metric();
    let sigma = s.sigma();
    let rho_sq = g.norm_sq(s.rho());
    let sigma_sq = g.norm_sq(sigma);

    let tau0 = g.inner(domega, s.rho()) / (3.0 * rho_sq);
    let tauhat0 = g.inner(domega, s.rhohat()) / (3.0 * g.norm_sq(s.rhohat()));
    let tau1 = solve_covector(s.omega(), &s.part(domega, "6"));
    let tau3 = s.part(domega, "12");

    let tauhat0_b = g.inner(drho, sigma) / (4.0 * sigma_sq);
    let tauhat1 = solve_covector(s.rho(), &s.part(drho, "6"));
    let tau2 = solve_primitive(s, &s.part(drho, "8"));

    let tau0_b = -g.inner(drhohat, sigma) / (4.0 * sigma_sq);
    let tauhat1_b = solve_covector(s.rhohat(), &s.part(drhohat, "6"));
    let tauhat2 = solve_primitive(s, &s.part(drhohat, "8"));

    let scale = 1.0 + domega.max_abs().max(drho.max_abs()).max(drhohat.max_abs());
    let checks = [
        ("τ₀", (tau0 - tau0_b).abs()),
        ("τ̂₀", (tauhat0 - tauhat0_b).abs()),
        ("τ̂₁", tauhat1.distance(&tauhat1_b)),
    ];
    for (name, gap) in checks {
        if gap > JET_CONSISTENCY_TOL * scale {
            return Err(Error::JetInconsistency(format!("{name} differs by {gap:.3e} between structure equations")));
        }
    }
    let t = Su3Torsion {
        tau0: 0.5 * (tau0 + tau0_b),
        tauhat0: 0.5 * (tauhat0 + tauhat0_b),
        tau1,
        tauhat1: (&tauhat1 + &tauhat1_b).scale(0.5),
        tau2,
        tauhat2,
        tau3,
        metric: g.clone(),
    };
    let (a, b, c) = t.jet(s);
    let resid = a.distance(domega).max(b.distance(drho)).max(c.distance(drhohat));
    if resid > JET_CONSISTENCY_TOL * scale {
        return Err(Error::JetInconsistency(format!("jet is not reproduced by its torsion (residual {resid:.3e})")));
    }
    Ok(t)
}

/// Solves `X ∧ base = target` for the 1-form `X`.
fn solve_covector(base: &Form, target: &Form) -> Form {
    let m = matrix_of(6, target.len(), |x| Form::one_form(x).wedge(base).coeffs().to_vec());
    from_dvec(6, 1, &(pinv(&m) * to_dvec(target)))
}

/// Solves `β ∧ ω = target` for `β ∈ Λ²₈`.
fn solve_primitive(s: &Su3Structure, target: &Form) -> Form {
    let m = matrix_of(15, 15, |c| Form::new(6, 2, c.to_vec()).unwrap().wedge(s.omega()).coeffs().to_vec());
    let p8 = s.projector(2, "8");
    let beta = from_dvec(6, 2, &solve_within(&m, p8, &to_dvec(target)));
    apply(p8, &beta)
}

/// Scalar curvature
/// `30(τ₀²+τ̂₀²) + 2 d*(τ₁+τ̂₁) − |τ₁|² + 4<τ₁,τ̂₁> − ½(|τ₂|²+|τ̂₂|²+|τ₃|²)`,
/// with the divergence `d*(τ₁+τ̂₁)` supplied by the caller.
pub fn scalar_curvature(t: &Su3Torsion, dstar_tau1_sum: f64) -> f64 {
    let g = &t.metric;
    30.0 * (t.tau0 * t.tau0 + t.tauhat0 * t.tauhat0) + 2.0 * dstar_tau1_sum - g.norm_sq(&t.tau1)
        + 4.0 * g.inner(&t.tau1, &t.tauhat1)
        - 0.5 * (g.norm_sq(&t.tau2) + g.norm_sq(&t.tauhat2) + g.norm_sq(&t.tau3))
}

/// Pointwise integrands `(Q, Ŝ)` of the Hitchin-type functional and the
/// pulled-back Einstein–Hilbert functional (per unit volume), for torsion with
/// only `τ₀`, `τ̂₁`, `τ̂₂` non-zero.
pub fn q_vs_eh_density(t: &Su3Torsion) -> Result<(f64, f64)> {
    let tol = 1e-10 * (1.0 + t.magnitude());
    let stray = [
        ("τ̂₀", t.tauhat0.abs()),
        ("τ₁", t.tau1.max_abs()),
        ("τ₂", t.tau2.max_abs()),
        ("τ₃", t.tau3.max_abs()),
    ];
    for (name, v) in stray {
        if v > tol {
            return Err(Error::Domain(format!("{name} must vanish for this comparison")));
        }
    }
    let q = 6.0 * t.tau0 * t.tau0 - 4.0;
    Ok((q, q - t.metric.norm_sq(&t.tauhat2) / 10.0))
}

