use super::structure::Su3Structure;
use crate::exterior::{symbol_d, symbol_dstar, Form, PlaneWave};

/// Multiplies a real form by the complex scalar carried by a 0-form wave.
pub(crate) fn times_scalar(scalar: &PlaneWave, f: &Form) -> PlaneWave {
    PlaneWave { xi: scalar.xi.clone(), re: f.scale(scalar.re.coeffs()[0]), im: f.scale(scalar.im.coeffs()[0]) }
}

impl Su3Structure {
    /// Principal symbol of `curl(X) = −⋆(dX ∧ ρ̂)` on a 1-form wave.
    pub fn curl_symbol(&self, x: &PlaneWave) -> PlaneWave {
        symbol_d(x).map(|f| -self.hodge(&f.wedge(self.rhohat())))
    }

    /// `J` applied to a 1-form wave.
    pub fn j_wave(&self, x: &PlaneWave) -> PlaneWave {
        x.map(|f| Form::one_form(&self.j_covector(f.coeffs())))
    }
}

/// Residual of the principal symbol of
/// `d(X⌟ρ) − d*(X∧ρ) = J curl(X) ∧ ω − d*X ρ − d*(JX) ρ̂` on the wave
/// `e^{i<ξ,x>} X`.
pub fn contraction_symbol_check(s: &Su3Structure, xi: &[f64], x: &[f64]) -> f64 {
    let g = s.metric();
    let wave = PlaneWave::real(xi, Form::one_form(x));
    let contracted = PlaneWave::real(xi, s.rho().interior(&g.raise(x)));
    let wedged = PlaneWave::real(xi, Form::one_form(x).wedge(s.rho()));
    let lhs = symbol_d(&contracted).add(&symbol_dstar(g, &wedged).scale(-1.0));

    let jcurl = s.j_wave(&s.curl_symbol(&wave));
    let div_x = symbol_dstar(g, &wave);
    let div_jx = symbol_dstar(g, &s.j_wave(&wave));
    let rhs = jcurl
        .map(|f| f.wedge(s.omega()))
        .add(&times_scalar(&div_x, s.rho()).scale(-1.0))
        .add(&times_scalar(&div_jx, s.rhohat()).scale(-1.0));
    let diff = lhs.add(&rhs.scale(-1.0));
    diff.max_abs()
}
