use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::structure::G2Structure;
use crate::error::{Error, Result};
use crate::exterior::{symbol_d, symbol_dstar, Endomorphism, Form, PlaneWave};
use crate::linalg::{from_dvec, matrix_of, pinv, to_dvec};
use crate::su3::times_scalar;

/// Residuals of the principal symbols of the first-order identities on a
/// G₂-structure, for `X ∈ Λ¹`, `β₀ ∈ Λ²₁₄`, `γ₀ ∈ Λ³₂₇`:
///
/// 1. `dX = ⅓ curl(X)⌟φ + π₁₄(dX)`
/// 2. `curl(curl X) = d*dX`
/// 3. `π₇(dβ₀) = ¼ d*β₀`
/// 4. `π₇(d*γ₀) = (4/3) π₇(dγ₀)`
/// 5. `d⋆(X∧φ) = (4/7)(d*X)ψ + ½curl(X)∧φ − ½⋆(L_X g)₀,*φ`
///
/// `Λ²₇`, `Λ³₇` and `Λ⁴₇` are identified with `Λ¹` through `Y♯⌟φ`, `⋆(Y∧φ)`
/// and `Y∧φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurlSymbolReport {
    pub curl_split: f64,
    pub curl_curl: f64,
    pub fourteen_divergence: f64,
    pub twenty_seven: f64,
    pub star_x_phi: f64,
}

impl CurlSymbolReport {
    pub fn max(&self) -> f64 {
        [self.curl_split, self.curl_curl, self.fourteen_divergence, self.twenty_seven, self.star_x_phi]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl G2Structure {
    /// Principal symbol of `curl(X) = ⋆(dX ∧ ψ)`.
    pub fn curl_symbol(&self, x: &PlaneWave) -> PlaneWave {
        symbol_d(x).map(|f| self.hodge(&f.wedge(self.psi())))
    }

    /// Covector `Y` with `π₇(a)` equal to `Y♯⌟φ`, `⋆(Y∧φ)` or `Y∧φ` by degree.
    pub fn seven_vector(&self, a: &Form) -> Result<Vec<f64>> {
        let image = |y: &[f64]| -> Form {
            match a.degree() {
                2 => self.phi().interior(&self.metric().raise(y)),
                3 => self.hodge(&Form::one_form(y).wedge(self.phi())),
                4 => Form::one_form(y).wedge(self.phi()),
                _ => unreachable!(),
            }
        };
        if a.dim() != 7 || !(2..=4).contains(&a.degree()) {
            return Err(Error::DegreeMismatch("Λ⁷ summands are identified in degrees 2, 3 and 4".into()));
        }
        let m = matrix_of(7, a.len(), |y| image(y).coeffs().to_vec());
        let part = self.part(a, "7");
        Ok(from_dvec(7, 1, &(pinv(&m) * to_dvec(&part))).coeffs().to_vec())
    }

    fn seven_wave(&self, w: &PlaneWave) -> Result<PlaneWave> {
        Ok(PlaneWave {
            xi: w.xi.clone(),
            re: Form::one_form(&self.seven_vector(&w.re)?),
            im: Form::one_form(&self.seven_vector(&w.im)?),
        })
    }
}

fn diff(a: &PlaneWave, b: &PlaneWave) -> f64 {
    a.add(&b.scale(-1.0)).max_abs()
}

/// Evaluates the five symbol identities on the plane wave `e^{i<ξ,x>}` times
/// the given amplitudes.
pub fn g2_curl_symbol_checks(s: &G2Structure, xi: &[f64], x: &[f64], beta0: &Form, gamma0: &Form) -> Result<CurlSymbolReport> {
    if xi.len() != 7 || x.len() != 7 {
        return Err(Error::DimensionMismatch("ξ and X must be covectors on R^7".into()));
    }
    s.require_in(beta0, 2, "14")?;
    s.require_in(gamma0, 3, "27")?;
    let g = s.metric();
    let xw = PlaneWave::real(xi, Form::one_form(x));
    let dx = symbol_d(&xw);
    let curl = s.curl_symbol(&xw);

    let split = dx.map(|f| s.part(f, "7"));
    let from_curl = curl.map(|c| s.phi().interior(&g.raise(c.coeffs()))).scale(1.0 / 3.0);
    let curl_split = diff(&split, &from_curl);

    let curl_curl = diff(&s.curl_symbol(&curl), &symbol_dstar(g, &dx));

    let bw = PlaneWave::real(xi, beta0.clone());
    let lhs3 = s.seven_wave(&symbol_d(&bw))?;
    let rhs3 = symbol_dstar(g, &bw).scale(0.25);
    let fourteen_divergence = diff(&lhs3, &rhs3);

    let gw = PlaneWave::real(xi, gamma0.clone());
    let lhs4 = s.seven_wave(&symbol_dstar(g, &gw))?;
    let rhs4 = s.seven_wave(&symbol_d(&gw))?.scale(4.0 / 3.0);
    let twenty_seven = diff(&lhs4, &rhs4);

    let sxw = PlaneWave::real(xi, s.hodge(&Form::one_form(x).wedge(s.phi())));
    let lhs5 = symbol_d(&sxw);
    let div = symbol_dstar(g, &xw);
    let lie = lie_metric_symbol(s, xi, x);
    let rhs5 = times_scalar(&div, s.psi())
        .scale(4.0 / 7.0)
        .add(&curl.map(|c| c.wedge(s.phi())).scale(0.5))
        .add(&lie.map(|h| s.hodge(h)).scale(-0.5));
    let star_x_phi = diff(&lhs5, &rhs5);

    Ok(CurlSymbolReport { curl_split, curl_curl, fourteen_divergence, twenty_seven, star_x_phi })
}

/// `(L_X g)₀,*φ` at symbol level, `L_X g ↦ i(ξ⊗X + X⊗ξ)`, as a 3-form wave.
fn lie_metric_symbol(s: &G2Structure, xi: &[f64], x: &[f64]) -> PlaneWave {
    let g = s.metric();
    let h = nalgebra::DMatrix::from_fn(7, 7, |a, b| xi[a] * x[b] + x[a] * xi[b]);
    let endo = g.inverse() * h;
    let tr = endo.trace() / 7.0;
    let s0 = Endomorphism::from_matrix(endo - nalgebra::DMatrix::identity(7, 7) * tr);
    PlaneWave { xi: xi.to_vec(), re: Form::zero(7, 3), im: s0.act(s.phi()) }
}

/// `δτ₀ = (1/7)d*X − ¼f` on the wave `χ = (fψ + X∧φ) e^{i<ξ,x>}` at a nearly
/// parallel point (`τ₀ = 1`).
///
/// The value is cross-checked against the variation
/// `δτ₀ vol_ψ = (1/7)[d(𝒥χ∧φ) + 2dφ∧𝒥χ] − τ₀ φ∧χ` with `dφ = 4ψ`, the
/// outer `d` acting on the wave `𝒥χ∧φ`.
pub fn tau0_variation(s: &G2Structure, f: f64, x: &[f64], xi: &[f64]) -> Result<Complex64> {
    if xi.len() != 7 || x.len() != 7 {
        return Err(Error::DimensionMismatch("ξ and X must be covectors on R^7".into()));
    }
    let g = s.metric();
    let div = symbol_dstar(g, &PlaneWave::real(xi, Form::one_form(x)));
    let direct = Complex64::new(div.re.coeffs()[0], div.im.coeffs()[0]) / 7.0 - f / 4.0;

    let chi = s.psi().scale(f) + Form::one_form(x).wedge(s.phi());
    let jchi = s.jmap(&chi)?;
    let vol = s.volume_form();
    let first = symbol_d(&PlaneWave::real(xi, jchi.wedge(s.phi())));
    let second = PlaneWave::real(xi, s.psi().wedge(&jchi).scale(8.0));
    let third = PlaneWave::real(xi, s.phi().wedge(&chi));
    let total = first.add(&second).scale(1.0 / 7.0).add(&third.scale(-1.0));
    let vol_psi = 4.0 * vol.coeffs()[0];
    let via = Complex64::new(total.re.coeffs()[0], total.im.coeffs()[0]) / vol_psi;

    let gap = (direct - via).norm();
    if gap > 1e-10 * (1.0 + direct.norm()) {
        return Err(Error::Compatibility { residual: gap, tolerance: 1e-10 });
    }
    Ok(direct)
}
