//! Principal symbols of the DeTurck-modified nearly Kähler Laplacian flow
//! and a coercivity scanner for them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{symbol_d, symbol_dstar, Form, PlaneWave};
use crate::su3::{times_scalar, Su3Structure};

/// Largest relative spread tolerated when a Schur constant is sampled.
pub const SCHUR_SPREAD_TOL: f64 = 1e-8;

/// A symbol argument `χ = fσ + X∧ρ̂ + χ₀` at frequency `ξ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolInput {
    pub xi: Vec<f64>,
    pub f: f64,
    #[serde(rename = "X")]
    pub x: Vec<f64>,
    pub chi0: Form,
}

impl SymbolInput {
    pub fn new(xi: Vec<f64>, f: f64, x: Vec<f64>, chi0: Form) -> Self {
        SymbolInput { xi, f, x, chi0 }
    }

    /// Checks shapes and that `χ₀` lies in `Λ⁴₈`.
    pub fn validate(&self, s: &Su3Structure) -> Result<()> {
        if self.xi.len() != 6 || self.x.len() != 6 {
            return Err(Error::DimensionMismatch("ξ and X must be covectors on R^6".into()));
        }
        s.require_in(&self.chi0, 4, "8")
    }

    /// The 4-form `χ`.
    pub fn chi(&self, s: &Su3Structure) -> Form {
        s.sigma().scale(self.f) + Form::one_form(&self.x).wedge(s.rhohat()) + self.chi0.clone()
    }
}

/// Which flow the symbol belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `Δσ − 12σ + L_V σ`.
    None,
    /// The same with `d[(4τ₀ + C)ρ̂]` added.
    Tau0Term,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Coercive,
    NotCoercive,
}

/// Result of a coercivity scan at a fixed frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolReport {
    pub quadratic_form_value: f64,
    pub max_eigenvalue: f64,
    pub min_eigenvalue: f64,
    pub eigenvalues: Vec<f64>,
    pub witness_direction: SymbolInput,
    pub verdict: Verdict,
}

/// Symbol of `D_σP` on one input, by two routes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolValue {
    /// `S_ξ(D_σP)(χ)`, assembled from the symbols of `d` and `d*`.
    pub symbol: Form,
    /// `<S_ξ(D_σP)(χ), χ>` from `symbol`.
    pub quadratic_compositional: f64,
    /// The same number from `−|ξ|²|χ|² + 4(<ξ,X>² + <ξ,JX>²)` (first term
    /// inside the bracket dropped for [`Variant::Tau0Term`]).
    pub quadratic_closed: f64,
}

/// Plane-wave symbols of the DeTurck fields `V₁* = df` and `V₂* = J curl(X)`.
pub fn deturck_symbols(s: &Su3Structure, xi: &[f64], f: f64, x: &[f64]) -> (PlaneWave, PlaneWave) {
    let fw = PlaneWave::real(xi, Form::scalar(6, f));
    let xw = PlaneWave::real(xi, Form::one_form(x));
    (symbol_d(&fw), s.j_wave(&s.curl_symbol(&xw)))
}

/// Residual of the principal part of `dχ = df∧σ + J curl(X)∧σ + dχ₀` on the
/// wave `χ e^{i<ξ,x>}`.
pub fn closedness_residual(s: &Su3Structure, input: &SymbolInput) -> Result<f64> {
    input.validate(s)?;
    let lhs = symbol_d(&PlaneWave::real(&input.xi, input.chi(s)));
    let (v1, v2) = deturck_symbols(s, &input.xi, input.f, &input.x);
    let rhs = v1
        .map(|a| a.wedge(s.sigma()))
        .add(&v2.map(|a| a.wedge(s.sigma())))
        .add(&symbol_d(&PlaneWave::real(&input.xi, input.chi0.clone())));
    Ok(lhs.add(&rhs.scale(-1.0)).max_abs())
}

fn laplacian(g: &crate::exterior::Metric, w: &PlaneWave) -> PlaneWave {
    symbol_d(&symbol_dstar(g, w)).add(&symbol_dstar(g, &symbol_d(w)))
}

/// Symbol of the linearised flow operator at `input`.
pub fn symbol_dp(s: &Su3Structure, input: &SymbolInput, variant: Variant) -> Result<SymbolValue> {
    input.validate(s)?;
    let g = s.metric();
    let xi2 = g.vec_inner(&g.raise(&input.xi), &g.raise(&input.xi));
    if !(xi2 > 0.0) {
        return Err(Error::Domain("the symbol is evaluated at a non-zero frequency".into()));
    }
    let chi = input.chi(s);
    let chi_w = PlaneWave::real(&input.xi, chi.clone());
    let xw = PlaneWave::real(&input.xi, Form::one_form(&input.x));
    let ddx = symbol_d(&symbol_dstar(g, &xw));
    let jddjx = s.j_wave(&symbol_d(&symbol_dstar(g, &s.j_wave(&xw))));
    let mut total = laplacian(g, &chi_w).scale(-1.0).add(&ddx.add(&jddjx.scale(-1.0)).map(|a| a.wedge(s.rhohat())).scale(2.0));
    if variant == Variant::Tau0Term {
        // δτ₀ = −½ d*X, entering through d(4 δτ₀ ρ̂)
        let dtau0 = symbol_dstar(g, &xw).scale(-0.5);
        total = total.add(&symbol_d(&times_scalar(&dtau0, s.rhohat())).scale(4.0));
    }
    if total.im.max_abs() > 1e-12 * (1.0 + total.re.max_abs()) {
        return Err(Error::Compatibility { residual: total.im.max_abs(), tolerance: 1e-12 });
    }
    let symbol = total.re;
    let quadratic_compositional = g.inner(&symbol, &chi);
    let xi_x = g.vec_inner(&g.raise(&input.xi), &g.raise(&input.x));
    let jx = s.j_covector(&input.x);
    let xi_jx = g.vec_inner(&g.raise(&input.xi), &g.raise(&jx));
    let bracket = match variant {
        Variant::None => xi_x * xi_x + xi_jx * xi_jx,
        Variant::Tau0Term => xi_jx * xi_jx,
    };
    let quadratic_closed = -xi2 * g.norm_sq(&chi) + 4.0 * bracket;
    let gap = (quadratic_compositional - quadratic_closed).abs();
    let scale = 1.0 + xi2 * g.norm_sq(&chi);
    if gap > 1e-10 * scale {
        return Err(Error::Compatibility { residual: gap, tolerance: 1e-10 });
    }
    Ok(SymbolValue { symbol, quadratic_compositional, quadratic_closed })
}

/// Gram–Schmidt for the inner product `ip`, dropping near-dependent vectors.
fn orthonormalize(vectors: Vec<Form>, ip: impl Fn(&Form, &Form) -> f64, want: usize) -> Vec<Form> {
    let mut out: Vec<Form> = Vec::with_capacity(want);
    for v in vectors {
        let mut w = v;
        for _ in 0..2 {
            for u in &out {
                let c = ip(&w, u);
                w = w.axpy(-c, u);
            }
        }
        let n = ip(&w, &w).sqrt();
        if n > 1e-8 {
            out.push(w.scale(1.0 / n));
        }
        if out.len() == want {
            break;
        }
    }
    out
}

/// Coordinates on the 15-dimensional space of `(f, X, χ₀)`: `f` itself, `X`
/// and `χ₀` in `g`-orthonormal bases.
struct Frame {
    covectors: Vec<Vec<f64>>,
    eight: Vec<Form>,
}

impl Frame {
    fn new(s: &Su3Structure) -> Self {
        let g = s.metric();
        let units: Vec<Form> = (0..6).map(|a| Form::one_form(&crate::exterior::unit(6, a))).collect();
        let covectors = orthonormalize(units, |a, b| g.inner(a, b), 6).into_iter().map(|f| f.coeffs().to_vec()).collect();
        let raw: Vec<Form> = (0..15)
            .map(|i| {
                let mut c = vec![0.0; 15];
                c[i] = 1.0;
                s.part(&Form::new(6, 4, c).unwrap(), "8")
            })
            .collect();
        let eight = orthonormalize(raw, |a, b| g.inner(a, b), 8);
        assert_eq!(eight.len(), 8);
        Frame { covectors, eight }
    }

    fn input(&self, xi: &[f64], p: &[f64]) -> SymbolInput {
        let mut x = vec![0.0; 6];
        for (k, c) in self.covectors.iter().enumerate() {
            for a in 0..6 {
                x[a] += p[1 + k] * c[a];
            }
        }
        let mut chi0 = Form::zero(6, 4);
        for (k, e) in self.eight.iter().enumerate() {
            chi0 = chi0.axpy(p[7 + k], e);
        }
        SymbolInput { xi: xi.to_vec(), f: p[0], x, chi0 }
    }
}

/// Symmetric matrix of `χ ↦ <S_ξ(D_σP)χ, χ>` in the `(f, X, χ₀)` coordinates,
/// with its extreme eigenvalues and a maximising direction.
pub fn coercivity_scan(s: &Su3Structure, xi: &[f64], variant: Variant) -> Result<SymbolReport> {
    if xi.len() != 6 {
        return Err(Error::DimensionMismatch("ξ must be a covector on R^6".into()));
    }
    let frame = Frame::new(s);
    let g = s.metric();
    let basis: Vec<SymbolInput> = (0..15)
        .map(|i| {
            let mut p = vec![0.0; 15];
            p[i] = 1.0;
            frame.input(xi, &p)
        })
        .collect();
    let images: Vec<Form> = basis.iter().map(|b| symbol_dp(s, b, variant).map(|v| v.symbol)).collect::<Result<_>>()?;
    let chis: Vec<Form> = basis.iter().map(|b| b.chi(s)).collect();
    let m = DMatrix::from_fn(15, 15, |i, j| 0.5 * (g.inner(&images[i], &chis[j]) + g.inner(&images[j], &chis[i])));
    let eig = m.clone().symmetric_eigen();
    let (imax, &max) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let v: DVector<f64> = eig.eigenvectors.column(imax).into_owned();
    let witness = frame.input(xi, v.as_slice());
    let value = symbol_dp(s, &witness, variant)?.quadratic_compositional;
    if (value - max).abs() > 1e-8 * (1.0 + max.abs()) {
        return Err(Error::Compatibility { residual: (value - max).abs(), tolerance: 1e-8 });
    }
    Ok(SymbolReport {
        quadratic_form_value: value,
        max_eigenvalue: max,
        min_eigenvalue: min,
        eigenvalues,
        witness_direction: witness,
        verdict: if max > 0.0 { Verdict::NotCoercive } else { Verdict::Coercive },
    })
}

/// Ratio `B` in `⋆(α∧χ) = B·c(ι⁻¹(χ) ⊗ α)` for `χ ∈ Λ⁴₈`, sampled on
/// `samples` random pairs; fails if the ratio is not constant.
///
/// The contraction is `c(S ⊗ α) = J(Sα)`. The bare metric contraction `Sα` is
/// everywhere orthogonal to `⋆(α∧χ)`, so it cannot carry the constant.
pub fn schur_constant_b(s: &Su3Structure, samples: usize, seed: u64) -> Result<f64> {
    sample_ratio(s, samples, seed, |chi, alpha| {
        let lhs = s.hodge(&Form::one_form(alpha).wedge(chi));
        let endo = s.iota_inverse(chi)?;
        Ok((lhs.coeffs().to_vec(), s.j_covector(&endo.on_covector(s.metric(), alpha))))
    })
}

/// Ratio `A` in `δg = ½f g + A ι⁻¹(χ₀)` for variations of `σ` at fixed `ρ`,
/// where `δω = 𝒦(χ₀) = −⋆χ₀` and `δg = δω(·, J·)`.
pub fn schur_constant_a(s: &Su3Structure, samples: usize, seed: u64) -> Result<f64> {
    sample_ratio(s, samples, seed, |chi, _| {
        let dw = s.kmap(chi)?.as_skew_matrix();
        let j = s.j().matrix();
        let dg = DMatrix::from_fn(6, 6, |a, b| (0..6).map(|c| dw[a][c] * j[(c, b)]).sum::<f64>());
        let h = s.metric().matrix() * s.iota_inverse(chi)?.matrix();
        Ok((dg.iter().copied().collect(), h.iter().copied().collect()))
    })
}

fn sample_ratio(
    s: &Su3Structure,
    samples: usize,
    seed: u64,
    pair: impl Fn(&Form, &[f64]) -> Result<(Vec<f64>, Vec<f64>)>,
) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(samples);
    while ratios.len() < samples.max(1) {
        let raw = Form::new(6, 4, (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let chi = s.part(&raw, "8");
        let alpha: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if chi.max_abs() < 1e-6 {
            continue;
        }
        let (lhs, rhs) = pair(&chi, &alpha)?;
        let den = dot(&rhs, &rhs);
        if den < 1e-12 {
            continue;
        }
        let ratio = dot(&lhs, &rhs) / den;
        let off = lhs.iter().zip(&rhs).map(|(l, r)| (l - ratio * r).powi(2)).sum::<f64>().sqrt() / dot(&lhs, &lhs).sqrt().max(1e-300);
        if off > SCHUR_SPREAD_TOL {
            return Err(Error::Compatibility { residual: off, tolerance: SCHUR_SPREAD_TOL });
        }
        ratios.push(ratio);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean.abs().max(1e-300);
    if spread > SCHUR_SPREAD_TOL {
        return Err(Error::Compatibility { residual: spread, tolerance: SCHUR_SPREAD_TOL });
    }
    Ok(mean)
}
