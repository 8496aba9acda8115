use serde::{Deserialize, Serialize};

use super::lie::{casimir_laplacian_g2, hom_dim_g2_su3, weyl_dim, Weight};
use crate::error::{Error, Result};

/// An eigenvalue together with the dimension of its eigenspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDatum {
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

impl SpectralDatum {
    pub fn new(eigenvalue: f64, multiplicity: u64) -> Self {
        SpectralDatum { eigenvalue, multiplicity }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiData {
    pub b2: u64,
    pub b3: u64,
}

/// Total multiplicity of eigenvalues in the open interval `(lo, hi)`.
pub fn count_in(data: &[SpectralDatum], lo: f64, hi: f64) -> u64 {
    data.iter().filter(|d| d.eigenvalue > lo && d.eigenvalue < hi).map(|d| d.multiplicity).sum()
}

/// Hitchin index of a nearly Kähler structure from the spectrum of the
/// Laplacian on coclosed primitive (1,1)-forms: eigenvalues in `(0, 12)`.
pub fn hitchin_index_nk(data: &[SpectralDatum]) -> u64 {
    count_in(data, 0.0, 12.0)
}

/// Hitchin index of a nearly parallel G₂-structure from the spectrum of
/// `⋆d` on `Ω³₂₇`: eigenvalues in `(−4, 0)`.
pub fn hitchin_index_g2(data: &[SpectralDatum]) -> u64 {
    count_in(data, -4.0, 0.0)
}

/// Einstein coindex of a nearly Kähler metric.
pub fn einstein_index_nk(b: BettiData, data: &[SpectralDatum]) -> u64 {
    b.b2 + b.b3 + 3 * count_in(data, 0.0, 2.0) + 2 * count_in(data, 2.0, 6.0) + count_in(data, 6.0, 12.0)
}

/// Einstein coindex bound of a nearly parallel G₂ metric: `e` is the
/// spectrum of `⋆d` on `Ω³₂₇`, `f` that of the Laplacian on `Ω³₂₇`.
pub fn einstein_index_g2(b3: u64, e: &[SpectralDatum], f: &[SpectralDatum]) -> u64 {
    b3 + count_in(e, -4.0, 0.0) + count_in(e, 0.0, 2.0) + count_in(f, 0.0, 8.0)
}

/// One isotypic component of `L²(S⁶) = ⊕ V_γ` under `G₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S6Entry {
    pub weight: Weight,
    pub dimension: u64,
    pub eigenvalue: f64,
    pub hom_dim: u64,
    pub contribution: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S6Report {
    pub cutoff: f64,
    /// False when the cutoff is below 12, so part of the index window is unseen.
    pub complete: bool,
    pub entries: Vec<S6Entry>,
    pub index: u64,
}

/// Enumerate the `G₂`-types on `S⁶ = G₂/SU(3)` with canonical-Laplacian
/// eigenvalue in `(0, cutoff)` and the multiplicity with which each feeds
/// `Ω²₈`: `dim V_γ · dim Hom_SU(3)(V_γ, 𝔰𝔲(3))`.
///
/// On the homogeneous nearly Kähler `S⁶` the canonical Laplacian agrees with
/// the Laplacian on coclosed `Ω²₈`, so the index is the sum over `(0, 12)`.
pub fn s6_stability_report(cutoff: f64) -> Result<S6Report> {
    if !cutoff.is_finite() {
        return Err(Error::InvalidInput("cutoff must be finite".into()));
    }
    let adjoint = Weight::a2(1, 1);
    let bound = cutoff.max(0.0).sqrt().ceil() as i64 + 1;
    let mut entries = Vec::new();
    for a in 0..=bound {
        for b in 0..=bound {
            let w = Weight::g2(a, b);
            let eigenvalue = casimir_laplacian_g2(&w)?;
            if eigenvalue <= 0.0 || eigenvalue >= cutoff {
                continue;
            }
            let dimension = weyl_dim(&w)?;
            let hom_dim = hom_dim_g2_su3(&w, &adjoint)?;
            let contribution = if eigenvalue < 12.0 { dimension * hom_dim } else { 0 };
            entries.push(S6Entry { weight: w, dimension, eigenvalue, hom_dim, contribution });
        }
    }
    entries.sort_by(|x, y| x.eigenvalue.total_cmp(&y.eigenvalue).then(x.weight.cmp(&y.weight)));
    let index = entries.iter().map(|e| e.contribution).sum();
    Ok(S6Report { cutoff, complete: cutoff >= 12.0, entries, index })
}

/// Distinguished Hessian eigenvalues `μ = −12 ± 6√2` on nearly Kähler
/// manifolds, carried by constant conformal-type solutions.
pub fn nk_conformal_hessian_eigenvalues() -> [f64; 2] {
    let r = 6.0 * std::f64::consts::SQRT_2;
    [-12.0 - r, -12.0 + r]
}

/// Hessian eigenvalue of `𝒬` on constants in the restricted (closed
/// primitive) setting.
pub const NK_CONSTANT_HESSIAN_EIGENVALUE: f64 = -6.0;
/// Eigenvalue of the G₂ operator `𝒯` on multiples of `ψ`.
pub const G2_PSI_T_EIGENVALUE: f64 = -3.0;
/// Eigenvalue of the G₂ operator `𝒫` on multiples of `ψ`.
pub const G2_PSI_P_EIGENVALUE: f64 = -1.0;
/// Lower bound of the spectrum of `𝒯`.
pub const G2_T_LOWER_BOUND: f64 = -4.0;

/// The algebraic maps between Hessian eigenvalues and the eigenvalues of
/// associated first- and second-order operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HessianMap {
    /// NK Hitchin Hessian `μ` ↦ Laplacian eigenvalue `(μ + 12)²/12`.
    NkLaplacian,
    /// Inverse of `NkLaplacian`: `Δ` ↦ `−12 ± √(12Δ)`.
    NkLaplacianInverse,
    /// NK restricted Hessian `μ` ↦ Laplacian eigenvalue `μ + 12` on `Ω⁴₈`.
    NkRestricted,
    /// G₂ `𝒯` eigenvalue `μ` ↦ `𝒫` eigenvalues `−2 ± √(μ + 4)`.
    G2TToP,
    /// G₂ `𝒫` eigenvalue `λ` ↦ `𝒯` eigenvalue `(λ + 4)² − 4(λ + 4)`.
    G2PToT,
    /// Curl eigenvalue `μ` ↦ Einstein Hessian eigenvalue `μ² + 2μ − 8`.
    G2Einstein,
}

impl HessianMap {
    pub const ALL: [HessianMap; 6] = [
        HessianMap::NkLaplacian,
        HessianMap::NkLaplacianInverse,
        HessianMap::NkRestricted,
        HessianMap::G2TToP,
        HessianMap::G2PToT,
        HessianMap::G2Einstein,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HessianMap::NkLaplacian => "nk-laplacian",
            HessianMap::NkLaplacianInverse => "nk-laplacian-inverse",
            HessianMap::NkRestricted => "nk-restricted",
            HessianMap::G2TToP => "g2-t-to-p",
            HessianMap::G2PToT => "g2-p-to-t",
            HessianMap::G2Einstein => "g2-einstein",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown Hessian map `{s}`")))
    }

    /// Apply the map; two-valued maps return both branches, smaller first.
    pub fn apply(self, x: f64) -> Result<Vec<f64>> {
        if !x.is_finite() {
            return Err(Error::InvalidInput("argument must be finite".into()));
        }
        Ok(match self {
            HessianMap::NkLaplacian => vec![(x + 12.0).powi(2) / 12.0],
            HessianMap::NkLaplacianInverse => {
                if x < 0.0 {
                    return Err(Error::Domain(format!("Laplacian eigenvalue {x} is negative")));
                }
                let r = (12.0 * x).sqrt();
                vec![-12.0 - r, -12.0 + r]
            }
            HessianMap::NkRestricted => vec![x + 12.0],
            HessianMap::G2TToP => {
                if x < G2_T_LOWER_BOUND {
                    return Err(Error::Domain(format!("𝒯 eigenvalue {x} is below −4")));
                }
                let r = (x + 4.0).sqrt();
                vec![-2.0 - r, -2.0 + r]
            }
            HessianMap::G2PToT => vec![(x + 4.0).powi(2) - 4.0 * (x + 4.0)],
            HessianMap::G2Einstein => vec![x * x + 2.0 * x - 8.0],
        })
    }
}

/// Counts of positive, zero and negative values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCounts {
    pub positive: u64,
    pub zero: u64,
    pub negative: u64,
}

impl SignCounts {
    fn tally(values: impl Iterator<Item = f64>) -> Self {
        let mut c = SignCounts::default();
        for v in values {
            if v.abs() <= 1e-12 * (1.0 + v.abs()) {
                c.zero += 1;
            } else if v > 0.0 {
                c.positive += 1;
            } else {
                c.negative += 1;
            }
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondVariationSigns {
    /// Conformal threshold `nλ/(n−1)`.
    pub threshold: f64,
    pub conformal: SignCounts,
    pub tt: SignCounts,
}

/// Signs of the Einstein–Hilbert second variation at an Einstein metric with
/// `Ric = λg` in dimension `n`: on `fg` with `Δf = κf` the sign is that of
/// `κ − nλ/(n−1)`; on a TT tensor with Lichnerowicz eigenvalue `κ_L` it is
/// that of `2λ − κ_L`.
pub fn einstein_second_variation(
    n: u32,
    lambda: f64,
    f_eigs: &[f64],
    tt_eigs: &[f64],
) -> Result<SecondVariationSigns> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension {n} < 3")));
    }
    let threshold = n as f64 * lambda / (n as f64 - 1.0);
    Ok(SecondVariationSigns {
        threshold,
        conformal: SignCounts::tally(f_eigs.iter().map(|k| k - threshold)),
        tt: SignCounts::tally(tt_eigs.iter().map(|k| 2.0 * lambda - k)),
    })
}
