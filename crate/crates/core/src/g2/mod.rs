//! G₂-structures on `R^7`: metric recovery, type decompositions, the
//! linearised dual `𝒥`, torsion, curvature and symbol identities.

mod maps;
mod structure;
mod symbols;
mod torsion;

pub use maps::{MetricVariation, MEMBERSHIP_TOL};
pub use structure::{metric_from_phi, model_phi, G2Structure};
pub use symbols::{tau0_variation, g2_curl_symbol_checks, CurlSymbolReport};
pub use torsion::{scalar_curvature_g2, t_vs_eh_density, torsion_from_jet_g2, G2Torsion};

/// Model G₂-structure with `g = Id`.
pub fn model_g2() -> G2Structure {
    G2Structure::model()
}
