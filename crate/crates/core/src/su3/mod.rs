//! SU(3)-structures on `R^6`: the model, recovery from `(ω, ρ)`, type
//! decompositions, linearised duals, torsion and curvature bookkeeping.

mod maps;
mod structure;
mod symbols;
mod torsion;

pub use maps::{dual_of_4form, MEMBERSHIP_TOL};
pub use structure::{recover_structure, rho_volume, Su3Structure, COMPATIBILITY_TOL};
pub(crate) use symbols::times_scalar;
pub use symbols::contraction_symbol_check;
pub use torsion::{q_vs_eh_density, scalar_curvature, torsion_from_jet, Su3Torsion, JET_CONSISTENCY_TOL};

/// Model SU(3)-structure.
pub fn model() -> Su3Structure {
    Su3Structure::model()
}
