//! Rank-2 representation theory and spectral bookkeeping for the index
//! computations.

mod index;
mod lie;

pub use index::{
    count_in, einstein_index_g2, einstein_index_nk, einstein_second_variation, hitchin_index_g2,
    hitchin_index_nk, nk_conformal_hessian_eigenvalues, s6_stability_report, BettiData, HessianMap,
    S6Entry, S6Report, SecondVariationSigns, SignCounts, SpectralDatum, G2_PSI_P_EIGENVALUE,
    G2_PSI_T_EIGENVALUE, G2_T_LOWER_BOUND, NK_CONSTANT_HESSIAN_EIGENVALUE,
};
pub use lie::{
    branch_g2_to_su3, casimir_laplacian_g2, hom_dim_g2_su3, positive_roots, restrict_to_a2,
    weight_multiplicities, weyl_dim, Algebra, Weight,
};
