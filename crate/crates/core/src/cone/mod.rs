//! Formal structure-equation calculus on metric cones, and the scaling
//! reductions of the gradient flows.

mod algebra;
mod checks;
mod flows;
mod rules;

pub use algebra::{link_degree, monomial, FormalExpression, Generator, Monomial, Term, Q};
pub use checks::{
    coefficient_equations, cone_closure_check, cone_closure_check_with, cone_forms, npg2_critical_scalar,
    nk_critical_point_expression, ClosureResidual, CoefficientEquation, ConeKind, ConeReport, NpG2Critical,
};
pub use flows::{scaling_flow, scaling_flow_reversed, FlowKind, Trajectory, DEFAULT_DT};
pub use rules::{RuleKind, RuleSet};
