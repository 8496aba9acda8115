use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::{FormalExpression, Generator, Monomial, Term, Q};
use super::rules::{RuleKind, RuleSet};
use crate::error::{Error, Result};
use Generator::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeKind {
    /// Cone over a nearly Kähler 6-manifold, with a G₂-structure.
    G2Cone,
    /// Cone over a nearly parallel G₂-manifold, with a Spin(7)-structure.
    Spin7Cone,
}

impl ConeKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "g2-cone" => Ok(ConeKind::G2Cone),
            "spin7-cone" => Ok(ConeKind::Spin7Cone),
            _ => Err(Error::InvalidInput(format!("unknown cone `{s}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConeKind::G2Cone => "g2-cone",
            ConeKind::Spin7Cone => "spin7-cone",
        }
    }

    pub fn default_rules(self) -> RuleSet {
        match self {
            ConeKind::G2Cone => RuleSet::new(RuleKind::Nk),
            ConeKind::Spin7Cone => RuleSet::new(RuleKind::NearlyParallelG2),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureResidual {
    pub form: String,
    pub residual: FormalExpression,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeReport {
    pub cone: ConeKind,
    pub rules: String,
    pub residuals: Vec<ClosureResidual>,
}

impl ConeReport {
    pub fn is_closed(&self) -> bool {
        self.residuals.iter().all(|r| r.residual.is_zero())
    }
}

fn rdr(k: i32) -> FormalExpression {
    FormalExpression::term(Q::one(), Term { r: k, dr: true, mono: Monomial::new() })
}

/// The calibrating forms on the cone, as `(name, form)` pairs:
/// `φ = dr∧r²ω + r³ρ`, `ψ = −dr∧r³ρ̂ + r⁴σ` over a 6-dimensional link and
/// `Φ = dr∧r³φ + r⁴ψ` over a 7-dimensional one.
pub fn cone_forms(cone: ConeKind, rules: &RuleSet) -> Vec<(String, FormalExpression)> {
    let g = FormalExpression::gen;
    let r = FormalExpression::r_pow;
    match cone {
        ConeKind::G2Cone => vec![
            ("φ".into(), rules.wedge(&rdr(2), &g(Omega)).add(&rules.wedge(&r(3), &g(Rho)))),
            (
                "ψ".into(),
                rules.wedge(&rdr(3), &g(RhoHat)).scale(-Q::one()).add(&rules.wedge(&r(4), &g(Sigma))),
            ),
        ],
        ConeKind::Spin7Cone => {
            vec![("Φ".into(), rules.wedge(&rdr(3), &g(Phi)).add(&rules.wedge(&r(4), &g(Psi))))]
        }
    }
}

/// Exterior derivatives of the cone forms under the given rules.
pub fn cone_closure_check_with(cone: ConeKind, rules: &RuleSet) -> Result<ConeReport> {
    let residuals = cone_forms(cone, rules)
        .into_iter()
        .map(|(form, e)| Ok(ClosureResidual { form, residual: rules.d(&e)? }))
        .collect::<Result<_>>()?;
    Ok(ConeReport { cone, rules: rules.name.clone(), residuals })
}

pub fn cone_closure_check(cone: ConeKind) -> Result<ConeReport> {
    cone_closure_check_with(cone, &cone.default_rules())
}

/// `Δσ − 12σ = −3d(τ₀ρ̂) − 12σ` expanded with the closed-SU(3) rules.
pub fn nk_critical_point_expression() -> Result<FormalExpression> {
    let rules = RuleSet::new(RuleKind::ClosedSu3);
    let t0_rhohat = rules.wedge(&FormalExpression::gen(Tau0), &FormalExpression::gen(RhoHat));
    Ok(rules.d(&t0_rhohat)?.scale(Q::from_integer(-3)).sub(&FormalExpression::gen(Sigma).scale(Q::from_integer(12))))
}

/// The coefficient of one basis form, as a polynomial in `τ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientEquation {
    pub basis: Term,
    /// Coefficients of `1, τ₀, τ₀², …`.
    pub tau0_poly: Vec<Q>,
}

impl CoefficientEquation {
    pub fn eval(&self, tau0: Q) -> Q {
        self.tau0_poly.iter().rev().fold(Q::zero(), |acc, c| acc * tau0 + c)
    }
}

/// Split an expression into coefficient equations, one per basis form.
pub fn coefficient_equations(e: &FormalExpression) -> Vec<CoefficientEquation> {
    let mut grouped: BTreeMap<Term, Vec<Q>> = BTreeMap::new();
    for (t, c) in e.terms() {
        let mut basis = t.clone();
        let k = basis.mono.remove(&Tau0).unwrap_or(0) as usize;
        let poly = grouped.entry(basis).or_default();
        if poly.len() <= k {
            poly.resize(k + 1, Q::zero());
        }
        poly[k] += c;
    }
    grouped.into_iter().map(|(basis, tau0_poly)| CoefficientEquation { basis, tau0_poly }).collect()
}

/// The scalar equation `12τ₀² − (7τ₀² + 5) = 0` for critical points among
/// nearly parallel candidates, and its roots.
#[derive(Clone, Debug, PartialEq)]
pub struct NpG2Critical {
    /// Coefficients of `1, τ₀, τ₀²`.
    pub poly: [Q; 3],
    pub roots: Vec<Q>,
}

impl NpG2Critical {
    pub fn eval(&self, tau0: Q) -> Q {
        self.poly[0] + self.poly[1] * tau0 + self.poly[2] * tau0 * tau0
    }
}

pub fn npg2_critical_scalar() -> NpG2Critical {
    let q = Q::from_integer;
    let lhs = [q(0), q(0), q(12)];
    let rhs = [q(5), q(0), q(7)];
    let poly = [lhs[0] - rhs[0], lhs[1] - rhs[1], lhs[2] - rhs[2]];
    // poly has no linear term, so the roots are ±√(−c₀/c₂) when rational
    let sq = -poly[0] / poly[2];
    let mut roots = Vec::new();
    if let Some(r) = rational_sqrt(sq) {
        roots.push(r);
        if !r.is_zero() {
            roots.push(-r);
        }
    }
    NpG2Critical { poly, roots }
}

fn rational_sqrt(x: Q) -> Option<Q> {
    if x < Q::zero() {
        return None;
    }
    let isqrt = |n: i64| {
        let r = (n as f64).sqrt().round() as i64;
        (r * r == n).then_some(r)
    };
    Some(Q::new(isqrt(*x.numer())?, isqrt(*x.denom())?))
}
