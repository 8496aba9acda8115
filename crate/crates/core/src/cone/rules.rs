use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::algebra::{link_degree, monomial, mul_monomials, FormalExpression, Generator, Monomial, Term, Q};
use crate::error::{Error, Result};
use Generator::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Nk,
    NearlyParallelG2,
    ClosedSu3,
}

impl RuleKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "nk" => Ok(RuleKind::Nk),
            "nearly-parallel-g2" => Ok(RuleKind::NearlyParallelG2),
            "closed-su3" => Ok(RuleKind::ClosedSu3),
            _ => Err(Error::InvalidInput(format!("unknown rule set `{s}`"))),
        }
    }
}

/// Structure equations of a class of link structures: the differential of
/// each generator together with the algebraic relations among generators.
#[derive(Clone, Debug)]
pub struct RuleSet {
    pub name: String,
    link_dim: u32,
    d_rules: BTreeMap<Generator, FormalExpression>,
    relations: Vec<(Monomial, FormalExpression)>,
}

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn g(x: Generator) -> FormalExpression {
    FormalExpression::gen(x)
}

/// SU(3) relations: `ω∧ρ = ω∧ρ̂ = 0`, `ω² = 2σ`, `ρ∧ρ̂ = ⅔ω³ = (4/3) ω∧σ`,
/// and `τ̂₂` primitive of type (1,1).
fn su3_relations() -> Vec<(Monomial, FormalExpression)> {
    let om_sigma = FormalExpression::term(Q::one(), Term::link(monomial(&[(Omega, 1), (Sigma, 1)])));
    vec![
        (monomial(&[(Omega, 2)]), g(Sigma).scale(q(2))),
        (monomial(&[(Omega, 1), (Rho, 1)]), FormalExpression::zero()),
        (monomial(&[(Omega, 1), (RhoHat, 1)]), FormalExpression::zero()),
        (monomial(&[(Rho, 1), (RhoHat, 1)]), om_sigma.scale(Q::new(4, 3))),
        (monomial(&[(Tau2Hat, 1), (Sigma, 1)]), FormalExpression::zero()),
        (monomial(&[(Tau2Hat, 1), (Rho, 1)]), FormalExpression::zero()),
        (monomial(&[(Tau2Hat, 1), (RhoHat, 1)]), FormalExpression::zero()),
    ]
}

impl RuleSet {
    pub fn new(kind: RuleKind) -> Self {
        match kind {
            RuleKind::Nk => Self::nearly_kahler(q(3), q(-4)),
            RuleKind::NearlyParallelG2 => Self::nearly_parallel_g2(q(4)),
            RuleKind::ClosedSu3 => Self::closed_su3(),
        }
    }

    /// Nearly Kähler rules `dω = a ρ`, `dρ = 0`, `dρ̂ = b σ`; the genuine
    /// structure equations have `a = 3`, `b = −4`.
    pub fn nearly_kahler(a: Q, b: Q) -> Self {
        let mut r = RuleSet { name: "nk".into(), link_dim: 6, d_rules: BTreeMap::new(), relations: su3_relations() };
        r.d_rules.insert(Omega, g(Rho).scale(a));
        r.d_rules.insert(Rho, FormalExpression::zero());
        r.d_rules.insert(RhoHat, g(Sigma).scale(b));
        r.derive_sigma();
        r
    }

    /// Nearly parallel G₂ rules `dφ = c ψ`, `dψ = 0` (genuinely `c = 4`).
    pub fn nearly_parallel_g2(c: Q) -> Self {
        let mut r = RuleSet { name: "nearly-parallel-g2".into(), link_dim: 7, d_rules: BTreeMap::new(), relations: vec![] };
        r.d_rules.insert(Phi, g(Psi).scale(c));
        r.d_rules.insert(Psi, FormalExpression::zero());
        r
    }

    /// SU(3)-structures with `dω = 3τ₀ρ`, `dρ = 0` and `dρ̂ = −4τ₀σ + τ̂₂∧ω`
    /// (the class with `τ̂₁ = 0` assumed). `dτ₀∧ρ = 0` is declared, being
    /// forced by `d²ω = 0`. `dτ̂₂` is deliberately left undefined.
    pub fn closed_su3() -> Self {
        let mut r = RuleSet { name: "closed-su3".into(), link_dim: 6, d_rules: BTreeMap::new(), relations: su3_relations() };
        r.relations.push((monomial(&[(DTau0, 1), (Rho, 1)]), FormalExpression::zero()));
        r.d_rules.insert(Tau0, g(DTau0));
        r.d_rules.insert(DTau0, FormalExpression::zero());
        let t0_rho = FormalExpression::term(Q::one(), Term::link(monomial(&[(Tau0, 1), (Rho, 1)])));
        r.d_rules.insert(Omega, t0_rho.scale(q(3)));
        r.d_rules.insert(Rho, FormalExpression::zero());
        let t0_sigma = FormalExpression::term(q(-4), Term::link(monomial(&[(Tau0, 1), (Sigma, 1)])));
        let t2_omega = FormalExpression::term(Q::one(), Term::link(monomial(&[(Omega, 1), (Tau2Hat, 1)])));
        r.d_rules.insert(RhoHat, t0_sigma.add(&t2_omega));
        r.derive_sigma();
        r
    }

    /// `dσ = ω∧dω`, from `σ = ω²/2`.
    fn derive_sigma(&mut self) {
        let ds = self.wedge(&g(Omega), &self.d_rules[&Omega].clone());
        self.d_rules.insert(Sigma, ds);
    }

    pub fn link_dim(&self) -> u32 {
        self.link_dim
    }

    pub fn defines(&self, x: Generator) -> bool {
        self.d_rules.contains_key(&x)
    }

    pub fn generators(&self) -> Vec<Generator> {
        self.d_rules.keys().copied().collect()
    }

    pub fn relations(&self) -> &[(Monomial, FormalExpression)] {
        &self.relations
    }

    /// Reduce a link monomial modulo the relations and degree truncation.
    fn reduce(&self, c: Q, m: Monomial) -> Vec<(Q, Monomial)> {
        if link_degree(&m) > self.link_dim {
            return vec![];
        }
        for (pat, rep) in &self.relations {
            if pat.iter().all(|(x, e)| m.get(x).copied().unwrap_or(0) >= *e) {
                let mut rest = m.clone();
                for (x, e) in pat {
                    let left = rest[x] - e;
                    if left == 0 {
                        rest.remove(x);
                    } else {
                        rest.insert(*x, left);
                    }
                }
                let (s, _) = mul_monomials(pat, &rest).expect("sub-monomial of a valid monomial");
                let mut out = Vec::new();
                for (t, v) in rep.terms() {
                    if let Some((s2, prod)) = mul_monomials(&t.mono, &rest) {
                        out.extend(self.reduce(c * *v * q(s * s2), prod));
                    }
                }
                return out;
            }
        }
        vec![(c, m)]
    }

    /// Product in the cone algebra, reduced modulo the relations.
    pub fn wedge(&self, a: &FormalExpression, b: &FormalExpression) -> FormalExpression {
        let mut out = FormalExpression::zero();
        for (ta, ca) in a.terms() {
            for (tb, cb) in b.terms() {
                if ta.dr && tb.dr {
                    continue;
                }
                let Some((s, mono)) = mul_monomials(&ta.mono, &tb.mono) else { continue };
                let mut sign = s;
                if tb.dr && link_degree(&ta.mono) % 2 == 1 {
                    sign = -sign;
                }
                for (c, m) in self.reduce(*ca * *cb * q(sign), mono) {
                    out.add_term(c, Term { r: ta.r + tb.r, dr: ta.dr || tb.dr, mono: m });
                }
            }
        }
        out
    }

    pub fn normalize(&self, a: &FormalExpression) -> FormalExpression {
        self.wedge(&FormalExpression::one(), a)
    }

    fn d_monomial(&self, m: &Monomial) -> Result<FormalExpression> {
        let factors: Vec<Generator> = m.iter().flat_map(|(x, e)| std::iter::repeat_n(*x, *e as usize)).collect();
        let mut out = FormalExpression::zero();
        for i in 0..factors.len() {
            let dx = self.d_rules.get(&factors[i]).ok_or_else(|| Error::Incompleteness(factors[i].symbol().into()))?;
            let before: u32 = factors[..i].iter().map(|x| x.degree()).sum();
            let mut acc = FormalExpression::one();
            for (j, x) in factors.iter().enumerate() {
                let f = if j == i { dx.clone() } else { g(*x) };
                acc = self.wedge(&acc, &f);
            }
            out = if before.is_multiple_of(2) { out.add(&acc) } else { out.sub(&acc) };
        }
        Ok(out)
    }

    /// Exterior derivative on the cone: graded Leibniz, `d(r^k) = k r^{k−1} dr`,
    /// `d(dr) = 0` and the link rules.
    pub fn d(&self, e: &FormalExpression) -> Result<FormalExpression> {
        let mut out = FormalExpression::zero();
        for (t, c) in e.terms() {
            if !t.dr && t.r != 0 {
                let lead = FormalExpression::term(*c * q(t.r as i64), Term { r: t.r - 1, dr: true, mono: Monomial::new() });
                out = out.add(&self.wedge(&lead, &FormalExpression::term(Q::one(), Term::link(t.mono.clone()))));
            }
            let dm = self.d_monomial(&t.mono)?;
            if dm.is_zero() {
                continue;
            }
            let sign = if t.dr { -*c } else { *c };
            let prefix = FormalExpression::term(sign, Term { r: t.r, dr: t.dr, mono: Monomial::new() });
            out = out.add(&self.wedge(&prefix, &dm));
        }
        Ok(out)
    }

    /// `d(lhs − rhs)` for every relation whose generators all have a
    /// declared differential; all vanish when `d` is well defined on the
    /// quotient algebra.
    pub fn relation_residuals(&self) -> Result<Vec<(Monomial, FormalExpression)>> {
        self.relations
            .iter()
            .filter(|(pat, _)| pat.keys().all(|x| self.defines(*x)))
            .map(|(pat, rep)| Ok((pat.clone(), self.d_monomial(pat)?.sub(&self.d(rep)?))))
            .collect()
    }
}
