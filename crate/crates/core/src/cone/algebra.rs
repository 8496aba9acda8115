use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Q = Ratio<i64>;

/// Generators of the structure-equation algebra on the link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Tau0,
    DTau0,
    Omega,
    Tau2Hat,
    Rho,
    RhoHat,
    Sigma,
    Phi,
    Psi,
}

impl Generator {
    pub fn degree(self) -> u32 {
        match self {
            Generator::Tau0 => 0,
            Generator::DTau0 => 1,
            Generator::Omega | Generator::Tau2Hat => 2,
            Generator::Rho | Generator::RhoHat | Generator::Phi => 3,
            Generator::Sigma | Generator::Psi => 4,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Generator::Tau0 => "τ₀",
            Generator::DTau0 => "dτ₀",
            Generator::Omega => "ω",
            Generator::Tau2Hat => "τ̂₂",
            Generator::Rho => "ρ",
            Generator::RhoHat => "ρ̂",
            Generator::Sigma => "σ",
            Generator::Phi => "φ",
            Generator::Psi => "ψ",
        }
    }
}

/// A product of generators in canonical order, stored as exponents.
pub type Monomial = BTreeMap<Generator, u32>;

pub fn monomial(factors: &[(Generator, u32)]) -> Monomial {
    factors.iter().filter(|(_, e)| *e > 0).copied().collect()
}

pub fn link_degree(m: &Monomial) -> u32 {
    m.iter().map(|(g, e)| g.degree() * e).sum()
}

/// `(sign, product)` of two monomials in a graded-commutative algebra, or
/// `None` when an odd generator is squared.
pub(crate) fn mul_monomials(a: &Monomial, b: &Monomial) -> Option<(i64, Monomial)> {
    let mut sign = 1;
    for (x, ea) in a {
        for (y, eb) in b {
            if y < x && (ea * eb * x.degree() * y.degree()) % 2 == 1 {
                sign = -sign;
            }
        }
    }
    let mut out = a.clone();
    for (g, e) in b {
        *out.entry(*g).or_insert(0) += e;
    }
    if out.iter().any(|(g, e)| g.degree() % 2 == 1 && *e > 1) {
        return None;
    }
    Some((sign, out))
}

/// Basis element `r^k (dr ∧)^ε m` of the cone algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub r: i32,
    pub dr: bool,
    pub mono: Monomial,
}

impl Term {
    pub fn link(mono: Monomial) -> Self {
        Term { r: 0, dr: false, mono }
    }
}

/// A finite rational combination of basis terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalExpression {
    terms: BTreeMap<Term, Q>,
}

impl FormalExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(Q::one(), Term::link(Monomial::new()))
    }

    pub fn term(c: Q, t: Term) -> Self {
        let mut e = Self::zero();
        e.add_term(c, t);
        e
    }

    pub fn gen(g: Generator) -> Self {
        Self::term(Q::one(), Term::link(monomial(&[(g, 1)])))
    }

    pub fn constant(c: Q) -> Self {
        Self::term(c, Term::link(Monomial::new()))
    }

    /// `r^k`.
    pub fn r_pow(k: i32) -> Self {
        Self::term(Q::one(), Term { r: k, dr: false, mono: Monomial::new() })
    }

    pub fn dr() -> Self {
        Self::term(Q::one(), Term { r: 0, dr: true, mono: Monomial::new() })
    }

    pub fn add_term(&mut self, c: Q, t: Term) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, t: &Term) -> Q {
        self.terms.get(t).copied().unwrap_or_else(Q::zero)
    }

    /// Coefficient of a link monomial (no `r`, no `dr`).
    pub fn link_coefficient(&self, factors: &[(Generator, u32)]) -> Q {
        self.coefficient(&Term::link(monomial(factors)))
    }

    pub fn scale(&self, c: Q) -> Self {
        let mut out = Self::zero();
        for (t, v) in &self.terms {
            out.add_term(*v * c, t.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, v) in &other.terms {
            out.add_term(*v, t.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Q::one()))
    }

    /// Replace the scalar generator `g` by the constant `value`.
    pub fn substitute(&self, g: Generator, value: Q) -> Self {
        let mut out = Self::zero();
        for (t, v) in &self.terms {
            let mut t = t.clone();
            let e = t.mono.remove(&g).unwrap_or(0);
            let mut c = *v;
            for _ in 0..e {
                c *= value;
            }
            out.add_term(c, t);
        }
        out
    }

    /// Set the generator `g` to zero.
    pub fn kill(&self, g: Generator) -> Self {
        let mut out = Self::zero();
        for (t, v) in &self.terms {
            if !t.mono.contains_key(&g) {
                out.add_term(*v, t.clone());
            }
        }
        out
    }

    /// Largest absolute coefficient, as a float.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|v| *v.numer() as f64 / *v.denom() as f64).fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.r != 0 {
            parts.push(if self.r == 1 { "r".to_string() } else { format!("r^{}", self.r) });
        }
        let mut wedge = Vec::new();
        if self.dr {
            wedge.push("dr".to_string());
        }
        for (g, e) in &self.mono {
            if *e == 1 {
                wedge.push(g.symbol().to_string());
            } else {
                wedge.push(format!("{}^{}", g.symbol(), e));
            }
        }
        if !wedge.is_empty() {
            parts.push(wedge.join("∧"));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl fmt::Display for FormalExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let a = c.abs();
            let body = t.to_string();
            if a.is_one() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{}", fmt_q(&a))?;
            } else {
                write!(f, "{} {}", fmt_q(&a), body)?;
            }
        }
        Ok(())
    }
}
