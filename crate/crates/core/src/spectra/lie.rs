use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two rank-2 algebras needed here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algebra {
    A2,
    G2,
}

/// A weight in the basis of fundamental weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub algebra: Algebra,
    pub coords: [i64; 2],
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.coords[0], self.coords[1])
    }
}

impl Weight {
    pub fn new(algebra: Algebra, a: i64, b: i64) -> Self {
        Weight { algebra, coords: [a, b] }
    }
    pub fn g2(a: i64, b: i64) -> Self {
        Self::new(Algebra::G2, a, b)
    }
    pub fn a2(a: i64, b: i64) -> Self {
        Self::new(Algebra::A2, a, b)
    }

    pub fn is_dominant(&self) -> bool {
        self.coords[0] >= 0 && self.coords[1] >= 0
    }

    fn shift(&self, d: [i64; 2], k: i64) -> Weight {
        Weight { algebra: self.algebra, coords: [self.coords[0] + k * d[0], self.coords[1] + k * d[1]] }
    }

    /// Image under the simple reflection `s_i`.
    pub fn reflect(&self, i: usize) -> Weight {
        self.shift(simple_roots(self.algebra)[i], -self.coords[i])
    }

    fn require_dominant(&self) -> Result<()> {
        if self.is_dominant() {
            Ok(())
        } else {
            Err(Error::Domain(format!("{self} is not dominant")))
        }
    }
}

/// Gram matrix of the fundamental weights (scaled by 3 for A₂, where the
/// roots have squared length 2; G₂ short roots have squared length 2).
fn gram(alg: Algebra) -> [[i64; 2]; 2] {
    match alg {
        Algebra::A2 => [[2, 1], [1, 2]],
        Algebra::G2 => [[2, 3], [3, 6]],
    }
}

fn simple_roots(alg: Algebra) -> [[i64; 2]; 2] {
    match alg {
        Algebra::A2 => [[2, -1], [-1, 2]],
        Algebra::G2 => [[2, -1], [-3, 2]],
    }
}

/// Positive roots in fundamental-weight coordinates.
pub fn positive_roots(alg: Algebra) -> Vec<[i64; 2]> {
    match alg {
        Algebra::A2 => vec![[2, -1], [-1, 2], [1, 1]],
        Algebra::G2 => vec![[2, -1], [-3, 2], [-1, 1], [1, 0], [3, -1], [0, 1]],
    }
}

fn ip(alg: Algebra, a: [i64; 2], b: [i64; 2]) -> i64 {
    let g = gram(alg);
    (0..2).map(|i| (0..2).map(|j| a[i] * g[i][j] * b[j]).sum::<i64>()).sum()
}

fn plus_rho(w: &Weight) -> [i64; 2] {
    [w.coords[0] + 1, w.coords[1] + 1]
}

/// Weyl dimension formula.
pub fn weyl_dim(w: &Weight) -> Result<u64> {
    w.require_dominant()?;
    let (mut num, mut den) = (1i128, 1i128);
    for a in positive_roots(w.algebra) {
        num *= ip(w.algebra, plus_rho(w), a) as i128;
        den *= ip(w.algebra, [1, 1], a) as i128;
    }
    Ok((num / den) as u64)
}

/// Eigenvalue of the canonical Laplacian on the G₂-isotypic component of
/// highest weight `(λ, μ)`: `λ(λ+2) + 3μ(μ+2) + 3(λμ + λ + μ)`, which is
/// `½(γ, γ + 2ρ)` for short roots of squared length 2.
pub fn casimir_laplacian_g2(w: &Weight) -> Result<f64> {
    if w.algebra != Algebra::G2 {
        return Err(Error::InvalidInput("expected a G₂ weight".into()));
    }
    w.require_dominant()?;
    let c = w.coords;
    let v = ip(Algebra::G2, c, c) + 2 * ip(Algebra::G2, c, [1, 1]);
    Ok(v as f64 / 2.0)
}

/// Positive roots in simple-root coordinates, aligned with `positive_roots`.
fn positive_roots_simple(alg: Algebra) -> Vec<[i64; 2]> {
    match alg {
        Algebra::A2 => vec![[1, 0], [0, 1], [1, 1]],
        Algebra::G2 => vec![[1, 0], [0, 1], [1, 1], [2, 1], [3, 1], [3, 2]],
    }
}

/// Weight multiplicities of the irreducible representation with highest
/// weight `w` (Freudenthal's recursion in exact integer arithmetic).
pub fn weight_multiplicities(w: &Weight) -> Result<BTreeMap<Weight, u64>> {
    w.require_dominant()?;
    let alg = w.algebra;
    let roots = positive_roots(alg);
    let roots_simple = positive_roots_simple(alg);
    let [a1, a2] = simple_roots(alg);
    // Λ − w₀Λ in simple-root coordinates bounds the depth of every weight.
    let (p, q) = (w.coords[0], w.coords[1]);
    let depth = match alg {
        Algebra::A2 => [p + q, p + q],
        Algebra::G2 => [2 * (2 * p + 3 * q), 2 * (p + 2 * q)],
    };
    let top = ip(alg, plus_rho(w), plus_rho(w));
    // Multiplicities indexed by depth (n₁, n₂): μ = Λ − n₁α₁ − n₂α₂.
    let mut mult: HashMap<[i64; 2], i64> = HashMap::new();
    mult.insert([0, 0], 1);
    for level in 1..=(depth[0] + depth[1]) {
        for n1 in 0..=level.min(depth[0]) {
            let n2 = level - n1;
            if n2 > depth[1] {
                continue;
            }
            let mu = w.shift(a1, -n1).shift(a2, -n2);
            let mut rhs = 0i64;
            for (a, s) in roots.iter().zip(&roots_simple) {
                let mut k = 1;
                while n1 - k * s[0] >= 0 && n2 - k * s[1] >= 0 {
                    if let Some(&m) = mult.get(&[n1 - k * s[0], n2 - k * s[1]]) {
                        rhs += 2 * m * ip(alg, mu.shift(*a, k).coords, *a);
                    }
                    k += 1;
                }
            }
            let den = top - ip(alg, plus_rho(&mu), plus_rho(&mu));
            let m = match den {
                0 if rhs == 0 => 0,
                0 => return Err(Error::Branching(format!("Freudenthal recursion is singular at {mu}"))),
                _ if rhs % den != 0 || rhs / den < 0 => {
                    return Err(Error::Branching(format!("non-integral multiplicity at {mu}")))
                }
                _ => rhs / den,
            };
            if m > 0 {
                mult.insert([n1, n2], m);
            }
        }
    }
    Ok(mult
        .into_iter()
        .map(|(n, m)| (w.shift(a1, -n[0]).shift(a2, -n[1]), m as u64))
        .collect())
}

/// Restriction of a G₂ weight to the maximal torus of SU(3), fixed by
/// requiring the 7-dimensional representation to restrict to `1 ⊕ 3 ⊕ 3̄`.
pub fn restrict_to_a2(w: &Weight) -> Weight {
    debug_assert_eq!(w.algebra, Algebra::G2);
    Weight::a2(w.coords[1], w.coords[0] + w.coords[1])
}

/// Decomposition of the G₂ irrep `w` into SU(3) irreps, as highest weights
/// with multiplicity.
pub fn branch_g2_to_su3(w: &Weight) -> Result<BTreeMap<Weight, u64>> {
    if w.algebra != Algebra::G2 {
        return Err(Error::InvalidInput("expected a G₂ weight".into()));
    }
    let mut remaining: HashMap<Weight, i64> = HashMap::new();
    for (mu, m) in weight_multiplicities(w)? {
        *remaining.entry(restrict_to_a2(&mu)).or_insert(0) += m as i64;
    }
    let mut out = BTreeMap::new();
    loop {
        remaining.retain(|_, m| *m != 0);
        if remaining.is_empty() {
            break;
        }
        if let Some((bad, _)) = remaining.iter().find(|(_, &m)| m < 0) {
            return Err(Error::Branching(format!("negative multiplicity left at {bad}")));
        }
        let height = |v: &Weight| ip(Algebra::A2, v.coords, [1, 1]);
        let (&hw, &count) = remaining.iter().max_by_key(|(v, _)| (height(v), v.coords)).expect("non-empty");
        if !hw.is_dominant() {
            return Err(Error::Branching(format!("highest remaining weight {hw} is not dominant")));
        }
        for (mu, m) in weight_multiplicities(&hw)? {
            *remaining.entry(mu).or_insert(0) -= count * m as i64;
        }
        *out.entry(hw).or_insert(0) += count as u64;
    }
    Ok(out)
}

/// `dim Hom_SU(3)(V_w, V_target)`.
pub fn hom_dim_g2_su3(w: &Weight, target: &Weight) -> Result<u64> {
    Ok(branch_g2_to_su3(w)?.get(target).copied().unwrap_or(0))
}
