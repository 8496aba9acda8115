//! Lexicographic k-subset bases of exterior powers, stored as bitmasks.

use std::sync::OnceLock;

/// Largest ambient dimension supported by the dense representation.
pub const MAX_DIM: usize = 8;

pub(crate) struct Basis {
    /// `subsets[k]` lists the k-subsets of `0..n` in lexicographic order.
    pub subsets: Vec<Vec<u16>>,
    /// Position of a subset within its degree.
    pub index: Vec<usize>,
}

fn build(n: usize) -> Basis {
    let mut subsets = vec![Vec::new(); n + 1];
    let mut stack = Vec::new();
    fn rec(start: usize, n: usize, stack: &mut Vec<usize>, out: &mut [Vec<u16>]) {
        let mask = stack.iter().fold(0u16, |m, &i| m | (1 << i));
        out[stack.len()].push(mask);
        for i in start..n {
            stack.push(i);
            rec(i + 1, n, stack, out);
            stack.pop();
        }
    }
    rec(0, n, &mut stack, &mut subsets);
    // Depth-first generation visits each degree in lexicographic order already.
    let mut index = vec![usize::MAX; 1 << n];
    for deg in &subsets {
        for (i, &m) in deg.iter().enumerate() {
            index[m as usize] = i;
        }
    }
    Basis { subsets, index }
}

pub(crate) fn basis(n: usize) -> &'static Basis {
    static TABLES: OnceLock<Vec<Basis>> = OnceLock::new();
    &TABLES.get_or_init(|| (0..=MAX_DIM).map(build).collect())[n]
}

/// Number of k-subsets of an n-set.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of `e^I ∧ e^J` for disjoint index sets.
pub(crate) fn wedge_sign(i: u16, j: u16) -> f64 {
    let mut swaps = 0u32;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        swaps += (i >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of contracting `e_b` into `e^I` (`b` must lie in `I`).
pub(crate) fn contraction_sign(i: u16, b: usize) -> f64 {
    if (i & ((1u16 << b) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Indices (0-based) of the set bits of a mask, ascending.
pub(crate) fn members(mask: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |b| mask & (1 << b) != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomials() {
        for n in 1..=MAX_DIM {
            for k in 0..=n {
                assert_eq!(basis(n).subsets[k].len(), binomial(n, k));
            }
        }
    }

    #[test]
    fn lexicographic() {
        let b = basis(6);
        let as_vec = |m: u16| members(m).collect::<Vec<_>>();
        for w in b.subsets[3].windows(2) {
            assert!(as_vec(w[0]) < as_vec(w[1]));
        }
        assert_eq!(as_vec(b.subsets[3][0]), vec![0, 1, 2]);
        assert_eq!(as_vec(b.subsets[3][19]), vec![3, 4, 5]);
    }

    #[test]
    fn signs() {
        // e1 ∧ e2 = +, e2 ∧ e1 = -
        assert_eq!(wedge_sign(0b01, 0b10), 1.0);
        assert_eq!(wedge_sign(0b10, 0b01), -1.0);
        // e135 ∧ e246: three inversions
        assert_eq!(wedge_sign(0b010101, 0b101010), -1.0);
        assert_eq!(contraction_sign(0b111, 1), -1.0);
    }
}
