#![allow(dead_code)]

use hitchin::exterior::{binomial, Form};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Evaluates a form on vectors as an alternating multilinear map:
/// `e^I(v_1, ..., v_k) = det[v_j(i)]`.
pub fn eval(a: &Form, vs: &[Vec<f64>]) -> f64 {
    assert_eq!(vs.len(), a.degree());
    if a.degree() == 0 {
        return a.coeffs()[0];
    }
    a.terms()
        .map(|(c, idx)| {
            let k = idx.len();
            c * DMatrix::from_fn(k, k, |r, s| vs[s][idx[r]]).determinant()
        })
        .sum()
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            (p, if inv % 2 == 0 { 1.0 } else { -1.0 })
        })
        .collect()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn form_strategy(dim: usize, degree: usize) -> impl Strategy<Value = Form> {
    prop::collection::vec(-2.0f64..2.0, binomial(dim, degree))
        .prop_map(move |c| Form::new(dim, degree, c).unwrap())
}

pub fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, dim)
}

pub fn matrix_strategy(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), dim)
}

/// Symmetric positive-definite matrix `I + B Bᵀ/2`.
pub fn spd_strategy(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    matrix_strategy(dim).prop_map(move |b| {
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let s: f64 = (0..dim).map(|k| b[i][k] * b[j][k]).sum();
                        s * 0.5 + if i == j { 1.0 } else { 0.0 }
                    })
                    .collect()
            })
            .collect()
    })
}
