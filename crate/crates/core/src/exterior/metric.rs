use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::{basis, binomial, members, wedge_sign, MAX_DIM};
use super::form::Form;
use crate::error::{Error, Result};

/// Square matrix serialized as `{dim, entries}` with row-major nested arrays.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<Vec<f64>>,
}

fn to_matrix(r: &MatrixRepr) -> Result<DMatrix<f64>> {
    if r.entries.len() != r.dim || r.entries.iter().any(|row| row.len() != r.dim) {
        return Err(Error::InvalidInput(format!("expected a {0}x{0} matrix", r.dim)));
    }
    if r.entries.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    Ok(DMatrix::from_fn(r.dim, r.dim, |i, j| r.entries[i][j]))
}

fn to_repr(m: &DMatrix<f64>) -> MatrixRepr {
    MatrixRepr { dim: m.nrows(), entries: rows_of(m) }
}

pub(crate) fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// A constant Riemannian metric on `R^n`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Metric {
    g: DMatrix<f64>,
    inv: DMatrix<f64>,
    euclidean: bool,
    grams: OnceLock<Vec<DMatrix<f64>>>,
}

impl std::fmt::Debug for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Metric({:?})", rows_of(&self.g))
    }
}

impl PartialEq for Metric {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g
    }
}

impl TryFrom<MatrixRepr> for Metric {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        Metric::from_matrix(to_matrix(&r)?)
    }
}

impl From<Metric> for MatrixRepr {
    fn from(m: Metric) -> Self {
        to_repr(&m.g)
    }
}

impl Metric {
    pub fn euclidean(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n));
        let id = DMatrix::identity(n, n);
        Metric { g: id.clone(), inv: id, euclidean: true, grams: OnceLock::new() }
    }

    /// Validates symmetry and positive definiteness.
    pub fn from_matrix(g: DMatrix<f64>) -> Result<Self> {
        let n = g.nrows();
        if n != g.ncols() || !(1..=MAX_DIM).contains(&n) {
            return Err(Error::DimensionMismatch(format!("metric of shape {}x{}", n, g.ncols())));
        }
        let scale = g.amax().max(1.0);
        if (&g - g.transpose()).amax() > 1e-10 * scale {
            return Err(Error::Positivity("metric is not symmetric".into()));
        }
        let g = (&g + g.transpose()) * 0.5;
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Positivity("metric is not positive definite".into()))?;
        let inv = chol.inverse();
        let euclidean = (&g - DMatrix::identity(n, n)).amax() == 0.0;
        Ok(Metric { g, inv, euclidean, grams: OnceLock::new() })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        Metric::from_matrix(to_matrix(&MatrixRepr { dim: n, entries: rows.to_vec() })?)
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn is_euclidean(&self) -> bool {
        self.euclidean
    }

    /// `sqrt(det g)`, the density of the Riemannian volume against `e^{1...n}`.
    pub fn sqrt_det(&self) -> f64 {
        self.g.determinant().sqrt()
    }

    /// Inner product of vectors.
    pub fn vec_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| x[i] * self.g[(i, j)] * y[j]).sum::<f64>()).sum()
    }

    /// Vector to 1-form.
    pub fn lower(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.g, x)
    }

    /// 1-form to vector.
    pub fn raise(&self, a: &[f64]) -> Vec<f64> {
        mat_vec(&self.inv, a)
    }

    pub(crate) fn gram(&self, k: usize) -> &DMatrix<f64> {
        &self.grams.get_or_init(|| {
            let n = self.dim();
            let b = basis(n);
            (0..=n)
                .map(|deg| {
                    let subs = &b.subsets[deg];
                    DMatrix::from_fn(subs.len(), subs.len(), |r, c| {
                        if deg == 0 {
                            return 1.0;
                        }
                        let rows: Vec<usize> = members(subs[r]).collect();
                        let cols: Vec<usize> = members(subs[c]).collect();
                        DMatrix::from_fn(deg, deg, |i, j| self.inv[(rows[i], cols[j])]).determinant()
                    })
                })
                .collect()
        })[k]
    }

    /// Induced inner product on k-forms.
    pub fn inner(&self, a: &Form, b: &Form) -> f64 {
        a.assert_same_shape(b);
        assert_eq!(a.dim(), self.dim());
        if self.euclidean {
            return a.dot(b);
        }
        let g = self.gram(a.degree());
        let (x, y) = (a.coeffs(), b.coeffs());
        let mut s = 0.0;
        for i in 0..x.len() {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..y.len() {
                s += x[i] * g[(i, j)] * y[j];
            }
        }
        s
    }

    pub fn norm_sq(&self, a: &Form) -> f64 {
        self.inner(a, a)
    }

    /// Hodge star, characterised by `α ∧ ⋆β = <α, β> vol_g`, with
    /// `vol_g = orientation · sqrt(det g) · e^{1...n}`.
    pub fn hodge(&self, a: &Form, orientation: f64) -> Form {
        let n = self.dim();
        assert_eq!(a.dim(), n);
        let k = a.degree();
        let b = basis(n);
        let full: u16 = ((1u32 << n) - 1) as u16;
        let raised: Vec<f64> = if self.euclidean {
            a.coeffs().to_vec()
        } else {
            let g = self.gram(k);
            (0..a.len()).map(|i| (0..a.len()).map(|j| g[(i, j)] * a.coeffs()[j]).sum()).collect()
        };
        let factor = orientation * self.sqrt_det();
        let mut out = vec![0.0; binomial(n, n - k)];
        for (&c, &i) in raised.iter().zip(&b.subsets[k]) {
            if c == 0.0 {
                continue;
            }
            let comp = full & !i;
            out[b.index[comp as usize]] += factor * wedge_sign(i, comp) * c;
        }
        Form::new(n, n - k, out).expect("hodge output shape")
    }

    /// Riemannian volume form for the given orientation.
    pub fn volume_form(&self, orientation: f64) -> Form {
        Form::volume(self.dim()).scale(orientation * self.sqrt_det())
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum()).collect()
}

/// A linear endomorphism of `R^n`; column `b` is the image of `e_b`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Endomorphism {
    m: DMatrix<f64>,
}

impl std::fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Endomorphism({:?})", rows_of(&self.m))
    }
}

impl TryFrom<MatrixRepr> for Endomorphism {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        Ok(Endomorphism { m: to_matrix(&r)? })
    }
}

impl From<Endomorphism> for MatrixRepr {
    fn from(e: Endomorphism) -> Self {
        to_repr(&e.m)
    }
}

impl Endomorphism {
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Endomorphism { m }
    }

    pub fn identity(n: usize) -> Self {
        Endomorphism { m: DMatrix::identity(n, n) }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        rows_of(&self.m)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.m, x)
    }

    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        Endomorphism { m: &self.m * &other.m }
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn scale(&self, c: f64) -> Endomorphism {
        Endomorphism { m: &self.m * c }
    }

    pub fn add(&self, other: &Endomorphism) -> Endomorphism {
        Endomorphism { m: &self.m + &other.m }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.amax()
    }

    /// Natural action on forms: `(S_* α)(X_1, ...) = -Σ α(..., S X_i, ...)`.
    pub fn act(&self, a: &Form) -> Form {
        assert_eq!(a.dim(), self.dim());
        // Substituting S into slot i of e^p replaces e^p by e^p ∘ S = Σ_q S[p][q] e^q.
        a.endo_action(&self.rows())
    }

    /// Action on 1-forms through the metric, `α ↦ g(S α♯, ·)`.
    pub fn on_covector(&self, g: &Metric, a: &[f64]) -> Vec<f64> {
        g.lower(&self.apply(&g.raise(a)))
    }
}
