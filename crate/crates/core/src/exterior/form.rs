use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use super::basis::{basis, binomial, contraction_sign, members, wedge_sign, MAX_DIM};
use crate::error::{Error, Result};

/// A constant-coefficient exterior form on `R^dim`.
///
/// Coefficients are indexed by the k-subsets of `{1, ..., dim}` in
/// lexicographic order, so a 2-form on `R^3` stores `(e12, e13, e23)`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct Form {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<FormRepr> for Form {
    type Error = Error;
    fn try_from(r: FormRepr) -> Result<Self> {
        Form::new(r.dim, r.degree, r.coeffs)
    }
}

impl From<Form> for FormRepr {
    fn from(f: Form) -> Self {
        FormRepr { dim: f.dim, degree: f.degree, coeffs: f.coeffs }
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}; {}](", self.dim, self.degree)?;
        let mut first = true;
        for (c, idx) in self.terms() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let name: String = idx.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "{c:+}·e{name}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl Form {
    /// Builds a form from its coefficient vector.
    pub fn new(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if degree > dim {
            return Err(Error::DegreeMismatch(format!("degree {degree} exceeds dimension {dim}")));
        }
        let expected = binomial(dim, degree);
        if coeffs.len() != expected {
            return Err(Error::InvalidInput(format!(
                "a {degree}-form on R^{dim} has {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Form { dim, degree, coeffs })
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim) && degree <= dim);
        Form { dim, degree, coeffs: vec![0.0; binomial(dim, degree)] }
    }

    /// The constant function `c`.
    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut f = Form::zero(dim, 0);
        f.coeffs[0] = c;
        f
    }

    /// The elementary form `e^{i1} ∧ ... ∧ e^{ik}`, indices 1-based and in any order.
    ///
    /// ```
    /// use hitchin::exterior::Form;
    /// let a = Form::e(6, &[3, 1]);
    /// assert_eq!(a, -Form::e(6, &[1, 3]));
    /// ```
    pub fn e(dim: usize, indices: &[usize]) -> Self {
        let mut f = Form::one_form(&unit(dim, indices[0] - 1));
        for &i in &indices[1..] {
            f = f.wedge(&Form::one_form(&unit(dim, i - 1)));
        }
        f
    }

    /// The 1-form with the given coefficients.
    pub fn one_form(c: &[f64]) -> Self {
        Form { dim: c.len(), degree: 1, coeffs: c.to_vec() }
    }

    /// Top-degree form `e^{1...n}`.
    pub fn volume(dim: usize) -> Self {
        Form::scalar(dim, 1.0).with_degree_top()
    }

    fn with_degree_top(self) -> Self {
        Form { dim: self.dim, degree: self.dim, coeffs: self.coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficients paired with their 0-based index sets.
    pub fn terms(&self) -> impl Iterator<Item = (f64, Vec<usize>)> + '_ {
        let b = &basis(self.dim).subsets[self.degree];
        self.coeffs.iter().zip(b).map(|(&c, &m)| (c, members(m).collect()))
    }

    /// Coefficient of `e^{I}` for a 1-based increasing index list.
    pub fn coeff(&self, indices: &[usize]) -> f64 {
        let mask = indices.iter().fold(0u16, |m, &i| m | (1 << (i - 1)));
        self.coeffs[basis(self.dim).index[mask as usize]]
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Euclidean pairing of coefficient vectors (the flat-metric inner product).
    pub fn dot(&self, other: &Form) -> f64 {
        self.assert_same_shape(other);
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn assert_same_shape(&self, other: &Form) {
        assert!(
            self.dim == other.dim && self.degree == other.degree,
            "shape mismatch: ({}, {}) vs ({}, {})",
            self.dim,
            self.degree,
            other.dim,
            other.degree
        );
    }

    /// Exterior product. Panics on dimension mismatch; see [`super::wedge`].
    pub fn wedge(&self, other: &Form) -> Form {
        assert_eq!(self.dim, other.dim, "wedge of forms on different spaces");
        let n = self.dim;
        let b = basis(n);
        let k = self.degree + other.degree;
        assert!(k <= n, "wedge product of degree {k} exceeds dimension {n}");
        let mut out = vec![0.0; binomial(n, k)];
        for (&a, &i) in self.coeffs.iter().zip(&b.subsets[self.degree]) {
            if a == 0.0 {
                continue;
            }
            for (&c, &j) in other.coeffs.iter().zip(&b.subsets[other.degree]) {
                if c == 0.0 || i & j != 0 {
                    continue;
                }
                out[b.index[(i | j) as usize]] += wedge_sign(i, j) * a * c;
            }
        }
        Form { dim: n, degree: k, coeffs: out }
    }

    /// Contraction `v ⌟ self` with a vector given in the coordinate basis.
    pub fn interior(&self, v: &[f64]) -> Form {
        assert_eq!(v.len(), self.dim, "vector and form dimensions differ");
        assert!(self.degree > 0, "cannot contract a function");
        let n = self.dim;
        let b = basis(n);
        let mut out = vec![0.0; binomial(n, self.degree - 1)];
        for (&a, &i) in self.coeffs.iter().zip(&b.subsets[self.degree]) {
            if a == 0.0 {
                continue;
            }
            for p in members(i) {
                if v[p] != 0.0 {
                    let rest = i & !(1 << p);
                    out[b.index[rest as usize]] += contraction_sign(i, p) * v[p] * a;
                }
            }
        }
        Form { dim: n, degree: self.degree - 1, coeffs: out }
    }

    /// Natural action of an endomorphism `S` (row-major, `S[a][b]` maps `e_b` to
    /// `e_a`): `(S_* α)(X_1, ..., X_k) = -Σ α(..., S X_i, ...)`.
    pub fn endo_action(&self, s: &[Vec<f64>]) -> Form {
        let n = self.dim;
        assert_eq!(s.len(), n);
        let b = basis(n);
        let mut out = vec![0.0; self.coeffs.len()];
        for (&a, &i) in self.coeffs.iter().zip(&b.subsets[self.degree]) {
            if a == 0.0 {
                continue;
            }
            for p in members(i) {
                // e^p ∘ S = Σ_q S[p][q] e^q, substituted in slot p.
                let rest = i & !(1 << p);
                let sign_out = contraction_sign(i, p);
                for (q, &spq) in s[p].iter().enumerate() {
                    if spq == 0.0 || rest & (1 << q) != 0 {
                        continue;
                    }
                    let sign_in = contraction_sign(rest | (1 << q), q);
                    out[b.index[(rest | (1 << q)) as usize]] -= sign_out * sign_in * spq * a;
                }
            }
        }
        Form { dim: n, degree: self.degree, coeffs: out }
    }

    /// Pullback under the linear map `A`: `(A^* α)(X, ...) = α(AX, ...)`.
    pub fn pullback(&self, a: &[Vec<f64>]) -> Form {
        let n = self.dim;
        let rows: Vec<Form> = (0..n).map(|p| Form::one_form(&a[p])).collect();
        let mut out = Form::zero(n, self.degree);
        for (c, idx) in self.terms() {
            if c == 0.0 {
                continue;
            }
            let mut t = Form::scalar(n, c);
            for &p in &idx {
                t = t.wedge(&rows[p]);
            }
            out += &t;
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, c: f64) -> Form {
        Form { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Form) -> Form {
        self.assert_same_shape(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + c * b).collect();
        Form { dim: self.dim, degree: self.degree, coeffs }
    }

    /// Maximum coefficient difference.
    pub fn distance(&self, other: &Form) -> f64 {
        self.assert_same_shape(other);
        self.coeffs.iter().zip(&other.coeffs).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// 2-form as an antisymmetric matrix `W[a][b] = ω(e_a, e_b)`.
    pub fn as_skew_matrix(&self) -> Vec<Vec<f64>> {
        assert_eq!(self.degree, 2);
        let n = self.dim;
        let mut w = vec![vec![0.0; n]; n];
        for (c, idx) in self.terms() {
            w[idx[0]][idx[1]] = c;
            w[idx[1]][idx[0]] = -c;
        }
        w
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("dimension {dim} outside 1..={MAX_DIM}")))
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

impl Add<&Form> for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.axpy(1.0, rhs)
    }
}

impl Sub<&Form> for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.axpy(-1.0, rhs)
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl AddAssign<&Form> for Form {
    fn add_assign(&mut self, rhs: &Form) {
        self.assert_same_shape(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Form> for Form {
    fn sub_assign(&mut self, rhs: &Form) {
        self.assert_same_shape(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-1.0)
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-1.0)
    }
}

impl Mul<&Form> for f64 {
    type Output = Form;
    fn mul(self, rhs: &Form) -> Form {
        rhs.scale(self)
    }
}

impl Mul<Form> for f64 {
    type Output = Form;
    fn mul(self, rhs: Form) -> Form {
        rhs.scale(self)
    }
}
