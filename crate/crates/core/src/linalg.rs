//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::exterior::{Form, Metric};

pub(crate) fn to_dvec(f: &Form) -> DVector<f64> {
    DVector::from_column_slice(f.coeffs())
}

pub(crate) fn from_dvec(dim: usize, degree: usize, v: &DVector<f64>) -> Form {
    Form::new(dim, degree, v.iter().copied().collect()).expect("vector length matches basis")
}

/// Gram matrix of the induced inner product on k-forms.
pub(crate) fn gram_matrix(g: &Metric, k: usize) -> DMatrix<f64> {
    if g.is_euclidean() {
        let n = crate::exterior::binomial(g.dim(), k);
        DMatrix::identity(n, n)
    } else {
        g.gram(k).clone()
    }
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
pub(crate) fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let eps = 1e-10 * smax.max(1e-300);
    svd.pseudo_inverse(eps).expect("svd computed with both factors")
}

pub(crate) fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    sv.iter().filter(|&&s| s > rel_tol * smax.max(1e-300)).count()
}

/// Matrix whose columns are the images of the standard basis vectors.
pub(crate) fn matrix_of(input: usize, output: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(output, input);
    let mut e = vec![0.0; input];
    for j in 0..input {
        e[j] = 1.0;
        let col = f(&e);
        assert_eq!(col.len(), output);
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
        e[j] = 0.0;
    }
    m
}

/// Orthogonal projector (for the inner product `gram`) onto the span of `spanning`.
pub(crate) fn projector(spanning: &[Form], gram: &DMatrix<f64>) -> DMatrix<f64> {
    let n = gram.nrows();
    let b = DMatrix::from_fn(n, spanning.len(), |i, j| spanning[j].coeffs()[i]);
    let bt_g = b.transpose() * gram;
    &b * pinv(&(&bt_g * &b)) * bt_g
}

/// Least-squares solve of `m x = rhs` for `x` in the range of the projector `p`.
pub(crate) fn solve_within(m: &DMatrix<f64>, p: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let mp = m * p;
    p * (pinv(&mp) * rhs)
}

pub(crate) fn apply(m: &DMatrix<f64>, f: &Form) -> Form {
    from_dvec(f.dim(), f.degree(), &(m * to_dvec(f)))
}
