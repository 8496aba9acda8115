use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::decomposition::{Component, Components};
use crate::error::{Error, Result};
use crate::exterior::{unit, Endomorphism, Form, Metric};
use crate::linalg::{apply, gram_matrix, matrix_of, projector};

/// Tolerance for the compatibility conditions when recovering a structure.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// An SU(3)-structure on `R^6` with all derived tensors.
///
/// The reference orientation is `e^{123456}`. `J` acts on vectors; on
/// 1-forms it acts through the metric, `α ↦ g(J α♯, ·)`.
#[derive(Clone, Debug)]
pub struct Su3Structure {
    omega: Form,
    rho: Form,
    rhohat: Form,
    sigma: Form,
    j: Endomorphism,
    metric: Metric,
    vol: f64,
    proj: Projectors,
}

#[derive(Clone, Debug)]
struct Projectors {
    two: [DMatrix<f64>; 3],
    three: [DMatrix<f64>; 3],
    four: [DMatrix<f64>; 3],
}

const LABELS_2: [&str; 3] = ["1", "6", "8"];
const LABELS_3: [&str; 3] = ["1+1", "6", "12"];
const RANKS_2: [usize; 3] = [1, 6, 8];
const RANKS_3: [usize; 3] = [2, 6, 12];

impl Su3Structure {
    /// The flat model `ω0 = e12+e34+e56`, `ρ0 = e135−e146−e236−e245`, inducing the
    /// Euclidean metric.
    pub fn model() -> Self {
        let e = |i: &[usize]| Form::e(6, i);
        let omega = e(&[1, 2]) + e(&[3, 4]) + e(&[5, 6]);
        let rho = e(&[1, 3, 5]) - e(&[1, 4, 6]) - e(&[2, 3, 6]) - e(&[2, 4, 5]);
        let mut rhohat = e(&[1, 3, 6]) + e(&[1, 4, 5]) + e(&[2, 3, 5]) - e(&[2, 4, 6]);
        let vol6 = omega.wedge(&omega).wedge(&omega).scale(1.0 / 6.0);
        if rho.wedge(&rhohat).scale(0.25).distance(&vol6) > 1e-12 {
            rhohat = -rhohat;
        }
        let mut jm = DMatrix::zeros(6, 6);
        for p in 0..3 {
            jm[(2 * p + 1, 2 * p)] = 1.0;
            jm[(2 * p, 2 * p + 1)] = -1.0;
        }
        let sigma = omega.wedge(&omega).scale(0.5);
        Self::assemble(omega, rho, rhohat, sigma, Endomorphism::from_matrix(jm), Metric::euclidean(6))
    }

    fn assemble(omega: Form, rho: Form, rhohat: Form, sigma: Form, j: Endomorphism, metric: Metric) -> Self {
        let vol = metric.sqrt_det();
        let proj = Projectors::build(&omega, &rho, &rhohat, &metric);
        Su3Structure { omega, rho, rhohat, sigma, j, metric, vol, proj }
    }

    pub fn omega(&self) -> &Form {
        &self.omega
    }
    pub fn rho(&self) -> &Form {
        &self.rho
    }
    pub fn rhohat(&self) -> &Form {
        &self.rhohat
    }
    pub fn sigma(&self) -> &Form {
        &self.sigma
    }
    pub fn j(&self) -> &Endomorphism {
        &self.j
    }
    pub fn metric(&self) -> &Metric {
        &self.metric
    }
    /// Volume density `sqrt(det g)` against `e^{123456}`.
    pub fn vol(&self) -> f64 {
        self.vol
    }

    pub fn volume_form(&self) -> Form {
        self.metric.volume_form(1.0)
    }

    pub fn hodge(&self, a: &Form) -> Form {
        self.metric.hodge(a, 1.0)
    }

    /// `J` on 1-forms, `α ↦ g(J α♯, ·)`.
    pub fn j_covector(&self, a: &[f64]) -> Vec<f64> {
        self.j.on_covector(&self.metric, a)
    }

    /// Type decomposition of a 2-, 3- or 4-form.
    pub fn project(&self, a: &Form) -> Result<Components> {
        if a.dim() != 6 {
            return Err(Error::DimensionMismatch(format!("expected a form on R^6, got R^{}", a.dim())));
        }
        let (ps, labels, ranks) = match a.degree() {
            2 => (&self.proj.two, LABELS_2, RANKS_2),
            3 => (&self.proj.three, LABELS_3, RANKS_3),
            4 => (&self.proj.four, LABELS_2, RANKS_2),
            k => return Err(Error::DegreeMismatch(format!("no SU(3) splitting implemented in degree {k}"))),
        };
        let parts = ps
            .iter()
            .zip(labels.iter().zip(ranks))
            .map(|(p, (l, r))| Component { label: l.to_string(), rank: r, form: apply(p, a) })
            .collect();
        Ok(Components { degree: a.degree(), parts })
    }

    /// Projector matrix onto the summand `label` in the given degree.
    pub(crate) fn projector(&self, degree: usize, label: &str) -> &DMatrix<f64> {
        let (ps, labels) = match degree {
            2 => (&self.proj.two, LABELS_2),
            3 => (&self.proj.three, LABELS_3),
            4 => (&self.proj.four, LABELS_2),
            _ => panic!("degree {degree}"),
        };
        &ps[labels.iter().position(|l| *l == label).expect("known label")]
    }

    /// Component of `a` in the summand `label`.
    pub fn part(&self, a: &Form, label: &str) -> Form {
        apply(self.projector(a.degree(), label), a)
    }
}

impl Projectors {
    fn build(omega: &Form, rho: &Form, rhohat: &Form, g: &Metric) -> Self {
        let g2 = gram_matrix(g, 2);
        let g3 = gram_matrix(g, 3);
        let id = |n| DMatrix::<f64>::identity(n, n);
        let span6: Vec<Form> = (0..6).map(|a| rho.interior(&unit(6, a))).collect();
        let p1 = projector(std::slice::from_ref(omega), &g2);
        let p6 = projector(&span6, &g2);
        let p8 = id(15) - &p1 - &p6;
        let span6_3: Vec<Form> = (0..6).map(|a| Form::one_form(&unit(6, a)).wedge(omega)).collect();
        let q11 = projector(&[rho.clone(), rhohat.clone()], &g3);
        let q6 = projector(&span6_3, &g3);
        let q12 = id(20) - &q11 - &q6;
        let star2 = matrix_of(15, 15, |c| g.hodge(&Form::new(6, 2, c.to_vec()).unwrap(), 1.0).coeffs().to_vec());
        let star4 = matrix_of(15, 15, |c| g.hodge(&Form::new(6, 4, c.to_vec()).unwrap(), 1.0).coeffs().to_vec());
        let conj = |p: &DMatrix<f64>| &star2 * p * &star4;
        let four = [conj(&p1), conj(&p6), conj(&p8)];
        Projectors { two: [p1, p6, p8], three: [q11, q6, q12], four }
    }
}

/// Recovers the SU(3)-structure of a compatible pair `(ω, ρ)`.
///
/// `J` is Hitchin's normalised `K_ρ`, `ρ̂(X,Y,Z) = -ρ(JX,Y,Z)` and
/// `g = ω(·, J·)`.
pub fn recover_structure(omega: &Form, rho: &Form) -> Result<Su3Structure> {
    if omega.dim() != 6 || rho.dim() != 6 {
        return Err(Error::DimensionMismatch("SU(3)-structures live on R^6".into()));
    }
    if omega.degree() != 2 || rho.degree() != 3 {
        return Err(Error::DegreeMismatch("expected a 2-form and a 3-form".into()));
    }
    let k = k_rho(rho);
    let lambda = (&k * &k).trace() / 6.0;
    let scale = rho.coeff_norm().powi(4);
    if !(lambda < -1e-12 * scale) || scale == 0.0 {
        return Err(Error::Stability(format!("tr(K²)/6 = {lambda:.3e} is not negative")));
    }
    let jm = -k / (-lambda).sqrt();
    let defect = (&jm * &jm + DMatrix::identity(6, 6)).amax();
    if defect > 1e-8 {
        return Err(Error::Stability(format!("normalised K does not square to -1 (defect {defect:.3e})")));
    }
    let j = Endomorphism::from_matrix(jm);
    let rhohat = rhohat_of(rho, &j);

    let wr = omega.wedge(rho).max_abs() / (1.0 + omega.max_abs() * rho.max_abs());
    if wr > COMPATIBILITY_TOL {
        return Err(Error::Compatibility { residual: wr, tolerance: COMPATIBILITY_TOL });
    }
    let w = omega.as_skew_matrix();
    let jr = j.rows();
    let gm = DMatrix::from_fn(6, 6, |a, b| (0..6).map(|c| w[a][c] * jr[c][b]).sum());
    let asym = (&gm - gm.transpose()).amax() / (1.0 + gm.amax());
    if asym > COMPATIBILITY_TOL {
        return Err(Error::Compatibility { residual: asym, tolerance: COMPATIBILITY_TOL });
    }
    let metric = Metric::from_matrix((&gm + gm.transpose()) * 0.5)
        .map_err(|_| Error::Positivity("ω(·, J·) is not positive definite".into()))?;
    let vol6 = omega.wedge(omega).wedge(omega).scale(1.0 / 6.0);
    let norm = rho.wedge(&rhohat).scale(0.25).distance(&vol6) / (1.0 + vol6.max_abs());
    if norm > COMPATIBILITY_TOL {
        return Err(Error::Compatibility { residual: norm, tolerance: COMPATIBILITY_TOL });
    }
    let sigma = omega.wedge(omega).scale(0.5);
    Ok(Su3Structure::assemble(omega.clone(), rho.clone(), rhohat, sigma, j, metric))
}

/// Hitchin's volume density of a stable 3-form, `sqrt(-tr(K_ρ²)/6)` against `e^{123456}`.
pub fn rho_volume(rho: &Form) -> Result<f64> {
    if rho.dim() != 6 || rho.degree() != 3 {
        return Err(Error::DegreeMismatch("expected a 3-form on R^6".into()));
    }
    let k = k_rho(rho);
    let lambda = (&k * &k).trace() / 6.0;
    if !(lambda < 0.0) {
        return Err(Error::Stability(format!("tr(K²)/6 = {lambda:.3e} is not negative")));
    }
    Ok((-lambda).sqrt())
}

/// `K_ρ(v) = A((v⌟ρ) ∧ ρ)` with `A(β)` the vector `u` such that `u ⌟ e^{123456} = β`.
pub(crate) fn k_rho(rho: &Form) -> DMatrix<f64> {
    let vol = Form::volume(6);
    let slots: Vec<Form> = (0..6).map(|b| vol.interior(&unit(6, b))).collect();
    let mut k = DMatrix::zeros(6, 6);
    for a in 0..6 {
        let beta = rho.interior(&unit(6, a)).wedge(rho);
        for b in 0..6 {
            k[(b, a)] = slots[b].dot(&beta);
        }
    }
    k
}

/// `ρ̂(X,Y,Z) = -ρ(JX,Y,Z)`.
fn rhohat_of(rho: &Form, j: &Endomorphism) -> Form {
    let mut out = Form::zero(6, 3);
    let jcols: Vec<Vec<f64>> = (0..6).map(|a| j.apply(&unit(6, a))).collect();
    let contracted: Vec<Form> = jcols.iter().map(|c| rho.interior(c)).collect();
    let triples: Vec<Vec<usize>> = out.terms().map(|(_, i)| i).collect();
    for (slot, idx) in out.coeffs_mut().iter_mut().zip(triples) {
        *slot = -contracted[idx[0]].coeff(&[idx[1] + 1, idx[2] + 1]);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct Su3Repr {
    omega: Form,
    rho: Form,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rhohat: Option<Form>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<Form>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<Metric>,
}

impl Serialize for Su3Structure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Su3Repr {
            omega: self.omega.clone(),
            rho: self.rho.clone(),
            rhohat: Some(self.rhohat.clone()),
            sigma: Some(self.sigma.clone()),
            metric: Some(self.metric.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Su3Structure {
    /// Reads `{omega, rho}`; any derived fields present must agree with the
    /// recovered structure.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = Su3Repr::deserialize(d)?;
        let s = recover_structure(&r.omega, &r.rho).map_err(D::Error::custom)?;
        let agree = |given: &Option<Form>, derived: &Form, name: &str| match given {
            Some(f) if f.dim() != 6 || f.degree() != derived.degree() || f.distance(derived) > COMPATIBILITY_TOL => {
                Err(D::Error::custom(format!("field `{name}` disagrees with the structure recovered from omega and rho")))
            }
            _ => Ok(()),
        };
        agree(&r.rhohat, &s.rhohat, "rhohat")?;
        agree(&r.sigma, &s.sigma, "sigma")?;
        if let Some(m) = &r.metric {
            if m.dim() != 6 || (m.matrix() - s.metric.matrix()).amax() > COMPATIBILITY_TOL {
                return Err(D::Error::custom("field `metric` disagrees with the recovered structure"));
            }
        }
        Ok(s)
    }
}
