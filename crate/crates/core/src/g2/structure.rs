use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::decomposition::{Component, Components};
use crate::error::{Error, Result};
use crate::exterior::{unit, Form, Metric};
use crate::linalg::{apply, gram_matrix, matrix_of, projector};

/// A G₂-structure on `R^7` given by a stable 3-form `φ`, with `ψ = ⋆φ`.
#[derive(Clone, Debug)]
pub struct G2Structure {
    phi: Form,
    psi: Form,
    metric: Metric,
    vol: f64,
    orientation: f64,
    proj: Projectors,
}

#[derive(Clone, Debug)]
struct Projectors {
    two: [DMatrix<f64>; 2],
    three: [DMatrix<f64>; 3],
    four: [DMatrix<f64>; 3],
    five: [DMatrix<f64>; 2],
}

const LABELS_EVEN: [&str; 2] = ["7", "14"];
const RANKS_EVEN: [usize; 2] = [7, 14];
const LABELS_ODD: [&str; 3] = ["1", "7", "27"];
const RANKS_ODD: [usize; 3] = [1, 7, 27];

/// The 3-form `e123 + e145 + e167 + e246 − e257 − e347 − e356`.
pub fn model_phi() -> Form {
    let e = |i: &[usize]| Form::e(7, i);
    e(&[1, 2, 3]) + e(&[1, 4, 5]) + e(&[1, 6, 7]) + e(&[2, 4, 6])
        - e(&[2, 5, 7])
        - e(&[3, 4, 7])
        - e(&[3, 5, 6])
}

/// `B(X,Y) = (1/6)(X⌟φ)∧(Y⌟φ)∧φ` as a matrix of `e^{1..7}` coefficients.
fn bilinear(phi: &Form) -> DMatrix<f64> {
    let slots: Vec<Form> = (0..7).map(|a| phi.interior(&unit(7, a))).collect();
    let mut b = DMatrix::zeros(7, 7);
    for i in 0..7 {
        let si = slots[i].wedge(phi);
        for j in i..7 {
            let v = slots[j].wedge(&si).coeffs()[0] / 6.0;
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    b
}

/// Metric, volume density and orientation determined by `φ`.
fn metric_orientation(phi: &Form) -> Result<(Metric, f64, f64)> {
    if phi.dim() != 7 || phi.degree() != 3 {
        return Err(Error::DegreeMismatch("expected a 3-form on R^7".into()));
    }
    let b = bilinear(phi);
    let det = b.determinant();
    let scale = phi.coeff_norm().powi(21).max(1e-300);
    if det.abs() <= 1e-12 * scale || !det.is_finite() {
        return Err(Error::Stability("the bilinear form of φ is degenerate".into()));
    }
    let orientation = det.signum();
    let bo = b * orientation;
    let vol = (det.abs()).powf(1.0 / 9.0);
    let metric = Metric::from_matrix(bo / vol)
        .map_err(|_| Error::Stability("the bilinear form of φ is indefinite".into()))?;
    Ok((metric, vol, orientation))
}

/// `g_φ` and `vol = det(B)^{1/9}` with `g_φ(X,Y) vol_φ = (1/6)(X⌟φ)∧(Y⌟φ)∧φ`.
pub fn metric_from_phi(phi: &Form) -> Result<(Metric, f64)> {
    metric_orientation(phi).map(|(g, v, _)| (g, v))
}

impl G2Structure {
    pub fn model() -> Self {
        let s = Self::from_phi(&model_phi()).expect("model 3-form is stable");
        debug_assert!((s.metric.matrix() - DMatrix::identity(7, 7)).amax() < 1e-12);
        s
    }

    pub fn from_phi(phi: &Form) -> Result<Self> {
        let (metric, vol, orientation) = metric_orientation(phi)?;
        let psi = metric.hodge(phi, orientation);
        let proj = Projectors::build(phi, &psi, &metric, orientation);
        Ok(G2Structure { phi: phi.clone(), psi, metric, vol, orientation, proj })
    }

    pub fn phi(&self) -> &Form {
        &self.phi
    }
    pub fn psi(&self) -> &Form {
        &self.psi
    }
    pub fn metric(&self) -> &Metric {
        &self.metric
    }
    /// Volume density `sqrt(det g)` against `e^{1..7}`.
    pub fn vol(&self) -> f64 {
        self.vol
    }
    /// `+1` when `vol_g` is a positive multiple of `e^{1..7}`.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn volume_form(&self) -> Form {
        self.metric.volume_form(self.orientation)
    }

    pub fn hodge(&self, a: &Form) -> Form {
        self.metric.hodge(a, self.orientation)
    }

    /// Type decomposition in degrees 2 to 5.
    pub fn project(&self, a: &Form) -> Result<Components> {
        if a.dim() != 7 {
            return Err(Error::DimensionMismatch(format!("expected a form on R^7, got R^{}", a.dim())));
        }
        let (ps, labels, ranks): (&[DMatrix<f64>], &[&str], &[usize]) = match a.degree() {
            2 => (&self.proj.two, &LABELS_EVEN, &RANKS_EVEN),
            3 => (&self.proj.three, &LABELS_ODD, &RANKS_ODD),
            4 => (&self.proj.four, &LABELS_ODD, &RANKS_ODD),
            5 => (&self.proj.five, &LABELS_EVEN, &RANKS_EVEN),
            k => return Err(Error::DegreeMismatch(format!("no G₂ splitting implemented in degree {k}"))),
        };
        let parts = ps
            .iter()
            .zip(labels.iter().zip(ranks))
            .map(|(p, (l, &r))| Component { label: l.to_string(), rank: r, form: apply(p, a) })
            .collect();
        Ok(Components { degree: a.degree(), parts })
    }

    pub(crate) fn projector(&self, degree: usize, label: &str) -> &DMatrix<f64> {
        let (ps, labels): (&[DMatrix<f64>], &[&str]) = match degree {
            2 => (&self.proj.two, &LABELS_EVEN),
            3 => (&self.proj.three, &LABELS_ODD),
            4 => (&self.proj.four, &LABELS_ODD),
            5 => (&self.proj.five, &LABELS_EVEN),
            _ => panic!("degree {degree}"),
        };
        &ps[labels.iter().position(|l| *l == label).expect("known label")]
    }

    pub(crate) fn part(&self, a: &Form, label: &str) -> Form {
        apply(self.projector(a.degree(), label), a)
    }
}

fn star_matrix(g: &Metric, orientation: f64, k: usize) -> DMatrix<f64> {
    let n = crate::exterior::binomial(7, k);
    matrix_of(n, n, |c| g.hodge(&Form::new(7, k, c.to_vec()).unwrap(), orientation).coeffs().to_vec())
}

impl Projectors {
    fn build(phi: &Form, psi: &Form, g: &Metric, o: f64) -> Self {
        let id = |n| DMatrix::<f64>::identity(n, n);
        let t = matrix_of(21, 21, |c| g.hodge(&phi.wedge(&Form::new(7, 2, c.to_vec()).unwrap()), o).coeffs().to_vec());
        let p7 = (&t + id(21)) / 3.0;
        let p14 = (id(21) * 2.0 - &t) / 3.0;
        let g3 = gram_matrix(g, 3);
        let span7: Vec<Form> = (0..7).map(|a| psi.interior(&unit(7, a))).collect();
        let q1 = projector(std::slice::from_ref(phi), &g3);
        let q7 = projector(&span7, &g3);
        let q27 = id(35) - &q1 - &q7;
        let (s2, s3, s4, s5) = (star_matrix(g, o, 2), star_matrix(g, o, 3), star_matrix(g, o, 4), star_matrix(g, o, 5));
        // ⋆⋆ = 1 in odd dimension
        let four = [&s3 * &q1 * &s4, &s3 * &q7 * &s4, &s3 * &q27 * &s4];
        let five = [&s2 * &p7 * &s5, &s2 * &p14 * &s5];
        Projectors { two: [p7, p14], three: [q1, q7, q27], four, five }
    }
}

#[derive(Serialize)]
struct Repr<'a> {
    phi: &'a Form,
    psi: &'a Form,
    metric: &'a Metric,
    vol: f64,
    orientation: f64,
}

#[derive(Deserialize)]
struct ReprIn {
    phi: Form,
    psi: Option<Form>,
    metric: Option<Metric>,
    vol: Option<f64>,
    orientation: Option<f64>,
}

impl Serialize for G2Structure {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        Repr { phi: &self.phi, psi: &self.psi, metric: &self.metric, vol: self.vol, orientation: self.orientation }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for G2Structure {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ReprIn::deserialize(de)?;
        let s = G2Structure::from_phi(&r.phi).map_err(D::Error::custom)?;
        let tol = super::maps::MEMBERSHIP_TOL * (1.0 + s.phi.max_abs());
        if let Some(psi) = r.psi {
            if psi.dim() != 7 || psi.degree() != 4 || psi.distance(&s.psi) > tol.max(1e-8) {
                return Err(D::Error::custom("psi does not match ⋆φ"));
            }
        }
        if let Some(m) = r.metric {
            if m.dim() != 7 || (m.matrix() - s.metric.matrix()).amax() > 1e-8 {
                return Err(D::Error::custom("metric does not match g_φ"));
            }
        }
        if let Some(v) = r.vol {
            if (v - s.vol).abs() > 1e-8 * (1.0 + s.vol) {
                return Err(D::Error::custom("vol does not match"));
            }
        }
        if let Some(o) = r.orientation {
            if o != s.orientation {
                return Err(D::Error::custom("orientation does not match"));
            }
        }
        Ok(s)
    }
}
