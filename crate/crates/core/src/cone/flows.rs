use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DT: f64 = 1e-3;

/// Scaling reductions of the gradient flows. Starting from a nearly Kähler
/// or nearly parallel structure, each flow preserves the ansatz and reduces
/// to an ODE for the scale factors:
///
/// - `nk-laplacian`: `g = λ²g₀`, so `σ = λ⁴σ₀` and `τ₀ = λ⁻¹`; then
///   `Δσ − 12σ = (12τ₀² − 12)σ` gives `λ̇ = 3(1 − λ²)/λ`.
/// - `nk-coupled`: `ρ = uρ₀`, `σ = vσ₀`, so `ρ̂ = uρ̂₀` and `ω = √v ω₀`;
///   then `u̇ = 3(√v − u)` and `v̇ = 4(u − v)`.
/// - `g2-hitchin`: `ψ = wψ₀`, so `φ = w^{3/4}φ₀`; then `ẇ = 4(w^{3/4} − w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowKind {
    NkLaplacian,
    NkCoupled,
    G2Hitchin,
}

impl FlowKind {
    pub const ALL: [FlowKind; 3] = [FlowKind::NkLaplacian, FlowKind::NkCoupled, FlowKind::G2Hitchin];

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown flow `{s}`")))
    }

    pub fn name(self) -> &'static str {
        match self {
            FlowKind::NkLaplacian => "nk-laplacian",
            FlowKind::NkCoupled => "nk-coupled",
            FlowKind::G2Hitchin => "g2-hitchin",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            FlowKind::NkCoupled => 2,
            _ => 1,
        }
    }

    pub fn rhs(self, x: &[f64]) -> Vec<f64> {
        match self {
            FlowKind::NkLaplacian => vec![3.0 * (1.0 - x[0] * x[0]) / x[0]],
            FlowKind::NkCoupled => vec![3.0 * (x[1].sqrt() - x[0]), 4.0 * (x[0] - x[1])],
            FlowKind::G2Hitchin => vec![4.0 * (x[0].powf(0.75) - x[0])],
        }
    }

    /// Eigenvalues of the linearisation at the fixed point `x = 1`.
    pub fn linearisation_rates(self) -> Vec<f64> {
        match self {
            FlowKind::NkLaplacian => vec![-6.0],
            // [[−3, 3/2], [4, −4]]
            FlowKind::NkCoupled => vec![-6.0, -1.0],
            FlowKind::G2Hitchin => vec![-1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: FlowKind,
    pub reversed: bool,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectories hold the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories hold the initial time")
    }
}

fn admissible(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite() && *v > 0.0)
}

fn integrate(kind: FlowKind, x0: &[f64], t_end: f64, dt: f64, reversed: bool) -> Result<Trajectory> {
    if x0.len() != kind.dim() {
        return Err(Error::DimensionMismatch(format!("{} expects {} initial values, got {}", kind.name(), kind.dim(), x0.len())));
    }
    if !admissible(x0) {
        return Err(Error::InvalidInput("initial values must be positive".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput("need dt > 0 and t_end ≥ 0".into()));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let s = if reversed { -1.0 } else { 1.0 };
    let f = |x: &[f64]| -> Result<Vec<f64>> {
        if !admissible(x) {
            return Err(Error::BlowUp { time: 0.0 });
        }
        Ok(kind.rhs(x).into_iter().map(|v| s * v).collect())
    };
    let axpy = |x: &[f64], k: &[f64], a: f64| -> Vec<f64> { x.iter().zip(k).map(|(x, k)| x + a * k).collect() };

    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let mut x = x0.to_vec();
    for i in 0..steps {
        let t = i as f64 * h;
        let blow = |_| Error::BlowUp { time: t };
        let k1 = f(&x).map_err(blow)?;
        let k2 = f(&axpy(&x, &k1, h / 2.0)).map_err(blow)?;
        let k3 = f(&axpy(&x, &k2, h / 2.0)).map_err(blow)?;
        let k4 = f(&axpy(&x, &k3, h)).map_err(blow)?;
        for j in 0..x.len() {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t1 = (i + 1) as f64 * h;
        if !admissible(&x) {
            return Err(Error::BlowUp { time: t1 });
        }
        times.push(t1);
        states.push(x.clone());
    }
    Ok(Trajectory { kind, reversed, times, states })
}

/// Integrate a scaling flow with the classical fixed-step Runge–Kutta method.
pub fn scaling_flow(kind: FlowKind, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate(kind, x0, t_end, dt, false)
}

/// The same flow run backwards in time.
pub fn scaling_flow_reversed(kind: FlowKind, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate(kind, x0, t_end, dt, true)
}
