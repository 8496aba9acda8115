use anyhow::Result;
use serde::Deserialize;
use serde_json::{json, Value};

use hitchin::cone::{self, ConeKind, FlowKind, RuleSet, Q};
use hitchin::decomposition::Components;
use hitchin::exterior::{Endomorphism, Form, Metric};
use hitchin::g2::{self, G2Structure};
use hitchin::parabolicity::{self, Variant};
use hitchin::selftest;
use hitchin::spectra::{self, BettiData, SpectralDatum};
use hitchin::su3::{self, Su3Structure};

use crate::input::UsageError;
use crate::output::{Cell, Table};

/// What a command produced: a JSON document, its tabular view, and whether
/// the computed verdict passed.
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub ok: bool,
}

impl Report {
    fn ok(json: Value, table: Table) -> Self {
        Report { json, table, ok: true }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// `e12`-style name of a basis element.
fn basis_name(indices: &[usize]) -> String {
    let digits: String = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("e{digits}")
}

/// Optional structure fields shared by several inputs. Absent fields select
/// the flat model.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFields {
    #[serde(default)]
    omega: Option<Form>,
    #[serde(default)]
    rho: Option<Form>,
    #[serde(default)]
    phi: Option<Form>,
}

impl StructureFields {
    fn su3(&self) -> Result<Su3Structure> {
        match (&self.omega, &self.rho) {
            (Some(w), Some(r)) => Ok(su3::recover_structure(w, r)?),
            (None, None) => Ok(Su3Structure::model()),
            _ => Err(usage("omega and rho must be given together")),
        }
    }

    fn g2(&self) -> Result<G2Structure> {
        match &self.phi {
            Some(p) => Ok(G2Structure::from_phi(p)?),
            None => Ok(G2Structure::model()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeInput {
    form: Form,
    #[serde(flatten)]
    structure: StructureFields,
}

pub fn decompose(input: DecomposeInput, tol: f64) -> Result<Report> {
    let form = &input.form;
    let (kind, parts, metric): (&str, Components, Metric) = match form.dim() {
        6 => {
            let s = input.structure.su3()?;
            ("su3", s.project(form)?, s.metric().clone())
        }
        7 => {
            let s = input.structure.g2()?;
            ("g2", s.project(form)?, s.metric().clone())
        }
        n => return Err(usage(format!("forms must live on R^6 or R^7, got R^{n}"))),
    };
    let residual = parts.sum().distance(form);
    let mut table = Table::new(&["component", "rank", "norm_sq"]);
    let mut comps = vec![];
    for c in &parts.parts {
        let n2 = metric.norm_sq(&c.form);
        table.push(vec![c.label.as_str().into(), c.rank.into(), n2.into()]);
        let terms: serde_json::Map<String, Value> = c
            .form
            .terms()
            .filter(|(v, _)| v.abs() > 1e-14)
            .map(|(v, idx)| (basis_name(&idx), json!(v)))
            .collect();
        comps.push(json!({"label": c.label, "rank": c.rank, "norm_sq": n2, "terms": terms}));
    }
    let ok = residual <= tol * (1.0 + form.max_abs());
    let json = json!({
        "structure": kind,
        "degree": parts.degree,
        "components": comps,
        "reconstruction_residual": residual,
    });
    Ok(Report { json, table, ok })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureCheckInput {
    #[serde(flatten)]
    structure: StructureFields,
}

pub fn structure_check(input: StructureCheckInput, tol: f64) -> Result<Report> {
    let f = &input.structure;
    let (kind, built) = match (&f.phi, &f.omega, &f.rho) {
        (Some(_), None, None) => ("g2", f.g2().map(Built::G2)),
        (None, Some(_), Some(_)) => ("su3", f.su3().map(Built::Su3)),
        _ => return Err(usage("give either `phi` or both `omega` and `rho`")),
    };
    let mut table = Table::new(&["check", "residual"]);
    let built = match built {
        Ok(b) => b,
        Err(e) => match e.downcast_ref::<hitchin::Error>() {
            Some(hitchin::Error::InvalidInput(_) | hitchin::Error::DimensionMismatch(_) | hitchin::Error::DegreeMismatch(_))
            | None => return Err(e),
            Some(lib) => {
                table.push(vec!["construction".into(), Cell::Text(lib.to_string())]);
                let json = json!({"structure": kind, "valid": false, "error": lib.to_string()});
                return Ok(Report { json, table, ok: false });
            }
        },
    };
    let (residuals, scale, metric, vol) = match &built {
        Built::Su3(s) => {
            let (w, r, rh) = (s.omega(), s.rho(), s.rhohat());
            let w3 = w.wedge(w).wedge(w);
            let res = vec![
                ("omega_wedge_rho", w.wedge(r).max_abs()),
                ("normalisation", (&w3.scale(1.0 / 6.0) - &r.wedge(rh).scale(0.25)).max_abs()),
                ("j_squared_plus_identity", s.j().compose(s.j()).add(&Endomorphism::identity(6)).max_abs()),
                ("hodge_rho_minus_rhohat", s.hodge(r).distance(rh)),
            ];
            (res, 1.0 + w3.max_abs(), s.metric().clone(), s.vol())
        }
        Built::G2(g) => {
            let vol_form = g.volume_form().scale(7.0);
            let res = vec![
                ("phi_wedge_psi_minus_7vol", g.phi().wedge(g.psi()).distance(&vol_form)),
                ("hodge_phi_minus_psi", g.hodge(g.phi()).distance(g.psi())),
            ];
            (res, 1.0 + vol_form.max_abs(), g.metric().clone(), g.vol())
        }
    };
    let mut res_json = serde_json::Map::new();
    let mut worst = 0.0f64;
    for (name, r) in &residuals {
        worst = worst.max(*r);
        res_json.insert(name.to_string(), json!(r));
        table.push(vec![(*name).into(), (*r).into()]);
    }
    let ok = worst <= tol * scale;
    let rows: Vec<Vec<f64>> = metric.matrix().row_iter().map(|r| r.iter().copied().collect()).collect();
    let json = json!({
        "structure": kind,
        "valid": ok,
        "residuals": res_json,
        "volume": vol,
        "metric": rows,
    });
    Ok(Report { json, table, ok })
}

enum Built {
    Su3(Su3Structure),
    G2(G2Structure),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsionInput {
    #[serde(flatten)]
    structure: StructureFields,
    #[serde(default)]
    domega: Option<Form>,
    #[serde(default)]
    drho: Option<Form>,
    #[serde(default)]
    drhohat: Option<Form>,
    #[serde(default)]
    dphi: Option<Form>,
    #[serde(default)]
    dpsi: Option<Form>,
    /// Divergence term entering the scalar curvature.
    #[serde(default)]
    dstar_tau1: f64,
}

pub fn torsion(input: TorsionInput) -> Result<Report> {
    let mut table = Table::new(&["component", "norm_sq"]);
    let mut push_form = |obj: &mut serde_json::Map<String, Value>, m: &Metric, name: &str, f: &Form| {
        let n2 = m.norm_sq(f);
        table.push(vec![name.into(), n2.into()]);
        obj.insert(name.to_string(), json!({"coeffs": f.coeffs(), "norm_sq": n2}));
    };
    let mut obj = serde_json::Map::new();
    let (kind, s_curv, densities) = match (&input.domega, &input.drho, &input.drhohat, &input.dphi, &input.dpsi) {
        (Some(dw), Some(dr), Some(drh), None, None) => {
            let s = input.structure.su3()?;
            let t = su3::torsion_from_jet(&s, dw, dr, drh)?;
            obj.insert("tau0".into(), json!(t.tau0));
            obj.insert("tauhat0".into(), json!(t.tauhat0));
            for (name, f) in [("tau1", &t.tau1), ("tauhat1", &t.tauhat1), ("tau2", &t.tau2), ("tauhat2", &t.tauhat2), ("tau3", &t.tau3)] {
                push_form(&mut obj, &t.metric, name, f);
            }
            let dens = su3::q_vs_eh_density(&t).ok();
            ("su3", su3::scalar_curvature(&t, input.dstar_tau1), dens.map(|(q, eh)| json!({"q": q, "eh": eh})))
        }
        (None, None, None, Some(dphi), Some(dpsi)) => {
            let s = input.structure.g2()?;
            let t = g2::torsion_from_jet_g2(&s, dphi, dpsi)?;
            obj.insert("tau0".into(), json!(t.tau0));
            for (name, f) in [("tau1", &t.tau1), ("tau2", &t.tau2), ("tau3", &t.tau3)] {
                push_form(&mut obj, &t.metric, name, f);
            }
            let (tt, eh) = g2::t_vs_eh_density(&t);
            ("g2", g2::scalar_curvature_g2(&t, input.dstar_tau1), Some(json!({"t": tt, "eh": eh})))
        }
        _ => return Err(usage("give either `domega`, `drho`, `drhohat` or `dphi`, `dpsi`")),
    };
    let tau0 = obj["tau0"].as_f64().unwrap_or(0.0);
    table.rows.insert(0, vec!["tau0".into(), (tau0 * tau0).into()]);
    table.push(vec!["scalar_curvature".into(), s_curv.into()]);
    obj.insert("structure".into(), json!(kind));
    obj.insert("scalar_curvature".into(), json!(s_curv));
    if let Some(d) = densities {
        obj.insert("densities".into(), d);
    }
    Ok(Report::ok(Value::Object(obj), table))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolCmdInput {
    #[serde(default)]
    xi: Option<Vec<f64>>,
    #[serde(flatten)]
    structure: StructureFields,
}

pub fn symbol(input: SymbolCmdInput, variant: Variant) -> Result<Report> {
    let s = input.structure.su3()?;
    let xi = input.xi.unwrap_or_else(|| vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let report = parabolicity::coercivity_scan(&s, &xi, variant)?;
    let mut table = Table::new(&["index", "eigenvalue"]);
    for (i, e) in report.eigenvalues.iter().enumerate() {
        table.push(vec![i.into(), (*e).into()]);
    }
    let mut json = serde_json::to_value(&report)?;
    json["variant"] = json!(match variant {
        Variant::None => "deturck",
        Variant::Tau0Term => "tau0-modified",
    });
    Ok(Report::ok(json, table))
}

pub fn schur(input: StructureFields, samples: usize, seed: u64) -> Result<Report> {
    let s = input.su3()?;
    let b = parabolicity::schur_constant_b(&s, samples, seed)?;
    let a = parabolicity::schur_constant_a(&s, samples, seed)?;
    let mut table = Table::new(&["constant", "value"]);
    table.push(vec!["B".into(), b.into()]);
    table.push(vec!["A".into(), a.into()]);
    Ok(Report::ok(json!({"b": b, "a": a, "samples": samples, "seed": seed}), table))
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum IndexFormula {
    HitchinNk,
    HitchinG2,
    EinsteinNk,
    EinsteinG2,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexInput {
    formula: IndexFormula,
    #[serde(default)]
    spectrum: Vec<SpectralDatum>,
    #[serde(default)]
    betti: BettiData,
    /// Spectra of the two operators entering the G₂ Einstein count.
    #[serde(default)]
    e: Vec<SpectralDatum>,
    #[serde(default)]
    f: Vec<SpectralDatum>,
}

pub fn index(input: IndexInput) -> Result<Report> {
    use IndexFormula::*;
    let mut table = Table::new(&["source", "eigenvalue", "multiplicity", "contribution"]);
    let mut rows = vec![];
    let mut add = |source: &str, d: &SpectralDatum, c: u64| {
        table.push(vec![source.into(), d.eigenvalue.into(), d.multiplicity.into(), c.into()]);
        rows.push(json!({"source": source, "eigenvalue": d.eigenvalue, "multiplicity": d.multiplicity, "contribution": c}));
    };
    let (name, total) = match input.formula {
        HitchinNk | HitchinG2 | EinsteinNk => {
            if !input.e.is_empty() || !input.f.is_empty() {
                return Err(usage("`e` and `f` belong to the einstein-g2 formula"));
            }
            let one = |d: &SpectralDatum| match input.formula {
                HitchinNk => spectra::hitchin_index_nk(&[*d]),
                HitchinG2 => spectra::hitchin_index_g2(&[*d]),
                _ => spectra::einstein_index_nk(BettiData::default(), &[*d]),
            };
            for d in &input.spectrum {
                add("spectrum", d, one(d));
            }
            match input.formula {
                HitchinNk => ("hitchin-nk", spectra::hitchin_index_nk(&input.spectrum)),
                HitchinG2 => ("hitchin-g2", spectra::hitchin_index_g2(&input.spectrum)),
                _ => ("einstein-nk", spectra::einstein_index_nk(input.betti, &input.spectrum)),
            }
        }
        EinsteinG2 => {
            if !input.spectrum.is_empty() {
                return Err(usage("einstein-g2 takes the spectra `e` and `f`"));
            }
            for d in &input.e {
                add("e", d, spectra::einstein_index_g2(0, &[*d], &[]));
            }
            for d in &input.f {
                add("f", d, spectra::einstein_index_g2(0, &[], &[*d]));
            }
            ("einstein-g2", spectra::einstein_index_g2(input.betti.b3, &input.e, &input.f))
        }
    };
    let betti_part = match input.formula {
        EinsteinNk => spectra::einstein_index_nk(input.betti, &[]),
        EinsteinG2 => spectra::einstein_index_g2(input.betti.b3, &[], &[]),
        _ => 0,
    };
    if betti_part > 0 {
        table.push(vec!["betti".into(), "".into(), "".into(), betti_part.into()]);
    }
    let betti = json!({"b2": input.betti.b2, "b3": input.betti.b3});
    Ok(Report::ok(json!({"formula": name, "betti": betti, "index": total, "table": rows}), table))
}

pub fn s6_report(cutoff: f64) -> Result<Report> {
    let r = spectra::s6_stability_report(cutoff)?;
    let mut table = Table::new(&["weight", "dimension", "eigenvalue", "hom_dim", "contribution"]);
    let mut rows = vec![];
    for e in &r.entries {
        table.push(vec![e.weight.to_string().into(), e.dimension.into(), e.eigenvalue.into(), e.hom_dim.into(), e.contribution.into()]);
        rows.push(json!({
            "weight": e.weight.coords,
            "dimension": e.dimension,
            "eigenvalue": e.eigenvalue,
            "hom_dim": e.hom_dim,
            "contribution": e.contribution,
        }));
    }
    let json = json!({"cutoff": r.cutoff, "complete": r.complete, "index": r.index, "table": rows});
    Ok(Report::ok(json, table))
}

/// Optional rule coefficients for the cone check, as rationals such as `"3"`
/// or `"-4/3"`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeInput {
    #[serde(default)]
    nk: Option<[String; 2]>,
    #[serde(default)]
    nearly_parallel_g2: Option<String>,
}

fn rational(s: &str) -> Result<Q> {
    s.trim().parse::<Q>().map_err(|_| usage(format!("`{s}` is not a rational number")))
}

pub fn cone_check(input: ConeInput, only: Option<ConeKind>) -> Result<Report> {
    let cones = match only {
        Some(c) => vec![c],
        None => vec![ConeKind::G2Cone, ConeKind::Spin7Cone],
    };
    let mut table = Table::new(&["cone", "rules", "form", "residual"]);
    let mut checks = vec![];
    let mut ok = true;
    for c in cones {
        let rules = match (c, &input.nk, &input.nearly_parallel_g2) {
            (ConeKind::G2Cone, Some([a, b]), _) => RuleSet::nearly_kahler(rational(a)?, rational(b)?),
            (ConeKind::Spin7Cone, _, Some(k)) => RuleSet::nearly_parallel_g2(rational(k)?),
            _ => c.default_rules(),
        };
        let report = cone::cone_closure_check_with(c, &rules)?;
        ok &= report.is_closed();
        let mut residuals = vec![];
        for r in &report.residuals {
            let text = r.residual.to_string();
            table.push(vec![c.name().into(), report.rules.as_str().into(), r.form.as_str().into(), text.as_str().into()]);
            residuals.push(json!({"form": r.form, "residual": text, "zero": r.residual.is_zero()}));
        }
        checks.push(json!({"cone": c.name(), "rules": report.rules, "closed": report.is_closed(), "residuals": residuals}));
    }
    let crit = cone::coefficient_equations(&cone::nk_critical_point_expression()?);
    let crit_json: Vec<Value> = crit
        .iter()
        .map(|eq| json!({"basis": eq.basis.to_string(), "tau0_poly": eq.tau0_poly.iter().map(|q| q.to_string()).collect::<Vec<_>>()}))
        .collect();
    let np = cone::npg2_critical_scalar();
    let json = json!({
        "checks": checks,
        "closed": ok,
        "nk_critical_point": crit_json,
        "nearly_parallel_roots": np.roots.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
    });
    Ok(Report { json, table, ok })
}

pub fn flow(kind: FlowKind, x0: &[f64], t: f64, dt: f64, reverse: bool) -> Result<Report> {
    let x0: Vec<f64> = match x0.len() {
        1 => vec![x0[0]; kind.dim()],
        _ => x0.to_vec(),
    };
    let traj = if reverse {
        cone::scaling_flow_reversed(kind, &x0, t, dt)?
    } else {
        cone::scaling_flow(kind, &x0, t, dt)?
    };
    let mut header = vec!["t".to_string()];
    header.extend((1..=kind.dim()).map(|i| format!("x{i}")));
    let mut table = Table { header, rows: vec![] };
    for (time, state) in traj.times.iter().zip(&traj.states) {
        let mut row: Vec<Cell> = vec![(*time).into()];
        row.extend(state.iter().map(|v| Cell::Num(*v)));
        table.push(row);
    }
    let json = json!({
        "flow": kind.name(),
        "reversed": traj.reversed,
        "dt": dt,
        "final_time": traj.final_time(),
        "final_state": traj.final_state(),
        "times": traj.times,
        "states": traj.states,
    });
    Ok(Report::ok(json, table))
}

pub fn selftest(only: Option<usize>, seed: u64) -> Result<Report> {
    let outcomes = match only {
        Some(id) if (1..=12).contains(&id) => vec![selftest::run_check(id, seed)],
        Some(id) => return Err(usage(format!("--only takes 1 to 12, got {id}"))),
        None => selftest::run_all(seed),
    };
    let mut table = Table::new(&["id", "name", "passed", "seconds", "detail"]);
    for o in &outcomes {
        table.push(vec![o.id.into(), o.name.into(), o.passed.into(), o.seconds.into(), o.detail.as_str().into()]);
    }
    let ok = outcomes.iter().all(|o| o.passed);
    let json = json!({"seed": seed, "passed": ok, "checks": serde_json::to_value(&outcomes)?});
    Ok(Report { json, table, ok })
}
