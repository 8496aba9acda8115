mod common;

use common::*;
use hitchin::exterior::{symbol_d, Form, PlaneWave};
use hitchin::parabolicity::*;
use hitchin::su3::{model, recover_structure, Su3Structure};
use hitchin::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn curved(seed: u64) -> Su3Structure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<Vec<f64>> =
        (0..6).map(|i| (0..6).map(|j| if i == j { 1.0 } else { 0.0 } + 0.3 * rng.gen_range(-1.0..1.0)).collect()).collect();
    let m = model();
    recover_structure(&m.omega().pullback(&a), &m.rho().pullback(&a)).unwrap()
}

fn rand_vec(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn rand_input(s: &Su3Structure, rng: &mut ChaCha8Rng) -> SymbolInput {
    let raw = Form::new(6, 4, (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    SymbolInput::new(rand_vec(rng), rng.gen_range(-1.0..1.0), rand_vec(rng), s.part(&raw, "8"))
}

fn unit(a: usize) -> Vec<f64> {
    (0..6).map(|i| if i == a { 1.0 } else { 0.0 }).collect()
}

#[test]
fn deturck_examples() {
    let s = model();
    let xi = [0.3, 0.4, 0.0, 1.0, 0.0, -0.2];
    let (v1, v2) = deturck_symbols(&s, &xi, 1.0, &[0.0; 6]);
    assert!(v1.re.max_abs() < 1e-15 && v1.im.distance(&Form::one_form(&xi)) < 1e-15);
    assert_eq!(v2.max_abs(), 0.0);
    let x: Vec<f64> = xi.iter().map(|v| 2.5 * v).collect();
    let (v1, v2) = deturck_symbols(&s, &xi, 0.0, &x);
    assert!(v1.max_abs() < 1e-15 && v2.max_abs() < 1e-14);
}

#[test]
fn closedness_identity_holds_with_plus_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for s in [model(), curved(2)] {
        for _ in 0..50 {
            let input = rand_input(&s, &mut rng);
            assert!(closedness_residual(&s, &input).unwrap() < 1e-12);
        }
    }
}

#[test]
fn closed_waves_satisfy_deturck_relation() {
    // χ = ξ∧η is closed at symbol level; its (f, X, χ₀) then satisfy
    // iξ f ∧ σ + J curl(X) ∧ σ + iξ ∧ χ₀ = 0.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = model();
    for _ in 0..100 {
        let xi = rand_vec(&mut rng);
        let eta = Form::new(6, 3, (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let chi = Form::one_form(&xi).wedge(&eta);
        let input = decompose(&s, &xi, &chi);
        assert!(input.chi(&s).distance(&chi) < 1e-12);
        let (v1, v2) = deturck_symbols(&s, &xi, input.f, &input.x);
        let sum = v1
            .map(|a| a.wedge(s.sigma()))
            .add(&v2.map(|a| a.wedge(s.sigma())))
            .add(&symbol_d(&PlaneWave::real(&xi, input.chi0.clone())));
        assert!(sum.max_abs() < 1e-12);
    }
}

fn decompose(s: &Su3Structure, xi: &[f64], chi: &Form) -> SymbolInput {
    let g = s.metric();
    let f = g.inner(chi, s.sigma()) / g.norm_sq(s.sigma());
    // X from <X∧ρ̂, e^a∧ρ̂> = 2 X_a on the model
    let six = s.part(chi, "6");
    let x: Vec<f64> = (0..6).map(|a| g.inner(&six, &Form::one_form(&unit(a)).wedge(s.rhohat())) / 2.0).collect();
    SymbolInput::new(xi.to_vec(), f, x, s.part(chi, "8"))
}

#[test]
fn displayed_symbol_matches_full_linearisation_on_closed_waves() {
    // −d⋆d𝒦χ + d(V_*(χ)⌟σ) composed from scratch. With 𝒦(fσ) = ½fω the df
    // terms cancel for V = (3/2)V₁ + 2V₂.
    let s = model();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let xi = rand_vec(&mut rng);
        let eta = Form::new(6, 3, (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let chi = Form::one_form(&xi).wedge(&eta);
        let input = decompose(&s, &xi, &chi);
        let kchi = PlaneWave::real(&xi, s.kmap(&chi).unwrap());
        let first = symbol_d(&symbol_d(&kchi).map(|a| s.hodge(a))).scale(-1.0);
        let (v1, v2) = deturck_symbols(&s, &xi, input.f, &input.x);
        let v = v1.scale(1.5).add(&v2.scale(2.0));
        let second = symbol_d(&v.map(|a| s.sigma().interior(&s.metric().raise(a.coeffs()))));
        let full = first.add(&second);
        let shown = symbol_dp(&s, &input, Variant::None).unwrap();
        assert!(full.im.max_abs() < 1e-12);
        assert!(full.re.distance(&shown.symbol) < 1e-10, "{}", full.re.distance(&shown.symbol));
    }
}

#[test]
fn symbol_examples() {
    let s = model();
    let xi = unit(0);
    let zero8 = Form::zero(6, 4);
    let along = SymbolInput::new(xi.clone(), 0.0, xi.clone(), zero8.clone());
    let v = symbol_dp(&s, &along, Variant::None).unwrap();
    assert!((v.quadratic_closed - 2.0).abs() < 1e-12 && (v.quadratic_compositional - 2.0).abs() < 1e-12);
    let v = symbol_dp(&s, &along, Variant::Tau0Term).unwrap();
    assert!((v.quadratic_closed + 2.0).abs() < 1e-12 && (v.quadratic_compositional + 2.0).abs() < 1e-12);
    let conformal = SymbolInput::new(xi.clone(), 1.0, vec![0.0; 6], zero8.clone());
    for variant in [Variant::None, Variant::Tau0Term] {
        let v = symbol_dp(&s, &conformal, variant).unwrap();
        assert!((v.quadratic_closed + 3.0).abs() < 1e-12);
    }
    let zero_freq = SymbolInput::new(vec![0.0; 6], 1.0, vec![0.0; 6], zero8.clone());
    assert!(matches!(symbol_dp(&s, &zero_freq, Variant::None), Err(Error::Domain(_))));
    let bad = SymbolInput::new(xi, 0.0, vec![0.0; 6], s.sigma().clone());
    assert!(matches!(symbol_dp(&s, &bad, Variant::None), Err(Error::InvalidInput(_))));
}

#[test]
fn symbol_routes_agree_on_many_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in [model(), curved(6)] {
        for k in 0..1000 {
            let input = rand_input(&s, &mut rng);
            let variant = if k % 2 == 0 { Variant::None } else { Variant::Tau0Term };
            let v = symbol_dp(&s, &input, variant).unwrap();
            assert!((v.quadratic_closed - v.quadratic_compositional).abs() < 1e-10);
        }
    }
}

#[test]
fn scan_unmodified() {
    let s = model();
    let r = coercivity_scan(&s, &unit(2), Variant::None).unwrap();
    assert_eq!(r.verdict, Verdict::NotCoercive);
    assert!((r.max_eigenvalue - 2.0).abs() < 1e-10);
    assert!((r.quadratic_form_value - r.max_eigenvalue).abs() < 1e-8);
    // spectrum: −3 (f), 2 twice, −2 four times (X), −1 eight times (χ₀)
    let expect = [-3.0, -2.0, -2.0, -2.0, -2.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0, 2.0, 2.0];
    for (a, b) in r.eigenvalues.iter().zip(expect) {
        assert!((a - b).abs() < 1e-10, "{:?}", r.eigenvalues);
    }
    // witness lies in span{ξ, Jξ}
    let w = &r.witness_direction;
    let jxi = s.j_covector(&unit(2));
    let along: f64 = w.x[2].powi(2) + jxi.iter().zip(&w.x).map(|(a, b)| a * b).sum::<f64>().powi(2);
    let total: f64 = w.x.iter().map(|v| v * v).sum();
    assert!((along - total).abs() < 1e-10 && w.f.abs() < 1e-10 && w.chi0.max_abs() < 1e-10);
}

#[test]
fn scan_modified_witness_is_j_xi() {
    let s = model();
    let xi = [0.6, 0.0, 0.0, 0.8, 0.0, 0.0];
    let r = coercivity_scan(&s, &xi, Variant::Tau0Term).unwrap();
    assert_eq!(r.verdict, Verdict::NotCoercive);
    assert!((r.max_eigenvalue - 2.0).abs() < 1e-10);
    let positive = r.eigenvalues.iter().filter(|&&e| e > 1e-10).count();
    assert_eq!(positive, 1);
    let jxi = s.j_covector(&xi);
    let c: f64 = jxi.iter().zip(&r.witness_direction.x).map(|(a, b)| a * b).sum();
    let n: f64 = r.witness_direction.x.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((c.abs() - n).abs() < 1e-10);
}

#[test]
fn scan_is_rotation_invariant() {
    let s = model();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let reference = coercivity_scan(&s, &unit(0), Variant::None).unwrap().eigenvalues;
    for _ in 0..20 {
        let v = rand_vec(&mut rng);
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let xi: Vec<f64> = v.iter().map(|a| a / n).collect();
        let ev = coercivity_scan(&s, &xi, Variant::None).unwrap().eigenvalues;
        for (a, b) in ev.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn negative_definite_without_x() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = model();
    for _ in 0..100 {
        let mut input = rand_input(&s, &mut rng);
        input.x = vec![0.0; 6];
        let v = symbol_dp(&s, &input, Variant::None).unwrap();
        if input.chi(&s).max_abs() > 1e-6 {
            assert!(v.quadratic_closed < 0.0);
        }
        input.f = 0.0;
        let v = symbol_dp(&s, &input, Variant::None).unwrap();
        let xi2: f64 = input.xi.iter().map(|a| a * a).sum();
        assert!((v.quadratic_closed + xi2 * s.metric().norm_sq(&input.chi0)).abs() < 1e-10);
    }
}

#[test]
fn schur_constants() {
    for s in [model(), curved(9)] {
        let b = schur_constant_b(&s, 60, 1).unwrap();
        let b2 = schur_constant_b(&s, 60, 2).unwrap();
        assert!((b - b2).abs() < 1e-8 * b.abs());
        let a = schur_constant_a(&s, 60, 3).unwrap();
        assert!((b + 2.0).abs() < 1e-10);
        assert!((a - 2.0).abs() < 1e-10);
    }
    // the plain metric contraction S(α) is orthogonal to ⋆(α∧χ)
    let s = model();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let raw = Form::new(6, 4, (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let chi = s.part(&raw, "8");
        let alpha = rand_vec(&mut rng);
        let lhs = s.hodge(&Form::one_form(&alpha).wedge(&chi));
        let sa = s.iota_inverse(&chi).unwrap().on_covector(s.metric(), &alpha);
        assert!(lhs.dot(&Form::one_form(&sa)).abs() < 1e-12);
        // bilinearity: doubling χ doubles both sides
        let lhs2 = s.hodge(&Form::one_form(&alpha).wedge(&chi.scale(2.0)));
        assert!(lhs2.distance(&lhs.scale(2.0)) < 1e-12);
    }
}

#[test]
fn report_serialises() {
    let s = model();
    let r = coercivity_scan(&s, &unit(1), Variant::Tau0Term).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["verdict"], "not-coercive");
    assert!(v["witness_direction"]["X"].is_array());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_agrees_for_any_input(xi in vec_strategy(6), x in vec_strategy(6), f in -2.0f64..2.0, c in form_strategy(6, 4)) {
        let s = model();
        prop_assume!(xi.iter().map(|a| a * a).sum::<f64>() > 1e-6);
        let input = SymbolInput::new(xi, f, x, s.part(&c, "8"));
        for variant in [Variant::None, Variant::Tau0Term] {
            let v = symbol_dp(&s, &input, variant).unwrap();
            prop_assert!((v.quadratic_closed - v.quadratic_compositional).abs() < 1e-10);
        }
    }
}
