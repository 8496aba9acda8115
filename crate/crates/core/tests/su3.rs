mod common;

use common::*;
use hitchin::exterior::{binomial, Endomorphism, Form, Metric};
use hitchin::su3::*;
use hitchin::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_form(rng: &mut ChaCha8Rng, degree: usize) -> Form {
    Form::new(6, degree, (0..binomial(6, degree)).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn rand_vec(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn near_identity(rng: &mut ChaCha8Rng, eps: f64) -> Vec<Vec<f64>> {
    (0..6).map(|i| (0..6).map(|j| if i == j { 1.0 } else { 0.0 } + eps * rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// A non-flat-metric structure: the model pulled back by a random matrix.
fn pulled_back(seed: u64) -> (Su3Structure, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = near_identity(&mut rng, 0.3);
    let m = model();
    (recover_structure(&m.omega().pullback(&a), &m.rho().pullback(&a)).unwrap(), a)
}

#[test]
fn model_validates() {
    let s = model();
    assert_eq!(s.omega().wedge(s.rho()).max_abs(), 0.0);
    let vol = s.omega().wedge(s.omega()).wedge(s.omega()).scale(1.0 / 6.0);
    assert_eq!(s.rho().wedge(s.rhohat()).scale(0.25), vol);
    assert_eq!(s.metric().matrix(), &DMatrix::identity(6, 6));
    let j2 = s.j().compose(s.j());
    assert_eq!(j2.matrix(), &(-DMatrix::<f64>::identity(6, 6)));
    assert_eq!(s.vol(), 1.0);
    assert_eq!(s.metric().norm_sq(s.omega()), 3.0);
    assert_eq!(s.metric().norm_sq(s.sigma()), 3.0);
}

#[test]
fn model_star_identities() {
    let s = model();
    assert!(s.hodge(s.omega()).distance(s.sigma()) < 1e-12);
    assert!(s.hodge(s.rho()).distance(s.rhohat()) < 1e-12);
}

#[test]
fn recovery_reproduces_model() {
    let m = model();
    let r = recover_structure(m.omega(), m.rho()).unwrap();
    assert!(r.rhohat().distance(m.rhohat()) < 1e-12);
    assert!((r.j().matrix() - m.j().matrix()).amax() < 1e-12);
    assert!((r.metric().matrix() - m.metric().matrix()).amax() < 1e-12);
}

#[test]
fn hitchin_volume_relation() {
    let m = model();
    assert!((rho_volume(m.rho()).unwrap() - 2.0).abs() < 1e-12);
    for seed in 0..10 {
        let (s, _) = pulled_back(seed);
        let lhs = s.rho().wedge(s.rhohat());
        let rhs = Form::volume(6).scale(2.0 * rho_volume(s.rho()).unwrap());
        assert!(lhs.distance(&rhs) < 1e-10);
        // and the Riemannian volume is half of it
        assert!((s.vol() - 0.5 * rho_volume(s.rho()).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn recovery_errors() {
    let m = model();
    let e123 = Form::e(6, &[1, 2, 3]);
    assert!(matches!(recover_structure(m.omega(), &e123), Err(Error::Stability(_))));
    assert!(matches!(recover_structure(&-m.omega(), m.rho()), Err(Error::Positivity(_))));
    assert!(matches!(recover_structure(&m.omega().scale(2.0), m.rho()), Err(Error::Compatibility { .. })));
    let bad = m.omega() + &Form::e(6, &[1, 3]);
    assert!(matches!(recover_structure(&bad, m.rho()), Err(Error::Compatibility { .. })));
    assert!(matches!(recover_structure(m.rho(), m.rho()), Err(Error::DegreeMismatch(_))));
}

#[test]
fn recovery_is_natural() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = model();
    for _ in 0..20 {
        let a = near_identity(&mut rng, 0.3);
        let s = recover_structure(&m.omega().pullback(&a), &m.rho().pullback(&a)).unwrap();
        let am = DMatrix::from_fn(6, 6, |i, j| a[i][j]);
        let expect = am.transpose() * am.clone();
        assert!((s.metric().matrix() - &expect).amax() < 1e-8);
        // J transforms by conjugation
        let ainv = am.clone().try_inverse().unwrap();
        let jexp = &ainv * m.j().matrix() * &am;
        assert!((s.j().matrix() - jexp).amax() < 1e-8);
        assert!(s.rhohat().distance(&m.rhohat().pullback(&a)) < 1e-8);
    }
}

#[test]
fn structure_json_roundtrip() {
    let (s, _) = pulled_back(3);
    let text = serde_json::to_string(&s).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["omega", "rho", "rhohat", "sigma", "metric"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let back: Su3Structure = serde_json::from_str(&text).unwrap();
    assert!(back.rhohat().distance(s.rhohat()) < 1e-12);
    let mut tampered = v.clone();
    tampered["rhohat"] = serde_json::to_value(model().rho()).unwrap();
    assert!(serde_json::from_value::<Su3Structure>(tampered).is_err());
}

#[test]
fn dual_of_4form_examples() {
    let m = model();
    assert!(dual_of_4form(m.sigma(), None).unwrap().distance(m.omega()) < 1e-12);
    let big = m.sigma().scale(16.0);
    assert!(dual_of_4form(&big, None).unwrap().distance(&m.omega().scale(4.0)) < 1e-12);
    assert!(matches!(dual_of_4form(&Form::zero(6, 4), None), Err(Error::Stability(_))));
    // branch choice follows the hint
    let neg = -m.omega();
    assert!(dual_of_4form(m.sigma(), Some(&neg)).unwrap().distance(&neg) < 1e-12);
    // degenerate: the square of a rank-4 form
    let e1234 = Form::e(6, &[1, 2, 3, 4]);
    assert!(dual_of_4form(&e1234, None).is_err());
}

#[test]
fn projector_ranks() {
    let m = model();
    let (p, u) = m.iso_sym_ranks();
    assert_eq!((p, u), (8, 12));
    for (deg, expect) in [(2, vec![1, 6, 8]), (3, vec![2, 6, 12]), (4, vec![1, 6, 8])] {
        let basis: Vec<Form> = (0..binomial(6, deg))
            .map(|i| {
                let mut c = vec![0.0; binomial(6, deg)];
                c[i] = 1.0;
                Form::new(6, deg, c).unwrap()
            })
            .collect();
        let comps: Vec<_> = basis.iter().map(|b| m.project(b).unwrap()).collect();
        for (slot, &r) in expect.iter().enumerate() {
            let trace: f64 = comps.iter().enumerate().map(|(i, c)| c.parts[slot].form.coeffs()[i]).sum();
            assert!((trace - r as f64).abs() < 1e-10, "degree {deg} slot {slot}: {trace}");
            assert_eq!(comps[0].parts[slot].rank, r);
        }
    }
}

#[test]
fn projector_examples() {
    let m = model();
    let c = m.project(m.omega()).unwrap();
    assert!(c.get("1").distance(m.omega()) < 1e-12);
    assert!(c.get("6").max_abs() < 1e-12 && c.get("8").max_abs() < 1e-12);
    let c = m.project(m.rho()).unwrap();
    assert!(c.get("1+1").distance(m.rho()) < 1e-12);
    let x = [0.3, -1.0, 0.5, 0.2, 0.0, 0.7];
    let six = Form::one_form(&x).wedge(m.rhohat());
    assert!(m.project(&six).unwrap().get("6").distance(&six) < 1e-12);
    assert!(m.hodge(&m.rho().interior(&x)).distance(&six) < 1e-12);
    assert!(matches!(m.project(&Form::e(6, &[1])), Err(Error::DegreeMismatch(_))));
}

#[test]
fn six_dimensional_summand_norms() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (x, y) = (rand_vec(&mut rng), rand_vec(&mut rng));
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let lhs = m.metric().inner(&Form::one_form(&x).wedge(m.rhohat()), &Form::one_form(&y).wedge(m.rhohat()));
        assert!((lhs - 2.0 * xy).abs() < 1e-12);
        // J X ∧ ρ̂ = X ∧ ρ
        let jx = m.j_covector(&x);
        assert!(Form::one_form(&jx).wedge(m.rhohat()).distance(&Form::one_form(&x).wedge(m.rho())) < 1e-12);
    }
}

#[test]
fn projectors_split_orthogonally_for_curved_metrics() {
    for seed in 0..5 {
        let (s, _) = pulled_back(100 + seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for deg in 2..=4 {
            for _ in 0..20 {
                let a = rand_form(&mut rng, deg);
                let c = s.project(&a).unwrap();
                assert!(c.sum().distance(&a) < 1e-10);
                for i in 0..3 {
                    let again = s.project(&c.parts[i].form).unwrap();
                    assert!(again.parts[i].form.distance(&c.parts[i].form) < 1e-10);
                    for j in i + 1..3 {
                        assert!(s.metric().inner(&c.parts[i].form, &c.parts[j].form).abs() < 1e-10);
                    }
                }
            }
        }
        // The summands are characterised by the structure, not by the chart.
        let x: Vec<f64> = vec![0.1, 0.4, -0.3, 0.9, 0.2, -0.5];
        let six = s.rho().interior(&x);
        assert!(s.project(&six).unwrap().get("6").distance(&six) < 1e-10);
    }
}

#[test]
fn iso_sym_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (s, _) = pulled_back(4);
    for st in [model(), s] {
        for _ in 0..50 {
            let b = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
            let g = st.metric().matrix();
            // g-symmetric: S = g⁻¹ B_sym
            let sym = st.metric().inverse() * (&b + b.transpose()) * 0.5;
            let tr = sym.trace() / 6.0;
            let sm = Endomorphism::from_matrix(&sym - DMatrix::identity(6, 6) * tr);
            let (i_part, u_part) = st.iso_sym(&sm).unwrap();
            assert!(st.project(&i_part).unwrap().get("8").distance(&i_part) < 1e-10);
            assert!(st.project(&u_part).unwrap().get("12").distance(&u_part) < 1e-10);
            let jm = st.j().matrix();
            let plus = (sm.matrix() - jm * sm.matrix() * jm) * 0.5;
            let minus = (sm.matrix() + jm * sm.matrix() * jm) * 0.5;
            let back_p = st.iso_sym_plus_inverse(&i_part).unwrap();
            let back_m = st.iso_sym_minus_inverse(&u_part).unwrap();
            assert!((back_p.matrix() - plus).amax() < 1e-10);
            assert!((back_m.matrix() - minus).amax() < 1e-10);
            let _ = g;
        }
    }
}

#[test]
fn iso_sym_examples_and_errors() {
    let m = model();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -2.0, -2.0, 1.0, 1.0]));
    let (_, u) = m.iso_sym(&Endomorphism::from_matrix(d)).unwrap();
    assert!(u.max_abs() < 1e-12);
    let mut ns = DMatrix::zeros(6, 6);
    ns[(0, 1)] = 1.0;
    assert!(matches!(m.iso_sym(&Endomorphism::from_matrix(ns)), Err(Error::InvalidInput(_))));
    assert!(m.iso_sym(&Endomorphism::identity(6)).is_err());
}

#[test]
fn kmap_and_imap_examples() {
    let m = model();
    assert!(m.kmap(m.sigma()).unwrap().distance(&m.omega().scale(0.5)) < 1e-12);
    assert!(m.imap(m.rho()).unwrap().distance(m.rhohat()) < 1e-12);
}

#[test]
fn kmap_inverts_wedge_with_omega() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let chi = rand_form(&mut rng, 4);
        let lhs = m.kmap(&chi).unwrap().wedge(m.omega());
        assert!(lhs.distance(&chi) < 1e-12);
    }
}

/// Central finite difference of `f` at `base` in direction `dir`.
fn fd(f: impl Fn(&Form) -> Form, base: &Form, dir: &Form, h: f64) -> Form {
    (&f(&base.axpy(h, dir)) - &f(&base.axpy(-h, dir))).scale(0.5 / h)
}

#[test]
fn kmap_is_the_derivative_of_the_newton_dual() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for s in [model(), pulled_back(8).0] {
        for _ in 0..10 {
            let chi = rand_form(&mut rng, 4);
            let num = fd(|x| dual_of_4form(x, Some(s.omega())).unwrap(), s.sigma(), &chi, 1e-5);
            assert!(num.distance(&s.kmap(&chi).unwrap()) < 1e-7, "{:?}", num.distance(&s.kmap(&chi).unwrap()));
        }
    }
}

#[test]
fn imap_is_the_derivative_of_the_hitchin_dual() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for s in [model(), pulled_back(9).0] {
        let rhohat_of = |r: &Form| {
            // ρ̂ depends on ρ only; pair it with the matching ω for recovery.
            let st = recover_structure(s.omega(), r);
            match st {
                Ok(st) => st.rhohat().clone(),
                Err(_) => hitchin_dual_only(r),
            }
        };
        for _ in 0..10 {
            let gamma = rand_form(&mut rng, 3);
            let num = fd(rhohat_of, s.rho(), &gamma, 1e-5);
            assert!(num.distance(&s.imap(&gamma).unwrap()) < 1e-7);
        }
    }
}

/// `ρ̂ = -ρ(J·,·,·)` with `J` from `K_ρ`, computed without any ω.
fn hitchin_dual_only(rho: &Form) -> Form {
    let vol = Form::volume(6);
    let mut k = DMatrix::zeros(6, 6);
    for a in 0..6 {
        let mut e = vec![0.0; 6];
        e[a] = 1.0;
        let beta = rho.interior(&e).wedge(rho);
        for b in 0..6 {
            let mut f = vec![0.0; 6];
            f[b] = 1.0;
            k[(b, a)] = vol.interior(&f).dot(&beta);
        }
    }
    let lambda = (&k * &k).trace() / 6.0;
    let j = -k / (-lambda).sqrt();
    // ρ̂ = J_*ρ / 3 for a form of type (3,0)+(0,3)
    Endomorphism::from_matrix(j).act(rho).scale(1.0 / 3.0)
}

#[test]
fn torsion_examples() {
    let m = model();
    let t = torsion_from_jet(&m, &m.rho().scale(3.0), &Form::zero(6, 4), &m.sigma().scale(-4.0)).unwrap();
    assert!((t.tau0 - 1.0).abs() < 1e-12);
    for f in [&t.tau1, &t.tauhat1, &t.tau2, &t.tauhat2, &t.tau3] {
        assert!(f.max_abs() < 1e-12);
    }
    assert!(t.tauhat0.abs() < 1e-12);
    let z = torsion_from_jet(&m, &Form::zero(6, 3), &Form::zero(6, 4), &Form::zero(6, 4)).unwrap();
    assert_eq!(z, Su3Torsion::zero(&m));
    // τ₂ only
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let beta = m.project(&rand_form(&mut rng, 2)).unwrap().get("8").clone();
    let t = torsion_from_jet(&m, &Form::zero(6, 3), &beta.wedge(m.omega()), &Form::zero(6, 4)).unwrap();
    assert!(t.tau2.distance(&beta) < 1e-12);
    assert!(t.tauhat2.max_abs() + t.tau3.max_abs() + t.tau1.max_abs() + t.tau0.abs() < 1e-12);
}

#[test]
fn torsion_round_trip_and_inconsistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for s in [model(), pulled_back(12).0] {
        for _ in 0..20 {
            let mut t = Su3Torsion::zero(&s);
            t.tau0 = rng.gen_range(-1.0..1.0);
            t.tauhat0 = rng.gen_range(-1.0..1.0);
            t.tau1 = Form::one_form(&rand_vec(&mut rng));
            t.tauhat1 = Form::one_form(&rand_vec(&mut rng));
            t.tau2 = s.project(&rand_form(&mut rng, 2)).unwrap().get("8").clone();
            t.tauhat2 = s.project(&rand_form(&mut rng, 2)).unwrap().get("8").clone();
            t.tau3 = s.project(&rand_form(&mut rng, 3)).unwrap().get("12").clone();
            let (a, b, c) = t.jet(&s);
            let back = torsion_from_jet(&s, &a, &b, &c).unwrap();
            assert!((back.tau0 - t.tau0).abs() < 1e-10 && (back.tauhat0 - t.tauhat0).abs() < 1e-10);
            for (x, y) in [
                (&back.tau1, &t.tau1),
                (&back.tauhat1, &t.tauhat1),
                (&back.tau2, &t.tau2),
                (&back.tauhat2, &t.tauhat2),
                (&back.tau3, &t.tau3),
            ] {
                assert!(x.distance(y) < 1e-10);
            }
            // break the shared τ̂₁
            let wrong = &c + &Form::one_form(&rand_vec(&mut rng)).wedge(s.rhohat());
            assert!(matches!(torsion_from_jet(&s, &a, &b, &wrong), Err(Error::JetInconsistency(_))));
        }
    }
}

#[test]
fn scalar_curvature_examples() {
    let m = model();
    let mut t = Su3Torsion::zero(&m);
    assert_eq!(scalar_curvature(&t, 0.0), 0.0);
    t.tau0 = 1.0;
    assert_eq!(scalar_curvature(&t, 0.0), 30.0);
    // |τ̂₂|² = 4 with τ̂₂ ∈ Λ²₈
    let beta = Form::e(6, &[1, 2]) - Form::e(6, &[3, 4]);
    t.tauhat2 = beta.scale(2.0_f64.sqrt());
    assert!((m.metric().norm_sq(&t.tauhat2) - 4.0).abs() < 1e-12);
    assert!((scalar_curvature(&t, 0.0) - 28.0).abs() < 1e-12);
    assert!((scalar_curvature(&t, 1.5) - 31.0).abs() < 1e-12);
}

#[test]
fn q_vs_eh_examples() {
    let m = model();
    let mut t = Su3Torsion::zero(&m);
    t.tau0 = 1.0;
    assert_eq!(q_vs_eh_density(&t).unwrap(), (2.0, 2.0));
    let beta = (Form::e(6, &[1, 2]) - Form::e(6, &[3, 4])).scale(5.0_f64.sqrt());
    t.tauhat2 = beta;
    let (q, eh) = q_vs_eh_density(&t).unwrap();
    assert!((q - 2.0).abs() < 1e-12 && (eh - 1.0).abs() < 1e-12);
    t.tau0 = 0.0;
    let (q, eh) = q_vs_eh_density(&t).unwrap();
    assert!((q + 4.0).abs() < 1e-12 && (eh + 5.0).abs() < 1e-12);
    t.tau3 = m.project(&Form::e(6, &[1, 2, 3])).unwrap().get("12").clone();
    assert!(matches!(q_vs_eh_density(&t), Err(Error::Domain(_))));
}

#[test]
fn contraction_symbol_examples() {
    let m = model();
    assert_eq!(contraction_symbol_check(&m, &[0.0; 6], &[1.0, 2.0, 0.0, 0.0, 0.0, 1.0]), 0.0);
    assert_eq!(contraction_symbol_check(&m, &[1.0, 2.0, 0.0, 0.0, 0.0, 1.0], &[0.0; 6]), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_symbol_identity(xi in vec_strategy(6), x in vec_strategy(6)) {
        prop_assert!(contraction_symbol_check(&model(), &xi, &x) < 1e-10);
    }

    #[test]
    fn contraction_identity_on_curved_structure(xi in vec_strategy(6), x in vec_strategy(6), seed in 0u64..50) {
        let (s, _) = pulled_back(seed);
        prop_assert!(contraction_symbol_check(&s, &xi, &x) < 1e-10);
    }

    #[test]
    fn q_dominates_eh(tau0 in -2.0f64..2.0, b in form_strategy(6, 2), x in vec_strategy(6)) {
        let m = model();
        let mut t = Su3Torsion::zero(&m);
        t.tau0 = tau0;
        t.tauhat1 = Form::one_form(&x);
        t.tauhat2 = m.project(&b).unwrap().get("8").clone();
        let (q, eh) = q_vs_eh_density(&t).unwrap();
        prop_assert!(q >= eh);
        prop_assert!(((q - eh) - m.metric().norm_sq(&t.tauhat2) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn projector_completeness(a in form_strategy(6, 3)) {
        let c = model().project(&a).unwrap();
        prop_assert!(c.sum().distance(&a) < 1e-12);
    }
}

#[test]
fn metric_from_pullback_is_positive() {
    let (s, a) = pulled_back(77);
    let am = DMatrix::from_fn(6, 6, |i, j| a[i][j]);
    assert!(Metric::from_matrix(am.transpose() * am).is_ok());
    assert!(s.vol() > 0.0);
}

