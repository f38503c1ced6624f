mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use varseq_core::corpus::{Corpus, Shape};
use varseq_core::varseq::{euler_lagrange, helmholtz_check, momenta, solve_current, solve_dh_exact, tonti_lagrangian};
use varseq_core::{AnsatzSpec, Covector, Current, Error, Expr, Form, JetContext, JetVar, Lagrangian, MultiIndex, SourceForm};

use common::{close, gateaux_action, no_params, paired_source, variations, Section};

fn y() -> Expr {
    Expr::field(0, &[])
}
fn yd() -> Expr {
    Expr::field(0, &[0])
}
fn ydd() -> Expr {
    Expr::field(0, &[0, 0])
}

/// The Gateaux derivative of the action in a compactly supported direction
/// equals the integral of the Euler–Lagrange expressions against it.
fn assert_matches_gateaux(ctx: &JetContext, l: &Lagrangian, params: &BTreeMap<String, f64>, seed: u64) {
    let e = euler_lagrange(ctx, l).unwrap();
    for k in 0..3 {
        let s = Section::random(seed * 31 + k, ctx.base_dim, ctx.fiber_dim);
        let h = variations(seed * 17 + k, ctx.base_dim, ctx.fiber_dim);
        let lhs = gateaux_action(l.density(), &s, &h, params);
        let rhs = paired_source(e.components(), &s, &h, params);
        assert!(close(lhs, rhs, 1e-6), "{}: {lhs} vs {rhs}", l.density());
    }
}

#[test]
fn free_particle_euler_lagrange() {
    let ctx = JetContext::new(1, 1);
    let l = Lagrangian::new(Expr::rat(1, 2) * yd() * yd());
    assert_eq!(euler_lagrange(&ctx, &l).unwrap().components(), &[-ydd()]);
    assert_matches_gateaux(&ctx, &l, &no_params(), 1);
}

#[test]
fn monopole_north_euler_lagrange() {
    let ctx = JetContext::new(1, 2);
    let th = Expr::field(0, &[]);
    let (sin, cos) = (Expr::sin(&th).unwrap(), Expr::cos(&th).unwrap());
    let (th_t, ph_t) = (Expr::field(0, &[0]), Expr::field(1, &[0]));
    let g = Expr::param("g");
    let l = Lagrangian::new(
        Expr::rat(1, 2) * (&th_t * &th_t + &sin * &sin * &ph_t * &ph_t) + &g * &(Expr::one() - cos.clone()) * &ph_t,
    );
    let e = euler_lagrange(&ctx, &l).unwrap();
    let e_theta = -Expr::field(0, &[0, 0]) + &sin * &cos * &ph_t * &ph_t + &g * &sin * &ph_t;
    assert_eq!(e.components()[0], e_theta);
    let p_phi = &sin * &sin * &ph_t + &g * &(Expr::one() - cos);
    assert_eq!(e.components()[1], -ctx.total_derivative(&p_phi, 0).unwrap());
    let params: BTreeMap<String, f64> = [("g".to_string(), 0.7)].into();
    assert_matches_gateaux(&ctx, &l, &params, 2);
}

#[test]
fn random_lagrangians_agree_with_gateaux() {
    let mut corpus = Corpus::new(5).with_shape(Shape { kernel_probability: 0.2, ..Shape::default() });
    for k in 0..12 {
        let (n, m) = corpus.dims();
        let ctx = JetContext::new(n, m);
        let l = corpus.lagrangian(&ctx, 1 + k % 2);
        assert_matches_gateaux(&ctx, &l, &no_params(), 10 + k as u64);
    }
}

#[test]
fn total_derivatives_have_no_euler_lagrange() {
    let ctx = JetContext::new(1, 1);
    let mut corpus = Corpus::new(9);
    for _ in 0..10 {
        let f = corpus.poly(&ctx, 2);
        let l = Lagrangian::new(ctx.total_derivative(&f, 0).unwrap());
        assert!(euler_lagrange(&ctx, &l).unwrap().is_zero());
    }
}

#[test]
fn helmholtz_examples() {
    let ctx = JetContext::new(1, 1);
    assert!(helmholtz_check(&ctx, &SourceForm::new(vec![-ydd()])).unwrap().is_locally_variational);
    let bad = helmholtz_check(&ctx, &SourceForm::new(vec![yd()])).unwrap();
    assert!(!bad.is_locally_variational);
    // linearization v_t against adjoint -v_t: residual 2 v_t
    let v_t = Expr::var(JetVar::Test(0, MultiIndex::new(&[0])));
    assert!(bad.residuals.iter().any(|r| r == &(Expr::int(2) * &v_t) || r == &(Expr::int(-2) * &v_t)));
    assert!(helmholtz_check(&ctx, &SourceForm::zero(&ctx)).unwrap().is_locally_variational);
}

#[test]
fn tonti_examples() {
    let ctx = JetContext::new(1, 1);
    let center = [Expr::zero()];
    let l = tonti_lagrangian(&ctx, &SourceForm::new(vec![-ydd()]), &center).unwrap();
    assert_eq!(l.density(), &(Expr::rat(-1, 2) * y() * ydd()));
    assert!(tonti_lagrangian(&ctx, &SourceForm::zero(&ctx), &center).unwrap().is_zero());
    let eta = SourceForm::new(vec![-ydd() + y()]);
    let l = tonti_lagrangian(&ctx, &eta, &center).unwrap();
    assert_eq!(l.density(), &(Expr::rat(-1, 2) * y() * ydd() + Expr::rat(1, 2) * y() * y()));
    assert_eq!(euler_lagrange(&ctx, &l).unwrap(), eta);
    assert_eq!(
        tonti_lagrangian(&ctx, &SourceForm::new(vec![yd()]), &center),
        Err(Error::NotLocallyVariational)
    );
}

#[test]
fn momenta_examples() {
    let ctx = JetContext::new(1, 1);
    let th = |idx: &[u8]| Form::theta(&ctx, 0, MultiIndex::new(idx));
    let p = momenta(&ctx, &Lagrangian::new(Expr::rat(1, 2) * yd() * yd())).unwrap();
    assert_eq!(p, th(&[]).scale(&yd()));
    assert!(momenta(&ctx, &Lagrangian::new(Expr::int(7))).unwrap().is_zero());
    // dL/dy_t = 0, so the theta coefficient is -D_t(y/2)
    let half_y_ydd = Lagrangian::new(Expr::rat(1, 2) * y() * ydd());
    let p = momenta(&ctx, &half_y_ydd).unwrap();
    assert_eq!(p, &th(&[0]).scale(&(Expr::rat(1, 2) * y())) + &th(&[]).scale(&(Expr::rat(-1, 2) * yd())));
    let identity = &half_y_ydd.to_form(&ctx).d_v() + &p.d_h(&ctx).unwrap();
    assert_eq!(identity, euler_lagrange(&ctx, &half_y_ydd).unwrap().to_form(&ctx).unwrap());
    let third = Lagrangian::new(Expr::field(0, &[0, 0, 0]) * y());
    assert_eq!(momenta(&ctx, &third), Err(Error::OrderTooHigh(3)));
}

#[test]
fn exactness_solver_examples() {
    let ctx = JetContext::new(1, 1);
    let spec = AnsatzSpec::default();
    let nu = solve_current(&ctx, &Lagrangian::new(yd() * ydd()), &spec).unwrap();
    assert_eq!(nu.components(&ctx), vec![Expr::rat(1, 2) * yd() * yd()]);
    assert!(solve_current(&ctx, &Lagrangian::zero(), &spec).unwrap().is_zero());
    assert!(matches!(solve_current(&ctx, &Lagrangian::new(yd() * yd()), &spec), Err(Error::NotClosed(_))));

    let ctx2 = JetContext::new(1, 2);
    let angle = AnsatzSpec::default().with_angles(vec![JetVar::field(1, &[])]);
    let mu = Lagrangian::new(Expr::int(2) * Expr::param("g") * Expr::field(1, &[0]));
    let nu = solve_current(&ctx2, &mu, &angle).unwrap();
    assert_eq!(nu.components(&ctx2), vec![Expr::int(2) * Expr::param("g") * Expr::field(1, &[])]);
}

#[test]
fn exactness_solver_on_two_forms() {
    // d_H of a random 1-form in n = 2 is recovered up to a closed form
    let ctx = JetContext::new(2, 1);
    let mut corpus = Corpus::new(21).with_shape(Shape { max_terms: 2, max_degree: 2, ..Shape::default() });
    for _ in 0..5 {
        let nu = corpus.current(&ctx, 1);
        let mu = nu.d_h(&ctx).unwrap();
        let found = solve_current(&ctx, &mu, &AnsatzSpec::default()).unwrap();
        assert_eq!(found.d_h(&ctx).unwrap(), mu);
        let omega = nu.form().d_h(&ctx).unwrap();
        if omega.degree() >= 1 {
            let w = solve_dh_exact(&ctx, &omega, &AnsatzSpec::default()).unwrap();
            assert_eq!(w.d_h(&ctx).unwrap(), omega);
        }
    }
}

fn corpus_lagrangian() -> impl Strategy<Value = (JetContext, Lagrangian)> {
    (any::<u64>(), 1usize..=2, 1usize..=2, 1usize..=2).prop_map(|(seed, n, m, order)| {
        let ctx = JetContext::new(n, m);
        let mut c = Corpus::new(seed).with_shape(Shape { max_terms: 3, ..Shape::default() });
        let l = c.lagrangian(&ctx, order);
        (ctx, l)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_lagrange_images_pass_helmholtz((ctx, l) in corpus_lagrangian()) {
        let e = euler_lagrange(&ctx, &l).unwrap();
        prop_assert!(helmholtz_check(&ctx, &e).unwrap().is_locally_variational);
    }

    #[test]
    fn euler_lagrange_kills_d_h((ctx, _l) in corpus_lagrangian(), seed in any::<u64>()) {
        let nu: Current = Corpus::new(seed).current(&ctx, 2);
        let l = nu.d_h(&ctx).unwrap();
        prop_assert!(euler_lagrange(&ctx, &l).unwrap().is_zero());
    }

    #[test]
    fn euler_lagrange_is_gauge_invariant((ctx, l) in corpus_lagrangian(), seed in any::<u64>()) {
        let nu = Corpus::new(seed).current(&ctx, 1);
        let shifted = &l + &nu.d_h(&ctx).unwrap();
        prop_assert_eq!(euler_lagrange(&ctx, &shifted).unwrap(), euler_lagrange(&ctx, &l).unwrap());
    }

    #[test]
    fn tonti_inverts_euler_lagrange((ctx, l) in corpus_lagrangian()) {
        let eta = euler_lagrange(&ctx, &l).unwrap();
        let center = vec![Expr::zero(); ctx.fiber_dim];
        let back = tonti_lagrangian(&ctx, &eta, &center).unwrap();
        prop_assert_eq!(euler_lagrange(&ctx, &back).unwrap(), eta);
    }

    #[test]
    fn first_variation_decomposes((ctx, l) in corpus_lagrangian()) {
        let d_v = l.to_form(&ctx).d_v();
        let e = euler_lagrange(&ctx, &l).unwrap().to_form(&ctx).unwrap();
        let p = momenta(&ctx, &l).unwrap();
        let lhs = &d_v + &p.d_h(&ctx).unwrap();
        prop_assert_eq!(lhs, e);
    }
}

#[test]
fn source_form_layout() {
    let ctx = JetContext::new(1, 1);
    let f = SourceForm::new(vec![yd()]).to_form(&ctx).unwrap();
    assert!(!f.coefficient(&[Covector::Dx(0), Covector::Theta(0, MultiIndex::empty())]).is_zero());
}
