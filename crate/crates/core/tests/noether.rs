mod common;

use proptest::prelude::*;
use varseq_core::cech::{Cochain, Cover};
use varseq_core::corpus::{Corpus, Shape};
use varseq_core::noether::{
    check_generalized_symmetry, lie_derive_current, lie_derive_lagrangian, lie_derive_source, noether_current,
    on_shell_reduce, strong_noether_current, vanishes_on_shell, verify_lemma2, verify_lemma3_and_theorem,
    VerifyOptions,
};
use varseq_core::report::Verdict;
use varseq_core::varseq::euler_lagrange;
use varseq_core::{AnsatzSpec, Current, Error, Expr, Form, JetContext, JetVar, Lagrangian, Naming, SourceForm, VectorField};

use common::{central_difference, close, no_params, to_poly, Poly, Section};

fn y() -> Expr {
    Expr::field(0, &[])
}
fn yd() -> Expr {
    Expr::field(0, &[0])
}
fn ydd() -> Expr {
    Expr::field(0, &[0, 0])
}
fn t() -> Expr {
    Expr::base(0)
}
fn free() -> Lagrangian {
    Lagrangian::new(Expr::rat(1, 2) * yd() * yd())
}

/// Cartan's formula on the Lagrangian form followed by the horizontal
/// projection: `h(jXi ⌟ d(L omega) + d(jXi ⌟ L omega))`.
fn cartan_lagrangian(ctx: &JetContext, l: &Lagrangian, field: &VectorField) -> Expr {
    let form = l.to_form(ctx);
    let d = |f: &Form| &f.d_h(ctx).unwrap() + &f.d_v();
    let first = d(&form).contract(ctx, field).unwrap();
    let second = d(&form.contract(ctx, field).unwrap());
    let total = (&first + &second).horizontalize();
    Lagrangian::from_form(ctx, &total).unwrap().density().clone()
}

/// Same oracle on an `(n-1)`-form current.
fn cartan_current(ctx: &JetContext, nu: &Current, field: &VectorField) -> Form {
    let form = nu.form();
    let d = |f: &Form| &f.d_h(ctx).unwrap() + &f.d_v();
    let first = d(form).contract(ctx, field).unwrap();
    let total = if form.degree() == 0 { first } else { &first + &d(&form.contract(ctx, field).unwrap()) };
    total.horizontalize()
}

fn corpus_pair() -> impl Strategy<Value = (JetContext, Lagrangian, VectorField)> {
    (any::<u64>(), 1usize..=2, 1usize..=2, 1usize..=2, any::<bool>()).prop_map(|(seed, n, m, order, evo)| {
        let ctx = JetContext::new(n, m);
        let mut c = Corpus::new(seed).with_shape(Shape { max_terms: 3, ..Shape::default() });
        let l = c.lagrangian(&ctx, order);
        let field = c.vector_field(&ctx, true, usize::from(evo));
        (ctx, l, field)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_variation_identity((ctx, l, field) in corpus_pair()) {
        let lhs = lie_derive_lagrangian(&ctx, &l, &field).unwrap();
        let e = euler_lagrange(&ctx, &l).unwrap();
        let source_part = e.pair(&field.characteristic(&ctx));
        let eps = noether_current(&ctx, &l, &field).unwrap();
        let residual = lhs.density() - &source_part - eps.d_h(&ctx).unwrap().density();
        prop_assert!(residual.is_zero());
    }

    #[test]
    fn lie_lagrangian_matches_cartan((ctx, l, field) in corpus_pair()) {
        let lhs = lie_derive_lagrangian(&ctx, &l, &field).unwrap();
        prop_assert_eq!(lhs.density(), &cartan_lagrangian(&ctx, &l, &field));
    }

    #[test]
    fn lie_commutes_with_d_h(seed in any::<u64>(), n in 1usize..=2, m in 1usize..=2, evo in any::<bool>()) {
        let ctx = JetContext::new(n, m);
        let mut c = Corpus::new(seed).with_shape(Shape { max_terms: 3, ..Shape::default() });
        let nu = c.current(&ctx, 1);
        let field = c.vector_field(&ctx, true, usize::from(evo));
        let lhs = lie_derive_lagrangian(&ctx, &nu.d_h(&ctx).unwrap(), &field).unwrap();
        let varied = lie_derive_current(&ctx, &nu, &field).unwrap();
        prop_assert_eq!(lhs, varied.d_h(&ctx).unwrap());
        // Cartan differs from the representative by d_H(xi ⌟ nu) only
        let diff = &cartan_current(&ctx, &nu, &field) - varied.form();
        let exact = if n == 1 { Form::zero(&ctx, 0) } else { nu.form().contract_horizontal(&field).unwrap().d_h(&ctx).unwrap() };
        prop_assert_eq!(diff, exact);
    }

    #[test]
    fn source_lie_derivative_is_natural((ctx, l, field) in corpus_pair()) {
        let eta = euler_lagrange(&ctx, &l).unwrap();
        let lhs = lie_derive_source(&ctx, &eta, &l, &field).unwrap();
        let rhs = euler_lagrange(&ctx, &lie_derive_lagrangian(&ctx, &l, &field).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn source_lie_derivative_ignores_gauge((ctx, l, field) in corpus_pair(), seed in any::<u64>()) {
        let nu = Corpus::new(seed).current(&ctx, 1);
        let other = &l + &nu.d_h(&ctx).unwrap();
        let eta = euler_lagrange(&ctx, &l).unwrap();
        prop_assert_eq!(
            lie_derive_source(&ctx, &eta, &l, &field).unwrap(),
            lie_derive_source(&ctx, &eta, &other, &field).unwrap()
        );
    }
}

#[test]
fn vertical_lie_derivative_is_a_pointwise_gateaux_derivative() {
    // for Xi = Xi^a(x, y) d/dy^a the flow to first order moves s to s + eps Xi(x, s)
    let mut corpus = Corpus::new(77).with_shape(Shape { max_terms: 3, max_degree: 2, ..Shape::default() });
    for k in 0..10 {
        let (n, m) = corpus.dims();
        let ctx = JetContext::new(n, m);
        let l = corpus.lagrangian(&ctx, 2);
        let field = corpus.vector_field(&ctx, false, 0);
        let s = Section::random(300 + k, n, m);
        let inputs: Vec<Poly> = (0..n).map(|i| Poly::coordinate(n, i)).chain(s.components.iter().cloned()).collect();
        let h: Vec<Poly> = field.vertical_components().iter().map(|c| to_poly(c, n, m).compose(&inputs, n)).collect();
        let varied = lie_derive_lagrangian(&ctx, &l, &field).unwrap();
        let x: Vec<f64> = (0..n).map(|i| 0.35 + 0.2 * i as f64).collect();
        let numeric = central_difference(|eps| s.perturbed(&h, eps).eval(l.density(), &x, &no_params()), 1e-3);
        let exact = s.eval(varied.density(), &x, &no_params());
        assert!(close(numeric, exact, 1e-7), "{numeric} vs {exact}");
    }
}

#[test]
fn noether_current_examples() {
    let ctx = JetContext::new(1, 1);
    let time = VectorField::new(&ctx, vec![Expr::one()], vec![Expr::zero()]).unwrap();
    let shift = VectorField::vertical(&ctx, vec![Expr::one()]).unwrap();
    assert_eq!(noether_current(&ctx, &free(), &time).unwrap().components(&ctx), vec![Expr::rat(-1, 2) * yd() * yd()]);
    assert_eq!(noether_current(&ctx, &free(), &shift).unwrap().components(&ctx), vec![yd()]);
    assert!(noether_current(&ctx, &free(), &VectorField::zero(&ctx)).unwrap().is_zero());
}

#[test]
fn generalized_symmetry_examples() {
    let ctx = JetContext::new(1, 1);
    let spec = AnsatzSpec::default();
    let eta = SourceForm::new(vec![-ydd()]);
    let boost = VectorField::vertical(&ctx, vec![t() * t()]).unwrap();
    let r = check_generalized_symmetry(&ctx, &eta, &boost, None, &spec).unwrap();
    assert!(!r.is_generalized_symmetry);
    assert!(r.residuals.iter().any(|e| !e.is_zero()));
    let zero = check_generalized_symmetry(&ctx, &eta, &VectorField::zero(&ctx), None, &spec).unwrap();
    assert!(zero.is_generalized_symmetry && zero.is_lagrangian_symmetry);
    assert!(zero.nu.unwrap().is_zero());
    let bad = check_generalized_symmetry(&ctx, &SourceForm::new(vec![yd()]), &boost, None, &spec).unwrap();
    assert!(!bad.is_generalized_symmetry);
    assert!(bad.notes.iter().any(|n| n.contains("not locally variational")));
}

#[test]
fn galilean_boost_is_a_divergence_symmetry() {
    // L_Xi lambda = y_t = D_t(y): exact but not zero
    let ctx = JetContext::new(1, 1);
    let spec = AnsatzSpec::default();
    let boost = VectorField::vertical(&ctx, vec![t()]).unwrap();
    let r = check_generalized_symmetry(&ctx, &SourceForm::new(vec![-ydd()]), &boost, Some(&free()), &spec).unwrap();
    assert!(r.is_generalized_symmetry && r.is_lagrangian_symmetry);
    assert_eq!(r.zeta.unwrap().components(&ctx), vec![y()]);
    let beta = strong_noether_current(&ctx, &free(), &SourceForm::new(vec![-ydd()]), &boost, &spec).unwrap();
    assert_eq!(beta.d_h(&ctx).unwrap(), lie_derive_lagrangian(&ctx, &free(), &boost).unwrap());
}

#[test]
fn strong_currents() {
    let ctx = JetContext::new(1, 1);
    let spec = AnsatzSpec::default();
    let eta = SourceForm::new(vec![-ydd()]);
    let shift = VectorField::vertical(&ctx, vec![Expr::one()]).unwrap();
    assert!(strong_noether_current(&ctx, &free(), &eta, &shift, &spec).unwrap().is_zero());
    assert!(strong_noether_current(&ctx, &free(), &eta, &VectorField::zero(&ctx), &spec).unwrap().is_zero());
    let wrong = SourceForm::new(vec![ydd()]);
    assert_eq!(strong_noether_current(&ctx, &free(), &wrong, &shift, &spec), Err(Error::InconsistentPair));

    // monopole north chart: epsilon is the phi momentum
    let ctx = JetContext::new(1, 2);
    let th = Expr::field(0, &[]);
    let (sin, cos) = (Expr::sin(&th).unwrap(), Expr::cos(&th).unwrap());
    let (th_t, ph_t) = (Expr::field(0, &[0]), Expr::field(1, &[0]));
    let g = Expr::param("g");
    let l = Lagrangian::new(Expr::rat(1, 2) * (&th_t * &th_t + &sin * &sin * &ph_t * &ph_t) + &g * &(Expr::one() - cos.clone()) * &ph_t);
    let rot = VectorField::vertical(&ctx, vec![Expr::zero(), Expr::one()]).unwrap();
    let eps = noether_current(&ctx, &l, &rot).unwrap();
    assert_eq!(eps.components(&ctx), vec![&sin * &sin * &ph_t + &g * &(Expr::one() - cos)]);
    let eta = euler_lagrange(&ctx, &l).unwrap();
    let beta = strong_noether_current(&ctx, &l, &eta, &rot, &spec.clone().with_angles(vec![JetVar::field(1, &[])])).unwrap();
    assert!(beta.d_h(&ctx).unwrap().is_zero());
}

#[test]
fn conservation_on_shell() {
    // L = |y_t|^2 / 2 + V(y) is time independent: energy is conserved on shell
    let mut corpus = Corpus::new(41).with_shape(Shape { max_terms: 3, max_degree: 3, ..Shape::default() });
    for _ in 0..8 {
        let m = corpus.usize_in(1, 2);
        let ctx = JetContext::new(1, m);
        let fields: Vec<JetVar> = (0..m as u8).map(|a| JetVar::field(a, &[])).collect();
        let mut density = corpus.poly_in(&fields);
        for a in 0..m as u8 {
            density += Expr::rat(1, 2) * Expr::field(a, &[0]) * Expr::field(a, &[0]);
        }
        let l = Lagrangian::new(density);
        let time = VectorField::new(&ctx, vec![Expr::one()], vec![Expr::zero(); m]).unwrap();
        assert!(lie_derive_lagrangian(&ctx, &l, &time).unwrap().is_zero());
        let eta = euler_lagrange(&ctx, &l).unwrap();
        let eps = noether_current(&ctx, &l, &time).unwrap();
        let div = eps.d_h(&ctx).unwrap();
        assert!(!div.is_zero());
        assert!(on_shell_reduce(&ctx, div.density(), &eta).unwrap().is_zero());
    }
}

#[test]
fn wave_equation_momentum_is_conserved_on_shell() {
    let ctx = JetContext::new(2, 1);
    let (u_t, u_x) = (Expr::field(0, &[0]), Expr::field(0, &[1]));
    let l = Lagrangian::new(Expr::rat(1, 2) * (&u_t * &u_t - &u_x * &u_x));
    let eta = euler_lagrange(&ctx, &l).unwrap();
    for field in [
        VectorField::new(&ctx, vec![Expr::zero(), Expr::one()], vec![Expr::zero()]).unwrap(),
        VectorField::new(&ctx, vec![Expr::one(), Expr::zero()], vec![Expr::zero()]).unwrap(),
    ] {
        let eps = noether_current(&ctx, &l, &field).unwrap();
        let div = eps.d_h(&ctx).unwrap();
        let r = vanishes_on_shell(&ctx, div.density(), &eta, &AnsatzSpec::default()).unwrap();
        assert!(r.vanishes, "{}", r.residual);
    }
}

#[test]
fn monopole_on_shell_needs_the_fallback() {
    let ctx = JetContext::new(1, 2);
    let th = Expr::field(0, &[]);
    let (sin, cos) = (Expr::sin(&th).unwrap(), Expr::cos(&th).unwrap());
    let (th_t, ph_t) = (Expr::field(0, &[0]), Expr::field(1, &[0]));
    let g = Expr::param("g");
    let p_phi = &sin * &sin * &ph_t + &g * &(Expr::one() - cos.clone());
    let l = Lagrangian::new(Expr::rat(1, 2) * (&th_t * &th_t + &sin * &sin * &ph_t * &ph_t) + &g * &(Expr::one() - cos) * &ph_t);
    let eta = euler_lagrange(&ctx, &l).unwrap();
    let dp = ctx.total_derivative(&p_phi, 0).unwrap();
    assert!(matches!(on_shell_reduce(&ctx, &dp, &eta), Err(Error::NotSolvableForLeading(_))));
    let r = vanishes_on_shell(&ctx, &dp, &eta, &AnsatzSpec::default()).unwrap();
    assert!(r.vanishes);
    assert_eq!(r.method, "ansatz");
    assert!(!vanishes_on_shell(&ctx, &th_t, &eta, &AnsatzSpec::default()).unwrap().vanishes);
}

#[test]
fn scaling_fails_the_lemma_hypothesis() {
    let cover = Cover::single(1, 1);
    let lambda = Cochain::from_charts(&cover, |_| Ok(free())).unwrap();
    let scale = VectorField::vertical(&cover.context(), vec![y()]).unwrap();
    let twice = lie_derive_lagrangian(&cover.context(), &lie_derive_lagrangian(&cover.context(), &free(), &scale).unwrap(), &scale).unwrap();
    assert_eq!(twice.density(), &(Expr::int(4) * free().density()));
    let opts = VerifyOptions::new(Naming::generic(1, 1));
    let report = verify_lemma2(&cover, &lambda, &scale, &opts).unwrap();
    assert!(!report.passed());
    let failing: Vec<_> = report.entries.iter().filter(|e| e.verdict == Verdict::Fail).collect();
    assert!(failing.iter().any(|e| e.assertion == "L_Xi L_Xi lambda = 0"));
}

#[test]
fn single_chart_lemmas_degenerate() {
    let cover = Cover::single(1, 1);
    let lambda = Cochain::from_charts(&cover, |_| Ok(free())).unwrap();
    let shift = VectorField::vertical(&cover.context(), vec![Expr::one()]).unwrap();
    let opts = VerifyOptions::new(Naming::generic(1, 1));
    let r2 = verify_lemma2(&cover, &lambda, &shift, &opts).unwrap();
    assert!(r2.passed(), "{}", r2.to_text());
    let r3 = verify_lemma3_and_theorem(&cover, &lambda, &shift, &opts).unwrap();
    assert!(r3.passed(), "{}", r3.to_text());
    assert!(r3.entries.iter().any(|e| e.assertion.starts_with("d_H V on shell")));
}

#[test]
fn harmonic_time_translation_lemma3() {
    let cover = Cover::single(1, 1);
    let l = Lagrangian::new(Expr::rat(1, 2) * (yd() * yd() - y() * y()));
    let lambda = Cochain::from_charts(&cover, |_| Ok(l.clone())).unwrap();
    let time = VectorField::new(&cover.context(), vec![Expr::one()], vec![Expr::zero()]).unwrap();
    let opts = VerifyOptions::new(Naming { base: vec!["t".into()], fields: vec!["y".into()] });
    let r = verify_lemma3_and_theorem(&cover, &lambda, &time, &opts).unwrap();
    assert!(r.passed(), "{}", r.to_text());
}
