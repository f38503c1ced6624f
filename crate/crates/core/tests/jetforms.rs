mod common;

use proptest::prelude::*;
use varseq_core::corpus::Corpus;
use varseq_core::{Covector, Error, Expr, Form, JetContext, MultiIndex, VectorField};

fn y() -> Expr {
    Expr::field(0, &[])
}
fn yd() -> Expr {
    Expr::field(0, &[0])
}
fn theta(idx: &[u8]) -> Covector {
    Covector::Theta(0, MultiIndex::new(idx))
}

#[test]
fn wedge_examples() {
    let ctx = JetContext::new(1, 1);
    let dx = Form::dx(&ctx, 0);
    assert!(dx.wedge(&dx).unwrap().is_zero());
    let th = Form::theta(&ctx, 0, MultiIndex::empty());
    let reversed = th.wedge(&dx).unwrap();
    assert_eq!(reversed.coefficient(&[Covector::Dx(0), theta(&[])]), Expr::int(-1));
    let a = dx.scale(&y());
    let b = th.scale(&yd());
    assert_eq!(a.wedge(&b).unwrap().coefficient(&[Covector::Dx(0), theta(&[])]), y() * yd());
    let other = Form::dx(&JetContext::new(2, 1), 0);
    assert!(matches!(dx.wedge(&other), Err(Error::DimensionMismatch(_))));
}

#[test]
fn differential_examples() {
    let ctx = JetContext::new(1, 1);
    let f = Form::function(&ctx, y());
    assert_eq!(f.d_h(&ctx).unwrap(), Form::dx(&ctx, 0).scale(&yd()));
    let top = Form::dx(&ctx, 0).scale(&(Expr::rat(1, 2) * yd() * yd()));
    assert!(top.d_h(&ctx).unwrap().is_zero());
    let half = Form::function(&ctx, Expr::rat(1, 2) * yd() * yd());
    assert_eq!(half.d_v(), Form::theta(&ctx, 0, MultiIndex::new(&[0])).scale(&yd()));
    assert!(Form::function(&ctx, Expr::base(0)).d_v().is_zero());
}

#[test]
fn horizontalization_examples() {
    let ctx = JetContext::new(1, 1);
    let dy = Form::dy(&ctx, 0, MultiIndex::empty());
    assert_eq!(dy.horizontalize(), Form::dx(&ctx, 0).scale(&yd()));
    assert!(Form::theta(&ctx, 0, MultiIndex::empty()).horizontalize().is_zero());
    assert!(dy.wedge(&Form::dx(&ctx, 0)).unwrap().horizontalize().is_zero());
}

#[test]
fn prolongation_examples() {
    let ctx = JetContext::new(1, 1);
    let t = MultiIndex::new(&[0]);
    let shift = VectorField::vertical(&ctx, vec![Expr::one()]).unwrap();
    assert!(shift.prolong(&ctx, 1).unwrap()[&(0, t.clone())].is_zero());
    let scale = VectorField::vertical(&ctx, vec![y()]).unwrap();
    assert_eq!(scale.prolong(&ctx, 1).unwrap()[&(0, t.clone())], yd());
    let time = VectorField::new(&ctx, vec![Expr::one()], vec![Expr::zero()]).unwrap();
    assert!(time.prolong(&ctx, 1).unwrap()[&(0, t)].is_zero());
}

#[test]
fn prolongation_matches_flow_pushforward() {
    let ctx = JetContext::new(1, 1);
    let t = Expr::base(0);
    type Flow = (Expr, Expr, Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64, f64) -> f64>);
    let cases: Vec<Flow> = vec![
        (Expr::one(), Expr::zero(), Box::new(|_| 1.0), Box::new(|_, _| 0.0)),
        (Expr::zero(), y(), Box::new(|_| 0.0), Box::new(|_, y| y)),
        (
            Expr::one() + t.clone(),
            &t * &y(),
            Box::new(|t| 1.0 + t),
            Box::new(|t, y| t * y),
        ),
        (
            &t * &t,
            Expr::sin(&y()).unwrap() + t.clone(),
            Box::new(|t| t * t),
            Box::new(|t, y| y.sin() + t),
        ),
    ];
    let section = |t: f64| 0.3 + 0.7 * t - 0.4 * t * t + 0.2 * t * t * t;
    let slope = |t: f64| 0.7 - 0.8 * t + 0.6 * t * t;
    let curvature = |t: f64| -0.8 + 1.2 * t;
    for (xi, big, xi_f, big_f) in &cases {
        let field = VectorField::new(&ctx, vec![xi.clone()], vec![big.clone()]).unwrap();
        let comp = field.prolong(&ctx, 1).unwrap()[&(0, MultiIndex::new(&[0]))].clone();
        for &t0 in &[0.2, 0.5, 0.9] {
            let env = |v: &varseq_core::JetVar| match v {
                varseq_core::JetVar::Base(_) => Some(t0),
                varseq_core::JetVar::Field(_, idx) => Some(match idx.order() {
                    0 => section(t0),
                    1 => slope(t0),
                    _ => curvature(t0),
                }),
                _ => None,
            };
            let exact = comp.eval(&env).unwrap();
            let numeric = common::flow_prolongation(xi_f.as_ref(), big_f.as_ref(), &section, t0);
            assert!((exact - numeric).abs() < 1e-5, "{comp}: {exact} vs {numeric}");
        }
    }
}

#[test]
fn contraction_examples() {
    let ctx = JetContext::new(1, 1);
    let shift = VectorField::vertical(&ctx, vec![Expr::one()]).unwrap();
    let th = Form::theta(&ctx, 0, MultiIndex::empty());
    assert_eq!(th.contract(&ctx, &shift).unwrap(), Form::function(&ctx, Expr::one()));
    let time = VectorField::new(&ctx, vec![Expr::one()], vec![Expr::zero()]).unwrap();
    assert_eq!(Form::dx(&ctx, 0).contract(&ctx, &time).unwrap(), Form::function(&ctx, Expr::one()));
    let mixed = Form::basis(&ctx, vec![Covector::Dx(0), theta(&[0])]).scale(&yd());
    assert!(mixed.contract(&ctx, &shift).unwrap().is_zero());
    assert!(matches!(Form::function(&ctx, y()).contract(&ctx, &shift), Err(Error::DegreeZero)));
}

#[test]
fn vector_field_validation() {
    let ctx = JetContext::new(1, 1);
    assert!(matches!(
        VectorField::new(&ctx, vec![y()], vec![Expr::zero()]),
        Err(Error::InvalidVectorField(_))
    ));
    let evo = VectorField::vertical(&ctx, vec![yd()]).unwrap();
    assert!(!evo.is_projectable());
    assert!(VectorField::vertical(&ctx, vec![y()]).unwrap().is_projectable());
}

fn arb_form() -> impl Strategy<Value = (JetContext, Form)> {
    (any::<u64>(), 1usize..=2, 1usize..=2, 0usize..=3).prop_map(|(seed, n, m, deg)| {
        let ctx = JetContext::new(n, m);
        let mut c = Corpus::new(seed);
        let f = c.form(&ctx, deg, 2);
        (ctx, f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differentials_square_to_zero((ctx, f) in arb_form()) {
        let dh = f.d_h(&ctx).unwrap();
        let dv = f.d_v();
        prop_assert!(dh.d_h(&ctx).unwrap().is_zero());
        prop_assert!(dv.d_v().is_zero());
        let anti = &dh.d_v() + &dv.d_h(&ctx).unwrap();
        prop_assert!(anti.is_zero());
    }

    #[test]
    fn horizontalization_is_a_projection((_ctx, f) in arb_form()) {
        let h = f.horizontalize();
        prop_assert_eq!(h.horizontalize(), h.clone());
        prop_assert_eq!(h.contact_degrees().map_or(0, |(_, hi)| hi), 0);
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>(), p in 0usize..=2, q in 0usize..=2) {
        let ctx = JetContext::new(2, 2);
        let mut c = Corpus::new(seed);
        let a = c.form(&ctx, p, 1);
        let b = c.form(&ctx, q, 1);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let expected = if p * q % 2 == 0 { ba } else { ba.scale(&Expr::int(-1)) };
        prop_assert_eq!(ab, expected);
    }

    #[test]
    fn contraction_is_an_antiderivation(seed in any::<u64>(), p in 1usize..=2, q in 1usize..=2) {
        let ctx = JetContext::new(2, 1);
        let mut c = Corpus::new(seed);
        let a = c.form(&ctx, p, 1);
        let b = c.form(&ctx, q, 1);
        let field = c.vector_field(&ctx, true, 1);
        let lhs = a.wedge(&b).unwrap().contract(&ctx, &field).unwrap();
        let left = a.contract(&ctx, &field).unwrap().wedge(&b).unwrap();
        let right = a.wedge(&b.contract(&ctx, &field).unwrap()).unwrap();
        let sign = if p % 2 == 0 { Expr::one() } else { Expr::int(-1) };
        prop_assert!((&lhs - &(&left + &right.scale(&sign))).is_zero());
    }

    #[test]
    fn contraction_of_df_is_the_prolonged_action(seed in any::<u64>(), n in 1usize..=2, m in 1usize..=2) {
        let ctx = JetContext::new(n, m);
        let mut c = Corpus::new(seed);
        let f = Form::function(&ctx, c.poly(&ctx, 1));
        let field = c.projectable_field(&ctx);
        let df = &f.d_h(&ctx).unwrap() + &f.d_v();
        let paired = df.contract(&ctx, &field).unwrap();
        let action = field.apply_prolonged(&ctx, &f.coefficient(&[])).unwrap();
        prop_assert_eq!(paired.coefficient(&[]), action);
    }
}
