use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use varseq_core::cech::{Cochain, Cover};
use varseq_core::corpus::{Corpus, Shape};
use varseq_core::noether::{verify_lemma3_and_theorem, VerifyOptions};
use varseq_core::varseq::{euler_lagrange, helmholtz_check, solve_current};
use varseq_core::{AnsatzSpec, Expr, JetContext, Lagrangian, Naming, VectorField};

fn corpus() -> Corpus {
    Corpus::new(7).with_shape(Shape { max_terms: 4, kernel_probability: 0.2, ..Shape::default() })
}

fn kernels(c: &mut Criterion) {
    let ctx = JetContext::new(2, 2);
    let mut corpus = corpus();
    let lagrangians: Vec<Lagrangian> = (0..16).map(|_| corpus.lagrangian(&ctx, 2)).collect();
    let sources: Vec<_> = lagrangians.iter().map(|l| euler_lagrange(&ctx, l).unwrap()).collect();
    let exact: Vec<Lagrangian> = (0..8).map(|_| corpus.current(&ctx, 1).d_h(&ctx).unwrap()).collect();

    c.bench_function("total_derivative", |b| {
        b.iter(|| {
            for l in &lagrangians {
                black_box(ctx.total_derivative(l.density(), 1).unwrap());
            }
        })
    });
    c.bench_function("euler_lagrange", |b| {
        b.iter(|| {
            for l in &lagrangians {
                black_box(euler_lagrange(&ctx, l).unwrap());
            }
        })
    });
    c.bench_function("helmholtz", |b| {
        b.iter(|| {
            for eta in &sources {
                black_box(helmholtz_check(&ctx, eta).unwrap());
            }
        })
    });
    c.bench_function("solve_current", |b| {
        let spec = AnsatzSpec::default();
        b.iter(|| {
            for mu in &exact {
                black_box(solve_current(&ctx, mu, &spec).unwrap());
            }
        })
    });
}

fn monopole(c: &mut Criterion) {
    let cover = Cover::monopole_s2();
    let ctx = cover.context();
    let theta = Expr::field(0, &[]);
    let (theta_t, phi_t) = (Expr::field(0, &[0]), Expr::field(1, &[0]));
    let (sin, cos) = (Expr::sin(&theta).unwrap(), Expr::cos(&theta).unwrap());
    let g = Expr::param("g");
    let kinetic = Expr::rat(1, 2) * (&theta_t * &theta_t + &sin * &sin * &phi_t * &phi_t);
    let lambda = Cochain::from_charts(&cover, |i| {
        let coupling = if cover.charts[i].name.starts_with("north") {
            g.clone() * (Expr::one() - &cos)
        } else {
            -(g.clone() * (Expr::one() + &cos))
        };
        Ok(Lagrangian::new(&kinetic + &(coupling * &phi_t)))
    })
    .unwrap();
    let rotation = VectorField::vertical(&ctx, vec![Expr::zero(), Expr::one()]).unwrap();
    let mut opts = VerifyOptions::new(Naming { base: vec!["t".into()], fields: vec!["theta".into(), "phi".into()] });
    opts.params.insert("g".into(), 1.0);

    let mut group = c.benchmark_group("monopole");
    group.sample_size(10);
    group.bench_function("verify_lemma3", |b| {
        b.iter(|| black_box(verify_lemma3_and_theorem(&cover, &lambda, &rotation, &opts).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, kernels, monopole);
criterion_main!(benches);
