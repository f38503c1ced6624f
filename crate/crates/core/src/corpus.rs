//! Seeded generators of random polynomial jet expressions, Lagrangians,
//! currents, forms and vector fields, shared by tests, the self test and the
//! benchmarks.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Expr, JetVar, MultiIndex};
use crate::forms::{Covector, Form, VectorField};
use crate::jet::JetContext;
use crate::varseq::{Current, Lagrangian};

/// Shape limits for generated polynomials.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_terms: usize,
    pub max_degree: usize,
    pub max_coefficient: i64,
    /// Probability that a term carries a `sin`/`cos` factor of an order-0 variable.
    pub kernel_probability: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_terms: 4, max_degree: 3, max_coefficient: 5, kernel_probability: 0.0 }
    }
}

/// Deterministic random source of corpus objects.
pub struct Corpus {
    rng: ChaCha8Rng,
    pub shape: Shape,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed), shape: Shape::default() }
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    fn coefficient(&mut self) -> Expr {
        let c = self.shape.max_coefficient.max(1);
        let mut k = 0;
        while k == 0 {
            k = self.rng.random_range(-c..=c);
        }
        Expr::int(k)
    }

    /// All jet variables `x^mu`, `y^a_I` with `|I| <= order`.
    pub fn variables(ctx: &JetContext, order: usize) -> Vec<JetVar> {
        let mut out: Vec<JetVar> = ctx.base_indices().map(JetVar::Base).collect();
        for a in ctx.fiber_indices() {
            for idx in MultiIndex::all_up_to(ctx.base_dim, order) {
                out.push(JetVar::Field(a, idx));
            }
        }
        out
    }

    /// Random polynomial in the variables of order at most `order`.
    pub fn poly(&mut self, ctx: &JetContext, order: usize) -> Expr {
        let vars = Self::variables(ctx, order);
        self.poly_in(&vars)
    }

    /// Random polynomial in the given variables.
    pub fn poly_in(&mut self, vars: &[JetVar]) -> Expr {
        let mut out = Expr::zero();
        let terms = self.rng.random_range(1..=self.shape.max_terms.max(1));
        for _ in 0..terms {
            let mut t = self.coefficient();
            let degree = self.rng.random_range(0..=self.shape.max_degree);
            for _ in 0..degree {
                if vars.is_empty() {
                    break;
                }
                let v = &vars[self.rng.random_range(0..vars.len())];
                t = t * Expr::var(v.clone());
            }
            if self.shape.kernel_probability > 0.0 && self.rng.random_bool(self.shape.kernel_probability) {
                let zeroth: Vec<&JetVar> = vars.iter().filter(|v| v.order() == 0).collect();
                if let Some(v) = zeroth.get(self.rng.random_range(0..zeroth.len().max(1))) {
                    let arg = Expr::var((*v).clone());
                    let k = if self.rng.random_bool(0.5) { Expr::sin(&arg) } else { Expr::cos(&arg) };
                    t = t * k.expect("order-0 kernel argument");
                }
            }
            out += t;
        }
        out
    }

    /// Nonzero polynomial whose jet order equals `order` when the draw allows it.
    pub fn poly_of_order(&mut self, ctx: &JetContext, order: usize) -> Expr {
        loop {
            let mut p = self.poly(ctx, order);
            if order > 0 {
                let a = self.rng.random_range(0..ctx.fiber_dim) as u8;
                let idx: Vec<u8> = (0..order).map(|_| self.rng.random_range(0..ctx.base_dim) as u8).collect();
                p += self.coefficient() * Expr::field(a, &idx) * self.poly(ctx, 0);
            }
            if !p.is_zero() {
                return p;
            }
        }
    }

    pub fn lagrangian(&mut self, ctx: &JetContext, order: usize) -> Lagrangian {
        Lagrangian::new(self.poly_of_order(ctx, order))
    }

    pub fn current(&mut self, ctx: &JetContext, order: usize) -> Current {
        let comps: Vec<Expr> = (0..ctx.base_dim).map(|_| self.poly(ctx, order)).collect();
        Current::from_components(ctx, &comps).expect("component count matches the base")
    }

    /// Random form of total degree `degree` mixing `dx` and contact factors
    /// of order at most `order` (coefficients and contact indices alike).
    pub fn form(&mut self, ctx: &JetContext, degree: usize, order: usize) -> Form {
        let mut out = Form::zero(ctx, degree);
        let terms = self.rng.random_range(1..=3);
        for _ in 0..terms {
            let mut factors = Vec::with_capacity(degree);
            for _ in 0..degree {
                if self.rng.random_bool(0.5) {
                    factors.push(Covector::Dx(self.rng.random_range(0..ctx.base_dim) as u8));
                } else {
                    let a = self.rng.random_range(0..ctx.fiber_dim) as u8;
                    let k = self.rng.random_range(0..=order.saturating_sub(1));
                    let idx: Vec<u8> = (0..k).map(|_| self.rng.random_range(0..ctx.base_dim) as u8).collect();
                    factors.push(Covector::Theta(a, MultiIndex::new(&idx)));
                }
            }
            let c = self.poly(ctx, order);
            out = &out + &Form::basis(ctx, factors).scale(&c);
        }
        out
    }

    /// Random vector field: base-only horizontal components (zero unless
    /// `horizontal`) and vertical components of jet order at most `order`.
    pub fn vector_field(&mut self, ctx: &JetContext, horizontal: bool, order: usize) -> VectorField {
        let base: Vec<JetVar> = ctx.base_indices().map(JetVar::Base).collect();
        let saved = self.shape;
        self.shape.max_degree = self.shape.max_degree.min(2);
        let h: Vec<Expr> = (0..ctx.base_dim)
            .map(|_| if horizontal && self.rng.random_bool(0.7) { self.poly_in(&base) } else { Expr::zero() })
            .collect();
        let v: Vec<Expr> = (0..ctx.fiber_dim).map(|_| self.poly(ctx, order)).collect();
        self.shape = saved;
        VectorField::new(ctx, h, v).expect("generated field is well formed")
    }

    /// Random projectable field: components depend on `(x, y)` only.
    pub fn projectable_field(&mut self, ctx: &JetContext) -> VectorField {
        self.vector_field(ctx, true, 0)
    }

    /// Random `(n, m)` with both in `{1, 2}`.
    pub fn dims(&mut self) -> (usize, usize) {
        (self.rng.random_range(1..=2), self.rng.random_range(1..=2))
    }
}
