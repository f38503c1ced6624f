use std::collections::BTreeMap;
use std::fmt::Debug;

use super::{Cover, Simplex};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::forms::{Form, VectorField};
use crate::jet::JetContext;
use crate::noether::{lie_derive_current, lie_derive_lagrangian};
use crate::varseq::{euler_lagrange, Current, Lagrangian, SourceForm};

/// Values a cochain can carry: an additive group of expression-valued
/// objects on which chart transitions act coefficientwise.
pub trait CochainValue: Clone + Debug + PartialEq {
    fn zero_like(&self) -> Self;
    fn is_zero_value(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn map_exprs(&self, f: &dyn Fn(&Expr) -> Result<Expr>) -> Result<Self>;
}

impl CochainValue for Expr {
    fn zero_like(&self) -> Self {
        Expr::zero()
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn map_exprs(&self, f: &dyn Fn(&Expr) -> Result<Expr>) -> Result<Self> {
        f(self)
    }
}

impl CochainValue for Lagrangian {
    fn zero_like(&self) -> Self {
        Lagrangian::zero()
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn map_exprs(&self, f: &dyn Fn(&Expr) -> Result<Expr>) -> Result<Self> {
        Ok(Lagrangian::new(f(self.density())?))
    }
}

impl CochainValue for SourceForm {
    fn zero_like(&self) -> Self {
        SourceForm::new(vec![Expr::zero(); self.components().len()])
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        SourceForm::new(self.components().iter().zip(other.components()).map(|(a, b)| a + b).collect())
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn map_exprs(&self, f: &dyn Fn(&Expr) -> Result<Expr>) -> Result<Self> {
        self.map(f)
    }
}

impl CochainValue for Current {
    fn zero_like(&self) -> Self {
        self.map(|_| Ok(Expr::zero())).expect("constant map cannot fail")
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn map_exprs(&self, f: &dyn Fn(&Expr) -> Result<Expr>) -> Result<Self> {
        self.map(f)
    }
}

impl CochainValue for Form {
    fn zero_like(&self) -> Self {
        self.scale(&Expr::zero())
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn map_exprs(&self, f: &dyn Fn(&Expr) -> Result<Expr>) -> Result<Self> {
        self.map_coefficients(f)
    }
}

/// A `q`-cochain: values on `q`-simplices, each in the coordinates of the
/// simplex's first chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<T> {
    degree: usize,
    values: BTreeMap<Simplex, T>,
}

impl<T: CochainValue> Cochain<T> {
    pub fn new(degree: usize) -> Self {
        Cochain { degree, values: BTreeMap::new() }
    }

    /// 0-cochain with one value per chart.
    pub fn from_charts(cover: &Cover, mut f: impl FnMut(usize) -> Result<T>) -> Result<Self> {
        let mut c = Cochain::new(0);
        for i in 0..cover.charts.len() {
            c.insert(Simplex::vertex(i), f(i)?);
        }
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn insert(&mut self, simplex: Simplex, value: T) {
        assert_eq!(simplex.degree(), self.degree, "simplex degree");
        self.values.insert(simplex, value);
    }

    pub fn get(&self, simplex: &Simplex) -> Option<&T> {
        self.values.get(simplex)
    }

    pub fn chart(&self, i: usize) -> Option<&T> {
        self.values.get(&Simplex::vertex(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, &T)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(CochainValue::is_zero_value)
    }

    /// Simplexwise map.
    pub fn map<U: CochainValue>(&self, mut f: impl FnMut(&Simplex, &T) -> Result<U>) -> Result<Cochain<U>> {
        let mut out = Cochain::new(self.degree);
        for (s, v) in &self.values {
            out.insert(s.clone(), f(s, v)?);
        }
        Ok(out)
    }

    /// Value on `face` re-expressed in the first-chart coordinates of `onto`.
    pub fn restricted(&self, cover: &Cover, face: &Simplex, onto: &Simplex) -> Result<T> {
        let value = self
            .values
            .get(face)
            .ok_or_else(|| Error::TransitionMissing(cover.simplex_label(face)))?;
        let map = cover.transition(face.charts[0], onto.charts[0], onto.component);
        if map.is_empty() {
            return Ok(value.clone());
        }
        value.map_exprs(&|e| e.substitute(&map))
    }
}

/// `(𝔡c)_{i0…i(q+1)} = Σ_k (-1)^k c_{i0…î_k…}` restricted to the component.
pub fn coboundary<T: CochainValue>(c: &Cochain<T>, cover: &Cover) -> Result<Cochain<T>> {
    let q = c.degree();
    let mut out = Cochain::new(q + 1);
    let Some(template) = c.values.values().next() else {
        return Ok(out);
    };
    for simplex in cover.simplices(q + 1) {
        let mut acc = template.zero_like();
        for k in 0..simplex.charts.len() {
            let face = cover.face(&simplex, k);
            let v = c.restricted(cover, &face, &simplex)?;
            acc = if k % 2 == 0 { acc.plus(&v) } else { acc.minus(&v) };
        }
        out.insert(simplex, acc);
    }
    Ok(out)
}

/// Objects with a variational Lie derivative along a vector field.
pub trait LieDerivable: CochainValue {
    fn lie_derive(&self, ctx: &JetContext, field: &VectorField) -> Result<Self>;
}

impl LieDerivable for Lagrangian {
    fn lie_derive(&self, ctx: &JetContext, field: &VectorField) -> Result<Self> {
        lie_derive_lagrangian(ctx, self, field)
    }
}

impl LieDerivable for Current {
    fn lie_derive(&self, ctx: &JetContext, field: &VectorField) -> Result<Self> {
        lie_derive_current(ctx, self, field)
    }
}

impl LieDerivable for SourceForm {
    /// `E(Q^a eta_a)`.
    fn lie_derive(&self, ctx: &JetContext, field: &VectorField) -> Result<Self> {
        let paired = self.pair(&field.characteristic(ctx));
        euler_lagrange(ctx, &Lagrangian::new(paired))
    }
}

/// Chartwise variational Lie derivative of a cochain along a global field.
pub fn lie_derive_cochain<T: LieDerivable>(c: &Cochain<T>, field: &VectorField, cover: &Cover) -> Result<Cochain<T>> {
    let ctx = cover.context();
    cover.check_global_field(&ctx, field)?;
    c.map(|_, v| v.lie_derive(&ctx, field))
}
