//! Exterior forms on jet spaces in the contact basis `(dx^mu, theta^a_I)`.
//!
//! Conventions: basis covectors are sorted with every `dx` before every
//! `theta`, and
//!
//! ```text
//! theta^a_I = dy^a_I - y^a_{I mu} dx^mu
//! d_H theta^a_I = dx^mu ∧ theta^a_{I mu}
//! d_V theta^a_I = 0,  d_V dx^mu = 0
//! ```
//!
//! so that `d = d_H + d_V` and `d_H² = d_V² = d_H d_V + d_V d_H = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::expr::{Expr, JetVar, MultiIndex, Naming};
use crate::jet::JetContext;

/// Element of the contact basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Covector {
    Dx(u8),
    Theta(u8, MultiIndex),
}

impl Covector {
    pub fn is_contact(&self) -> bool {
        matches!(self, Covector::Theta(..))
    }
}

/// Sorts a wedge product of basis covectors; `None` if a factor repeats.
fn sort_wedge(mut factors: Vec<Covector>) -> Option<(Vec<Covector>, bool)> {
    let mut odd = false;
    // insertion sort, counting transpositions
    for i in 1..factors.len() {
        let mut j = i;
        while j > 0 && factors[j - 1] > factors[j] {
            factors.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if factors.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((factors, odd))
}

/// A `p`-form with expression coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    base_dim: usize,
    fiber_dim: usize,
    degree: usize,
    terms: BTreeMap<Vec<Covector>, Expr>,
}

impl Form {
    pub fn zero(ctx: &JetContext, degree: usize) -> Self {
        Form { base_dim: ctx.base_dim, fiber_dim: ctx.fiber_dim, degree, terms: BTreeMap::new() }
    }

    /// A 0-form.
    pub fn function(ctx: &JetContext, f: Expr) -> Self {
        let mut out = Form::zero(ctx, 0);
        out.add_term(Vec::new(), f);
        out
    }

    pub fn dx(ctx: &JetContext, mu: u8) -> Self {
        Form::basis(ctx, vec![Covector::Dx(mu)])
    }

    pub fn theta(ctx: &JetContext, a: u8, idx: MultiIndex) -> Self {
        Form::basis(ctx, vec![Covector::Theta(a, idx)])
    }

    /// `dy^a_I = theta^a_I + y^a_{I mu} dx^mu`.
    pub fn dy(ctx: &JetContext, a: u8, idx: MultiIndex) -> Self {
        let mut out = Form::theta(ctx, a, idx.clone());
        for mu in ctx.base_indices() {
            out.add_term(vec![Covector::Dx(mu)], Expr::var(JetVar::Field(a, idx.with(mu))));
        }
        out
    }

    /// Wedge of the listed covectors (any order), coefficient 1.
    pub fn basis(ctx: &JetContext, factors: Vec<Covector>) -> Self {
        let degree = factors.len();
        let mut out = Form::zero(ctx, degree);
        out.add_signed(factors, Expr::one());
        out
    }

    /// Volume form `omega = dx^0 ∧ … ∧ dx^{n-1}`.
    pub fn volume(ctx: &JetContext) -> Self {
        Form::basis(ctx, ctx.base_indices().map(Covector::Dx).collect())
    }

    /// `omega_mu = ∂_mu ⌟ omega`.
    pub fn volume_minus(ctx: &JetContext, mu: u8) -> Self {
        let factors: Vec<Covector> = ctx.base_indices().filter(|&nu| nu != mu).map(Covector::Dx).collect();
        let mut out = Form::zero(ctx, ctx.base_dim - 1);
        let c = if mu.is_multiple_of(2) { Expr::one() } else { -Expr::one() };
        out.add_term(factors, c);
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.base_dim, self.fiber_dim)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Covector>, &Expr)> {
        self.terms.iter()
    }

    /// Coefficient on a (sorted) basis element.
    pub fn coefficient(&self, factors: &[Covector]) -> Expr {
        self.terms.get(factors).cloned().unwrap_or_default()
    }

    /// Minimum and maximum number of contact factors over the terms.
    pub fn contact_degrees(&self) -> Option<(usize, usize)> {
        let counts = self.terms.keys().map(|f| f.iter().filter(|c| c.is_contact()).count());
        counts.fold(None, |acc, k| match acc {
            None => Some((k, k)),
            Some((lo, hi)) => Some((lo.min(k), hi.max(k))),
        })
    }

    /// Highest jet order among coefficients and contact factors.
    pub fn jet_order(&self) -> usize {
        self.terms
            .iter()
            .map(|(f, c)| {
                let basis = f
                    .iter()
                    .map(|cv| match cv {
                        Covector::Theta(_, i) => i.order(),
                        Covector::Dx(_) => 0,
                    })
                    .max()
                    .unwrap_or(0);
                basis.max(c.jet_order())
            })
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, factors: Vec<Covector>, c: Expr) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(factors).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn add_signed(&mut self, factors: Vec<Covector>, c: Expr) {
        if let Some((sorted, odd)) = sort_wedge(factors) {
            self.add_term(sorted, if odd { -c } else { c });
        }
    }

    fn check_dims(&self, other: &Form) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "forms on (n, m) = {:?} and {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(())
    }

    fn check_same_degree(&self, other: &Form) -> Result<()> {
        self.check_dims(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DimensionMismatch(format!(
                "adding forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Form) -> Result<Form> {
        self.check_same_degree(other)?;
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (f, c) in &other.terms {
            out.add_term(f.clone(), c.clone());
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a function.
    pub fn scale(&self, f: &Expr) -> Form {
        let mut out = Form { terms: BTreeMap::new(), ..self.clone() };
        for (factors, c) in &self.terms {
            out.add_term(factors.clone(), c * f);
        }
        out
    }

    /// Applies a coefficient-wise map.
    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<Form> {
        let mut out = Form { terms: BTreeMap::new(), ..self.clone() };
        for (factors, c) in &self.terms {
            out.add_term(factors.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check_dims(other)?;
        let mut out = Form {
            base_dim: self.base_dim,
            fiber_dim: self.fiber_dim,
            degree: self.degree + other.degree,
            terms: BTreeMap::new(),
        };
        for (f1, c1) in &self.terms {
            for (f2, c2) in &other.terms {
                let factors: Vec<Covector> = f1.iter().chain(f2.iter()).cloned().collect();
                out.add_signed(factors, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Horizontal differential.
    pub fn d_h(&self, ctx: &JetContext) -> Result<Form> {
        let mut out = Form { degree: self.degree + 1, terms: BTreeMap::new(), ..self.clone() };
        for (factors, c) in &self.terms {
            for mu in ctx.base_indices() {
                let dc = ctx.total_derivative(c, mu)?;
                if !dc.is_zero() {
                    let mut f = vec![Covector::Dx(mu)];
                    f.extend(factors.iter().cloned());
                    out.add_signed(f, dc);
                }
            }
            for (k, cv) in factors.iter().enumerate() {
                let Covector::Theta(a, idx) = cv else { continue };
                for mu in ctx.base_indices() {
                    let next = idx.with(mu);
                    if next.order() > ctx.max_order {
                        return Err(Error::MaxOrderExceeded { order: next.order(), cap: ctx.max_order });
                    }
                    let mut f: Vec<Covector> = factors[..k].to_vec();
                    f.push(Covector::Dx(mu));
                    f.push(Covector::Theta(*a, next));
                    f.extend(factors[k + 1..].iter().cloned());
                    let sign = if k % 2 == 0 { c.clone() } else { -c };
                    out.add_signed(f, sign);
                }
            }
        }
        Ok(out)
    }

    /// Vertical differential.
    pub fn d_v(&self) -> Form {
        let mut out = Form { degree: self.degree + 1, terms: BTreeMap::new(), ..self.clone() };
        for (factors, c) in &self.terms {
            for v in c.vars() {
                let JetVar::Field(a, idx) = &v else { continue };
                let dc = c.partial(&v);
                let mut f = vec![Covector::Theta(*a, idx.clone())];
                f.extend(factors.iter().cloned());
                out.add_signed(f, dc);
            }
        }
        out
    }

    /// Projection `h` onto the contact-free summand.
    pub fn horizontalize(&self) -> Form {
        let mut out = self.clone();
        out.terms.retain(|f, _| !f.iter().any(Covector::is_contact));
        out
    }

    /// Interior product with a covector pairing; antiderivation of degree -1.
    pub fn interior(&self, pairing: impl Fn(&Covector) -> Result<Expr>) -> Result<Form> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        let mut out = Form { degree: self.degree - 1, terms: BTreeMap::new(), ..self.clone() };
        for (factors, c) in &self.terms {
            for (k, cv) in factors.iter().enumerate() {
                let p = pairing(cv)?;
                if p.is_zero() {
                    continue;
                }
                let mut rest = factors.clone();
                rest.remove(k);
                let coef = &p * c;
                out.add_term(rest, if k % 2 == 0 { coef } else { -coef });
            }
        }
        Ok(out)
    }

    /// Interior product with the prolongation of `field`:
    /// `dx^mu ↦ xi^mu`, `theta^a_I ↦ D_I(Xi^a - xi^mu y^a_mu)`.
    pub fn contract(&self, ctx: &JetContext, field: &VectorField) -> Result<Form> {
        let q = field.characteristic(ctx);
        self.interior(|cv| match cv {
            Covector::Dx(mu) => Ok(field.horizontal[*mu as usize].clone()),
            Covector::Theta(a, idx) => ctx.total_derivative_multi(&q[*a as usize], idx),
        })
    }

    /// `Xi_H ⌟`: pairs only the `dx` factors.
    pub fn contract_horizontal(&self, field: &VectorField) -> Result<Form> {
        self.interior(|cv| match cv {
            Covector::Dx(mu) => Ok(field.horizontal[*mu as usize].clone()),
            Covector::Theta(..) => Ok(Expr::zero()),
        })
    }

    /// `Xi_V ⌟`: pairs only the contact factors with the evolutionary prolongation.
    pub fn contract_vertical(&self, ctx: &JetContext, field: &VectorField) -> Result<Form> {
        let q = field.characteristic(ctx);
        self.interior(|cv| match cv {
            Covector::Dx(_) => Ok(Expr::zero()),
            Covector::Theta(a, idx) => ctx.total_derivative_multi(&q[*a as usize], idx),
        })
    }

    /// Text serialization `coef * dx0^theta[a;I] + …` with deterministic ordering.
    pub fn display<'a>(&'a self, naming: &'a Naming) -> FormDisplay<'a> {
        FormDisplay { form: self, naming }
    }
}

impl Add<&Form> for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.try_add(rhs).expect("adding forms of matching shape")
    }
}

impl Sub<&Form> for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.try_add(&-rhs).expect("subtracting forms of matching shape")
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(&-Expr::one())
    }
}

pub struct FormDisplay<'a> {
    form: &'a Form,
    naming: &'a Naming,
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return write!(f, "0");
        }
        for (i, (factors, c)) in self.form.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", c.display(self.naming))?;
            if !factors.is_empty() {
                let basis: Vec<String> = factors
                    .iter()
                    .map(|cv| match cv {
                        Covector::Dx(mu) => format!("dx{mu}"),
                        Covector::Theta(a, idx) => {
                            let i: Vec<String> = idx.entries().iter().map(|m| m.to_string()).collect();
                            format!("theta[{a};{}]", i.join(","))
                        }
                    })
                    .collect();
                write!(f, " * {}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

/// A vector field `xi^mu ∂_mu + Xi^a ∂_a` on `Y`, or a generalized field whose
/// vertical components depend on derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    horizontal: Vec<Expr>,
    vertical: Vec<Expr>,
    projectable: bool,
}

impl VectorField {
    /// Horizontal components must depend on base coordinates only.
    pub fn new(ctx: &JetContext, horizontal: Vec<Expr>, vertical: Vec<Expr>) -> Result<Self> {
        if horizontal.len() != ctx.base_dim || vertical.len() != ctx.fiber_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector field with {} horizontal and {} vertical components on n = {}, m = {}",
                horizontal.len(),
                vertical.len(),
                ctx.base_dim,
                ctx.fiber_dim
            )));
        }
        for c in horizontal.iter().chain(vertical.iter()) {
            ctx.check_expr(c)?;
            if c.depends_on(|v| matches!(v, JetVar::Homotopy | JetVar::Test(..))) {
                return Err(Error::InvalidVectorField(format!("auxiliary symbol in `{c}`")));
            }
        }
        if let Some(bad) = horizontal.iter().find(|c| !c.is_base_only()) {
            return Err(Error::InvalidVectorField(format!(
                "horizontal component `{bad}` depends on fiber coordinates"
            )));
        }
        let projectable = vertical.iter().all(|c| c.jet_order() == 0);
        Ok(VectorField { horizontal, vertical, projectable })
    }

    /// Purely vertical (evolutionary) field.
    pub fn vertical(ctx: &JetContext, vertical: Vec<Expr>) -> Result<Self> {
        Self::new(ctx, vec![Expr::zero(); ctx.base_dim], vertical)
    }

    pub fn zero(ctx: &JetContext) -> Self {
        VectorField {
            horizontal: vec![Expr::zero(); ctx.base_dim],
            vertical: vec![Expr::zero(); ctx.fiber_dim],
            projectable: true,
        }
    }

    pub fn horizontal(&self) -> &[Expr] {
        &self.horizontal
    }

    pub fn vertical_components(&self) -> &[Expr] {
        &self.vertical
    }

    pub fn is_projectable(&self) -> bool {
        self.projectable
    }

    pub fn is_zero(&self) -> bool {
        self.horizontal.iter().chain(self.vertical.iter()).all(Expr::is_zero)
    }

    /// Evolutionary characteristic `Q^a = Xi^a - xi^mu y^a_mu`.
    pub fn characteristic(&self, ctx: &JetContext) -> Vec<Expr> {
        self.vertical
            .iter()
            .enumerate()
            .map(|(a, xi_a)| {
                let mut q = xi_a.clone();
                for (mu, xi) in self.horizontal.iter().enumerate() {
                    if !xi.is_zero() {
                        q -= xi * &Expr::var(JetVar::field(a as u8, &[mu as u8]));
                    }
                }
                let _ = ctx;
                q
            })
            .collect()
    }

    /// Prolonged components `Xi^a_I = D_I Q^a + xi^mu y^a_{I mu}` for `|I| <= order`.
    pub fn prolong(&self, ctx: &JetContext, order: usize) -> Result<BTreeMap<(u8, MultiIndex), Expr>> {
        if order + 1 > ctx.max_order {
            return Err(Error::MaxOrderExceeded { order: order + 1, cap: ctx.max_order });
        }
        let q = self.characteristic(ctx);
        let mut out = BTreeMap::new();
        for a in ctx.fiber_indices() {
            for idx in ctx.multi_indices(order) {
                let mut comp = ctx.total_derivative_multi(&q[a as usize], &idx)?;
                for (mu, xi) in self.horizontal.iter().enumerate() {
                    if !xi.is_zero() {
                        comp += xi * &Expr::var(JetVar::Field(a, idx.with(mu as u8)));
                    }
                }
                out.insert((a, idx), comp);
            }
        }
        Ok(out)
    }

    /// `pr Xi_V (f) = Σ D_I Q^a ∂f/∂y^a_I`.
    pub fn apply_evolutionary(&self, ctx: &JetContext, f: &Expr) -> Result<Expr> {
        let q = self.characteristic(ctx);
        let mut out = Expr::zero();
        for v in f.vars() {
            let JetVar::Field(a, idx) = &v else { continue };
            let df = f.partial(&v);
            out += &ctx.total_derivative_multi(&q[*a as usize], idx)? * &df;
        }
        Ok(out)
    }

    /// Full prolonged action `xi^mu ∂_mu f + Σ Xi^a_I ∂f/∂y^a_I`.
    pub fn apply_prolonged(&self, ctx: &JetContext, f: &Expr) -> Result<Expr> {
        let prolonged = self.prolong(ctx, f.jet_order())?;
        let mut out = Expr::zero();
        for (mu, xi) in self.horizontal.iter().enumerate() {
            if !xi.is_zero() {
                out += xi * &f.partial(&JetVar::Base(mu as u8));
            }
        }
        for v in f.vars() {
            let JetVar::Field(a, idx) = &v else { continue };
            out += &prolonged[&(*a, idx.clone())] * &f.partial(&v);
        }
        Ok(out)
    }

    /// Components expressed after a change of chart coordinates.
    pub fn map_components(&self, ctx: &JetContext, f: impl Fn(&Expr) -> Result<Expr>) -> Result<Self> {
        let h = self.horizontal.iter().map(&f).collect::<Result<Vec<_>>>()?;
        let v = self.vertical.iter().map(&f).collect::<Result<Vec<_>>>()?;
        VectorField::new(ctx, h, v)
    }
}
