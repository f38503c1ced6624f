//! Euler–Lagrange and Helmholtz operators, Tonti Lagrangians, momenta and the
//! `d_H`-exactness solver.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::expr::{Expr, JetVar, KernelKind, Monomial, MultiIndex, Rational};
use crate::forms::{Covector, Form};
use crate::jet::JetContext;
use crate::linsolve::solve_combination;

/// Lagrangian class represented by its density `L` (the form is `L·omega`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Lagrangian {
    density: Expr,
}

impl Lagrangian {
    pub fn new(density: Expr) -> Self {
        Lagrangian { density }
    }

    pub fn zero() -> Self {
        Lagrangian::default()
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    pub fn is_zero(&self) -> bool {
        self.density.is_zero()
    }

    pub fn jet_order(&self) -> usize {
        self.density.jet_order()
    }

    pub fn to_form(&self, ctx: &JetContext) -> Form {
        Form::volume(ctx).scale(&self.density)
    }

    /// Reads the density off a horizontal `n`-form.
    pub fn from_form(ctx: &JetContext, form: &Form) -> Result<Self> {
        if form.is_zero() {
            return Ok(Lagrangian::zero());
        }
        if form.degree() != ctx.base_dim || form.contact_degrees() != Some((0, 0)) {
            return Err(Error::DimensionMismatch(format!(
                "expected a horizontal {}-form, got degree {}",
                ctx.base_dim,
                form.degree()
            )));
        }
        let basis: Vec<Covector> = ctx.base_indices().map(Covector::Dx).collect();
        Ok(Lagrangian::new(form.coefficient(&basis)))
    }
}

impl std::ops::Add<&Lagrangian> for &Lagrangian {
    type Output = Lagrangian;
    fn add(self, rhs: &Lagrangian) -> Lagrangian {
        Lagrangian::new(&self.density + &rhs.density)
    }
}

impl std::ops::Sub<&Lagrangian> for &Lagrangian {
    type Output = Lagrangian;
    fn sub(self, rhs: &Lagrangian) -> Lagrangian {
        Lagrangian::new(&self.density - &rhs.density)
    }
}

/// Source form `eta_a theta^a ∧ omega`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SourceForm {
    components: Vec<Expr>,
}

impl SourceForm {
    pub fn new(components: Vec<Expr>) -> Self {
        SourceForm { components }
    }

    pub fn zero(ctx: &JetContext) -> Self {
        SourceForm { components: vec![Expr::zero(); ctx.fiber_dim] }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    pub fn jet_order(&self) -> usize {
        self.components.iter().map(Expr::jet_order).max().unwrap_or(0)
    }

    pub fn to_form(&self, ctx: &JetContext) -> Result<Form> {
        let omega = Form::volume(ctx);
        let mut out = Form::zero(ctx, ctx.base_dim + 1);
        for (a, eta) in self.components.iter().enumerate() {
            let piece = Form::theta(ctx, a as u8, MultiIndex::empty()).wedge(&omega)?.scale(eta);
            out = out.try_add(&piece)?;
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<SourceForm> {
        Ok(SourceForm { components: self.components.iter().map(f).collect::<Result<_>>()? })
    }

    /// Pairing `Σ_a Q^a eta_a` with a characteristic.
    pub fn pair(&self, characteristic: &[Expr]) -> Expr {
        self.components.iter().zip(characteristic).map(|(e, q)| e * q).sum()
    }
}

impl std::ops::Sub<&SourceForm> for &SourceForm {
    type Output = SourceForm;
    fn sub(self, rhs: &SourceForm) -> SourceForm {
        SourceForm::new(self.components.iter().zip(&rhs.components).map(|(a, b)| a - b).collect())
    }
}

/// Current: horizontal `(n-1)`-form `J^mu omega_mu`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Current {
    form: Form,
}

impl Current {
    pub fn new(ctx: &JetContext, form: Form) -> Result<Self> {
        if form.is_zero() {
            return Ok(Current::zero(ctx));
        }
        if ctx.base_dim == 0 || form.degree() + 1 != ctx.base_dim || form.contact_degrees() != Some((0, 0)) {
            return Err(Error::DimensionMismatch(format!(
                "a current is a horizontal {}-form, got degree {}",
                ctx.base_dim.saturating_sub(1),
                form.degree()
            )));
        }
        Ok(Current { form })
    }

    pub fn zero(ctx: &JetContext) -> Self {
        Current { form: Form::zero(ctx, ctx.base_dim.saturating_sub(1)) }
    }

    /// `Σ_mu J^mu omega_mu`.
    pub fn from_components(ctx: &JetContext, components: &[Expr]) -> Result<Self> {
        if components.len() != ctx.base_dim {
            return Err(Error::DimensionMismatch(format!(
                "{} current components for n = {}",
                components.len(),
                ctx.base_dim
            )));
        }
        let mut form = Form::zero(ctx, ctx.base_dim - 1);
        for (mu, j) in components.iter().enumerate() {
            form = form.try_add(&Form::volume_minus(ctx, mu as u8).scale(j))?;
        }
        Ok(Current { form })
    }

    /// The components `J^mu`.
    pub fn components(&self, ctx: &JetContext) -> Vec<Expr> {
        ctx.base_indices()
            .map(|mu| {
                let basis = Form::volume_minus(ctx, mu);
                let (factors, sign) = basis.terms().next().expect("nonzero basis");
                &self.form.coefficient(factors) * sign
            })
            .collect()
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    /// `d_H nu` as a Lagrangian: the divergence `D_mu J^mu`.
    pub fn d_h(&self, ctx: &JetContext) -> Result<Lagrangian> {
        Lagrangian::from_form(ctx, &self.form.d_h(ctx)?)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<Current> {
        Ok(Current { form: self.form.map_coefficients(f)? })
    }
}

impl std::ops::Add<&Current> for &Current {
    type Output = Current;
    fn add(self, rhs: &Current) -> Current {
        Current { form: &self.form + &rhs.form }
    }
}

impl std::ops::Sub<&Current> for &Current {
    type Output = Current;
    fn sub(self, rhs: &Current) -> Current {
        Current { form: &self.form - &rhs.form }
    }
}

/// Field coordinates `y^a_I` occurring in `e`.
fn field_vars(e: &Expr) -> Vec<(u8, MultiIndex)> {
    e.vars()
        .into_iter()
        .filter_map(|v| match v {
            JetVar::Field(a, i) => Some((a, i)),
            _ => None,
        })
        .collect()
}

fn sign(order: usize) -> Expr {
    if order.is_multiple_of(2) {
        Expr::one()
    } else {
        -Expr::one()
    }
}

/// `E_a = Σ_I (-1)^{|I|} D_I ∂L/∂y^a_I`.
pub fn euler_lagrange(ctx: &JetContext, lagrangian: &Lagrangian) -> Result<SourceForm> {
    let l = lagrangian.density();
    ctx.check_expr(l)?;
    let mut out = vec![Expr::zero(); ctx.fiber_dim];
    for (a, idx) in field_vars(l) {
        let dl = l.partial(&JetVar::Field(a, idx.clone()));
        out[a as usize] += ctx.total_derivative_multi(&dl, &idx)? * sign(idx.order());
    }
    Ok(SourceForm::new(out))
}

/// Outcome of the Helmholtz check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelmholtzReport {
    pub is_locally_variational: bool,
    /// `L_eta[v]_a - L*_eta[v]_a` in the formal test fields `v`.
    pub residuals: Vec<Expr>,
}

/// Compares the linearization of `eta` with its formal adjoint.
pub fn helmholtz_check(ctx: &JetContext, eta: &SourceForm) -> Result<HelmholtzReport> {
    let m = ctx.fiber_dim;
    let mut residuals = vec![Expr::zero(); m];
    for (b, eta_b) in eta.components().iter().enumerate() {
        ctx.check_expr(eta_b)?;
        for (a, idx) in field_vars(eta_b) {
            let d = eta_b.partial(&JetVar::Field(a, idx.clone()));
            // linearization of eta_b in direction v^a_I
            residuals[b] += &d * &Expr::var(JetVar::Test(a, idx.clone()));
            // adjoint contribution to component a
            let adj = &d * &Expr::var(JetVar::Test(b as u8, MultiIndex::empty()));
            residuals[a as usize] -= ctx.total_derivative_multi(&adj, &idx)? * sign(idx.order());
        }
    }
    let ok = residuals.iter().all(Expr::is_zero);
    Ok(HelmholtzReport { is_locally_variational: ok, residuals })
}

/// Fiber-radial homotopy Lagrangian about `center`
/// `L = Σ_a (y^a - c^a) ∫₀¹ eta_a(x, c + t(y - c), t y_I) dt`, verified by `E(L) = eta`.
pub fn tonti_lagrangian(ctx: &JetContext, eta: &SourceForm, center: &[Expr]) -> Result<Lagrangian> {
    if center.len() != ctx.fiber_dim || eta.components().len() != ctx.fiber_dim {
        return Err(Error::DimensionMismatch("Tonti center or source form size".into()));
    }
    if !helmholtz_check(ctx, eta)?.is_locally_variational {
        return Err(Error::NotLocallyVariational);
    }
    let t = Expr::var(JetVar::Homotopy);
    let homotopy = |v: &JetVar| -> Option<Expr> {
        match v {
            JetVar::Field(a, idx) if idx.order() == 0 => {
                let c = &center[*a as usize];
                Some(c + &(&t * &(&Expr::var(v.clone()) - c)))
            }
            JetVar::Field(..) => Some(&t * &Expr::var(v.clone())),
            _ => None,
        }
    };
    let mut density = Expr::zero();
    for (a, eta_a) in eta.components().iter().enumerate() {
        if eta_a.is_zero() {
            continue;
        }
        let along = eta_a.substitute_with(&homotopy)?;
        let integral = along.integrate_homotopy()?;
        density += &(&Expr::field(a as u8, &[]) - &center[a]) * &integral;
    }
    let lagrangian = Lagrangian::new(density);
    if &euler_lagrange(ctx, &lagrangian)? != eta {
        return Err(Error::NotLocallyVariational);
    }
    Ok(lagrangian)
}

/// Symmetrized second-order coefficient `P^{mu nu}`.
fn second_order_coefficient(l: &Expr, a: u8, mu: u8, nu: u8) -> Expr {
    let d = l.partial(&JetVar::field(a, &[mu, nu]));
    if mu == nu {
        d
    } else {
        d * Expr::rat(1, 2)
    }
}

/// Momentum form `p` of a Lagrangian of order at most 2, normalized so that
/// `d_V lambda + d_H p = E_a theta^a ∧ omega`.
pub fn momenta(ctx: &JetContext, lagrangian: &Lagrangian) -> Result<Form> {
    let l = lagrangian.density();
    let order = l.jet_order();
    if order > 2 {
        return Err(Error::OrderTooHigh(order));
    }
    let mut out = Form::zero(ctx, ctx.base_dim);
    for a in ctx.fiber_indices() {
        for mu in ctx.base_indices() {
            let omega_mu = Form::volume_minus(ctx, mu);
            let mut first = l.partial(&JetVar::field(a, &[mu]));
            for nu in ctx.base_indices() {
                let p = second_order_coefficient(l, a, mu, nu);
                if p.is_zero() {
                    continue;
                }
                first -= ctx.total_derivative(&p, nu)?;
                let theta_nu = Form::theta(ctx, a, MultiIndex::new(&[nu]));
                out = out.try_add(&theta_nu.wedge(&omega_mu)?.scale(&p))?;
            }
            if !first.is_zero() {
                let theta = Form::theta(ctx, a, MultiIndex::empty());
                out = out.try_add(&theta.wedge(&omega_mu)?.scale(&first))?;
            }
        }
    }
    Ok(out)
}

/// Bounds of the ansatz space used by [`solve_dh_exact`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub max_poly_degree: usize,
    pub max_jet_order: usize,
    pub include_kernels_from_target: bool,
    /// Coordinates that may appear only linearly outside kernels (chart angles).
    pub angle_coordinates: Vec<JetVar>,
}

impl Default for AnsatzSpec {
    fn default() -> Self {
        AnsatzSpec {
            max_poly_degree: 4,
            max_jet_order: 2,
            include_kernels_from_target: true,
            angle_coordinates: Vec::new(),
        }
    }
}

impl AnsatzSpec {
    pub fn with_angles(mut self, angles: Vec<JetVar>) -> Self {
        self.angle_coordinates = angles;
        self
    }
}

/// Upper bound on the number of ansatz functions tried in one solve.
const MAX_ANSATZ: usize = 60_000;

fn weight(m: &Monomial) -> i32 {
    m.vars().iter().filter(|(v, _)| v.is_field()).map(|(v, k)| v.order() as i32 * k).sum()
}

fn multisets<T: Clone>(pool: &[T], max_size: usize, allowed: &impl Fn(&[T]) -> bool) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<(usize, Vec<T>)> = vec![(0, Vec::new())];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for (start, items) in &layer {
            for (i, v) in pool.iter().enumerate().skip(*start) {
                let mut grown = items.clone();
                grown.push(v.clone());
                if allowed(&grown) {
                    next.push((i, grown));
                }
            }
        }
        out.extend(next.iter().map(|(_, v)| v.clone()));
        layer = next;
    }
    out
}

fn product_expr(vars: &[JetVar]) -> Expr {
    vars.iter().fold(Expr::one(), |acc, v| acc * Expr::var(v.clone()))
}

/// Kernel signatures near the kernel part `k`: per argument, sin powers
/// `s-1..=s+1` times cos powers `{0,1}`; exp factors kept.
fn kernel_variations(k: &Monomial) -> Result<Vec<Expr>> {
    let mut by_arg: BTreeMap<Expr, (u32, u32)> = BTreeMap::new();
    let mut fixed = Expr::one();
    for (kern, p) in k.kernels() {
        match kern.kind() {
            KernelKind::Sin => by_arg.entry(kern.arg().clone()).or_default().0 = *p,
            KernelKind::Cos => by_arg.entry(kern.arg().clone()).or_default().1 = *p,
            KernelKind::Exp => fixed = fixed * Expr::exp(kern.arg())?.pow(*p as i32)?,
        }
    }
    let mut out = vec![fixed];
    if by_arg.len() > 2 {
        return Ok(vec![Expr::term(k.clone(), Rational::from_integer(1.into()))]);
    }
    for (arg, (s, _)) in by_arg {
        let sin = Expr::sin(&arg)?;
        let cos = Expr::cos(&arg)?;
        let mut options = Vec::new();
        for s2 in s.saturating_sub(1)..=s + 1 {
            for c2 in 0..=1 {
                options.push(sin.pow(s2 as i32)? * cos.pow(c2)?);
            }
        }
        out = out.iter().flat_map(|a| options.iter().map(move |b| a * b)).collect();
    }
    Ok(out)
}

struct TargetStats {
    order: usize,
    fields: BTreeSet<u8>,
    field_degree: i32,
    base_degree: i32,
    weights: Option<BTreeSet<i32>>,
    params: BTreeSet<Monomial>,
    kernels: BTreeSet<Monomial>,
}

fn target_stats(target: &Form) -> TargetStats {
    let mut s = TargetStats {
        order: target.jet_order(),
        fields: BTreeSet::new(),
        field_degree: 0,
        base_degree: 0,
        weights: Some(BTreeSet::new()),
        params: [Monomial::one()].into(),
        kernels: [Monomial::one()].into(),
    };
    for (_, c) in target.terms() {
        for v in c.vars() {
            if let JetVar::Field(a, _) = v {
                s.fields.insert(a);
            }
        }
        for (m, _) in c.terms() {
            s.field_degree = s.field_degree.max(m.degree_in(JetVar::is_field));
            s.base_degree = s.base_degree.max(m.degree_in(|v| matches!(v, JetVar::Base(_))));
            s.params.insert(m.vars_only(JetVar::is_constant));
            s.kernels.insert(m.kernel_part());
            let derivative_in_kernel = m
                .kernels()
                .iter()
                .any(|(k, _)| k.arg().depends_on(|v| v.is_field() && v.order() > 0));
            if derivative_in_kernel {
                s.weights = None;
            }
            if let Some(w) = s.weights.as_mut() {
                w.insert(weight(m));
            }
        }
    }
    s
}

fn ansatz_functions(ctx: &JetContext, target: &Form, spec: &AnsatzSpec) -> Result<Vec<Expr>> {
    let stats = target_stats(target);
    let mut pool: Vec<JetVar> = Vec::new();
    if stats.order >= 1 {
        let order = (stats.order - 1).min(spec.max_jet_order);
        for &a in &stats.fields {
            for idx in ctx.multi_indices(order) {
                pool.push(JetVar::Field(a, idx));
            }
        }
    }
    let field_degree = (stats.field_degree.max(0) as usize).min(spec.max_poly_degree);
    let angles = &spec.angle_coordinates;
    let field_parts = multisets(&pool, field_degree, &|items: &[JetVar]| {
        let last = items.last().expect("nonempty");
        !(angles.contains(last) && items.iter().filter(|v| *v == last).count() > 1)
    });
    let base: Vec<JetVar> = ctx.base_indices().map(JetVar::Base).collect();
    let base_degree = (stats.base_degree.max(0) as usize + 1).min(spec.max_poly_degree);
    let base_parts = multisets(&base, base_degree, &|_: &[JetVar]| true);

    let mut kernel_parts: BTreeSet<Expr> = [Expr::one()].into();
    if spec.include_kernels_from_target {
        for k in &stats.kernels {
            kernel_parts.extend(kernel_variations(k)?);
        }
    }
    let params: Vec<Expr> = stats.params.iter().map(|m| Expr::term(m.clone(), Rational::from_integer(1.into()))).collect();

    let weight_window = stats.weights.as_ref().and_then(|ws| {
        let (lo, hi) = (*ws.iter().next()?, *ws.iter().next_back()?);
        Some((lo - 1 - base_degree as i32, hi))
    });
    let mut out: BTreeSet<Expr> = BTreeSet::new();
    for f in &field_parts {
        let fe = product_expr(f);
        let w = fe.terms().next().map(|(m, _)| weight(m)).unwrap_or(0);
        for b in &base_parts {
            let be = product_expr(b);
            for k in &kernel_parts {
                let has_base = !b.is_empty() || k.depends_on(|v| matches!(v, JetVar::Base(_)));
                if let Some((lo, hi)) = weight_window {
                    // D_mu raises the weight by one, d/dx^mu keeps it; each
                    // explicit base factor allows one more cancelling step down
                    let top = if has_base { hi } else { hi - 1 };
                    if w < lo || w > top {
                        continue;
                    }
                }
                let core = &(&fe * &be) * k;
                for p in &params {
                    out.insert(&core * p);
                    if out.len() > MAX_ANSATZ {
                        return Err(Error::NoSolution(out.len()));
                    }
                }
            }
        }
    }
    Ok(out.into_iter().filter(|e| !e.is_zero()).collect())
}

type CoefficientKey = (Vec<Covector>, Monomial);

fn sparse(form: &Form) -> BTreeMap<CoefficientKey, Rational> {
    let mut out = BTreeMap::new();
    for (factors, c) in form.terms() {
        for (m, k) in c.terms() {
            out.insert((factors.clone(), m.clone()), k.clone());
        }
    }
    out
}

fn subsets(items: &[Covector], size: usize) -> Vec<Vec<Covector>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], size - 1) {
            rest.insert(0, first.clone());
            out.push(rest);
        }
    }
    out
}

/// Finds a horizontal `(k-1)`-form `nu` with `d_H nu = target` by exact linear
/// algebra over a bounded ansatz space.
pub fn solve_dh_exact(ctx: &JetContext, target: &Form, spec: &AnsatzSpec) -> Result<Form> {
    let k = target.degree();
    if k == 0 {
        return Err(Error::DimensionMismatch("a 0-form has no d_H preimage".into()));
    }
    if target.contact_degrees().is_some_and(|(_, hi)| hi > 0) {
        return Err(Error::DimensionMismatch("exactness solver expects a horizontal form".into()));
    }
    if target.is_zero() {
        return Ok(Form::zero(ctx, k - 1));
    }
    if k == ctx.base_dim {
        let e = euler_lagrange(ctx, &Lagrangian::from_form(ctx, target)?)?;
        if !e.is_zero() {
            let shown: Vec<String> = e.components().iter().map(|c| c.to_string()).collect();
            return Err(Error::NotClosed(format!("Euler-Lagrange expressions [{}]", shown.join(", "))));
        }
    } else {
        let d = target.d_h(ctx)?;
        if !d.is_zero() {
            return Err(Error::NotClosed(format!("d_H of target has {} terms", d.terms().count())));
        }
    }

    let functions = ansatz_functions(ctx, target, spec)?;
    let dx: Vec<Covector> = ctx.base_indices().map(Covector::Dx).collect();
    let bases = subsets(&dx, k - 1);
    let mut candidates = Vec::with_capacity(functions.len() * bases.len());
    let mut images = Vec::with_capacity(functions.len() * bases.len());
    for b in &bases {
        for f in &functions {
            let nu = Form::basis(ctx, b.clone()).scale(f);
            images.push(sparse(&nu.d_h(ctx)?));
            candidates.push(nu);
        }
    }
    let size = candidates.len();
    let weights = solve_combination(&images, &sparse(target)).ok_or(Error::NoSolution(size))?;
    let mut nu = Form::zero(ctx, k - 1);
    for (cand, w) in candidates.iter().zip(&weights) {
        if !num_traits::Zero::is_zero(w) {
            nu = nu.try_add(&cand.scale(&Expr::constant(w.clone())))?;
        }
    }
    if &nu.d_h(ctx)? != target {
        return Err(Error::NoSolution(size));
    }
    Ok(nu)
}

/// `d_H`-potential of a Lagrangian: a current `nu` with `d_H nu = lambda`.
pub fn solve_current(ctx: &JetContext, lagrangian: &Lagrangian, spec: &AnsatzSpec) -> Result<Current> {
    let nu = solve_dh_exact(ctx, &lagrangian.to_form(ctx), spec)?;
    Current::new(ctx, nu)
}
