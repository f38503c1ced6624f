//! Variational Lie derivatives, Noether and strong Noether currents, on-shell
//! reduction and the chartwise verifiers for the symmetry lemmas.

use std::collections::{BTreeMap, BTreeSet};

use crate::cech::{coboundary, connecting_delta, connecting_delta_prime, Cochain, Cover, LieDerivable, Simplex};
use crate::error::{Error, Result};
use crate::expr::{Expr, JetVar, Monomial, MultiIndex, Naming, Rational};
use crate::forms::VectorField;
use crate::jet::JetContext;
use crate::linsolve::solve_combination;
use crate::report::Report;
use crate::varseq::{
    euler_lagrange, helmholtz_check, momenta, solve_current, solve_dh_exact, tonti_lagrangian, AnsatzSpec, Current,
    Lagrangian, SourceForm,
};

/// `L_Xi lambda = (pr Xi_V L + D_mu(xi^mu L)) omega`.
pub fn lie_derive_lagrangian(ctx: &JetContext, lagrangian: &Lagrangian, field: &VectorField) -> Result<Lagrangian> {
    let l = lagrangian.density();
    let mut out = field.apply_evolutionary(ctx, l)?;
    for (mu, xi) in field.horizontal().iter().enumerate() {
        if !xi.is_zero() {
            out += ctx.total_derivative(&(xi * l), mu as u8)?;
        }
    }
    Ok(Lagrangian::new(out))
}

/// `Xi_H ⌟ d_H nu + Xi_V ⌟ d_V nu`.
pub fn lie_derive_current(ctx: &JetContext, current: &Current, field: &VectorField) -> Result<Current> {
    let nu = current.form();
    let horizontal = nu.d_h(ctx)?.contract_horizontal(field)?;
    let vertical = nu.d_v().contract_vertical(ctx, field)?;
    Current::new(ctx, horizontal.try_add(&vertical)?)
}

/// `E(Xi_V ⌟ eta)`, after checking that `lambda_local` is a Lagrangian for `eta`.
pub fn lie_derive_source(
    ctx: &JetContext,
    eta: &SourceForm,
    lambda_local: &Lagrangian,
    field: &VectorField,
) -> Result<SourceForm> {
    if &euler_lagrange(ctx, lambda_local)? != eta {
        return Err(Error::InconsistentPair);
    }
    eta.lie_derive(ctx, field)
}

/// Noether current `epsilon = Xi_V ⌟ p + xi ⌟ lambda`.
pub fn noether_current(ctx: &JetContext, lagrangian: &Lagrangian, field: &VectorField) -> Result<Current> {
    let p = momenta(ctx, lagrangian)?;
    let vertical = p.contract_vertical(ctx, field)?;
    let horizontal = lagrangian.to_form(ctx).contract_horizontal(field)?;
    Current::new(ctx, vertical.try_add(&horizontal)?)
}

/// Outcome of a symmetry check on a source form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub is_lagrangian_symmetry: bool,
    pub is_generalized_symmetry: bool,
    /// `zeta` with `L_Xi lambda = d_H zeta`.
    pub zeta: Option<Current>,
    /// `nu` with `Xi_V ⌟ eta = d_H nu`.
    pub nu: Option<Current>,
    /// Helmholtz residuals if the source form is not locally variational,
    /// otherwise the components of `E(Xi_V ⌟ eta)`.
    pub residuals: Vec<Expr>,
    pub notes: Vec<String>,
}

/// Decides whether `field` is a generalized symmetry of `eta`, exhibits the
/// potential `nu` and, if a Lagrangian is given or can be built, whether it is
/// a Lagrangian symmetry.
pub fn check_generalized_symmetry(
    ctx: &JetContext,
    eta: &SourceForm,
    field: &VectorField,
    lagrangian: Option<&Lagrangian>,
    spec: &AnsatzSpec,
) -> Result<SymmetryReport> {
    let mut report = SymmetryReport {
        is_lagrangian_symmetry: false,
        is_generalized_symmetry: false,
        zeta: None,
        nu: None,
        residuals: Vec::new(),
        notes: Vec::new(),
    };
    let helmholtz = helmholtz_check(ctx, eta)?;
    if !helmholtz.is_locally_variational {
        report.residuals = helmholtz.residuals;
        report.notes.push("source form is not locally variational".into());
        return Ok(report);
    }
    let pairing = Lagrangian::new(eta.pair(&field.characteristic(ctx)));
    let variation = euler_lagrange(ctx, &pairing)?;
    report.residuals = variation.components().to_vec();
    report.is_generalized_symmetry = variation.is_zero();
    if !report.is_generalized_symmetry {
        return Ok(report);
    }
    match solve_current(ctx, &pairing, spec) {
        Ok(nu) => report.nu = Some(nu),
        Err(e) => report.notes.push(format!("no potential for Xi_V ⌟ eta: {e}")),
    }

    let local = match lagrangian {
        Some(l) => Some(l.clone()),
        None => tonti_lagrangian(ctx, eta, &vec![Expr::zero(); ctx.fiber_dim]).ok(),
    };
    match local {
        Some(l) => {
            let varied = lie_derive_lagrangian(ctx, &l, field)?;
            match solve_current(ctx, &varied, spec) {
                Ok(zeta) => {
                    report.is_lagrangian_symmetry = true;
                    report.zeta = Some(zeta);
                }
                Err(Error::NotClosed(_)) => {}
                Err(e) => report.notes.push(format!("no potential for L_Xi lambda: {e}")),
            }
        }
        None => report.notes.push("no local Lagrangian available".into()),
    }
    Ok(report)
}

/// Strong Noether current `nu + epsilon` with `d_H(nu + epsilon) = L_Xi lambda`.
pub fn strong_noether_current(
    ctx: &JetContext,
    lagrangian: &Lagrangian,
    eta: &SourceForm,
    field: &VectorField,
    spec: &AnsatzSpec,
) -> Result<Current> {
    if &euler_lagrange(ctx, lagrangian)? != eta {
        return Err(Error::InconsistentPair);
    }
    let report = check_generalized_symmetry(ctx, eta, field, Some(lagrangian), spec)?;
    let nu = report.nu.ok_or_else(|| {
        Error::MissingCertificate(if report.is_generalized_symmetry {
            report.notes.join("; ")
        } else {
            "not a generalized symmetry".into()
        })
    })?;
    Ok(&nu + &noether_current(ctx, lagrangian, field)?)
}

/// A leading-derivative rule `y^a_I ↦ f`.
#[derive(Clone, Debug)]
struct LeadRule {
    field: u8,
    index: MultiIndex,
    value: Expr,
}

fn leading_rules(ctx: &JetContext, eta: &SourceForm) -> Result<Vec<LeadRule>> {
    let mut rules: Vec<LeadRule> = Vec::new();
    for (k, eq) in eta.components().iter().enumerate() {
        if eq.is_zero() {
            continue;
        }
        let mut fields: Vec<JetVar> = eq.vars().into_iter().filter(JetVar::is_field).collect();
        fields.sort_by_key(|v| std::cmp::Reverse((v.order(), v.clone())));
        let mut found = None;
        for v in fields {
            let JetVar::Field(a, idx) = &v else { continue };
            let collected = eq.collect_powers(&v);
            if collected.keys().any(|&p| p != 0 && p != 1) || !collected.contains_key(&1) {
                continue;
            }
            let coef = &collected[&1];
            let rest = collected.get(&0).cloned().unwrap_or_default();
            if coef.contains_var(&v) || rest.contains_var(&v) {
                continue;
            }
            let Ok(inv) = coef.inverse() else { continue };
            let value = -(&rest * &inv);
            let clash = value.vars().iter().any(|w| match w {
                JetVar::Field(b, j) => {
                    (*b == *a && j.difference(idx).is_some())
                        || rules.iter().any(|r| r.field == *b && j.difference(&r.index).is_some())
                }
                _ => false,
            });
            if clash || rules.iter().any(|r| r.field == *a && (idx.difference(&r.index).is_some() || r.index.difference(idx).is_some())) {
                continue;
            }
            found = Some(LeadRule { field: *a, index: idx.clone(), value });
            break;
        }
        match found {
            Some(rule) => rules.push(rule),
            None => return Err(Error::NotSolvableForLeading(k)),
        }
    }
    let _ = ctx;
    Ok(rules)
}

/// Reduces `e` modulo the equations `eta = 0` and their total-derivative
/// consequences by substituting leading derivatives until a fixpoint.
pub fn on_shell_reduce(ctx: &JetContext, e: &Expr, eta: &SourceForm) -> Result<Expr> {
    let rules = leading_rules(ctx, eta)?;
    let mut current = e.clone();
    for _ in 0..64 {
        let mut replacement: BTreeMap<JetVar, Expr> = BTreeMap::new();
        for v in current.vars() {
            let JetVar::Field(a, idx) = &v else { continue };
            for r in &rules {
                if r.field != *a {
                    continue;
                }
                if let Some(rest) = idx.difference(&r.index) {
                    replacement.insert(v.clone(), ctx.total_derivative_multi(&r.value, &rest)?);
                    break;
                }
            }
        }
        if replacement.is_empty() {
            return Ok(current);
        }
        current = current.substitute(&replacement)?;
    }
    Err(Error::NotSolvableForLeading(0))
}

/// How an on-shell verdict was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnShell {
    pub vanishes: bool,
    pub method: &'static str,
    pub residual: Expr,
}

/// Decides whether `e` vanishes on solutions of `eta = 0`: by leading-derivative
/// reduction when the equations allow it, otherwise by finding `e` in the span
/// of `C · D_I eta_a` over a bounded multiplier ansatz.
pub fn vanishes_on_shell(ctx: &JetContext, e: &Expr, eta: &SourceForm, spec: &AnsatzSpec) -> Result<OnShell> {
    if e.is_zero() {
        return Ok(OnShell { vanishes: true, method: "identity", residual: Expr::zero() });
    }
    match on_shell_reduce(ctx, e, eta) {
        Ok(r) => return Ok(OnShell { vanishes: r.is_zero(), method: "leading-derivative", residual: r }),
        Err(Error::NotSolvableForLeading(_)) => {}
        Err(err) => return Err(err),
    }
    // the residual is `e` minus the best combination found: zero or `e` itself
    let found = combination_of_equations(ctx, e, eta, spec)?;
    let residual = if found { Expr::zero() } else { e.clone() };
    Ok(OnShell { vanishes: found, method: "ansatz", residual })
}

fn combination_of_equations(ctx: &JetContext, e: &Expr, eta: &SourceForm, spec: &AnsatzSpec) -> Result<bool> {
    let order = e.jet_order();
    let mut fields: BTreeSet<u8> = BTreeSet::new();
    for v in e.vars() {
        if let JetVar::Field(a, _) = v {
            fields.insert(a);
        }
    }
    let mut atoms: Vec<Expr> = Vec::new();
    for &a in &fields {
        for idx in ctx.multi_indices(order.min(spec.max_jet_order).min(1)) {
            atoms.push(Expr::var(JetVar::Field(a, idx)));
        }
    }
    let mut kernels: BTreeSet<Expr> = [Expr::one()].into();
    let mut params: BTreeSet<Expr> = [Expr::one()].into();
    for (m, _) in e.terms() {
        kernels.insert(Expr::term(m.kernel_part(), Rational::from_integer(1.into())));
        params.insert(Expr::term(m.vars_only(JetVar::is_constant), Rational::from_integer(1.into())));
    }
    let mut polys: BTreeSet<Expr> = [Expr::one()].into();
    for (i, x) in atoms.iter().enumerate() {
        polys.insert(x.clone());
        for y in &atoms[i..] {
            polys.insert(x * y);
        }
    }
    let mut multipliers: BTreeSet<Expr> = BTreeSet::new();
    for p in &polys {
        for k in &kernels {
            for c in &params {
                multipliers.insert(&(p * k) * c);
            }
        }
    }
    let mut images: Vec<BTreeMap<Monomial, Rational>> = Vec::new();
    for eq in eta.components() {
        if eq.is_zero() {
            continue;
        }
        let extra = order.saturating_sub(eq.jet_order());
        for idx in ctx.multi_indices(extra) {
            let d = match ctx.total_derivative_multi(eq, &idx) {
                Ok(d) => d,
                Err(Error::MaxOrderExceeded { .. }) => continue,
                Err(err) => return Err(err),
            };
            for m in &multipliers {
                let prod = m * &d;
                images.push(prod.terms().map(|(mm, c)| (mm.clone(), c.clone())).collect());
            }
        }
    }
    let target: BTreeMap<Monomial, Rational> = e.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    Ok(solve_combination(&images, &target).is_some())
}

/// Options shared by the lemma verifiers.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub spec: AnsatzSpec,
    pub quad_nodes: usize,
    pub tolerance: f64,
    pub params: BTreeMap<String, f64>,
    pub naming: Naming,
}

impl VerifyOptions {
    pub fn new(naming: Naming) -> Self {
        VerifyOptions {
            spec: AnsatzSpec::default(),
            quad_nodes: crate::cech::DEFAULT_QUAD_NODES,
            tolerance: crate::cech::PERIOD_TOLERANCE,
            params: BTreeMap::new(),
            naming,
        }
    }

    fn chart_spec(&self, cover: &Cover) -> AnsatzSpec {
        AnsatzSpec { angle_coordinates: cover.angle_vars(), ..self.spec.clone() }
    }

    fn show(&self, e: &Expr) -> String {
        e.display(&self.naming).to_string()
    }

    fn show_all(&self, es: &[Expr]) -> String {
        let parts: Vec<String> = es.iter().map(|e| self.show(e)).collect();
        format!("[{}]", parts.join(", "))
    }

    fn show_current(&self, ctx: &JetContext, c: &Current) -> String {
        self.show_all(&c.components(ctx))
    }
}

fn chart_scope(cover: &Cover, i: usize) -> String {
    format!("chart {}", cover.charts[i].name)
}

fn overlap_scope(cover: &Cover, s: &Simplex) -> String {
    format!("overlap {}", cover.simplex_label(s))
}

/// Chart-level class test: a Lagrangian vanishes as a class iff its
/// Euler–Lagrange expressions vanish.
fn class_residual(ctx: &JetContext, l: &Lagrangian) -> Result<SourceForm> {
    euler_lagrange(ctx, l)
}

/// Checks on a Lagrangian cochain that Lie derivatives commute with `d_H`
/// and `E` and send the connecting classes to zero.
pub fn verify_lemma1(
    cover: &Cover,
    lagrangians: &Cochain<Lagrangian>,
    field: &VectorField,
    opts: &VerifyOptions,
) -> Result<Report> {
    let ctx = cover.context();
    cover.check_global_field(&ctx, field)?;
    let spec = opts.chart_spec(cover);
    let mut report = Report::new("verify-lemma1");

    let mut locally_exact = true;
    for (s, l) in lagrangians.iter() {
        let i = s.charts[0];
        let scope = chart_scope(cover, i);
        let eta = euler_lagrange(&ctx, l)?;
        let varied = lie_derive_lagrangian(&ctx, l, field)?;
        let lhs = eta.lie_derive(&ctx, field)?;
        let rhs = euler_lagrange(&ctx, &varied)?;
        let diff = &lhs - &rhs;
        report.check(&scope, "L_Xi E(lambda) - E(L_Xi lambda)", opts.show_all(diff.components()), diff.is_zero());
        if eta.is_zero() {
            let nu = solve_current(&ctx, l, &spec)?;
            let lhs = lie_derive_lagrangian(&ctx, &nu.d_h(&ctx)?, field)?;
            let rhs = lie_derive_current(&ctx, &nu, field)?.d_h(&ctx)?;
            let diff = &lhs - &rhs;
            report.info(&scope, "nu with d_H nu = lambda", opts.show_current(&ctx, &nu));
            report.check(&scope, "L_Xi d_H nu - d_H(L_Xi nu)", opts.show(diff.density()), diff.is_zero());
        } else {
            locally_exact = false;
        }
    }

    let varied = crate::cech::lie_derive_cochain(lagrangians, field, cover)?;
    if locally_exact {
        let before = connecting_delta_prime(lagrangians, cover, &spec, opts.quad_nodes, &opts.params, opts.tolerance)?;
        for (name, p) in &before.periods {
            report.info(format!("cycle {name}"), "delta' period of lambda", format!("{p:.12}"));
        }
        let after = connecting_delta_prime(&varied, cover, &spec, opts.quad_nodes, &opts.params, opts.tolerance)?;
        for (name, p) in &after.periods {
            report.check(format!("cycle {name}"), "delta' period of L_Xi lambda", format!("{p:.12}"), p.abs() <= opts.tolerance);
        }
    } else {
        let eta = lagrangians.map(|_, l| euler_lagrange(&ctx, l))?;
        let varied_eta = crate::cech::lie_derive_cochain(&eta, field, cover)?;
        let before = connecting_delta(&eta, Some(lagrangians), cover, &spec, opts.quad_nodes, &opts.params, opts.tolerance)?;
        for (name, p) in &before.periods {
            report.info(format!("cycle {name}"), "delta period of eta", format!("{p:.12}"));
        }
        let after = connecting_delta(&varied_eta, Some(&varied), cover, &spec, opts.quad_nodes, &opts.params, opts.tolerance)?;
        for (name, p) in &after.periods {
            report.check(format!("cycle {name}"), "delta period of L_Xi eta", format!("{p:.12}"), p.abs() <= opts.tolerance);
        }
    }
    Ok(report)
}

/// Per-chart strong Noether currents `beta_i = nu_i + epsilon_i`, reporting
/// the symmetry hypotheses on the way. `None` where no certificate exists.
fn strong_currents(
    ctx: &JetContext,
    cover: &Cover,
    lagrangians: &Cochain<Lagrangian>,
    field: &VectorField,
    opts: &VerifyOptions,
    report: &mut Report,
) -> Result<BTreeMap<usize, Current>> {
    let spec = opts.chart_spec(cover);
    let mut out = BTreeMap::new();
    for (s, l) in lagrangians.iter() {
        let i = s.charts[0];
        let scope = chart_scope(cover, i);
        let eta = euler_lagrange(ctx, l)?;
        let sym = check_generalized_symmetry(ctx, &eta, field, Some(l), &spec)?;
        report.check(&scope, "E(Xi_V ⌟ eta) = 0", opts.show_all(&sym.residuals), sym.is_generalized_symmetry);

        let once = lie_derive_lagrangian(ctx, l, field)?;
        let twice = lie_derive_lagrangian(ctx, &once, field)?;
        let class = class_residual(ctx, &twice)?;
        report.check(&scope, "L_Xi L_Xi lambda = 0", opts.show(twice.density()), class.is_zero());

        match &sym.nu {
            Some(nu) => {
                let beta = nu + &noether_current(ctx, l, field)?;
                report.info(&scope, "beta = nu + epsilon", opts.show_current(ctx, &beta));
                let defect = &beta.d_h(ctx)? - &once;
                report.check(&scope, "d_H beta - L_Xi lambda", opts.show(defect.density()), defect.is_zero());
                out.insert(i, beta);
            }
            None => report.check(&scope, "potential nu of Xi_V ⌟ eta", sym.notes.join("; "), false),
        }
    }
    Ok(out)
}

fn beta_cochain(cover: &Cover, betas: &BTreeMap<usize, Current>) -> Option<Cochain<Current>> {
    if betas.len() != cover.charts.len() {
        return None;
    }
    Cochain::from_charts(cover, |i| Ok(betas[&i].clone())).ok()
}

/// Checks `L_Xi d_H gamma_ij = (𝔡 d_H beta)_ij` with `𝔡 lambda = d_H gamma`.
pub fn verify_lemma2(
    cover: &Cover,
    lagrangians: &Cochain<Lagrangian>,
    field: &VectorField,
    opts: &VerifyOptions,
) -> Result<Report> {
    let ctx = cover.context();
    cover.check_global_field(&ctx, field)?;
    let spec = opts.chart_spec(cover);
    let mut report = Report::new("verify-lemma2");
    let betas = strong_currents(&ctx, cover, lagrangians, field, opts, &mut report)?;

    let d_lambda = coboundary(lagrangians, cover)?;
    let Some(beta) = beta_cochain(cover, &betas) else {
        return Ok(report);
    };
    let d_h_beta = beta.map(|_, b| b.d_h(&ctx))?;
    let d_d_h_beta = coboundary(&d_h_beta, cover)?;
    for (s, dl) in d_lambda.iter() {
        let scope = overlap_scope(cover, s);
        let gamma = match solve_current(&ctx, dl, &spec) {
            Ok(g) => g,
            Err(e) => {
                report.check(&scope, "gamma with d_H gamma = 𝔡 lambda", e.to_string(), false);
                continue;
            }
        };
        report.info(&scope, "gamma", opts.show_current(&ctx, &gamma));
        let lhs = lie_derive_lagrangian(&ctx, &gamma.d_h(&ctx)?, field)?;
        let rhs = d_d_h_beta.get(s).cloned().unwrap_or_default();
        let diff = &lhs - &rhs;
        report.check(&scope, "L_Xi d_H gamma - 𝔡 d_H beta", opts.show(diff.density()), diff.is_zero());
    }
    Ok(report)
}

/// On-shell conservation of `L_Xi beta_i`, globality of the varied currents
/// and agreement with the global representative.
pub fn verify_lemma3_and_theorem(
    cover: &Cover,
    lagrangians: &Cochain<Lagrangian>,
    field: &VectorField,
    opts: &VerifyOptions,
) -> Result<Report> {
    let ctx = cover.context();
    cover.check_global_field(&ctx, field)?;
    let spec = opts.chart_spec(cover);
    let mut report = Report::new("verify-lemma3");
    let betas = strong_currents(&ctx, cover, lagrangians, field, opts, &mut report)?;

    let d_lambda = coboundary(lagrangians, cover)?;
    let varied_d_lambda = crate::cech::lie_derive_cochain(&d_lambda, field, cover)?;
    for (s, v) in varied_d_lambda.iter() {
        report.check(overlap_scope(cover, s), "L_Xi 𝔡 lambda = 0", opts.show(v.density()), v.is_zero());
    }

    let mut varied_betas = BTreeMap::new();
    for (&i, beta) in &betas {
        let scope = chart_scope(cover, i);
        let l = lagrangians.chart(i).expect("chart value");
        let eta = euler_lagrange(&ctx, l)?;
        let v = lie_derive_current(&ctx, beta, field)?;
        report.info(&scope, "V = L_Xi beta", opts.show_current(&ctx, &v));

        let div = v.d_h(&ctx)?;
        let on_shell = vanishes_on_shell(&ctx, div.density(), &eta, &spec)?;
        report.check(
            &scope,
            format!("d_H V on shell ({})", on_shell.method),
            opts.show(&on_shell.residual),
            on_shell.vanishes,
        );

        let twice = lie_derive_lagrangian(&ctx, &lie_derive_lagrangian(&ctx, l, field)?, field)?;
        let defect = &div - &twice;
        report.check(&scope, "d_H V - L_Xi L_Xi lambda", opts.show(defect.density()), defect.is_zero());

        let mu = beta.d_h(&ctx)?;
        match momenta(&ctx, &mu) {
            Ok(p) => {
                let g = mu.to_form(&ctx).contract_horizontal(field)?.try_add(&p.contract_vertical(&ctx, field)?)?;
                let g = Current::new(&ctx, g)?;
                let rest = &v - &g;
                if rest.is_zero() {
                    report.check(&scope, "V - (Xi_H ⌟ mu + Xi_V ⌟ p(mu))", "0", true);
                } else if ctx.base_dim >= 2 {
                    match solve_dh_exact(&ctx, rest.form(), &spec) {
                        Ok(w) => report.check(
                            &scope,
                            "V - (Xi_H ⌟ mu + Xi_V ⌟ p(mu)) is d_H-exact",
                            w.display(&opts.naming).to_string(),
                            true,
                        ),
                        Err(e) => report.check(&scope, "V - (Xi_H ⌟ mu + Xi_V ⌟ p(mu)) is d_H-exact", e.to_string(), false),
                    }
                } else {
                    report.check(
                        &scope,
                        "V - (Xi_H ⌟ mu + Xi_V ⌟ p(mu))",
                        opts.show_current(&ctx, &rest),
                        false,
                    );
                }
            }
            Err(Error::OrderTooHigh(k)) => {
                report.info(&scope, "global representative", format!("skipped: d_H beta has order {k}"));
            }
            Err(e) => return Err(e),
        }
        varied_betas.insert(i, v);
    }

    if let Some(v) = beta_cochain(cover, &varied_betas) {
        for (s, dv) in coboundary(&v, cover)?.iter() {
            report.check(overlap_scope(cover, s), "𝔡 V = 0", opts.show_current(&ctx, dv), dv.is_zero());
        }
    }
    Ok(report)
}
