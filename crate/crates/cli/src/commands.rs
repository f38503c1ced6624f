//! Command dispatch: every command turns a problem file into a [`Report`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use clap::ValueEnum;
use num_traits::ToPrimitive;
use varseq_core::cech::{coboundary, connecting_delta, connecting_delta_prime, Cochain, Cover, DEFAULT_QUAD_NODES, PERIOD_TOLERANCE};
use varseq_core::corpus::{Corpus, Shape};
use varseq_core::noether::{
    check_generalized_symmetry, lie_derive_lagrangian, lie_derive_source, noether_current, strong_noether_current,
    vanishes_on_shell, verify_lemma1, verify_lemma2, verify_lemma3_and_theorem, VerifyOptions,
};
use varseq_core::report::Report;
use varseq_core::varseq::{euler_lagrange, helmholtz_check, tonti_lagrangian};
use varseq_core::{AnsatzSpec, Current, Expr, JetContext, Lagrangian, SourceForm, VectorField};

use crate::error::CliError;
use crate::problem::ProblemFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    El,
    Helmholtz,
    Tonti,
    Noether,
    StrongNoether,
    Lie,
    CechClass,
    VerifyLemma1,
    VerifyLemma2,
    VerifyLemma3,
    Selftest,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

/// Command-line overrides of the problem's `[options]`.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub field: Option<String>,
    pub ansatz_degree: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub tolerance: Option<f64>,
}

/// Everything a command needs, resolved from the file and the overrides.
struct Job<'a> {
    problem: &'a ProblemFile,
    settings: &'a Settings,
    ctx: JetContext,
    cover: Cover,
    spec: AnsatzSpec,
    nodes: usize,
    tolerance: f64,
    params: BTreeMap<String, f64>,
}

impl<'a> Job<'a> {
    fn new(problem: &'a ProblemFile, settings: &'a Settings) -> Result<Self, CliError> {
        let cover = problem.cover()?;
        let mut ctx = cover.context();
        if let Some(order) = problem.order {
            ctx = ctx.with_max_order(order);
        }
        let mut spec = AnsatzSpec::default();
        if let Some(d) = settings.ansatz_degree.or(problem.options.ansatz_degree) {
            spec.max_poly_degree = d;
        }
        if let Some(r) = problem.options.ansatz_order {
            spec.max_jet_order = r;
        }
        let nodes = settings.quad_nodes.or(problem.options.quad_nodes).unwrap_or(DEFAULT_QUAD_NODES);
        if nodes == 0 {
            return Err(CliError::Usage("--quad-nodes must be positive".into()));
        }
        let params = problem
            .parameters
            .iter()
            .filter_map(|(k, v)| v.as_ref().and_then(|r| r.to_f64()).map(|x| (k.clone(), x)))
            .collect();
        Ok(Job {
            problem,
            settings,
            ctx,
            cover,
            spec,
            nodes,
            tolerance: settings.tolerance.or(problem.options.tolerance).unwrap_or(PERIOD_TOLERANCE),
            params,
        })
    }

    fn show(&self, e: &Expr) -> String {
        e.display(&self.problem.naming).to_string()
    }

    fn show_all(&self, es: &[Expr]) -> String {
        format!("[{}]", es.iter().map(|e| self.show(e)).collect::<Vec<_>>().join(", "))
    }

    fn show_current(&self, c: &Current) -> String {
        self.show_all(&c.components(&self.ctx))
    }

    fn chart_scope(&self, chart: &str) -> String {
        format!("chart {chart}")
    }

    fn field(&self) -> Result<(String, VectorField), CliError> {
        let fields = &self.problem.fields;
        let name = match self.settings.field.clone().or_else(|| self.problem.options.field.clone()) {
            Some(name) => name,
            None if fields.len() == 1 => fields.keys().next().cloned().unwrap_or_default(),
            None => {
                return Err(CliError::Usage(
                    "choose a vector field with --field or options.field (the file declares none or several)".into(),
                ))
            }
        };
        let decl = fields.get(&name).ok_or_else(|| CliError::Usage(format!("undeclared vector field `{name}`")))?;
        let field = VectorField::new(&self.ctx, decl.horizontal.clone(), decl.vertical.clone())?;
        Ok((name, field))
    }

    /// Local Lagrangians: declared ones, or Tonti Lagrangians of the source forms.
    fn lagrangians(&self) -> Result<Vec<(String, Lagrangian)>, CliError> {
        if !self.problem.lagrangians.is_empty() {
            return Ok(self.problem.lagrangians.iter().map(|(c, e)| (c.clone(), Lagrangian::new(e.clone()))).collect());
        }
        if self.problem.sources.is_empty() {
            return Err(CliError::Usage("the problem declares neither lagrangians nor sources".into()));
        }
        let center = vec![Expr::zero(); self.ctx.fiber_dim];
        self.problem
            .sources
            .iter()
            .map(|(c, eta)| Ok((c.clone(), tonti_lagrangian(&self.ctx, &SourceForm::new(eta.clone()), &center)?)))
            .collect()
    }

    /// Source forms: declared ones, or Euler–Lagrange forms of the Lagrangians.
    fn sources(&self) -> Result<Vec<(String, SourceForm)>, CliError> {
        if !self.problem.sources.is_empty() {
            return Ok(self.problem.sources.iter().map(|(c, e)| (c.clone(), SourceForm::new(e.clone()))).collect());
        }
        if self.problem.lagrangians.is_empty() {
            return Err(CliError::Usage("the problem declares neither lagrangians nor sources".into()));
        }
        self.problem
            .lagrangians
            .iter()
            .map(|(c, e)| Ok((c.clone(), euler_lagrange(&self.ctx, &Lagrangian::new(e.clone()))?)))
            .collect()
    }

    fn cochain<T: varseq_core::cech::CochainValue>(&self, items: Vec<(String, T)>) -> Result<Cochain<T>, CliError> {
        let mut by_name: BTreeMap<String, T> = items.into_iter().collect();
        Ok(Cochain::from_charts(&self.cover, |i| {
            by_name
                .remove(&self.cover.charts[i].name)
                .ok_or_else(|| varseq_core::Error::TransitionMissing(self.cover.charts[i].name.clone()))
        })?)
    }

    fn verify_options(&self) -> VerifyOptions {
        let mut opts = VerifyOptions::new(self.problem.naming.clone());
        opts.spec = self.spec.clone();
        opts.quad_nodes = self.nodes;
        opts.tolerance = self.tolerance;
        opts.params = self.params.clone();
        opts
    }
}

/// Runs `cmd` on `problem`.
pub fn run_command(cmd: Command, problem: &ProblemFile, settings: &Settings) -> Result<Report, CliError> {
    let job = Job::new(problem, settings)?;
    let mut report = Report::new(match &problem.name {
        Some(name) => format!("{} {}", cmd.name(), name),
        None => cmd.name(),
    });
    match cmd {
        Command::El => el(&job, &mut report)?,
        Command::Helmholtz => helmholtz(&job, &mut report)?,
        Command::Tonti => tonti(&job, &mut report)?,
        Command::Noether => noether(&job, &mut report)?,
        Command::StrongNoether => strong_noether(&job, &mut report)?,
        Command::Lie => lie(&job, &mut report)?,
        Command::CechClass => cech_class(&job, &mut report)?,
        Command::VerifyLemma1 | Command::VerifyLemma2 | Command::VerifyLemma3 => {
            let lambda = job.cochain(job.lagrangians()?)?;
            let (_, field) = job.field()?;
            let opts = job.verify_options();
            let inner = match cmd {
                Command::VerifyLemma1 => verify_lemma1(&job.cover, &lambda, &field, &opts)?,
                Command::VerifyLemma2 => verify_lemma2(&job.cover, &lambda, &field, &opts)?,
                _ => verify_lemma3_and_theorem(&job.cover, &lambda, &field, &opts)?,
            };
            report.extend(inner);
        }
        Command::Selftest => selftest(&job, &mut report)?,
    }
    Ok(report)
}

fn el(job: &Job, report: &mut Report) -> Result<(), CliError> {
    if job.problem.lagrangians.is_empty() {
        return Err(CliError::Usage("`el` needs [lagrangians]".into()));
    }
    for (chart, l) in job.lagrangians()? {
        let e = euler_lagrange(&job.ctx, &l)?;
        for (name, comp) in job.problem.naming.fields.iter().zip(e.components()) {
            report.info(job.chart_scope(&chart), format!("E_{name}"), job.show(comp));
        }
    }
    Ok(())
}

fn helmholtz(job: &Job, report: &mut Report) -> Result<(), CliError> {
    for (chart, eta) in job.sources()? {
        let h = helmholtz_check(&job.ctx, &eta)?;
        let nonzero: Vec<Expr> = h.residuals.iter().filter(|r| !r.is_zero()).cloned().collect();
        report.check(job.chart_scope(&chart), "Helmholtz residuals = 0", job.show_all(&nonzero), h.is_locally_variational);
    }
    Ok(())
}

fn tonti(job: &Job, report: &mut Report) -> Result<(), CliError> {
    let center = vec![Expr::zero(); job.ctx.fiber_dim];
    for (chart, eta) in job.sources()? {
        let scope = job.chart_scope(&chart);
        let h = helmholtz_check(&job.ctx, &eta)?;
        if !h.is_locally_variational {
            let nonzero: Vec<Expr> = h.residuals.into_iter().filter(|r| !r.is_zero()).collect();
            report.check(scope, "Helmholtz residuals = 0", job.show_all(&nonzero), false);
            continue;
        }
        let l = tonti_lagrangian(&job.ctx, &eta, &center)?;
        report.info(scope.clone(), "lambda", job.show(l.density()));
        let back = euler_lagrange(&job.ctx, &l)?;
        let diff: Vec<Expr> = back.components().iter().zip(eta.components()).map(|(a, b)| a - b).collect();
        report.check(scope, "E(lambda) - eta", job.show_all(&diff), diff.iter().all(Expr::is_zero));
    }
    Ok(())
}

fn noether(job: &Job, report: &mut Report) -> Result<(), CliError> {
    let (name, field) = job.field()?;
    report.info("field", name, format!("{} | {}", job.show_all(field.horizontal()), job.show_all(field.vertical_components())));
    for (chart, l) in job.lagrangians()? {
        let scope = job.chart_scope(&chart);
        let eta = euler_lagrange(&job.ctx, &l)?;
        let epsilon = noether_current(&job.ctx, &l, &field)?;
        report.info(scope.clone(), "epsilon", job.show_current(&epsilon));
        let varied = lie_derive_lagrangian(&job.ctx, &l, &field)?;
        report.info(scope.clone(), "L_Xi lambda", job.show(varied.density()));
        let pairing = eta.pair(&field.characteristic(&job.ctx));
        let first_variation = varied.density() - &pairing - epsilon.d_h(&job.ctx)?.density().clone();
        report.check(
            scope.clone(),
            "L_Xi lambda - Xi_V ⌟ E(lambda) - d_H epsilon",
            job.show(&first_variation),
            first_variation.is_zero(),
        );
        let sym = check_generalized_symmetry(&job.ctx, &eta, &field, Some(&l), &job.spec)?;
        report.check(scope.clone(), "E(Xi_V ⌟ eta) = 0", job.show_all(&sym.residuals), sym.is_generalized_symmetry);
        for note in &sym.notes {
            report.info(scope.clone(), "note", note.clone());
        }
        match &sym.zeta {
            Some(zeta) if sym.is_lagrangian_symmetry => {
                report.info(scope.clone(), "zeta", job.show_current(zeta));
                let conserved = &epsilon - zeta;
                report.info(scope.clone(), "J = epsilon - zeta", job.show_current(&conserved));
                let div = conserved.d_h(&job.ctx)?;
                let on_shell = vanishes_on_shell(&job.ctx, div.density(), &eta, &job.spec)?;
                report.check(
                    scope,
                    format!("d_H J on shell ({})", on_shell.method),
                    job.show(&on_shell.residual),
                    on_shell.vanishes,
                );
            }
            _ if sym.is_generalized_symmetry => report.info(scope, "Lagrangian symmetry", "no"),
            _ => {}
        }
    }
    Ok(())
}

fn strong_noether(job: &Job, report: &mut Report) -> Result<(), CliError> {
    let (_, field) = job.field()?;
    for (chart, l) in job.lagrangians()? {
        let scope = job.chart_scope(&chart);
        let eta = euler_lagrange(&job.ctx, &l)?;
        let sym = check_generalized_symmetry(&job.ctx, &eta, &field, Some(&l), &job.spec)?;
        report.check(scope.clone(), "E(Xi_V ⌟ eta) = 0", job.show_all(&sym.residuals), sym.is_generalized_symmetry);
        if !sym.is_generalized_symmetry {
            continue;
        }
        let strong = strong_noether_current(&job.ctx, &l, &eta, &field, &job.spec)?;
        report.info(scope.clone(), "nu + epsilon", job.show_current(&strong));
        let varied = lie_derive_lagrangian(&job.ctx, &l, &field)?;
        let defect = strong.d_h(&job.ctx)?.density() - varied.density();
        report.check(scope, "d_H(nu + epsilon) - L_Xi lambda", job.show(&defect), defect.is_zero());
    }
    Ok(())
}

fn lie(job: &Job, report: &mut Report) -> Result<(), CliError> {
    let (_, field) = job.field()?;
    for (chart, l) in job.lagrangians()? {
        let scope = job.chart_scope(&chart);
        let varied = lie_derive_lagrangian(&job.ctx, &l, &field)?;
        report.info(scope.clone(), "L_Xi lambda", job.show(varied.density()));
        let eta = euler_lagrange(&job.ctx, &l)?;
        let varied_eta = lie_derive_source(&job.ctx, &eta, &l, &field)?;
        report.info(scope.clone(), "L_Xi E(lambda)", job.show_all(varied_eta.components()));
        let direct = euler_lagrange(&job.ctx, &varied)?;
        let diff: Vec<Expr> = varied_eta.components().iter().zip(direct.components()).map(|(a, b)| a - b).collect();
        report.check(scope, "L_Xi E(lambda) - E(L_Xi lambda)", job.show_all(&diff), diff.iter().all(Expr::is_zero));
    }
    Ok(())
}

fn period_table(job: &Job, report: &mut Report, periods: &BTreeMap<String, f64>) {
    for (cycle, p) in periods {
        report.info(format!("cycle {cycle}"), "period", format!("{p:.12}"));
    }
    if periods.is_empty() {
        report.info("cover", "cycles", format!("`{}` has no cycles of this degree", job.cover.name));
    }
}

fn cech_class(job: &Job, report: &mut Report) -> Result<(), CliError> {
    let eta = job.sources()?;
    for (chart, e) in &eta {
        let h = helmholtz_check(&job.ctx, e)?;
        let nonzero: Vec<Expr> = h.residuals.iter().filter(|r| !r.is_zero()).cloned().collect();
        report.check(job.chart_scope(chart), "Helmholtz residuals = 0", job.show_all(&nonzero), h.is_locally_variational);
        if !h.is_locally_variational {
            return Ok(());
        }
    }
    let eta = job.cochain(eta)?;
    let declared = if job.problem.lagrangians.is_empty() { None } else { Some(job.cochain(job.lagrangians()?)?) };
    if let (Some(lambda), true) = (&declared, eta.is_zero()) {
        // trivial dynamics: the Lagrangians themselves are d_H-closed and carry the class
        let r = connecting_delta_prime(lambda, &job.cover, &job.spec, job.nodes, &job.params, job.tolerance)?;
        for (s, nu) in r.nu.iter() {
            report.info(job.chart_scope(&job.cover.charts[s.charts[0]].name), "nu", job.show_current(nu));
        }
        for (s, d) in r.d_nu.iter() {
            report.info(format!("overlap {}", job.cover.simplex_label(s)), "𝔡 nu", job.show_current(d));
        }
        period_table(job, report, &r.periods);
        report.info("class", "verdict", if r.nontrivial { "δ′ ≠ 0" } else { "δ′ = 0" });
        return Ok(());
    }
    let r = connecting_delta(&eta, declared.as_ref(), &job.cover, &job.spec, job.nodes, &job.params, job.tolerance)?;
    if declared.is_none() {
        for (s, l) in r.lagrangians.iter() {
            report.info(job.chart_scope(&job.cover.charts[s.charts[0]].name), "lambda", job.show(l.density()));
        }
    }
    for (s, d) in r.d_lambda.iter() {
        let scope = format!("overlap {}", job.cover.simplex_label(s));
        report.info(scope.clone(), "𝔡 lambda", job.show(d.density()));
        if let Some(g) = r.gamma.get(s) {
            report.info(scope, "gamma", job.show_current(g));
        }
    }
    period_table(job, report, &r.periods);
    report.info("class", "verdict", if r.nontrivial { "δ ≠ 0" } else { "δ = 0" });
    Ok(())
}

/// Built-in consistency checks on a small random corpus of the problem's
/// dimensions plus the two reference periods.
fn selftest(job: &Job, report: &mut Report) -> Result<(), CliError> {
    let ctx = JetContext::new(job.ctx.base_dim, job.ctx.fiber_dim);
    let mut corpus = Corpus::new(0).with_shape(Shape { max_terms: 3, ..Shape::default() });
    let center = vec![Expr::zero(); ctx.fiber_dim];
    let (mut exact, mut helm, mut inverse) = (true, true, true);
    for _ in 0..6 {
        let nu = corpus.current(&ctx, 1);
        exact &= euler_lagrange(&ctx, &nu.d_h(&ctx)?)?.is_zero();
        let l = corpus.lagrangian(&ctx, 1);
        let eta = euler_lagrange(&ctx, &l)?;
        helm &= helmholtz_check(&ctx, &eta)?.is_locally_variational;
        inverse &= euler_lagrange(&ctx, &tonti_lagrangian(&ctx, &eta, &center)?)? == eta;
    }
    report.check("corpus", "E(d_H nu) = 0", "6 currents", exact);
    report.check("corpus", "Helmholtz(E(lambda)) = 0", "6 Lagrangians", helm);
    report.check("corpus", "E(Tonti(E(lambda))) = E(lambda)", "6 Lagrangians", inverse);

    let winding = Cover::winding_s1();
    let theta_t = Cochain::from_charts(&winding, |_| Ok(Lagrangian::new(Expr::field(0, &[0]))))?;
    let r = connecting_delta_prime(&theta_t, &winding, &AnsatzSpec::default(), job.nodes, &BTreeMap::new(), job.tolerance)?;
    let p = r.periods.get("fiber-circle").copied().unwrap_or(f64::NAN);
    report.check("cover R-x-S1-winding", "|period - 2π| < tolerance", format!("{:.3e}", p - 2.0 * PI), (p - 2.0 * PI).abs() < job.tolerance);

    let monopole = Cover::monopole_s2();
    let mctx = monopole.context();
    let th = Expr::field(0, &[]);
    let cos = Expr::cos(&th)?;
    let phi_t = Expr::field(1, &[0]);
    let lambda = Cochain::from_charts(&monopole, |i| {
        let sign = if monopole.charts[i].name.starts_with("north") { Expr::one() - cos.clone() } else { -(Expr::one() + cos.clone()) };
        Ok(Lagrangian::new(sign * phi_t.clone()))
    })?;
    let eta = lambda.map(|_, l| euler_lagrange(&mctx, l))?;
    debug_assert!(coboundary(&eta, &monopole)?.is_zero());
    let r = connecting_delta(&eta, Some(&lambda), &monopole, &AnsatzSpec::default(), job.nodes, &BTreeMap::new(), job.tolerance)?;
    let p = r.periods.get("equator").copied().unwrap_or(f64::NAN);
    report.check("cover R-x-S2-monopole", "|period - 4π| < tolerance", format!("{:.3e}", p - 4.0 * PI), (p - 4.0 * PI).abs() < job.tolerance);
    Ok(())
}
