//! TOML problem files: parsing with located diagnostics and canonical printing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Range;

use serde::Deserialize;
use toml::Spanned;
use varseq_core::cech::{Cover, COVER_NAMES};
use varseq_core::expr::normalize;
use varseq_core::{Expr, Naming, Rational};

use crate::error::CliError;
use crate::syntax::{parse_tree, Scope};

/// Named vector field `xi^mu d_mu + Xi^a d_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDecl {
    pub horizontal: Vec<Expr>,
    pub vertical: Vec<Expr>,
}

/// Solver and quadrature settings stored in the file; flags override them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    pub field: Option<String>,
    pub ansatz_degree: Option<usize>,
    pub ansatz_order: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub name: Option<String>,
    pub naming: Naming,
    pub order: Option<usize>,
    pub cover: String,
    /// Declared parameters and their optional exact values.
    pub parameters: BTreeMap<String, Option<Rational>>,
    /// Per-chart Lagrangian densities, in cover chart order.
    pub lagrangians: Vec<(String, Expr)>,
    /// Per-chart source form components, in cover chart order.
    pub sources: Vec<(String, Vec<Expr>)>,
    pub fields: BTreeMap<String, FieldDecl>,
    pub options: Options,
}

impl ProblemFile {
    pub fn base_dim(&self) -> usize {
        self.naming.base.len()
    }

    pub fn fiber_dim(&self) -> usize {
        self.naming.fields.len()
    }

    pub fn cover(&self) -> Result<Cover, CliError> {
        Ok(Cover::by_name(&self.cover, self.base_dim(), self.fiber_dim())?)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    problem: RawHeader,
    #[serde(default)]
    parameters: BTreeMap<Spanned<String>, Spanned<RawValue>>,
    #[serde(default)]
    lagrangians: BTreeMap<Spanned<String>, Spanned<String>>,
    #[serde(default)]
    sources: BTreeMap<Spanned<String>, Spanned<Vec<Spanned<String>>>>,
    #[serde(default)]
    vector_fields: BTreeMap<Spanned<String>, RawField>,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHeader {
    name: Option<String>,
    n: Spanned<usize>,
    m: Spanned<usize>,
    base: Option<Spanned<Vec<Spanned<String>>>>,
    fields: Option<Spanned<Vec<Spanned<String>>>>,
    order: Option<Spanned<usize>>,
    cover: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawValue {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    #[serde(default)]
    horizontal: Option<Spanned<Vec<Spanned<String>>>>,
    vertical: Spanned<Vec<Spanned<String>>>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    field: Option<Spanned<String>>,
    ansatz_degree: Option<usize>,
    ansatz_order: Option<usize>,
    quad_nodes: Option<Spanned<usize>>,
    tolerance: Option<f64>,
}

/// One-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn semantic(&self, span: Range<usize>, message: impl Into<String>) -> CliError {
        let (line, column) = line_col(self.text, span.start);
        CliError::Semantic { line, column, message: message.into() }
    }

    /// Parses an expression stored in a TOML string whose span is `span`.
    fn expr(&self, s: &Spanned<String>, scope: &Scope) -> Result<Expr, CliError> {
        // offset of the first character inside the quotes
        let inner = s.span().start + 1;
        let tree = parse_tree(s.get_ref(), scope).map_err(|e| {
            let (line, column) = line_col(self.text, inner + e.offset);
            if e.semantic {
                CliError::Semantic { line, column, message: e.message.clone() }
            } else {
                CliError::Syntax { line, column, message: e.message.clone() }
            }
        })?;
        normalize(&tree).map_err(|e| self.semantic(s.span(), e.to_string()))
    }

    fn exprs(&self, list: &Spanned<Vec<Spanned<String>>>, len: usize, what: &str, scope: &Scope) -> Result<Vec<Expr>, CliError> {
        if list.get_ref().len() != len {
            return Err(self.semantic(list.span(), format!("{what} needs {len} components, got {}", list.get_ref().len())));
        }
        list.get_ref().iter().map(|s| self.expr(s, scope)).collect()
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}

const RESERVED: [&str; 4] = ["sin", "cos", "exp", "pi"];

fn names(
    ctx: &Ctx,
    list: Option<&Spanned<Vec<Spanned<String>>>>,
    count: &Spanned<usize>,
    default: impl Fn(usize) -> String,
    seen: &mut BTreeSet<String>,
) -> Result<Vec<String>, CliError> {
    let out: Vec<String> = match list {
        None => (0..*count.get_ref()).map(default).collect(),
        Some(list) => {
            if list.get_ref().len() != *count.get_ref() {
                return Err(ctx.semantic(
                    list.span(),
                    format!("dimension mismatch: {} names for dimension {}", list.get_ref().len(), count.get_ref()),
                ));
            }
            for s in list.get_ref() {
                let name = s.get_ref();
                if !valid_name(name) || RESERVED.contains(&name.as_str()) {
                    return Err(ctx.semantic(s.span(), format!("`{name}` is not a usable name")));
                }
                if !seen.insert(name.clone()) {
                    return Err(ctx.semantic(s.span(), format!("`{name}` declared twice")));
                }
            }
            return Ok(list.get_ref().iter().map(|s| s.get_ref().clone()).collect());
        }
    };
    seen.extend(out.iter().cloned());
    Ok(out)
}

fn rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (num, den) = body.split_once('/').unwrap_or((body, "1"));
    let num: num_bigint::BigInt = num.trim().parse().ok()?;
    let den: num_bigint::BigInt = den.trim().parse().ok()?;
    if den == num_bigint::BigInt::from(0) {
        return None;
    }
    let r = Rational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Orders per-chart entries as the cover lists its charts; every chart must be present.
fn by_chart<T, U>(
    ctx: &Ctx,
    cover: &Cover,
    table: &BTreeMap<Spanned<String>, T>,
    what: &str,
    mut convert: impl FnMut(&T) -> Result<U, CliError>,
) -> Result<Vec<(String, U)>, CliError> {
    if table.is_empty() {
        return Ok(Vec::new());
    }
    for key in table.keys() {
        if cover.chart_index(key.get_ref()).is_none() {
            let known: Vec<&str> = cover.charts.iter().map(|c| c.name.as_str()).collect();
            return Err(ctx.semantic(
                key.span(),
                format!("cover `{}` has no chart `{}` (charts: {})", cover.name, key.get_ref(), known.join(", ")),
            ));
        }
    }
    let mut out = Vec::new();
    for chart in &cover.charts {
        let Some((_, value)) = table.iter().find(|(k, _)| k.get_ref() == &chart.name) else {
            let first = table.keys().next().expect("nonempty");
            return Err(ctx.semantic(first.span(), format!("{what} missing for chart `{}`", chart.name)));
        };
        out.push((chart.name.clone(), convert(value)?));
    }
    Ok(out)
}

/// Parses a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemFile, CliError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        CliError::Syntax { line, column, message: e.message().trim().to_string() }
    })?;
    let ctx = Ctx { text };
    let h = &raw.problem;

    let mut seen = BTreeSet::new();
    let base = names(&ctx, h.base.as_ref(), &h.n, |i| format!("x{i}"), &mut seen)?;
    let fields = names(&ctx, h.fields.as_ref(), &h.m, |a| format!("u{a}"), &mut seen)?;
    if base.is_empty() || fields.is_empty() {
        return Err(ctx.semantic(h.n.span(), "both n and m must be positive"));
    }

    let mut parameters = BTreeMap::new();
    for (key, value) in &raw.parameters {
        let name = key.get_ref();
        if !valid_name(name) || RESERVED.contains(&name.as_str()) || name.starts_with('s') && name[1..].parse::<usize>().is_ok() {
            return Err(ctx.semantic(key.span(), format!("`{name}` is not a usable parameter name")));
        }
        if !seen.insert(name.clone()) {
            return Err(ctx.semantic(key.span(), format!("`{name}` declared twice")));
        }
        let v = match value.get_ref() {
            RawValue::Int(k) => Some(Rational::from_integer((*k).into())),
            RawValue::Text(s) if s.trim().is_empty() => None,
            RawValue::Text(s) => Some(
                rational(s).ok_or_else(|| ctx.semantic(value.span(), format!("`{s}` is not a rational number")))?,
            ),
        };
        parameters.insert(name.clone(), v);
    }
    let scope = Scope { base: base.clone(), fields: fields.clone(), params: parameters.keys().cloned().collect() };

    let order = match &h.order {
        Some(o) if !(2..=varseq_core::jet::DEFAULT_MAX_ORDER).contains(o.get_ref()) => {
            return Err(ctx.semantic(o.span(), format!("order must lie in 2..={}", varseq_core::jet::DEFAULT_MAX_ORDER)));
        }
        o => o.as_ref().map(|o| *o.get_ref()),
    };

    let cover_name = h.cover.as_ref().map_or_else(|| "single".to_string(), |c| c.get_ref().clone());
    let cover = Cover::by_name(&cover_name, base.len(), fields.len()).map_err(|e| {
        let span = h.cover.as_ref().map_or(h.n.span(), |c| c.span());
        let message = if COVER_NAMES.contains(&cover_name.as_str()) {
            e.to_string()
        } else {
            format!("unknown cover `{cover_name}` (known: {})", COVER_NAMES.join(", "))
        };
        ctx.semantic(span, message)
    })?;

    let lagrangians = by_chart(&ctx, &cover, &raw.lagrangians, "lagrangian", |s| ctx.expr(s, &scope))?;
    let sources = by_chart(&ctx, &cover, &raw.sources, "source form", |list| {
        ctx.exprs(list, fields.len(), "a source form", &scope)
    })?;

    let mut vector_fields = BTreeMap::new();
    for (key, f) in &raw.vector_fields {
        if !valid_name(key.get_ref()) {
            return Err(ctx.semantic(key.span(), format!("`{}` is not a usable field name", key.get_ref())));
        }
        let horizontal = match &f.horizontal {
            Some(list) => ctx.exprs(list, base.len(), "a horizontal part", &scope)?,
            None => vec![Expr::zero(); base.len()],
        };
        let vertical = ctx.exprs(&f.vertical, fields.len(), "a vertical part", &scope)?;
        vector_fields.insert(key.get_ref().clone(), FieldDecl { horizontal, vertical });
    }

    let o = &raw.options;
    if let Some(field) = &o.field {
        if !vector_fields.contains_key(field.get_ref()) {
            return Err(ctx.semantic(field.span(), format!("undeclared vector field `{}`", field.get_ref())));
        }
    }
    if let Some(q) = &o.quad_nodes {
        if *q.get_ref() == 0 {
            return Err(ctx.semantic(q.span(), "quad_nodes must be positive"));
        }
    }
    let options = Options {
        field: o.field.as_ref().map(|f| f.get_ref().clone()),
        ansatz_degree: o.ansatz_degree,
        ansatz_order: o.ansatz_order,
        quad_nodes: o.quad_nodes.as_ref().map(|q| *q.get_ref()),
        tolerance: o.tolerance,
    };

    Ok(ProblemFile {
        name: h.name.clone(),
        naming: Naming { base, fields },
        order,
        cover: cover_name,
        parameters,
        lagrangians,
        sources,
        fields: vector_fields,
        options,
    })
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn key(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        s.to_string()
    } else {
        quoted(s)
    }
}

fn string_list(items: impl IntoIterator<Item = String>) -> String {
    let parts: Vec<String> = items.into_iter().map(|s| quoted(&s)).collect();
    format!("[{}]", parts.join(", "))
}

fn show_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text of a problem file; parsing it gives back an equal value.
pub fn print_problem(p: &ProblemFile) -> String {
    let show = |e: &Expr| quoted(&e.display(&p.naming).to_string());
    let list = |es: &[Expr]| format!("[{}]", es.iter().map(show).collect::<Vec<_>>().join(", "));
    let mut out = String::new();
    let _ = writeln!(out, "[problem]");
    if let Some(name) = &p.name {
        let _ = writeln!(out, "name = {}", quoted(name));
    }
    let _ = writeln!(out, "n = {}", p.base_dim());
    let _ = writeln!(out, "m = {}", p.fiber_dim());
    let _ = writeln!(out, "base = {}", string_list(p.naming.base.iter().cloned()));
    let _ = writeln!(out, "fields = {}", string_list(p.naming.fields.iter().cloned()));
    if let Some(order) = p.order {
        let _ = writeln!(out, "order = {order}");
    }
    let _ = writeln!(out, "cover = {}", quoted(&p.cover));

    if !p.parameters.is_empty() {
        let _ = writeln!(out, "\n[parameters]");
        for (name, value) in &p.parameters {
            let v = value.as_ref().map_or_else(String::new, show_rational);
            let _ = writeln!(out, "{} = {}", key(name), quoted(&v));
        }
    }
    if !p.lagrangians.is_empty() {
        let _ = writeln!(out, "\n[lagrangians]");
        for (chart, l) in &p.lagrangians {
            let _ = writeln!(out, "{} = {}", key(chart), show(l));
        }
    }
    if !p.sources.is_empty() {
        let _ = writeln!(out, "\n[sources]");
        for (chart, eta) in &p.sources {
            let _ = writeln!(out, "{} = {}", key(chart), list(eta));
        }
    }
    for (name, f) in &p.fields {
        let _ = writeln!(out, "\n[vector_fields.{}]", key(name));
        let _ = writeln!(out, "horizontal = {}", list(&f.horizontal));
        let _ = writeln!(out, "vertical = {}", list(&f.vertical));
    }
    let o = &p.options;
    if *o != Options::default() {
        let _ = writeln!(out, "\n[options]");
        if let Some(f) = &o.field {
            let _ = writeln!(out, "field = {}", quoted(f));
        }
        if let Some(d) = o.ansatz_degree {
            let _ = writeln!(out, "ansatz_degree = {d}");
        }
        if let Some(d) = o.ansatz_order {
            let _ = writeln!(out, "ansatz_order = {d}");
        }
        if let Some(q) = o.quad_nodes {
            let _ = writeln!(out, "quad_nodes = {q}");
        }
        if let Some(t) = o.tolerance {
            let _ = writeln!(out, "tolerance = {}", toml::Value::Float(t));
        }
    }
    out
}
