use std::fmt;

use num_traits::{One, Signed};

use super::{Expr, JetVar, Kernel, Monomial, Rational};

/// Human names for base coordinates and fields, used when printing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Naming {
    pub base: Vec<String>,
    pub fields: Vec<String>,
}

impl Naming {
    /// `x0, x1, …` and `u0, u1, …`.
    pub fn generic(n: usize, m: usize) -> Self {
        Naming {
            base: (0..n).map(|i| format!("x{i}")).collect(),
            fields: (0..m).map(|a| format!("u{a}")).collect(),
        }
    }

    fn base_name(&self, mu: u8) -> String {
        self.base.get(mu as usize).cloned().unwrap_or_else(|| format!("x{mu}"))
    }

    fn field_name(&self, a: u8) -> String {
        self.fields.get(a as usize).cloned().unwrap_or_else(|| format!("u{a}"))
    }

    pub fn var(&self, v: &JetVar) -> String {
        match v {
            JetVar::Base(mu) => self.base_name(*mu),
            JetVar::Field(a, idx) => self.suffixed(self.field_name(*a), idx.entries()),
            JetVar::Param(p) => p.to_string(),
            JetVar::Homotopy => "$t".to_string(),
            JetVar::Test(a, idx) => self.suffixed(format!("$v{a}"), idx.entries()),
        }
    }

    fn suffixed(&self, head: String, idx: &[u8]) -> String {
        if idx.is_empty() {
            return head;
        }
        let mut s = head;
        s.push('_');
        for &mu in idx {
            s.push_str(&self.base_name(mu));
        }
        s
    }
}

/// Borrowing display adapter with a [`Naming`].
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    naming: Option<&'a Naming>,
}

impl Expr {
    pub fn display<'a>(&'a self, naming: &'a Naming) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, naming: Some(naming) }
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn var_name(naming: Option<&Naming>, v: &JetVar) -> String {
    match naming {
        Some(n) => n.var(v),
        None => format!("{v:?}"),
    }
}

fn fmt_kernel(naming: Option<&Naming>, k: &Kernel) -> String {
    let inner = ExprDisplay { expr: k.arg(), naming };
    format!("{}({})", k.kind().name(), inner)
}

fn fmt_monomial(naming: Option<&Naming>, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (v, k) in m.vars() {
        let name = var_name(naming, v);
        parts.push(match *k {
            1 => name,
            k if k < 0 => format!("{name}^({k})"),
            k => format!("{name}^{k}"),
        });
    }
    for (kern, p) in m.kernels() {
        let s = fmt_kernel(naming, kern);
        parts.push(if *p == 1 { s } else { format!("{s}^{p}") });
    }
    parts.join("*")
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.expr.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", fmt_monomial(self.naming, m))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), fmt_monomial(self.naming, m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ExprDisplay { expr: self, naming: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_with_names() {
        let naming = Naming { base: vec!["t".into()], fields: vec!["u".into()] };
        let e = Expr::rat(1, 2) * Expr::field(0, &[0]) * Expr::field(0, &[0]) - Expr::field(0, &[0, 0]);
        let s = e.display(&naming).to_string();
        assert!(s.contains("1/2*u_t^2"), "{s}");
        assert!(s.contains("u_tt"), "{s}");
    }
}
