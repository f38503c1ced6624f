use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use super::{int, Expr, JetVar, Kernel, KernelKind, Monomial, Rational};
use crate::error::{Error, Result};

impl Expr {
    /// Applies the derivation determined by its values on variables.
    ///
    /// `on_var` returns the derivative of a single variable (`None` for 0).
    /// Kernels are differentiated by the chain rule.
    pub fn derive<F>(&self, on_var: &F) -> Result<Expr>
    where
        F: Fn(&JetVar) -> Result<Option<Expr>>,
    {
        let mut out = Expr::zero();
        for (m, c) in self.terms() {
            for (v, k) in m.vars() {
                let Some(dv) = on_var(v)? else { continue };
                let rest = m.clone().with_var_power(v, -1);
                out += dv.mul_monomial(&rest, &(c * int(*k as i64)));
            }
            for (idx, (kernel, p)) in m.kernels().iter().enumerate() {
                let du = kernel.arg().derive(on_var)?;
                if du.is_zero() {
                    continue;
                }
                let rest = m.clone().without_kernel_power(idx);
                let outer = match kernel.kind() {
                    KernelKind::Sin => kernel_expr(KernelKind::Cos, kernel.arg()),
                    KernelKind::Cos => -kernel_expr(KernelKind::Sin, kernel.arg()),
                    KernelKind::Exp => kernel_expr(KernelKind::Exp, kernel.arg()),
                };
                let factor = &outer * &du;
                out += factor.mul_monomial(&rest, &(c * int(*p as i64)));
            }
        }
        Ok(out)
    }

    /// Formal partial derivative, all jet coordinates independent.
    pub fn partial(&self, var: &JetVar) -> Expr {
        self.derive(&|v: &JetVar| Ok((v == var).then(Expr::one)))
            .expect("partial derivative is infallible")
    }

    /// Simultaneous substitution; variables missing from the map are kept.
    pub fn substitute(&self, map: &BTreeMap<JetVar, Expr>) -> Result<Expr> {
        self.substitute_with(&|v| map.get(v).cloned())
    }

    pub fn substitute_with<F>(&self, f: &F) -> Result<Expr>
    where
        F: Fn(&JetVar) -> Option<Expr>,
    {
        let mut out = Expr::zero();
        for (m, c) in self.terms() {
            let mut acc = Expr::constant(c.clone());
            let mut kept = Monomial::one();
            for (v, k) in m.vars() {
                match f(v) {
                    Some(e) => acc = &acc * &e.pow(*k)?,
                    None => kept = kept.with_var_power(v, *k),
                }
            }
            for (kernel, p) in m.kernels() {
                let arg = kernel.arg().substitute_with(f)?;
                let val = Expr::kernel(kernel.kind(), &arg)?;
                acc = &acc * &val.pow(*p as i32)?;
            }
            out += acc.mul_monomial(&kept, &Rational::one());
        }
        Ok(out)
    }

    /// Numeric evaluation; `pi` is built in, everything else comes from `env`.
    pub fn eval<F>(&self, env: &F) -> Result<f64>
    where
        F: Fn(&JetVar) -> Option<f64>,
    {
        let mut total = 0.0;
        for (m, c) in self.terms() {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (v, k) in m.vars() {
                let x = if v.is_pi() {
                    std::f64::consts::PI
                } else {
                    env(v).ok_or_else(|| Error::Unbound(format!("{v:?}")))?
                };
                t *= x.powi(*k);
            }
            for (kernel, p) in m.kernels() {
                let u = kernel.arg().eval(env)?;
                let val = match kernel.kind() {
                    KernelKind::Sin => u.sin(),
                    KernelKind::Cos => u.cos(),
                    KernelKind::Exp => u.exp(),
                };
                t *= val.powi(*p as i32);
            }
            total += t;
        }
        Ok(total)
    }

    /// Exact `∫₀¹ e dt` over the homotopy parameter.
    ///
    /// Supported: polynomial dependence on `t` with `t`-free kernels, and
    /// monomials `t^k·K(a·t + w)` with a single kernel `K` whose argument is
    /// affine in `t` with a nonzero rational slope `a`.
    pub fn integrate_homotopy(&self) -> Result<Expr> {
        let t = JetVar::Homotopy;
        let mut out = Expr::zero();
        for (m, c) in self.terms() {
            let k = m.exponent(&t);
            if k < 0 {
                return Err(Error::NonIntegrableKernel(Expr::term(m.clone(), c.clone()).to_string()));
            }
            let rest = m.clone().with_var_power(&t, -k);
            let t_kernels: Vec<usize> = rest
                .kernels()
                .iter()
                .enumerate()
                .filter(|(_, (kern, _))| kern.arg().contains_var(&t))
                .map(|(i, _)| i)
                .collect();
            match t_kernels.as_slice() {
                [] => {
                    let factor = c / int(k as i64 + 1);
                    out += Expr::term(rest, factor);
                }
                [idx] => {
                    let (kernel, p) = rest.kernels()[*idx].clone();
                    let reject = || Error::NonIntegrableKernel(Expr::term(m.clone(), c.clone()).to_string());
                    if p != 1 {
                        return Err(reject());
                    }
                    let (slope, offset) = split_affine(kernel.arg(), &t).ok_or_else(reject)?;
                    let outside = rest.clone().without_kernel_power(*idx);
                    let val = integrate_kernel_moment(k as u32, kernel.kind(), &slope, &offset)?;
                    out += val.mul_monomial(&outside, c);
                }
                _ => {
                    return Err(Error::NonIntegrableKernel(Expr::term(m.clone(), c.clone()).to_string()));
                }
            }
        }
        Ok(out)
    }
}

pub(super) fn kernel_expr(kind: KernelKind, arg: &Expr) -> Expr {
    let kernel = Kernel { kind, arg: Arc::new(arg.clone()) };
    Expr::term(Monomial { vars: vec![], kernels: vec![(kernel, 1)] }, Rational::one())
}

/// Writes `arg = a·t + w` with rational `a ≠ 0` and `w` free of `t`.
fn split_affine(arg: &Expr, t: &JetVar) -> Option<(Rational, Expr)> {
    let parts = arg.collect_powers(t);
    let mut slope = None;
    let mut offset = Expr::zero();
    for (k, coef) in parts {
        match k {
            0 => offset = coef,
            1 => slope = Some(coef.as_constant()?),
            _ => return None,
        }
    }
    let slope = slope?;
    (!slope.is_zero()).then_some((slope, offset))
}

/// `∫₀¹ t^k K(a t + w) dt` by repeated integration by parts.
fn integrate_kernel_moment(k: u32, kind: KernelKind, a: &Rational, w: &Expr) -> Result<Expr> {
    // Antiderivative of K(a t + w) in t, as (kind, factor).
    let (anti_kind, anti_factor) = match kind {
        KernelKind::Sin => (KernelKind::Cos, -a.recip()),
        KernelKind::Cos => (KernelKind::Sin, a.recip()),
        KernelKind::Exp => (KernelKind::Exp, a.recip()),
    };
    let at_one = Expr::kernel(anti_kind, &(w + &Expr::constant(a.clone())))?.scale(&anti_factor);
    if k == 0 {
        let at_zero = Expr::kernel(anti_kind, w)?.scale(&anti_factor);
        return Ok(at_one - at_zero);
    }
    let inner = integrate_kernel_moment(k - 1, anti_kind, a, w)?.scale(&(anti_factor * int(k as i64)));
    Ok(at_one - inner)
}
