//! Exact symbolic expressions over jet coordinates.
//!
//! An [`Expr`] is a canonical sum of monomials. Each monomial carries an exact
//! rational coefficient, integer powers of [`JetVar`]s and powers of the
//! kernels `sin(u)`, `cos(u)`, `exp(u)` whose arguments are themselves
//! kernel-free. Every constructor and arithmetic operation returns the unique
//! normal form, so structural equality decides equality:
//!
//! * `cos(u)` appears with exponent 0 or 1; `cos²u` is rewritten as `1 - sin²u`;
//! * at most one `exp` factor per monomial, `exp(u)·exp(v) = exp(u+v)`;
//! * kernel arguments have a positive leading coefficient and their `pi`
//!   multiple reduced modulo `2·pi`, with quarter turns rotated away.

mod calculus;
mod display;
mod tree;
mod var;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use display::{Naming, ExprDisplay};
pub use tree::{normalize, Tree};
pub use var::{JetVar, MultiIndex, PI_NAME};

/// Exact coefficient ring.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KernelKind {
    Sin,
    Cos,
    Exp,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Sin => "sin",
            KernelKind::Cos => "cos",
            KernelKind::Exp => "exp",
        }
    }
}

/// An elementary function applied to a kernel-free argument.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Kernel {
    kind: KernelKind,
    arg: Arc<Expr>,
}

impl Kernel {
    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn arg(&self) -> &Expr {
        &self.arg
    }
}

/// Product of variable powers and kernel powers (coefficient kept outside).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    vars: Vec<(JetVar, i32)>,
    kernels: Vec<(Kernel, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: JetVar) -> Self {
        Monomial { vars: vec![(v, 1)], kernels: Vec::new() }
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty() && self.kernels.is_empty()
    }

    pub fn vars(&self) -> &[(JetVar, i32)] {
        &self.vars
    }

    pub fn kernels(&self) -> &[(Kernel, u32)] {
        &self.kernels
    }

    pub fn exponent(&self, v: &JetVar) -> i32 {
        self.vars.iter().find(|(w, _)| w == v).map_or(0, |(_, k)| *k)
    }

    pub fn has_kernels(&self) -> bool {
        !self.kernels.is_empty()
    }

    /// The monomial restricted to the variables accepted by `keep`, kernels dropped.
    pub fn vars_only(&self, keep: impl Fn(&JetVar) -> bool) -> Monomial {
        Monomial {
            vars: self.vars.iter().filter(|(v, _)| keep(v)).cloned().collect(),
            kernels: Vec::new(),
        }
    }

    /// Kernel part of the monomial.
    pub fn kernel_part(&self) -> Monomial {
        Monomial { vars: Vec::new(), kernels: self.kernels.clone() }
    }

    /// Total degree in the variables accepted by `pred`.
    pub fn degree_in(&self, pred: impl Fn(&JetVar) -> bool) -> i32 {
        self.vars.iter().filter(|(v, _)| pred(v)).map(|(_, k)| *k).sum()
    }

    fn with_var_power(mut self, v: &JetVar, delta: i32) -> Monomial {
        match self.vars.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => {
                self.vars[i].1 += delta;
                if self.vars[i].1 == 0 {
                    self.vars.remove(i);
                }
            }
            Err(i) => {
                if delta != 0 {
                    self.vars.insert(i, (v.clone(), delta));
                }
            }
        }
        self
    }

    fn without_kernel_power(mut self, idx: usize) -> Monomial {
        if self.kernels[idx].1 == 1 {
            self.kernels.remove(idx);
        } else {
            self.kernels[idx].1 -= 1;
        }
        self
    }

    /// Raw product; kernels merged by identical (kind, argument), exp factors
    /// collapsed. The cos-power rewrite is applied by [`Expr::from_monomial_raw`].
    fn raw_product(&self, other: &Monomial) -> Monomial {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() && j < other.vars.len() {
            match self.vars[i].0.cmp(&other.vars[j].0) {
                std::cmp::Ordering::Less => {
                    vars.push(self.vars[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    vars.push(other.vars[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let k = self.vars[i].1 + other.vars[j].1;
                    if k != 0 {
                        vars.push((self.vars[i].0.clone(), k));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        vars.extend_from_slice(&self.vars[i..]);
        vars.extend_from_slice(&other.vars[j..]);

        let mut kernels: Vec<(Kernel, u32)> = Vec::new();
        let mut exp_arg: Option<Expr> = None;
        for (k, p) in self.kernels.iter().chain(other.kernels.iter()) {
            if k.kind == KernelKind::Exp {
                let scaled = &*k.arg * &Expr::constant(int(*p as i64));
                exp_arg = Some(match exp_arg {
                    Some(acc) => acc + scaled,
                    None => scaled,
                });
                continue;
            }
            match kernels.binary_search_by(|(w, _)| w.cmp(k)) {
                Ok(idx) => kernels[idx].1 += p,
                Err(idx) => kernels.insert(idx, (k.clone(), *p)),
            }
        }
        if let Some(arg) = exp_arg {
            if !arg.is_zero() {
                let k = Kernel { kind: KernelKind::Exp, arg: Arc::new(arg) };
                let idx = kernels.partition_point(|(w, _)| w < &k);
                kernels.insert(idx, (k, 1));
            }
        }
        Monomial { vars, kernels }
    }
}

/// Canonical sum of monomials with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(Monomial::one(), c);
        e
    }

    pub fn int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        Self::constant(rat(n, d))
    }

    pub fn var(v: JetVar) -> Self {
        Self::term(Monomial::var(v), Rational::one())
    }

    pub fn base(mu: u8) -> Self {
        Self::var(JetVar::Base(mu))
    }

    pub fn field(a: u8, idx: &[u8]) -> Self {
        Self::var(JetVar::field(a, idx))
    }

    pub fn param(name: &str) -> Self {
        Self::var(JetVar::param(name))
    }

    pub fn pi() -> Self {
        Self::var(JetVar::pi())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The value if the expression is a rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// The single monomial and coefficient, if the expression has exactly one term.
    pub fn as_monomial(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Builds an expression from a raw monomial product, applying the
    /// `cos² = 1 - sin²` rewrite.
    fn from_monomial_raw(m: Monomial, c: Rational) -> Expr {
        let pos = m.kernels.iter().position(|(k, p)| k.kind == KernelKind::Cos && *p >= 2);
        let Some(pos) = pos else {
            return Expr::term(m, c);
        };
        let (cos_kernel, p) = m.kernels[pos].clone();
        let mut rest = m;
        if p % 2 == 1 {
            rest.kernels[pos].1 = 1;
        } else {
            rest.kernels.remove(pos);
        }
        let sin = Kernel { kind: KernelKind::Sin, arg: cos_kernel.arg.clone() };
        let sin2 = Expr::term(Monomial { vars: vec![], kernels: vec![(sin, 2)] }, Rational::one());
        let factor = Expr::one() - sin2;
        let mut acc = Expr::from_monomial_raw(rest, c);
        for _ in 0..p / 2 {
            acc = &acc * &factor;
        }
        acc
    }

    fn mul_monomials(a: &Monomial, ca: &Rational, b: &Monomial, cb: &Rational) -> Expr {
        Expr::from_monomial_raw(a.raw_product(b), ca * cb)
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    /// Multiplies by a single monomial (with coefficient).
    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Expr {
        let mut out = Expr::zero();
        for (m2, c2) in &self.terms {
            out += Expr::mul_monomials(m, c, m2, c2);
        }
        out
    }

    /// Integer power; negative exponents need a monomial without sin/cos.
    pub fn pow(&self, k: i32) -> Result<Expr> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a monomial whose kernels are all `exp`.
    pub fn inverse(&self) -> Result<Expr> {
        let Some((m, c)) = self.as_monomial() else {
            return Err(Error::NonMonomialDivisor(self.to_string()));
        };
        if m.kernels.iter().any(|(k, _)| k.kind != KernelKind::Exp) {
            return Err(Error::NonMonomialDivisor(self.to_string()));
        }
        let vars = m.vars.iter().map(|(v, k)| (v.clone(), -k)).collect();
        let kernels = m
            .kernels
            .iter()
            .map(|(k, _)| (Kernel { kind: KernelKind::Exp, arg: Arc::new(-&*k.arg) }, 1))
            .collect();
        Ok(Expr::term(Monomial { vars, kernels }, c.recip()))
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr> {
        Ok(self * &other.inverse()?)
    }

    pub fn sin(u: &Expr) -> Result<Expr> {
        Self::kernel(KernelKind::Sin, u)
    }

    pub fn cos(u: &Expr) -> Result<Expr> {
        Self::kernel(KernelKind::Cos, u)
    }

    pub fn exp(u: &Expr) -> Result<Expr> {
        Self::kernel(KernelKind::Exp, u)
    }

    /// Applies a kernel to a kernel-free argument and returns the canonical form.
    pub fn kernel(kind: KernelKind, u: &Expr) -> Result<Expr> {
        if u.has_kernels() {
            return Err(Error::KernelDepthExceeded(u.to_string()));
        }
        let mk = |k: KernelKind, arg: Expr| -> Expr {
            if arg.is_zero() {
                return match k {
                    KernelKind::Sin => Expr::zero(),
                    KernelKind::Cos | KernelKind::Exp => Expr::one(),
                };
            }
            let kernel = Kernel { kind: k, arg: Arc::new(arg) };
            Expr::term(Monomial { vars: vec![], kernels: vec![(kernel, 1)] }, Rational::one())
        };
        if kind == KernelKind::Exp {
            return Ok(mk(kind, u.clone()));
        }

        // Split off the rational multiple of pi.
        let pi_mono = Monomial::var(JetVar::pi());
        let mut s = u.terms.get(&pi_mono).cloned().unwrap_or_else(Rational::zero);
        let mut rest = u.clone();
        rest.terms.remove(&pi_mono);

        let mut sign = Rational::one();
        if let Some((_, lead)) = rest.terms.iter().next() {
            if lead.is_negative() {
                rest = -rest;
                s = -s;
                if kind == KernelKind::Sin {
                    sign = -sign;
                }
            }
        }
        // s mod 2
        let two = int(2);
        s = &s - &two * (&s / &two).floor();

        let twice = &s * &two;
        if twice.is_integer() {
            let quarter = twice.to_integer().to_i64().unwrap_or(0);
            let (k, neg) = match (kind, quarter) {
                (KernelKind::Sin, 0) => (KernelKind::Sin, false),
                (KernelKind::Sin, 1) => (KernelKind::Cos, false),
                (KernelKind::Sin, 2) => (KernelKind::Sin, true),
                (KernelKind::Sin, _) => (KernelKind::Cos, true),
                (KernelKind::Cos, 0) => (KernelKind::Cos, false),
                (KernelKind::Cos, 1) => (KernelKind::Sin, true),
                (KernelKind::Cos, 2) => (KernelKind::Cos, true),
                (KernelKind::Cos, _) => (KernelKind::Sin, false),
                (KernelKind::Exp, _) => unreachable!(),
            };
            let val = mk(k, rest);
            let sign = if neg { -sign } else { sign };
            return Ok(val.scale(&sign));
        }
        let mut arg = rest;
        arg.add_term(pi_mono, s);
        Ok(mk(kind, arg).scale(&sign))
    }

    pub fn has_kernels(&self) -> bool {
        self.terms.keys().any(|m| m.has_kernels())
    }

    /// Every variable occurring anywhere, kernel arguments included.
    pub fn vars(&self) -> BTreeSet<JetVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<JetVar>) {
        for m in self.terms.keys() {
            for (v, _) in &m.vars {
                out.insert(v.clone());
            }
            for (k, _) in &m.kernels {
                k.arg.collect_vars(out);
            }
        }
    }

    pub fn depends_on(&self, pred: impl Fn(&JetVar) -> bool) -> bool {
        self.vars().iter().any(pred)
    }

    pub fn contains_var(&self, v: &JetVar) -> bool {
        self.depends_on(|w| w == v)
    }

    /// Highest differential order of any field coordinate (0 if none).
    pub fn jet_order(&self) -> usize {
        self.vars().iter().filter(|v| v.is_field()).map(|v| v.order()).max().unwrap_or(0)
    }

    /// True if no jet coordinate, test field or homotopy parameter occurs.
    pub fn is_base_only(&self) -> bool {
        !self.depends_on(|v| !matches!(v, JetVar::Base(_) | JetVar::Param(_)))
    }

    /// Coefficient of the given monomial.
    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Collects terms by the power of `v`: returns `(k, coefficient expr)` pairs.
    pub fn collect_powers(&self, v: &JetVar) -> BTreeMap<i32, Expr> {
        let mut out: BTreeMap<i32, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.exponent(v);
            let rest = m.clone().with_var_power(v, -k);
            out.entry(k).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Splits into parts grouped by a key computed from each monomial.
    pub fn group_by<K: Ord>(&self, key: impl Fn(&Monomial) -> K) -> BTreeMap<K, Expr> {
        let mut out: BTreeMap<K, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(key(m)).or_default().add_term(m.clone(), c.clone());
        }
        out
    }

    /// Sum of `c * m` over the given terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Expr {
        let mut e = Expr::zero();
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<JetVar> for Expr {
    fn from(v: JetVar) -> Self {
        Expr::var(v)
    }
}

impl AddAssign<Expr> for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign<Expr> for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add<Expr> for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        self += rhs;
        self
    }
}

impl Add<&Expr> for Expr {
    type Output = Expr;
    fn add(mut self, rhs: &Expr) -> Expr {
        self += rhs;
        self
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub<Expr> for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: Expr) -> Expr {
        self -= rhs;
        self
    }
}

impl Sub<&Expr> for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: &Expr) -> Expr {
        self -= rhs;
        self
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out += Expr::mul_monomials(m1, c1, m2, c2);
            }
        }
        out
    }
}

impl Mul<Expr> for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl Mul<&Expr> for Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        &self * rhs
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc += e;
        }
        acc
    }
}
