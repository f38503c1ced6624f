use num_traits::One;

use super::{Expr, JetVar, KernelKind, Rational};
use crate::error::{Error, Result};

/// Unnormalized expression syntax, as produced by a parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Num(Rational),
    Var(JetVar),
    Neg(Box<Tree>),
    Add(Vec<Tree>),
    Mul(Vec<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
    Pow(Box<Tree>, i32),
    Call(KernelKind, Box<Tree>),
}

/// Evaluates a syntax tree into its canonical [`Expr`].
pub fn normalize(tree: &Tree) -> Result<Expr> {
    Ok(match tree {
        Tree::Num(c) => Expr::constant(c.clone()),
        Tree::Var(v) => Expr::var(v.clone()),
        Tree::Neg(a) => -normalize(a)?,
        Tree::Add(items) => {
            let mut acc = Expr::zero();
            for t in items {
                acc += normalize(t)?;
            }
            acc
        }
        Tree::Mul(items) => {
            let mut acc = Expr::one();
            for t in items {
                acc = &acc * &normalize(t)?;
            }
            acc
        }
        Tree::Sub(a, b) => normalize(a)? - normalize(b)?,
        Tree::Div(a, b) => normalize(a)?.checked_div(&normalize(b)?)?,
        Tree::Pow(a, k) => normalize(a)?.pow(*k)?,
        Tree::Call(kind, a) => {
            let arg = normalize(a)?;
            if arg.has_kernels() {
                return Err(Error::KernelDepthExceeded(arg.to_string()));
            }
            Expr::kernel(*kind, &arg)?
        }
    })
}

impl Expr {
    /// Syntax tree reproducing this expression.
    pub fn to_tree(&self) -> Tree {
        let terms = self
            .terms()
            .map(|(m, c)| {
                let mut factors = Vec::new();
                if !c.is_one() || m.is_one() {
                    factors.push(Tree::Num(c.clone()));
                }
                for (v, k) in m.vars() {
                    let t = Tree::Var(v.clone());
                    factors.push(if *k == 1 { t } else { Tree::Pow(Box::new(t), *k) });
                }
                for (kern, p) in m.kernels() {
                    let t = Tree::Call(kern.kind(), Box::new(kern.arg().to_tree()));
                    factors.push(if *p == 1 { t } else { Tree::Pow(Box::new(t), *p as i32) });
                }
                Tree::Mul(factors)
            })
            .collect();
        Tree::Add(terms)
    }

    /// Re-canonicalizes from scratch; the identity on values built through
    /// the public API.
    pub fn normalize(&self) -> Expr {
        normalize(&self.to_tree()).expect("canonical expressions renormalize")
    }
}
