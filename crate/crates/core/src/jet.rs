use crate::error::{Error, Result};
use crate::expr::{Expr, JetVar, MultiIndex};

/// Default cap on the differential order of jet coordinates produced by
/// total derivatives.
pub const DEFAULT_MAX_ORDER: usize = 8;

/// Dimensions of the fibered manifold `Y → X` and the jet-order cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetContext {
    /// `n = dim X`.
    pub base_dim: usize,
    /// `m = dim Y - dim X`.
    pub fiber_dim: usize,
    pub max_order: usize,
}

impl JetContext {
    pub fn new(base_dim: usize, fiber_dim: usize) -> Self {
        JetContext { base_dim, fiber_dim, max_order: DEFAULT_MAX_ORDER }
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn base_indices(&self) -> impl Iterator<Item = u8> {
        0..self.base_dim as u8
    }

    pub fn fiber_indices(&self) -> impl Iterator<Item = u8> {
        0..self.fiber_dim as u8
    }

    /// Multi-indices of order `0..=order`.
    pub fn multi_indices(&self, order: usize) -> Vec<MultiIndex> {
        MultiIndex::all_up_to(self.base_dim, order)
    }

    /// Total derivative `D_mu = ∂_mu + Σ y^a_{I mu} ∂/∂y^a_I` (test fields
    /// are prolonged the same way).
    pub fn total_derivative(&self, e: &Expr, mu: u8) -> Result<Expr> {
        let cap = self.max_order;
        e.derive(&|v: &JetVar| -> Result<Option<Expr>> {
            Ok(match v {
                JetVar::Base(nu) => (*nu == mu).then(Expr::one),
                JetVar::Field(a, idx) => {
                    let next = idx.with(mu);
                    if next.order() > cap {
                        return Err(Error::MaxOrderExceeded { order: next.order(), cap });
                    }
                    Some(Expr::var(JetVar::Field(*a, next)))
                }
                JetVar::Test(a, idx) => Some(Expr::var(JetVar::Test(*a, idx.with(mu)))),
                JetVar::Param(_) | JetVar::Homotopy => None,
            })
        })
    }

    /// `D_I e`.
    pub fn total_derivative_multi(&self, e: &Expr, idx: &MultiIndex) -> Result<Expr> {
        let mut out = e.clone();
        for &mu in idx.entries() {
            out = self.total_derivative(&out, mu)?;
        }
        Ok(out)
    }

    /// Checks that all coordinates of `e` lie within the declared dimensions.
    pub fn check_expr(&self, e: &Expr) -> Result<()> {
        for v in e.vars() {
            let ok = match &v {
                JetVar::Base(mu) => (*mu as usize) < self.base_dim,
                JetVar::Field(a, idx) | JetVar::Test(a, idx) => {
                    (*a as usize) < self.fiber_dim
                        && idx.entries().iter().all(|&mu| (mu as usize) < self.base_dim)
                }
                JetVar::Param(_) | JetVar::Homotopy => true,
            };
            if !ok {
                return Err(Error::DimensionMismatch(format!(
                    "coordinate {v:?} outside n = {}, m = {}",
                    self.base_dim, self.fiber_dim
                )));
            }
        }
        Ok(())
    }
}
