use std::collections::BTreeMap;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use super::{cycle_parameter, Cochain, Cover, Cycle, CyclePatch};
use crate::error::{Error, Result};
use crate::expr::{Expr, JetVar};
use crate::forms::{Covector, Form};
use crate::varseq::Current;

/// Gauss–Legendre nodes per axis unless configured otherwise.
pub const DEFAULT_QUAD_NODES: usize = 64;

/// Periods smaller than this in absolute value count as zero.
pub const PERIOD_TOLERANCE: f64 = 1e-8;

/// Differential form on `Y` in the coordinate basis `dz^k`, where
/// `z = (x^0…x^{n-1}, y^0…y^{m-1})`; coefficients depend on `z` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleForm {
    base_dim: usize,
    fiber_dim: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Expr>,
}

fn coordinate(base_dim: usize, k: usize) -> JetVar {
    if k < base_dim {
        JetVar::Base(k as u8)
    } else {
        JetVar::field((k - base_dim) as u8, &[])
    }
}

impl BundleForm {
    pub fn zero(base_dim: usize, fiber_dim: usize, degree: usize) -> Self {
        BundleForm { base_dim, fiber_dim, degree, terms: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_projectable(e: &Expr) -> Result<()> {
        if e.jet_order() > 0 || e.depends_on(|v| matches!(v, JetVar::Test(..) | JetVar::Homotopy)) {
            return Err(Error::NotProjectable(e.to_string()));
        }
        Ok(())
    }

    /// `c dz^{k1} ∧ … ∧ dz^{kd}` with the indices in any order.
    pub fn term(base_dim: usize, fiber_dim: usize, mut indices: Vec<usize>, c: Expr) -> Result<Self> {
        Self::check_projectable(&c)?;
        let mut out = BundleForm::zero(base_dim, fiber_dim, indices.len());
        let mut odd = false;
        for i in 1..indices.len() {
            let mut j = i;
            while j > 0 && indices[j - 1] > indices[j] {
                indices.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) || c.is_zero() {
            return Ok(out);
        }
        out.terms.insert(indices, if odd { -c } else { c });
        Ok(out)
    }

    pub fn add(&self, other: &BundleForm) -> BundleForm {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            let slot = out.terms.entry(k.clone()).or_default();
            *slot += c;
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Reads a contact-free form whose coefficients depend on `(x, y)` only.
    pub fn from_horizontal(form: &Form) -> Result<Self> {
        let (n, m) = form.dims();
        let mut out = BundleForm::zero(n, m, form.degree());
        for (factors, c) in form.terms() {
            let indices = factors
                .iter()
                .map(|cv| match cv {
                    Covector::Dx(mu) => Ok(*mu as usize),
                    Covector::Theta(..) => Err(Error::NotProjectable("contact factor".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            out = out.add(&BundleForm::term(n, m, indices, c.clone())?);
        }
        Ok(out)
    }

    /// Exterior derivative on `Y`.
    pub fn d(&self) -> Result<BundleForm> {
        let dim = self.base_dim + self.fiber_dim;
        let mut out = BundleForm::zero(self.base_dim, self.fiber_dim, self.degree + 1);
        for (indices, c) in &self.terms {
            for k in 0..dim {
                let dc = c.partial(&coordinate(self.base_dim, k));
                if dc.is_zero() {
                    continue;
                }
                let mut idx = vec![k];
                idx.extend(indices.iter().copied());
                out = out.add(&BundleForm::term(self.base_dim, self.fiber_dim, idx, dc)?);
            }
        }
        Ok(out)
    }
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * y;
            }
        }
    }
    det
}

fn patch_integral(
    form: &BundleForm,
    patch: &CyclePatch,
    dim: usize,
    nodes: usize,
    params: &BTreeMap<String, f64>,
) -> Result<f64> {
    let total_dim = form.base_dim + form.fiber_dim;
    if patch.coords.len() != total_dim {
        return Err(Error::ChartMismatch(format!(
            "patch has {} coordinates, the bundle has {}",
            patch.coords.len(),
            total_dim
        )));
    }
    let jacobian: Vec<Vec<Expr>> = patch
        .coords
        .iter()
        .map(|z| (0..dim).map(|j| z.partial(&cycle_parameter(j))).collect())
        .collect();
    let rule = GaussLegendre::new(NonZeroUsize::new(nodes.max(1)).expect("nonzero"));
    let pairs: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();

    let mut total = 0.0;
    let mut grid: Vec<usize> = vec![0; dim];
    loop {
        let s: Vec<f64> = grid.iter().map(|&i| pairs[i].0).collect();
        let weight: f64 = grid.iter().map(|&i| pairs[i].1).product();
        let param_env = |v: &JetVar| -> Option<f64> {
            match v {
                JetVar::Param(p) => {
                    let name: &str = p;
                    name.strip_prefix('s')
                        .and_then(|k| k.parse::<usize>().ok())
                        .filter(|&k| k < dim)
                        .map(|k| s[k])
                        .or_else(|| params.get(name).copied())
                }
                _ => None,
            }
        };
        let z: Vec<f64> = patch.coords.iter().map(|e| e.eval(&param_env)).collect::<Result<_>>()?;
        let point_env = |v: &JetVar| -> Option<f64> {
            match v {
                JetVar::Base(mu) => Some(z[*mu as usize]),
                JetVar::Field(a, idx) if idx.order() == 0 => Some(z[form.base_dim + *a as usize]),
                JetVar::Param(_) => param_env(v),
                _ => None,
            }
        };
        let jac: Vec<Vec<f64>> = jacobian
            .iter()
            .map(|row| row.iter().map(|e| e.eval(&param_env)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        for (indices, c) in &form.terms {
            let minor: Vec<Vec<f64>> = indices.iter().map(|&k| jac[k].clone()).collect();
            total += weight * c.eval(&point_env)? * determinant(minor);
        }

        let mut axis = 0;
        loop {
            if axis == dim {
                return Ok(total);
            }
            grid[axis] += 1;
            if grid[axis] < pairs.len() {
                break;
            }
            grid[axis] = 0;
            axis += 1;
        }
    }
}

/// Integral of `form` over `cycle` by tensor Gauss–Legendre quadrature.
pub fn period(form: &BundleForm, cycle: &Cycle, nodes: usize, params: &BTreeMap<String, f64>) -> Result<f64> {
    if form.degree != cycle.dim {
        return Err(Error::ChartMismatch(format!(
            "{}-form integrated over {}-dimensional cycle `{}`",
            form.degree, cycle.dim, cycle.name
        )));
    }
    let mut total = 0.0;
    for patch in &cycle.patches {
        total += patch_integral(form, patch, cycle.dim, nodes, params)?;
    }
    Ok(total)
}

/// Period of the glued closed form `d_Y c` of a cochain of projectable
/// currents over a cycle whose patches lie on simplices of the cochain's degree.
pub fn period_of_cochain(
    cochain: &Cochain<Current>,
    cover: &Cover,
    cycle: &Cycle,
    nodes: usize,
    params: &BTreeMap<String, f64>,
) -> Result<f64> {
    let mut total = 0.0;
    for patch in &cycle.patches {
        if patch.simplex.degree() != cochain.degree() {
            return Err(Error::ChartMismatch(format!(
                "cycle `{}` lives on {}-simplices, cochain has degree {}",
                cycle.name,
                patch.simplex.degree(),
                cochain.degree()
            )));
        }
        let value = cochain
            .get(&patch.simplex)
            .ok_or_else(|| Error::ChartMismatch(format!("no value on {}", cover.simplex_label(&patch.simplex))))?;
        let omega = BundleForm::from_horizontal(value.form())?.d()?;
        if omega.degree != cycle.dim {
            return Err(Error::ChartMismatch(format!(
                "{}-form integrated over {}-dimensional cycle `{}`",
                omega.degree, cycle.dim, cycle.name
            )));
        }
        total += patch_integral(&omega, patch, cycle.dim, nodes, params)?;
    }
    Ok(total)
}
