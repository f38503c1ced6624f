use std::collections::BTreeMap;

use super::{coboundary, period_of_cochain, Cochain, Cover};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::varseq::{euler_lagrange, helmholtz_check, solve_current, tonti_lagrangian, AnsatzSpec, Current, Lagrangian, SourceForm};

/// Data produced by the connecting map on a source-form cocycle.
#[derive(Clone, Debug)]
pub struct DeltaResult {
    pub lagrangians: Cochain<Lagrangian>,
    pub d_lambda: Cochain<Lagrangian>,
    pub gamma: Cochain<Current>,
    pub periods: BTreeMap<String, f64>,
    pub nontrivial: bool,
}

/// Data produced by the connecting map on a locally `d_H`-exact Lagrangian cochain.
#[derive(Clone, Debug)]
pub struct DeltaPrimeResult {
    pub nu: Cochain<Current>,
    pub d_nu: Cochain<Current>,
    pub periods: BTreeMap<String, f64>,
    pub nontrivial: bool,
}

fn cochain_periods(
    cochain: &Cochain<Current>,
    cover: &Cover,
    nodes: usize,
    params: &BTreeMap<String, f64>,
    globally_trivial: bool,
) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for cycle in &cover.cycles {
        if cycle.patches.iter().any(|p| p.simplex.degree() != cochain.degree()) {
            continue;
        }
        let value = match period_of_cochain(cochain, cover, cycle, nodes, params) {
            Ok(v) => v,
            // a Čech-trivial cochain glues to a global potential: its periods vanish
            Err(Error::NotProjectable(_)) if globally_trivial => 0.0,
            Err(e) => return Err(e),
        };
        out.insert(cycle.name.clone(), value);
    }
    Ok(out)
}

fn nontrivial(periods: &BTreeMap<String, f64>, tolerance: f64) -> bool {
    periods.values().any(|p| p.abs() > tolerance)
}

fn solve_on_simplices(c: &Cochain<Lagrangian>, cover: &Cover, spec: &AnsatzSpec) -> Result<Cochain<Current>> {
    let ctx = cover.context();
    let spec = AnsatzSpec { angle_coordinates: cover.angle_vars(), ..spec.clone() };
    c.map(|_, l| solve_current(&ctx, l, &spec))
}

/// `delta(eta)`: local Lagrangians (supplied or Tonti about the origin), their
/// coboundary, its `d_H`-potential `gamma` and the periods of `gamma`.
pub fn connecting_delta(
    eta: &Cochain<SourceForm>,
    lagrangians: Option<&Cochain<Lagrangian>>,
    cover: &Cover,
    spec: &AnsatzSpec,
    nodes: usize,
    params: &BTreeMap<String, f64>,
    tolerance: f64,
) -> Result<DeltaResult> {
    let ctx = cover.context();
    if !coboundary(eta, cover)?.is_zero() {
        return Err(Error::NotClosed("source forms disagree on an overlap".into()));
    }
    let zero_center = vec![Expr::zero(); ctx.fiber_dim];
    let lagrangians = Cochain::from_charts(cover, |i| {
        let eta_i = eta.chart(i).ok_or_else(|| Error::TransitionMissing(cover.charts[i].name.clone()))?;
        if !helmholtz_check(&ctx, eta_i)?.is_locally_variational {
            return Err(Error::NotLocallyVariational);
        }
        match lagrangians.and_then(|c| c.chart(i)) {
            Some(l) => {
                if &euler_lagrange(&ctx, l)? != eta_i {
                    return Err(Error::InconsistentPair);
                }
                Ok(l.clone())
            }
            None => tonti_lagrangian(&ctx, eta_i, &zero_center),
        }
    })?;
    let d_lambda = coboundary(&lagrangians, cover)?;
    let gamma = solve_on_simplices(&d_lambda, cover, spec)?;
    let periods = cochain_periods(&gamma, cover, nodes, params, d_lambda.is_zero())?;
    let nontrivial = nontrivial(&periods, tolerance);
    Ok(DeltaResult { lagrangians, d_lambda, gamma, periods, nontrivial })
}

/// `delta'(mu)`: chartwise potentials `nu_i` with `d_H nu_i = mu_i`, their
/// coboundary and the periods of the glued form `d_Y nu`.
pub fn connecting_delta_prime(
    mu: &Cochain<Lagrangian>,
    cover: &Cover,
    spec: &AnsatzSpec,
    nodes: usize,
    params: &BTreeMap<String, f64>,
    tolerance: f64,
) -> Result<DeltaPrimeResult> {
    let nu = solve_on_simplices(mu, cover, spec)?;
    let d_nu = coboundary(&nu, cover)?;
    let periods = cochain_periods(&nu, cover, nodes, params, d_nu.is_zero())?;
    let nontrivial = nontrivial(&periods, tolerance);
    Ok(DeltaPrimeResult { nu, d_nu, periods, nontrivial })
}
