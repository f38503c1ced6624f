//! Oracles that do not go through the symbolic normal form: explicit
//! polynomial sections evaluated by the power rule, finite differences,
//! Gauss–Legendre actions and numerically integrated flows.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varseq_core::{Expr, JetVar};

/// Real polynomial in `n` variables, exponent vector to coefficient.
#[derive(Clone, Debug, Default)]
pub struct Poly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn random(rng: &mut ChaCha8Rng, n: usize, degree: u32, terms: usize) -> Self {
        let mut p = Poly::zero(n);
        for _ in 0..terms {
            let exps: Vec<u32> = (0..n).map(|_| rng.random_range(0..=degree)).collect();
            let c: f64 = rng.random_range(-1.0..1.0);
            *p.terms.entry(exps).or_insert(0.0) += c;
        }
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Partial derivative along the listed directions, by the power rule.
    pub fn derivative(&self, dirs: &[u8]) -> Poly {
        let mut out = self.clone();
        for &mu in dirs {
            let mut next = Poly::zero(self.n);
            for (e, c) in &out.terms {
                let k = e[mu as usize];
                if k == 0 {
                    continue;
                }
                let mut e2 = e.clone();
                e2[mu as usize] -= 1;
                *next.terms.entry(e2).or_insert(0.0) += c * f64::from(k);
            }
            out = next;
        }
        out
    }

    pub fn add_scaled(&self, other: &Poly, s: f64) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(e.clone()).or_insert(0.0) += s * c;
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *out.terms.entry(e).or_insert(0.0) += c1 * c2;
            }
        }
        out
    }

    /// `prod_mu (x_mu (1 - x_mu))^k`: vanishes with its first `k-1`
    /// derivatives on the boundary of the unit cube.
    pub fn bump(n: usize, k: u32) -> Poly {
        let mut out = Poly { n, terms: [(vec![0; n], 1.0)].into() };
        for mu in 0..n {
            let mut factor = Poly::zero(n);
            // (x - x^2)^k by the binomial theorem
            for j in 0..=k {
                let mut e = vec![0; n];
                e[mu] = k + j;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                factor.terms.insert(e, sign * binomial(k, j));
            }
            out = out.mul(&factor);
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// A section `x ↦ (s^0(x), …, s^{m-1}(x))` with polynomial components.
#[derive(Clone, Debug)]
pub struct Section {
    pub components: Vec<Poly>,
}

impl Section {
    pub fn random(seed: u64, n: usize, m: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Section { components: (0..m).map(|_| Poly::random(&mut rng, n, 3, 5)).collect() }
    }

    pub fn perturbed(&self, h: &[Poly], eps: f64) -> Section {
        Section { components: self.components.iter().zip(h).map(|(s, hh)| s.add_scaled(hh, eps)).collect() }
    }

    /// Value of a jet variable on the prolonged section at `x`.
    pub fn jet_value(&self, v: &JetVar, x: &[f64], params: &BTreeMap<String, f64>) -> Option<f64> {
        match v {
            JetVar::Base(mu) => x.get(*mu as usize).copied(),
            JetVar::Field(a, idx) => Some(self.components[*a as usize].derivative(idx.entries()).eval(x)),
            JetVar::Param(p) => params.get(&**p).copied(),
            _ => None,
        }
    }

    /// Evaluates `e` on the prolonged section at `x`.
    pub fn eval(&self, e: &Expr, x: &[f64], params: &BTreeMap<String, f64>) -> f64 {
        let values: BTreeMap<JetVar, f64> =
            e.vars().into_iter().filter_map(|v| self.jet_value(&v, x, params).map(|val| (v, val))).collect();
        e.eval(&|v: &JetVar| values.get(v).copied()).expect("all variables bound")
    }
}

/// Fourth-order central difference of `f` at 0.
pub fn central_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

/// Gauss–Legendre integral over `[0,1]^n`.
pub fn integrate_cube(n: usize, nodes: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(nodes).unwrap());
    let pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let mut total = 0.0;
    let mut grid = vec![0usize; n];
    loop {
        let x: Vec<f64> = grid.iter().map(|&i| pairs[i].0).collect();
        let w: f64 = grid.iter().map(|&i| pairs[i].1).product();
        total += w * f(&x);
        let mut axis = 0;
        loop {
            if axis == n {
                return total;
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

/// Gateaux derivative of the action `∫_{[0,1]^n} L(j s)` in direction `h`,
/// by finite differences in the perturbation size.
pub fn gateaux_action(l: &Expr, s: &Section, h: &[Poly], params: &BTreeMap<String, f64>) -> f64 {
    let n = s.components[0].n;
    let action = |eps: f64| {
        let se = s.perturbed(h, eps);
        integrate_cube(n, 16, |x| se.eval(l, x, params))
    };
    central_difference(action, 1e-3)
}

/// `∫ Σ_a E_a(j s) h^a` over the unit cube.
pub fn paired_source(components: &[Expr], s: &Section, h: &[Poly], params: &BTreeMap<String, f64>) -> f64 {
    let n = s.components[0].n;
    integrate_cube(n, 16, |x| components.iter().zip(h).map(|(e, hh)| s.eval(e, x, params) * hh.eval(x)).sum())
}

/// Compactly supported variation directions, one per field.
pub fn variations(seed: u64, n: usize, m: usize) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| Poly::bump(n, 5).mul(&Poly::random(&mut rng, n, 2, 3))).collect()
}

/// First prolongation component of a projectable field on `R × R` by
/// pushing a section forward along the numerically integrated flow.
///
/// `xi(t)` and `big_xi(t, y)` are the components; returns `d/deps` of the
/// first derivative of the pushed section, at the image of `t0`.
pub fn flow_prolongation(
    xi: &dyn Fn(f64) -> f64,
    big_xi: &dyn Fn(f64, f64) -> f64,
    s: &dyn Fn(f64) -> f64,
    t0: f64,
) -> f64 {
    let flow = |eps: f64, t: f64, y: f64| -> (f64, f64) {
        // RK4 with a few steps; eps is small
        let steps = 8;
        let dt = eps / steps as f64;
        let (mut t, mut y) = (t, y);
        for _ in 0..steps {
            let f = |t: f64, y: f64| (xi(t), big_xi(t, y));
            let k1 = f(t, y);
            let k2 = f(t + 0.5 * dt * k1.0, y + 0.5 * dt * k1.1);
            let k3 = f(t + 0.5 * dt * k2.0, y + 0.5 * dt * k2.1);
            let k4 = f(t + dt * k3.0, y + dt * k3.1);
            t += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            y += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        (t, y)
    };
    // slope of the pushed section at the image point of t0
    let slope = |eps: f64| {
        let d = 1e-4;
        let (ta, ya) = flow(eps, t0 - d, s(t0 - d));
        let (tb, yb) = flow(eps, t0 + d, s(t0 + d));
        (yb - ya) / (tb - ta)
    };
    (slope(1e-3) - slope(-1e-3)) / 2e-3
}

/// Dense univariate polynomial arithmetic, for expansion oracles.
pub fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

pub fn no_params() -> BTreeMap<String, f64> {
    BTreeMap::new()
}

/// Relative closeness with an absolute floor.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

impl Poly {
    /// `self(p_0, …, p_{k-1})` for polynomials `p_i` in `n` variables.
    pub fn compose(&self, inputs: &[Poly], n: usize) -> Poly {
        let mut out = Poly::zero(n);
        for (e, c) in &self.terms {
            let mut term = Poly { n, terms: [(vec![0; n], *c)].into() };
            for (k, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    term = term.mul(&inputs[k]);
                }
            }
            out = out.add_scaled(&term, 1.0);
        }
        out
    }

    /// The coordinate function `x_k` among `n` variables.
    pub fn coordinate(n: usize, k: usize) -> Poly {
        let mut e = vec![0; n];
        e[k] = 1;
        Poly { n, terms: [(e, 1.0)].into() }
    }
}

/// Converts an expression polynomial in `(x, y)` (no kernels, no
/// parameters) into a real polynomial in `n + m` variables.
pub fn to_poly(e: &Expr, n: usize, m: usize) -> Poly {
    let mut out = Poly::zero(n + m);
    for (mono, c) in e.terms() {
        assert!(!mono.has_kernels());
        let mut exps = vec![0u32; n + m];
        for (v, k) in mono.vars() {
            let slot = match v {
                JetVar::Base(mu) => *mu as usize,
                JetVar::Field(a, idx) if idx.order() == 0 => n + *a as usize,
                other => panic!("unexpected variable {other:?}"),
            };
            exps[slot] = *k as u32;
        }
        let c: f64 = num_traits_to_f64(c);
        *out.terms.entry(exps).or_insert(0.0) += c;
    }
    out
}

fn num_traits_to_f64(c: &varseq_core::Rational) -> f64 {
    c.numer().to_string().parse::<f64>().unwrap() / c.denom().to_string().parse::<f64>().unwrap()
}
