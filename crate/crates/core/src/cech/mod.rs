//! Combinatorial covers of `Y` built from angle branches, cochains of local
//! variational objects, the coboundary, connecting maps and periods.
//!
//! Every chart picks, for each declared angle coordinate, one of two branches:
//! branch 0 covers `(-pi, pi)` and branch 1 covers `(0, 2pi)`. Where a tuple of
//! charts mixes both branches of an angle its intersection has two components:
//! on component 0 the coordinates agree, on component 1 the branch-1 value is
//! the branch-0 value plus `2pi`. Cochain values on a tuple are expressed in
//! the coordinates of its first chart.

mod cochain;
mod delta;
mod period;

pub use cochain::{coboundary, lie_derive_cochain, Cochain, CochainValue, LieDerivable};
pub use delta::{connecting_delta, connecting_delta_prime, DeltaPrimeResult, DeltaResult};
pub use period::{period, period_of_cochain, BundleForm, DEFAULT_QUAD_NODES, PERIOD_TOLERANCE};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{Expr, JetVar};
use crate::forms::VectorField;
use crate::jet::JetContext;

/// A chart with one branch choice per angle coordinate of its cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    pub branches: Vec<u8>,
}

/// Component of an ordered intersection `U_{i0} ∩ … ∩ U_{iq}`.
///
/// Bit `k` of `component` selects the shifted component for angle `k`; it
/// can be set only when the tuple mixes both branches of that angle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    pub charts: Vec<usize>,
    pub component: u8,
}

impl Simplex {
    pub fn vertex(i: usize) -> Self {
        Simplex { charts: vec![i], component: 0 }
    }

    pub fn degree(&self) -> usize {
        self.charts.len() - 1
    }
}

/// One piece of a cycle: a parametrization of `[0,1]^d` into the coordinates
/// `(x^0…x^{n-1}, y^0…y^{m-1})` of the first chart of `simplex`, written in
/// the parameters `s0`, `s1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclePatch {
    pub simplex: Simplex,
    pub coords: Vec<Expr>,
}

/// Closed curve or surface assembled from patches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub name: String,
    pub dim: usize,
    pub patches: Vec<CyclePatch>,
}

/// Name of the `k`-th cycle parameter.
pub fn cycle_parameter(k: usize) -> JetVar {
    JetVar::param(&format!("s{k}"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub name: String,
    pub base_dim: usize,
    pub fiber_dim: usize,
    /// Fiber indices of the angle coordinates.
    pub angles: Vec<u8>,
    pub charts: Vec<Chart>,
    pub cycles: Vec<Cycle>,
}

pub const COVER_NAMES: [&str; 4] = ["single", "R-x-S1-winding", "R-x-S2-monopole", "R2-x-T2"];

fn s(k: usize) -> Expr {
    Expr::var(cycle_parameter(k))
}

fn pi_times(a: i64, b: i64) -> Expr {
    Expr::pi() * Expr::rat(a, b)
}

impl Cover {
    /// One chart covering `R^n × R^m`.
    pub fn single(base_dim: usize, fiber_dim: usize) -> Self {
        Cover {
            name: "single".into(),
            base_dim,
            fiber_dim,
            angles: Vec::new(),
            charts: vec![Chart { name: "global".into(), branches: Vec::new() }],
            cycles: Vec::new(),
        }
    }

    /// `R × S^1` with angle `theta = y^0` and charts `east`, `west`.
    pub fn winding_s1() -> Self {
        let east = Simplex::vertex(0);
        let west = Simplex::vertex(1);
        let fiber_circle = Cycle {
            name: "fiber-circle".into(),
            dim: 1,
            patches: vec![
                CyclePatch { simplex: east, coords: vec![Expr::zero(), Expr::pi() * s(0)] },
                CyclePatch { simplex: west, coords: vec![Expr::zero(), Expr::pi() + Expr::pi() * s(0)] },
            ],
        };
        Cover {
            name: "R-x-S1-winding".into(),
            base_dim: 1,
            fiber_dim: 1,
            angles: vec![0],
            charts: vec![
                Chart { name: "east".into(), branches: vec![0] },
                Chart { name: "west".into(), branches: vec![1] },
            ],
            cycles: vec![fiber_circle],
        }
    }

    /// `R × S^2` with fiber coordinates `(theta, phi) = (y^0, y^1)`, angle `phi`,
    /// charts ordered south-east, south-west, north-east, north-west.
    pub fn monopole_s2() -> Self {
        let half = pi_times(1, 2);
        let equator = Cycle {
            name: "equator".into(),
            dim: 1,
            patches: vec![
                CyclePatch {
                    simplex: Simplex { charts: vec![0, 2], component: 0 },
                    coords: vec![Expr::zero(), half.clone(), -&half + Expr::pi() * s(0)],
                },
                CyclePatch {
                    simplex: Simplex { charts: vec![1, 3], component: 0 },
                    coords: vec![Expr::zero(), half.clone(), &half + &(Expr::pi() * s(0))],
                },
            ],
        };
        let chart = |name: &str, b: u8| Chart { name: name.into(), branches: vec![b] };
        Cover {
            name: "R-x-S2-monopole".into(),
            base_dim: 1,
            fiber_dim: 2,
            angles: vec![1],
            charts: vec![chart("south-east", 0), chart("south-west", 1), chart("north-east", 0), chart("north-west", 1)],
            cycles: vec![equator],
        }
    }

    /// `R^2 × T^2` with both fiber coordinates angles.
    pub fn torus() -> Self {
        let mut charts = Vec::new();
        for (b0, b1) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            charts.push(Chart { name: format!("branch-{b0}{b1}"), branches: vec![b0, b1] });
        }
        // the fiber torus, one quarter per chart
        let fiber_torus = Cycle {
            name: "fiber-torus".into(),
            dim: 2,
            patches: (0..4)
                .map(|i| {
                    let (b0, b1) = ((i / 2) as i64, (i % 2) as i64);
                    let coords = vec![
                        Expr::zero(),
                        Expr::zero(),
                        Expr::pi() * Expr::int(b0) + Expr::pi() * s(0),
                        Expr::pi() * Expr::int(b1) + Expr::pi() * s(1),
                    ];
                    CyclePatch { simplex: Simplex::vertex(i), coords }
                })
                .collect(),
        };
        Cover {
            name: "R2-x-T2".into(),
            base_dim: 2,
            fiber_dim: 2,
            angles: vec![0, 1],
            charts,
            cycles: vec![fiber_torus],
        }
    }

    /// Built-in cover by name; `single` takes the dimensions given.
    pub fn by_name(name: &str, base_dim: usize, fiber_dim: usize) -> Result<Self> {
        let cover = match name {
            "single" => return Ok(Cover::single(base_dim, fiber_dim)),
            "R-x-S1-winding" => Cover::winding_s1(),
            "R-x-S2-monopole" => Cover::monopole_s2(),
            "R2-x-T2" => Cover::torus(),
            other => return Err(Error::ChartMismatch(format!("unknown cover `{other}`"))),
        };
        if cover.base_dim != base_dim || cover.fiber_dim != fiber_dim {
            return Err(Error::DimensionMismatch(format!(
                "cover `{name}` needs n = {}, m = {}",
                cover.base_dim, cover.fiber_dim
            )));
        }
        Ok(cover)
    }

    pub fn context(&self) -> JetContext {
        JetContext::new(self.base_dim, self.fiber_dim)
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    pub fn cycle(&self, name: &str) -> Option<&Cycle> {
        self.cycles.iter().find(|c| c.name == name)
    }

    /// Angle coordinates as jet variables.
    pub fn angle_vars(&self) -> Vec<JetVar> {
        self.angles.iter().map(|&a| JetVar::field(a, &[])).collect()
    }

    /// Bit mask of the angles on which the tuple mixes both branches.
    fn mixed_mask(&self, charts: &[usize]) -> u8 {
        let mut mask = 0u8;
        for k in 0..self.angles.len() {
            let mut seen = [false; 2];
            for &i in charts {
                seen[self.charts[i].branches[k] as usize] = true;
            }
            if seen[0] && seen[1] {
                mask |= 1 << k;
            }
        }
        mask
    }

    /// All `q`-simplices, ordered by chart tuple then component.
    pub fn simplices(&self, q: usize) -> Vec<Simplex> {
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        fn grow(n: usize, len: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if acc.len() == len {
                out.push(acc.clone());
                return;
            }
            for i in start..n {
                acc.push(i);
                grow(n, len, i + 1, acc, out);
                acc.pop();
            }
        }
        grow(self.charts.len(), q + 1, 0, &mut Vec::new(), &mut tuples);
        let mut out = Vec::new();
        for charts in tuples {
            let mask = self.mixed_mask(&charts);
            let mut sub = mask;
            let mut comps = vec![];
            loop {
                comps.push(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
            comps.sort_unstable();
            for component in comps {
                out.push(Simplex { charts: charts.clone(), component });
            }
        }
        out
    }

    pub fn contains(&self, simplex: &Simplex) -> bool {
        !simplex.charts.is_empty()
            && simplex.charts.windows(2).all(|w| w[0] < w[1])
            && simplex.charts.iter().all(|&i| i < self.charts.len())
            && simplex.component & !self.mixed_mask(&simplex.charts) == 0
    }

    /// The `k`-th face of a simplex.
    pub fn face(&self, simplex: &Simplex, k: usize) -> Simplex {
        let mut charts = simplex.charts.clone();
        charts.remove(k);
        let component = simplex.component & self.mixed_mask(&charts);
        Simplex { charts, component }
    }

    fn shift(&self, chart: usize, component: u8, k: usize) -> i64 {
        i64::from(component >> k & 1 == 1 && self.charts[chart].branches[k] == 1)
    }

    /// Substitution taking expressions in the coordinates of chart `from` to
    /// those of chart `to` on the given component.
    pub fn transition(&self, from: usize, to: usize, component: u8) -> BTreeMap<JetVar, Expr> {
        let mut map = BTreeMap::new();
        for (k, &a) in self.angles.iter().enumerate() {
            let delta = self.shift(from, component, k) - self.shift(to, component, k);
            if delta != 0 {
                let v = JetVar::field(a, &[]);
                map.insert(v.clone(), Expr::var(v) + Expr::pi() * Expr::int(2 * delta));
            }
        }
        map
    }

    /// Label like `(south-east,north-east)#0`.
    pub fn simplex_label(&self, simplex: &Simplex) -> String {
        let names: Vec<&str> = simplex.charts.iter().map(|&i| self.charts[i].name.as_str()).collect();
        format!("({})#{}", names.join(","), simplex.component)
    }

    /// Checks that a vector field is invariant under every angle shift.
    pub fn check_global_field(&self, ctx: &JetContext, field: &VectorField) -> Result<()> {
        for (k, &a) in self.angles.iter().enumerate() {
            let v = JetVar::field(a, &[]);
            let map: BTreeMap<JetVar, Expr> = [(v.clone(), Expr::var(v) + Expr::pi() * Expr::int(2))].into();
            let shifted = field.map_components(ctx, |e| e.substitute(&map))?;
            if &shifted != field {
                return Err(Error::FieldNotGlobal(format!(
                    "components change under a full turn of angle {k} (fiber index {a})"
                )));
            }
        }
        Ok(())
    }
}
