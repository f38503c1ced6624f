//! Exact sparse linear systems over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::expr::Rational;

type Row = BTreeMap<usize, Rational>;

/// Incrementally reduced system `A x = b` kept in reduced row-echelon form.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    unknowns: usize,
    // pivot column -> (row without the pivot entry, rhs); pivot coefficient is 1
    pivots: BTreeMap<usize, (Row, Rational)>,
    inconsistent: bool,
}

impl LinearSystem {
    pub fn new(unknowns: usize) -> Self {
        LinearSystem { unknowns, ..Default::default() }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Adds `Σ coeffs[j] x_j = rhs`.
    pub fn add_equation(&mut self, coeffs: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) {
        let mut row: Row = BTreeMap::new();
        for (j, c) in coeffs {
            assert!(j < self.unknowns, "unknown index {j} out of range");
            let slot = row.entry(j).or_insert_with(Rational::zero);
            *slot += c;
        }
        row.retain(|_, c| !c.is_zero());
        let mut rhs = rhs;

        // eliminate existing pivots; pivot rows only mention free columns
        let hits: Vec<usize> = row.keys().copied().filter(|j| self.pivots.contains_key(j)).collect();
        for p in hits {
            let Some(factor) = row.remove(&p) else { continue };
            let (prow, prhs) = &self.pivots[&p];
            for (j, c) in prow {
                let slot = row.entry(*j).or_insert_with(Rational::zero);
                *slot -= &factor * c;
            }
            rhs -= &factor * prhs;
        }
        row.retain(|_, c| !c.is_zero());

        let Some((&pivot, lead)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        };
        let inv = Rational::one() / lead.clone();
        row.remove(&pivot);
        for c in row.values_mut() {
            *c *= &inv;
        }
        rhs *= &inv;

        // back-substitute the new pivot into existing rows
        for (prow, prhs) in self.pivots.values_mut() {
            if let Some(factor) = prow.remove(&pivot) {
                for (j, c) in &row {
                    let slot = prow.entry(*j).or_insert_with(Rational::zero);
                    *slot -= &factor * c;
                }
                prow.retain(|_, c| !c.is_zero());
                *prhs -= &factor * &rhs;
            }
        }
        self.pivots.insert(pivot, (row, rhs));
    }

    /// A particular solution with all free unknowns set to zero.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Rational::zero(); self.unknowns];
        for (p, (_, rhs)) in &self.pivots {
            x[*p] = rhs.clone();
        }
        Some(x)
    }
}

/// Finds rational weights `c` with `Σ_k c_k candidates[k] = target`, where
/// every vector is a sparse map from an arbitrary key to its coefficient.
pub fn solve_combination<K: Ord + Clone>(
    candidates: &[BTreeMap<K, Rational>],
    target: &BTreeMap<K, Rational>,
) -> Option<Vec<Rational>> {
    let mut rows: BTreeMap<K, Vec<(usize, Rational)>> = BTreeMap::new();
    for (k, cand) in candidates.iter().enumerate() {
        for (key, c) in cand {
            rows.entry(key.clone()).or_default().push((k, c.clone()));
        }
    }
    if target.keys().any(|k| !rows.contains_key(k)) {
        return None;
    }
    let mut sys = LinearSystem::new(candidates.len());
    for (key, row) in rows {
        let rhs = target.get(&key).cloned().unwrap_or_else(Rational::zero);
        sys.add_equation(row, rhs);
        if !sys.is_consistent() {
            return None;
        }
    }
    sys.solve()
}
