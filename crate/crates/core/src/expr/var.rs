use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

/// Symmetric multi-index: a sorted multiset of base directions.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(SmallVec<[u8; 4]>);

impl MultiIndex {
    pub fn empty() -> Self {
        Self(SmallVec::new())
    }

    pub fn new(entries: &[u8]) -> Self {
        let mut v: SmallVec<[u8; 4]> = entries.iter().copied().collect();
        v.sort_unstable();
        Self(v)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// `I ∪ {mu}`.
    pub fn with(&self, mu: u8) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&x| x <= mu);
        v.insert(pos, mu);
        Self(v)
    }

    /// `I \ {mu}` if `mu ∈ I`.
    pub fn without(&self, mu: u8) -> Option<Self> {
        let pos = self.0.iter().position(|&x| x == mu)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(Self(v))
    }

    /// `I ∪ J`.
    pub fn join(&self, other: &MultiIndex) -> Self {
        let mut v: SmallVec<[u8; 4]> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        Self(v)
    }

    /// `self \ sub` when `sub ⊆ self` as multisets.
    pub fn difference(&self, sub: &MultiIndex) -> Option<Self> {
        let mut out = self.clone();
        for &mu in sub.entries() {
            out = out.without(mu)?;
        }
        Some(out)
    }

    /// Number of occurrences of `mu`.
    pub fn count(&self, mu: u8) -> usize {
        self.0.iter().filter(|&&x| x == mu).count()
    }

    /// All sorted multi-indices over `n` directions with order `0..=max_order`,
    /// ordered by order first.
    pub fn all_up_to(n: usize, max_order: usize) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::empty()];
        let mut layer = vec![MultiIndex::empty()];
        for _ in 0..max_order {
            let mut next = Vec::new();
            for idx in &layer {
                let start = idx.0.last().copied().unwrap_or(0);
                for mu in start..n as u8 {
                    next.push(idx.with(mu));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// A coordinate on the jet space, or one of the auxiliary symbols the
/// operators need.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetVar {
    /// Base coordinate `x^mu`.
    Base(u8),
    /// Jet coordinate `y^a_I`.
    Field(u8, MultiIndex),
    /// Named constant (problem parameter or `pi`).
    Param(Arc<str>),
    /// Homotopy parameter of the fiber-radial integration.
    Homotopy,
    /// Formal test field `v^a_I` used by the Helmholtz check.
    Test(u8, MultiIndex),
}

pub const PI_NAME: &str = "pi";

impl JetVar {
    pub fn field(a: u8, idx: &[u8]) -> Self {
        JetVar::Field(a, MultiIndex::new(idx))
    }

    pub fn param(name: &str) -> Self {
        JetVar::Param(Arc::from(name))
    }

    pub fn pi() -> Self {
        Self::param(PI_NAME)
    }

    pub fn is_pi(&self) -> bool {
        matches!(self, JetVar::Param(p) if &**p == PI_NAME)
    }

    /// Differential order of a field or test-field coordinate, 0 otherwise.
    pub fn order(&self) -> usize {
        match self {
            JetVar::Field(_, i) | JetVar::Test(_, i) => i.order(),
            _ => 0,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, JetVar::Field(..))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, JetVar::Param(_))
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetVar::Base(mu) => write!(f, "x{mu}"),
            JetVar::Field(a, i) => write!(f, "u{a}{i:?}"),
            JetVar::Param(p) => write!(f, "{p}"),
            JetVar::Homotopy => write!(f, "$t"),
            JetVar::Test(a, i) => write!(f, "v{a}{i:?}"),
        }
    }
}
