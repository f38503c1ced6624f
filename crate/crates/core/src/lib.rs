//! Symbolic variational calculus on finite-order jet spaces.
//!
//! The crate is layered bottom-up:
//!
//! * [`expr`]: exact expressions over jet coordinates with a canonical normal form;
//! * [`jet`]: the jet context (dimensions, order cap) and total derivatives;
//! * [`forms`]: exterior forms in the contact basis, `d_H`, `d_V`, interior products;
//! * [`varseq`]: Euler–Lagrange and Helmholtz operators, Tonti Lagrangians,
//!   momenta and the `d_H`-exactness solver;
//! * [`noether`]: variational Lie derivatives, Noether and strong Noether
//!   currents, on-shell reduction and the lemma verifiers;
//! * [`cech`]: covers, cochains, coboundary, connecting maps and periods.

pub mod cech;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod forms;
pub mod jet;
pub mod linsolve;
pub mod noether;
pub mod report;
pub mod varseq;

pub use error::{Error, Result};
pub use expr::{Expr, JetVar, MultiIndex, Naming, Rational};
pub use forms::{Covector, Form, VectorField};
pub use jet::JetContext;
pub use varseq::{AnsatzSpec, Current, Lagrangian, SourceForm};
