//! Exact arithmetic for quasimodular forms on `SL2(Z)` and modular linear
//! differential operators.
//!
//! The crate is organised bottom up:
//!
//! * [`qseries`] truncated `q`-series with rational exponents and the
//!   classical generators (Eisenstein series, `Delta`, powers of `eta`,
//!   theta constants).
//! * [`qmring`] the ring `Q[E2, E4, E6]` with the `sl2` action, projections,
//!   structure decompositions and almost holomorphic completions.
//! * [`hsd`] Serre, canonical and Kaneko-Koike higher derivatives and the
//!   Rankin-Cohen family of brackets.
//! * [`mldo`] operators `sum a_r D^r`, their modularity test, basis
//!   conversions and the correspondences with quasimodular forms.
//! * [`mlde`] indicial polynomials, Frobenius solutions and kernels.

pub mod error;
pub mod hsd;
pub mod linalg;
pub mod mlde;
pub mod mldo;
pub mod parse;
pub mod qmring;
pub mod qseries;
pub mod rational;
pub mod suites;

pub use error::{Error, Result};
pub use mldo::{BasisTag, Mldo};
pub use qmring::{AlmostHolForm, QuasiModularForm};
pub use qseries::FracPowerSeries;
pub use rational::Q;
