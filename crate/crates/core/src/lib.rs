//! Exact symbolic engine for two-mode boson operator algebra and the
//! Hermite-polynomial identities it satisfies.
//!
//! The crate normal-orders two-mode operator expressions, expands single- and
//! two-variable Hermite polynomials of linear operator forms, evaluates a
//! family of Gaussian integrals in closed form, and certifies each identity
//! both by exact coefficient comparison in the ring Q(i, sqrt2) and by
//! Gauss-Hermite quadrature.
//!
//! Module map:
//! - [`scalars`]: exact arithmetic in Q(i, sqrt2), the coefficient domain.
//! - [`polynomials`]: Hermite polynomials H_n and H_{m,n} with exact
//!   integer coefficient tables, plus sparse exact polynomials in one and
//!   two variables.
//! - [`boson`]: normal-ordered two-mode operator expressions and the Wick
//!   product, operator Hermite polynomials, vacuum application.
//! - [`integrals`]: the Gaussian moment rule, the closed-form table, and a
//!   floating-point quadrature oracle.
//! - [`identities`]: the registry of checkable identities and the suite
//!   runner producing machine-readable reports.
//! - [`frontend`]: expression parser, canonical renderer.

pub mod boson;
mod error;
pub mod frontend;
pub mod identities;
pub mod integrals;
pub mod polynomials;
pub mod scalars;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
