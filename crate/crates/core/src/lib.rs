//! Generalized Jacobi elliptic functions and the spectral machinery of a
//! generalized Lamé equation with potential
//!
//! ```text
//! V(z) = (α k1² k2² + β k2²) s⁴(z) − (γ k1² + δ k2² + λ k1² k2²) s²(z),
//! f'' + V f = −E f.
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`elliptic`]: `K(k)` and `sn, cn, dn` from first principles.
//! - [`gen_jacobi`]: the generalized functions `s, c, d1, d2`, their
//!   derivatives, branch data, the generalized amplitude and reference
//!   integrators.
//! - [`lame`]: potential, residuals and the catalog of the fifteen exact
//!   eigenpairs.
//! - [`ince`]: the transformation to the generalized Ince equation, its
//!   five-term Fourier recurrences, truncated-matrix spectra and the
//!   enumeration of vanishing rows and columns.
//! - [`series`]: the four-term power-series recurrences in `s` and their
//!   termination conditions.
//! - [`symbolic`]: exact linear algebra over polynomials in `k1², k2²`, used
//!   to solve vanishing conditions as identities in the moduli.

pub mod elliptic;
pub mod error;
pub mod gen_jacobi;
pub mod ince;
pub mod lame;
pub mod ode;
pub mod quadrature;
pub mod series;
pub mod symbolic;

pub use error::{Error, Result};
pub use gen_jacobi::{eval_all, GenJacobiPoint, ModulusPair};
pub use lame::{catalog, CatalogEntry, EnergyCoeffs, FactorMask, ParamVector};
