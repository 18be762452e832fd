//! Exact-arithmetic toolkit for free-probability combinatorics and for
//! machine-checked identities in finitely presented *-algebras.
//!
//! The crate has three layers:
//!
//! * combinatorics: non-crossing partitions ([`nc`]), scalar free cumulants
//!   ([`cumulant`]), and operator-valued free cumulants ([`opval`]);
//! * symbolic algebra: free *-polynomials over an exact coefficient ring
//!   ([`algebra`], [`coeff`]) and rational univariate polynomials ([`univar`]);
//! * verification: a proof kernel whose fact store only grows through checked
//!   inference steps ([`kernel`]), and scripted scenarios built on it with
//!   machine-readable reports ([`scenario`]).
//!
//! Everything is exact: coefficients are arbitrary-precision rationals, and no
//! floating-point arithmetic is used anywhere.

pub mod algebra;
pub mod coeff;
pub mod cumulant;
pub mod kernel;
pub mod nc;
pub mod opval;
pub mod scenario;
pub mod univar;
