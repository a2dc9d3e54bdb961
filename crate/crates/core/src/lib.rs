//! Fourier coefficients of meromorphic modular forms of negative weight.
//!
//! A form `f` of weight `2 - 2k` whose poles lie on the orbits of `i` and
//! `rho` is a finite combination of raised Poincaré-type kernels centred at
//! those points. Each kernel's Fourier coefficients are sums over primitive
//! ideals of `Z[i]` or `Z[rho]`, so `f`'s coefficients become explicit,
//! rapidly convergent lattice sums. The same holds for `E2^n f`.
//!
//! The pipeline is:
//!
//! 1. [`elliptic`] expands `f` around `i` and `rho` from exact derivative jets
//!    ([`special_values`]).
//! 2. [`basis`] decomposes the principal parts.
//! 3. [`coeff_engine`] evaluates the lattice sums ([`lattice`]) with tail bounds.
//! 4. [`quasi`] handles powers of `E2`.
//!
//! [`qseries`] computes exact rational q-expansions as an independent check.

pub mod basis;
pub mod coeff_engine;
pub mod elliptic;
pub mod error;
pub mod expr;
pub mod json;
pub mod lattice;
pub mod numeric;
pub mod qseries;
pub mod quasi;
pub mod special_values;

pub use basis::{BasisRepresentation, BasisTerm};
pub use coeff_engine::TruncatedSum;
pub use elliptic::{LaurentSeries, PrincipalPart};
pub use error::{Error, Result};
pub use expr::{FormExpression, Generator};
pub use lattice::{Field, PrimitiveIdeal};
pub use numeric::{BigComplex, BigReal};
pub use qseries::RationalQSeries;
pub use special_values::{EllipticPoint, PointTag};
