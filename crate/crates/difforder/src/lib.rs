//! Exact classification of planar polynomial vector fields by the order of
//! their associated differential operator.
//!
//! A system `x1' = X1(x1, x2)`, `x2' = X2(x1, x2)` with polynomial right-hand
//! sides induces the derivation `X = X1*d/dx1 + X2*d/dx2` on rational
//! functions.  This crate decides, entirely in exact rational arithmetic,
//! whether the system admits a certificate of order 0 (a rational first
//! integral), order 1, 2 or 3 (a rational function `a` satisfying the
//! corresponding order equation), or none of these within configurable search
//! bounds.  Every positive answer ships with a witness that is re-verified
//! through an independent code path before it is reported; numeric spot
//! checks are advisory only and never feed a certificate.
//!
//! Module map:
//!
//! * [`rat`], [`poly`], [`ratfunc`], [`linalg`] — exact scalar, polynomial,
//!   rational-function and linear-system arithmetic.
//! * [`vectorfield`] — the derivation `X`, the `b`-chain and the `c`-table.
//! * [`diffpoly`] — differential polynomials in the derivative tower of `y`
//!   and reduction modulo the ideal generated by `X1*d1(y) + X2*d2(y)`.
//! * [`darboux`] — search for Darboux polynomials and rational first
//!   integrals.
//! * [`classifier`] — the order cascade (0 then 1 then 2 then 3).
//! * [`witness`] — witness templates, reduction checks and integrating-factor
//!   data.
//! * [`series`] — truncated power-series solutions for certified order-3
//!   systems.
//! * [`numeric`] — advisory random-point and Runge-Kutta drift checks.
//! * [`parse`], [`report`] — the input DSL and the report document.

pub mod classifier;
pub mod darboux;
pub mod diffpoly;
pub mod linalg;
pub mod numeric;
pub mod parse;
pub mod poly;
pub mod rat;
pub mod ratfunc;
pub mod report;
pub mod series;
pub mod vectorfield;
pub mod witness;
