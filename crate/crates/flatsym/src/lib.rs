//! Spherical functions on flat symmetric spaces, and numerical verdicts on
//! which convolution powers of orbital measures are square-integrable.
//!
//! The library is organized around the pipeline that produces a verdict:
//!
//! * [`specfun`] — Bessel functions J_ν, the normalized family
//!   f_r(s) = J_r(s)/s^r and its even form g_r, with derivative ladders and
//!   asymptotic envelope bounds;
//! * [`spaces`] — root-system data for the supported symmetric spaces,
//!   Plancherel densities, Weyl-chamber geometry, and point classification;
//! * [`kernels`] — spherical-function kernels (rank one, determinant form,
//!   and the confluent singular-point limits) plus the dichotomy integrands;
//! * [`dichotomy`] — stratified Monte Carlo over dyadic annuli, growth
//!   classification, analytic divergence lower bounds, and the minimal-power
//!   scan;
//! * [`haarmc`] — Haar-measure sampling of compact groups, orbital-measure
//!   convolution samples, and empirical spherical transforms;
//! * [`experiments`] — the prepackaged verdict tables with pinned tolerances,
//!   shared by the acceptance suite and the command-line reporter;
//! * [`report`] — serializable experiment configs and reports with embedded
//!   content hashes.

pub mod dichotomy;
pub mod experiments;
pub mod haarmc;
pub mod kernels;
pub(crate) mod quad;
pub mod report;
pub(crate) mod seed;
pub mod spaces;
pub mod specfun;

// Narrative chapters double as doctests so the guide cannot drift from the
// API. Shell-only chapters are not included here.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/growth.md")]
    mod growth {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
}
