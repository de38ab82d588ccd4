//! Solver toolkit for hospital/resident matching with couples.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`model`] holds the instance types (couples market, multigraph market,
//!   one-sided-ties marriage instances, CNF formulas), the text-format
//!   parsers, instance validation, couple classification, and dual-market
//!   detection.
//! * [`sf`] is the fixtures core: capacitated non-bipartite matching under
//!   preferences, with a half-integral solver, a stability checker, and
//!   odd-component extraction.
//! * [`reductions`] rewrites couples markets into fixtures instances (a
//!   general encoding for sub-responsive/sub-complete couples and a sharper
//!   one for typed couples), rounds half-integral solutions into
//!   near-feasible matchings, extracts exact matchings, and exposes the
//!   top-level [`reductions::solve`] entry point.
//! * [`stability`] implements the blocking-pair definitions verbatim for
//!   couples markets and multigraph markets.
//! * [`oracle`] contains independent brute-force enumerators used as ground
//!   truth in tests and from the CLI.
//! * [`gen`] produces random planted-structure instances and the hardness
//!   gadget families (marriage-with-ties encodings, SAT dual markets with
//!   optional enforcer gadgets and master lists, and the blocking-pair
//!   inapproximability family).

pub mod gen;
pub mod model;
pub mod oracle;
pub mod reductions;
pub mod sf;
pub mod stability;
