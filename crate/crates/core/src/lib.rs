//! Exact decision procedures for martingale densities bounded below by a
//! prescribed floor on finite atomic probability spaces.
//!
//! Given a trading cone `C` of attainable gains and a floor `f`, the central
//! question is whether some `g >= f` lies in the polar of `C`, i.e. whether a
//! (scaled) martingale density dominates `f`. In finite dimension this is an
//! LP whose dual is the supremum of `<x, f>` over gains with `x^- <= 1`.

pub mod cli;
pub mod cone;
pub mod domination;
pub mod error;
pub mod lp;
pub mod market_file;
pub mod markets;
pub mod orlicz;
pub mod prob;
pub mod report;
mod serde_rational;

pub use error::{Error, Result};
pub use prob::{AtomPartition, FiniteProbSpace, Rational, RandomVariable};
