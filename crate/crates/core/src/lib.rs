//! Martingales of random binary trees on one probability space: Yule trees,
//! binary search trees and the bisection model, with the fixed-point equations
//! of their limits and statistical checks of the limit laws.

pub mod bst;
pub mod numeric;
pub mod error;
pub mod fixedpoint;
pub mod martingale;
pub mod ratios;
pub mod rng;
pub mod runner;
pub mod stats;
pub mod tree;
pub mod yule;

pub use error::{Error, Result};
