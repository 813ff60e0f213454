//! Numerical building blocks shared by the martingale and fixed-point code.

pub mod interp;
pub mod logsum;
pub mod quadrature;
pub mod special;

pub use logsum::{NeumaierSum, SignedLogSum};
