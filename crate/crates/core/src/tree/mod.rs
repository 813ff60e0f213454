//! Words over `{0, 1}` and finite complete binary trees.

mod label;
mod shape;

pub use label::{NodeLabel, MAX_LABEL_DEPTH};
pub use shape::{
    all_shapes, enumerate_insertion_orders, shape_probability, BinaryTreeShape, MAX_EXACT_SIZE,
};
