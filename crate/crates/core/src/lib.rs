//! Symbolic curvature engine for recurrence-type conditions on warped products.

pub mod cli;
pub mod geometry;
pub mod knproducts;
pub mod recurrence;
pub mod symexpr;
pub mod warped;
pub mod tensor;
pub mod theorems;
