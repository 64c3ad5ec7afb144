//! Numerical laboratory for the growth and iteration of transcendental
//! meromorphic functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod criteria;
pub mod dynamics;
pub mod expr;
pub mod hyperbolic;
pub mod nevanlinna;
