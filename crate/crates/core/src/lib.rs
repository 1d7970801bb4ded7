//! Numerical core for qubit/antiqubit phase estimation.
//!
//! Everything here is allocation-light, deterministic and `no_std`
//! (with `alloc`). File formats, configuration and the command line live
//! in the `posmet` crate.

#![no_std]
// index loops read better for small dense matrices; negated comparisons
// deliberately reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod estimation;
pub mod hardware;
pub mod linalg;
pub mod metrology;
pub mod optimize;
pub mod protocols;
pub mod qfim;
pub mod quadrature;
pub mod roots;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{Axis, CMat, Mat2, Mat4, Rot3, C64};
pub use states::TwoTlsState;
