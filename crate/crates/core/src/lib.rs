#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod numerics;
pub mod states;
pub mod clickmodel;
pub mod moments;
pub mod certify;
pub mod photoelectric;
pub mod calibrate;

pub use error::{Error, Result};
