// negated comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod berry;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod model;
pub mod sapt;
pub mod sphere;
pub mod spin;
pub mod star;
pub mod sw;

pub use error::{Error, Result};
