//! Hourly dispatch of an air-source heat pump paired with salt-hydrate
//! thermal storage, and the economics built on it.

// `!(x >= 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispatch;
pub mod economics;
pub mod inputs;
pub mod salt;
pub mod scenario;
pub mod sizing;
pub mod synthetic;
