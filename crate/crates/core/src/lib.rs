//! Kinematics of twisted-photon absorption: superkick recoil, the partition of
//! angular momentum between internal and centre-of-mass motion, and the
//! threshold shifts that follow from a transverse kick.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod beam;
pub mod error;
pub mod numeric;
pub mod pair_production;
pub mod recoil_kinematics;
pub mod special_functions;
pub mod sweeps;
pub mod table;
pub mod transitions;
pub mod trap;
pub mod units;

pub use error::{Error, Result};
