//! Exact-arithmetic engine for the wall-and-chamber structure of nef and
//! movable divisor cones on elliptic 3-folds: rational polyhedral cones with
//! dual descriptions, instance validation, flop-based make-nef walks, chamber
//! enumeration up to group actions, and the cone-conjecture predicates.

pub mod error;
pub mod exactq;
pub mod polycone;
pub mod varmodel;
pub mod conestruct;
pub mod chamberwalk;
pub mod groupact;
pub mod rayclass;
pub mod instances;

pub use error::{Error, Result};
