//! Certified upper bounds on the number of limit cycles of planar polynomial
//! differential systems, via radial Dulac pairs, with a numerical probe to
//! cross-check every certificate.

// `!(x > 0.0)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bipoly;
pub mod certdoc;
pub mod certify;
pub mod corpus;
pub mod exactalg;
pub mod polarize;
pub mod probe;
pub mod sysfile;
pub mod trigpoly;
