//! Restricted Lie algebras, their restricted enveloping algebras, and
//! filtered multiplicative bases of augmentation ideals.

pub mod abelian;
pub mod corpus;
pub mod env;
pub mod field;
pub mod filtration;
pub mod fmb;
pub mod format;
pub mod liealg;
pub mod linalg;
pub mod report;
