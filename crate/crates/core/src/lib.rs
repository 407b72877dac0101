//! Quadrangulations and well-labelled trees.
//!
//! The crate implements the bijection between rooted quadrangulations with
//! `n` faces and well-labelled plane trees with `n` edges, the blossom-tree
//! conjugation that samples well-labelled trees in linear time, contour
//! encodings of embedded trees, exhaustive small-size enumeration, and a
//! reproducible Monte-Carlo harness for the `n^{1/4}` scaling of the radius
//! and the label profile.

pub mod blossom;
pub mod cvs;
pub mod enumeration;
pub mod error;
pub mod experiments;
pub mod labelled;
pub mod planar_map;
pub mod scaling;
pub mod trees;
pub mod walks;

pub use error::{Error, Result};
