//! Exact computations with configurations of points on the projective line.
//!
//! The library provides, over exact fields (arbitrary-precision rationals and
//! univariate rational functions):
//!
//! * the projective line `P¹`, Möbius transformations and cross-ratios with
//!   their degenerate-value rules ([`p1`], [`field`]);
//! * n-gons, their symmetrizations into strings of n-gons, and the defining
//!   cross-ratio equations of the string variety ([`strings`]);
//! * labelled phylogenetic trees in split-set form, destination partitions
//!   and tree surgery ([`phylo`]), together with counting and exhaustive
//!   enumeration ([`enumeration`]);
//! * the two-way translation between strings and trees, stratification and
//!   boundary data ([`bridge`]);
//! * chart maps at extremal strings and the cross-ratio calculus that inverts
//!   them ([`charts`]);
//! * fibers of the forgetful projection as stable curves with sections, and
//!   the string ↔ curve round trip ([`fibers`]).

pub mod bridge;
pub mod charts;
pub mod enumeration;
pub mod error;
pub mod field;
pub mod fibers;
pub mod io;
pub mod p1;
pub mod phylo;
pub mod strings;

pub use error::Error;
pub use field::{Field, Poly, Rat, RatFunc};
pub use p1::{CrossRatioValue, Moebius, P1};
pub use phylo::{LabelSet, PhyloTree};
pub use strings::{GonString, NGon, Quad, Triple};
