//! Exact wall-crossing engine for the curve-counting series of 3-fold flops.
//!
//! The crate computes Donaldson-Thomas style generating series attached to a
//! flopping contraction: their closed forms, the wall-and-chamber structure
//! of a family of weak stability conditions, and the wall-crossing products
//! that transport one theory into another.  All series arithmetic is exact
//! over arbitrary-precision rationals on a finite truncation box.
//!
//! Modules:
//! - [`exact`]: rationals, exact complex points, phase comparison;
//! - [`lattice`]: the Chern character lattice, flop models, support cones;
//! - [`series`]: truncated series arithmetic and closed-form products;
//! - [`charges`]: weak stability data, charge paths, wall detection;
//! - [`oracles`]: independent enumerative ground truth and invariant values;
//! - [`report`]: JSON and CSV emission with byte-stable round trips;
//! - [`wallcross`]: wall events, crossing products, verification scenarios;
//! - [`config`]: key=value model files.

pub mod charges;
pub mod config;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod oracles;
pub mod report;
pub mod series;
pub mod wallcross;

pub use error::{Error, Result};
