//! Black-box discovery of decision borders in feature-based classifiers.
//!
//! Exploration strategies compose datamorphisms (per-feature traversals and
//! a label-guided midpoint) to find pairs of differently labelled points that
//! sit arbitrarily close to a border.

pub mod space;
pub mod morphisms;
pub mod bridge;
pub mod classifiers;
pub mod strategies;
pub mod harness;
pub mod cli;
