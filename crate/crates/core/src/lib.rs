//! Smith groups and critical groups of the finite classical polar graphs.
//!
//! The crate builds the six polar-graph families from explicit forms over
//! finite fields, computes elementary divisors of their adjacency and
//! Laplacian matrices by exact Smith normal form, and evaluates the
//! closed-form predictions for the same invariants so the two can be compared.

pub mod arith;
pub mod ffield;
pub mod matrix;
pub mod par;
pub mod polar;
pub mod predict;
pub mod report;
pub mod snf;
pub mod srg;

pub use ffield::{Field, FieldError, PrimePower};
pub use matrix::IntegerMatrix;
pub use polar::{build_graph, standard_form, FormSpace, PolarError, PolarFamily, PolarGraph, ProjectivePoint};
pub use predict::{predict_critical, predict_smith, Prediction, Target};
pub use snf::{DivisorProfile, GroupDecomposition};
pub use srg::{Spectrum, SrgParams};
