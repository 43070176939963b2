//! Ground states of the focusing nonlinear Schrödinger equation on metric
//! graphs with point interactions at the vertices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod discretization;
pub mod experiment;
pub mod graph;
pub mod oracle;
pub mod solver;
pub mod stability;
