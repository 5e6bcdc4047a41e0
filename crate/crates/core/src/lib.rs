//! Contextuality scenarios as hypergraphs, membership tests for the
//! classical, Q1 and macroscopically non-contextual model sets, the
//! certificate bridge between Q1 and MNC, and a simulator for the
//! macroscopic extension of an experiment.

pub mod bisection;
pub mod builders;
pub mod certificates;
pub mod hypergraph;
pub mod kernel;
pub mod macrosim;
pub mod models;
