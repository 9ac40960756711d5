//! Semantic Web-service interaction networks.
//!
//! Builds operation networks (one per match level, full or partial
//! invocation) and parameter networks from service collections annotated
//! with ontology concepts, measures their complex-network topology, finds
//! communities, and searches for compositions guided by that structure.

pub mod ontology;
pub mod model;
pub mod rng;
pub mod graph;
pub mod network;
pub mod metrics;
pub mod community;
pub mod compose;
pub mod report;
