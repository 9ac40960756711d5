#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use svcnet::model::{generate_collection, Collection, GeneratorParams};
use svcnet::ontology::{Ontology, OntologyRegistry};

/// Core fixtures, also when this module is compiled into another crate's tests.
pub fn fixture(name: &str) -> PathBuf {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let own = crate_dir.join("tests/fixtures").join(name);
    if own.exists() {
        own
    } else {
        crate_dir.join("../core/tests/fixtures").join(name)
    }
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn registry(files: &[&str]) -> OntologyRegistry {
    let mut reg = OntologyRegistry::new();
    for f in files {
        reg.register(Ontology::from_json(&read_fixture(f)).unwrap()).unwrap();
    }
    reg
}

pub fn greek() -> (Collection, OntologyRegistry) {
    (
        Collection::from_json(&read_fixture("greek_collection.json")).unwrap(),
        registry(&["greek_ontology.json"]),
    )
}

/// Small random collection from the generator, with random shape parameters.
pub fn random_collection(case: u64, max_ops: usize, max_concepts: usize) -> (Collection, OntologyRegistry) {
    let mut rng = svcnet::rng::stream(case, "test/random-collection", 0);
    let ops_per_service = rng.gen_range(1..=3usize);
    let n_services = rng.gen_range(1..=(max_ops / ops_per_service).max(1));
    let params = GeneratorParams {
        n_services,
        ops_per_service,
        n_concepts: rng.gen_range(1..=max_concepts),
        concept_reuse_skew: rng.gen_range(0.0..1.5),
        seed: case,
    };
    let g = generate_collection(&params).unwrap();
    let mut reg = OntologyRegistry::new();
    reg.register(g.ontology).unwrap();
    (g.collection, reg)
}
pub mod compose_oracle;
pub mod metric_oracle;
pub mod network_oracle;
