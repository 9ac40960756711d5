//! Synthetic collections with a heavy-tailed concept reuse distribution.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::{Collection, Operation, Service};
use crate::ontology::{ConceptRef, Ontology};
use crate::rng;

pub const GENERATED_ONTOLOGY_ID: &str = "gen";
const MAX_DEPTH: usize = 3;
const PARENT_PROB: f64 = 0.7;
const SECOND_PARENT_PROB: f64 = 0.15;
// Weights for 0..=3 inputs and 0..=3 outputs per operation.
const INPUT_COUNT_WEIGHTS: [f64; 4] = [0.05, 0.45, 0.35, 0.15];
const OUTPUT_COUNT_WEIGHTS: [f64; 4] = [0.03, 0.55, 0.30, 0.12];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("cannot generate {0} operations from zero concepts")]
    NoConcepts(usize),
    #[error("concept reuse skew must be finite and >= 0, got {0}")]
    InvalidSkew(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub n_services: usize,
    pub ops_per_service: usize,
    pub n_concepts: usize,
    pub concept_reuse_skew: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub collection: Collection,
    pub ontology: Ontology,
}

/// Draws concept indices with probability proportional to `rank^-skew`,
/// where ranks are a seeded permutation of the concepts.
#[derive(Debug, Clone)]
pub struct ConceptSampler {
    by_rank: Vec<usize>,
    weights: WeightedIndex<f64>,
}

impl ConceptSampler {
    pub fn new<R: Rng>(n_concepts: usize, skew: f64, rng: &mut R) -> Result<Self, GenerateError> {
        if !skew.is_finite() || skew < 0.0 {
            return Err(GenerateError::InvalidSkew(skew));
        }
        if n_concepts == 0 {
            return Err(GenerateError::NoConcepts(0));
        }
        let mut by_rank: Vec<usize> = (0..n_concepts).collect();
        by_rank.shuffle(rng);
        let weights = WeightedIndex::new((1..=n_concepts).map(|r| (r as f64).powf(-skew)))
            .expect("positive finite weights");
        Ok(Self { by_rank, weights })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        self.by_rank[self.weights.sample(rng)]
    }
}

fn concept_name(i: usize, width: usize) -> String {
    format!("C{i:0width$}")
}

fn generate_ontology(n: usize, seed: u64) -> Ontology {
    let mut rng = rng::stream(seed, "generate/ontology", 0);
    let width = n.saturating_sub(1).to_string().len();
    let names: Vec<String> = (0..n).map(|i| concept_name(i, width)).collect();
    let mut depth = vec![0usize; n];
    let mut edges = Vec::new();
    for i in 1..n {
        let eligible: Vec<usize> = (0..i).filter(|&p| depth[p] < MAX_DEPTH).collect();
        if eligible.is_empty() || !rng.gen_bool(PARENT_PROB) {
            continue;
        }
        let first = *eligible.choose(&mut rng).expect("non-empty");
        let mut parents = vec![first];
        if eligible.len() > 1 && rng.gen_bool(SECOND_PARENT_PROB) {
            let second = *eligible.choose(&mut rng).expect("non-empty");
            if second != first {
                parents.push(second);
            }
        }
        depth[i] = 1 + parents.iter().map(|&p| depth[p]).max().unwrap_or(0);
        for p in parents {
            edges.push((names[i].clone(), names[p].clone()));
        }
    }
    Ontology::new(GENERATED_ONTOLOGY_ID.to_owned(), names, edges).expect("parents precede children")
}

fn draw_distinct<R: Rng>(sampler: &ConceptSampler, count: usize, n_concepts: usize, rng: &mut R) -> Vec<usize> {
    let count = count.min(n_concepts);
    let mut picked = Vec::with_capacity(count);
    let mut attempts = 0;
    while picked.len() < count && attempts < 64 * count.max(1) {
        attempts += 1;
        let c = sampler.sample(rng);
        if !picked.contains(&c) {
            picked.push(c);
        }
    }
    picked
}

/// Generate a collection and its single ontology, deterministically from `seed`.
pub fn generate_collection(params: &GeneratorParams) -> Result<Generated, GenerateError> {
    let total_ops = params.n_services * params.ops_per_service;
    if params.n_concepts == 0 && total_ops > 0 {
        return Err(GenerateError::NoConcepts(total_ops));
    }
    if !params.concept_reuse_skew.is_finite() || params.concept_reuse_skew < 0.0 {
        return Err(GenerateError::InvalidSkew(params.concept_reuse_skew));
    }
    let ontology = generate_ontology(params.n_concepts, params.seed);
    if total_ops == 0 {
        let services = (0..params.n_services)
            .map(|s| Service {
                name: service_name(s, params.n_services),
                operations: Vec::new(),
            })
            .collect();
        return Ok(Generated {
            collection: Collection::new(services).expect("generated names are unique"),
            ontology,
        });
    }

    let mut pop_rng = rng::stream(params.seed, "generate/popularity", 0);
    let sampler = ConceptSampler::new(params.n_concepts, params.concept_reuse_skew, &mut pop_rng)?;
    let in_counts = WeightedIndex::new(INPUT_COUNT_WEIGHTS).expect("valid weights");
    let out_counts = WeightedIndex::new(OUTPUT_COUNT_WEIGHTS).expect("valid weights");
    let mut rng = rng::stream(params.seed, "generate/operations", 0);
    let concept = |i: usize| {
        ConceptRef::new(GENERATED_ONTOLOGY_ID, ontology.concepts()[i].clone()).expect("valid concept")
    };

    let mut services = Vec::with_capacity(params.n_services);
    for s in 0..params.n_services {
        let mut operations = Vec::with_capacity(params.ops_per_service);
        for o in 0..params.ops_per_service {
            let n_in = in_counts.sample(&mut rng);
            let n_out = out_counts.sample(&mut rng);
            let inputs = draw_distinct(&sampler, n_in, params.n_concepts, &mut rng);
            let outputs = draw_distinct(&sampler, n_out, params.n_concepts, &mut rng);
            operations.push(Operation {
                name: format!("op{}", o + 1),
                inputs: inputs.into_iter().map(concept).collect(),
                outputs: outputs.into_iter().map(concept).collect(),
            });
        }
        services.push(Service {
            name: service_name(s, params.n_services),
            operations,
        });
    }
    Ok(Generated {
        collection: Collection::new(services).expect("generated names are unique"),
        ontology,
    })
}

fn service_name(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("svc{i:0width$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(seed: u64) -> GeneratorParams {
        GeneratorParams {
            n_services: 10,
            ops_per_service: 1,
            n_concepts: 20,
            concept_reuse_skew: 1.0,
            seed,
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_collection(&params(1)).unwrap();
        let b = generate_collection(&params(1)).unwrap();
        assert_eq!(a.collection.to_json(), b.collection.to_json());
        assert_eq!(a.ontology.to_json(), b.ontology.to_json());
        let c = generate_collection(&params(2)).unwrap();
        assert_ne!(a.collection.to_json(), c.collection.to_json());
    }

    #[test]
    fn empty_when_no_services() {
        let g = generate_collection(&GeneratorParams {
            n_services: 0,
            ..params(1)
        })
        .unwrap();
        assert!(g.collection.operations().is_empty());
    }

    #[test]
    fn zero_concepts_with_operations_rejected() {
        let err = generate_collection(&GeneratorParams {
            n_concepts: 0,
            ..params(1)
        })
        .unwrap_err();
        assert_eq!(err, GenerateError::NoConcepts(10));
    }

    #[test]
    fn hierarchy_depth_bounded() {
        let g = generate_collection(&GeneratorParams {
            n_concepts: 200,
            ..params(7)
        })
        .unwrap();
        let ont = &g.ontology;
        for c in 0..ont.len() {
            // reflexive ancestors of a depth-d concept lie on chains of at most d+1 nodes
            let mut depth = 0;
            let mut frontier = vec![c];
            while !frontier.is_empty() {
                frontier = frontier.iter().flat_map(|&x| ont.parents(x).to_vec()).collect();
                if !frontier.is_empty() {
                    depth += 1;
                }
            }
            assert!(depth <= MAX_DEPTH);
        }
    }

    #[test]
    fn uniform_when_skew_zero() {
        // Pearson chi-square over 20 cells, 19 dof; 43.8 is the 0.999 quantile.
        let n = 20;
        let draws = 10_000;
        let mut r = rng::stream(11, "test", 0);
        let sampler = ConceptSampler::new(n, 0.0, &mut r).unwrap();
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            counts[sampler.sample(&mut r)] += 1;
        }
        let expected = draws as f64 / n as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 43.8, "chi2 = {chi2}");
    }

    #[test]
    fn skew_concentrates_usage() {
        let mut r = rng::stream(3, "test", 0);
        let sampler = ConceptSampler::new(100, 1.2, &mut r).unwrap();
        let mut counts = vec![0usize; 100];
        for _ in 0..10_000 {
            counts[sampler.sample(&mut r)] += 1;
        }
        counts.sort_unstable_by(|a, b| b.cmp(a));
        assert!(counts[0] > 10 * counts[50]);
    }
}
