//! Services, operations and collections in the canonical JSON format.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{ConceptId, ConceptRef, OntologyError, OntologyRegistry};

mod generate;
mod wsdl;

pub use generate::{generate_collection, ConceptSampler, GenerateError, Generated, GeneratorParams};
pub use wsdl::{import_wsdl, FileReport, ImportReport, WsdlError, WsdlImport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollectionError {
    #[error("malformed collection document: {0}")]
    Malformed(String),
    #[error("empty service name")]
    EmptyServiceName,
    #[error("service `{0}`: empty operation name")]
    EmptyOperationName(String),
    #[error("duplicate service name `{0}`")]
    DuplicateService(String),
    #[error("duplicate operation id `{0}`")]
    DuplicateOperation(String),
    #[error("operation `{operation}`: unresolved concept `{concept}`: {source}")]
    Unresolved {
        operation: String,
        concept: ConceptRef,
        source: Box<OntologyError>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Operation {
    pub name: String,
    #[serde(default)]
    pub inputs: Vec<ConceptRef>,
    #[serde(default)]
    pub outputs: Vec<ConceptRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Service {
    pub name: String,
    #[serde(default)]
    pub operations: Vec<Operation>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionDocument {
    pub services: Vec<Service>,
}

/// Operation as seen by the network builder: `service.operation` id plus
/// its parameter lists (multisets, file order preserved).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationRecord {
    pub id: String,
    pub service: String,
    pub inputs: Vec<ConceptRef>,
    pub outputs: Vec<ConceptRef>,
}

/// A validated collection of services with a flat, file-ordered operation index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collection {
    services: Vec<Service>,
    operations: Vec<OperationRecord>,
}

pub fn operation_id(service: &str, operation: &str) -> String {
    format!("{service}.{operation}")
}

impl Collection {
    pub fn from_json(document: &str) -> Result<Self, CollectionError> {
        let doc: CollectionDocument =
            serde_json::from_str(document).map_err(|e| CollectionError::Malformed(e.to_string()))?;
        Self::new(doc.services)
    }

    pub fn new(services: Vec<Service>) -> Result<Self, CollectionError> {
        let mut names = HashSet::new();
        let mut ids = HashSet::new();
        let mut operations = Vec::new();
        for s in &services {
            if s.name.is_empty() {
                return Err(CollectionError::EmptyServiceName);
            }
            if !names.insert(s.name.as_str()) {
                return Err(CollectionError::DuplicateService(s.name.clone()));
            }
            for op in &s.operations {
                if op.name.is_empty() {
                    return Err(CollectionError::EmptyOperationName(s.name.clone()));
                }
                let id = operation_id(&s.name, &op.name);
                if !ids.insert(id.clone()) {
                    return Err(CollectionError::DuplicateOperation(id));
                }
                operations.push(OperationRecord {
                    id,
                    service: s.name.clone(),
                    inputs: op.inputs.clone(),
                    outputs: op.outputs.clone(),
                });
            }
        }
        Ok(Self { services, operations })
    }

    pub fn empty() -> Self {
        Self {
            services: Vec::new(),
            operations: Vec::new(),
        }
    }

    pub fn services(&self) -> &[Service] {
        &self.services
    }

    pub fn operations(&self) -> &[OperationRecord] {
        &self.operations
    }

    pub fn operation_index(&self, id: &str) -> Option<usize> {
        self.operations.iter().position(|op| op.id == id)
    }

    /// Distinct concept references, sorted.
    pub fn concepts(&self) -> BTreeSet<&ConceptRef> {
        self.operations
            .iter()
            .flat_map(|op| op.inputs.iter().chain(&op.outputs))
            .collect()
    }

    pub fn ontology_ids(&self) -> BTreeSet<&str> {
        self.concepts().into_iter().map(|c| c.ontology()).collect()
    }

    /// Total number of parameter occurrences (inputs plus outputs, with repeats).
    pub fn parameter_instances(&self) -> usize {
        self.operations.iter().map(|op| op.inputs.len() + op.outputs.len()).sum()
    }

    /// Resolve every operation's parameters to deduplicated, sorted concept ids.
    pub fn resolve(&self, registry: &OntologyRegistry) -> Result<Vec<ResolvedOperation>, CollectionError> {
        self.operations
            .iter()
            .map(|op| {
                let resolve_all = |refs: &[ConceptRef]| -> Result<Vec<ConceptId>, CollectionError> {
                    let mut ids = refs
                        .iter()
                        .map(|r| {
                            registry.resolve(r).map_err(|source| CollectionError::Unresolved {
                                operation: op.id.clone(),
                                concept: r.clone(),
                                source: Box::new(source),
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    ids.sort_unstable();
                    ids.dedup();
                    Ok(ids)
                };
                Ok(ResolvedOperation {
                    inputs: resolve_all(&op.inputs)?,
                    outputs: resolve_all(&op.outputs)?,
                })
            })
            .collect()
    }

    pub fn validate(&self, registry: &OntologyRegistry) -> Result<(), CollectionError> {
        self.resolve(registry).map(|_| ())
    }

    pub fn to_document(&self) -> CollectionDocument {
        CollectionDocument {
            services: self.services.clone(),
        }
    }

    /// Canonical JSON: pretty-printed, trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_document()).expect("collection serializes");
        out.push('\n');
        out
    }
}

/// Parameter sets of one operation as resolved concept ids (set semantics).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedOperation {
    pub inputs: Vec<ConceptId>,
    pub outputs: Vec<ConceptId>,
}
