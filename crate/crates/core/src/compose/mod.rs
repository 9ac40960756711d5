//! Composition search: chain operations so that provided concepts lead to
//! goal concepts under one match level.
//!
//! Every strategy ends in the same round-based forward chaining over some
//! candidate set of operations, so plans are minimal in invocation rounds.
//! Strategies differ in how they pick and order that candidate set.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::community::{walktrap, CommunityError};
use crate::model::{Collection, CollectionError, ResolvedOperation};
use crate::network::{build_operation_network, build_parameter_network, decompose, BuildOptions, Invocation};
use crate::ontology::{ConceptId, ConceptRef, MatchLevel, OntologyError, OntologyRegistry};

mod search;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComposeError {
    #[error("a composition request needs at least one goal")]
    NoGoals,
    #[error("max depth must be at least 1")]
    InvalidDepth,
    #[error("request concept `{concept}`: {source}")]
    UnknownConcept {
        concept: ConceptRef,
        #[source]
        source: Box<OntologyError>,
    },
    #[error(transparent)]
    Collection(#[from] CollectionError),
    #[error("community membership covers {got} operations, collection has {want}")]
    MembershipLength { got: usize, want: usize },
    #[error(transparent)]
    Community(#[from] CommunityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Forward,
    Backward,
    HubSeeded,
    CommunityPruned,
    TwoPhase,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Forward,
        Strategy::Backward,
        Strategy::HubSeeded,
        Strategy::CommunityPruned,
        Strategy::TwoPhase,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Forward => "forward",
            Strategy::Backward => "backward",
            Strategy::HubSeeded => "hub-seeded",
            Strategy::CommunityPruned => "community-pruned",
            Strategy::TwoPhase => "two-phase",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionRequest {
    pub provided: Vec<ConceptRef>,
    pub goals: Vec<ConceptRef>,
    pub level: MatchLevel,
    pub max_depth: usize,
    pub strategy: Strategy,
}

/// Where a step input (or goal) gets its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Provided,
    Step(String),
}

impl Serialize for Source {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Source::Provided => serializer.serialize_str("provided"),
            Source::Step(id) => serializer.serialize_str(id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Binding {
    pub source: Source,
    /// The available concept that satisfies the input.
    pub concept: ConceptRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionPlan {
    /// Operation ids in execution order.
    pub steps: Vec<String>,
    /// Per step, input concept to the binding that satisfies it.
    pub bindings: BTreeMap<String, BTreeMap<String, Binding>>,
    /// Goal concept to the binding that satisfies it.
    pub goals: BTreeMap<String, Binding>,
    /// Longest chain of dependent steps.
    pub depth: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Operations whose invocability the search evaluated.
    pub candidates_examined: usize,
    /// The parameter-network phase ruled the request out on its own.
    pub phase1_only: bool,
    pub total_candidates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pruned_candidates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fell_back: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub plan: Option<CompositionPlan>,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn is_solvable(&self) -> bool {
        self.plan.is_some()
    }

    /// `{"solvable":..,"steps":[..],"bindings":{..},"goals":{..},"depth":n,"stats":{..}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            solvable: bool,
            steps: &'a [String],
            bindings: &'a BTreeMap<String, BTreeMap<String, Binding>>,
            goals: &'a BTreeMap<String, Binding>,
            depth: usize,
            stats: &'a SearchStats,
        }
        let empty_bindings = BTreeMap::new();
        let empty_goals = BTreeMap::new();
        let doc = match &self.plan {
            Some(p) => Doc {
                solvable: true,
                steps: &p.steps,
                bindings: &p.bindings,
                goals: &p.goals,
                depth: p.depth,
                stats: &self.stats,
            },
            None => Doc {
                solvable: false,
                steps: &[],
                bindings: &empty_bindings,
                goals: &empty_goals,
                depth: 0,
                stats: &self.stats,
            },
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("plan serializes");
        out.push('\n');
        out
    }
}

/// Community of every operation (`None` outside the clustered part).
pub type Membership = [Option<usize>];

/// A collection prepared for composition queries.
pub struct Composer<'a> {
    collection: &'a Collection,
    registry: &'a OntologyRegistry,
    ops: Vec<ResolvedOperation>,
}

impl<'a> Composer<'a> {
    pub fn new(collection: &'a Collection, registry: &'a OntologyRegistry) -> Result<Self, ComposeError> {
        Ok(Self {
            collection,
            registry,
            ops: collection.resolve(registry)?,
        })
    }

    pub fn collection(&self) -> &Collection {
        self.collection
    }

    /// Answer `request`. `membership` is only read by the community-pruned
    /// strategy; without it that strategy searches unpruned.
    pub fn compose(
        &self,
        request: &CompositionRequest,
        membership: Option<&Membership>,
    ) -> Result<SearchOutcome, ComposeError> {
        if request.goals.is_empty() {
            return Err(ComposeError::NoGoals);
        }
        if request.max_depth == 0 {
            return Err(ComposeError::InvalidDepth);
        }
        if let Some(m) = membership {
            if m.len() != self.ops.len() {
                return Err(ComposeError::MembershipLength {
                    got: m.len(),
                    want: self.ops.len(),
                });
            }
        }
        let resolve = |refs: &[ConceptRef]| -> Result<Vec<ConceptId>, ComposeError> {
            let mut ids = Vec::with_capacity(refs.len());
            for r in refs {
                let id = self.registry.resolve(r).map_err(|source| ComposeError::UnknownConcept {
                    concept: r.clone(),
                    source: Box::new(source),
                })?;
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
            Ok(ids)
        };
        let query = search::Query {
            provided: resolve(&request.provided)?,
            goals: resolve(&request.goals)?,
            level: request.level,
            max_depth: request.max_depth,
        };
        let engine = search::Engine {
            registry: self.registry,
            ops: &self.ops,
            ids: self.collection.operations().iter().map(|o| o.id.as_str()).collect(),
        };
        Ok(match request.strategy {
            Strategy::Forward => engine.forward_strategy(&query),
            Strategy::HubSeeded => {
                let degree = self.out_degrees(request.level)?;
                engine.hub_seeded(&query, &degree)
            }
            Strategy::Backward => {
                let degree = self.in_degrees(request.level)?;
                engine.backward(&query, &degree)
            }
            Strategy::CommunityPruned => match membership {
                Some(m) if m.iter().any(Option::is_some) => {
                    let net = build_operation_network(
                        self.collection,
                        self.registry,
                        request.level,
                        Invocation::Full,
                        BuildOptions::default(),
                    )?;
                    engine.community_pruned(&query, m, net.edges())
                }
                _ => engine.forward_strategy(&query),
            },
            Strategy::TwoPhase => {
                let net = build_parameter_network(self.collection, self.registry)?;
                let concepts: Vec<ConceptId> = net
                    .nodes()
                    .iter()
                    .map(|label| {
                        let r: ConceptRef = label.parse().expect("parameter nodes are concept refs");
                        self.registry.resolve(&r).expect("collection validated")
                    })
                    .collect();
                let provenance: Vec<Vec<usize>> = net
                    .provenance()
                    .iter()
                    .map(|ops| {
                        ops.iter()
                            .map(|id| self.collection.operation_index(id).expect("known operation"))
                            .collect()
                    })
                    .collect();
                let params = search::ParameterView {
                    concepts: &concepts,
                    edges: net.edges(),
                    provenance: &provenance,
                };
                engine.two_phase(&query, &params)
            }
        })
    }

    fn out_degrees(&self, level: MatchLevel) -> Result<Vec<usize>, ComposeError> {
        let g = build_operation_network(self.collection, self.registry, level, Invocation::Full, BuildOptions::default())?
            .graph();
        Ok((0..g.n_nodes()).map(|u| g.out_degree(u)).collect())
    }

    fn in_degrees(&self, level: MatchLevel) -> Result<Vec<usize>, ComposeError> {
        let g = build_operation_network(self.collection, self.registry, level, Invocation::Full, BuildOptions::default())?
            .graph();
        Ok((0..g.n_nodes()).map(|u| g.in_degree(u)).collect())
    }

    /// Walktrap communities of the giant component of the level's
    /// full-invocation operation network.
    pub fn operation_communities(
        &self,
        level: MatchLevel,
        walk_length: usize,
    ) -> Result<Vec<Option<usize>>, ComposeError> {
        let net = build_operation_network(self.collection, self.registry, level, Invocation::Full, BuildOptions::default())?;
        let mut membership = vec![None; self.ops.len()];
        let decomposition = decompose(&net);
        if let Some(giant) = decomposition.giant() {
            let sub = net.induced(giant).graph().undirected();
            let result = walktrap(&sub, walk_length)?;
            for (local, &node) in giant.iter().enumerate() {
                membership[node] = Some(result.partition.assignment()[local]);
            }
        }
        Ok(membership)
    }
}
