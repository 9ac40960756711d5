//! Concept hierarchies and subsumption-based degree of match.
//!
//! Each [`Ontology`] is a DAG of `(child, parent)` subclass edges. The
//! reflexive-transitive closure is computed once at load time as one
//! ancestor bitset per concept, so subsumption queries are O(1).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("malformed ontology document: {0}")]
    Malformed(String),
    #[error("ontology id is empty")]
    EmptyId,
    #[error("ontology `{ontology}`: empty concept name")]
    EmptyConcept { ontology: String },
    #[error("ontology `{ontology}`: concept `{concept}` declared twice")]
    DuplicateConcept { ontology: String, concept: String },
    #[error("ontology `{ontology}`: subclass edge ({child}, {parent}) uses undeclared concept `{missing}`")]
    UndeclaredConcept {
        ontology: String,
        child: String,
        parent: String,
        missing: String,
    },
    #[error("ontology `{ontology}`: subclass cycle through `{concept}`")]
    Cycle { ontology: String, concept: String },
    #[error("ontology `{0}` registered twice")]
    DuplicateOntology(String),
    #[error("unknown ontology `{0}`")]
    UnknownOntology(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(ConceptRef),
    #[error("malformed concept reference `{0}`: expected `ontology_id#local_name`")]
    MalformedRef(String),
}

/// Globally unique concept key, written `ontology_id#local_name`.
///
/// The ontology id never contains `#`; the text is split at the first `#`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptRef {
    ontology: String,
    local: String,
}

impl ConceptRef {
    pub fn new(ontology: impl Into<String>, local: impl Into<String>) -> Result<Self, OntologyError> {
        let ontology = ontology.into();
        let local = local.into();
        if ontology.is_empty() || local.is_empty() || ontology.contains('#') {
            return Err(OntologyError::MalformedRef(format!("{ontology}#{local}")));
        }
        Ok(Self { ontology, local })
    }

    pub fn ontology(&self) -> &str {
        &self.ontology
    }

    pub fn local_name(&self) -> &str {
        &self.local
    }
}

impl fmt::Display for ConceptRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.ontology, self.local)
    }
}

impl FromStr for ConceptRef {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('#') {
            Some((ont, local)) if !ont.is_empty() && !local.is_empty() => Ok(Self {
                ontology: ont.to_owned(),
                local: local.to_owned(),
            }),
            _ => Err(OntologyError::MalformedRef(s.to_owned())),
        }
    }
}

impl Serialize for ConceptRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConceptRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Degree of match between an output concept and an input concept.
///
/// Ordered by relevance: `Exact > Fitin > Plugin > Subsume > Fail`.
/// [`match_degree`](OntologyRegistry::match_degree) never yields `Fitin`;
/// it only exists as a requested level (see [`MatchLevel`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchDegree {
    Exact,
    Fitin,
    Plugin,
    Subsume,
    Fail,
}

impl MatchDegree {
    fn rank(self) -> u8 {
        match self {
            MatchDegree::Exact => 4,
            MatchDegree::Fitin => 3,
            MatchDegree::Plugin => 2,
            MatchDegree::Subsume => 1,
            MatchDegree::Fail => 0,
        }
    }
}

impl Ord for MatchDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for MatchDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Match level requested when building a network or searching a composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchLevel {
    Exact,
    Plugin,
    Subsume,
    Fitin,
}

impl MatchLevel {
    pub const ALL: [MatchLevel; 4] = [
        MatchLevel::Exact,
        MatchLevel::Plugin,
        MatchLevel::Subsume,
        MatchLevel::Fitin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchLevel::Exact => "exact",
            MatchLevel::Plugin => "plugin",
            MatchLevel::Subsume => "subsume",
            MatchLevel::Fitin => "fitin",
        }
    }
}

impl fmt::Display for MatchLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(MatchLevel::Exact),
            "plugin" => Ok(MatchLevel::Plugin),
            "subsume" => Ok(MatchLevel::Subsume),
            "fitin" => Ok(MatchLevel::Fitin),
            other => Err(format!("unknown match level `{other}`")),
        }
    }
}

/// Whether a found degree is accepted at the requested level.
///
/// `Fitin` accepts `Exact` and `Plugin`; every other level accepts only
/// itself. `Fail` satisfies nothing.
pub fn satisfies(found: MatchDegree, level: MatchLevel) -> bool {
    matches!(
        (found, level),
        (MatchDegree::Exact, MatchLevel::Exact)
            | (MatchDegree::Plugin, MatchLevel::Plugin)
            | (MatchDegree::Subsume, MatchLevel::Subsume)
            | (MatchDegree::Exact, MatchLevel::Fitin)
            | (MatchDegree::Plugin, MatchLevel::Fitin)
    )
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct OntologyDocument {
    id: String,
    #[serde(default)]
    concepts: Vec<String>,
    #[serde(default)]
    subclass_of: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct Ontology {
    id: String,
    concepts: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    /// `ancestors[a]` holds `b` iff `a` is subsumed by `b` (reflexive).
    ancestors: Vec<FixedBitSet>,
}

impl Ontology {
    /// Parse an ontology JSON document and compute its subsumption closure.
    pub fn from_json(document: &str) -> Result<Self, OntologyError> {
        let doc: OntologyDocument =
            serde_json::from_str(document).map_err(|e| OntologyError::Malformed(e.to_string()))?;
        Self::new(doc.id, doc.concepts, doc.subclass_of)
    }

    pub fn new(
        id: String,
        concepts: Vec<String>,
        subclass_of: Vec<(String, String)>,
    ) -> Result<Self, OntologyError> {
        if id.is_empty() || id.contains('#') {
            return Err(OntologyError::EmptyId);
        }
        let mut index = HashMap::with_capacity(concepts.len());
        for (i, c) in concepts.iter().enumerate() {
            if c.is_empty() {
                return Err(OntologyError::EmptyConcept { ontology: id });
            }
            if index.insert(c.clone(), i).is_some() {
                return Err(OntologyError::DuplicateConcept {
                    ontology: id,
                    concept: c.clone(),
                });
            }
        }
        let n = concepts.len();
        let mut parents = vec![Vec::new(); n];
        for (child, parent) in &subclass_of {
            let lookup = |name: &String| {
                index.get(name).copied().ok_or_else(|| OntologyError::UndeclaredConcept {
                    ontology: id.clone(),
                    child: child.clone(),
                    parent: parent.clone(),
                    missing: name.clone(),
                })
            };
            let c = lookup(child)?;
            let p = lookup(parent)?;
            if c == p {
                return Err(OntologyError::Cycle {
                    ontology: id,
                    concept: child.clone(),
                });
            }
            parents[c].push(p);
        }
        for ps in &mut parents {
            ps.sort_unstable();
            ps.dedup();
        }

        // Kahn's algorithm from the roots down; a leftover node lies on a cycle.
        let mut children = vec![Vec::new(); n];
        let mut pending = vec![0usize; n];
        for (c, ps) in parents.iter().enumerate() {
            pending[c] = ps.len();
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&c| pending[c] == 0).collect();
        let mut ancestors = vec![FixedBitSet::with_capacity(n); n];
        let mut done = 0;
        while let Some(c) = queue.pop_front() {
            done += 1;
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(c);
            for &p in &parents[c] {
                set.union_with(&ancestors[p]);
            }
            ancestors[c] = set;
            for &ch in &children[c] {
                pending[ch] -= 1;
                if pending[ch] == 0 {
                    queue.push_back(ch);
                }
            }
        }
        if done < n {
            let stuck = (0..n).find(|&c| pending[c] > 0).unwrap_or(0);
            return Err(OntologyError::Cycle {
                ontology: id,
                concept: concepts[stuck].clone(),
            });
        }

        Ok(Self {
            id,
            concepts,
            index,
            parents,
            ancestors,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn parents(&self, concept: usize) -> &[usize] {
        &self.parents[concept]
    }

    /// `true` iff `a` is subsumed by `b` (reflexive, transitive).
    pub fn subsumed_by(&self, a: usize, b: usize) -> bool {
        self.ancestors[a].contains(b)
    }

    pub fn ancestors(&self, concept: usize) -> impl Iterator<Item = usize> + '_ {
        self.ancestors[concept].ones()
    }

    /// Serialize back to the canonical JSON document.
    pub fn to_json(&self) -> String {
        let mut subclass_of = Vec::new();
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                subclass_of.push((self.concepts[c].clone(), self.concepts[p].clone()));
            }
        }
        let doc = OntologyDocument {
            id: self.id.clone(),
            concepts: self.concepts.clone(),
            subclass_of,
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("ontology serializes");
        out.push('\n');
        out
    }
}

/// Concept resolved against a registry: `(ontology slot, concept index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptId {
    pub ontology: u32,
    pub concept: u32,
}

/// Immutable set of loaded ontologies, keyed by id.
#[derive(Debug, Clone, Default)]
pub struct OntologyRegistry {
    ontologies: Vec<Ontology>,
    by_id: BTreeMap<String, usize>,
}

impl OntologyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, ontology: Ontology) -> Result<(), OntologyError> {
        if self.by_id.contains_key(ontology.id()) {
            return Err(OntologyError::DuplicateOntology(ontology.id().to_owned()));
        }
        self.by_id.insert(ontology.id().to_owned(), self.ontologies.len());
        self.ontologies.push(ontology);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Ontology> {
        self.by_id.get(id).map(|&i| &self.ontologies[i])
    }

    pub fn ontologies(&self) -> &[Ontology] {
        &self.ontologies
    }

    pub fn resolve(&self, r: &ConceptRef) -> Result<ConceptId, OntologyError> {
        let slot = *self
            .by_id
            .get(r.ontology())
            .ok_or_else(|| OntologyError::UnknownOntology(r.ontology().to_owned()))?;
        let concept = self.ontologies[slot]
            .concept_index(r.local_name())
            .ok_or_else(|| OntologyError::UnknownConcept(r.clone()))?;
        Ok(ConceptId {
            ontology: slot as u32,
            concept: concept as u32,
        })
    }

    pub fn concept_ref(&self, id: ConceptId) -> ConceptRef {
        let ont = &self.ontologies[id.ontology as usize];
        ConceptRef {
            ontology: ont.id().to_owned(),
            local: ont.concepts()[id.concept as usize].clone(),
        }
    }

    pub fn is_subconcept(&self, a: &ConceptRef, b: &ConceptRef) -> Result<bool, OntologyError> {
        let (a, b) = (self.resolve(a)?, self.resolve(b)?);
        Ok(self.is_subconcept_id(a, b))
    }

    pub fn is_subconcept_id(&self, a: ConceptId, b: ConceptId) -> bool {
        a.ontology == b.ontology
            && self.ontologies[a.ontology as usize].subsumed_by(a.concept as usize, b.concept as usize)
    }

    pub fn match_degree(&self, out: &ConceptRef, inp: &ConceptRef) -> Result<MatchDegree, OntologyError> {
        let (o, i) = (self.resolve(out)?, self.resolve(inp)?);
        Ok(self.match_degree_id(o, i))
    }

    /// Degree of match of output concept `out` against input concept `inp`.
    pub fn match_degree_id(&self, out: ConceptId, inp: ConceptId) -> MatchDegree {
        if out == inp {
            MatchDegree::Exact
        } else if out.ontology != inp.ontology {
            MatchDegree::Fail
        } else {
            let ont = &self.ontologies[out.ontology as usize];
            let (o, i) = (out.concept as usize, inp.concept as usize);
            if ont.subsumed_by(o, i) {
                MatchDegree::Plugin
            } else if ont.subsumed_by(i, o) {
                MatchDegree::Subsume
            } else {
                MatchDegree::Fail
            }
        }
    }

    pub fn satisfies_id(&self, out: ConceptId, inp: ConceptId, level: MatchLevel) -> bool {
        satisfies(self.match_degree_id(out, inp), level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const BOOKS: &str = r#"{
        "id": "books",
        "concepts": ["Textbook", "BiologyTextbook", "ChemistryTextbook", "AnatomyTextbook",
                     "SchoolLevel", "Price"],
        "subclass_of": [["BiologyTextbook", "Textbook"], ["ChemistryTextbook", "Textbook"],
                        ["AnatomyTextbook", "BiologyTextbook"]]
    }"#;

    fn registry() -> OntologyRegistry {
        let mut reg = OntologyRegistry::new();
        reg.register(Ontology::from_json(BOOKS).unwrap()).unwrap();
        reg.register(
            Ontology::new("vehicles".into(), vec!["Vehicle".into(), "Price".into()], vec![]).unwrap(),
        )
        .unwrap();
        reg
    }

    fn c(s: &str) -> ConceptRef {
        s.parse().unwrap()
    }

    #[test]
    fn book_closure_is_transitive() {
        let ont = Ontology::from_json(BOOKS).unwrap();
        let anatomy = ont.concept_index("AnatomyTextbook").unwrap();
        let textbook = ont.concept_index("Textbook").unwrap();
        assert!(ont.subsumed_by(anatomy, textbook));
        assert!(!ont.subsumed_by(textbook, anatomy));
    }

    #[test]
    fn single_concept_is_reflexive_only() {
        let ont = Ontology::new("o".into(), vec!["c".into()], vec![]).unwrap();
        assert_eq!(ont.ancestors(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn two_cycle_rejected() {
        let doc = r#"{"id":"o","concepts":["a","b"],"subclass_of":[["a","b"],["b","a"]]}"#;
        assert!(matches!(Ontology::from_json(doc), Err(OntologyError::Cycle { .. })));
    }

    #[test]
    fn self_edge_rejected() {
        let doc = r#"{"id":"o","concepts":["a"],"subclass_of":[["a","a"]]}"#;
        assert!(matches!(Ontology::from_json(doc), Err(OntologyError::Cycle { .. })));
    }

    #[test]
    fn undeclared_edge_endpoint_rejected() {
        let doc = r#"{"id":"o","concepts":["a"],"subclass_of":[["a","z"]]}"#;
        match Ontology::from_json(doc) {
            Err(OntologyError::UndeclaredConcept { missing, .. }) => assert_eq!(missing, "z"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_registration_rejected() {
        let mut reg = registry();
        let err = reg.register(Ontology::from_json(BOOKS).unwrap()).unwrap_err();
        assert_eq!(err, OntologyError::DuplicateOntology("books".into()));
    }

    #[test]
    fn closure_independent_of_edge_order() {
        let a = Ontology::from_json(BOOKS).unwrap();
        let doc = r#"{"id": "books",
            "concepts": ["Textbook", "BiologyTextbook", "ChemistryTextbook", "AnatomyTextbook", "SchoolLevel", "Price"],
            "subclass_of": [["AnatomyTextbook", "BiologyTextbook"], ["ChemistryTextbook", "Textbook"],
                            ["BiologyTextbook", "Textbook"]]}"#;
        let b = Ontology::from_json(doc).unwrap();
        for i in 0..a.len() {
            assert_eq!(a.ancestors(i).collect::<Vec<_>>(), b.ancestors(i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn subconcept_queries() {
        let reg = registry();
        assert!(reg.is_subconcept(&c("books#AnatomyTextbook"), &c("books#Textbook")).unwrap());
        assert!(reg.is_subconcept(&c("books#Textbook"), &c("books#Textbook")).unwrap());
        assert!(!reg.is_subconcept(&c("books#Price"), &c("vehicles#Price")).unwrap());
        assert!(matches!(
            reg.is_subconcept(&c("nope#X"), &c("books#Price")),
            Err(OntologyError::UnknownOntology(_))
        ));
        assert!(matches!(
            reg.is_subconcept(&c("books#Nope"), &c("books#Price")),
            Err(OntologyError::UnknownConcept(_))
        ));
    }

    #[test]
    fn match_degrees_from_book_examples() {
        let reg = registry();
        let md = |o: &str, i: &str| reg.match_degree(&c(o), &c(i)).unwrap();
        assert_eq!(md("books#BiologyTextbook", "books#BiologyTextbook"), MatchDegree::Exact);
        assert_eq!(md("books#BiologyTextbook", "books#Textbook"), MatchDegree::Plugin);
        assert_eq!(md("books#BiologyTextbook", "books#AnatomyTextbook"), MatchDegree::Subsume);
        assert_eq!(md("books#Price", "vehicles#Price"), MatchDegree::Fail);
        assert_eq!(md("books#ChemistryTextbook", "books#BiologyTextbook"), MatchDegree::Fail);
    }

    #[test]
    fn degree_order_is_total() {
        use MatchDegree::*;
        let mut v = vec![Fail, Plugin, Exact, Subsume, Fitin];
        v.sort();
        assert_eq!(v, vec![Fail, Subsume, Plugin, Fitin, Exact]);
    }

    #[test]
    fn satisfies_table() {
        use MatchDegree as D;
        use MatchLevel as L;
        assert!(satisfies(D::Exact, L::Fitin));
        assert!(satisfies(D::Plugin, L::Fitin));
        assert!(!satisfies(D::Subsume, L::Fitin));
        assert!(!satisfies(D::Plugin, L::Exact));
        assert!(!satisfies(D::Exact, L::Plugin));
        for level in MatchLevel::ALL {
            assert!(!satisfies(D::Fail, level));
        }
    }

    #[test]
    fn concept_ref_parsing() {
        let r = c("http://x/onto#Country");
        assert_eq!(r.ontology(), "http://x/onto");
        assert_eq!(r.local_name(), "Country");
        assert!("noseparator".parse::<ConceptRef>().is_err());
        assert!("#x".parse::<ConceptRef>().is_err());
        assert!("x#".parse::<ConceptRef>().is_err());
        assert_eq!(c("a#b#c").local_name(), "b#c");
    }

    #[test]
    fn round_trip_json() {
        let a = Ontology::from_json(BOOKS).unwrap();
        let b = Ontology::from_json(&a.to_json()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
