mod common;

use proptest::prelude::*;
use svcnet::ontology::{satisfies, ConceptRef, MatchDegree, MatchLevel, Ontology, OntologyError, OntologyRegistry};

use common::registry;

fn r(s: &str) -> ConceptRef {
    s.parse().unwrap()
}

fn books() -> OntologyRegistry {
    registry(&["books_ontology.json", "vehicles_ontology.json"])
}

#[test]
fn book_ontology_match_examples() {
    let reg = books();
    let cases = [
        ("books#BiologyTextbook", "books#BiologyTextbook", MatchDegree::Exact),
        ("books#BiologyTextbook", "books#Textbook", MatchDegree::Plugin),
        ("books#BiologyTextbook", "books#AnatomyTextbook", MatchDegree::Subsume),
        ("books#Price", "vehicles#Price", MatchDegree::Fail),
    ];
    for (out, inp, want) in cases {
        assert_eq!(reg.match_degree(&r(out), &r(inp)).unwrap(), want, "{out} -> {inp}");
    }
}

#[test]
fn subconcept_examples() {
    let reg = books();
    assert!(reg.is_subconcept(&r("books#AnatomyTextbook"), &r("books#Textbook")).unwrap());
    assert!(reg.is_subconcept(&r("books#Textbook"), &r("books#Textbook")).unwrap());
    assert!(!reg.is_subconcept(&r("books#Price"), &r("vehicles#Price")).unwrap());
    assert!(!reg.is_subconcept(&r("books#Textbook"), &r("books#AnatomyTextbook")).unwrap());
    assert!(matches!(
        reg.is_subconcept(&r("music#Song"), &r("books#Textbook")),
        Err(OntologyError::UnknownOntology(_))
    ));
    assert!(matches!(
        reg.is_subconcept(&r("books#Novel"), &r("books#Textbook")),
        Err(OntologyError::UnknownConcept { .. })
    ));
}

#[test]
fn load_errors() {
    let cycle = r#"{"id":"o","concepts":["a","b"],"subclass_of":[["a","b"],["b","a"]]}"#;
    assert!(matches!(Ontology::from_json(cycle), Err(OntologyError::Cycle { .. })));
    let undeclared = r#"{"id":"o","concepts":["a"],"subclass_of":[["a","b"]]}"#;
    assert!(matches!(Ontology::from_json(undeclared), Err(OntologyError::UndeclaredConcept { .. })));
    let mut reg = books();
    let again = Ontology::from_json(r#"{"id":"books","concepts":["x"],"subclass_of":[]}"#).unwrap();
    assert!(matches!(reg.register(again), Err(OntologyError::DuplicateOntology(_))));
}

#[test]
fn single_concept_is_reflexive() {
    let o = Ontology::from_json(r#"{"id":"o","concepts":["c"],"subclass_of":[]}"#).unwrap();
    assert!(o.subsumed_by(0, 0));
    assert_eq!(o.ancestors(0).collect::<Vec<_>>(), vec![0]);
}

#[test]
fn satisfies_table() {
    use MatchDegree::*;
    assert!(satisfies(Exact, MatchLevel::Fitin));
    assert!(satisfies(Plugin, MatchLevel::Fitin));
    assert!(!satisfies(Subsume, MatchLevel::Fitin));
    assert!(!satisfies(Plugin, MatchLevel::Exact));
    for level in MatchLevel::ALL {
        assert!(!satisfies(Fail, level));
    }
}

fn random_dag() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<usize>)> {
    (1usize..=50).prop_flat_map(|n| {
        let edges = proptest::collection::vec((0..n, 0..n), 0..(2 * n));
        let order = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        (Just(n), edges, order)
    })
}

/// Reflexive-transitive closure by repeated relational join until nothing changes.
fn join_closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(c, p) in edges {
        reach[c][p] = true;
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if !reach[a][b] && (0..n).any(|m| reach[a][m] && reach[m][b]) {
                    reach[a][b] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return reach;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_matches_relational_join((n, raw, order) in random_dag()) {
        // orient every edge along a random topological order so the relation is acyclic
        let rank: Vec<usize> = {
            let mut rank = vec![0; n];
            for (pos, &node) in order.iter().enumerate() {
                rank[node] = pos;
            }
            rank
        };
        let edges: Vec<(usize, usize)> = raw
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| if rank[a] > rank[b] { (a, b) } else { (b, a) })
            .collect();
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let named: Vec<(String, String)> = edges.iter().map(|&(c, p)| (names[c].clone(), names[p].clone())).collect();
        let onto = Ontology::new("t".into(), names.clone(), named.clone()).unwrap();
        let other = Ontology::new("u".into(), names.clone(), vec![]).unwrap();
        let want = join_closure(n, &edges);

        let mut reversed = named.clone();
        reversed.reverse();
        let shuffled = Ontology::new("t".into(), names.clone(), reversed).unwrap();

        let mut reg = OntologyRegistry::new();
        reg.register(onto.clone()).unwrap();
        reg.register(other).unwrap();
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(onto.subsumed_by(a, b), want[a][b]);
                prop_assert_eq!(shuffled.subsumed_by(a, b), want[a][b]);
                if a != b {
                    prop_assert!(!(want[a][b] && want[b][a]));
                }
                let ra = ConceptRef::new("t", names[a].clone()).unwrap();
                let rb = ConceptRef::new("t", names[b].clone()).unwrap();
                let forward = reg.match_degree(&ra, &rb).unwrap();
                let backward = reg.match_degree(&rb, &ra).unwrap();
                prop_assert_eq!(forward == MatchDegree::Exact, a == b);
                prop_assert_eq!(forward == MatchDegree::Plugin, backward == MatchDegree::Subsume);
                let ub = ConceptRef::new("u", names[b].clone()).unwrap();
                prop_assert_eq!(reg.match_degree(&ra, &ub).unwrap(), MatchDegree::Fail);
            }
        }
    }

    #[test]
    fn concept_ref_round_trips(ont in "[a-z]{1,6}", local in "[A-Za-z0-9#]{1,8}") {
        let c = ConceptRef::new(ont.clone(), local.clone()).unwrap();
        let text = c.to_string();
        prop_assert_eq!(text.parse::<ConceptRef>().unwrap(), c);
    }
}
