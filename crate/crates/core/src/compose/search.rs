use std::collections::{BTreeMap, HashSet, VecDeque};

use super::{Binding, CompositionPlan, Membership, SearchOutcome, SearchStats, Source};
use crate::model::ResolvedOperation;
use crate::ontology::{ConceptId, MatchLevel, OntologyRegistry};

pub(super) struct Query {
    pub provided: Vec<ConceptId>,
    pub goals: Vec<ConceptId>,
    pub level: MatchLevel,
    pub max_depth: usize,
}

/// Parameter network with resolved concepts and operation indices.
pub(super) struct ParameterView<'a> {
    pub concepts: &'a [ConceptId],
    pub edges: &'a [(usize, usize)],
    pub provenance: &'a [Vec<usize>],
}

pub(super) struct Engine<'a> {
    pub registry: &'a OntologyRegistry,
    pub ops: &'a [ResolvedOperation],
    pub ids: Vec<&'a str>,
}

#[derive(Clone, Copy)]
enum Origin {
    Provided,
    Op(usize),
}

struct Available {
    concept: ConceptId,
    origin: Origin,
}

struct Run {
    plan: Option<CompositionPlan>,
    examined: usize,
}

impl Engine<'_> {
    fn satisfies(&self, have: ConceptId, want: ConceptId, level: MatchLevel) -> bool {
        self.registry.satisfies_id(have, want, level)
    }

    /// Index of the earliest entry of `avail[..limit]` satisfying `want`.
    fn first_satisfier(&self, avail: &[Available], limit: usize, want: ConceptId, level: MatchLevel) -> Option<usize> {
        avail[..limit].iter().position(|a| self.satisfies(a.concept, want, level))
    }

    fn by_id(&self, mut ops: Vec<usize>) -> Vec<usize> {
        ops.sort_by(|&a, &b| self.ids[a].cmp(self.ids[b]));
        ops
    }

    /// Forward chaining in rounds over `candidates`, which also fixes the
    /// tie-breaking order.
    fn run(&self, q: &Query, candidates: &[usize]) -> Run {
        let level = q.level;
        let mut avail: Vec<Available> = q
            .provided
            .iter()
            .map(|&c| Available {
                concept: c,
                origin: Origin::Provided,
            })
            .collect();
        let mut known: HashSet<ConceptId> = q.provided.iter().copied().collect();
        let mut round_of: Vec<Option<usize>> = vec![None; self.ops.len()];
        let mut evaluated = vec![false; self.ops.len()];
        let mut examined = 0;
        let goals_met = |avail: &[Available]| {
            q.goals
                .iter()
                .all(|&g| self.first_satisfier(avail, avail.len(), g, level).is_some())
        };

        let mut round = 0;
        while !goals_met(&avail) {
            if round == q.max_depth {
                return Run { plan: None, examined };
            }
            round += 1;
            let limit = avail.len();
            let mut fired = Vec::new();
            for &op in candidates {
                if round_of[op].is_some() {
                    continue;
                }
                if !evaluated[op] {
                    evaluated[op] = true;
                    examined += 1;
                }
                if self.ops[op]
                    .inputs
                    .iter()
                    .all(|&c| self.first_satisfier(&avail, limit, c, level).is_some())
                {
                    fired.push(op);
                }
            }
            if fired.is_empty() {
                return Run { plan: None, examined };
            }
            for op in fired {
                round_of[op] = Some(round);
                for &c in &self.ops[op].outputs {
                    if known.insert(c) {
                        avail.push(Available {
                            concept: c,
                            origin: Origin::Op(op),
                        });
                    }
                }
            }
        }

        let rank: BTreeMap<usize, usize> = candidates.iter().enumerate().map(|(i, &op)| (op, i)).collect();
        Run {
            plan: Some(self.extract(q, &avail, &round_of, &rank)),
            examined,
        }
    }

    /// Walk back from the goals, binding each need to its earliest supplier.
    fn extract(
        &self,
        q: &Query,
        avail: &[Available],
        round_of: &[Option<usize>],
        rank: &BTreeMap<usize, usize>,
    ) -> CompositionPlan {
        let level = q.level;
        let concept_label = |c: ConceptId| self.registry.concept_ref(c);
        let binding = |idx: usize| {
            let a = &avail[idx];
            Binding {
                source: match a.origin {
                    Origin::Provided => Source::Provided,
                    Origin::Op(op) => Source::Step(self.ids[op].to_owned()),
                },
                concept: concept_label(a.concept),
            }
        };
        let mut needed = vec![false; self.ops.len()];
        let mut stack = Vec::new();
        let mut supplier_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut goals = BTreeMap::new();
        for &g in &q.goals {
            let idx = self.first_satisfier(avail, avail.len(), g, level).expect("goals met");
            goals.insert(concept_label(g).to_string(), binding(idx));
            if let Origin::Op(op) = avail[idx].origin {
                if !needed[op] {
                    needed[op] = true;
                    stack.push(op);
                }
            }
        }
        let mut bindings: BTreeMap<String, BTreeMap<String, Binding>> = BTreeMap::new();
        while let Some(op) = stack.pop() {
            let mut inputs = BTreeMap::new();
            for &c in &self.ops[op].inputs {
                let idx = self.first_satisfier(avail, avail.len(), c, level).expect("fired op has inputs");
                inputs.insert(concept_label(c).to_string(), binding(idx));
                if let Origin::Op(src) = avail[idx].origin {
                    supplier_of.entry(op).or_default().push(src);
                    if !needed[src] {
                        needed[src] = true;
                        stack.push(src);
                    }
                }
            }
            bindings.insert(self.ids[op].to_owned(), inputs);
        }

        let mut steps: Vec<usize> = (0..self.ops.len()).filter(|&op| needed[op]).collect();
        steps.sort_by_key(|&op| (round_of[op], rank[&op]));
        let mut chain = vec![0usize; self.ops.len()];
        for &op in &steps {
            let before = supplier_of.get(&op).map_or(0, |s| s.iter().map(|&s| chain[s]).max().unwrap_or(0));
            chain[op] = before + 1;
        }
        CompositionPlan {
            depth: steps.iter().map(|&op| chain[op]).max().unwrap_or(0),
            steps: steps.iter().map(|&op| self.ids[op].to_owned()).collect(),
            bindings,
            goals,
        }
    }

    fn outcome(&self, run: Run) -> SearchOutcome {
        SearchOutcome {
            plan: run.plan,
            stats: SearchStats {
                candidates_examined: run.examined,
                total_candidates: self.ops.len(),
                ..SearchStats::default()
            },
        }
    }

    pub fn forward_strategy(&self, q: &Query) -> SearchOutcome {
        let all = self.by_id((0..self.ops.len()).collect());
        self.outcome(self.run(q, &all))
    }

    /// Forward chaining that tries high out-degree operations first.
    pub fn hub_seeded(&self, q: &Query, out_degree: &[usize]) -> SearchOutcome {
        let mut order = self.by_id((0..self.ops.len()).collect());
        order.sort_by(|&a, &b| out_degree[b].cmp(&out_degree[a]));
        self.outcome(self.run(q, &order))
    }

    /// Regress from the goals to the operations that can contribute, then
    /// chain forward over those, authorities first.
    pub fn backward(&self, q: &Query, in_degree: &[usize]) -> SearchOutcome {
        let level = q.level;
        let provided_covers = |c: ConceptId| q.provided.iter().any(|&p| self.satisfies(p, c, level));
        let mut relevant = vec![false; self.ops.len()];
        let mut wanted: HashSet<ConceptId> = HashSet::new();
        let mut open: Vec<ConceptId> = Vec::new();
        for &g in &q.goals {
            if !provided_covers(g) && wanted.insert(g) {
                open.push(g);
            }
        }
        while let Some(c) = open.pop() {
            for (op, r) in self.ops.iter().enumerate() {
                if relevant[op] || !r.outputs.iter().any(|&o| self.satisfies(o, c, level)) {
                    continue;
                }
                relevant[op] = true;
                for &i in &r.inputs {
                    if !provided_covers(i) && wanted.insert(i) {
                        open.push(i);
                    }
                }
            }
        }
        let mut order = self.by_id((0..self.ops.len()).filter(|&op| relevant[op]).collect());
        order.sort_by(|&a, &b| in_degree[b].cmp(&in_degree[a]));
        let mut outcome = self.outcome(self.run(q, &order));
        outcome.stats.pruned_candidates = Some(order.len());
        outcome
    }

    /// Search the goal-producing communities and their neighbours first,
    /// then everything if that fails.
    pub fn community_pruned(&self, q: &Query, membership: &Membership, op_edges: &[(usize, usize)]) -> SearchOutcome {
        let level = q.level;
        let mut kept: HashSet<usize> = HashSet::new();
        for (op, r) in self.ops.iter().enumerate() {
            if let Some(c) = membership[op] {
                if r.outputs.iter().any(|&o| q.goals.iter().any(|&g| self.satisfies(o, g, level))) {
                    kept.insert(c);
                }
            }
        }
        let mut ring = kept.clone();
        for &(u, v) in op_edges {
            if let (Some(a), Some(b)) = (membership[u], membership[v]) {
                if kept.contains(&a) {
                    ring.insert(b);
                }
                if kept.contains(&b) {
                    ring.insert(a);
                }
            }
        }
        let pruned = self.by_id(
            (0..self.ops.len())
                .filter(|&op| membership[op].is_some_and(|c| ring.contains(&c)))
                .collect(),
        );
        let first = self.run(q, &pruned);
        let mut outcome = if first.plan.is_some() {
            let mut o = self.outcome(first);
            o.stats.fell_back = Some(false);
            o
        } else {
            let all = self.by_id((0..self.ops.len()).collect());
            let second = self.run(q, &all);
            let mut o = self.outcome(
                Run {
                    plan: second.plan,
                    examined: first.examined + second.examined,
                },
            );
            o.stats.fell_back = Some(true);
            o
        };
        outcome.stats.pruned_candidates = Some(pruned.len());
        outcome
    }

    /// Concept reachability over the parameter network first; operations
    /// are only touched when every goal is reachable.
    pub fn two_phase(&self, q: &Query, params: &ParameterView<'_>) -> SearchOutcome {
        let level = q.level;
        let n = params.concepts.len();
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut in_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (e, &(a, b)) in params.edges.iter().enumerate() {
            out_edges[a].push(e);
            in_edges[b].push(e);
        }

        // phase 1: which concepts can become available at all
        let mut reached: HashSet<ConceptId> = HashSet::new();
        let mut queue: VecDeque<ConceptId> = VecDeque::new();
        let seeds = q.provided.iter().copied().chain(
            self.ops
                .iter()
                .filter(|r| r.inputs.is_empty())
                .flat_map(|r| r.outputs.iter().copied()),
        );
        for c in seeds {
            if reached.insert(c) {
                queue.push_back(c);
            }
        }
        let mut matched = vec![false; n];
        while let Some(x) = queue.pop_front() {
            for a in 0..n {
                if matched[a] || !self.satisfies(x, params.concepts[a], level) {
                    continue;
                }
                matched[a] = true;
                for &e in &out_edges[a] {
                    let b = params.concepts[params.edges[e].1];
                    if reached.insert(b) {
                        queue.push_back(b);
                    }
                }
            }
        }
        let reachable = q
            .goals
            .iter()
            .all(|&g| reached.iter().any(|&x| self.satisfies(x, g, level)));
        if !reachable {
            return SearchOutcome {
                plan: None,
                stats: SearchStats {
                    candidates_examined: 0,
                    phase1_only: true,
                    total_candidates: self.ops.len(),
                    pruned_candidates: Some(0),
                    fell_back: None,
                },
            };
        }

        // phase 2: concepts that can feed a goal, and the operations behind
        // edges from a reachable input to such a concept
        let mut wanted: Vec<ConceptId> = Vec::new();
        let mut wanted_set: HashSet<ConceptId> = HashSet::new();
        for &g in &q.goals {
            if wanted_set.insert(g) {
                wanted.push(g);
            }
        }
        let mut useful = vec![false; n];
        let mut next = 0;
        while next < wanted.len() {
            let w = wanted[next];
            next += 1;
            for y in 0..n {
                if useful[y] || !self.satisfies(params.concepts[y], w, level) {
                    continue;
                }
                useful[y] = true;
                for &e in &in_edges[y] {
                    let a = params.concepts[params.edges[e].0];
                    if wanted_set.insert(a) {
                        wanted.push(a);
                    }
                }
            }
        }
        let mut keep = vec![false; self.ops.len()];
        for (e, &(a, b)) in params.edges.iter().enumerate() {
            if matched[a] && useful[b] {
                for &op in &params.provenance[e] {
                    keep[op] = true;
                }
            }
        }
        for (op, r) in self.ops.iter().enumerate() {
            if r.inputs.is_empty() && r.outputs.iter().any(|&o| wanted.iter().any(|&w| self.satisfies(o, w, level))) {
                keep[op] = true;
            }
        }
        let candidates = self.by_id((0..self.ops.len()).filter(|&op| keep[op]).collect());
        let mut outcome = self.outcome(self.run(q, &candidates));
        outcome.stats.pruned_candidates = Some(candidates.len());
        outcome
    }
}
