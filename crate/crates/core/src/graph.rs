//! Index-based directed graphs and their undirected projections.

/// Directed simple graph on nodes `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    n_edges: usize,
}

impl Digraph {
    /// Build from an edge list; self-loops and repeated edges are dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u != v {
                out[u].push(v);
            }
        }
        let mut n_edges = 0;
        for (u, list) in out.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            n_edges += list.len();
            for &v in list.iter() {
                inn[v].push(u);
            }
        }
        Self { out, inn, n_edges }
    }

    pub fn n_nodes(&self) -> usize {
        self.out.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn successors(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    pub fn predecessors(&self, u: usize) -> &[usize] {
        &self.inn[u]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out[u].len()
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.inn[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Subgraph induced by `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Digraph {
        let mut pos = vec![usize::MAX; self.n_nodes()];
        for (i, &u) in nodes.iter().enumerate() {
            pos[u] = i;
        }
        let edges = nodes.iter().enumerate().flat_map(|(i, &u)| {
            let pos = &pos;
            self.out[u]
                .iter()
                .filter(move |&&v| pos[v] != usize::MAX)
                .map(move |&v| (i, pos[v]))
        });
        Digraph::new(nodes.len(), edges.collect::<Vec<_>>())
    }

    pub fn undirected(&self) -> UndirectedGraph {
        UndirectedGraph::new(
            self.n_nodes(),
            self.edges().collect::<Vec<_>>(),
        )
    }
}

/// Undirected simple graph: `u -> v` and `v -> u` collapse into one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<Vec<usize>>,
    n_edges: usize,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut twice = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Self {
            adj,
            n_edges: twice / 2,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }
}
