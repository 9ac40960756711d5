use serde::Serialize;

use super::InteractionNetwork;

/// Weakly connected components, largest first.
///
/// Ties in size are broken by the smallest node index in the component.
/// There is a giant component only when the largest component has at
/// least two nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    n_nodes: usize,
    components: Vec<Vec<usize>>,
}

impl ComponentDecomposition {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Every component (node indices sorted ascending within each).
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn giant(&self) -> Option<&[usize]> {
        self.components
            .first()
            .filter(|c| c.len() >= 2)
            .map(Vec::as_slice)
    }

    /// Components of size >= 2 other than the giant.
    pub fn small(&self) -> impl Iterator<Item = &[usize]> {
        self.components
            .iter()
            .skip(1)
            .filter(|c| c.len() >= 2)
            .map(Vec::as_slice)
    }

    pub fn isolated(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.iter().filter(|c| c.len() == 1).map(|c| c[0])
    }

    /// `(giant, small, isolated)` node fractions; all zero for an empty network.
    pub fn fractions(&self) -> (f64, f64, f64) {
        if self.n_nodes == 0 {
            return (0.0, 0.0, 0.0);
        }
        let n = self.n_nodes as f64;
        let giant = self.giant().map_or(0, <[usize]>::len);
        let small: usize = self.small().map(<[usize]>::len).sum();
        let isolated = self.isolated().count();
        (giant as f64 / n, small as f64 / n, isolated as f64 / n)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn decompose(net: &InteractionNetwork) -> ComponentDecomposition {
    decompose_edges(net.n_nodes(), net.edges())
}

pub(crate) fn decompose_edges(n: usize, edges: &[(usize, usize)]) -> ComponentDecomposition {
    let mut parent: Vec<usize> = (0..n).collect();
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        let r = find(&mut parent, u);
        by_root[r].push(u);
    }
    let mut components: Vec<Vec<usize>> = by_root.into_iter().filter(|c| !c.is_empty()).collect();
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    ComponentDecomposition {
        n_nodes: n,
        components,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HubsAuthorities {
    /// Highest out-degree first.
    pub hubs: Vec<(String, usize)>,
    /// Highest in-degree first.
    pub authorities: Vec<(String, usize)>,
}

/// Top-`k` nodes by out-degree and by in-degree, ties broken by label.
pub fn hubs_and_authorities(net: &InteractionNetwork, k: usize) -> HubsAuthorities {
    let g = net.graph();
    let top = |degree: &dyn Fn(usize) -> usize| {
        let mut ranked: Vec<(String, usize)> = (0..g.n_nodes())
            .map(|u| (net.nodes()[u].clone(), degree(u)))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(k);
        ranked
    };
    HubsAuthorities {
        hubs: top(&|u| g.out_degree(u)),
        authorities: top(&|u| g.in_degree(u)),
    }
}
