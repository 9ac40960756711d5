//! Whole-collection analysis: component structure, giant-component
//! topology, degree fits and communities for each network, rendered as
//! JSON, markdown tables and CSV series.

use std::collections::BTreeSet;
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::community::{top_k_share, walktrap, DEFAULT_WALK_LENGTH};
use crate::metrics::{
    density, fit_degree_distribution, series_csv, topology_report, DegreeDistributionFit, DegreeKind, TopologyReport,
    Xmin,
};
use crate::model::{Collection, CollectionError};
use crate::network::{
    build_operation_network, build_parameter_network, decompose, hubs_and_authorities, BuildOptions,
    HubsAuthorities, InteractionNetwork, Invocation, NetworkKind,
};
use crate::ontology::{MatchLevel, OntologyRegistry};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error(transparent)]
    Collection(#[from] CollectionError),
    #[error("{0}-level edges missing from the fitin network at {1} invocation")]
    Containment(MatchLevel, Invocation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub er_samples: usize,
    pub bootstrap: usize,
    pub seed: u64,
    pub walk_length: usize,
    /// Operation network level when `all_levels` is off.
    pub level: MatchLevel,
    pub invocation: Invocation,
    /// All four operation networks plus the parameter network.
    pub all_levels: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            er_samples: 32,
            bootstrap: 100,
            seed: 1,
            walk_length: DEFAULT_WALK_LENGTH,
            level: MatchLevel::Exact,
            invocation: Invocation::Full,
            all_levels: false,
        }
    }
}

/// Share of nodes in each part of the network, in percent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub n_components: usize,
    pub n_small_components: usize,
    pub isolated_pct: f64,
    pub small_pct: f64,
    pub giant_pct: f64,
    pub small_and_giant_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiantSummary {
    pub nodes: usize,
    pub links: usize,
    /// Giant links over all links (isolated nodes carry none).
    pub link_proportion: Option<f64>,
    pub density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunitySummary {
    pub walk_length: usize,
    pub count: usize,
    pub modularity: f64,
    pub sizes: Vec<usize>,
    pub top3_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkAnalysis {
    pub name: String,
    pub kind: NetworkKind,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub components: ComponentSummary,
    pub giant: GiantSummary,
    /// Metrics of the giant component.
    pub topology: TopologyReport,
    pub degree_fit: Option<DegreeDistributionFit>,
    pub communities: Option<CommunitySummary>,
    pub hubs: HubsAuthorities,
    /// Why optional parts are missing.
    pub notes: Vec<String>,
}

/// Jaccard overlap of the isolated-node sets of two operation networks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsolatedOverlap {
    pub a: String,
    pub b: String,
    pub shared: usize,
    pub union: usize,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisBundle {
    pub seed: u64,
    pub er_samples: usize,
    pub bootstrap: usize,
    pub walk_length: usize,
    pub networks: Vec<NetworkAnalysis>,
    pub isolated_overlap: Vec<IsolatedOverlap>,
}

const TOP_HUBS: usize = 5;

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

/// Analyse one network; its random streams derive from `opts.seed` and the network name.
pub fn analyze_network(net: &InteractionNetwork, opts: &AnalysisOptions) -> NetworkAnalysis {
    let name = net.name();
    let seed = rng::sub_seed(opts.seed, &name);
    let dec = decompose(net);
    let n = net.n_nodes();
    let giant_nodes: &[usize] = dec.giant().unwrap_or(&[]);
    let small: usize = dec.small().map(<[usize]>::len).sum();
    let isolated = dec.isolated().count();
    let components = ComponentSummary {
        n_components: dec.components().len(),
        n_small_components: dec.small().count(),
        isolated_pct: pct(isolated, n),
        small_pct: pct(small, n),
        giant_pct: pct(giant_nodes.len(), n),
        small_and_giant_pct: pct(small + giant_nodes.len(), n),
    };

    let giant_net = net.induced(giant_nodes);
    let g = giant_net.graph();
    let giant = GiantSummary {
        nodes: g.n_nodes(),
        links: g.n_edges(),
        link_proportion: (net.n_edges() > 0).then(|| g.n_edges() as f64 / net.n_edges() as f64),
        density: density(&g).ok(),
    };
    let mut notes = Vec::new();
    let topology = topology_report(&g, opts.er_samples, rng::sub_seed(seed, "er"));
    let degree_fit = match fit_degree_distribution(
        &g,
        DegreeKind::Total,
        Xmin::Auto,
        opts.bootstrap,
        rng::sub_seed(seed, "degree"),
    ) {
        Ok(fit) => Some(fit),
        Err(e) => {
            notes.push(format!("degree fit: {e}"));
            None
        }
    };
    let communities = match walktrap(&g.undirected(), opts.walk_length) {
        Ok(r) => Some(CommunitySummary {
            walk_length: opts.walk_length,
            count: r.partition.len(),
            modularity: r.partition.modularity(),
            sizes: r.partition.sizes(),
            top3_share: top_k_share(&r.partition, 3),
        }),
        Err(e) => {
            notes.push(format!("communities: {e}"));
            None
        }
    };
    NetworkAnalysis {
        name,
        kind: net.kind(),
        n_nodes: n,
        n_edges: net.n_edges(),
        components,
        giant,
        topology,
        degree_fit,
        communities,
        hubs: hubs_and_authorities(net, TOP_HUBS),
        notes,
    }
}

fn isolated_set(net: &InteractionNetwork) -> BTreeSet<usize> {
    decompose(net).isolated().collect()
}

/// `E(exact) ∪ E(plugin) ⊆ E(fitin)` on networks over the same collection.
fn check_containment(nets: &[InteractionNetwork]) -> Result<(), ReportError> {
    let find = |level| nets.iter().find(|n| n.kind() == NetworkKind::Operation && n.match_level() == level);
    let Some(fitin) = find(MatchLevel::Fitin) else {
        return Ok(());
    };
    let fitin_edges: BTreeSet<(usize, usize)> = fitin.edges().iter().copied().collect();
    for level in [MatchLevel::Exact, MatchLevel::Plugin] {
        if let Some(net) = find(level) {
            if !net.edges().iter().all(|e| fitin_edges.contains(e)) {
                return Err(ReportError::Containment(level, fitin.invocation().unwrap_or(Invocation::Full)));
            }
        }
    }
    Ok(())
}

/// Build the requested networks and analyse each of them.
pub fn analyze_collection(
    collection: &Collection,
    registry: &OntologyRegistry,
    opts: &AnalysisOptions,
) -> Result<AnalysisBundle, ReportError> {
    let levels: Vec<MatchLevel> = if opts.all_levels {
        MatchLevel::ALL.to_vec()
    } else {
        vec![opts.level]
    };
    let mut nets = Vec::new();
    for level in levels {
        nets.push(build_operation_network(
            collection,
            registry,
            level,
            opts.invocation,
            BuildOptions::default(),
        )?);
    }
    check_containment(&nets)?;
    let operation_nets = nets.len();
    if opts.all_levels {
        nets.push(build_parameter_network(collection, registry)?);
    }

    let networks: Vec<NetworkAnalysis> = nets.par_iter().map(|net| analyze_network(net, opts)).collect();
    let isolated: Vec<BTreeSet<usize>> = nets[..operation_nets].iter().map(isolated_set).collect();
    let mut isolated_overlap = Vec::new();
    for i in 0..operation_nets {
        for j in i + 1..operation_nets {
            let shared = isolated[i].intersection(&isolated[j]).count();
            let union = isolated[i].union(&isolated[j]).count();
            isolated_overlap.push(IsolatedOverlap {
                a: networks[i].name.clone(),
                b: networks[j].name.clone(),
                shared,
                union,
                rate: (union > 0).then(|| shared as f64 / union as f64),
            });
        }
    }
    Ok(AnalysisBundle {
        seed: opts.seed,
        er_samples: opts.er_samples,
        bootstrap: opts.bootstrap,
        walk_length: opts.walk_length,
        networks,
        isolated_overlap,
    })
}

/// Fixed-decimals rendering; undefined values become `n/a`.
pub fn fmt_opt(x: Option<f64>, decimals: usize) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.decimals$}"),
        _ => "n/a".to_owned(),
    }
}

fn fmt_pct(x: f64) -> String {
    format!("{x:.2}%")
}

impl AnalysisBundle {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("bundle serializes");
        out.push('\n');
        out
    }

    /// Markdown tables: node shares, giant structure, topology, communities,
    /// degree fits and isolated-node overlap.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Network analysis\n");
        let _ = writeln!(
            s,
            "Seed {}, {} Erdős-Rényi samples, {} bootstrap samples, walk length {}.\n",
            self.seed, self.er_samples, self.bootstrap, self.walk_length
        );

        let _ = writeln!(s, "## Proportion of nodes\n");
        let _ = writeln!(s, "| Network | Nodes | Isolated nodes | Small components | Giant component | Small + Giant |");
        let _ = writeln!(s, "|---|---:|---:|---:|---:|---:|");
        for n in &self.networks {
            let c = &n.components;
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} |",
                n.name,
                n.n_nodes,
                fmt_pct(c.isolated_pct),
                fmt_pct(c.small_pct),
                fmt_pct(c.giant_pct),
                fmt_pct(c.small_and_giant_pct)
            );
        }

        let _ = writeln!(s, "\n## Giant component structure\n");
        let _ = writeln!(s, "| Network | Number of nodes | Number of links | Proportion of links | Density |");
        let _ = writeln!(s, "|---|---:|---:|---:|---:|");
        for n in &self.networks {
            let g = &n.giant;
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} |",
                n.name,
                g.nodes,
                g.links,
                g.link_proportion.map_or_else(|| "n/a".to_owned(), |p| fmt_pct(100.0 * p)),
                fmt_opt(g.density, 4)
            );
        }

        let _ = writeln!(s, "\n## Distance, clustering and assortativity of the giant component\n");
        let _ = writeln!(s, "| Network | L | L/L_ER | Diameter | C | C/C_ER | Assortativity |");
        let _ = writeln!(s, "|---|---:|---:|---:|---:|---:|---:|");
        for n in &self.networks {
            let t = &n.topology;
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                n.name,
                fmt_opt(t.avg_distance, 2),
                fmt_opt(t.l_ratio, 2),
                t.diameter.map_or_else(|| "n/a".to_owned(), |d| d.to_string()),
                fmt_opt(t.clustering, 3),
                fmt_opt(t.c_ratio, 2),
                fmt_opt(t.assortativity, 2)
            );
        }

        let _ = writeln!(s, "\n## Communities of the giant component\n");
        let _ = writeln!(s, "| Network | Number of communities | Modularity | Top-3 share |");
        let _ = writeln!(s, "|---|---:|---:|---:|");
        for n in &self.networks {
            let c = n.communities.as_ref();
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} |",
                n.name,
                c.map_or_else(|| "n/a".to_owned(), |c| c.count.to_string()),
                fmt_opt(c.map(|c| c.modularity), 3),
                c.map_or_else(|| "n/a".to_owned(), |c| fmt_pct(100.0 * c.top3_share))
            );
        }

        let _ = writeln!(s, "\n## Degree distribution of the giant component\n");
        let _ = writeln!(s, "| Network | γ | k_min | Tail size | KS | p | Exponential rate | p (exp) |");
        let _ = writeln!(s, "|---|---:|---:|---:|---:|---:|---:|---:|");
        for n in &self.networks {
            match &n.degree_fit {
                Some(f) => {
                    let pl = &f.power_law;
                    let ex = f.exponential.as_ref();
                    let _ = writeln!(
                        s,
                        "| {} | {} | {} | {} | {} | {} | {} | {} |",
                        n.name,
                        fmt_opt(Some(pl.gamma), 2),
                        pl.xmin,
                        pl.n_tail,
                        fmt_opt(Some(pl.ks_statistic), 3),
                        fmt_opt(pl.ks_p_value, 2),
                        fmt_opt(ex.map(|e| e.rate), 3),
                        fmt_opt(ex.and_then(|e| e.ks_p_value), 2)
                    );
                }
                None => {
                    let _ = writeln!(s, "| {} | n/a | n/a | n/a | n/a | n/a | n/a | n/a |", n.name);
                }
            }
        }

        if !self.isolated_overlap.is_empty() {
            let _ = writeln!(s, "\n## Overlap of isolated nodes\n");
            let _ = writeln!(s, "| Networks | Shared | Union | Overlap |");
            let _ = writeln!(s, "|---|---:|---:|---:|");
            for o in &self.isolated_overlap {
                let _ = writeln!(
                    s,
                    "| {} / {} | {} | {} | {} |",
                    o.a,
                    o.b,
                    o.shared,
                    o.union,
                    o.rate.map_or_else(|| "n/a".to_owned(), |r| fmt_pct(100.0 * r))
                );
            }
        }
        s
    }

    /// Every output file as `(file name, contents)`, in a fixed order.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("analysis.json".to_owned(), self.to_json()),
            ("tables.md".to_owned(), self.to_markdown()),
        ];
        for n in &self.networks {
            if let Some(f) = &n.degree_fit {
                out.push((format!("degree_{}.csv", n.name), series_csv(&f.cumulative)));
            }
            if let Some(c) = &n.communities {
                let mut csv = String::from("rank,size\n");
                for (rank, size) in c.sizes.iter().enumerate() {
                    let _ = writeln!(csv, "{},{size}", rank + 1);
                }
                out.push((format!("communities_{}.csv", n.name), csv));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::{size_distribution_csv, Partition};
    use crate::graph::UndirectedGraph;

    #[test]
    fn community_csv_matches_partition_export() {
        let g = UndirectedGraph::new(5, [(0, 1), (1, 2), (3, 4)]);
        let p = Partition::from_assignment(&g, &[0, 0, 0, 1, 1]).unwrap();
        let mut csv = String::from("rank,size\n");
        for (rank, size) in p.sizes().iter().enumerate() {
            let _ = writeln!(csv, "{},{size}", rank + 1);
        }
        assert_eq!(csv, size_distribution_csv(&p));
    }

    #[test]
    fn n_a_rendering() {
        assert_eq!(fmt_opt(None, 2), "n/a");
        assert_eq!(fmt_opt(Some(f64::NAN), 2), "n/a");
        assert_eq!(fmt_opt(Some(0.0), 2), "0.00");
        assert_eq!(fmt_opt(Some(0.44444), 2), "0.44");
    }
}
