//! Undirected social-network graphs, random generators, and degree
//! statistics.
//!
//! Node ids are dense integers `0..N-1` so the diffusion and sampling hot
//! loops can use arrays instead of maps. Graphs are immutable after
//! construction and safe to share read-only across threads.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::rng::rng_from_seed;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node id {0} out of range for {1} nodes")]
    NodeOutOfRange(u32, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(u32, u32),
    #[error("degree sequence infeasible: stub total {0} is odd")]
    OddStubTotal(usize),
    #[error("degree sequence entry {degree} exceeds cap {cap}")]
    DegreeExceedsCap { degree: usize, cap: usize },
    #[error("empty degree pmf")]
    EmptyPmf,
    #[error("degree pmf entries must be nonnegative and sum to a positive value")]
    InvalidPmf,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("power-law exponent must be positive, got {0}")]
    InvalidExponent(f64),
    #[error("graph must have at least one node")]
    EmptyGraph,
}

/// Undirected graph with sorted neighbor lists.
///
/// Invariants: no self-loops, symmetric adjacency, neighbor lists sorted and
/// duplicate-free, `max_degree` equal to the largest realized degree.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph from an undirected edge list over `n` nodes.
    ///
    /// Rejects self-loops, duplicate edges, and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::NodeOutOfRange(u, n));
            }
            if v as usize >= n {
                return Err(GraphError::NodeOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                let dup = list.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                return Err(GraphError::DuplicateEdge(u as u32, dup));
            }
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            adjacency,
            max_degree,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adjacency[node]
    }

    /// Undirected edges, each listed once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }
}

/// Degree histogram of a graph: counts `N(d)` and fractions `P(d)` for
/// `d = 0..=max_degree`.
#[derive(Debug, Clone)]
pub struct DegreeDistribution {
    pub counts: Vec<usize>,
    pub probabilities: Vec<f64>,
}

impl DegreeDistribution {
    pub fn max_degree(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// Mean number of edge endpoints per node, `Σ d·P(d)`.
    pub fn mean_degree(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(d, p)| d as f64 * p)
            .sum()
    }
}

/// Computes `P(d) = N(d)/N` over `d = 0..=max_degree`.
pub fn degree_distribution(graph: &Graph) -> DegreeDistribution {
    let n = graph.node_count();
    let mut counts = vec![0usize; graph.max_degree() + 1];
    for node in 0..n {
        counts[graph.degree(node)] += 1;
    }
    let probabilities = counts.iter().map(|&c| c as f64 / n as f64).collect();
    DegreeDistribution {
        counts,
        probabilities,
    }
}

/// Random-graph family to generate.
#[derive(Debug, Clone)]
pub enum GraphSpec {
    /// Every pair linked independently with probability `p`. `max_degree`
    /// optionally caps realized degrees by trimming excess edges.
    ErdosRenyi {
        n: usize,
        p: f64,
        max_degree: Option<usize>,
    },
    /// Degrees sampled from `P(d) ∝ d^-gamma` on `1..=max_degree`, then wired
    /// by stub matching.
    PowerLaw {
        n: usize,
        gamma: f64,
        max_degree: usize,
    },
    /// Degrees sampled i.i.d. from an explicit pmf (index = degree), then
    /// wired by stub matching.
    Configuration { n: usize, pmf: Vec<f64> },
}

/// Generates a graph from a spec, deterministically in `seed`.
pub fn generate_graph(spec: &GraphSpec, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = rng_from_seed(seed);
    match spec {
        GraphSpec::ErdosRenyi { n, p, max_degree } => {
            erdos_renyi(*n, *p, *max_degree, &mut rng)
        }
        GraphSpec::PowerLaw { n, gamma, max_degree } => {
            if *gamma <= 0.0 {
                return Err(GraphError::InvalidExponent(*gamma));
            }
            if *max_degree == 0 {
                return Err(GraphError::EmptyPmf);
            }
            let mut pmf = vec![0.0; max_degree + 1];
            for (d, w) in pmf.iter_mut().enumerate().skip(1) {
                *w = (d as f64).powf(-gamma);
            }
            let degrees = sample_degrees(*n, &pmf, &mut rng)?;
            configuration_wire(&degrees, &mut rng)
        }
        GraphSpec::Configuration { n, pmf } => {
            let degrees = sample_degrees(*n, pmf, &mut rng)?;
            configuration_wire(&degrees, &mut rng)
        }
    }
}

/// Wires an explicit degree sequence by uniform stub matching.
///
/// Self-loops and multi-edges are repaired by edge rewiring with a bounded
/// retry budget (1000 passes); any still-conflicting edges are then dropped,
/// so the realized sequence can fall slightly below the request. An odd stub
/// total is a hard error.
pub fn graph_from_degree_sequence(
    degrees: &[usize],
    rng: &mut impl Rng,
) -> Result<Graph, GraphError> {
    configuration_wire(degrees, rng)
}

fn erdos_renyi(
    n: usize,
    p: f64,
    cap: Option<usize>,
    rng: &mut impl Rng,
) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    if p > 0.0 {
        if p >= 1.0 {
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    edges.push((u, v));
                }
            }
        } else {
            // Geometric skipping over the strictly-upper-triangular pair
            // stream: O(#edges) instead of O(n^2) Bernoulli draws.
            let log_q = (1.0 - p).ln();
            let total = n * (n - 1) / 2;
            let mut idx: usize = 0;
            loop {
                let u: f64 = rng.gen::<f64>();
                let skip = ((1.0 - u).ln() / log_q).floor() as usize;
                idx = match idx.checked_add(skip) {
                    Some(i) => i,
                    None => break,
                };
                if idx >= total {
                    break;
                }
                edges.push(pair_from_index(idx, n));
                idx += 1;
            }
        }
    }
    let mut graph = Graph::from_edges(n, &edges)?;
    if let Some(cap) = cap {
        graph = cap_degrees(graph, cap, rng)?;
    }
    Ok(graph)
}

/// Maps a linear index into the `u < v` pair enumeration (row-major).
fn pair_from_index(idx: usize, n: usize) -> (u32, u32) {
    let mut u = 0usize;
    let mut remaining = idx;
    let mut row = n - 1;
    while remaining >= row {
        remaining -= row;
        u += 1;
        row -= 1;
    }
    ((u) as u32, (u + 1 + remaining) as u32)
}

/// Removes edges from over-cap nodes until every degree is `<= cap`.
fn cap_degrees(graph: Graph, cap: usize, rng: &mut impl Rng) -> Result<Graph, GraphError> {
    if graph.max_degree() <= cap {
        return Ok(graph);
    }
    let n = graph.node_count();
    let mut edges = graph.edges();
    let mut degrees: Vec<usize> = (0..n).map(|u| graph.degree(u)).collect();
    edges.shuffle(rng);
    let mut kept = Vec::with_capacity(edges.len());
    // One pass marking removals on shuffled order keeps the trim unbiased.
    let mut over: Vec<usize> = degrees.clone();
    for &(u, v) in &edges {
        if over[u as usize] > cap || over[v as usize] > cap {
            over[u as usize] -= 1;
            over[v as usize] -= 1;
            degrees[u as usize] -= 1;
            degrees[v as usize] -= 1;
        } else {
            kept.push((u, v));
        }
    }
    Graph::from_edges(n, &kept)
}

fn sample_degrees(n: usize, pmf: &[f64], rng: &mut impl Rng) -> Result<Vec<usize>, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    if pmf.is_empty() {
        return Err(GraphError::EmptyPmf);
    }
    if pmf.iter().any(|&w| !w.is_finite() || w < 0.0) || pmf.iter().sum::<f64>() <= 0.0 {
        return Err(GraphError::InvalidPmf);
    }
    let total: f64 = pmf.iter().sum();
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &w in pmf {
        acc += w / total;
        cdf.push(acc);
    }
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            cdf.iter().position(|&c| u <= c).unwrap_or(pmf.len() - 1)
        })
        .collect();
    // Sampled sequences repair parity deterministically; explicit sequences
    // with an odd stub total are rejected in configuration_wire instead.
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let cap = pmf.len() - 1;
        if let Some(d) = degrees.iter_mut().find(|d| **d < cap) {
            *d += 1;
        } else if let Some(d) = degrees.iter_mut().find(|d| **d > 0) {
            *d -= 1;
        }
    }
    Ok(degrees)
}

fn configuration_wire(degrees: &[usize], rng: &mut impl Rng) -> Result<Graph, GraphError> {
    let n = degrees.len();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let stub_total: usize = degrees.iter().sum();
    if stub_total % 2 == 1 {
        return Err(GraphError::OddStubTotal(stub_total));
    }
    let mut stubs: Vec<u32> = Vec::with_capacity(stub_total);
    for (node, &d) in degrees.iter().enumerate() {
        for _ in 0..d {
            stubs.push(node as u32);
        }
    }
    stubs.shuffle(rng);

    let mut seen = std::collections::HashSet::new();
    let mut good: Vec<(u32, u32)> = Vec::with_capacity(stub_total / 2);
    let mut bad: Vec<(u32, u32)> = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v || !seen.insert((u, v)) {
            bad.push((pair[0], pair[1]));
        } else {
            good.push((u, v));
        }
    }

    // Rewiring: swap one endpoint of a conflicting pair with a random good
    // edge; keeps the degree sequence intact when it succeeds.
    let mut retries = 0usize;
    while let Some((a, b)) = bad.pop() {
        let mut placed = false;
        while retries < 1000 {
            retries += 1;
            if good.is_empty() {
                break;
            }
            let k = rng.gen_range(0..good.len());
            let (c, d) = good[k];
            let e1 = (a.min(c), a.max(c));
            let e2 = (b.min(d), b.max(d));
            if a != c && b != d && !seen.contains(&e1) && !seen.contains(&e2) {
                seen.remove(&(c.min(d), c.max(d)));
                good.swap_remove(k);
                seen.insert(e1);
                seen.insert(e2);
                good.push(e1);
                good.push(e2);
                placed = true;
                break;
            }
        }
        if !placed {
            // Out of budget: drop the conflicting pair.
            continue;
        }
    }

    Graph::from_edges(n, &good)
}
