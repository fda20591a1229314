//! Estimators of node-value distributions over a network: uniform sampling
//! within a degree class, degree-corrected social sampling, and MCMC-based
//! respondent-driven sampling.
//!
//! Node values are categorical, `1..=Y`. All estimators sample with
//! replacement and are deterministic given the seed.

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::network::Graph;
use crate::rng::rng_from_seed;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("no nodes of degree {0}")]
    NoNodesOfDegree(usize),
    #[error("no eligible nodes to sample")]
    EmptyPopulation,
    #[error("sample size must be at least 1")]
    ZeroSampleSize,
    #[error("node {node} has value {value}, outside 1..={max}")]
    ValueOutOfRange { node: usize, value: usize, max: usize },
    #[error("value vector has length {got}, graph has {want} nodes")]
    ValueLengthMismatch { got: usize, want: usize },
    #[error("walk restriction is disconnected: node {0} unreachable from start")]
    DisconnectedWalk(usize),
    #[error("walk restriction is bipartite; the chain is periodic")]
    BipartiteWalk,
    #[error("missing weight for edge {0} {1}")]
    MissingEdgeWeight(u32, u32),
    #[error("edge weight for {0} {1} must be positive")]
    NonPositiveWeight(u32, u32),
    #[error("total edge weight is zero")]
    ZeroTotalWeight,
    #[error("start node {0} is not in the walk population")]
    StartNotInPopulation(usize),
}

/// Empirical value distribution for one degree class.
#[derive(Debug, Clone)]
pub struct SentimentEstimate {
    pub degree: usize,
    /// `pmf[y-1]` estimates the probability of value `y`.
    pub pmf: Vec<f64>,
    pub sample_count: usize,
}

fn check_values(graph: &Graph, values: &[usize], num_values: usize) -> Result<(), SamplingError> {
    if values.len() != graph.node_count() {
        return Err(SamplingError::ValueLengthMismatch {
            got: values.len(),
            want: graph.node_count(),
        });
    }
    for (node, &v) in values.iter().enumerate() {
        if v == 0 || v > num_values {
            return Err(SamplingError::ValueOutOfRange {
                node,
                value: v,
                max: num_values,
            });
        }
    }
    Ok(())
}

/// I.i.d. uniform draws (with replacement) from the degree-`degree` class;
/// the pmf is the indicator average over draws.
pub fn uniform_sample(
    graph: &Graph,
    values: &[usize],
    degree: usize,
    sample_size: usize,
    num_values: usize,
    seed: u64,
) -> Result<SentimentEstimate, SamplingError> {
    check_values(graph, values, num_values)?;
    if sample_size == 0 {
        return Err(SamplingError::ZeroSampleSize);
    }
    let class: Vec<usize> = (0..graph.node_count())
        .filter(|&m| graph.degree(m) == degree)
        .collect();
    if class.is_empty() {
        return Err(SamplingError::NoNodesOfDegree(degree));
    }
    let mut rng = rng_from_seed(seed);
    let mut pmf = vec![0.0; num_values];
    for _ in 0..sample_size {
        let m = class[rng.gen_range(0..class.len())];
        pmf[values[m] - 1] += 1.0;
    }
    for p in &mut pmf {
        *p /= sample_size as f64;
    }
    Ok(SentimentEstimate {
        degree,
        pmf,
        sample_count: sample_size,
    })
}

/// Social sampling: respondents are drawn with probability proportional to
/// `1/d(m)` and summarize their own neighborhood instead of just themselves.
///
/// Respondent `m` reports the degree-corrected histogram of its closed
/// neighborhood, `S_m(y) = Σ_{u ∈ N[m]} 1{y_u = y} / d(u)`, with normalizer
/// `c_m = Σ_{u ∈ N[m]} 1/d(u)`; down-weighting each reported individual by
/// that individual's own degree undoes the overexposure of high-degree nodes
/// across reports. The estimate is the report-weighted ratio
/// `Σ_l d(m_l)·S_{m_l} / Σ_l d(m_l)·c_{m_l}`, where the `d(m_l)` factor
/// cancels the `1/d` selection bias. On regular graphs this is an unbiased
/// estimate of the census distribution.
///
/// Degree-0 nodes have no neighborhood to summarize and are excluded from the
/// respondent pool (and from the estimand).
pub fn social_sample(
    graph: &Graph,
    values: &[usize],
    sample_size: usize,
    num_values: usize,
    seed: u64,
) -> Result<Vec<f64>, SamplingError> {
    check_values(graph, values, num_values)?;
    if sample_size == 0 {
        return Err(SamplingError::ZeroSampleSize);
    }
    let pool: Vec<usize> = (0..graph.node_count())
        .filter(|&m| graph.degree(m) > 0)
        .collect();
    if pool.is_empty() {
        return Err(SamplingError::EmptyPopulation);
    }
    let mut cdf = Vec::with_capacity(pool.len());
    let mut acc = 0.0;
    for &m in &pool {
        acc += 1.0 / graph.degree(m) as f64;
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = rng_from_seed(seed);
    let mut num = vec![0.0; num_values];
    let mut den = 0.0;
    for _ in 0..sample_size {
        let draw: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c < draw).min(pool.len() - 1);
        let m = pool[idx];
        let dm = graph.degree(m) as f64;
        for &u in graph.neighbors(m).iter().chain(std::iter::once(&(m as u32))) {
            let w = dm / graph.degree(u as usize) as f64;
            num[values[u as usize] - 1] += w;
            den += w;
        }
    }
    Ok(num.iter().map(|&x| x / den).collect())
}

/// Edge weights for the recruitment walk.
#[derive(Debug, Clone, Default)]
pub enum EdgeWeights {
    /// Weight 1 on every edge.
    #[default]
    Uniform,
    /// Explicit symmetric weights keyed by `(min, max)` endpoints. Every edge
    /// of the walk population must be present, with a positive weight.
    Table(HashMap<(u32, u32), f64>),
}

impl EdgeWeights {
    fn get(&self, u: u32, v: u32) -> Result<f64, SamplingError> {
        match self {
            EdgeWeights::Uniform => Ok(1.0),
            EdgeWeights::Table(map) => {
                let key = (u.min(v), u.max(v));
                let w = map
                    .get(&key)
                    .copied()
                    .ok_or(SamplingError::MissingEdgeWeight(key.0, key.1))?;
                if w <= 0.0 {
                    return Err(SamplingError::NonPositiveWeight(key.0, key.1));
                }
                Ok(w)
            }
        }
    }
}

/// Recruitment-walk configuration.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub walk_length: usize,
    /// Steps discarded before collecting; defaults to `walk_length / 10`.
    pub burn_in: Option<usize>,
    /// Defaults to the lowest-index node in the walk population.
    pub start_node: Option<usize>,
    pub weights: EdgeWeights,
}

impl WalkConfig {
    pub fn uniform(walk_length: usize) -> Self {
        Self {
            walk_length,
            burn_in: None,
            start_node: None,
            weights: EdgeWeights::Uniform,
        }
    }
}

struct WalkPopulation {
    nodes: Vec<usize>,
    /// Per node: (neighbor, weight) over the population, neighbor order fixed.
    adjacency: Vec<Vec<(usize, f64)>>,
    /// Stationary probability per population index.
    stationary: Vec<f64>,
}

fn build_walk_population(
    graph: &Graph,
    restrict_degree: Option<usize>,
    weights: &EdgeWeights,
) -> Result<WalkPopulation, SamplingError> {
    let nodes: Vec<usize> = match restrict_degree {
        Some(d) => (0..graph.node_count())
            .filter(|&m| graph.degree(m) == d)
            .collect(),
        None => (0..graph.node_count()).collect(),
    };
    if nodes.is_empty() {
        return Err(match restrict_degree {
            Some(d) => SamplingError::NoNodesOfDegree(d),
            None => SamplingError::EmptyPopulation,
        });
    }
    let mut index = vec![usize::MAX; graph.node_count()];
    for (i, &m) in nodes.iter().enumerate() {
        index[m] = i;
    }
    let mut adjacency = vec![Vec::new(); nodes.len()];
    let mut strength = vec![0.0; nodes.len()];
    let mut total = 0.0;
    for (i, &m) in nodes.iter().enumerate() {
        for &v in graph.neighbors(m) {
            let j = index[v as usize];
            if j == usize::MAX {
                continue; // neighbor outside the restricted population
            }
            let w = weights.get(m as u32, v)?;
            adjacency[i].push((j, w));
            strength[i] += w;
            total += w;
        }
    }
    if total <= 0.0 {
        return Err(SamplingError::ZeroTotalWeight);
    }
    let stationary = strength.iter().map(|&s| s / total).collect();
    Ok(WalkPopulation {
        nodes,
        adjacency,
        stationary,
    })
}

/// BFS reachability plus 2-coloring; errors on a disconnected or bipartite
/// restriction, where the recruitment chain would not be ergodic.
fn check_ergodic(pop: &WalkPopulation, start: usize) -> Result<(), SamplingError> {
    let n = pop.nodes.len();
    let mut color = vec![-1i8; n];
    color[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    let mut bipartite = true;
    let mut seen = 1usize;
    while let Some(i) = queue.pop_front() {
        for &(j, _) in &pop.adjacency[i] {
            if color[j] == -1 {
                color[j] = 1 - color[i];
                seen += 1;
                queue.push_back(j);
            } else if color[j] == color[i] {
                bipartite = false;
            }
        }
    }
    if seen < n {
        let unreachable = color.iter().position(|&c| c == -1).unwrap();
        return Err(SamplingError::DisconnectedWalk(pop.nodes[unreachable]));
    }
    // A single node with no edges is already caught by ZeroTotalWeight.
    if bipartite && n > 1 {
        return Err(SamplingError::BipartiteWalk);
    }
    Ok(())
}

/// Respondent-driven sampling: runs the recruitment walk with transition
/// probabilities `w(m,n)/Σ_n w(m,n)` and returns the importance-corrected
/// ratio estimate `Σ_l 1{y(m_l)=y}/π(m_l) ÷ Σ_l 1/π(m_l)`, where
/// `π(m) = Σ_n w(m,n) / Σ_{m,n} w(m,n)` is the stationary distribution.
///
/// With `restrict_degree` set, the walk lives on the subgraph induced by the
/// nodes of that degree; otherwise it runs graph-wide. The restriction must
/// be connected and non-bipartite.
pub fn rds_estimate(
    graph: &Graph,
    values: &[usize],
    restrict_degree: Option<usize>,
    walk: &WalkConfig,
    value: usize,
    seed: u64,
) -> Result<f64, SamplingError> {
    check_values(graph, values, values.iter().copied().max().unwrap_or(1))?;
    if walk.walk_length == 0 {
        return Err(SamplingError::ZeroSampleSize);
    }
    let pop = build_walk_population(graph, restrict_degree, &walk.weights)?;
    let start = match walk.start_node {
        Some(m) => pop
            .nodes
            .iter()
            .position(|&x| x == m)
            .ok_or(SamplingError::StartNotInPopulation(m))?,
        None => 0,
    };
    check_ergodic(&pop, start)?;

    let burn_in = walk.burn_in.unwrap_or(walk.walk_length / 10);
    let mut rng = rng_from_seed(seed);
    let mut current = start;
    let mut num = 0.0;
    let mut den = 0.0;
    for step in 0..burn_in + walk.walk_length {
        if step >= burn_in {
            let pi = pop.stationary[current];
            if values[pop.nodes[current]] == value {
                num += 1.0 / pi;
            }
            den += 1.0 / pi;
        }
        let row = &pop.adjacency[current];
        let total: f64 = row.iter().map(|&(_, w)| w).sum();
        let mut u: f64 = rng.gen::<f64>() * total;
        let mut next = row[row.len() - 1].0;
        for &(j, w) in row {
            if u <= w {
                next = j;
                break;
            }
            u -= w;
        }
        current = next;
    }
    Ok(num / den)
}

/// Stationary distribution of the recruitment walk over the (possibly
/// degree-restricted) population, as `(node, probability)` pairs. Exposed for
/// diagnostics and detailed-balance checks.
pub fn walk_stationary_distribution(
    graph: &Graph,
    restrict_degree: Option<usize>,
    weights: &EdgeWeights,
) -> Result<Vec<(usize, f64)>, SamplingError> {
    let pop = build_walk_population(graph, restrict_degree, weights)?;
    Ok(pop
        .nodes
        .iter()
        .zip(&pop.stationary)
        .map(|(&m, &p)| (m, p))
        .collect())
}
