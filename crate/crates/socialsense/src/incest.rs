//! Information-flow DAG machinery for reputation systems: transitive
//! closure, incest-removal weights, the fair-rating combination of log
//! beliefs, the achievability test, and a full simulator with both fair and
//! naive fusion.
//!
//! Nodes are indexed `0..n` in event order; edges always point forward
//! (`from < to`), so the adjacency matrix is strictly upper triangular and
//! every graph here is a DAG by construction. In the two-coordinate view a
//! node is agent `s` acting at epoch `k`, with `node = s + S·k` (0-based).
//!
//! Exchanged log beliefs hold accumulated action log-likelihoods *without*
//! the prior: node `m` stores `l_m(x) = Σ_{j ∈ F_m ∪ {m}} log P(a_j | x)`.
//! The incest weights `w = T⁻¹ t` then reproduce `Σ_{j ∈ F_n} log P(a_j | x)`
//! exactly and the consumer multiplies the prior back in once. Keeping the
//! prior inside the exchanged beliefs would instead count it `Σ w_j` times,
//! which is only harmless for uniform priors.

use rand::Rng;
use thiserror::Error;

use crate::rng::rng_from_seed;
use crate::social_learning::{
    policy, social_learning_filter, Belief, CostMatrix, ObservationModel, SocialLearningError,
};

#[derive(Debug, Error)]
pub enum IncestError {
    #[error("edge {from} -> {to} violates the index order (need from < to)")]
    BadEdge { from: usize, to: usize },
    #[error("node {got} out of range for {count} nodes")]
    NodeOutOfRange { got: usize, count: usize },
    #[error("integer overflow while solving for incest weights")]
    Overflow,
    #[error("node {node} cannot achieve fair rating; offending predecessors {witness:?}")]
    NonAchievable { node: usize, witness: Vec<usize> },
    #[error("cannot fuse an empty set of beliefs")]
    EmptyFusion,
    #[error("fused belief has zero mass")]
    ZeroMassFusion,
    #[error(transparent)]
    Learning(#[from] SocialLearningError),
}

/// Growing directed acyclic information-flow graph.
#[derive(Debug, Clone)]
pub struct FlowDag {
    adj: Vec<Vec<bool>>,
    agent_count: Option<usize>,
}

impl FlowDag {
    pub fn new(node_count: usize) -> Self {
        Self {
            adj: vec![vec![false; node_count]; node_count],
            agent_count: None,
        }
    }

    /// Tags the DAG with an agent count `S`, making node `n` agent `n % S`
    /// at epoch `n / S`.
    pub fn with_agents(node_count: usize, agents: usize) -> Self {
        Self {
            adj: vec![vec![false; node_count]; node_count],
            agent_count: Some(agents),
        }
    }

    pub fn from_edges(
        node_count: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, IncestError> {
        let mut dag = Self::new(node_count);
        for &(from, to) in edges {
            dag.add_edge(from, to)?;
        }
        Ok(dag)
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> Result<(), IncestError> {
        let n = self.node_count();
        if from >= n {
            return Err(IncestError::NodeOutOfRange { got: from, count: n });
        }
        if to >= n {
            return Err(IncestError::NodeOutOfRange { got: to, count: n });
        }
        if from >= to {
            return Err(IncestError::BadEdge { from, to });
        }
        self.adj[from][to] = true;
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adj[from][to]
    }

    pub fn agent_count(&self) -> Option<usize> {
        self.agent_count
    }

    pub fn agent_of(&self, node: usize) -> Option<usize> {
        self.agent_count.map(|s| node % s)
    }

    pub fn epoch_of(&self, node: usize) -> Option<usize> {
        self.agent_count.map(|s| node / s)
    }

    /// The sub-DAG on the first `k` nodes; the adjacency matrix of a prefix
    /// is the upper-left block of the full one.
    pub fn prefix(&self, k: usize) -> FlowDag {
        let mut dag = FlowDag {
            adj: vec![vec![false; k]; k],
            agent_count: self.agent_count,
        };
        for i in 0..k {
            for j in 0..k {
                dag.adj[i][j] = self.adj[i][j];
            }
        }
        dag
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.adj.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Reachability matrix with ones on the diagonal: `reaches(i, j)` iff a
/// directed path `i -> j` exists (or `i = j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureMatrix {
    reach: Vec<Vec<bool>>,
}

impl ClosureMatrix {
    pub fn node_count(&self) -> usize {
        self.reach.len()
    }

    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.reach[from][to]
    }
}

/// Boolean Warshall closure of the DAG.
pub fn closure(dag: &FlowDag) -> ClosureMatrix {
    let n = dag.node_count();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
        for j in 0..n {
            row[j] |= dag.adj[i][j];
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    ClosureMatrix { reach }
}

/// One-hop and multi-hop predecessor sets of `node`: `H` holds the direct
/// senders, `F` every node whose information eventually reaches `node`.
pub fn neighbor_sets(dag: &FlowDag, node: usize) -> (Vec<usize>, Vec<usize>) {
    let t = closure(dag);
    neighbor_sets_with(dag, &t, node)
}

fn neighbor_sets_with(dag: &FlowDag, t: &ClosureMatrix, node: usize) -> (Vec<usize>, Vec<usize>) {
    let h: Vec<usize> = (0..node).filter(|&m| dag.adj[m][node]).collect();
    let f: Vec<usize> = (0..node).filter(|&m| t.reaches(m, node)).collect();
    (h, f)
}

/// Incest-removal weights for `node`: the solution of `T_{n-1} w = t_n` by
/// back-substitution, where `t_n` is the closure column of `node` restricted
/// to earlier nodes.
///
/// The system is unit upper triangular over a 0/1 matrix, so the weights are
/// integers; negative entries subtract double-counted information.
pub fn incest_weights(dag: &FlowDag, node: usize) -> Result<Vec<i64>, IncestError> {
    let n = dag.node_count();
    if node >= n {
        return Err(IncestError::NodeOutOfRange { got: node, count: n });
    }
    let t = closure(dag);
    weights_from_closure(&t, node)
}

fn weights_from_closure(t: &ClosureMatrix, node: usize) -> Result<Vec<i64>, IncestError> {
    let mut w = vec![0i64; node];
    for j in (0..node).rev() {
        let mut acc: i64 = i64::from(t.reaches(j, node));
        for k in j + 1..node {
            if t.reaches(j, k) {
                acc = acc.checked_sub(w[k]).ok_or(IncestError::Overflow)?;
            }
        }
        w[j] = acc;
    }
    Ok(w)
}

/// Unnormalized log-pmf over the states of nature; `-inf` marks a zero
/// coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LogBelief(pub Vec<f64>);

impl LogBelief {
    pub fn zeros(states: usize) -> Self {
        Self(vec![0.0; states])
    }

    /// Normalizes `prior(x)·exp(l(x))` into a belief via the log-sum-exp
    /// trick.
    pub fn to_belief(&self, prior: &Belief) -> Result<Belief, IncestError> {
        let logs: Vec<f64> = self
            .0
            .iter()
            .zip(prior.as_slice())
            .map(|(&l, &p)| if p > 0.0 { l + p.ln() } else { f64::NEG_INFINITY })
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(IncestError::ZeroMassFusion);
        }
        let weights: Vec<f64> = logs.iter().map(|&l| (l - max).exp()).collect();
        Belief::from_weights(&weights).map_err(|_| IncestError::ZeroMassFusion)
    }
}

/// Weighted combination `l = Σ_m w_m·l_m` of predecessor log beliefs;
/// zero-weight terms are skipped so their `-inf` coordinates cannot poison
/// the sum.
pub fn fair_rating(log_beliefs: &[LogBelief], weights: &[i64]) -> LogBelief {
    assert_eq!(log_beliefs.len(), weights.len(), "one weight per belief");
    let states = log_beliefs.first().map(|l| l.0.len()).unwrap_or(0);
    let mut out = vec![0.0; states];
    for (l, &w) in log_beliefs.iter().zip(weights) {
        if w == 0 {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(&l.0) {
            *o += w as f64 * v;
        }
    }
    LogBelief(out)
}

/// Fair rating is implementable at `node` iff every nonzero weight points at
/// a direct sender: `A(j, n) = 0` forces `w_n(j) = 0`. Returns the verdict
/// plus the violating predecessors.
pub fn achievable(dag: &FlowDag, node: usize) -> Result<(bool, Vec<usize>), IncestError> {
    let w = incest_weights(dag, node)?;
    let witness: Vec<usize> = (0..node)
        .filter(|&j| w[j] != 0 && !dag.adj[j][node])
        .collect();
    Ok((witness.is_empty(), witness))
}

/// Coordinatewise product of beliefs, renormalized. This is the incorrect
/// baseline that double counts shared ancestors; it exists for comparison
/// experiments.
pub fn naive_fusion(beliefs: &[&Belief]) -> Result<Belief, IncestError> {
    let first = beliefs.first().ok_or(IncestError::EmptyFusion)?;
    let mut weights = first.as_slice().to_vec();
    for b in &beliefs[1..] {
        for (w, &p) in weights.iter_mut().zip(b.as_slice()) {
            *w *= p;
        }
    }
    Belief::from_weights(&weights).map_err(|_| IncestError::ZeroMassFusion)
}

/// Which fusion rule the simulated administrator applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionMode {
    Fair,
    Naive,
}

/// Trajectories of a reputation-network run.
#[derive(Debug, Clone)]
pub struct ReputationRun {
    /// Fused prior each node acted from (the fair rating in `Fair` mode).
    pub priors: Vec<Belief>,
    pub observations: Vec<usize>,
    pub actions: Vec<usize>,
    /// Post-action public belief per node.
    pub public_beliefs: Vec<Belief>,
}

/// Runs the reputation protocol over the DAG: each node fuses its
/// predecessors' information per `mode`, draws a private observation, acts
/// myopically, and broadcasts; the administrator tracks per-node log
/// action-likelihoods for fair fusion.
///
/// Observations depend only on the seed and node order, so fair and naive
/// runs with the same seed see identical private data.
pub fn simulate_reputation(
    dag: &FlowDag,
    obs_model: &ObservationModel,
    costs: &CostMatrix,
    prior: &Belief,
    true_state: usize,
    mode: FusionMode,
    seed: u64,
) -> Result<ReputationRun, IncestError> {
    let n = dag.node_count();
    let states = obs_model.states();
    if true_state >= states {
        return Err(IncestError::NodeOutOfRange {
            got: true_state,
            count: states,
        });
    }
    let t = closure(dag);
    let mut rng = rng_from_seed(seed);
    let observations: Vec<usize> = (0..n).map(|_| obs_model.sample(true_state, &mut rng)).collect();

    let mut log_likelihoods: Vec<LogBelief> = Vec::with_capacity(n);
    let mut priors = Vec::with_capacity(n);
    let mut actions = Vec::with_capacity(n);
    let mut publics: Vec<Belief> = Vec::with_capacity(n);

    // fair_rating over an empty or all-zero weight vector carries no state
    // count of its own; fall back to the explicit zero log-belief.
    let combine = |lls: &[LogBelief], w: &[i64]| -> LogBelief {
        if w.iter().all(|&x| x == 0) {
            LogBelief::zeros(states)
        } else {
            fair_rating(lls, w)
        }
    };

    for node in 0..n {
        let node_prior = match mode {
            FusionMode::Fair => {
                let w = weights_from_closure(&t, node)?;
                let witness: Vec<usize> = (0..node)
                    .filter(|&j| w[j] != 0 && !dag.adj[j][node])
                    .collect();
                if !witness.is_empty() {
                    return Err(IncestError::NonAchievable { node, witness });
                }
                combine(&log_likelihoods[..node], &w).to_belief(prior)?
            }
            FusionMode::Naive => {
                let h: Vec<&Belief> = (0..node)
                    .filter(|&m| dag.adj[m][node])
                    .map(|m| &publics[m])
                    .collect();
                if h.is_empty() {
                    prior.clone()
                } else {
                    naive_fusion(&h)?
                }
            }
        };

        let y = observations[node];
        let a = policy(&node_prior, obs_model, costs, y);
        let public = social_learning_filter(&node_prior, a, obs_model, costs)?;

        // Action log-likelihood of this node given each state, accumulated
        // on top of the fused ancestors' terms.
        let selected: Vec<usize> = (0..obs_model.observations())
            .filter(|&yy| policy(&node_prior, obs_model, costs, yy) == a)
            .collect();
        let w = weights_from_closure(&t, node)?;
        let mut own = combine(&log_likelihoods[..node], &w).0;
        for (i, o) in own.iter_mut().enumerate() {
            let like: f64 = selected.iter().map(|&yy| obs_model.likelihood(i, yy)).sum();
            *o += like.ln();
        }
        log_likelihoods.push(LogBelief(own));

        priors.push(node_prior);
        actions.push(a);
        publics.push(public);
    }

    Ok(ReputationRun {
        priors,
        observations,
        actions,
        public_beliefs: publics,
    })
}

/// Named example graphs.
pub mod fixtures {
    use super::FlowDag;

    /// Two agents over four epochs, seven nodes, with one individual
    /// appearing as nodes 0, 2, 3, and 6: information from node 0 reaches
    /// node 6 along three routes (directly, via 2→4, and via 3→5), the
    /// canonical double-counting pattern. Node 6 still links directly to
    /// every needed predecessor, so fair rating is achievable.
    pub fn seven_node_two_agent() -> FlowDag {
        let mut dag = FlowDag::with_agents(7, 2);
        for (from, to) in [(0, 2), (0, 3), (0, 6), (1, 3), (2, 4), (3, 5), (4, 6), (5, 6)] {
            dag.add_edge(from, to).expect("static fixture");
        }
        dag
    }

    /// The same graph without the direct 0 → 6 link: node 0's information
    /// still reaches node 6 along two paths, but the correction weight on
    /// node 0 has no direct channel to use, so fair rating is unachievable
    /// at node 6.
    pub fn double_path_unachievable() -> FlowDag {
        let mut dag = FlowDag::with_agents(7, 2);
        for (from, to) in [(0, 2), (0, 3), (1, 3), (2, 4), (3, 5), (4, 6), (5, 6)] {
            dag.add_edge(from, to).expect("static fixture");
        }
        dag
    }
}
