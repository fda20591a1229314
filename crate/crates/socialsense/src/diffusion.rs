//! Agent-level susceptible-infected-susceptible dynamics and the matching
//! mean-field difference equation.
//!
//! One uniformly chosen agent is resampled per step, so the per-degree
//! infected fraction `ρ(d)` moves on the lattice `{0, 1/N(d), 2/N(d), ...}`
//! and changes by at most one tick per step. The mean-field recursion updates
//! every degree class each step with step size `1/N`, replacing the realized
//! infected-neighbor count with a binomial mixture at the infected-link
//! probability `α`. The simulation keeps the true neighbor counts; that
//! asymmetry is deliberate and is what the deviation diagnostics measure.

use rand::Rng;
use thiserror::Error;

use crate::network::{degree_distribution, DegreeDistribution, Graph, GraphSpec};
use crate::rng::{child_seed, rng_from_seed, SeededRng};

#[derive(Debug, Error)]
pub enum DiffusionError {
    #[error("transition matrix row {0} sums to {1}, expected 1")]
    NotStochastic(usize, f64),
    #[error("matrix entry out of [0, 1]: {0}")]
    InvalidProbability(f64),
    #[error("initial infected fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("graph has no edges: infected link probability undefined")]
    NoEdges,
    #[error("kernel covers degrees up to {kernel} but graph has degree {graph}")]
    KernelTooSmall { kernel: usize, graph: usize },
    #[error("target state {state} outside kernel state range {states}")]
    StateOutOfRange { state: usize, states: usize },
    #[error("trajectory lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("trajectory degree ranges differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("target schedule must start at step 0")]
    BadSchedule,
}

/// Finite-state Markov chain for the exogenous target process.
#[derive(Debug, Clone)]
pub struct TargetChain {
    transition: Vec<Vec<f64>>,
    pub initial_state: usize,
}

impl TargetChain {
    pub fn new(transition: Vec<Vec<f64>>, initial_state: usize) -> Result<Self, DiffusionError> {
        let n = transition.len();
        for (i, row) in transition.iter().enumerate() {
            if row.len() != n {
                return Err(DiffusionError::NotStochastic(i, f64::NAN));
            }
            if let Some(&bad) = row.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
                return Err(DiffusionError::InvalidProbability(bad));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(DiffusionError::NotStochastic(i, sum));
            }
        }
        if initial_state >= n {
            return Err(DiffusionError::StateOutOfRange {
                state: initial_state,
                states: n,
            });
        }
        Ok(Self {
            transition,
            initial_state,
        })
    }

    pub fn state_count(&self) -> usize {
        self.transition.len()
    }

    pub fn step(&self, state: usize, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (next, &p) in self.transition[state].iter().enumerate() {
            acc += p;
            if u <= acc {
                return next;
            }
        }
        self.transition.len() - 1
    }
}

/// Exogenous target process driving the transition kernel. It advances once
/// per simulation step, on the same clock as the agent updates.
#[derive(Debug, Clone)]
pub enum TargetProcess {
    Chain(TargetChain),
    /// Deterministic piecewise-constant schedule: `(step, state)` switch
    /// points, first entry at step 0. The state at step `k` is the one from
    /// the last switch at or before `k`.
    Schedule(Vec<(usize, usize)>),
}

impl TargetProcess {
    pub fn constant(state: usize) -> Self {
        TargetProcess::Schedule(vec![(0, state)])
    }

    /// Realizes the state sequence `s_0..s_steps` (inclusive).
    pub fn realize(&self, steps: usize, seed: u64) -> Result<Vec<usize>, DiffusionError> {
        match self {
            TargetProcess::Chain(chain) => {
                let mut rng = rng_from_seed(seed);
                let mut states = Vec::with_capacity(steps + 1);
                let mut s = chain.initial_state;
                states.push(s);
                for _ in 0..steps {
                    s = chain.step(s, &mut rng);
                    states.push(s);
                }
                Ok(states)
            }
            TargetProcess::Schedule(points) => {
                if points.is_empty() || points[0].0 != 0 {
                    return Err(DiffusionError::BadSchedule);
                }
                let mut states = Vec::with_capacity(steps + 1);
                let mut idx = 0;
                for k in 0..=steps {
                    while idx + 1 < points.len() && points[idx + 1].0 <= k {
                        idx += 1;
                    }
                    states.push(points[idx].1);
                }
                Ok(states)
            }
        }
    }
}

/// Tabulated agent transition probabilities `p01(d, a, s)` and `p10(d, a, s)`
/// for degree `d`, infected-neighbor count `a <= d`, and target state `s`.
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    max_degree: usize,
    states: usize,
    p01: Vec<f64>,
    p10: Vec<f64>,
}

impl TransitionKernel {
    /// Builds a kernel from closures; entries are validated to lie in [0, 1].
    pub fn from_fn(
        max_degree: usize,
        states: usize,
        f01: impl Fn(usize, usize, usize) -> f64,
        f10: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self, DiffusionError> {
        let width = max_degree + 1;
        let mut p01 = vec![0.0; states * width * width];
        let mut p10 = vec![0.0; states * width * width];
        for s in 0..states {
            for d in 0..=max_degree {
                for a in 0..=d {
                    let i = (s * width + d) * width + a;
                    p01[i] = f01(d, a, s);
                    p10[i] = f10(d, a, s);
                    for v in [p01[i], p10[i]] {
                        if !(0.0..=1.0).contains(&v) {
                            return Err(DiffusionError::InvalidProbability(v));
                        }
                    }
                }
            }
        }
        Ok(Self {
            max_degree,
            states,
            p01,
            p10,
        })
    }

    /// Technology-adoption kernel: a susceptible agent with `a` infected
    /// neighbors adopts with probability `min(a / c[s], 1)` (zero when
    /// `a = 0`), and an adopter drops out with constant probability `p_fail`.
    /// `c[s]` is the cost scale under target state `s`.
    pub fn adoption(c: &[f64], p_fail: f64, max_degree: usize) -> Result<Self, DiffusionError> {
        if c.is_empty() || c.iter().any(|&v| !(v > 0.0)) {
            return Err(DiffusionError::InvalidProbability(f64::NAN));
        }
        Self::from_fn(
            max_degree,
            c.len(),
            |_, a, s| {
                if a == 0 {
                    0.0
                } else {
                    (a as f64 / c[s]).min(1.0)
                }
            },
            |_, _, _| p_fail,
        )
    }

    /// Degree- and neighbor-independent kernel with a single target state.
    pub fn constant(p01: f64, p10: f64, max_degree: usize) -> Result<Self, DiffusionError> {
        Self::from_fn(max_degree, 1, |_, _, _| p01, |_, _, _| p10)
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    #[inline]
    pub fn p01(&self, d: usize, a: usize, s: usize) -> f64 {
        let w = self.max_degree + 1;
        self.p01[(s * w + d) * w + a]
    }

    #[inline]
    pub fn p10(&self, d: usize, a: usize, s: usize) -> f64 {
        let w = self.max_degree + 1;
        self.p10[(s * w + d) * w + a]
    }
}

/// Per-node infection states plus the per-degree infected histogram.
///
/// `rho(d) = infected(d) / N(d)` is indexed by degree `d = 1..=max_degree`;
/// degree-0 nodes never change state (they have no neighbors) and are
/// excluded from `rho`.
#[derive(Debug, Clone)]
pub struct DiffusionState {
    pub node_states: Vec<bool>,
    infected_by_degree: Vec<usize>,
    degree_counts: Vec<usize>,
    pub time: usize,
}

impl DiffusionState {
    /// Infects `round(fraction * N)` uniformly chosen nodes.
    pub fn init(graph: &Graph, fraction: f64, rng: &mut impl Rng) -> Result<Self, DiffusionError> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(DiffusionError::InvalidFraction(fraction));
        }
        let n = graph.node_count();
        let dd = degree_distribution(graph);
        let mut node_states = vec![false; n];
        let k = ((fraction * n as f64).round() as usize).min(n);
        let mut ids: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.gen_range(i..n);
            ids.swap(i, j);
            node_states[ids[i]] = true;
        }
        let mut infected_by_degree = vec![0usize; graph.max_degree() + 1];
        for (node, &inf) in node_states.iter().enumerate() {
            if inf {
                infected_by_degree[graph.degree(node)] += 1;
            }
        }
        let state = Self {
            node_states,
            infected_by_degree,
            degree_counts: dd.counts,
            time: 0,
        };
        debug_assert!(state.validate(graph));
        Ok(state)
    }

    /// Infected fraction per degree class, index = degree (entry 0 unused).
    pub fn rho(&self) -> Vec<f64> {
        self.infected_by_degree
            .iter()
            .zip(&self.degree_counts)
            .enumerate()
            .map(|(d, (&inf, &cnt))| {
                if d == 0 || cnt == 0 {
                    0.0
                } else {
                    inf as f64 / cnt as f64
                }
            })
            .collect()
    }

    pub fn degree_counts(&self) -> &[usize] {
        &self.degree_counts
    }

    /// Full recount of the histogram against `node_states`; used by debug
    /// assertions and tests, not in the per-step hot path.
    pub fn validate(&self, graph: &Graph) -> bool {
        let mut recount = vec![0usize; graph.max_degree() + 1];
        for (node, &inf) in self.node_states.iter().enumerate() {
            if inf {
                recount[graph.degree(node)] += 1;
            }
        }
        recount == self.infected_by_degree
    }
}

/// Probability that a uniformly sampled edge endpoint is infected:
/// `Σ d·P(d)·ρ(d) / Σ d·P(d)`.
pub fn infected_link_probability(
    rho: &[f64],
    dd: &DegreeDistribution,
) -> Result<f64, DiffusionError> {
    let mut num = 0.0;
    let mut den = 0.0;
    for d in 1..dd.probabilities.len() {
        let w = d as f64 * dd.probabilities[d];
        den += w;
        num += w * rho.get(d).copied().unwrap_or(0.0);
    }
    if den <= 0.0 {
        return Err(DiffusionError::NoEdges);
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Resamples the state of one uniformly chosen agent using its realized
/// infected-neighbor count. At most one degree class moves, by one tick.
pub fn sis_step(
    state: &mut DiffusionState,
    graph: &Graph,
    kernel: &TransitionKernel,
    target_state: usize,
    rng: &mut impl Rng,
) {
    let n = graph.node_count();
    let node = rng.gen_range(0..n);
    let d = graph.degree(node);
    state.time += 1;
    if d == 0 {
        return; // isolated nodes are frozen
    }
    let infected_neighbors = graph
        .neighbors(node)
        .iter()
        .filter(|&&v| state.node_states[v as usize])
        .count();
    let u: f64 = rng.gen();
    if state.node_states[node] {
        if u < kernel.p10(d, infected_neighbors, target_state) {
            state.node_states[node] = false;
            state.infected_by_degree[d] -= 1;
        }
    } else if u < kernel.p01(d, infected_neighbors, target_state) {
        state.node_states[node] = true;
        state.infected_by_degree[d] += 1;
    }
}

/// Step-by-step record of an agent-level simulation.
#[derive(Debug, Clone)]
pub struct SisTrajectory {
    /// `rho[k][d]` for steps `k = 0..=steps`, degree-indexed.
    pub rho: Vec<Vec<f64>>,
    /// Infected link probability per step.
    pub alpha: Vec<f64>,
    /// Realized target state per step.
    pub target_states: Vec<usize>,
    /// Node counts per degree, shared by every step.
    pub degree_counts: Vec<usize>,
    pub final_state: DiffusionState,
}

/// Runs the single-agent-per-step SIS protocol for `steps` steps.
///
/// Deterministic given `seed`: the initial infection, the target realization,
/// and the agent updates draw from independent child streams.
pub fn simulate_sis(
    graph: &Graph,
    kernel: &TransitionKernel,
    target: &TargetProcess,
    initial_infected_fraction: f64,
    steps: usize,
    seed: u64,
) -> Result<SisTrajectory, DiffusionError> {
    check_kernel(graph, kernel)?;
    let dd = degree_distribution(graph);
    let target_states = target.realize(steps, child_seed(seed, "target"))?;
    if let Some(&bad) = target_states.iter().find(|&&s| s >= kernel.states) {
        return Err(DiffusionError::StateOutOfRange {
            state: bad,
            states: kernel.states,
        });
    }
    let mut init_rng = rng_from_seed(child_seed(seed, "init"));
    let mut state = DiffusionState::init(graph, initial_infected_fraction, &mut init_rng)?;
    let mut step_rng: SeededRng = rng_from_seed(child_seed(seed, "steps"));

    let mut rho = Vec::with_capacity(steps + 1);
    let mut alpha = Vec::with_capacity(steps + 1);
    let r0 = state.rho();
    alpha.push(infected_link_probability(&r0, &dd)?);
    rho.push(r0);
    for k in 0..steps {
        sis_step(&mut state, graph, kernel, target_states[k], &mut step_rng);
        let r = state.rho();
        alpha.push(infected_link_probability(&r, &dd)?);
        rho.push(r);
    }
    debug_assert!(state.validate(graph));
    Ok(SisTrajectory {
        rho,
        alpha,
        target_states,
        degree_counts: dd.counts.clone(),
        final_state: state,
    })
}

fn check_kernel(graph: &Graph, kernel: &TransitionKernel) -> Result<(), DiffusionError> {
    if kernel.max_degree < graph.max_degree() {
        return Err(DiffusionError::KernelTooSmall {
            kernel: kernel.max_degree,
            graph: graph.max_degree(),
        });
    }
    Ok(())
}

/// Mean-field state: deterministic per-degree infected fractions.
#[derive(Debug, Clone)]
pub struct MeanFieldState {
    /// Degree-indexed, entry 0 unused.
    pub rho_bar: Vec<f64>,
    pub time: usize,
    /// Number of coordinates clamped back into [0, 1] so far.
    pub clamp_count: usize,
}

impl MeanFieldState {
    pub fn new(rho_bar: Vec<f64>) -> Self {
        Self {
            rho_bar,
            time: 0,
            clamp_count: 0,
        }
    }
}

/// Binomial pmf over `a = 0..=d` at success probability `alpha`, computed by
/// the ratio recurrence. Weights sum to 1 within 1e-12 for the degree ranges
/// used here.
pub fn binomial_weights(d: usize, alpha: f64) -> Vec<f64> {
    let mut w = vec![0.0; d + 1];
    if alpha <= 0.0 {
        w[0] = 1.0;
        return w;
    }
    if alpha >= 1.0 {
        w[d] = 1.0;
        return w;
    }
    // Run the recurrence with success probability <= 1/2 and reflect, so the
    // starting term (1-p)^d cannot underflow for the degrees used here.
    let (p, reflect) = if alpha > 0.5 {
        (1.0 - alpha, true)
    } else {
        (alpha, false)
    };
    let q = 1.0 - p;
    let ratio = p / q;
    let mut cur = q.powi(d as i32);
    for a in 0..=d {
        w[if reflect { d - a } else { a }] = cur;
        if a < d {
            cur *= ratio * (d - a) as f64 / (a + 1) as f64;
        }
    }
    w
}

/// One step of the mean-field recursion at target state `s`:
/// `ρ̄'(d) = ρ̄(d) + (1/N)·[ρ̄01(d, α, s) − ρ̄10(d, α, s)]` with
/// `ρ̄01 = (1−ρ̄(d))·Σ_a p01(d,a,s)·Binom(d,a,α)` and the symmetric `ρ̄10`
/// term, clamped to [0, 1]. Clamps are counted, never silent.
pub fn mean_field_step(
    mf: &MeanFieldState,
    kernel: &TransitionKernel,
    dd: &DegreeDistribution,
    target_state: usize,
    n: usize,
) -> Result<MeanFieldState, DiffusionError> {
    if target_state >= kernel.states {
        return Err(DiffusionError::StateOutOfRange {
            state: target_state,
            states: kernel.states,
        });
    }
    let alpha = infected_link_probability(&mf.rho_bar, dd)?;
    let max_d = mf.rho_bar.len() - 1;
    let mut next = mf.rho_bar.clone();
    let mut clamps = mf.clamp_count;
    for d in 1..=max_d {
        let weights = binomial_weights(d, alpha);
        let mut up = 0.0;
        let mut down = 0.0;
        for a in 0..=d {
            up += kernel.p01(d, a, target_state) * weights[a];
            down += kernel.p10(d, a, target_state) * weights[a];
        }
        let rho_d = mf.rho_bar[d];
        let raw = rho_d + ((1.0 - rho_d) * up - rho_d * down) / n as f64;
        let clamped = raw.clamp(0.0, 1.0);
        if clamped != raw {
            clamps += 1;
        }
        next[d] = clamped;
    }
    Ok(MeanFieldState {
        rho_bar: next,
        time: mf.time + 1,
        clamp_count: clamps,
    })
}

/// Mean-field trajectory record.
#[derive(Debug, Clone)]
pub struct MeanFieldTrajectory {
    pub rho: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub clamp_count: usize,
}

/// Iterates the mean-field recursion along a realized target-state sequence
/// (`target_states[k]` drives step `k -> k+1`).
pub fn mean_field_trajectory(
    dd: &DegreeDistribution,
    kernel: &TransitionKernel,
    target_states: &[usize],
    rho0: Vec<f64>,
    n: usize,
    steps: usize,
) -> Result<MeanFieldTrajectory, DiffusionError> {
    assert!(target_states.len() >= steps);
    let mut mf = MeanFieldState::new(rho0);
    let mut rho = Vec::with_capacity(steps + 1);
    let mut alpha = Vec::with_capacity(steps + 1);
    alpha.push(infected_link_probability(&mf.rho_bar, dd)?);
    rho.push(mf.rho_bar.clone());
    for k in 0..steps {
        mf = mean_field_step(&mf, kernel, dd, target_states[k], n)?;
        alpha.push(infected_link_probability(&mf.rho_bar, dd)?);
        rho.push(mf.rho_bar.clone());
    }
    Ok(MeanFieldTrajectory {
        rho,
        alpha,
        clamp_count: mf.clamp_count,
    })
}

/// Sup-norm deviation `max_k ‖ρ_k − ρ̄_k‖_∞` between a simulated and a
/// mean-field trajectory, taken over degree classes that contain nodes.
pub fn deviation(sim: &SisTrajectory, mf: &MeanFieldTrajectory) -> Result<f64, DiffusionError> {
    if sim.rho.len() != mf.rho.len() {
        return Err(DiffusionError::LengthMismatch(sim.rho.len(), mf.rho.len()));
    }
    let mut sup: f64 = 0.0;
    for (rs, rm) in sim.rho.iter().zip(&mf.rho) {
        if rs.len() != rm.len() {
            return Err(DiffusionError::DegreeMismatch(rs.len(), rm.len()));
        }
        for d in 1..rs.len() {
            if sim.degree_counts.get(d).copied().unwrap_or(0) > 0 {
                sup = sup.max((rs[d] - rm[d]).abs());
            }
        }
    }
    Ok(sup)
}

/// Ready-made simulation scenarios.
pub mod presets {
    use super::*;

    /// Everything needed to run matched simulation/mean-field experiments.
    #[derive(Debug, Clone)]
    pub struct DiffusionScenario {
        pub graph: Graph,
        pub kernel: TransitionKernel,
        pub target: TargetProcess,
        pub initial_infected_fraction: f64,
        pub steps: usize,
    }

    /// Technology-adoption scenario on a 100-node random graph (degrees
    /// capped at 17), 5% initially infected, failure probability 0.3, with
    /// the adoption cost scale switching 1 → 10 at step 200 and back 10 → 1
    /// at step 500 over a 700-step horizon.
    pub fn adoption_switching(seed: u64) -> DiffusionScenario {
        let graph = crate::network::generate_graph(
            &GraphSpec::ErdosRenyi {
                n: 100,
                p: 0.06,
                max_degree: Some(17),
            },
            child_seed(seed, "graph"),
        )
        .expect("static spec is valid");
        let kernel = TransitionKernel::adoption(&[1.0, 10.0], 0.3, graph.max_degree())
            .expect("static kernel is valid");
        DiffusionScenario {
            graph,
            kernel,
            target: TargetProcess::Schedule(vec![(0, 0), (200, 1), (500, 0)]),
            initial_infected_fraction: 0.05,
            steps: 700,
        }
    }
}
