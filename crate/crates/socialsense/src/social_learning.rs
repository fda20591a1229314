//! Sequential Bayesian social learning: private belief updates, myopic
//! actions, the public-belief filter driven by observed actions, cascade
//! detection, and the structural checks (TP2 likelihoods, submodular costs,
//! likelihood-ratio ordering) behind monotone decision making.
//!
//! Agents share a deterministic tie-break (smallest action index). The
//! public-belief filter must model agents with the *same* policy, otherwise
//! observed actions can look impossible; both sides go through [`policy`].

use rand::Rng;
use thiserror::Error;

use crate::rng::rng_from_seed;

#[derive(Debug, Error)]
pub enum SocialLearningError {
    #[error("belief entries must be nonnegative and sum to 1 (sum = {0})")]
    InvalidBelief(f64),
    #[error("observation model row {0} sums to {1}, expected 1")]
    NotStochastic(usize, f64),
    #[error("matrix entry invalid: {0}")]
    InvalidEntry(f64),
    #[error("matrix has no rows or no columns")]
    EmptyMatrix,
    #[error("observation {got} out of range (Y = {max})")]
    ObservationOutOfRange { got: usize, max: usize },
    #[error("action {got} out of range (A = {max})")]
    ActionOutOfRange { got: usize, max: usize },
    #[error("state {got} out of range (X = {max})")]
    StateOutOfRange { got: usize, max: usize },
    #[error("observation {0} is impossible under the current belief")]
    ImpossibleObservation(usize),
    #[error("action {action} is inconsistent with the policy at this belief")]
    InconsistentAction { action: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Probability mass function over the states of nature.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(pmf: Vec<f64>) -> Result<Self, SocialLearningError> {
        if pmf.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(SocialLearningError::InvalidBelief(f64::NAN));
        }
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(SocialLearningError::InvalidBelief(sum));
        }
        Ok(Self(pmf))
    }

    pub fn uniform(states: usize) -> Self {
        Self(vec![1.0 / states as f64; states])
    }

    /// Normalizes a nonnegative weight vector into a belief.
    pub fn from_weights(weights: &[f64]) -> Result<Self, SocialLearningError> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(SocialLearningError::InvalidBelief(sum));
        }
        Ok(Self(weights.iter().map(|&w| w / sum).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for Belief {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Observation likelihoods `B[x][y] = P(y | x)`, row-stochastic.
#[derive(Debug, Clone)]
pub struct ObservationModel {
    probs: Vec<Vec<f64>>,
}

impl ObservationModel {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self, SocialLearningError> {
        if probs.is_empty() || probs[0].is_empty() {
            return Err(SocialLearningError::EmptyMatrix);
        }
        let y = probs[0].len();
        for (i, row) in probs.iter().enumerate() {
            if row.len() != y {
                return Err(SocialLearningError::DimensionMismatch(format!(
                    "row {i} has {} columns, expected {y}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
                return Err(SocialLearningError::InvalidEntry(bad));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(SocialLearningError::NotStochastic(i, sum));
            }
        }
        Ok(Self { probs })
    }

    pub fn states(&self) -> usize {
        self.probs.len()
    }

    pub fn observations(&self) -> usize {
        self.probs[0].len()
    }

    #[inline]
    pub fn likelihood(&self, state: usize, observation: usize) -> f64 {
        self.probs[state][observation]
    }

    pub fn sample(&self, state: usize, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (y, &p) in self.probs[state].iter().enumerate() {
            acc += p;
            if u <= acc {
                return y;
            }
        }
        self.probs[state].len() - 1
    }
}

/// Costs `c(x, a)`: rows indexed by state, columns by action.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    costs: Vec<Vec<f64>>,
}

impl CostMatrix {
    pub fn new(costs: Vec<Vec<f64>>) -> Result<Self, SocialLearningError> {
        if costs.is_empty() || costs[0].is_empty() {
            return Err(SocialLearningError::EmptyMatrix);
        }
        let a = costs[0].len();
        for (i, row) in costs.iter().enumerate() {
            if row.len() != a {
                return Err(SocialLearningError::DimensionMismatch(format!(
                    "row {i} has {} columns, expected {a}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&c| !c.is_finite()) {
                return Err(SocialLearningError::InvalidEntry(bad));
            }
        }
        Ok(Self { costs })
    }

    pub fn states(&self) -> usize {
        self.costs.len()
    }

    pub fn actions(&self) -> usize {
        self.costs[0].len()
    }

    #[inline]
    pub fn cost(&self, state: usize, action: usize) -> f64 {
        self.costs[state][action]
    }
}

/// Bayes update of the public belief with a private observation:
/// `η(i) ∝ B[i][y]·π(i)`.
pub fn private_belief(
    public: &Belief,
    obs_model: &ObservationModel,
    observation: usize,
) -> Result<Belief, SocialLearningError> {
    if public.len() != obs_model.states() {
        return Err(SocialLearningError::DimensionMismatch(format!(
            "belief has {} states, model has {}",
            public.len(),
            obs_model.states()
        )));
    }
    if observation >= obs_model.observations() {
        return Err(SocialLearningError::ObservationOutOfRange {
            got: observation,
            max: obs_model.observations(),
        });
    }
    let weights: Vec<f64> = (0..public.len())
        .map(|i| obs_model.likelihood(i, observation) * public[i])
        .collect();
    Belief::from_weights(&weights)
        .map_err(|_| SocialLearningError::ImpossibleObservation(observation))
}

/// Expected-cost-minimizing action; ties resolve to the smallest index.
pub fn myopic_action(belief: &Belief, costs: &CostMatrix) -> usize {
    let mut best = 0usize;
    let mut best_cost = f64::INFINITY;
    for a in 0..costs.actions() {
        let cost: f64 = (0..belief.len())
            .map(|i| costs.cost(i, a) * belief[i])
            .sum();
        if cost < best_cost {
            best_cost = cost;
            best = a;
        }
    }
    best
}

/// The action an agent with public belief `public` takes after observing `y`.
///
/// Computed on the unnormalized private belief, so it is total even for
/// observations that have zero probability under `public` (those contribute
/// nothing to the filter anyway). Shares the smallest-index tie-break with
/// [`myopic_action`].
pub fn policy(
    public: &Belief,
    obs_model: &ObservationModel,
    costs: &CostMatrix,
    observation: usize,
) -> usize {
    let mut best = 0usize;
    let mut best_cost = f64::INFINITY;
    for a in 0..costs.actions() {
        let cost: f64 = (0..public.len())
            .map(|i| costs.cost(i, a) * obs_model.likelihood(i, observation) * public[i])
            .sum();
        if cost < best_cost {
            best_cost = cost;
            best = a;
        }
    }
    best
}

/// True when the policy at `public` picks the same action for every
/// observation that can actually occur — the cascade condition, checked by
/// direct enumeration over the (finite) observation alphabet.
pub fn policy_constant_in_observation(
    public: &Belief,
    obs_model: &ObservationModel,
    costs: &CostMatrix,
) -> bool {
    let mut first: Option<usize> = None;
    for y in 0..obs_model.observations() {
        let mass: f64 = (0..public.len())
            .map(|i| obs_model.likelihood(i, y) * public[i])
            .sum();
        if mass <= 0.0 {
            continue; // observation cannot occur under this belief
        }
        let a = policy(public, obs_model, costs, y);
        match first {
            None => first = Some(a),
            Some(b) if b != a => return false,
            _ => {}
        }
    }
    true
}

/// Public-belief filter: updates `π` with an observed action,
/// `π'(i) ∝ π(i)·Σ_y 1{policy(y, π) = a}·B[i][y]`.
///
/// When the policy selects `a` for every observation, the mixture weights
/// sum to full likelihood rows, the update is the identity, and the input
/// belief is returned unchanged — exactly. That is the cascade fixed point.
pub fn social_learning_filter(
    public: &Belief,
    action: usize,
    obs_model: &ObservationModel,
    costs: &CostMatrix,
) -> Result<Belief, SocialLearningError> {
    if action >= costs.actions() {
        return Err(SocialLearningError::ActionOutOfRange {
            got: action,
            max: costs.actions(),
        });
    }
    let selected: Vec<usize> = (0..obs_model.observations())
        .filter(|&y| policy(public, obs_model, costs, y) == action)
        .collect();
    if selected.len() == obs_model.observations() {
        // Σ_y B[i][y] = 1 for every i: exact fixed point.
        return Ok(public.clone());
    }
    let weights: Vec<f64> = (0..public.len())
        .map(|i| {
            let mix: f64 = selected.iter().map(|&y| obs_model.likelihood(i, y)).sum();
            mix * public[i]
        })
        .collect();
    Belief::from_weights(&weights)
        .map_err(|_| SocialLearningError::InconsistentAction { action })
}

/// Record of one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub observations: Vec<usize>,
    pub actions: Vec<usize>,
    /// `public_beliefs[k]` is the belief after agent `k` acted; entry 0 is
    /// the prior.
    pub public_beliefs: Vec<Belief>,
    /// First step `k` at which the policy at `public_beliefs[k]` no longer
    /// depends on the observation; `None` if no cascade formed in time.
    pub cascade_time: Option<usize>,
}

/// Runs the sequential protocol: each agent draws a private observation from
/// the true state, takes the myopic action, and the public belief absorbs
/// the action through the filter.
pub fn run_protocol(
    true_state: usize,
    obs_model: &ObservationModel,
    costs: &CostMatrix,
    prior: &Belief,
    horizon: usize,
    seed: u64,
) -> Result<ProtocolRun, SocialLearningError> {
    if true_state >= obs_model.states() {
        return Err(SocialLearningError::StateOutOfRange {
            got: true_state,
            max: obs_model.states(),
        });
    }
    if prior.len() != obs_model.states() || costs.states() != obs_model.states() {
        return Err(SocialLearningError::DimensionMismatch(
            "prior, observation model, and costs must share the state space".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let mut public = prior.clone();
    let mut observations = Vec::with_capacity(horizon);
    let mut actions = Vec::with_capacity(horizon);
    let mut public_beliefs = Vec::with_capacity(horizon + 1);
    let mut cascade_time = None;
    if policy_constant_in_observation(&public, obs_model, costs) {
        cascade_time = Some(0);
    }
    public_beliefs.push(public.clone());
    for k in 1..=horizon {
        let y = obs_model.sample(true_state, &mut rng);
        let a = policy(&public, obs_model, costs, y);
        public = social_learning_filter(&public, a, obs_model, costs)?;
        observations.push(y);
        actions.push(a);
        public_beliefs.push(public.clone());
        if cascade_time.is_none() && policy_constant_in_observation(&public, obs_model, costs) {
            cascade_time = Some(k);
        }
    }
    Ok(ProtocolRun {
        observations,
        actions,
        public_beliefs,
        cascade_time,
    })
}

/// Checks total positivity of order 2: every 2×2 minor of the likelihood
/// matrix is nonnegative, i.e. `B[i+1][y]·B[i][y+1] <= B[i][y]·B[i+1][y+1]`
/// within 1e-12.
pub fn is_tp2(obs_model: &ObservationModel) -> bool {
    for i in 0..obs_model.states().saturating_sub(1) {
        for y in 0..obs_model.observations() - 1 {
            let lhs = obs_model.likelihood(i + 1, y) * obs_model.likelihood(i, y + 1);
            let rhs = obs_model.likelihood(i, y) * obs_model.likelihood(i + 1, y + 1);
            if lhs > rhs + 1e-12 {
                return false;
            }
        }
    }
    true
}

/// Checks the literal increasing-differences inequality
/// `c(x, a+1) − c(x, a) <= c(x+1, a+1) − c(x+1, a)` for all `x`, `a`.
///
/// Note the direction: paired with TP2 likelihoods, costs passing this
/// literal inequality yield actions monotone *nonincreasing* in the
/// observation; applying the check to the cost matrix with its action
/// columns reversed tests the decreasing-differences (standard submodular)
/// form, which yields nondecreasing actions. The widely used symmetric 2×2
/// cost matrix `[[0, 2], [2, 0]]` fails the literal inequality but passes
/// the reversed form, so monotone-decision results quoted for it assume the
/// reversed reading.
pub fn is_submodular(costs: &CostMatrix) -> bool {
    for x in 0..costs.states().saturating_sub(1) {
        for a in 0..costs.actions().saturating_sub(1) {
            let lhs = costs.cost(x, a + 1) - costs.cost(x, a);
            let rhs = costs.cost(x + 1, a + 1) - costs.cost(x + 1, a);
            if lhs > rhs + 1e-12 {
                return false;
            }
        }
    }
    true
}

/// Likelihood-ratio order: `p` dominates `q` when
/// `log p_i − log p_{i+1} <= log q_i − log q_{i+1}` for all `i`, evaluated by
/// cross-multiplication so zero coordinates follow the extended-real
/// convention. Under this convention `p` puts relatively more mass on high
/// states and first-order stochastically dominates `q`.
pub fn mlr_dominates(p: &Belief, q: &Belief) -> bool {
    assert_eq!(p.len(), q.len(), "beliefs must share the state space");
    for i in 0..p.len() - 1 {
        if p[i] * q[i + 1] > q[i] * p[i + 1] + 1e-12 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fitted_model() -> (ObservationModel, CostMatrix) {
        let b = ObservationModel::new(vec![vec![0.61, 0.39], vec![0.41, 0.59]]).unwrap();
        let c = CostMatrix::new(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        (b, c)
    }

    #[test]
    fn private_belief_uninformative_keeps_prior() {
        let b = ObservationModel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let pi = Belief::new(vec![0.3, 0.7]).unwrap();
        let eta = private_belief(&pi, &b, 1).unwrap();
        assert!((eta[0] - 0.3).abs() < 1e-15);
        assert!((eta[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn private_belief_identity_observation_is_point_mass() {
        let b = ObservationModel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let pi = Belief::uniform(2);
        let eta = private_belief(&pi, &b, 1).unwrap();
        assert_eq!(eta.as_slice(), &[0.0, 1.0]);
        // The other observation is then impossible from a point mass.
        let err = private_belief(&eta, &b, 0).unwrap_err();
        assert!(matches!(err, SocialLearningError::ImpossibleObservation(0)));
    }

    #[test]
    fn private_belief_fitted_matrix_arithmetic() {
        let (b, _) = fitted_model();
        let eta = private_belief(&Belief::uniform(2), &b, 0).unwrap();
        assert!((eta[0] - 0.61 / 1.02).abs() < 1e-12);
        assert!((eta[1] - 0.41 / 1.02).abs() < 1e-12);
    }

    #[test]
    fn myopic_action_basics() {
        let (_, c) = fitted_model();
        let eta = Belief::new(vec![0.9, 0.1]).unwrap();
        assert_eq!(myopic_action(&eta, &c), 0);

        let tied = CostMatrix::new(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(myopic_action(&eta, &tied), 0);
    }

    #[test]
    fn myopic_action_affine_invariance() {
        let mut rng = crate::rng::rng_from_seed(3);
        use rand::Rng;
        for _ in 0..50 {
            let raw: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() + 0.01).collect();
            let eta = Belief::from_weights(&raw).unwrap();
            let c: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .collect();
            let costs = CostMatrix::new(c.clone()).unwrap();
            let scale = rng.gen_range(0.1..10.0);
            let shift = rng.gen_range(-10.0..10.0);
            let transformed = CostMatrix::new(
                c.iter()
                    .map(|row| row.iter().map(|&v| scale * v + shift).collect())
                    .collect(),
            )
            .unwrap();
            assert_eq!(
                myopic_action(&eta, &costs),
                myopic_action(&eta, &transformed)
            );
        }
    }

    #[test]
    fn filter_matches_hand_enumeration_at_uniform_prior() {
        let (b, c) = fitted_model();
        let pi = Belief::uniform(2);
        // y = 0 maps to action 0, y = 1 to action 1, so observing a = 0
        // selects exactly the y = 0 likelihood column.
        assert_eq!(policy(&pi, &b, &c, 0), 0);
        assert_eq!(policy(&pi, &b, &c, 1), 1);
        let next = social_learning_filter(&pi, 0, &b, &c).unwrap();
        assert!((next[0] - 0.61 / 1.02).abs() < 1e-12);
        assert!((next[1] - 0.41 / 1.02).abs() < 1e-12);
        assert!((next.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn filter_fixed_point_when_policy_ignores_observation() {
        let (b, _) = fitted_model();
        // One action strictly dominates: the policy cannot depend on y.
        let c = CostMatrix::new(vec![vec![0.0, 5.0], vec![0.0, 5.0]]).unwrap();
        let pi = Belief::new(vec![0.123456789, 0.876543211]).unwrap();
        let next = social_learning_filter(&pi, 0, &b, &c).unwrap();
        assert_eq!(pi, next, "cascade fixed point must be exact");
    }

    #[test]
    fn filter_uninformative_likelihoods_keep_belief() {
        // With equal likelihood rows the policy ignores the observation, so
        // the one action agents actually take leaves the belief unchanged.
        let b = ObservationModel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let (_, c) = fitted_model();
        let pi = Belief::new(vec![0.25, 0.75]).unwrap();
        let taken = policy(&pi, &b, &c, 0);
        let next = social_learning_filter(&pi, taken, &b, &c).unwrap();
        assert_eq!(pi, next);
    }

    #[test]
    fn filter_rejects_impossible_action() {
        let (b, c) = fitted_model();
        // At an extreme belief both observations map to action 0; feeding
        // the filter the never-taken action must fail loudly.
        let pi = Belief::new(vec![0.99, 0.01]).unwrap();
        assert!(policy_constant_in_observation(&pi, &b, &c));
        let err = social_learning_filter(&pi, 1, &b, &c).unwrap_err();
        assert!(matches!(
            err,
            SocialLearningError::InconsistentAction { action: 1 }
        ));
    }

    #[test]
    fn protocol_identity_observations_cascade_immediately() {
        let b = ObservationModel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let c = CostMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let run = run_protocol(1, &b, &c, &Belief::uniform(2), 10, 5).unwrap();
        assert_eq!(run.cascade_time, Some(1));
        assert_eq!(run.actions, vec![1; 10]);
        let frozen = &run.public_beliefs[1];
        for k in 1..=10 {
            assert_eq!(&run.public_beliefs[k], frozen);
        }
    }

    #[test]
    fn protocol_fitted_model_always_cascades_quickly() {
        let (b, c) = fitted_model();
        let prior = Belief::uniform(2);
        for seed in 0..100 {
            let run = run_protocol(0, &b, &c, &prior, 200, seed).unwrap();
            let k = run.cascade_time.expect("cascade must form");
            assert!(k <= 200);
            for later in k..=200 {
                assert_eq!(run.public_beliefs[later], run.public_beliefs[k]);
            }
        }
    }

    #[test]
    fn cascade_to_correct_action_matches_two_agent_enumeration() {
        // Enumerate the first two observations exactly: from the uniform
        // prior each action reveals its observation, and two equal actions
        // in a row push the public belief into the cascade region.
        let (b, c) = fitted_model();
        let prior = Belief::uniform(2);
        let true_state = 0usize;
        let mut p_correct_by_2 = 0.0;
        for y1 in 0..2 {
            for y2 in 0..2 {
                let p = b.likelihood(true_state, y1) * b.likelihood(true_state, y2);
                let mut public = prior.clone();
                let mut cascaded_correct = false;
                for y in [y1, y2] {
                    if policy_constant_in_observation(&public, &b, &c) {
                        break;
                    }
                    let a = policy(&public, &b, &c, y);
                    public = social_learning_filter(&public, a, &b, &c).unwrap();
                }
                if policy_constant_in_observation(&public, &b, &c) {
                    let a = policy(&public, &b, &c, 0);
                    cascaded_correct = a == true_state;
                }
                if cascaded_correct {
                    p_correct_by_2 += p;
                }
            }
        }
        let runs = 4000;
        let mut hits = 0usize;
        for seed in 0..runs {
            let run = run_protocol(true_state, &b, &c, &prior, 2, seed as u64).unwrap();
            if let Some(k) = run.cascade_time {
                if k <= 2 {
                    let a = policy(&run.public_beliefs[k], &b, &c, 0);
                    if a == true_state {
                        hits += 1;
                    }
                }
            }
        }
        let empirical = hits as f64 / runs as f64;
        // Binomial noise at n = 4000 stays well inside 0.03.
        assert!(
            (empirical - p_correct_by_2).abs() < 0.03,
            "empirical {empirical} vs enumerated {p_correct_by_2}"
        );
    }

    #[test]
    fn tp2_checks() {
        let (b, _) = fitted_model();
        assert!(is_tp2(&b));
        let reversed = ObservationModel::new(vec![vec![0.4, 0.6], vec![0.6, 0.4]]).unwrap();
        assert!(!is_tp2(&reversed));
        let single_row = ObservationModel::new(vec![vec![0.3, 0.7]]).unwrap();
        assert!(is_tp2(&single_row));
    }

    #[test]
    fn submodularity_literal_inequality() {
        // The symmetric 0/2 matrix fails the ascending-index reading: the
        // increment at x = 0 is +2, at x = 1 it is -2.
        let (_, c) = fitted_model();
        assert!(!is_submodular(&c));
        // ...but passes with action columns reversed.
        let reversed = CostMatrix::new(vec![vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert!(is_submodular(&reversed));

        let constant = CostMatrix::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(is_submodular(&constant));

        // c(x, a) = x·a has increments (the a-differences scaled by x) that
        // increase in x, so the literal inequality holds.
        let product = CostMatrix::new(
            (0..3)
                .map(|x| (0..3).map(|a| (x * a) as f64).collect())
                .collect(),
        )
        .unwrap();
        assert!(is_submodular(&product));
    }

    #[test]
    fn mlr_order_basics() {
        let p = Belief::new(vec![0.2, 0.8]).unwrap();
        let q = Belief::new(vec![0.8, 0.2]).unwrap();
        assert!(mlr_dominates(&p, &p));
        assert!(mlr_dominates(&p, &q));
        assert!(!mlr_dominates(&q, &p));
    }

    #[test]
    fn mlr_implies_first_order_stochastic_dominance() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(9);
        let mut checked = 0usize;
        while checked < 200 {
            let x = rng.gen_range(2..=5usize);
            let p = Belief::from_weights(
                &(0..x).map(|_| rng.gen::<f64>() + 1e-3).collect::<Vec<_>>(),
            )
            .unwrap();
            let q = Belief::from_weights(
                &(0..x).map(|_| rng.gen::<f64>() + 1e-3).collect::<Vec<_>>(),
            )
            .unwrap();
            if !mlr_dominates(&p, &q) {
                continue;
            }
            checked += 1;
            // p must dominate q in the first-order sense: more mass on every
            // upper set.
            for j in 0..x {
                let pu: f64 = (j..x).map(|i| p[i]).sum();
                let qu: f64 = (j..x).map(|i| q[i]).sum();
                assert!(
                    pu >= qu - 1e-9,
                    "upper-set mass violated at {j}: {pu} < {qu}"
                );
            }
        }
    }

    #[test]
    fn ordinality_of_actions_under_tp2_and_reversed_submodular_costs() {
        // Gaussian-shift likelihood rows are TP2; products of an increasing
        // state factor and a decreasing action factor have decreasing
        // differences, the pairing that makes actions nondecreasing in y.
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(11);
        for _ in 0..20 {
            let x = rng.gen_range(2..=4usize);
            let y = rng.gen_range(2..=4usize);
            let a = rng.gen_range(2..=4usize);
            let sigma: f64 = rng.gen_range(0.8..2.0);
            let b = ObservationModel::new(
                (0..x)
                    .map(|i| {
                        let center = i as f64 * (y as f64 - 1.0) / (x as f64 - 1.0).max(1.0);
                        let row: Vec<f64> = (0..y)
                            .map(|yy| {
                                (-((yy as f64 - center).powi(2)) / (2.0 * sigma * sigma)).exp()
                            })
                            .collect();
                        let s: f64 = row.iter().sum();
                        row.into_iter().map(|v| v / s).collect()
                    })
                    .collect(),
            )
            .unwrap();
            assert!(is_tp2(&b));

            let fx: Vec<f64> = {
                let mut v: Vec<f64> = (0..x).map(|_| rng.gen_range(0.1..1.0)).collect();
                let mut acc = 0.0;
                for e in v.iter_mut() {
                    acc += *e;
                    *e = acc;
                }
                v
            };
            let mut ga: Vec<f64> = (0..a)
                .map(|j| (a - j) as f64 * rng.gen_range(0.5..1.5))
                .collect();
            ga.sort_by(|p, q| q.total_cmp(p));
            let costs = CostMatrix::new(
                (0..x)
                    .map(|i| (0..a).map(|j| fx[i] * ga[j]).collect())
                    .collect(),
            )
            .unwrap();
            // Decreasing differences = literal inequality on reversed columns.
            let reversed = CostMatrix::new(
                (0..x)
                    .map(|i| (0..a).rev().map(|j| costs.cost(i, j)).collect())
                    .collect(),
            )
            .unwrap();
            assert!(is_submodular(&reversed));

            for _ in 0..100 {
                let pi = Belief::from_weights(
                    &(0..x).map(|_| rng.gen::<f64>() + 1e-3).collect::<Vec<_>>(),
                )
                .unwrap();
                let actions: Vec<usize> = (0..y).map(|yy| policy(&pi, &b, &costs, yy)).collect();
                for w in actions.windows(2) {
                    assert!(w[0] <= w[1], "actions {actions:?} not nondecreasing");
                }
            }
        }
    }

    #[test]
    fn literal_submodular_costs_give_nonincreasing_actions() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(13);
        // Gaussian-shift rows (TP2 by construction).
        let b = ObservationModel::new(
            (0..3)
                .map(|i| {
                    let row: Vec<f64> = (0..3)
                        .map(|y| (-((y as f64 - i as f64).powi(2)) / 2.0).exp())
                        .collect();
                    let s: f64 = row.iter().sum();
                    row.into_iter().map(|v| v / s).collect()
                })
                .collect(),
        )
        .unwrap();
        assert!(is_tp2(&b));
        // c(x, a) = x·a satisfies the literal inequality.
        let costs = CostMatrix::new(
            (0..3)
                .map(|x| (0..3).map(|a| (x * a) as f64).collect())
                .collect(),
        )
        .unwrap();
        assert!(is_submodular(&costs));
        for _ in 0..100 {
            let pi = Belief::from_weights(
                &(0..3).map(|_| rng.gen::<f64>() + 1e-3).collect::<Vec<_>>(),
            )
            .unwrap();
            let actions: Vec<usize> = (0..3).map(|yy| policy(&pi, &b, &costs, yy)).collect();
            for w in actions.windows(2) {
                assert!(w[0] >= w[1], "actions {actions:?} not nonincreasing");
            }
        }
    }

    #[test]
    fn belief_validation() {
        assert!(Belief::new(vec![0.5, 0.6]).is_err());
        assert!(Belief::new(vec![-0.1, 1.1]).is_err());
        assert!(Belief::from_weights(&[0.0, 0.0]).is_err());
        let b = Belief::from_weights(&[2.0, 6.0]).unwrap();
        assert!((b[0] - 0.25).abs() < 1e-15);
    }
}
