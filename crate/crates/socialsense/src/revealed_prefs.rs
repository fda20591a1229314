//! Revealed-preference analysis: tests for single-agent utility maximization
//! (GARP and the Afriat inequalities), the multiagent test for consistency
//! with Nash play of a concave potential game, reconstruction of concave
//! piecewise-linear utility/potential functions, response prediction, and
//! marginal rates of substitution.
//!
//! Two independent routes decide single-agent rationality: the combinatorial
//! GARP check (revealed-preference relation + Warshall closure) and the
//! linear feasibility system solved by [`crate::lp`]. They must agree; the
//! test suites treat disagreement as a hard failure.

use thiserror::Error;

use crate::lp::{self, Constraint, Feasibility, LinearProgram, LpError, LpOutcome, Relation};

#[derive(Debug, Error)]
pub enum RpError {
    #[error("price at observation {t}, good {good} must be strictly positive")]
    NonPositivePrice { t: usize, good: usize },
    #[error("response at observation {t}, agent {agent}, good {good} is negative")]
    NegativeResponse { t: usize, agent: usize, good: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("budget for agent {agent} at probe is negative")]
    InfeasibleBudget { agent: usize },
    #[error("prediction program reported unbounded, which positive prices rule out")]
    UnboundedPrediction,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Time series of external influences and one agent's responses.
#[derive(Debug, Clone)]
pub struct ConsumerDataset {
    prices: Vec<Vec<f64>>,
    responses: Vec<Vec<f64>>,
    budgets: Vec<f64>,
}

impl ConsumerDataset {
    /// Budgets default to the expenditure `p_t·x_t` when not supplied.
    pub fn new(
        prices: Vec<Vec<f64>>,
        responses: Vec<Vec<f64>>,
        budgets: Option<Vec<f64>>,
    ) -> Result<Self, RpError> {
        if prices.is_empty() {
            return Err(RpError::EmptyDataset);
        }
        if prices.len() != responses.len() {
            return Err(RpError::DimensionMismatch(format!(
                "{} price rows vs {} response rows",
                prices.len(),
                responses.len()
            )));
        }
        let m = prices[0].len();
        for (t, (p, x)) in prices.iter().zip(&responses).enumerate() {
            if p.len() != m || x.len() != m {
                return Err(RpError::DimensionMismatch(format!(
                    "observation {t} has inconsistent width"
                )));
            }
            for (good, &v) in p.iter().enumerate() {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(RpError::NonPositivePrice { t, good });
                }
            }
            for (good, &v) in x.iter().enumerate() {
                if v < 0.0 || !v.is_finite() {
                    return Err(RpError::NegativeResponse { t, agent: 0, good });
                }
            }
        }
        let budgets = match budgets {
            Some(b) => {
                if b.len() != prices.len() {
                    return Err(RpError::DimensionMismatch(format!(
                        "{} budgets vs {} observations",
                        b.len(),
                        prices.len()
                    )));
                }
                b
            }
            None => prices
                .iter()
                .zip(&responses)
                .map(|(p, x)| dot(p, x))
                .collect(),
        };
        Ok(Self {
            prices,
            responses,
            budgets,
        })
    }

    pub fn observations(&self) -> usize {
        self.prices.len()
    }

    pub fn goods(&self) -> usize {
        self.prices[0].len()
    }

    pub fn price(&self, t: usize) -> &[f64] {
        &self.prices[t]
    }

    pub fn response(&self, t: usize) -> &[f64] {
        &self.responses[t]
    }

    pub fn budget(&self, t: usize) -> f64 {
        self.budgets[t]
    }
}

/// Time series of external influences and the joint responses of `n` agents.
#[derive(Debug, Clone)]
pub struct MultiAgentDataset {
    prices: Vec<Vec<f64>>,
    /// `responses[t][agent][good]`
    responses: Vec<Vec<Vec<f64>>>,
    /// `budgets[t][agent]`
    budgets: Vec<Vec<f64>>,
}

impl MultiAgentDataset {
    pub fn new(
        prices: Vec<Vec<f64>>,
        responses: Vec<Vec<Vec<f64>>>,
        budgets: Option<Vec<Vec<f64>>>,
    ) -> Result<Self, RpError> {
        if prices.is_empty() || responses.is_empty() {
            return Err(RpError::EmptyDataset);
        }
        if prices.len() != responses.len() {
            return Err(RpError::DimensionMismatch(format!(
                "{} price rows vs {} response rows",
                prices.len(),
                responses.len()
            )));
        }
        let m = prices[0].len();
        let n = responses[0].len();
        if n == 0 {
            return Err(RpError::EmptyDataset);
        }
        for (t, (p, xs)) in prices.iter().zip(&responses).enumerate() {
            if p.len() != m || xs.len() != n {
                return Err(RpError::DimensionMismatch(format!(
                    "observation {t} has inconsistent width"
                )));
            }
            for (good, &v) in p.iter().enumerate() {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(RpError::NonPositivePrice { t, good });
                }
            }
            for (agent, x) in xs.iter().enumerate() {
                if x.len() != m {
                    return Err(RpError::DimensionMismatch(format!(
                        "observation {t}, agent {agent} has inconsistent width"
                    )));
                }
                for (good, &v) in x.iter().enumerate() {
                    if v < 0.0 || !v.is_finite() {
                        return Err(RpError::NegativeResponse { t, agent, good });
                    }
                }
            }
        }
        let budgets = match budgets {
            Some(b) => {
                if b.len() != prices.len() || b.iter().any(|row| row.len() != n) {
                    return Err(RpError::DimensionMismatch(
                        "budget table shape mismatch".into(),
                    ));
                }
                b
            }
            None => prices
                .iter()
                .zip(&responses)
                .map(|(p, xs)| xs.iter().map(|x| dot(p, x)).collect())
                .collect(),
        };
        Ok(Self {
            prices,
            responses,
            budgets,
        })
    }

    pub fn from_single(data: &ConsumerDataset) -> Self {
        Self {
            prices: data.prices.clone(),
            responses: data.responses.iter().map(|x| vec![x.clone()]).collect(),
            budgets: data.budgets.iter().map(|&b| vec![b]).collect(),
        }
    }

    pub fn observations(&self) -> usize {
        self.prices.len()
    }

    pub fn goods(&self) -> usize {
        self.prices[0].len()
    }

    pub fn agents(&self) -> usize {
        self.responses[0].len()
    }

    pub fn price(&self, t: usize) -> &[f64] {
        &self.prices[t]
    }

    pub fn response(&self, t: usize, agent: usize) -> &[f64] {
        &self.responses[t][agent]
    }

    pub fn budget(&self, t: usize, agent: usize) -> f64 {
        self.budgets[t][agent]
    }

    /// The single-agent dataset seen by agent `i`.
    pub fn agent_slice(&self, agent: usize) -> ConsumerDataset {
        ConsumerDataset {
            prices: self.prices.clone(),
            responses: self.responses.iter().map(|xs| xs[agent].clone()).collect(),
            budgets: self.budgets.iter().map(|b| b[agent]).collect(),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// GARP
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum GarpResult {
    Consistent,
    /// Observation indices forming a revealed-preference cycle whose closing
    /// step is strict.
    Violation { cycle: Vec<usize> },
}

/// Checks the generalized axiom of revealed preference.
///
/// Builds the direct relation `t R⁰ τ` iff `p_t·x_t >= p_t·x_τ` (within a
/// relative tolerance of `1e-9·(1+|p_t·x_t|)`), closes it with Warshall's
/// algorithm, and reports a violation when `t R τ` while `τ` strictly
/// reveals `x_τ` over `x_t`. The witness is a shortest violating cycle.
pub fn garp_check(data: &ConsumerDataset) -> Result<GarpResult, RpError> {
    let t_count = data.observations();
    let mut expenditure = vec![vec![0.0; t_count]; t_count];
    for t in 0..t_count {
        for tau in 0..t_count {
            expenditure[t][tau] = dot(data.price(t), data.response(tau));
        }
    }
    let tol: Vec<f64> = (0..t_count)
        .map(|t| 1e-9 * (1.0 + expenditure[t][t].abs()))
        .collect();

    let mut direct = vec![vec![false; t_count]; t_count];
    for t in 0..t_count {
        for tau in 0..t_count {
            if t != tau && expenditure[t][t] >= expenditure[t][tau] - tol[t] {
                direct[t][tau] = true;
            }
        }
    }
    let mut reach = direct.clone();
    for k in 0..t_count {
        for i in 0..t_count {
            if reach[i][k] {
                for j in 0..t_count {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }

    // All violating pairs, then the one with the shortest direct-relation
    // path to keep the witness small.
    let mut best: Option<Vec<usize>> = None;
    for t in 0..t_count {
        for tau in 0..t_count {
            if t == tau || !reach[t][tau] {
                continue;
            }
            let strict = expenditure[tau][tau] > expenditure[tau][t] + tol[tau];
            if !strict {
                continue;
            }
            if let Some(path) = shortest_path(&direct, t, tau) {
                if best.as_ref().map_or(true, |b| path.len() < b.len()) {
                    best = Some(path);
                }
            }
        }
    }
    Ok(match best {
        Some(cycle) => GarpResult::Violation { cycle },
        None => GarpResult::Consistent,
    })
}

fn shortest_path(direct: &[Vec<bool>], from: usize, to: usize) -> Option<Vec<usize>> {
    let n = direct.len();
    let mut prev = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([from]);
    let mut seen = vec![false; n];
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for v in 0..n {
            if direct[u][v] && !seen[v] {
                seen[v] = true;
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Afriat inequalities (single agent)
// ---------------------------------------------------------------------------

/// Utility levels and positive multipliers witnessing rationalizability.
#[derive(Debug, Clone)]
pub struct AfriatCertificate {
    pub utilities: Vec<f64>,
    pub multipliers: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum AfriatOutcome {
    Rationalizable(AfriatCertificate),
    /// Infeasible system; the witness is a GARP-violating cycle when the
    /// combinatorial route finds one.
    Irrational { cycle: Option<Vec<usize>> },
}

/// Strict positivity surrogate for the multipliers: the inequalities are
/// homogeneous in `(u, λ)`, so any solution scales to clear this floor.
pub const DEFAULT_EPSILON_LAMBDA: f64 = 1e-6;

/// Solves the Afriat feasibility system
/// `u_τ − u_t − λ_t·p_t·(x_τ − x_t) <= 0`, `λ_t >= eps_lambda`.
pub fn afriat_feasible(
    data: &ConsumerDataset,
    eps_lambda: f64,
) -> Result<AfriatOutcome, RpError> {
    let t_count = data.observations();
    let lp = afriat_lp(data, eps_lambda);
    match lp::feasible(&lp)? {
        Feasibility::Feasible { x } => Ok(AfriatOutcome::Rationalizable(AfriatCertificate {
            utilities: x[..t_count].to_vec(),
            multipliers: x[t_count..].to_vec(),
        })),
        Feasibility::Infeasible { .. } => {
            let cycle = match garp_check(data)? {
                GarpResult::Violation { cycle } => Some(cycle),
                GarpResult::Consistent => None,
            };
            Ok(AfriatOutcome::Irrational { cycle })
        }
    }
}

fn afriat_lp(data: &ConsumerDataset, eps_lambda: f64) -> LinearProgram {
    let t_count = data.observations();
    let nvars = 2 * t_count; // u's then λ's
    let mut constraints = Vec::with_capacity(t_count * (t_count - 1));
    for t in 0..t_count {
        let pt_xt = dot(data.price(t), data.response(t));
        for tau in 0..t_count {
            if t == tau {
                continue;
            }
            let mut coeffs = vec![0.0; nvars];
            coeffs[tau] += 1.0;
            coeffs[t] -= 1.0;
            coeffs[t_count + t] = -(dot(data.price(t), data.response(tau)) - pt_xt);
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
    }
    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); t_count];
    bounds.extend(std::iter::repeat((eps_lambda, f64::INFINITY)).take(t_count));
    LinearProgram {
        maximize: vec![0.0; nvars],
        constraints,
        bounds,
    }
}

/// Re-checks a certificate against every Afriat inequality within `tol`.
pub fn check_afriat_certificate(
    data: &ConsumerDataset,
    cert: &AfriatCertificate,
    tol: f64,
) -> bool {
    let t_count = data.observations();
    if cert.utilities.len() != t_count || cert.multipliers.len() != t_count {
        return false;
    }
    if cert.multipliers.iter().any(|&l| !(l > 0.0)) {
        return false;
    }
    for t in 0..t_count {
        let pt_xt = dot(data.price(t), data.response(t));
        for tau in 0..t_count {
            let gap = cert.utilities[tau]
                - cert.utilities[t]
                - cert.multipliers[t] * (dot(data.price(t), data.response(tau)) - pt_xt);
            if gap > tol {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Utility reconstruction
// ---------------------------------------------------------------------------

/// Piecewise-linear concave utility `u(x) = min_t { u_t + λ_t·p_t·(x − x_t) }`.
#[derive(Debug, Clone)]
pub struct UtilityFunction {
    /// Per observation: `(level, multiplier, price, response)`.
    planes: Vec<(f64, f64, Vec<f64>, Vec<f64>)>,
}

pub fn build_utility(cert: &AfriatCertificate, data: &ConsumerDataset) -> UtilityFunction {
    UtilityFunction {
        planes: (0..data.observations())
            .map(|t| {
                (
                    cert.utilities[t],
                    cert.multipliers[t],
                    data.price(t).to_vec(),
                    data.response(t).to_vec(),
                )
            })
            .collect(),
    }
}

impl UtilityFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.planes
            .iter()
            .map(|(u, l, p, xt)| u + l * (dot(p, x) - dot(p, xt)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn hyperplanes(&self) -> &[(f64, f64, Vec<f64>, Vec<f64>)] {
        &self.planes
    }

    /// Marginal rate of substitution between `goods.0` and `goods.1` at `x`:
    /// the gradient ratio of the active hyperplane. At a kink the gradients
    /// of all active planes are averaged and `unique` is false.
    pub fn mrs(&self, x: &[f64], goods: (usize, usize)) -> MrsResult {
        let values: Vec<f64> = self
            .planes
            .iter()
            .map(|(u, l, p, xt)| u + l * (dot(p, x) - dot(p, xt)))
            .collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * (1.0 + min.abs());
        let active: Vec<usize> = (0..values.len())
            .filter(|&t| values[t] <= min + tol)
            .collect();
        let g1: f64 = active
            .iter()
            .map(|&t| self.planes[t].1 * self.planes[t].2[goods.0])
            .sum::<f64>()
            / active.len() as f64;
        let g2: f64 = active
            .iter()
            .map(|&t| self.planes[t].1 * self.planes[t].2[goods.1])
            .sum::<f64>()
            / active.len() as f64;
        MrsResult {
            ratio: g1 / g2,
            unique: active.len() == 1,
        }
    }
}

/// Gradient ratio at a point of a reconstructed utility or potential.
#[derive(Debug, Clone, Copy)]
pub struct MrsResult {
    pub ratio: f64,
    /// False when several hyperplanes are active (a kink); the ratio then
    /// averages the active gradients.
    pub unique: bool,
}

// ---------------------------------------------------------------------------
// Multiagent: Nash rationality, potential, prediction
// ---------------------------------------------------------------------------

/// Potential levels `v_t` and per-agent multipliers `λ_t^i > 0`.
#[derive(Debug, Clone)]
pub struct PotentialCertificate {
    pub values: Vec<f64>,
    /// `multipliers[t][agent]`
    pub multipliers: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum NashOutcome {
    Rationalizable(PotentialCertificate),
    /// Infeasible; when some agent's own slice already violates GARP that
    /// witness is attached (per-slice consistency is necessary).
    Irrational {
        agent_cycle: Option<(usize, Vec<usize>)>,
    },
}

/// Solves the multiagent feasibility system
/// `v_τ − v_t − Σ_i λ_t^i·p_t·(x_τ^i − x_t^i) <= 0`, `λ_t^i >= eps_lambda`.
///
/// With a single agent this is exactly the Afriat system.
pub fn nash_rationality_test(
    data: &MultiAgentDataset,
    eps_lambda: f64,
) -> Result<NashOutcome, RpError> {
    let t_count = data.observations();
    let n = data.agents();
    let nvars = t_count + t_count * n; // v's then λ's grouped by observation
    let mut constraints = Vec::with_capacity(t_count * (t_count - 1));
    for t in 0..t_count {
        for tau in 0..t_count {
            if t == tau {
                continue;
            }
            let mut coeffs = vec![0.0; nvars];
            coeffs[tau] += 1.0;
            coeffs[t] -= 1.0;
            for i in 0..n {
                let delta = dot(data.price(t), data.response(tau, i))
                    - dot(data.price(t), data.response(t, i));
                coeffs[t_count + t * n + i] = -delta;
            }
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
    }
    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); t_count];
    bounds.extend(std::iter::repeat((eps_lambda, f64::INFINITY)).take(t_count * n));
    let lp = LinearProgram {
        maximize: vec![0.0; nvars],
        constraints,
        bounds,
    };
    match lp::feasible(&lp)? {
        Feasibility::Feasible { x } => {
            let values = x[..t_count].to_vec();
            let multipliers = (0..t_count)
                .map(|t| x[t_count + t * n..t_count + (t + 1) * n].to_vec())
                .collect();
            Ok(NashOutcome::Rationalizable(PotentialCertificate {
                values,
                multipliers,
            }))
        }
        Feasibility::Infeasible { .. } => {
            let mut agent_cycle = None;
            for i in 0..n {
                if let GarpResult::Violation { cycle } = garp_check(&data.agent_slice(i))? {
                    agent_cycle = Some((i, cycle));
                    break;
                }
            }
            Ok(NashOutcome::Irrational { agent_cycle })
        }
    }
}

/// Re-checks a potential certificate against every inequality within `tol`.
pub fn check_potential_certificate(
    data: &MultiAgentDataset,
    cert: &PotentialCertificate,
    tol: f64,
) -> bool {
    let t_count = data.observations();
    let n = data.agents();
    if cert.values.len() != t_count || cert.multipliers.len() != t_count {
        return false;
    }
    if cert
        .multipliers
        .iter()
        .any(|row| row.len() != n || row.iter().any(|&l| !(l > 0.0)))
    {
        return false;
    }
    for t in 0..t_count {
        for tau in 0..t_count {
            let mut gap = cert.values[tau] - cert.values[t];
            for i in 0..n {
                gap -= cert.multipliers[t][i]
                    * (dot(data.price(t), data.response(tau, i))
                        - dot(data.price(t), data.response(t, i)));
            }
            if gap > tol {
                return false;
            }
        }
    }
    true
}

/// Piecewise-linear concave potential over the stacked response space:
/// `V(x¹..xⁿ) = min_t { v_t + Σ_i λ_t^i·p_t·(x^i − x_t^i) }`.
#[derive(Debug, Clone)]
pub struct PotentialFunction {
    values: Vec<f64>,
    multipliers: Vec<Vec<f64>>,
    prices: Vec<Vec<f64>>,
    responses: Vec<Vec<Vec<f64>>>,
}

pub fn build_potential(
    cert: &PotentialCertificate,
    data: &MultiAgentDataset,
) -> PotentialFunction {
    PotentialFunction {
        values: cert.values.clone(),
        multipliers: cert.multipliers.clone(),
        prices: data.prices.clone(),
        responses: data.responses.clone(),
    }
}

impl PotentialFunction {
    pub fn agents(&self) -> usize {
        self.multipliers[0].len()
    }

    fn plane_value(&self, t: usize, xs: &[Vec<f64>]) -> f64 {
        let mut v = self.values[t];
        for (i, x) in xs.iter().enumerate() {
            v += self.multipliers[t][i]
                * (dot(&self.prices[t], x) - dot(&self.prices[t], &self.responses[t][i]));
        }
        v
    }

    pub fn eval(&self, xs: &[Vec<f64>]) -> f64 {
        (0..self.values.len())
            .map(|t| self.plane_value(t, xs))
            .fold(f64::INFINITY, f64::min)
    }

    /// Marginal rate of substitution for `agent` between `goods.0` and
    /// `goods.1` at the joint point `xs`.
    pub fn mrs(&self, xs: &[Vec<f64>], agent: usize, goods: (usize, usize)) -> MrsResult {
        let values: Vec<f64> = (0..self.values.len())
            .map(|t| self.plane_value(t, xs))
            .collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * (1.0 + min.abs());
        let active: Vec<usize> = (0..values.len())
            .filter(|&t| values[t] <= min + tol)
            .collect();
        let g1: f64 = active
            .iter()
            .map(|&t| self.multipliers[t][agent] * self.prices[t][goods.0])
            .sum::<f64>()
            / active.len() as f64;
        let g2: f64 = active
            .iter()
            .map(|&t| self.multipliers[t][agent] * self.prices[t][goods.1])
            .sum::<f64>()
            / active.len() as f64;
        MrsResult {
            ratio: g1 / g2,
            unique: active.len() == 1,
        }
    }
}

/// Predicted joint response and the attained potential level.
#[derive(Debug, Clone)]
pub struct Prediction {
    /// `responses[agent][good]`
    pub responses: Vec<Vec<f64>>,
    pub value: f64,
}

/// Predicts the joint response to a new probe by maximizing the
/// reconstructed potential over the per-agent budget sets:
/// `max z` s.t. `z <= v_t + Σ_i λ_t^i·p_t·(x̂^i − x_t^i)` for every `t` and
/// `p_probe·x̂^i <= budget_i`, `x̂ >= 0`.
pub fn predict_response(
    cert: &PotentialCertificate,
    data: &MultiAgentDataset,
    probe: &[f64],
    budgets: &[f64],
) -> Result<Prediction, RpError> {
    let t_count = data.observations();
    let n = data.agents();
    let m = data.goods();
    if probe.len() != m {
        return Err(RpError::DimensionMismatch(format!(
            "probe has {} goods, dataset has {m}",
            probe.len()
        )));
    }
    if budgets.len() != n {
        return Err(RpError::DimensionMismatch(format!(
            "{} budgets for {n} agents",
            budgets.len()
        )));
    }
    for (good, &v) in probe.iter().enumerate() {
        if !(v > 0.0) {
            return Err(RpError::NonPositivePrice { t: 0, good });
        }
    }
    if let Some(agent) = budgets.iter().position(|&b| b < 0.0) {
        return Err(RpError::InfeasibleBudget { agent });
    }

    // Variables: z, then x̂ grouped by agent.
    let nvars = 1 + n * m;
    let mut constraints = Vec::with_capacity(t_count + n);
    for t in 0..t_count {
        let mut coeffs = vec![0.0; nvars];
        coeffs[0] = 1.0;
        let mut rhs = cert.values[t];
        for i in 0..n {
            let lam = cert.multipliers[t][i];
            for j in 0..m {
                coeffs[1 + i * m + j] -= lam * data.price(t)[j];
            }
            rhs -= lam * dot(data.price(t), data.response(t, i));
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        });
    }
    for i in 0..n {
        let mut coeffs = vec![0.0; nvars];
        for j in 0..m {
            coeffs[1 + i * m + j] = probe[j];
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: budgets[i],
        });
    }
    let mut maximize = vec![0.0; nvars];
    maximize[0] = 1.0;
    let mut bounds = vec![(0.0, f64::INFINITY); nvars];
    bounds[0] = (f64::NEG_INFINITY, f64::INFINITY);
    let lp = LinearProgram {
        maximize,
        constraints,
        bounds,
    };
    match lp::solve(&lp)? {
        LpOutcome::Optimal { x, value, .. } => {
            let responses = (0..n)
                .map(|i| x[1 + i * m..1 + (i + 1) * m].to_vec())
                .collect();
            Ok(Prediction { responses, value })
        }
        LpOutcome::Unbounded { .. } => {
            debug_assert!(false, "positive multipliers and prices bound the program");
            Err(RpError::UnboundedPrediction)
        }
        LpOutcome::Infeasible { .. } => {
            Err(RpError::InfeasibleBudget { agent: 0 })
        }
    }
}

// ---------------------------------------------------------------------------
// Synthetic data generators
// ---------------------------------------------------------------------------

/// Generators for maximizer-consistent and random datasets, used by tests
/// and by the shipped fixture files.
pub mod synth {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    /// Log-linear preference weights for one agent (sum to 1).
    fn weights(goods: usize, rng: &mut impl Rng) -> Vec<f64> {
        let raw: Vec<f64> = (0..goods).map(|_| rng.gen_range(0.2..1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / s).collect()
    }

    /// The demand of a log-linear (Cobb-Douglas) maximizer: spend the share
    /// `alpha_j` of the budget on good `j`.
    pub fn cobb_douglas_demand(alphas: &[f64], price: &[f64], budget: f64) -> Vec<f64> {
        alphas
            .iter()
            .zip(price)
            .map(|(&a, &p)| a * budget / p)
            .collect()
    }

    /// Dataset generated by one Cobb-Douglas maximizer under random prices
    /// and budgets; passes GARP by construction.
    pub fn cobb_douglas_dataset(
        observations: usize,
        goods: usize,
        seed: u64,
    ) -> (ConsumerDataset, Vec<f64>) {
        let mut rng = rng_from_seed(seed);
        let alphas = weights(goods, &mut rng);
        let mut prices = Vec::with_capacity(observations);
        let mut responses = Vec::with_capacity(observations);
        for _ in 0..observations {
            let p: Vec<f64> = (0..goods).map(|_| rng.gen_range(1.0..2.0)).collect();
            let budget = rng.gen_range(1.0..2.0);
            responses.push(cobb_douglas_demand(&alphas, &p, budget));
            prices.push(p);
        }
        (
            ConsumerDataset::new(prices, responses, None).expect("generator output is valid"),
            alphas,
        )
    }

    /// Separable concave potential `V(x¹..xⁿ) = Σ_i Σ_j α^i_j ln x^i_j`.
    /// Maximizing it over per-agent budget sets decouples into per-agent
    /// log-linear demands, so equilibria are exact and in closed form.
    #[derive(Debug, Clone)]
    pub struct LogPotential {
        pub alphas: Vec<Vec<f64>>,
    }

    impl LogPotential {
        pub fn eval(&self, xs: &[Vec<f64>]) -> f64 {
            self.alphas
                .iter()
                .zip(xs)
                .map(|(a, x)| a.iter().zip(x).map(|(&ai, &xi)| ai * xi.ln()).sum::<f64>())
                .sum()
        }

        /// The unique joint maximizer over `p·x^i <= budget_i`, `x >= 0`.
        pub fn equilibrium(&self, price: &[f64], budgets: &[f64]) -> Vec<Vec<f64>> {
            self.alphas
                .iter()
                .zip(budgets)
                .map(|(a, &b)| cobb_douglas_demand(a, price, b))
                .collect()
        }
    }

    /// Joint responses generated by Nash play of a concave potential game.
    pub fn potential_game_dataset(
        observations: usize,
        agents: usize,
        goods: usize,
        seed: u64,
    ) -> (MultiAgentDataset, LogPotential) {
        let mut rng = rng_from_seed(seed);
        let potential = LogPotential {
            alphas: (0..agents).map(|_| weights(goods, &mut rng)).collect(),
        };
        let mut prices = Vec::with_capacity(observations);
        let mut responses = Vec::with_capacity(observations);
        let mut budgets = Vec::with_capacity(observations);
        for _ in 0..observations {
            let p: Vec<f64> = (0..goods).map(|_| rng.gen_range(1.0..2.0)).collect();
            let b: Vec<f64> = (0..agents).map(|_| rng.gen_range(1.0..2.0)).collect();
            responses.push(potential.equilibrium(&p, &b));
            prices.push(p);
            budgets.push(b);
        }
        (
            MultiAgentDataset::new(prices, responses, Some(budgets))
                .expect("generator output is valid"),
            potential,
        )
    }

    /// Unstructured random dataset; usually violates GARP once it is long
    /// enough.
    pub fn random_dataset(observations: usize, goods: usize, seed: u64) -> ConsumerDataset {
        let mut rng = rng_from_seed(seed);
        let mut prices = Vec::with_capacity(observations);
        let mut responses = Vec::with_capacity(observations);
        for _ in 0..observations {
            prices.push((0..goods).map(|_| rng.gen_range(0.5..2.5)).collect());
            responses.push((0..goods).map(|_| rng.gen_range(0.1..2.0)).collect());
        }
        ConsumerDataset::new(prices, responses, None).expect("generator output is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_observation_passes() {
        let data =
            ConsumerDataset::new(vec![vec![1.0, 2.0]], vec![vec![1.0, 0.5]], None).unwrap();
        assert_eq!(garp_check(&data).unwrap(), GarpResult::Consistent);
        match afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            AfriatOutcome::Rationalizable(cert) => {
                assert!(check_afriat_certificate(&data, &cert, 1e-8));
            }
            _ => panic!("single observation must be rationalizable"),
        }
    }

    #[test]
    fn symmetric_budgets_pass() {
        let data = ConsumerDataset::new(
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            None,
        )
        .unwrap();
        assert_eq!(garp_check(&data).unwrap(), GarpResult::Consistent);
    }

    #[test]
    fn constructed_warp_violation_fails_with_two_cycle() {
        // p_0·x_0 = 4 > p_0·x_1 = 2 and p_1·x_1 = 4 > p_1·x_0 = 2: each
        // bundle is strictly cheaper at the other's prices, a 2-cycle with
        // both steps strict.
        let data = ConsumerDataset::new(
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
            None,
        )
        .unwrap();
        match garp_check(&data).unwrap() {
            GarpResult::Violation { cycle } => assert_eq!(cycle.len(), 2),
            GarpResult::Consistent => panic!("expected a WARP violation"),
        }
        match afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            AfriatOutcome::Irrational { cycle } => assert!(cycle.is_some()),
            _ => panic!("violating dataset must be infeasible"),
        }
    }

    #[test]
    fn cobb_douglas_data_is_rationalizable() {
        for seed in 0..10 {
            let (data, _) = synth::cobb_douglas_dataset(12, 3, seed);
            assert_eq!(garp_check(&data).unwrap(), GarpResult::Consistent);
            match afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
                AfriatOutcome::Rationalizable(cert) => {
                    assert!(check_afriat_certificate(&data, &cert, 1e-8));
                }
                _ => panic!("maximizer data must be rationalizable (seed {seed})"),
            }
        }
    }

    #[test]
    fn garp_and_afriat_agree_on_mixed_data() {
        for seed in 0..60 {
            let data = if seed % 2 == 0 {
                synth::cobb_douglas_dataset(8, 2, seed).0
            } else {
                synth::random_dataset(8, 2, seed)
            };
            let garp_ok = matches!(garp_check(&data).unwrap(), GarpResult::Consistent);
            let lp_ok = matches!(
                afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap(),
                AfriatOutcome::Rationalizable(_)
            );
            assert_eq!(garp_ok, lp_ok, "routes disagree on seed {seed}");
        }
    }

    #[test]
    fn utility_matches_levels_at_observations() {
        let (data, _) = synth::cobb_douglas_dataset(10, 2, 42);
        let cert = match afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            AfriatOutcome::Rationalizable(c) => c,
            _ => unreachable!(),
        };
        let u = build_utility(&cert, &data);
        for t in 0..data.observations() {
            let v = u.eval(data.response(t));
            assert!(
                (v - cert.utilities[t]).abs() <= 1e-8 * (1.0 + cert.utilities[t].abs()),
                "u(x_{t}) = {v} vs level {}",
                cert.utilities[t]
            );
        }
    }

    #[test]
    fn utility_is_monotone_and_concave() {
        use rand::Rng;
        let (data, _) = synth::cobb_douglas_dataset(10, 2, 43);
        let cert = match afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            AfriatOutcome::Rationalizable(c) => c,
            _ => unreachable!(),
        };
        let u = build_utility(&cert, &data);
        let mut rng = crate::rng::rng_from_seed(44);
        for _ in 0..200 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..2.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..2.0)).collect();
            let bumped: Vec<f64> = x.iter().map(|v| v + 0.1).collect();
            assert!(u.eval(&bumped) > u.eval(&x), "monotonicity failed");
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
            assert!(
                u.eval(&mid) >= 0.5 * (u.eval(&x) + u.eval(&y)) - 1e-12,
                "midpoint concavity failed"
            );
        }
    }

    #[test]
    fn rationalization_on_budget_grid() {
        let (data, _) = synth::cobb_douglas_dataset(8, 2, 45);
        let cert = match afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            AfriatOutcome::Rationalizable(c) => c,
            _ => unreachable!(),
        };
        let u = build_utility(&cert, &data);
        let grid = 60usize;
        for t in 0..data.observations() {
            let budget = data.budget(t);
            let p = data.price(t);
            let observed = u.eval(data.response(t));
            let mut best = f64::NEG_INFINITY;
            for i in 0..=grid {
                let x0 = budget / p[0] * i as f64 / grid as f64;
                let rem = budget - x0 * p[0];
                let x1 = (rem / p[1]).max(0.0);
                best = best.max(u.eval(&[x0, x1]));
            }
            // Grid resolution slack: one cell along the budget line.
            let gap = best - observed;
            let slack = 2.0 * cert.multipliers[t] * budget / grid as f64;
            assert!(
                gap <= slack + 1e-9,
                "observed bundle misses the grid max by {gap} (> {slack})"
            );
        }
    }

    #[test]
    fn nash_single_agent_reduces_to_afriat() {
        for seed in 0..40 {
            let data = if seed % 2 == 0 {
                synth::cobb_douglas_dataset(7, 2, 100 + seed).0
            } else {
                synth::random_dataset(7, 2, 100 + seed)
            };
            let multi = MultiAgentDataset::from_single(&data);
            let afriat_ok = matches!(
                afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap(),
                AfriatOutcome::Rationalizable(_)
            );
            let nash_ok = matches!(
                nash_rationality_test(&multi, DEFAULT_EPSILON_LAMBDA).unwrap(),
                NashOutcome::Rationalizable(_)
            );
            assert_eq!(afriat_ok, nash_ok, "reduction mismatch on seed {seed}");
        }
    }

    #[test]
    fn potential_game_data_is_nash_rationalizable() {
        let (data, _) = synth::potential_game_dataset(12, 2, 2, 7);
        match nash_rationality_test(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            NashOutcome::Rationalizable(cert) => {
                assert!(check_potential_certificate(&data, &cert, 1e-8));
            }
            _ => panic!("potential-game data must pass"),
        }
    }

    #[test]
    fn per_agent_garp_violation_blocks_nash() {
        // Agent 0 plays maximizer data, agent 1 plays a hard WARP violation.
        let (good, _) = synth::cobb_douglas_dataset(2, 2, 8);
        let prices = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        let bad = [vec![0.0, 2.0], vec![2.0, 0.0]];
        let responses: Vec<Vec<Vec<f64>>> = (0..2)
            .map(|t| vec![good.response(t).to_vec(), bad[t].clone()])
            .collect();
        let data = MultiAgentDataset::new(prices, responses, None).unwrap();
        match nash_rationality_test(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            NashOutcome::Irrational { agent_cycle } => {
                let (agent, cycle) = agent_cycle.expect("slice violation must be reported");
                assert_eq!(agent, 1);
                assert_eq!(cycle.len(), 2);
            }
            _ => panic!("per-agent GARP violation must make the system infeasible"),
        }
    }

    #[test]
    fn potential_levels_reproduce_generator_order_with_nested_budgets() {
        // Fixed prices and varying budgets make every pair of joint
        // responses revealed-comparable, forcing the certificate levels into
        // the generator's strict order.
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(9);
        let potential = synth::LogPotential {
            alphas: vec![vec![0.5, 0.5], vec![0.3, 0.7]],
        };
        let price = vec![1.2, 1.7];
        let mut budgets: Vec<Vec<f64>> = Vec::new();
        let mut prices = Vec::new();
        let mut responses = Vec::new();
        for _ in 0..10 {
            let scale: f64 = rng.gen_range(0.5..3.0);
            let b = vec![scale, 1.3 * scale];
            responses.push(potential.equilibrium(&price, &b));
            budgets.push(b);
            prices.push(price.clone());
        }
        let data = MultiAgentDataset::new(prices, responses.clone(), Some(budgets)).unwrap();
        let cert = match nash_rationality_test(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            NashOutcome::Rationalizable(c) => c,
            _ => panic!("nested-budget data must pass"),
        };
        let truth: Vec<f64> = responses.iter().map(|xs| potential.eval(xs)).collect();
        // Exact rank agreement.
        let mut order_cert: Vec<usize> = (0..truth.len()).collect();
        order_cert.sort_by(|&a, &b| cert.values[a].total_cmp(&cert.values[b]));
        let mut order_true: Vec<usize> = (0..truth.len()).collect();
        order_true.sort_by(|&a, &b| truth[a].total_cmp(&truth[b]));
        assert_eq!(order_cert, order_true, "orderings disagree");
    }

    #[test]
    fn prediction_at_observed_probe_attains_the_level() {
        let (data, _) = synth::potential_game_dataset(10, 2, 2, 11);
        let cert = match nash_rationality_test(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            NashOutcome::Rationalizable(c) => c,
            _ => unreachable!(),
        };
        for t in 0..3 {
            let budgets: Vec<f64> = (0..2).map(|i| data.budget(t, i)).collect();
            let pred = predict_response(&cert, &data, data.price(t), &budgets).unwrap();
            // The observed joint response is feasible, so the optimum is at
            // least the certificate level there.
            assert!(
                pred.value >= cert.values[t] - 1e-7 * (1.0 + cert.values[t].abs()),
                "prediction value {} below observed level {}",
                pred.value,
                cert.values[t]
            );
        }
    }

    #[test]
    fn single_plane_prediction_saturates_budget() {
        let (data, _) = synth::potential_game_dataset(1, 2, 2, 13);
        let cert = match nash_rationality_test(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            NashOutcome::Rationalizable(c) => c,
            _ => unreachable!(),
        };
        let probe = vec![1.5, 1.1];
        let budgets = vec![1.0, 2.0];
        let pred = predict_response(&cert, &data, &probe, &budgets).unwrap();
        for (i, x) in pred.responses.iter().enumerate() {
            let spend = dot(&probe, x);
            assert!(
                (spend - budgets[i]).abs() < 1e-7,
                "agent {i} spends {spend} of {}",
                budgets[i]
            );
        }
    }

    #[test]
    fn mrs_single_observation_is_price_ratio() {
        let data = ConsumerDataset::new(vec![vec![3.0, 2.0]], vec![vec![1.0, 1.0]], None).unwrap();
        let cert = match afriat_feasible(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            AfriatOutcome::Rationalizable(c) => c,
            _ => unreachable!(),
        };
        let u = build_utility(&cert, &data);
        for point in [vec![0.5, 0.5], vec![2.0, 0.1], vec![5.0, 5.0]] {
            let mrs = u.mrs(&point, (0, 1));
            assert!(mrs.unique);
            assert!((mrs.ratio - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mrs_exceeds_one_when_first_good_pricier_and_scales_cancel() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(17);
        let potential = synth::LogPotential {
            alphas: vec![vec![0.6, 0.4], vec![0.5, 0.5]],
        };
        let mut prices = Vec::new();
        let mut responses = Vec::new();
        let mut budgets = Vec::new();
        for _ in 0..8 {
            let p = vec![rng.gen_range(1.5..2.0), rng.gen_range(0.8..1.0)];
            let b = vec![rng.gen_range(1.0..2.0), rng.gen_range(1.0..2.0)];
            responses.push(potential.equilibrium(&p, &b));
            prices.push(p);
            budgets.push(b);
        }
        let data =
            MultiAgentDataset::new(prices.clone(), responses.clone(), Some(budgets.clone()))
                .unwrap();
        let cert = match nash_rationality_test(&data, DEFAULT_EPSILON_LAMBDA).unwrap() {
            NashOutcome::Rationalizable(c) => c,
            _ => unreachable!(),
        };
        let v = build_potential(&cert, &data);
        for t in 0..data.observations() {
            let point: Vec<Vec<f64>> = (0..2).map(|i| data.response(t, i).to_vec()).collect();
            let mrs = v.mrs(&point, 0, (0, 1));
            assert!(mrs.ratio > 1.0, "MRS {} not > 1", mrs.ratio);
        }

        // Scaling all prices (and budgets, to keep demands fixed) leaves the
        // marginal rate of substitution unchanged.
        let kappa = 3.7;
        let scaled = MultiAgentDataset::new(
            prices
                .iter()
                .map(|p| p.iter().map(|v| v * kappa).collect())
                .collect(),
            responses.clone(),
            Some(
                budgets
                    .iter()
                    .map(|b| b.iter().map(|v| v * kappa).collect())
                    .collect(),
            ),
        )
        .unwrap();
        let cert2 = match nash_rationality_test(&scaled, DEFAULT_EPSILON_LAMBDA).unwrap() {
            NashOutcome::Rationalizable(c) => c,
            _ => unreachable!(),
        };
        let v2 = build_potential(&cert2, &scaled);
        for t in 0..scaled.observations() {
            let point: Vec<Vec<f64>> = (0..2).map(|i| scaled.response(t, i).to_vec()).collect();
            let a = v.mrs(&point, 0, (0, 1));
            let b = v2.mrs(&point, 0, (0, 1));
            assert!(
                (a.ratio - b.ratio).abs() < 1e-6 * (1.0 + a.ratio.abs()),
                "MRS changed under price scaling: {} vs {}",
                a.ratio,
                b.ratio
            );
        }
    }

    #[test]
    fn verdicts_invariant_under_monotone_utility_transform() {
        // Demands computed by grid search under u and exp(u) coincide, so
        // the datasets and verdicts are identical.
        let alphas = [0.4, 0.6];
        let u1 = |x: &[f64]| alphas[0] * (x[0] + 1e-9).ln() + alphas[1] * (x[1] + 1e-9).ln();
        let u2 = |x: &[f64]| u1(x).exp();
        let mut rng = crate::rng::rng_from_seed(19);
        use rand::Rng;
        let grid = 200usize;
        let mut build = |u: &dyn Fn(&[f64]) -> f64, seed_offset: u64| {
            let mut r = crate::rng::rng_from_seed(19 + seed_offset);
            let _ = &mut rng;
            let mut prices = Vec::new();
            let mut responses = Vec::new();
            for _ in 0..6 {
                let p = vec![r.gen_range(1.0..2.0), r.gen_range(1.0..2.0)];
                let budget: f64 = r.gen_range(1.0..2.0);
                let mut best = (f64::NEG_INFINITY, vec![0.0, 0.0]);
                for i in 0..=grid {
                    let x0 = budget / p[0] * i as f64 / grid as f64;
                    let x1 = (budget - x0 * p[0]) / p[1];
                    let x = vec![x0, x1.max(0.0)];
                    let val = u(&x);
                    if val > best.0 {
                        best = (val, x);
                    }
                }
                prices.push(p);
                responses.push(best.1);
            }
            ConsumerDataset::new(prices, responses, None).unwrap()
        };
        let d1 = build(&u1, 0);
        let d2 = build(&u2, 0);
        for t in 0..d1.observations() {
            assert_eq!(d1.response(t), d2.response(t), "demands differ at {t}");
        }
        let v1 = matches!(garp_check(&d1).unwrap(), GarpResult::Consistent);
        let v2 = matches!(garp_check(&d2).unwrap(), GarpResult::Consistent);
        assert_eq!(v1, v2);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            ConsumerDataset::new(vec![vec![1.0, -1.0]], vec![vec![1.0, 1.0]], None),
            Err(RpError::NonPositivePrice { t: 0, good: 1 })
        ));
        assert!(matches!(
            ConsumerDataset::new(vec![vec![1.0]], vec![vec![-0.5]], None),
            Err(RpError::NegativeResponse { .. })
        ));
        assert!(matches!(
            ConsumerDataset::new(vec![], vec![], None),
            Err(RpError::EmptyDataset)
        ));
    }
}
