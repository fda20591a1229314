//! Dense linear-programming core: two-phase revised simplex with Bland's
//! rule, used for the rationality feasibility systems and the response
//! prediction program.
//!
//! Problem sizes here are small (at most a few thousand rows), so the basis
//! inverse is kept explicitly and updated in place. Bland's rule costs some
//! speed against Dantzig pricing but rules out cycling, and the feasibility
//! systems this crate solves are heavily degenerate.
//!
//! Pure feasibility problems with many more rows than variables are solved
//! through their dual (still revised simplex with Bland's rule), which turns
//! an `m×m` basis into an `n×n` one; the recovered point is always re-checked
//! against the primal constraints, with a direct primal solve as fallback.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("constraint {0} has {1} coefficients, expected {2}")]
    DimensionMismatch(usize, usize, usize),
    #[error("non-finite coefficient encountered")]
    NonFinite,
    #[error("variable {0} has lower bound above upper bound")]
    BadBounds(usize),
    #[error("iteration limit exceeded; the instance is numerically intractable")]
    IterationLimit,
    #[error("linear program has no variables")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Maximization problem over box-bounded variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    /// Objective coefficients (maximized).
    pub maximize: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Per-variable `(lower, upper)`; infinities allowed. Finite upper
    /// bounds are handled as appended `Le` rows, and certificate/dual
    /// vectors cover constraints first, then those appended rows in
    /// variable order.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.maximize.len();
        if n == 0 {
            return Err(LpError::Empty);
        }
        if self.maximize.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::DimensionMismatch(i, c.coeffs.len(), n));
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
                return Err(LpError::NonFinite);
            }
        }
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch(0, self.bounds.len(), n));
        }
        for (j, &(l, u)) in self.bounds.iter().enumerate() {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(LpError::BadBounds(j));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal {
        x: Vec<f64>,
        value: f64,
        /// Row multipliers from the final basis (constraints, then appended
        /// upper-bound rows).
        duals: Vec<f64>,
    },
    /// Farkas-type certificate `u`: `u_i >= 0` on `Le` rows, `u_i <= 0` on
    /// `Ge` rows, and `inf_box (A'u)'x > u'b`, witnessing emptiness.
    Infeasible { farkas: Vec<f64> },
    /// Unbounded improving ray in the original variable space.
    Unbounded { ray: Vec<f64> },
}

/// Feasibility verdict for [`feasible`].
#[derive(Debug, Clone)]
pub enum Feasibility {
    Feasible { x: Vec<f64> },
    Infeasible { farkas: Vec<f64> },
}

const TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Standard-form machinery
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum VarMap {
    /// x = offset + col
    Shifted { col: usize, offset: f64 },
    /// x = offset − col
    Flipped { col: usize, offset: f64 },
    /// x = pos − neg
    Split { pos: usize, neg: usize },
}

enum Column {
    Dense(Vec<f64>),
    Unit { row: usize, sign: f64 },
}

struct Standardized {
    columns: Vec<Column>,
    rhs: Vec<f64>,
    var_map: Vec<VarMap>,
    /// Per original row: −1 if the row was negated to make rhs nonnegative.
    row_sign: Vec<f64>,
    structural: usize,
    artificial_start: usize,
}

/// Expands finite upper bounds into explicit rows and splits/shifts variables
/// so every standardized variable is nonnegative and every rhs is too.
fn standardize(lp: &LinearProgram) -> Standardized {
    let n = lp.maximize.len();

    // Effective rows: the原 constraints plus upper-bound rows.
    let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            (
                c.coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j, v))
                    .collect(),
                c.relation,
                c.rhs,
            )
        })
        .collect();
    for (j, &(l, u)) in lp.bounds.iter().enumerate() {
        if u.is_finite() && l.is_finite() {
            rows.push((vec![(j, 1.0)], Relation::Le, u));
        } else if u.is_finite() {
            // handled by flipping the variable; no row needed
        }
    }
    let m = rows.len();

    // Variable transforms.
    let mut var_map = Vec::with_capacity(n);
    let mut structural = 0usize;
    for &(l, u) in &lp.bounds {
        if l.is_finite() {
            var_map.push(VarMap::Shifted {
                col: structural,
                offset: l,
            });
            structural += 1;
        } else if u.is_finite() {
            var_map.push(VarMap::Flipped {
                col: structural,
                offset: u,
            });
            structural += 1;
        } else {
            var_map.push(VarMap::Split {
                pos: structural,
                neg: structural + 1,
            });
            structural += 2;
        }
    }

    // Dense structural columns and shifted rhs.
    let mut dense = vec![vec![0.0; m]; structural];
    let mut rhs = vec![0.0; m];
    let mut rels = vec![Relation::Le; m];
    for (i, (coeffs, rel, b)) in rows.iter().enumerate() {
        let mut shift = 0.0;
        for &(j, v) in coeffs {
            match var_map[j] {
                VarMap::Shifted { col, offset } => {
                    dense[col][i] += v;
                    shift += v * offset;
                }
                VarMap::Flipped { col, offset } => {
                    dense[col][i] -= v;
                    shift += v * offset;
                }
                VarMap::Split { pos, neg } => {
                    dense[pos][i] += v;
                    dense[neg][i] -= v;
                }
            }
        }
        rhs[i] = b - shift;
        rels[i] = *rel;
    }

    // Normalize rhs signs.
    let mut row_sign = vec![1.0; m];
    for i in 0..m {
        if rhs[i] < 0.0 {
            row_sign[i] = -1.0;
            rhs[i] = -rhs[i];
            for col in dense.iter_mut() {
                col[i] = -col[i];
            }
            rels[i] = match rels[i] {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let mut columns: Vec<Column> = dense.into_iter().map(Column::Dense).collect();
    // Slack / surplus columns.
    for (i, rel) in rels.iter().enumerate() {
        match rel {
            Relation::Le => columns.push(Column::Unit { row: i, sign: 1.0 }),
            Relation::Ge => columns.push(Column::Unit { row: i, sign: -1.0 }),
            Relation::Eq => {}
        }
    }
    let artificial_start = columns.len();
    // Artificials for Ge/Eq rows (Le rows start with their slack basic).
    for (i, rel) in rels.iter().enumerate() {
        if !matches!(rel, Relation::Le) {
            columns.push(Column::Unit { row: i, sign: 1.0 });
        }
    }

    Standardized {
        columns,
        rhs,
        var_map,
        row_sign,
        structural,
        artificial_start,
    }
}

// ---------------------------------------------------------------------------
// Revised simplex over the standardized arrays
// ---------------------------------------------------------------------------

struct Simplex<'a> {
    std: &'a Standardized,
    m: usize,
    basis: Vec<usize>,
    binv: Vec<Vec<f64>>,
    xb: Vec<f64>,
    /// Columns barred from entering (artificials in phase 2).
    barred: Vec<bool>,
}

enum StepResult {
    Optimal,
    Pivoted,
    Unbounded { entering: usize, direction: Vec<f64> },
}

impl<'a> Simplex<'a> {
    fn new(std: &'a Standardized) -> Self {
        let m = std.rhs.len();
        // Initial basis: slack for Le rows, artificial otherwise, in row
        // order. Columns were pushed in exactly that layout.
        let mut basis = vec![usize::MAX; m];
        for (j, col) in std.columns.iter().enumerate().skip(std.structural) {
            if let Column::Unit { row, sign } = col {
                if *sign > 0.0 && basis[*row] == usize::MAX {
                    basis[*row] = j;
                }
            }
        }
        debug_assert!(basis.iter().all(|&b| b != usize::MAX));
        let mut binv = vec![vec![0.0; m]; m];
        for (i, row) in binv.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Simplex {
            std,
            m,
            basis,
            binv,
            xb: std.rhs.clone(),
            barred: vec![false; std.columns.len()],
        }
    }

    fn column_dot(&self, col: usize, y: &[f64]) -> f64 {
        match &self.std.columns[col] {
            Column::Dense(v) => v.iter().zip(y).map(|(a, b)| a * b).sum(),
            Column::Unit { row, sign } => sign * y[*row],
        }
    }

    fn direction(&self, col: usize) -> Vec<f64> {
        match &self.std.columns[col] {
            Column::Dense(v) => (0..self.m)
                .map(|i| self.binv[i].iter().zip(v).map(|(a, b)| a * b).sum())
                .collect(),
            Column::Unit { row, sign } => (0..self.m).map(|i| sign * self.binv[i][*row]).collect(),
        }
    }

    fn duals(&self, costs: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (i, &b) in self.basis.iter().enumerate() {
            let c = costs[b];
            if c != 0.0 {
                for (yk, bk) in y.iter_mut().zip(&self.binv[i]) {
                    *yk += c * bk;
                }
            }
        }
        y
    }

    /// One Bland step maximizing `costs`. Candidate columns whose improving
    /// direction hits no blocking row are declared unbounded only when the
    /// reduced cost is solidly positive; noise-level reduced costs are
    /// skipped instead.
    fn step(&mut self, costs: &[f64], in_basis: &mut [bool]) -> StepResult {
        let y = self.duals(costs);
        for entering in 0..self.std.columns.len() {
            if in_basis[entering] || self.barred[entering] {
                continue;
            }
            let reduced = costs[entering] - self.column_dot(entering, &y);
            if reduced <= TOL {
                continue; // Bland: first eligible index wins
            }
            let d = self.direction(entering);
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if d[i] > TOL {
                    let ratio = (self.xb[i] / d[i]).max(0.0);
                    match leaving {
                        None => leaving = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - TOL
                                || (ratio < lr + TOL && self.basis[i] < self.basis[li])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match leaving {
                Some((r, _)) => {
                    self.pivot(entering, r, &d, in_basis);
                    return StepResult::Pivoted;
                }
                None if reduced > 1e-7 * (1.0 + costs[entering].abs()) => {
                    return StepResult::Unbounded {
                        entering,
                        direction: d,
                    };
                }
                None => {} // numerically-zero gain, no blocking row: skip
            }
        }
        StepResult::Optimal
    }

    fn pivot(&mut self, entering: usize, r: usize, d: &[f64], in_basis: &mut [bool]) {
        let piv = d[r];
        let scale = 1.0 / piv;
        for v in self.binv[r].iter_mut() {
            *v *= scale;
        }
        self.xb[r] *= scale;
        let pivot_row = self.binv[r].clone();
        let pivot_xb = self.xb[r];
        for i in 0..self.m {
            if i == r || d[i] == 0.0 {
                continue;
            }
            let f = d[i];
            for (v, &p) in self.binv[i].iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.xb[i] -= f * pivot_xb;
            if self.xb[i] < 0.0 && self.xb[i] > -1e-11 {
                self.xb[i] = 0.0;
            }
        }
        in_basis[self.basis[r]] = false;
        in_basis[entering] = true;
        self.basis[r] = entering;
    }

    fn solution_value(&self, col: usize) -> f64 {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map(|i| self.xb[i])
            .unwrap_or(0.0)
    }

    /// Rebuilds the basis inverse from scratch (Gauss-Jordan with partial
    /// pivoting) and recomputes the basic values, wiping out the rounding
    /// drift that product-form updates accumulate.
    fn refactorize(&mut self) {
        let m = self.m;
        let mut b = vec![vec![0.0; m]; m];
        for (k, &col) in self.basis.iter().enumerate() {
            match &self.std.columns[col] {
                Column::Dense(v) => {
                    for i in 0..m {
                        b[i][k] = v[i];
                    }
                }
                Column::Unit { row, sign } => b[*row][k] = *sign,
            }
        }
        let mut inv = vec![vec![0.0; m]; m];
        for (i, row) in inv.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for col in 0..m {
            let pivot_row = (col..m)
                .max_by(|&a, &c| b[a][col].abs().total_cmp(&b[c][col].abs()))
                .unwrap();
            if b[pivot_row][col].abs() < 1e-12 {
                return; // basis numerically singular; keep the running inverse
            }
            b.swap(col, pivot_row);
            inv.swap(col, pivot_row);
            let piv = b[col][col];
            for v in b[col].iter_mut() {
                *v /= piv;
            }
            for v in inv[col].iter_mut() {
                *v /= piv;
            }
            for r in 0..m {
                if r == col || b[r][col] == 0.0 {
                    continue;
                }
                let f = b[r][col];
                for c in 0..m {
                    b[r][c] -= f * b[col][c];
                    inv[r][c] -= f * inv[col][c];
                }
            }
        }
        self.binv = inv;
        let scale = self.std.rhs.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        for i in 0..m {
            let v: f64 = self.binv[i]
                .iter()
                .zip(&self.std.rhs)
                .map(|(a, b)| a * b)
                .sum();
            self.xb[i] = if v < 0.0 && v > -1e-9 * scale { 0.0 } else { v };
        }
    }
}

fn run_simplex(
    simplex: &mut Simplex,
    costs: &[f64],
    limit: usize,
) -> Result<Option<(usize, Vec<f64>)>, LpError> {
    let mut in_basis = vec![false; simplex.std.columns.len()];
    for &b in &simplex.basis {
        in_basis[b] = true;
    }
    // Optimality is only trusted after a fresh refactorization; drift can
    // make stale reduced costs look converged (or not).
    let mut verified = false;
    for iteration in 0..limit {
        if iteration > 0 && iteration % 64 == 0 {
            simplex.refactorize();
        }
        match simplex.step(costs, &mut in_basis) {
            StepResult::Optimal => {
                if verified {
                    return Ok(None);
                }
                simplex.refactorize();
                verified = true;
            }
            StepResult::Pivoted => verified = false,
            StepResult::Unbounded {
                entering,
                direction,
            } => return Ok(Some((entering, direction))),
        }
    }
    Err(LpError::IterationLimit)
}

fn recover_solution(simplex: &Simplex, var_map: &[VarMap]) -> Vec<f64> {
    var_map
        .iter()
        .map(|vm| match vm {
            VarMap::Shifted { col, offset } => offset + simplex.solution_value(*col),
            VarMap::Flipped { col, offset } => offset - simplex.solution_value(*col),
            VarMap::Split { pos, neg } => {
                simplex.solution_value(*pos) - simplex.solution_value(*neg)
            }
        })
        .collect()
}

/// Solves the LP with the two-phase revised simplex.
///
/// Deterministic: identical inputs visit identical pivot sequences and
/// return the identical vertex.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let std = standardize(lp);
    let ncols = std.columns.len();
    let m = std.rhs.len();
    let limit = 50_000 + 60 * (m + ncols);

    let mut simplex = Simplex::new(&std);

    // Phase 1: maximize minus the artificial sum.
    let has_artificials = ncols > std.artificial_start;
    if has_artificials {
        let mut costs = vec![0.0; ncols];
        for c in costs.iter_mut().skip(std.artificial_start) {
            *c = -1.0;
        }
        if run_simplex(&mut simplex, &costs, limit)?.is_some() {
            unreachable!("phase-1 objective is bounded above by zero");
        }
        let infeasibility: f64 = simplex
            .basis
            .iter()
            .zip(&simplex.xb)
            .filter(|(&b, _)| b >= std.artificial_start)
            .map(|(_, &v)| v)
            .sum();
        let scale = std.rhs.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        if infeasibility > TOL * scale * 10.0 {
            let y = simplex.duals(&costs);
            let farkas: Vec<f64> = (0..m).map(|i| std.row_sign[i] * y[i]).collect();
            return Ok(LpOutcome::Infeasible { farkas });
        }
        // Drive remaining zero-level artificials out of the basis where
        // possible; redundant rows keep theirs, barred from re-entering.
        for r in 0..m {
            if simplex.basis[r] < std.artificial_start {
                continue;
            }
            let mut in_basis = vec![false; ncols];
            for &b in &simplex.basis {
                in_basis[b] = true;
            }
            let mut pivoted = false;
            for j in 0..std.artificial_start {
                if in_basis[j] {
                    continue;
                }
                let d = simplex.direction(j);
                if d[r].abs() > 1e-7 {
                    simplex.pivot(j, r, &d, &mut in_basis);
                    pivoted = true;
                    break;
                }
            }
            if !pivoted {
                // Row is linearly dependent; its artificial stays basic at
                // zero and is never allowed to grow.
            }
        }
        for j in std.artificial_start..ncols {
            simplex.barred[j] = true;
        }
    }

    // Phase 2.
    let mut costs = vec![0.0; ncols];
    for (j, vm) in std.var_map.iter().enumerate() {
        let c = lp.maximize[j];
        match vm {
            VarMap::Shifted { col, .. } => costs[*col] += c,
            VarMap::Flipped { col, .. } => costs[*col] -= c,
            VarMap::Split { pos, neg } => {
                costs[*pos] += c;
                costs[*neg] -= c;
            }
        }
    }
    if let Some((entering, d)) = run_simplex(&mut simplex, &costs, limit)? {
        // Build the improving ray in original variable space.
        let mut std_dir = vec![0.0; ncols];
        std_dir[entering] = 1.0;
        for (i, &b) in simplex.basis.iter().enumerate() {
            std_dir[b] = -d[i];
        }
        let ray: Vec<f64> = std
            .var_map
            .iter()
            .map(|vm| match vm {
                VarMap::Shifted { col, .. } => std_dir[*col],
                VarMap::Flipped { col, .. } => -std_dir[*col],
                VarMap::Split { pos, neg } => std_dir[*pos] - std_dir[*neg],
            })
            .collect();
        return Ok(LpOutcome::Unbounded { ray });
    }

    let x = recover_solution(&simplex, &std.var_map);
    let value: f64 = lp.maximize.iter().zip(&x).map(|(c, v)| c * v).sum();
    let y = simplex.duals(&costs);
    let duals: Vec<f64> = (0..m).map(|i| std.row_sign[i] * y[i]).collect();
    Ok(LpOutcome::Optimal { x, value, duals })
}

// ---------------------------------------------------------------------------
// Feasibility front end
// ---------------------------------------------------------------------------

/// Decides feasibility of the constraint system, ignoring the objective.
///
/// Systems with many more rows than variables are attacked through the
/// Farkas dual (rows and columns swap roles), then the recovered point is
/// verified against the primal; any discrepancy falls back to the direct
/// primal solve.
pub fn feasible(lp: &LinearProgram) -> Result<Feasibility, LpError> {
    lp.validate()?;
    let n = lp.maximize.len();
    let m = lp.constraints.len();
    let all_le = lp.constraints.iter().all(|c| c.relation == Relation::Le);
    let no_upper = lp.bounds.iter().all(|&(_, u)| u.is_infinite());
    if all_le && no_upper && m >= 3 * n && m > 64 {
        if let Some(result) = feasible_via_dual(lp)? {
            return Ok(result);
        }
    }
    let zero_objective = LinearProgram {
        maximize: vec![0.0; n],
        constraints: lp.constraints.clone(),
        bounds: lp.bounds.clone(),
    };
    match solve(&zero_objective)? {
        LpOutcome::Optimal { x, .. } => Ok(Feasibility::Feasible { x }),
        LpOutcome::Infeasible { farkas } => Ok(Feasibility::Infeasible { farkas }),
        LpOutcome::Unbounded { .. } => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Dual attack for `A x <= b` with shifted/free variables. Returns `None`
/// when the recovered answer fails verification and the caller should use
/// the direct route.
fn feasible_via_dual(lp: &LinearProgram) -> Result<Option<Feasibility>, LpError> {
    let n = lp.maximize.len();
    let m = lp.constraints.len();

    // Shift finite lower bounds out: x = l + x'.
    let shift: Vec<f64> = lp
        .bounds
        .iter()
        .map(|&(l, _)| if l.is_finite() { l } else { 0.0 })
        .collect();
    let free: Vec<bool> = lp.bounds.iter().map(|&(l, _)| l.is_infinite()).collect();
    let bhat: Vec<f64> = lp
        .constraints
        .iter()
        .map(|c| c.rhs - c.coeffs.iter().zip(&shift).map(|(a, s)| a * s).sum::<f64>())
        .collect();

    // Dual: maximize -bhat'y s.t. (A'y)_j = 0 for free j, >= 0 for shifted j,
    // y >= 0. Feasible at y = 0; unbounded exactly when the primal is empty.
    let constraints: Vec<Constraint> = (0..n)
        .map(|j| Constraint {
            coeffs: lp.constraints.iter().map(|c| c.coeffs[j]).collect(),
            relation: if free[j] { Relation::Eq } else { Relation::Ge },
            rhs: 0.0,
        })
        .collect();
    let dual = LinearProgram {
        maximize: bhat.iter().map(|&b| -b).collect(),
        constraints,
        bounds: vec![(0.0, f64::INFINITY); m],
    };
    match solve(&dual)? {
        LpOutcome::Unbounded { ray } => {
            // The ray is a Farkas certificate for the primal.
            if check_infeasibility_certificate(lp, &ray, 1e-7) {
                Ok(Some(Feasibility::Infeasible { farkas: ray }))
            } else {
                Ok(None)
            }
        }
        LpOutcome::Optimal { duals, .. } => {
            // Strong duality: the dual row multipliers are the primal point.
            let x: Vec<f64> = (0..n).map(|j| duals[j] + shift[j]).collect();
            if check_solution(lp, &x, 1e-7) {
                Ok(Some(Feasibility::Feasible { x }))
            } else {
                let flipped: Vec<f64> = (0..n).map(|j| -duals[j] + shift[j]).collect();
                if check_solution(lp, &flipped, 1e-7) {
                    Ok(Some(Feasibility::Feasible { x: flipped }))
                } else {
                    Ok(None)
                }
            }
        }
        LpOutcome::Infeasible { .. } => unreachable!("dual is feasible at zero"),
    }
}

// ---------------------------------------------------------------------------
// Independent checkers
// ---------------------------------------------------------------------------

/// Primal feasibility of `x` (constraints and bounds) within `tol`,
/// relative to the row scale.
pub fn check_solution(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    if x.len() != lp.maximize.len() {
        return false;
    }
    for (j, &(l, u)) in lp.bounds.iter().enumerate() {
        if x[j] < l - tol || x[j] > u + tol {
            return false;
        }
    }
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let scale = 1.0 + c.rhs.abs() + lhs.abs();
        match c.relation {
            Relation::Le => {
                if lhs > c.rhs + tol * scale {
                    return false;
                }
            }
            Relation::Ge => {
                if lhs < c.rhs - tol * scale {
                    return false;
                }
            }
            Relation::Eq => {
                if (lhs - c.rhs).abs() > tol * scale {
                    return false;
                }
            }
        }
    }
    true
}

/// Optimality check independent of solver internals: primal feasibility,
/// dual sign conditions, complementary slackness, and reduced-cost
/// stationarity, all within `tol`.
pub fn check_optimality(lp: &LinearProgram, x: &[f64], duals: &[f64], tol: f64) -> bool {
    if !check_solution(lp, x, tol) {
        return false;
    }
    // Reconstruct the effective row list (constraints + upper-bound rows).
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| (c.coeffs.clone(), c.relation, c.rhs))
        .collect();
    for (j, &(l, u)) in lp.bounds.iter().enumerate() {
        if u.is_finite() && l.is_finite() {
            let mut e = vec![0.0; lp.maximize.len()];
            e[j] = 1.0;
            rows.push((e, Relation::Le, u));
        }
    }
    if duals.len() != rows.len() {
        return false;
    }
    for ((coeffs, rel, rhs), &y) in rows.iter().zip(duals) {
        match rel {
            Relation::Le if y < -tol => return false,
            Relation::Ge if y > tol => return false,
            _ => {}
        }
        let slack: f64 = rhs - coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        if y.abs() > tol && slack.abs() > tol * (1.0 + rhs.abs()) {
            return false;
        }
    }
    // Stationarity: reduced costs r = c - A'y must push against bounds.
    for j in 0..lp.maximize.len() {
        let mut r = lp.maximize[j];
        for ((coeffs, _, _), &y) in rows.iter().zip(duals) {
            r -= coeffs[j] * y;
        }
        let (l, u) = lp.bounds[j];
        let at_lower = l.is_finite() && (x[j] - l).abs() <= tol * (1.0 + l.abs());
        let at_upper = u.is_finite() && (x[j] - u).abs() <= tol * (1.0 + u.abs());
        if at_lower && at_upper {
            continue; // fixed variable: any reduced cost is fine
        }
        if at_lower {
            if r > tol {
                return false;
            }
        } else if at_upper {
            if r < -tol {
                return false;
            }
        } else if r.abs() > tol * (1.0 + lp.maximize[j].abs()) {
            return false;
        }
    }
    true
}

/// Validates a Farkas certificate: sign conditions per relation and
/// `inf_box (A'u)'x > u'b`.
pub fn check_infeasibility_certificate(lp: &LinearProgram, farkas: &[f64], tol: f64) -> bool {
    let n = lp.maximize.len();
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| (c.coeffs.clone(), c.relation, c.rhs))
        .collect();
    for (j, &(l, u)) in lp.bounds.iter().enumerate() {
        if u.is_finite() && l.is_finite() {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            rows.push((e, Relation::Le, u));
        }
    }
    if farkas.len() != rows.len() {
        return false;
    }
    let mut g = vec![0.0; n];
    let mut ub = 0.0;
    for ((coeffs, rel, rhs), &u) in rows.iter().zip(farkas) {
        match rel {
            Relation::Le if u < -tol => return false,
            Relation::Ge if u > tol => return false,
            _ => {}
        }
        for (gj, &a) in g.iter_mut().zip(coeffs) {
            *gj += u * a;
        }
        ub += u * rhs;
    }
    // inf over the box of g'x.
    let mut inf = 0.0;
    for (j, &(l, u)) in lp.bounds.iter().enumerate() {
        if g[j] > tol {
            if l.is_infinite() {
                return false;
            }
            inf += g[j] * l;
        } else if g[j] < -tol {
            if u.is_infinite() {
                return false;
            }
            inf += g[j] * u;
        }
    }
    inf > ub + tol * (1.0 + ub.abs())
}



#[cfg(test)]
mod debug_probe {
    use super::*;

    #[test]
    fn probe_afriat_seed11() {
        let data = crate::revealed_prefs::synth::random_dataset(8, 2, 11);
        let t_count = 8usize;
        let nvars = 2 * t_count;
        let dotf = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut constraints = Vec::new();
        for t in 0..t_count {
            let pt_xt = dotf(data.price(t), data.response(t));
            for tau in 0..t_count {
                if t == tau { continue; }
                let mut coeffs = vec![0.0; nvars];
                coeffs[tau] += 1.0;
                coeffs[t] -= 1.0;
                coeffs[t_count + t] = -(dotf(data.price(t), data.response(tau)) - pt_xt);
                constraints.push(Constraint { coeffs, relation: Relation::Le, rhs: 0.0 });
            }
        }
        let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); t_count];
        bounds.extend(std::iter::repeat((1e-6, f64::INFINITY)).take(t_count));
        let lp = LinearProgram { maximize: vec![0.0; nvars], constraints, bounds };

        let std_form = standardize(&lp);
        let ncols = std_form.columns.len();
        let m = std_form.rhs.len();
        eprintln!("m={m} ncols={ncols} structural={} art_start={}", std_form.structural, std_form.artificial_start);
        let mut simplex = Simplex::new(&std_form);
        let mut costs = vec![0.0; ncols];
        for c in costs.iter_mut().skip(std_form.artificial_start) { *c = -1.0; }
        let mut in_basis = vec![false; ncols];
        for &b in &simplex.basis { in_basis[b] = true; }
        for it in 0..20000 {
            let minxb = simplex.xb.iter().cloned().fold(f64::INFINITY, f64::min);
            if minxb < -1e-9 {
                eprintln!("iteration {it}: min xb = {minxb:.3e} !!");
                break;
            }
            match simplex.step(&costs, &mut in_basis) {
                StepResult::Optimal => {
                    let inf: f64 = simplex.basis.iter().zip(&simplex.xb)
                        .filter(|(&b, _)| b >= std_form.artificial_start)
                        .map(|(_, &v)| v).sum();
                    eprintln!("phase1 optimal at iter {it}, artificial sum {inf:.3e}, min xb {minxb:.3e}");
                    // check duality claim
                    let y = simplex.duals(&costs);
                    let mut max_rc = f64::NEG_INFINITY;
                    for j in 0..ncols {
                        if in_basis[j] { continue; }
                        let rc = costs[j] - simplex.column_dot(j, &y);
                        max_rc = max_rc.max(rc);
                    }
                    eprintln!("max nonbasic reduced cost {max_rc:.3e}");
                    break;
                }
                StepResult::Pivoted => {}
                StepResult::Unbounded { .. } => { eprintln!("UNBOUNDED at {it}"); break; }
            }
        }
    }
}
