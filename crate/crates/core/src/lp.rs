//! Dense linear-programming subsolver.
//!
//! Every exact-mode subproblem in this crate reduces to a small LP, so the
//! solver favors determinism over speed: two-phase tableau simplex with
//! Bland's anti-cycling rule and a fixed construction order. Identical inputs
//! produce identical outcomes and witnesses.

use std::fmt;

use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Shared feasibility tolerance; one knob so caller tolerances compose.
pub const DEFAULT_FEAS_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 20_000;

#[derive(Clone, Debug, PartialEq)]
pub enum LpError {
    DimensionMismatch { expected: usize, got: usize },
    BadBounds { var: usize },
    NonFinite,
    IterationLimit,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DimensionMismatch { expected, got } => {
                write!(f, "row has {got} coefficients, expected {expected}")
            }
            LpError::BadBounds { var } => write!(f, "variable {var} has lower bound > upper bound"),
            LpError::NonFinite => write!(f, "non-finite coefficient in linear program"),
            LpError::IterationLimit => write!(f, "simplex pivot limit exceeded"),
        }
    }
}

impl std::error::Error for LpError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solve result; `point` is present exactly when the status is `Optimal`.
#[derive(Clone, Debug)]
pub struct LpOutcome<S> {
    pub status: LpStatus,
    pub point: Option<Vector<S>>,
    pub value: Option<S>,
}

impl<S: Scalar> LpOutcome<S> {
    pub fn optimal(&self) -> Option<(&Vector<S>, S)> {
        match (self.status, &self.point, self.value) {
            (LpStatus::Optimal, Some(p), Some(v)) => Some((p, v)),
            _ => None,
        }
    }
}

/// `minimize c·x` subject to equality rows, `≤` rows, and variable bounds.
/// Variables are free unless bounds are set.
#[derive(Clone, Debug)]
pub struct LinearProgram<S> {
    num_vars: usize,
    objective: Vec<S>,
    eq: Vec<(Vec<S>, S)>,
    le: Vec<(Vec<S>, S)>,
    lower: Vec<Option<S>>,
    upper: Vec<Option<S>>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![S::zero(); num_vars],
            eq: Vec::new(),
            le: Vec::new(),
            lower: vec![None; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_objective(&mut self, coeffs: &[S]) -> Result<(), LpError> {
        self.check_row(coeffs)?;
        self.objective = coeffs.to_vec();
        Ok(())
    }

    pub fn objective_coeff(&mut self, var: usize, coeff: S) {
        self.objective[var] = coeff;
    }

    pub fn add_eq(&mut self, coeffs: &[S], rhs: S) -> Result<(), LpError> {
        self.check_row(coeffs)?;
        self.eq.push((coeffs.to_vec(), rhs));
        Ok(())
    }

    pub fn add_le(&mut self, coeffs: &[S], rhs: S) -> Result<(), LpError> {
        self.check_row(coeffs)?;
        self.le.push((coeffs.to_vec(), rhs));
        Ok(())
    }

    pub fn add_ge(&mut self, coeffs: &[S], rhs: S) -> Result<(), LpError> {
        let flipped: Vec<S> = coeffs.iter().map(|&c| -c).collect();
        self.add_le(&flipped, -rhs)
    }

    pub fn set_lower(&mut self, var: usize, bound: S) {
        self.lower[var] = Some(bound);
    }

    pub fn set_upper(&mut self, var: usize, bound: S) {
        self.upper[var] = Some(bound);
    }

    pub fn fix(&mut self, var: usize, value: S) {
        self.lower[var] = Some(value);
        self.upper[var] = Some(value);
    }

    fn check_row(&self, coeffs: &[S]) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::DimensionMismatch {
                expected: self.num_vars,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite);
        }
        Ok(())
    }

    pub fn solve(&self, feas_tol: S) -> Result<LpOutcome<S>, LpError> {
        match Simplex::build(self)?.run(feas_tol, &self.objective) {
            Err(LpError::IterationLimit) => {
                // Degenerate slivers can make the pivot path wander. The
                // classic rescue: re-solve with a deterministic sub-tolerance
                // perturbation of the right-hand sides, which breaks the
                // degeneracy without moving any verdict past `feas_tol`.
                let mut nudged = self.clone();
                let unit = S::c(1e-11);
                let count = nudged.eq.len() + nudged.le.len();
                for (i, (_, rhs)) in nudged.eq.iter_mut().enumerate() {
                    *rhs = *rhs + unit * S::from_usize(i + 1).unwrap();
                }
                for (i, (_, rhs)) in nudged.le.iter_mut().enumerate() {
                    *rhs = *rhs + unit * S::from_usize(count + i + 1).unwrap();
                }
                Simplex::build(&nudged)?.run(feas_tol, &nudged.objective)
            }
            other => other,
        }
    }

    /// Phase-one wrapper: is the constraint set nonempty, and a witness if so.
    pub fn feasible(&self, feas_tol: S) -> Result<Option<Vector<S>>, LpError> {
        let mut relaxed = self.clone();
        relaxed.objective = vec![S::zero(); self.num_vars];
        let outcome = relaxed.solve(feas_tol)?;
        Ok(outcome.point)
    }
}

/// How a standard-form column maps back onto an original variable.
#[derive(Clone, Copy)]
enum ColumnRole<S> {
    Shifted { var: usize, offset: S },
    Flipped { var: usize, offset: S },
    PosPart { var: usize },
    NegPart { var: usize },
    Slack,
    Artificial,
}

struct Simplex<S> {
    columns: Vec<ColumnRole<S>>,
    num_structural: usize,
    first_artificial: usize,
    tableau: Vec<Vec<S>>,
    basis: Vec<usize>,
    num_vars: usize,
    /// Artificial columns that have left the basis (never re-admitted).
    banned: Vec<bool>,
}

impl<S: Scalar> Simplex<S> {
    fn build(lp: &LinearProgram<S>) -> Result<Self, LpError> {
        for j in 0..lp.num_vars {
            if let (Some(l), Some(u)) = (lp.lower[j], lp.upper[j]) {
                if l > u {
                    return Err(LpError::BadBounds { var: j });
                }
            }
        }
        if lp
            .eq
            .iter()
            .chain(lp.le.iter())
            .any(|(_, b)| !b.is_finite())
        {
            return Err(LpError::NonFinite);
        }

        // Substitute variables so every standard-form column is >= 0.
        let mut columns: Vec<ColumnRole<S>> = Vec::new();
        let mut var_cols: Vec<Vec<usize>> = vec![Vec::new(); lp.num_vars];
        for j in 0..lp.num_vars {
            match (lp.lower[j], lp.upper[j]) {
                (Some(l), _) => {
                    var_cols[j].push(columns.len());
                    columns.push(ColumnRole::Shifted { var: j, offset: l });
                }
                (None, Some(u)) => {
                    var_cols[j].push(columns.len());
                    columns.push(ColumnRole::Flipped { var: j, offset: u });
                }
                (None, None) => {
                    var_cols[j].push(columns.len());
                    columns.push(ColumnRole::PosPart { var: j });
                    var_cols[j].push(columns.len());
                    columns.push(ColumnRole::NegPart { var: j });
                }
            }
        }
        let num_structural = columns.len();

        // Translate a row over original variables into standard-form columns.
        let translate = |coeffs: &[S], rhs: S| -> (Vec<S>, S) {
            let mut row = vec![S::zero(); num_structural];
            let mut b = rhs;
            for (j, &c) in coeffs.iter().enumerate() {
                if c == S::zero() {
                    continue;
                }
                for &col in &var_cols[j] {
                    match columns[col] {
                        ColumnRole::Shifted { offset, .. } => {
                            row[col] = row[col] + c;
                            b = b - c * offset;
                        }
                        ColumnRole::Flipped { offset, .. } => {
                            row[col] = row[col] - c;
                            b = b - c * offset;
                        }
                        ColumnRole::PosPart { .. } => row[col] = row[col] + c,
                        ColumnRole::NegPart { .. } => row[col] = row[col] - c,
                        _ => unreachable!(),
                    }
                }
            }
            (row, b)
        };

        #[derive(Clone, Copy, PartialEq)]
        enum Relation {
            Eq,
            Le,
        }
        let mut rows: Vec<(Vec<S>, S, Relation)> = Vec::new();
        for (coeffs, rhs) in &lp.eq {
            let (row, b) = translate(coeffs, *rhs);
            rows.push((row, b, Relation::Eq));
        }
        for (coeffs, rhs) in &lp.le {
            let (row, b) = translate(coeffs, *rhs);
            rows.push((row, b, Relation::Le));
        }
        // Upper bounds of doubly-bounded variables become <= rows.
        for j in 0..lp.num_vars {
            if let (Some(l), Some(u)) = (lp.lower[j], lp.upper[j]) {
                let mut coeffs = vec![S::zero(); lp.num_vars];
                coeffs[j] = S::one();
                let _ = l;
                let (row, b) = translate(&coeffs, u);
                rows.push((row, b, Relation::Le));
            }
        }

        let m = rows.len();
        // Column layout: structural | slack (one per Le row) | artificial.
        let num_slack = rows.iter().filter(|r| r.2 == Relation::Le).count();
        let slack_base = num_structural;
        let first_artificial = num_structural + num_slack;

        let mut tableau: Vec<Vec<S>> = Vec::with_capacity(m + 1);
        let mut basis = vec![usize::MAX; m];
        let mut slack_idx = 0;
        let mut artificials: Vec<(usize, usize)> = Vec::new(); // (row, col offset)
        for (i, (row, b, rel)) in rows.iter().enumerate() {
            let flip = *b < S::zero();
            let sign = if flip { -S::one() } else { S::one() };
            let mut t = vec![S::zero(); first_artificial + 1];
            for (j, &c) in row.iter().enumerate() {
                t[j] = sign * c;
            }
            *t.last_mut().unwrap() = sign * *b;
            if *rel == Relation::Le {
                let col = slack_base + slack_idx;
                slack_idx += 1;
                t[col] = sign;
                if !flip {
                    basis[i] = col;
                }
            }
            if basis[i] == usize::MAX {
                artificials.push((i, artificials.len()));
            }
            tableau.push(t);
        }
        let num_artificial = artificials.len();
        let total = first_artificial + num_artificial;
        for t in &mut tableau {
            let rhs = t.pop().unwrap();
            t.resize(total, S::zero());
            t.push(rhs);
        }
        for &(row, k) in &artificials {
            tableau[row][first_artificial + k] = S::one();
            basis[row] = first_artificial + k;
        }
        for _ in 0..num_slack {
            columns.push(ColumnRole::Slack);
        }
        for _ in 0..num_artificial {
            columns.push(ColumnRole::Artificial);
        }
        // Cost row placeholder.
        tableau.push(vec![S::zero(); total + 1]);

        Ok(Simplex {
            columns,
            num_structural,
            first_artificial,
            tableau,
            basis,
            num_vars: lp.num_vars,
            banned: vec![false; num_artificial],
        })
    }

    fn run(mut self, feas_tol: S, objective: &[S]) -> Result<LpOutcome<S>, LpError> {
        let m = self.basis.len();
        let total = self.columns.len();
        let pivot_eps = S::c(1e-9);

        // Phase 1: minimize sum of artificials.
        if self.first_artificial < total {
            let cost_row = m;
            for j in 0..=total {
                self.tableau[cost_row][j] = S::zero();
            }
            for j in self.first_artificial..total {
                self.tableau[cost_row][j] = S::one();
            }
            for i in 0..m {
                if self.basis[i] >= self.first_artificial {
                    for j in 0..=total {
                        let upd = self.tableau[i][j];
                        self.tableau[cost_row][j] = self.tableau[cost_row][j] - upd;
                    }
                }
            }
            if !self.iterate(total, pivot_eps)? {
                // Phase 1 of a sum of nonnegatives cannot be unbounded.
                return Err(LpError::IterationLimit);
            }
            let phase1 = -self.tableau[m][total];
            if phase1 > feas_tol {
                return Ok(LpOutcome {
                    status: LpStatus::Infeasible,
                    point: None,
                    value: None,
                });
            }
            self.expel_artificials();
        }

        // Phase 2 with the real objective, artificials banned.
        let cost_row = m;
        for j in 0..=total {
            self.tableau[cost_row][j] = S::zero();
        }
        for (j, role) in self.columns.iter().enumerate() {
            let c = match *role {
                ColumnRole::Shifted { var, .. } => objective[var],
                ColumnRole::Flipped { var, .. } => -objective[var],
                ColumnRole::PosPart { var } => objective[var],
                ColumnRole::NegPart { var } => -objective[var],
                ColumnRole::Slack | ColumnRole::Artificial => S::zero(),
            };
            self.tableau[cost_row][j] = c;
        }
        for i in 0..m {
            let b = self.basis[i];
            let c = self.tableau[cost_row][b];
            if c.abs() > S::zero() {
                for j in 0..=total {
                    let upd = self.tableau[i][j] * c;
                    self.tableau[cost_row][j] = self.tableau[cost_row][j] - upd;
                }
            }
        }
        if !self.iterate(self.first_artificial, pivot_eps)? {
            return Ok(LpOutcome {
                status: LpStatus::Unbounded,
                point: None,
                value: None,
            });
        }

        let point = self.extract_point();
        let value = objective
            .iter()
            .zip(point.iter())
            .map(|(&c, &x)| c * x)
            .fold(S::zero(), |acc, t| acc + t);
        Ok(LpOutcome {
            status: LpStatus::Optimal,
            point: Some(point),
            value: Some(value),
        })
    }

    /// Bland's rule iteration; `allowed` bounds the entering columns.
    /// Returns false on unboundedness.
    fn iterate(&mut self, allowed: usize, pivot_eps: S) -> Result<bool, LpError> {
        let m = self.basis.len();
        let total = self.columns.len();
        let cost_eps = S::c(1e-13);
        'pivots: for _ in 0..MAX_PIVOTS {
            // Bland's entering rule: the first improving admissible column
            // with a usable pivot. A column whose positive entries all sit
            // below the pivot threshold is numerically dead (it stems from a
            // deliberately down-scaled row); stepping on it would wreck the
            // tableau, so it is skipped. Only a column with no positive
            // entries at all witnesses unboundedness.
            let mut truly_unbounded = false;
            for j in 0..allowed {
                if self.tableau[m][j] >= -cost_eps
                    || (j >= self.first_artificial && self.banned[j - self.first_artificial])
                {
                    continue;
                }
                // Ratio pass: the minimum, then the smallest basis index
                // among the rows attaining it (Bland's anti-cycling choice;
                // the repeated division is bitwise-reproducible).
                let mut min_ratio: Option<S> = None;
                let mut max_entry = S::zero();
                for i in 0..m {
                    let a = self.tableau[i][j];
                    max_entry = max_entry.max(a);
                    if a > pivot_eps {
                        let ratio = self.tableau[i][total] / a;
                        if min_ratio.map_or(true, |r| ratio < r) {
                            min_ratio = Some(ratio);
                        }
                    }
                }
                let Some(min_ratio) = min_ratio else {
                    // A descent ray needs a meaningfully negative cost: the
                    // sub-tolerance leftovers near optimality are roundoff,
                    // not directions.
                    if max_entry <= S::zero() && self.tableau[m][j] < -S::c(1e-7) {
                        truly_unbounded = true;
                    }
                    continue;
                };
                let leaving = (0..m)
                    .filter(|&i| {
                        let a = self.tableau[i][j];
                        a > pivot_eps && self.tableau[i][total] / a <= min_ratio
                    })
                    .min_by_key(|&i| self.basis[i])
                    .expect("a minimum-ratio row exists");
                let left = self.basis[leaving];
                self.pivot(leaving, j);
                // Artificials never need to re-enter; banning them cuts
                // degenerate churn in phase 1.
                if left >= self.first_artificial {
                    self.banned[left - self.first_artificial] = true;
                }
                continue 'pivots;
            }
            return Ok(!truly_unbounded);
        }
        Err(LpError::IterationLimit)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let m = self.basis.len();
        let total = self.columns.len();
        let snap = S::c(1e-11);
        let pivot = self.tableau[row][col];
        for j in 0..=total {
            self.tableau[row][j] = self.tableau[row][j] / pivot;
        }
        self.tableau[row][col] = S::one();
        for i in 0..=m {
            if i == row {
                continue;
            }
            let factor = self.tableau[i][col];
            if factor.abs() > S::zero() {
                for j in 0..=total {
                    let upd = self.tableau[row][j] * factor;
                    let next = self.tableau[i][j] - upd;
                    // Catastrophic cancellation leaves garbage that feeds
                    // cycling; clamp values that are pure roundoff relative
                    // to what was just subtracted.
                    self.tableau[i][j] = if next.abs() <= snap * upd.abs() {
                        S::zero()
                    } else {
                        next
                    };
                }
                self.tableau[i][col] = S::zero();
            }
        }
        // Degenerate vertices should be exact: tiny right-hand sides are
        // noise and make the ratio test wander instead of anti-cycling.
        let rhs_snap = S::c(1e-12);
        for i in 0..m {
            if self.tableau[i][total].abs() <= rhs_snap {
                self.tableau[i][total] = S::zero();
            }
        }
        self.basis[row] = col;
    }

    /// Pivot basic artificials out at (near-)zero level so phase 2 cannot
    /// lift them. The pivot must be well-scaled: the artificial may carry a
    /// sub-tolerance residual, and dividing it by a near-zero coefficient
    /// would wreck the basis.
    fn expel_artificials(&mut self) {
        let m = self.basis.len();
        for i in 0..m {
            if self.basis[i] < self.first_artificial {
                continue;
            }
            let col = (0..self.first_artificial).max_by(|&a, &b| {
                self.tableau[i][a]
                    .abs()
                    .partial_cmp(&self.tableau[i][b].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            match col {
                Some(col) if self.tableau[i][col].abs() > S::c(1e-7) => self.pivot(i, col),
                // Near-redundant row: the artificial stays basic at its tiny
                // value and cannot win a ratio test.
                _ => {}
            }
        }
    }

    fn extract_point(&self) -> Vector<S> {
        let m = self.basis.len();
        let total = self.columns.len();
        let mut std_values = vec![S::zero(); total];
        for i in 0..m {
            std_values[self.basis[i]] = self.tableau[i][total];
        }
        let mut x = Vector::zeros(self.num_vars);
        for (j, role) in self.columns.iter().enumerate().take(self.num_structural) {
            let v = std_values[j];
            match *role {
                ColumnRole::Shifted { var, offset } => x[var] = offset + v,
                ColumnRole::Flipped { var, offset } => x[var] = offset - v,
                ColumnRole::PosPart { var } => x[var] = x[var] + v,
                ColumnRole::NegPart { var } => x[var] = x[var] - v,
                _ => {}
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = DEFAULT_FEAS_TOL;

    #[test]
    fn minimize_with_lower_bound() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.set_objective(&[1.0]).unwrap();
        lp.set_lower(0, 1.0);
        let out = lp.solve(TOL).unwrap();
        let (point, value) = out.optimal().unwrap();
        assert!((point[0] - 1.0).abs() < 1e-9);
        assert!((value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_bounds_infeasible() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.set_lower(0, 0.0);
        lp.add_le(&[1.0], -1.0).unwrap();
        let out = lp.solve(TOL).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.set_objective(&[-1.0]).unwrap();
        lp.set_lower(0, 0.0);
        let out = lp.solve(TOL).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn feasibility_wrapper() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.set_lower(0, 0.0);
        lp.set_upper(0, 1.0);
        let witness = lp.feasible(TOL).unwrap().unwrap();
        assert!(witness[0] >= -1e-9 && witness[0] <= 1.0 + 1e-9);

        let mut lp = LinearProgram::<f64>::new(1);
        lp.set_lower(0, 2.0);
        lp.add_le(&[1.0], 1.0).unwrap();
        assert!(lp.feasible(TOL).unwrap().is_none());

        let lp = LinearProgram::<f64>::new(1);
        let witness = lp.feasible(TOL).unwrap().unwrap();
        assert_eq!(witness[0], 0.0);
    }

    #[test]
    fn equality_with_free_variables() {
        // minimize x + y subject to x - y = 3, x,y free: unbounded.
        let mut lp = LinearProgram::<f64>::new(2);
        lp.set_objective(&[1.0, 1.0]).unwrap();
        lp.add_eq(&[1.0, -1.0], 3.0).unwrap();
        assert_eq!(lp.solve(TOL).unwrap().status, LpStatus::Unbounded);

        // Adding y >= 0 pins the optimum at (3, 0).
        lp.set_lower(1, 0.0);
        let out = lp.solve(TOL).unwrap();
        let (point, value) = out.optimal().unwrap();
        assert!((point[0] - 3.0).abs() < 1e-9 && point[1].abs() < 1e-9);
        assert!((value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_needs_artificial() {
        // x <= -1, x free: feasible with x = -1 optimum for objective x... maximize -x.
        let mut lp = LinearProgram::<f64>::new(1);
        lp.set_objective(&[-1.0]).unwrap();
        lp.add_le(&[1.0], -1.0).unwrap();
        lp.set_lower(0, -5.0);
        let out = lp.solve(TOL).unwrap();
        let (point, _) = out.optimal().unwrap();
        assert!((point[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn determinism() {
        let build = || {
            let mut lp = LinearProgram::<f64>::new(3);
            lp.set_objective(&[1.0, 2.0, -1.0]).unwrap();
            lp.add_eq(&[1.0, 1.0, 1.0], 1.0).unwrap();
            lp.add_le(&[1.0, -1.0, 0.0], 0.5).unwrap();
            for j in 0..3 {
                lp.set_lower(j, 0.0);
            }
            lp
        };
        let a = build().solve(TOL).unwrap();
        let b = build().solve(TOL).unwrap();
        let (pa, va) = a.optimal().unwrap();
        let (pb, vb) = b.optimal().unwrap();
        assert_eq!(pa.as_slice(), pb.as_slice());
        assert_eq!(va, vb);
    }
}
