//! Dense two-phase simplex for small linear programs.
//!
//! All variables are free (the solver splits them into nonnegative pairs
//! internally), constraints are `<=` or `==`, and the objective is always
//! minimized. Pivoting uses Bland's rule throughout, which makes every run
//! deterministic and cycle-free; the instances produced by this crate are
//! desk-scale (tens of variables, hundreds of rows), so the dense tableau is
//! the simplest adequate representation.

use crate::error::{Error, Result};

/// Relation of a single constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `coeffs . x <= rhs`
    Le,
    /// `coeffs . x == rhs`
    Eq,
}

/// One constraint row `coeffs . x (<=|==) rhs`.
#[derive(Clone, Debug)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program `min objective . x` over free variables subject to rows.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
}

/// Outcome of a solve: proven optimum, proven infeasibility, or a certified
/// unbounded ray direction for the objective.
#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    /// The optimal point, or `None` for infeasible/unbounded outcomes.
    pub fn point(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

/// Incremental builder for [`LinearProgram`]s.
#[derive(Clone, Debug)]
pub struct LpBuilder {
    lp: LinearProgram,
}

impl LpBuilder {
    pub fn new(n_vars: usize) -> Self {
        Self {
            lp: LinearProgram {
                n_vars,
                objective: vec![0.0; n_vars],
                rows: Vec::new(),
            },
        }
    }

    pub fn minimize(mut self, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), self.lp.n_vars);
        self.lp.objective = objective;
        self
    }

    pub fn le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.lp.n_vars);
        self.lp.rows.push(LpRow { coeffs, relation: Relation::Le, rhs });
        self
    }

    pub fn ge(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        let neg: Vec<f64> = coeffs.iter().map(|c| -c).collect();
        self.le(neg, -rhs)
    }

    pub fn eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.lp.n_vars);
        self.lp.rows.push(LpRow { coeffs, relation: Relation::Eq, rhs });
        self
    }

    pub fn build(self) -> LinearProgram {
        self.lp
    }
}

/// Magnitude below which a tableau entry is unusable as a pivot.
const PIVOT_TOL: f64 = 1e-10;
/// Threshold on reduced costs for declaring optimality.
const COST_TOL: f64 = 1e-9;
/// Safety cap on pivot count; Bland's rule terminates finitely, so hitting
/// this indicates numerical trouble rather than cycling.
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColKind {
    /// Positive or negative part of an original free variable (index, sign).
    Split(usize, bool),
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows x (cols + 1)`; the last entry of each row is the rhs.
    a: Vec<Vec<f64>>,
    kind: Vec<ColKind>,
    basis: Vec<usize>,
    n_cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.a[i][self.n_cols]
    }

    fn pivot(&mut self, row: usize, col: usize, cost: &mut [f64]) {
        let piv = self.a[row][col];
        debug_assert!(piv.abs() > PIVOT_TOL);
        let inv = 1.0 / piv;
        for v in self.a[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.a[row].clone();
        for (i, r) in self.a.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, p) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                r[col] = 0.0;
            }
        }
        let factor = cost[col];
        if factor != 0.0 {
            for (c, p) in cost.iter_mut().zip(&pivot_row) {
                *c -= factor * p;
            }
            cost[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Bland's ratio test: among rows attaining the minimum ratio (within a
    /// tiny relative window), pick the one whose basic variable has the
    /// smallest column index.
    fn leaving_row(&self, col: usize) -> Option<usize> {
        let mut best: Option<(f64, usize, usize)> = None; // (ratio, basis col, row)
        for i in 0..self.a.len() {
            let coeff = self.a[i][col];
            if coeff > PIVOT_TOL {
                let ratio = self.rhs(i).max(0.0) / coeff;
                match best {
                    None => best = Some((ratio, self.basis[i], i)),
                    Some((r, b, _)) => {
                        let window = 1e-12 * (1.0 + r.abs());
                        if ratio < r - window || (ratio <= r + window && self.basis[i] < b) {
                            best = Some((ratio.min(r), self.basis[i], i));
                        }
                    }
                }
            }
        }
        best.map(|(_, _, i)| i)
    }

    /// Run simplex iterations on the given cost row until optimality or
    /// unboundedness. `allowed` masks columns permitted to enter the basis.
    fn iterate(&mut self, cost: &mut [f64], allowed: &[bool], budget: &mut usize) -> Result<bool> {
        loop {
            // Bland's entering rule: smallest-index column with negative
            // reduced cost.
            let entering = (0..self.n_cols)
                .find(|&j| allowed[j] && cost[j] < -COST_TOL);
            let Some(col) = entering else {
                return Ok(true);
            };
            let Some(row) = self.leaving_row(col) else {
                return Ok(false); // unbounded in this cost
            };
            if *budget == 0 {
                return Err(Error::Internal(
                    "simplex pivot budget exhausted; the tableau is numerically degenerate".into(),
                ));
            }
            *budget -= 1;
            self.pivot(row, col, cost);
        }
    }
}

/// Re-derive the basic solution at the current basis directly from the
/// untouched constraint rows: solve `B x_B = b` by Gaussian elimination with
/// partial pivoting and map the split columns back to the original free
/// variables. The accumulated tableau drifts by an amount that depends on the
/// pivot sequence; this recomputation makes the returned vertex a function of
/// the basis alone. Returns `None` when the basis matrix is numerically
/// singular, in which case the caller falls back to the tableau's answer.
fn refactored_x(
    pristine: &[Vec<f64>],
    kind: &[ColKind],
    basis: &[usize],
    n_cols: usize,
    n_vars: usize,
) -> Option<Vec<f64>> {
    let m = pristine.len();
    let mut a = vec![vec![0.0f64; m + 1]; m];
    let mut scale = 0.0f64;
    for i in 0..m {
        for (r, &bcol) in basis.iter().enumerate() {
            a[i][r] = pristine[i][bcol];
            scale = scale.max(a[i][r].abs());
        }
        a[i][m] = pristine[i][n_cols];
    }
    let floor = 1e-13 * scale.max(1.0);
    for col in 0..m {
        let mut best = col;
        let mut best_v = a[col][col].abs();
        for r in col + 1..m {
            let v = a[r][col].abs();
            if v > best_v {
                best = r;
                best_v = v;
            }
        }
        if best_v <= floor {
            return None;
        }
        a.swap(col, best);
        let inv = 1.0 / a[col][col];
        for r in col + 1..m {
            let f = a[r][col] * inv;
            if f != 0.0 {
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut xb = vec![0.0f64; m];
    for i in (0..m).rev() {
        let mut v = a[i][m];
        for c in i + 1..m {
            v -= a[i][c] * xb[c];
        }
        xb[i] = v / a[i][i];
    }
    let mut x = vec![0.0f64; n_vars];
    for (r, &bcol) in basis.iter().enumerate() {
        if let ColKind::Split(idx, pos) = kind[bcol] {
            if pos {
                x[idx] += xb[r];
            } else {
                x[idx] -= xb[r];
            }
        }
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Largest relative violation of the original rows at `x`.
fn max_violation(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for row in &lp.rows {
        let ax: f64 = row.coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
        let gap = match row.relation {
            Relation::Le => ax - row.rhs,
            Relation::Eq => (ax - row.rhs).abs(),
        };
        worst = worst.max(gap / (1.0 + row.rhs.abs()));
    }
    worst
}

/// Solve a linear program with the two-phase dense simplex.
///
/// Returns [`LpOutcome::Infeasible`] when phase one cannot drive the
/// artificial variables to zero (within `feas_tol`), [`LpOutcome::Unbounded`]
/// when phase two finds an improving ray, and the optimum otherwise. Pivoting
/// is Bland's rule, so the outcome (including the optimal vertex chosen among
/// ties) is deterministic.
pub fn solve_lp(lp: &LinearProgram, feas_tol: f64) -> Result<LpOutcome> {
    let n = lp.n_vars;
    let m = lp.rows.len();
    for row in &lp.rows {
        if row.coeffs.len() != n {
            return Err(Error::Input(format!(
                "LP row has {} coefficients, expected {}",
                row.coeffs.len(),
                n
            )));
        }
        if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("LP rows must be finite".into()));
        }
    }
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(Error::Input("LP objective must be finite".into()));
    }

    // Column layout: 2n split columns, then one slack per Le row, then one
    // artificial per row that needs it.
    let n_slack = lp.rows.iter().filter(|r| r.relation == Relation::Le).count();
    let mut kind: Vec<ColKind> = Vec::with_capacity(2 * n + n_slack + m);
    for j in 0..n {
        kind.push(ColKind::Split(j, true));
        kind.push(ColKind::Split(j, false));
    }
    let slack_base = kind.len();
    for _ in 0..n_slack {
        kind.push(ColKind::Slack);
    }

    // Assemble rows with rhs normalized nonnegative.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut needs_artificial: Vec<bool> = Vec::with_capacity(m);
    let mut slack_col_of_row: Vec<Option<usize>> = vec![None; m];
    let mut slack_idx = 0usize;
    for (i, row) in lp.rows.iter().enumerate() {
        let flip = row.rhs < 0.0;
        let sgn = if flip { -1.0 } else { 1.0 };
        let mut r = vec![0.0; kind.len() + m + 1];
        for (j, &c) in row.coeffs.iter().enumerate() {
            r[2 * j] = sgn * c;
            r[2 * j + 1] = -sgn * c;
        }
        if row.relation == Relation::Le {
            let col = slack_base + slack_idx;
            slack_idx += 1;
            r[col] = sgn;
            slack_col_of_row[i] = Some(col);
        }
        *r.last_mut().unwrap() = sgn * row.rhs;
        // A slack with +1 coefficient and nonnegative rhs can start basic;
        // everything else gets an artificial.
        needs_artificial.push(!(row.relation == Relation::Le && !flip));
        rows.push(r);
    }

    let art_base = kind.len();
    let mut art_count = 0usize;
    let mut basis: Vec<usize> = vec![usize::MAX; m];
    for i in 0..m {
        if needs_artificial[i] {
            let col = art_base + art_count;
            art_count += 1;
            kind.push(ColKind::Artificial);
            rows[i][col] = 1.0;
            basis[i] = col;
        } else {
            basis[i] = slack_col_of_row[i].expect("slack row");
        }
    }
    let n_cols = kind.len();
    // Trim the over-allocated artificial block, keeping the rhs last.
    for r in rows.iter_mut() {
        let rhs_val = *r.last().unwrap();
        r.truncate(art_base + art_count);
        r.push(rhs_val);
    }

    // Untouched copy of the assembled rows; the final vertex (and any
    // borderline feasibility verdict) is re-derived from these so the answer
    // does not inherit rounding accumulated across the pivot sequence.
    let pristine = rows.clone();
    let mut tab = Tableau { a: rows, kind, basis, n_cols };
    let mut budget = MAX_PIVOTS;

    // Phase one: minimize the sum of artificials.
    if art_count > 0 {
        let mut cost = vec![0.0; n_cols + 1];
        for j in 0..n_cols {
            if tab.kind[j] == ColKind::Artificial {
                cost[j] = 1.0;
            }
        }
        // Price out the starting basis (artificials are basic at rhs).
        for i in 0..m {
            if tab.kind[tab.basis[i]] == ColKind::Artificial {
                let row = tab.a[i].clone();
                for (c, v) in cost.iter_mut().zip(&row) {
                    *c -= v;
                }
            }
        }
        let allowed = vec![true; n_cols];
        let optimal = tab.iterate(&mut cost, &allowed, &mut budget)?;
        if !optimal {
            return Err(Error::Internal(
                "phase one reported unbounded despite a nonnegative objective".into(),
            ));
        }
        let phase1_value = -cost[n_cols];
        if phase1_value > feas_tol {
            // A small positive phase-one value can be an artifact of cost-row
            // drift rather than genuine infeasibility. Before giving up,
            // recompute the basic solution from the pristine rows and measure
            // the true violation of the original constraints.
            let rescued = refactored_x(&pristine, &tab.kind, &tab.basis, n_cols, n)
                .is_some_and(|x| max_violation(lp, &x) <= feas_tol);
            if !rescued {
                return Ok(LpOutcome::Infeasible);
            }
        }
        // Drive basic artificials out; rows where no real column has a usable
        // pivot are redundant and are neutralized in place.
        for i in 0..m {
            if tab.kind[tab.basis[i]] != ColKind::Artificial {
                continue;
            }
            let col = (0..n_cols)
                .find(|&j| tab.kind[j] != ColKind::Artificial && tab.a[i][j].abs() > PIVOT_TOL);
            if let Some(col) = col {
                let mut dummy = vec![0.0; n_cols + 1];
                tab.pivot(i, col, &mut dummy);
            } else {
                // Redundant row: zero it so it can never constrain again.
                for v in tab.a[i].iter_mut() {
                    *v = 0.0;
                }
                tab.a[i][tab.basis[i]] = 1.0;
            }
        }
    }

    // Phase two on the real objective, with artificial columns banned.
    let mut cost = vec![0.0; n_cols + 1];
    for (j, k) in tab.kind.iter().enumerate() {
        if let ColKind::Split(v, pos) = k {
            cost[j] = if *pos { lp.objective[*v] } else { -lp.objective[*v] };
        }
    }
    for i in 0..m {
        let b = tab.basis[i];
        let cb = cost[b];
        if cb != 0.0 {
            let row = tab.a[i].clone();
            for (c, v) in cost.iter_mut().zip(&row) {
                *c -= cb * v;
            }
        }
    }
    let allowed: Vec<bool> = tab.kind.iter().map(|k| *k != ColKind::Artificial).collect();
    let optimal = tab.iterate(&mut cost, &allowed, &mut budget)?;
    if !optimal {
        return Ok(LpOutcome::Unbounded);
    }

    // Recover the original variables, preferring the exact vertex of the
    // final basis over the accumulated tableau rhs.
    let x = refactored_x(&pristine, &tab.kind, &tab.basis, n_cols, n).unwrap_or_else(|| {
        let mut x = vec![0.0; n];
        for i in 0..m {
            let v = tab.rhs(i);
            if let ColKind::Split(idx, pos) = tab.kind[tab.basis[i]] {
                if pos {
                    x[idx] += v;
                } else {
                    x[idx] -= v;
                }
            }
        }
        x
    });
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal { x, value })
}
