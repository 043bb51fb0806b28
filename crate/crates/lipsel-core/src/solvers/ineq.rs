//! Linear inequality systems, Fourier–Motzkin projection, and LP-certified
//! redundancy removal.
//!
//! A system is a conjunction of rows `coeffs . t <= rhs`. Systems arising from
//! slab intersections are symmetric about the origin (rows come in `(a, c)`,
//! `(-a, c)` pairs); the `symmetric` flag records this and is preserved by
//! elimination, which lets downstream code read off pairs of parallel faces.

use crate::error::{Error, Result};
use crate::solvers::lp::{LpBuilder, LpOutcome, solve_lp};

/// Coefficients below this fraction of the row's largest entry are treated as
/// exact zeros when classifying rows for elimination.
const ZERO_TOL: f64 = 1e-11;

/// A conjunction of linear inequalities `coeffs . t <= rhs` over `n_vars`
/// free variables.
#[derive(Clone, Debug)]
pub struct InequalitySystem {
    pub n_vars: usize,
    /// Rows as `(coeffs, rhs)`.
    pub rows: Vec<(Vec<f64>, f64)>,
    /// True when the solution set is symmetric about the origin and the rows
    /// come in `(a, c)` / `(-a, c)` pairs.
    pub symmetric: bool,
}

impl InequalitySystem {
    /// Build a system, validating row shapes and (when `symmetric` is set)
    /// the presence of each row's mirror.
    pub fn new(n_vars: usize, rows: Vec<(Vec<f64>, f64)>, symmetric: bool) -> Result<Self> {
        for (coeffs, rhs) in &rows {
            if coeffs.len() != n_vars {
                return Err(Error::Input(format!(
                    "inequality row has {} coefficients, expected {n_vars}",
                    coeffs.len()
                )));
            }
            if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Input("inequality rows must be finite".into()));
            }
        }
        let sys = Self { n_vars, rows, symmetric };
        if symmetric && !sys.mirrors_present() {
            return Err(Error::Input(
                "symmetric flag set but some row lacks its mirror (-a, c)".into(),
            ));
        }
        Ok(sys)
    }

    /// The canonical infeasible system `0 <= -1` in `n_vars` variables.
    pub fn infeasible(n_vars: usize) -> Self {
        Self {
            n_vars,
            rows: vec![(vec![0.0; n_vars], -1.0)],
            symmetric: false,
        }
    }

    /// True when the system is the canonical infeasible encoding or contains
    /// a row `0 . t <= c` with `c < 0`.
    pub fn is_trivially_infeasible(&self) -> bool {
        self.rows.iter().any(|(a, c)| {
            *c < 0.0 && a.iter().all(|v| v.abs() <= ZERO_TOL * (1.0 + c.abs()))
        })
    }

    fn mirrors_present(&self) -> bool {
        let matches_mirror = |a: &[f64], c: f64, b: &[f64], d: f64| {
            let scale = 1.0 + crate::max_norm(a).max(c.abs());
            (c - d).abs() <= 1e-9 * scale
                && a.iter().zip(b).all(|(x, y)| (x + y).abs() <= 1e-9 * scale)
        };
        self.rows.iter().all(|(a, c)| {
            self.rows
                .iter()
                .any(|(b, d)| matches_mirror(a, *c, b, *d))
        })
    }

    /// Normalize a row to unit max-coefficient (pure rescaling by a positive
    /// scalar, so the inequality is unchanged). Zero rows are left as-is.
    fn normalized(coeffs: &[f64], rhs: f64) -> (Vec<f64>, f64) {
        let m = crate::max_norm(coeffs);
        if m <= 0.0 {
            return (coeffs.to_vec(), rhs);
        }
        (coeffs.iter().map(|c| c / m).collect(), rhs / m)
    }

    /// True when the origin satisfies every row.
    pub fn contains_origin(&self, tol: f64) -> bool {
        self.rows.iter().all(|(_, c)| *c >= -tol)
    }

    /// Membership test for a point.
    pub fn contains(&self, t: &[f64], tol: f64) -> bool {
        self.rows
            .iter()
            .all(|(a, c)| crate::dot(a, t) <= c + tol * (1.0 + c.abs()))
    }
}

/// Eliminate the variables `vars` (indices into the system's variable list)
/// by Fourier–Motzkin, running [`remove_redundant`] after each single-variable
/// step to control row growth. The result is the exact projection of the
/// solution set onto the remaining variables, expressed over the same
/// `n_vars`-dimensional coordinate space with zero coefficients on the
/// eliminated variables.
///
/// An empty projection is encoded by the canonical infeasible row `0 <= -1`.
/// When the input is symmetric about the origin the output keeps the
/// `symmetric` flag (the mirror of every generated combination is itself a
/// generated combination).
pub fn fm_eliminate(sys: &InequalitySystem, vars: &[usize], feas_tol: f64) -> Result<InequalitySystem> {
    for &v in vars {
        if v >= sys.n_vars {
            return Err(Error::Input(format!(
                "cannot eliminate variable {v} from a {}-variable system",
                sys.n_vars
            )));
        }
    }
    let mut current = sys.clone();
    for &v in vars {
        current = eliminate_one(&current, v)?;
        if current.is_trivially_infeasible() {
            return Ok(InequalitySystem::infeasible(sys.n_vars));
        }
        current = remove_redundant(&current, feas_tol)?;
    }
    Ok(current)
}

fn eliminate_one(sys: &InequalitySystem, var: usize) -> Result<InequalitySystem> {
    let mut uppers: Vec<(Vec<f64>, f64)> = Vec::new(); // coefficient on var > 0
    let mut lowers: Vec<(Vec<f64>, f64)> = Vec::new(); // coefficient on var < 0
    let mut neutral: Vec<(Vec<f64>, f64)> = Vec::new();
    for (a, c) in &sys.rows {
        let (mut a, c) = InequalitySystem::normalized(a, *c);
        let coeff = a[var];
        if coeff.abs() <= ZERO_TOL {
            a[var] = 0.0;
            neutral.push((a, c));
        } else if coeff > 0.0 {
            uppers.push((a, c));
        } else {
            lowers.push((a, c));
        }
    }
    let mut rows = neutral;
    // Scale each upper row by 1/coeff and each lower row by -1/coeff so the
    // variable has coefficient +1 and -1 respectively, then add pairwise.
    for (ua, uc) in &uppers {
        let s = ua[var];
        let un: Vec<f64> = ua.iter().map(|x| x / s).collect();
        let ucn = uc / s;
        for (la, lc) in &lowers {
            let s2 = -la[var];
            let ln: Vec<f64> = la.iter().map(|x| x / s2).collect();
            let lcn = lc / s2;
            let mut sum: Vec<f64> = un.iter().zip(&ln).map(|(x, y)| x + y).collect();
            sum[var] = 0.0;
            let (mut norm, rhs) = InequalitySystem::normalized(&sum, ucn + lcn);
            // Drop rows that became vacuous (0 <= nonnegative) after the
            // combination; keep genuine and infeasible rows.
            let zero = norm.iter().all(|x| x.abs() <= ZERO_TOL);
            if zero {
                if rhs < -1e-9 {
                    return Ok(InequalitySystem::infeasible(sys.n_vars));
                }
                continue;
            }
            for x in norm.iter_mut() {
                if x.abs() <= ZERO_TOL {
                    *x = 0.0;
                }
            }
            rows.push((norm, rhs));
        }
    }
    // If one side is empty the variable is unbounded in that direction and
    // only the neutral rows survive, which is already what `rows` holds.
    Ok(InequalitySystem {
        n_vars: sys.n_vars,
        rows,
        symmetric: sys.symmetric,
    })
}

/// Remove rows that are implied by the rest of the system, each removal
/// certified by an LP (`max a_i . t` over the other rows stays `<= c_i`).
/// Symmetric systems are processed pair-by-pair so mirrors are removed
/// jointly and the symmetry invariant is preserved.
pub fn remove_redundant(sys: &InequalitySystem, feas_tol: f64) -> Result<InequalitySystem> {
    if sys.rows.len() <= 1 {
        return Ok(sys.clone());
    }
    if sys.is_trivially_infeasible() {
        return Ok(InequalitySystem::infeasible(sys.n_vars));
    }
    if sys.symmetric {
        return remove_redundant_symmetric(sys, feas_tol);
    }
    let mut keep: Vec<bool> = vec![true; sys.rows.len()];
    for i in 0..sys.rows.len() {
        keep[i] = false;
        if !row_redundant(sys, &keep, i, feas_tol)? {
            keep[i] = true;
        }
    }
    let rows: Vec<(Vec<f64>, f64)> = sys
        .rows
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(InequalitySystem {
        n_vars: sys.n_vars,
        rows,
        symmetric: false,
    })
}

fn remove_redundant_symmetric(sys: &InequalitySystem, feas_tol: f64) -> Result<InequalitySystem> {
    // Pair each row with its mirror; test one representative per pair and
    // keep or drop both together (the feasible set is symmetric, so a row is
    // redundant exactly when its mirror is).
    let n = sys.rows.len();
    let mut partner: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        if partner[i].is_some() {
            continue;
        }
        let (a, c) = &sys.rows[i];
        let scale = 1.0 + crate::max_norm(a) + c.abs();
        for j in (i + 1)..n {
            if partner[j].is_some() {
                continue;
            }
            let (b, d) = &sys.rows[j];
            let mirror = (c - d).abs() <= 1e-9 * scale
                && a.iter().zip(b).all(|(x, y)| (x + y).abs() <= 1e-9 * scale);
            if mirror {
                partner[i] = Some(j);
                partner[j] = Some(i);
                break;
            }
        }
    }
    if partner.iter().any(|p| p.is_none()) {
        // Pairing failed (should not happen for systems built by this
        // crate); fall back to the order-preserving scan without the flag.
        let mut unsym = sys.clone();
        unsym.symmetric = false;
        return remove_redundant(&unsym, feas_tol);
    }
    let mut keep = vec![true; n];
    for i in 0..n {
        let j = partner[i].unwrap();
        if j < i || !keep[i] {
            continue;
        }
        keep[i] = false;
        keep[j] = false;
        let redundant = row_redundant(sys, &keep, i, feas_tol)?;
        if !redundant {
            keep[i] = true;
            keep[j] = true;
        }
    }
    let rows: Vec<(Vec<f64>, f64)> = sys
        .rows
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(InequalitySystem {
        n_vars: sys.n_vars,
        rows,
        symmetric: true,
    })
}

/// True when row `i` is implied by the rows marked `true` in `keep`.
fn row_redundant(
    sys: &InequalitySystem,
    keep: &[bool],
    i: usize,
    feas_tol: f64,
) -> Result<bool> {
    let (a, c) = &sys.rows[i];
    let mut b = LpBuilder::new(sys.n_vars).minimize(a.iter().map(|x| -x).collect());
    let mut any = false;
    for (j, (aj, cj)) in sys.rows.iter().enumerate() {
        if keep[j] {
            b.le(aj.clone(), *cj);
            any = true;
        }
    }
    if !any {
        // Nothing left to imply the row; only a vacuous row is redundant.
        return Ok(a.iter().all(|x| x.abs() <= ZERO_TOL) && *c >= -feas_tol);
    }
    match solve_lp(&b.build(), feas_tol)? {
        LpOutcome::Optimal { value, .. } => {
            let max_val = -value;
            Ok(max_val <= c + feas_tol * (1.0 + c.abs()))
        }
        LpOutcome::Unbounded => Ok(false),
        // The remaining rows are infeasible; the whole system is empty and
        // every row is formally redundant. Keep the row so the emptiness
        // stays visible rather than silently deleting everything.
        LpOutcome::Infeasible => Ok(false),
    }
}
