//! Moduli of continuity: concave, nondecreasing functions with `w(0) = 0`,
//! used to build Hölder-type pseudometrics such as `(x, y) -> w(|x - y|)`.

use crate::error::{Error, Result};

/// A modulus of continuity. `Power { alpha }` is `t^alpha` with
/// `0 < alpha <= 1`; `Tabulated` interpolates piecewise-linearly between
/// knots and extends with the final slope held constant at zero beyond the
/// last knot (constant extension keeps concavity). The `capped` flag
/// replaces `w` by `min(1, w)`, which is again a modulus and is the
/// normalization required wherever a modulus enters a pair-space metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Modulus {
    kind: ModulusKind,
    capped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModulusKind {
    Power { alpha: f64 },
    Tabulated { knots: Vec<(f64, f64)> },
}

impl Modulus {
    /// The modulus `t -> t^alpha`, `0 < alpha <= 1`. `alpha = 1` is the
    /// Lipschitz modulus and is evaluated exactly as `t`.
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Input(format!(
                "power modulus needs 0 < alpha <= 1, got {alpha}"
            )));
        }
        Ok(Self { kind: ModulusKind::Power { alpha }, capped: false })
    }

    /// A piecewise-linear modulus through `(0, 0)` and the given knots.
    /// Knots must have strictly increasing arguments, positive values,
    /// nondecreasing values, and nonincreasing slopes (concavity).
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Input("tabulated modulus needs at least one knot".into()));
        }
        let mut prev = (0.0f64, 0.0f64);
        let mut prev_slope = f64::INFINITY;
        for &(t, v) in &knots {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::Input("modulus knots must be finite".into()));
            }
            if t <= prev.0 {
                return Err(Error::Input("modulus knots must have increasing arguments".into()));
            }
            if v < prev.1 {
                return Err(Error::Input("modulus values must be nondecreasing".into()));
            }
            if v <= 0.0 {
                return Err(Error::Input("modulus values must be positive beyond zero".into()));
            }
            let slope = (v - prev.1) / (t - prev.0);
            if slope > prev_slope * (1.0 + 1e-12) {
                return Err(Error::Input("modulus must be concave (nonincreasing slopes)".into()));
            }
            prev_slope = slope;
            prev = (t, v);
        }
        Ok(Self { kind: ModulusKind::Tabulated { knots }, capped: false })
    }

    /// The same modulus capped at 1: `t -> min(1, w(t))`.
    pub fn normalized(&self) -> Self {
        Self { kind: self.kind.clone(), capped: true }
    }

    pub fn is_normalized(&self) -> bool {
        self.capped
    }

    /// Evaluate the modulus. Arguments at or below zero give zero; an
    /// infinite argument gives the supremum (1 when capped).
    pub fn eval(&self, t: f64) -> f64 {
        assert!(!t.is_nan(), "modulus argument must not be NaN");
        if t <= 0.0 {
            return 0.0;
        }
        let raw = match &self.kind {
            ModulusKind::Power { alpha } => {
                if *alpha == 1.0 {
                    t
                } else if t.is_infinite() {
                    f64::INFINITY
                } else {
                    t.powf(*alpha)
                }
            }
            ModulusKind::Tabulated { knots } => {
                if t.is_infinite() {
                    knots.last().map(|&(_, v)| v).unwrap_or(0.0)
                } else {
                    let mut prev = (0.0f64, 0.0f64);
                    let mut out = None;
                    for &(kt, kv) in knots {
                        if t <= kt {
                            out = Some(prev.1 + (kv - prev.1) * (t - prev.0) / (kt - prev.0));
                            break;
                        }
                        prev = (kt, kv);
                    }
                    out.unwrap_or(prev.1)
                }
            }
        };
        if self.capped {
            raw.min(1.0)
        } else {
            raw
        }
    }

    /// Audit the modulus axioms on a logarithmic grid: vanishing only at
    /// zero, monotonicity, and midpoint concavity. Complements the
    /// constructor checks for externally supplied parameters.
    pub fn audit(&self, t_max: f64) -> Result<()> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Input("audit range must be positive and finite".into()));
        }
        let tiny = (2.0f64).powi(-30);
        if self.eval(tiny) <= 0.0 {
            return Err(Error::Input("modulus must be positive for positive arguments".into()));
        }
        let grid: Vec<f64> = (0..1000)
            .map(|i| t_max * (i as f64 / 999.0).powi(3))
            .chain([tiny])
            .collect();
        let mut sorted = grid;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fb < fa - 1e-12 * (1.0 + fa) {
                return Err(Error::Input("modulus must be nondecreasing".into()));
            }
            let mid = 0.5 * (a + b);
            let fmid = self.eval(mid);
            if fmid < 0.5 * (fa + fb) - 1e-9 * (1.0 + fa + fb) {
                return Err(Error::Input("modulus must be concave".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lipschitz_power_is_exact() {
        let w = Modulus::power(1.0).unwrap();
        // Bit-exact identity, not an approximation through powf.
        assert_eq!(w.eval(0.3), 0.3);
        assert_eq!(w.eval(7.25), 7.25);
        assert_eq!(w.eval(0.0), 0.0);
    }

    #[test]
    fn capping_applies_after_evaluation() {
        let w = Modulus::power(0.5).unwrap();
        assert!((w.eval(4.0) - 2.0).abs() < 1e-15);
        let c = w.normalized();
        assert_eq!(c.eval(4.0), 1.0);
        assert!((c.eval(0.25) - 0.5).abs() < 1e-15);
        assert_eq!(c.eval(f64::INFINITY), 1.0);
    }

    #[test]
    fn tabulated_interpolates_and_extends_flat() {
        let w = Modulus::tabulated(vec![(1.0, 1.0), (3.0, 2.0)]).unwrap();
        assert!((w.eval(0.5) - 0.5).abs() < 1e-15);
        assert!((w.eval(2.0) - 1.5).abs() < 1e-15);
        assert_eq!(w.eval(10.0), 2.0);
        w.audit(5.0).unwrap();
    }

    #[test]
    fn rejects_convex_tables_and_bad_powers() {
        assert!(Modulus::tabulated(vec![(1.0, 1.0), (2.0, 3.0)]).is_err());
        assert!(Modulus::power(1.5).is_err());
        assert!(Modulus::power(0.0).is_err());
    }

    #[test]
    fn audit_passes_for_valid_powers() {
        for alpha in [0.25, 0.5, 0.75, 1.0] {
            Modulus::power(alpha).unwrap().audit(10.0).unwrap();
            Modulus::power(alpha).unwrap().normalized().audit(10.0).unwrap();
        }
    }

    #[test]
    fn subadditivity_follows_from_the_axioms() {
        // w(a + b) <= w(a) + w(b) for concave w with w(0) = 0; spot-check,
        // since the pair-space triangle inequality rests on it.
        let w = Modulus::power(0.5).unwrap().normalized();
        for a in [0.1, 0.5, 2.0] {
            for b in [0.05, 1.0, 3.0] {
                assert!(w.eval(a + b) <= w.eval(a) + w.eval(b) + 1e-12);
            }
        }
    }
}
