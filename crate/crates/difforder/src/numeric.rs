//! Advisory floating-point checks.
//!
//! Everything in this module is a sanity layer on top of the exact
//! certificates: random-point evaluation of residuals that are already
//! known to vanish identically, and a Runge-Kutta integration that watches
//! a claimed first integral along the flow.  A failure here points at a
//! bug worth investigating; a pass adds no certainty beyond what the exact
//! checks established.  No classification decision ever depends on these
//! numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::Poly2;
use crate::rat::{sample_rat, to_f64, Rat};
use crate::ratfunc::RatFunc;
use crate::vectorfield::VectorField;

/// Height bound for randomly sampled evaluation points.
const POINT_HEIGHT: u64 = 100;

/// Outcome of a batch of random-point evaluations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointCheck {
    pub points_tested: u32,
    /// Largest absolute value seen across all tested points.
    pub max_abs: f64,
}

impl PointCheck {
    pub fn is_clean(&self) -> bool {
        self.points_tested > 0 && self.max_abs == 0.0
    }
}

/// Evaluates `f` at random rational points, skipping poles, and reports
/// the largest magnitude seen.  Evaluation itself is exact rational
/// arithmetic; only the reported magnitude is floating point.
pub fn spot_check_zero(f: &RatFunc, trials: u32, seed: u64) -> PointCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tested = 0u32;
    let mut max_abs = 0.0f64;
    let mut attempts = 0u32;
    while tested < trials && attempts < trials.saturating_mul(10).max(10) {
        attempts += 1;
        let p = (
            sample_rat(&mut rng, POINT_HEIGHT),
            sample_rat(&mut rng, POINT_HEIGHT),
        );
        match f.eval(&p) {
            Err(_) => continue,
            Ok(v) => {
                tested += 1;
                let a = to_f64(&v).abs();
                if a > max_abs {
                    max_abs = a;
                }
            }
        }
    }
    PointCheck {
        points_tested: tested,
        max_abs,
    }
}

fn poly_f64(p: &Poly2, x: f64, y: f64) -> f64 {
    p.iter()
        .map(|(m, c)| to_f64(c) * x.powi(m.e1 as i32) * y.powi(m.e2 as i32))
        .sum()
}

/// Floating-point evaluation of a rational function; `None` near the
/// denominator's zero set.
pub fn eval_f64(f: &RatFunc, x: f64, y: f64) -> Option<f64> {
    let den = poly_f64(f.den(), x, y);
    if den.abs() < 1e-12 {
        return None;
    }
    Some(poly_f64(f.num(), x, y) / den)
}

/// Integrates the flow with classical fourth-order Runge-Kutta and reports
/// how far `w` drifts from its starting value.  `None` when the trajectory
/// escapes or runs too close to a pole of `w`.
pub fn flow_drift(
    field: &VectorField,
    w: &RatFunc,
    start: (f64, f64),
    t_end: f64,
    step: f64,
) -> Option<f64> {
    assert!(step > 0.0 && t_end > 0.0);
    let rhs = |x: f64, y: f64| -> (f64, f64) {
        (poly_f64(field.x1(), x, y), poly_f64(field.x2(), x, y))
    };
    let w0 = eval_f64(w, start.0, start.1)?;
    let steps = (t_end / step).round().max(1.0) as u64;
    let h = t_end / steps as f64;
    let (mut x, mut y) = start;
    for _ in 0..steps {
        let (k1x, k1y) = rhs(x, y);
        let (k2x, k2y) = rhs(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
        let (k3x, k3y) = rhs(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
        let (k4x, k4y) = rhs(x + h * k3x, y + h * k3y);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        if !x.is_finite() || !y.is_finite() || x.abs() > 1e9 || y.abs() > 1e9 {
            return None;
        }
    }
    let w1 = eval_f64(w, x, y)?;
    Some((w1 - w0).abs())
}

/// A default starting point for drift checks: deterministic, rational, and
/// chosen to avoid poles of `w` and zeros of the field.
pub fn drift_start(field: &VectorField, w: &RatFunc, seed: u64) -> Option<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let p = (sample_rat(&mut rng, 10), sample_rat(&mut rng, 10));
        if w.eval(&p).is_err() {
            continue;
        }
        if field.x1().eval(&p) == Rat::from_integer(0.into())
            && field.x2().eval(&p) == Rat::from_integer(0.into())
        {
            continue;
        }
        return Some((to_f64(&p.0), to_f64(&p.1)));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;

    fn x1() -> Poly2 {
        Poly2::var(Var::X1)
    }

    fn x2() -> Poly2 {
        Poly2::var(Var::X2)
    }

    #[test]
    fn conserved_quantity_stays_put_under_rk4() {
        // x1' = 1, x2' = 2 x1 conserves x2 - x1^2; one time unit at step
        // 1e-3 keeps the drift at the 1e-8 scale demanded of the scheme.
        let field = VectorField::new(Poly2::one(), x1().scale(&crate::rat::rat_i(2))).unwrap();
        let w = RatFunc::from_poly(&x2() - &(&x1() * &x1()));
        let drift = flow_drift(&field, &w, (0.0, 1.0), 1.0, 1e-3).unwrap();
        assert!(drift <= 1e-8, "drift {drift}");
    }

    #[test]
    fn non_conserved_quantity_shows_large_drift() {
        let field = VectorField::new(Poly2::one(), x1().scale(&crate::rat::rat_i(2))).unwrap();
        let fake = RatFunc::from_poly(x2());
        let drift = flow_drift(&field, &fake, (0.0, 1.0), 1.0, 1e-3).unwrap();
        assert!(drift > 0.5, "x2 grows by t^2 along this flow, got {drift}");
    }

    #[test]
    fn spot_checks_separate_zero_from_nonzero() {
        let zero = &RatFunc::from_poly(&x1() + &x2()) - &RatFunc::from_poly(&x2() + &x1());
        let check = spot_check_zero(&zero, 25, 7);
        assert_eq!(check.points_tested, 25);
        assert!(check.is_clean());

        let nonzero = RatFunc::new(Poly2::one(), x1().clone()).unwrap();
        let check = spot_check_zero(&nonzero, 25, 7);
        assert_eq!(check.points_tested, 25);
        assert!(!check.is_clean());
        assert!(check.max_abs > 0.0);
    }

    #[test]
    fn pole_skipping_does_not_stall() {
        // Denominator x1 * x2 has poles on both axes; random rational
        // points still land off them essentially always.
        let f = RatFunc::new(Poly2::one(), &x1() * &x2()).unwrap();
        let check = spot_check_zero(&f, 10, 3);
        assert!(check.points_tested > 0);
    }

    #[test]
    fn escape_to_infinity_reports_none() {
        // x1' = x1^2 blows up in finite time from x1 = 1.
        let field = VectorField::new(&x1() * &x1(), Poly2::zero()).unwrap();
        let w = RatFunc::from_poly(x2());
        assert_eq!(flow_drift(&field, &w, (1.0, 0.0), 2.0, 1e-3), None);
    }

    #[test]
    fn drift_start_avoids_poles() {
        let field = VectorField::new(Poly2::one(), x2()).unwrap();
        let w = RatFunc::new(Poly2::one(), x1().clone()).unwrap();
        let (sx, sy) = drift_start(&field, &w, 1).unwrap();
        assert!(sx.is_finite() && sy.is_finite());
        assert!(sx != 0.0, "start must dodge the pole line x1 = 0");
    }
}
