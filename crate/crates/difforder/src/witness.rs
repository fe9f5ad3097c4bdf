//! Witness data for each finite order, and its machine verification.
//!
//! A verdict of order `k` is backed by a template differential polynomial
//! `A` that must span a field-invariant line in the derivative tower:
//!
//! * order 0: `A = y_0 - w` for a non-constant rational first integral `w`,
//! * order 1: `A = y_1^{|n|} - a^{sign n}` with `X a = n b_0 a`,
//! * order 2: `A = y_2 - a y_1` with `X a = b_0 a + b_1`,
//! * order 3: `A = 2 y_1 y_3 - 3 y_2^2 - 2 a y_1^2` with `X a = 2 b_0 a + b_2`.
//!
//! Verification runs two independent routes and demands both: the defining
//! first-order identity on the witness function, and emptiness of the
//! reduction residuals of the monic template
//! ([`crate::diffpoly::residual_coeffs`]).  The template route is backed by
//! the expansion certificate, so a passing witness carries a full proof.
//!
//! Orders 1 and 2 also yield a closed-form integrating factor for the
//! trajectory one-form `X2 dx1 - X1 dx2`.  The factor itself may involve a
//! radical or an exponential, so it is returned as a descriptor whose
//! closedness certificate is a rational identity checked exactly here.

use std::collections::BTreeMap;
use std::fmt;

use crate::diffpoly::{residual_coeffs, DiffPoly, MultiIndex};
use crate::poly::{Poly2, Var};
use crate::rat::rat_i;
use crate::ratfunc::RatFunc;
use crate::vectorfield::{BChain, VectorField};

/// Verified data behind a finite-order verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Non-constant `w` with `X w = 0`.
    FirstIntegral { w: RatFunc },
    /// Nonzero `a` and `n != 0` with `X a = n b_0 a`.
    Order1 { a: RatFunc, n: i64 },
    /// `a` with `X a = b_0 a + b_1`.
    Order2 { a: RatFunc },
    /// `a` with `X a = 2 b_0 a + b_2`.
    Order3 { a: RatFunc },
}

impl Witness {
    pub fn order(&self) -> u8 {
        match self {
            Witness::FirstIntegral { .. } => 0,
            Witness::Order1 { .. } => 1,
            Witness::Order2 { .. } => 2,
            Witness::Order3 { .. } => 3,
        }
    }

    /// The template differential polynomial for this witness.
    pub fn template(&self) -> DiffPoly {
        match self {
            Witness::FirstIntegral { w } => DiffPoly::from_terms([
                (MultiIndex::unit(0), RatFunc::one()),
                (MultiIndex::new(vec![]), -w),
            ]),
            Witness::Order1 { a, n } => {
                assert!(*n != 0, "order-1 exponent must be nonzero");
                assert!(!a.is_zero(), "order-1 witness function must be nonzero");
                let k = n.unsigned_abs() as u32;
                let power = a.powi(n.signum()).expect("nonzero by assertion");
                DiffPoly::from_terms([
                    (MultiIndex::new(vec![0, k]), RatFunc::one()),
                    (MultiIndex::new(vec![]), -&power),
                ])
            }
            Witness::Order2 { a } => DiffPoly::from_terms([
                (MultiIndex::unit(2), RatFunc::one()),
                (MultiIndex::unit(1), -a),
            ]),
            Witness::Order3 { a } => DiffPoly::from_terms([
    /* 2 y1 y3 */   (MultiIndex::new(vec![0, 1, 0, 1]), RatFunc::from_rat(rat_i(2))),
    /* -3 y2^2 */   (MultiIndex::new(vec![0, 0, 2]), RatFunc::from_rat(rat_i(-3))),
    /* -2a y1^2 */  (MultiIndex::new(vec![0, 2]), a.scale(&rat_i(-2))),
            ]),
        }
    }

    /// Residual of the defining identity, e.g. `X a - n b_0 a` for order 1.
    /// Zero iff the witness function satisfies its equation.
    pub fn identity_residual(&self, field: &VectorField) -> RatFunc {
        let mut chain = BChain::new(field);
        match self {
            Witness::FirstIntegral { w } => field.apply(w),
            Witness::Order1 { a, n } => {
                let rhs = &chain.get(0).scale(&rat_i(*n)) * a;
                &field.apply(a) - &rhs
            }
            Witness::Order2 { a } => {
                let rhs = &(&chain.get(0) * a) + &chain.get(1);
                &field.apply(a) - &rhs
            }
            Witness::Order3 { a } => {
                let rhs = &(&chain.get(0).scale(&rat_i(2)) * a) + &chain.get(2);
                &field.apply(a) - &rhs
            }
        }
    }

    /// Reduction residuals of the monic template; empty iff the template
    /// spans a field-invariant line.
    pub fn invariance_residuals(
        &self,
        field: &VectorField,
    ) -> BTreeMap<MultiIndex, RatFunc> {
        let t = self.template();
        let lead = t.leading().expect("templates are nonzero").1.clone();
        let monic = t.scale(&lead.recip().expect("leading coefficient nonzero"));
        residual_coeffs(field, &monic)
    }

    /// Full check: the defining identity holds, the template is invariant,
    /// and (for order 0) the integral is non-constant.
    pub fn verify(&self, field: &VectorField) -> bool {
        if let Witness::FirstIntegral { w } = self {
            if w.is_constant() {
                return false;
            }
        }
        self.identity_residual(field).is_zero() && self.invariance_residuals(field).is_empty()
    }
}

/// Closed-form integrating factor for `X2 dx1 - X1 dx2`, kept symbolic:
/// radicals and exponentials never enter the exact arithmetic, only their
/// rational closedness certificates do.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegratingFactor {
    /// `eta = base^(1/n) / X1`.
    PowerOverX1 { base: RatFunc, n: i64, x1: Poly2 },
    /// `eta = exp(int dx1 dx1 + dx2 dx2) / X1` for the closed one-form
    /// `dx1 dx1 + dx2 dx2`.
    ExponentialOverX1 {
        dx1: RatFunc,
        dx2: RatFunc,
        x1: Poly2,
    },
}

impl fmt::Display for IntegratingFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parenthesize only what could otherwise be misread.
        let wrap = |s: String| -> String {
            if s.contains(' ') || s.contains('/') || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        match self {
            IntegratingFactor::PowerOverX1 { base, n, x1 } => {
                let head = match n {
                    1 => wrap(base.to_string()),
                    -1 => format!("1/{}", wrap(base.to_string())),
                    _ => format!("{}^(1/{n})", wrap(base.to_string())),
                };
                if x1.is_one() {
                    write!(f, "{head}")
                } else {
                    write!(f, "{head} / {}", wrap(x1.to_string()))
                }
            }
            IntegratingFactor::ExponentialOverX1 { dx1, dx2, x1 } => {
                if x1.is_one() {
                    write!(f, "exp(int ({dx1}) dx1 + ({dx2}) dx2)")
                } else {
                    write!(f, "exp(int ({dx1}) dx1 + ({dx2}) dx2) / {}", wrap(x1.to_string()))
                }
            }
        }
    }
}

/// Rational residual whose vanishing certifies that the factor closes the
/// one-form `eta * (X2 dx1 - X1 dx2)`.
pub fn closedness_residual(field: &VectorField, factor: &IntegratingFactor) -> RatFunc {
    let ratio = field.ratio();
    match factor {
        IntegratingFactor::PowerOverX1 { base, n, .. } => {
            // d2(eta X2) + d1(eta X1) = eta * [ (1/n) d1(a)/a
            //   + d2(X2/X1) + (X2/X1) (1/n) d2(a)/a ],  a = base.
            let inv_n = RatFunc::from_rat(crate::rat::rat(1, *n));
            let dlog1 = &base.derivative(Var::X1) / base;
            let dlog2 = &base.derivative(Var::X2) / base;
            let t1 = &inv_n * &dlog1;
            let t3 = &(&ratio * &inv_n) * &dlog2;
            &(&t1 + &ratio.derivative(Var::X2)) + &t3
        }
        IntegratingFactor::ExponentialOverX1 { dx1, dx2, .. } => {
            &dx1.derivative(Var::X2) - &dx2.derivative(Var::X1)
        }
    }
}

/// Builds the closed-form integrating factor attached to a verified order-1
/// or order-2 witness; `None` for the other orders (order 0 needs none,
/// order 3 is handled by the series construction).  The closedness
/// certificate is checked here and a failure panics: it would contradict
/// the verified witness identity.
pub fn integrating_factor(field: &VectorField, witness: &Witness) -> Option<IntegratingFactor> {
    let factor = match witness {
        Witness::Order1 { a, n } => IntegratingFactor::PowerOverX1 {
            base: a.clone(),
            n: *n,
            x1: field.x1().clone(),
        },
        Witness::Order2 { a } => {
            // The potential's gradient: d1-part from the invariance of the
            // one-form, d2-part the witness function itself.
            let ratio = field.ratio();
            let dx1 = &(-&(&ratio * a)) - &ratio.derivative(Var::X2);
            IntegratingFactor::ExponentialOverX1 {
                dx1,
                dx2: a.clone(),
                x1: field.x1().clone(),
            }
        }
        _ => return None,
    };
    let residual = closedness_residual(field, &factor);
    assert!(
        residual.is_zero(),
        "closedness certificate failed for a verified witness: {residual}"
    );
    Some(factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x1() -> Poly2 {
        Poly2::var(Var::X1)
    }

    fn x2() -> Poly2 {
        Poly2::var(Var::X2)
    }

    fn rf(p: Poly2) -> RatFunc {
        RatFunc::from_poly(p)
    }

    #[test]
    fn templates_take_the_documented_shape() {
        let a = rf(x2());
        let t = Witness::Order1 { a: a.clone(), n: -2 }.template();
        assert_eq!(t.num_terms(), 2);
        assert_eq!(t.coeff(&MultiIndex::new(vec![0, 2])), RatFunc::one());
        assert_eq!(
            t.coeff(&MultiIndex::new(vec![])),
            -&a.recip().unwrap()
        );

        let t = Witness::Order3 { a: a.clone() }.template();
        assert_eq!(
            t.coeff(&MultiIndex::new(vec![0, 1, 0, 1])),
            RatFunc::from_rat(rat_i(2))
        );
        assert_eq!(
            t.coeff(&MultiIndex::new(vec![0, 0, 2])),
            RatFunc::from_rat(rat_i(-3))
        );
        assert_eq!(t.coeff(&MultiIndex::new(vec![0, 2])), a.scale(&rat_i(-2)));
    }

    #[test]
    fn corpus_witnesses_verify_and_perturbations_fail() {
        // x1' = 1, x2' = x1*x2: a = x2 with n = -1.
        let field = VectorField::new(Poly2::one(), &x1() * &x2()).unwrap();
        let good = Witness::Order1 { a: rf(x2()), n: -1 };
        assert!(good.identity_residual(&field).is_zero());
        assert!(good.verify(&field));
        let bad = Witness::Order1 {
            a: &rf(x2()) + &RatFunc::one(),
            n: -1,
        };
        assert!(!bad.verify(&field));

        // x1' = x1, x2' = x1*x2 + 1: a = 0 solves the order-2 equation.
        let field = VectorField::new(x1(), &(&x1() * &x2()) + &Poly2::one()).unwrap();
        let good = Witness::Order2 { a: RatFunc::zero() };
        assert!(good.verify(&field));

        // x1' = 1, x2' = x2^2 - x1: a = 0 solves the order-3 equation
        // (b_2 = 0) but not the order-2 one (b_1 = -2).
        let field = VectorField::new(Poly2::one(), &(&x2() * &x2()) - &x1()).unwrap();
        assert!(Witness::Order3 { a: RatFunc::zero() }.verify(&field));
        assert!(!Witness::Order2 { a: RatFunc::zero() }.verify(&field));

        // x1' = 1, x2' = 2*x1: the parabola integral.
        let field = VectorField::new(Poly2::one(), x1().scale(&rat_i(2))).unwrap();
        let w = rf(&x2() - &(&x1() * &x1()));
        assert!(Witness::FirstIntegral { w }.verify(&field));
        assert!(!Witness::FirstIntegral { w: RatFunc::one() }.verify(&field));
    }

    #[test]
    fn order2_residual_is_the_defining_identity() {
        // For A = y_2 - a y_1 the only reduction residual sits at y_1 and
        // equals -(X a - b_0 a - b_1), whatever a is.
        let field = VectorField::new(x1(), &(&x1() * &x2()) + &Poly2::one()).unwrap();
        let wrong = Witness::Order2 { a: RatFunc::one() };
        let res = wrong.invariance_residuals(&field);
        assert_eq!(res.len(), 1);
        let at_y1 = &res[&MultiIndex::unit(1)];
        assert_eq!(*at_y1, -&wrong.identity_residual(&field));
        assert!(!at_y1.is_zero());
    }

    #[test]
    fn order3_factor_two_is_load_bearing() {
        // Dropping the 3/2 ratio between the template's first two terms
        // breaks invariance even for a perfect witness function.
        let field = VectorField::new(Poly2::one(), &(&x2() * &x2()) - &x1()).unwrap();
        let skewed = DiffPoly::from_terms([
            (MultiIndex::new(vec![0, 1, 0, 1]), RatFunc::one()),
            (MultiIndex::new(vec![0, 0, 2]), RatFunc::from_rat(rat_i(-1))),
        ]);
        let res = residual_coeffs(&field, &skewed);
        assert!(!res.is_empty());
    }

    #[test]
    fn integrating_factors_on_corpus_fields() {
        let field = VectorField::new(Poly2::one(), &x1() * &x2()).unwrap();
        let w = Witness::Order1 { a: rf(x2()), n: -1 };
        let factor = integrating_factor(&field, &w).unwrap();
        assert_eq!(
            factor,
            IntegratingFactor::PowerOverX1 {
                base: rf(x2()),
                n: -1,
                x1: Poly2::one(),
            }
        );
        assert_eq!(factor.to_string(), "1/x2");
        assert!(closedness_residual(&field, &factor).is_zero());

        let field = VectorField::new(x1(), &(&x1() * &x2()) + &Poly2::one()).unwrap();
        let w = Witness::Order2 { a: RatFunc::zero() };
        let factor = integrating_factor(&field, &w).unwrap();
        match &factor {
            IntegratingFactor::ExponentialOverX1 { dx1, dx2, x1 } => {
                assert_eq!(*dx1, -&RatFunc::one());
                assert!(dx2.is_zero());
                assert_eq!(x1.to_string(), "x1");
            }
            _ => panic!("expected the exponential form"),
        }
        assert!(closedness_residual(&field, &factor).is_zero());

        assert!(integrating_factor(
            &field,
            &Witness::FirstIntegral { w: rf(x2()) }
        )
        .is_none());
    }
}
