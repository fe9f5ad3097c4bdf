//! Rational functions in `x1, x2` over the rationals.
//!
//! Every value is stored in canonical form: numerator and denominator have
//! integer coefficients with coprime contents, their polynomial gcd is 1,
//! and the denominator has a positive leading coefficient under graded-lex.
//! Structural equality is therefore equality in the field.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::Zero;

use crate::poly::{Poly2, Var};
use crate::rat::Rat;

/// Errors from field operations and evaluation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RatFuncError {
    DivisionByZero,
    /// Evaluation point lies on the zero set of the denominator.
    Pole,
}

impl fmt::Display for RatFuncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatFuncError::DivisionByZero => write!(f, "division by zero"),
            RatFuncError::Pole => write!(f, "evaluation at a pole of the denominator"),
        }
    }
}

impl std::error::Error for RatFuncError {}

/// A rational function `num/den` in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: Poly2,
    den: Poly2,
}

impl RatFunc {
    /// Builds `num/den`, normalizing; `None` when `den` is zero.
    pub fn new(num: Poly2, den: Poly2) -> Option<RatFunc> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalized(num, den))
    }

    fn normalized(num: Poly2, den: Poly2) -> RatFunc {
        if num.is_zero() {
            return RatFunc {
                num: Poly2::zero(),
                den: Poly2::one(),
            };
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g).expect("gcd divides numerator");
        let den = den.div_exact(&g).expect("gcd divides denominator");
        let (pn, sn) = num.integer_primitive();
        let (pd, sd) = den.integer_primitive();
        // num/den = (sn/sd) * pn/pd with sn/sd reduced; fold the reduced
        // scalar into the primitive parts, sign on the numerator.
        let s = sn / sd;
        let num = pn.scale(&Rat::from_integer(s.numer().clone()));
        let den = pd.scale(&Rat::from_integer(s.denom().clone()));
        RatFunc { num, den }
    }

    pub fn zero() -> RatFunc {
        RatFunc {
            num: Poly2::zero(),
            den: Poly2::one(),
        }
    }

    pub fn one() -> RatFunc {
        RatFunc {
            num: Poly2::one(),
            den: Poly2::one(),
        }
    }

    pub fn from_poly(p: Poly2) -> RatFunc {
        Self::normalized(p, Poly2::one())
    }

    pub fn from_rat(c: Rat) -> RatFunc {
        Self::from_poly(Poly2::constant(c))
    }

    pub fn from_int(n: i64) -> RatFunc {
        Self::from_rat(crate::rat::rat_i(n))
    }

    pub fn var(v: Var) -> RatFunc {
        Self::from_poly(Poly2::var(v))
    }

    pub fn num(&self) -> &Poly2 {
        &self.num
    }

    pub fn den(&self) -> &Poly2 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The value as a polynomial when the denominator is constant.
    pub fn to_poly(&self) -> Option<Poly2> {
        if self.den.is_constant() {
            Some(self.num.scale(&self.den.constant_term().recip()))
        } else {
            None
        }
    }

    /// The value as a rational scalar when constant.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.is_constant() {
            Some(self.num.constant_term() / self.den.constant_term())
        } else {
            None
        }
    }

    pub fn recip(&self) -> Result<RatFunc, RatFuncError> {
        if self.is_zero() {
            return Err(RatFuncError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn powi(&self, n: i64) -> Result<RatFunc, RatFuncError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Partial derivative via the quotient rule, renormalized.
    pub fn derivative(&self, v: Var) -> RatFunc {
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        let den = &self.den * &self.den;
        Self::normalized(num, den)
    }

    /// Exact evaluation; `Err(Pole)` when the denominator vanishes.
    pub fn eval(&self, p: &(Rat, Rat)) -> Result<Rat, RatFuncError> {
        let d = self.den.eval(p);
        if d.is_zero() {
            return Err(RatFuncError::Pole);
        }
        Ok(self.num.eval(p) / d)
    }

    /// Scales by a rational constant.
    pub fn scale(&self, c: &Rat) -> RatFunc {
        Self::normalized(self.num.scale(c), self.den.clone())
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFunc::normalized(num, den)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        let num = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFunc::normalized(num, den)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        // Cross-cancel first to keep the gcd operands small.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        RatFunc::normalized(&n1 * &n2, &d1 * &d2)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics on a zero divisor; use `recip` for a checked path.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RatFunc) -> RatFunc {
        let inv = rhs.recip().expect("division by zero rational function");
        self * &inv
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        // Parenthesize sums, and products on the denominator side, so that
        // the rendering re-parses to the same value under the usual
        // precedence rules.
        let wrap = |p: &Poly2, product_too: bool| -> String {
            let s = p.to_string();
            if p.num_terms() > 1 || (product_too && s.contains('*')) {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num, false), wrap(&self.den, true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i, sample_rat};
    use num::{BigInt, Integer, One};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x1() -> Poly2 {
        Poly2::var(Var::X1)
    }

    fn x2() -> Poly2 {
        Poly2::var(Var::X2)
    }

    fn sample_poly<R: Rng>(rng: &mut R, deg: u32, h: u64) -> Poly2 {
        let mut p = Poly2::zero();
        for e1 in 0..=deg {
            for e2 in 0..=(deg - e1) {
                if rng.gen_bool(0.5) {
                    p = &p + &Poly2::monomial(e1, e2, sample_rat(rng, h));
                }
            }
        }
        p
    }

    fn sample_rf<R: Rng>(rng: &mut R) -> RatFunc {
        let num = sample_poly(rng, 2, 3);
        let mut den = sample_poly(rng, 2, 3);
        if den.is_zero() {
            den = Poly2::one();
        }
        RatFunc::new(num, den).unwrap()
    }

    fn assert_canonical(f: &RatFunc) {
        if f.is_zero() {
            assert!(f.den().is_one());
            return;
        }
        assert!(f.num().gcd(f.den()).is_one(), "polynomial gcd reduced");
        assert!(
            f.den().leading().unwrap().1 > &Rat::zero(),
            "positive leading denominator"
        );
        let content = |p: &Poly2| -> BigInt {
            let mut g = BigInt::zero();
            for (_, c) in p.iter() {
                assert!(c.denom().is_one(), "integer coefficients");
                g = g.gcd(c.numer());
            }
            g
        };
        let gn = content(f.num());
        let gd = content(f.den());
        assert!(gn.gcd(&gd).is_one(), "coprime contents");
    }

    #[test]
    fn normalization_invariants_hold_on_random_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..80 {
            let f = sample_rf(&mut rng);
            assert_canonical(&f);
        }
        // Scalar folding: (1/3)x1^3 stores as x1^3 / 3.
        let f = RatFunc::from_poly(Poly2::monomial(3, 0, rat(1, 3)));
        assert_eq!(f.num(), &Poly2::monomial(3, 0, rat_i(1)));
        assert_eq!(f.den(), &Poly2::constant(rat_i(3)));
    }

    #[test]
    fn field_axioms_on_random_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let a = sample_rf(&mut rng);
            let b = sample_rf(&mut rng);
            let c = sample_rf(&mut rng);
            assert_eq!(&a + &b, &b + &a);
            assert_eq!(&a * &b, &b * &a);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            assert_eq!(&a - &a, RatFunc::zero());
            assert_canonical(&(&a * &b));
            assert_canonical(&(&a + &b));
            if !b.is_zero() {
                let q = &a / &b;
                assert_eq!(&q * &b, a);
                assert_canonical(&q);
            }
        }
    }

    #[test]
    fn derivative_is_a_derivation() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let a = sample_rf(&mut rng);
            let b = sample_rf(&mut rng);
            for v in [Var::X1, Var::X2] {
                let sum = (&a + &b).derivative(v);
                assert_eq!(sum, &a.derivative(v) + &b.derivative(v));
                let prod = (&a * &b).derivative(v);
                let leibniz = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
                assert_eq!(prod, leibniz);
            }
        }
        // Polynomial embedding commutes with differentiation.
        let p = &(&x1() * &x2()) + &x2();
        assert_eq!(
            RatFunc::from_poly(p.clone()).derivative(Var::X2),
            RatFunc::from_poly(p.derivative(Var::X2))
        );
    }

    #[test]
    fn quotient_rule_at_random_points() {
        // d2(x1/x2) = -x1/x2^2, checked structurally and by evaluation.
        let f = RatFunc::new(x1(), x2()).unwrap();
        let d = f.derivative(Var::X2);
        let expect = RatFunc::new(-&x1(), &x2() * &x2()).unwrap();
        assert_eq!(d, expect);
        assert_eq!(
            d.eval(&(rat_i(3), rat_i(2))).unwrap(),
            rat(-3, 4)
        );
        assert_eq!(f.eval(&(rat_i(1), rat_i(0))), Err(RatFuncError::Pole));
    }

    #[test]
    fn powi_handles_negative_exponents() {
        let f = RatFunc::new(x2(), Poly2::one()).unwrap();
        assert_eq!(f.powi(-1).unwrap(), RatFunc::new(Poly2::one(), x2()).unwrap());
        assert_eq!(f.powi(0).unwrap(), RatFunc::one());
        assert_eq!(
            f.powi(3).unwrap(),
            RatFunc::from_poly(x2().pow(3))
        );
        assert_eq!(RatFunc::zero().powi(-2), Err(RatFuncError::DivisionByZero));
    }

    #[test]
    fn display_forms() {
        let f = RatFunc::new(&x2() - &(&x1() * &x1()), x1()).unwrap();
        assert_eq!(f.to_string(), "(-x1^2 + x2)/x1");
        let g = RatFunc::new(x1(), Poly2::constant(rat_i(3))).unwrap();
        assert_eq!(g.to_string(), "x1/3");
        assert_eq!(RatFunc::zero().to_string(), "0");
    }
}
