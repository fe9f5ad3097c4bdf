//! Planar polynomial vector fields and the coefficient data derived from
//! them.
//!
//! A field `X = X1*d1 + X2*d2` acts on rational functions as a derivation.
//! Two derived objects drive everything downstream:
//!
//! * the chain `b_0, b_1, ...` with `b_0 = -X1*d2(X2/X1)` and
//!   `b_i = X1*d2(b_{i-1}/X1)`, which measures how repeated `d2`
//!   derivatives interact with the field, and
//! * the integer table `c(i, j)` defined by the recurrence
//!   `c(0,1) = 1`, `c(0,k+1) = k+1`, `c(i,k+1) = c(i-1,k) + c(i,k)`,
//!   `c(k,k+1) = c(k-1,k)`, whose entries weight the reduction of
//!   differential monomials.
//!
//! The chain has the closed form `b_i = -X1*d2^{i+1}(X2/X1)`; both routes
//! are implemented and tested against each other.

use std::fmt;

use crate::poly::{sample_poly, Poly2, Var};
use crate::rat::{rat_i, Rat};
use crate::ratfunc::RatFunc;

/// Rejected vector-field inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VectorFieldError {
    /// The first component must be nonzero: the engine divides by `X1`.
    ZeroFirstComponent,
}

impl fmt::Display for VectorFieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorFieldError::ZeroFirstComponent => {
                write!(f, "first component X1 must not be the zero polynomial")
            }
        }
    }
}

impl std::error::Error for VectorFieldError {}

/// A polynomial vector field `X = X1*d1 + X2*d2` on the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    x1: Poly2,
    x2: Poly2,
}

impl VectorField {
    pub fn new(x1: Poly2, x2: Poly2) -> Result<Self, VectorFieldError> {
        if x1.is_zero() {
            return Err(VectorFieldError::ZeroFirstComponent);
        }
        Ok(VectorField { x1, x2 })
    }

    pub fn x1(&self) -> &Poly2 {
        &self.x1
    }

    pub fn x2(&self) -> &Poly2 {
        &self.x2
    }

    /// Applies the derivation: `X f = X1*d1(f) + X2*d2(f)`.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let t1 = &RatFunc::from_poly(self.x1.clone()) * &f.derivative(Var::X1);
        let t2 = &RatFunc::from_poly(self.x2.clone()) * &f.derivative(Var::X2);
        &t1 + &t2
    }

    /// `X p` for polynomial `p` (stays polynomial).
    pub fn apply_poly(&self, p: &Poly2) -> Poly2 {
        &(&self.x1 * &p.derivative(Var::X1)) + &(&self.x2 * &p.derivative(Var::X2))
    }

    /// The slope `X2/X1`.
    pub fn ratio(&self) -> RatFunc {
        RatFunc::new(self.x2.clone(), self.x1.clone()).expect("X1 nonzero by construction")
    }

    /// Maximum total degree of the two components.
    pub fn degree(&self) -> u32 {
        let d1 = self.x1.degree().unwrap_or(0);
        let d2 = self.x2.degree().unwrap_or(0);
        d1.max(d2)
    }

    /// Random field of component degree at most `deg` with coefficient
    /// height at most `h`; resamples until `X1` is nonzero.
    pub fn sample<R: rand::Rng>(rng: &mut R, deg: u32, h: u64) -> VectorField {
        loop {
            let x1 = sample_poly(rng, deg, h);
            if x1.is_zero() {
                continue;
            }
            let x2 = sample_poly(rng, deg, h);
            return VectorField { x1, x2 };
        }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x1' = {}; x2' = {}", self.x1, self.x2)
    }
}

/// Lazily extended chain `b_0, b_1, ...` attached to a field.
#[derive(Clone, Debug)]
pub struct BChain {
    field: VectorField,
    cache: Vec<RatFunc>,
}

impl BChain {
    pub fn new(field: &VectorField) -> BChain {
        let x1 = RatFunc::from_poly(field.x1().clone());
        let b0 = -&(&x1 * &field.ratio().derivative(Var::X2));
        BChain {
            field: field.clone(),
            cache: vec![b0],
        }
    }

    /// `b_i` by the recurrence `b_i = X1*d2(b_{i-1}/X1)`.
    pub fn get(&mut self, i: usize) -> RatFunc {
        let x1 = RatFunc::from_poly(self.field.x1().clone());
        while self.cache.len() <= i {
            let prev = self.cache.last().unwrap();
            let next = &x1 * &(prev / &x1).derivative(Var::X2);
            self.cache.push(next);
        }
        self.cache[i].clone()
    }

    /// `b_i = -X1*d2^{i+1}(X2/X1)` — the closed form, used as an
    /// independent route in tests.
    pub fn closed_form(field: &VectorField, i: usize) -> RatFunc {
        let mut d = field.ratio();
        for _ in 0..=i {
            d = d.derivative(Var::X2);
        }
        let x1 = RatFunc::from_poly(field.x1().clone());
        -&(&x1 * &d)
    }
}

/// Triangular table of the weights `c(i, j)`, `1 <= j <= r`, `0 <= i < j`,
/// built strictly from the defining recurrence.
#[derive(Clone, Debug)]
pub struct CTable {
    rows: Vec<Vec<Rat>>,
}

impl CTable {
    pub fn new(r: usize) -> CTable {
        assert!(r >= 1, "table needs at least one row");
        let mut rows: Vec<Vec<Rat>> = vec![vec![rat_i(1)]];
        for k in 1..r {
            // Build row j = k + 1 from row j = k.
            let prev = &rows[k - 1];
            let mut row = Vec::with_capacity(k + 1);
            row.push(rat_i((k + 1) as i64));
            for i in 1..k {
                row.push(prev[i - 1].clone() + prev[i].clone());
            }
            row.push(prev[k - 1].clone());
            rows.push(row);
        }
        CTable { rows }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        assert!(j >= 1 && j <= self.rows.len() && i < j, "index out of range");
        &self.rows[j - 1][i]
    }
}

/// Residual of the commutation rule `[d2, X]f = (d2(X1)/X1)*Xf - b_0*d2(f)`;
/// identically zero for every field and every rational `f`.
pub fn commutator_residual(field: &VectorField, f: &RatFunc) -> RatFunc {
    let xf = field.apply(f);
    let d2f = f.derivative(Var::X2);
    let lhs = &xf.derivative(Var::X2) - &field.apply(&d2f);
    let x1 = RatFunc::from_poly(field.x1().clone());
    let d2x1 = RatFunc::from_poly(field.x1().derivative(Var::X2));
    let b0 = BChain::new(field).get(0);
    let rhs = &(&(&d2x1 / &x1) * &xf) - &(&b0 * &d2f);
    &lhs - &rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::binomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x1v() -> Poly2 {
        Poly2::var(Var::X1)
    }

    fn x2v() -> Poly2 {
        Poly2::var(Var::X2)
    }

    #[test]
    fn rejects_zero_first_component() {
        let err = VectorField::new(Poly2::zero(), x1v()).unwrap_err();
        assert_eq!(err, VectorFieldError::ZeroFirstComponent);
        assert!(VectorField::new(Poly2::one(), Poly2::zero()).is_ok());
    }

    #[test]
    fn apply_is_a_derivation_and_matches_polynomial_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let field = VectorField::sample(&mut rng, 3, 3);
            let p = sample_poly(&mut rng, 3, 3);
            let q = sample_poly(&mut rng, 3, 3);
            let pf = RatFunc::from_poly(p.clone());
            let qf = RatFunc::from_poly(q.clone());
            // Polynomial and rational routes agree.
            assert_eq!(
                RatFunc::from_poly(field.apply_poly(&p)),
                field.apply(&pf)
            );
            // Leibniz rule.
            let prod = &pf * &qf;
            let want = &(&field.apply(&pf) * &qf) + &(&pf * &field.apply(&qf));
            assert_eq!(field.apply(&prod), want);
        }
    }

    #[test]
    fn chain_recurrence_agrees_with_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..8 {
            let field = VectorField::sample(&mut rng, 2, 2);
            let mut chain = BChain::new(&field);
            for i in 0..=4 {
                assert_eq!(
                    chain.get(i),
                    BChain::closed_form(&field, i),
                    "index {i} on {field}"
                );
            }
        }
    }

    #[test]
    fn chain_on_hand_checked_fields() {
        // x1' = 1, x2' = x1*x2: b0 = -1*d2(x1*x2) = -x1.
        let field = VectorField::new(Poly2::one(), &x1v() * &x2v()).unwrap();
        let mut chain = BChain::new(&field);
        assert_eq!(chain.get(0), RatFunc::from_poly(-&x1v()));
        assert!(chain.get(1).is_zero());

        // x1' = x2 - x1^3/3 + x1, x2' = -x1:
        // b0 = -x1/X1, b1 = 2*x1/X1^2, b2 = -6*x1/X1^3.
        let x1c = &(&x2v() - &x1v().pow(3).scale(&crate::rat::rat(1, 3))) + &x1v();
        let field = VectorField::new(x1c.clone(), -&x1v()).unwrap();
        let mut chain = BChain::new(&field);
        let expect = |num: Poly2, den: Poly2| RatFunc::new(num, den).unwrap();
        assert_eq!(chain.get(0), expect(-&x1v(), x1c.clone()));
        assert_eq!(chain.get(1), expect(x1v().scale(&rat_i(2)), &x1c * &x1c));
        assert_eq!(
            chain.get(2),
            expect(x1v().scale(&rat_i(-6)), &(&x1c * &x1c) * &x1c)
        );
    }

    #[test]
    fn c_table_entries_are_binomials() {
        // Invariant: c(i, j) = binomial(j, i+1) for the whole table.
        let r = 10;
        let table = CTable::new(r);
        for j in 1..=r {
            for i in 0..j {
                assert_eq!(
                    table.get(i, j),
                    &Rat::from_integer(binomial(j as u64, (i + 1) as u64)),
                    "c({i}, {j})"
                );
            }
        }
        // First column: c(0, j) = j.
        for j in 1..=8 {
            assert_eq!(table.get(0, j), &rat_i(j as i64));
        }
    }

    #[test]
    fn commutator_rule_residual_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let field = VectorField::sample(&mut rng, 3, 3);
            let num = sample_poly(&mut rng, 2, 3);
            let mut den = sample_poly(&mut rng, 1, 2);
            if den.is_zero() {
                den = Poly2::one();
            }
            let f = RatFunc::new(num, den).unwrap();
            let residual = commutator_residual(&field, &f);
            assert!(residual.is_zero(), "field {field}, f {f}");
        }
        // Degenerate f values are covered too.
        let field = VectorField::new(x1v(), x2v()).unwrap();
        assert!(commutator_residual(&field, &RatFunc::one()).is_zero());
    }
}
