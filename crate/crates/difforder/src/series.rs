//! Power-series data for order-3 witnesses.
//!
//! A solution `a` of the order-3 equation `X a = 2 b_0 a + b_2` induces a
//! compatible first-order system for an auxiliary unknown `u(x1, x2)`:
//!
//! ```text
//! d1 u = f(x1, x2, u) = -d2^2(X2/X1) - (X2/X1) a - d2(X2/X1) u - (X2/X1) u^2 / 2
//! d2 u = g(x1, x2, u) = a + u^2 / 2
//! ```
//!
//! Compatibility `D2 f = D1 g` (with `D1 = d1 + f d/du`, `D2 = d2 + g d/du`)
//! is a rational-function identity equivalent to the order-3 equation; it is
//! computed exactly and certifies that the system is solvable.  The solver
//! then produces the truncated Taylor expansion of `u` at a base point with
//! `u(base) = 0`, filling coefficients degree by degree from the two
//! equations.  Substituting the truncated series back into both equations
//! must kill every coefficient up to one below the truncation order — that
//! residual check is exact and shipped with the series.
//!
//! An independent route computes single coefficients through iterated
//! `D1`/`D2` applications (`u_{m,n} = eval(D1^m D2^{n-1} g) / (m! n!)` and
//! so on); it shares no code with the degreewise solver and backs the
//! cross-checks in the tests.
//!
//! A convergence-radius estimate from coefficient growth is attached as a
//! purely advisory number; nothing downstream depends on it.

use std::collections::BTreeMap;
use std::fmt;

use crate::poly::{Poly2, Var};
use crate::rat::{binomial, factorial, rat, rat_i, to_f64, Rat};
use crate::ratfunc::RatFunc;
use crate::vectorfield::VectorField;

/// Polynomial in the auxiliary unknown `u` with rational-function
/// coefficients; `c[k]` multiplies `u^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    c: Vec<RatFunc>,
}

impl UPoly {
    pub fn new(mut c: Vec<RatFunc>) -> UPoly {
        while c.last().map(|x| x.is_zero()).unwrap_or(false) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> UPoly {
        UPoly { c: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg_u(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> RatFunc {
        self.c.get(k).cloned().unwrap_or_else(RatFunc::zero)
    }

    /// Derivative with respect to `u`.
    pub fn du(&self) -> UPoly {
        if self.c.len() <= 1 {
            return UPoly::zero();
        }
        UPoly::new(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, ck)| ck.scale(&rat_i((i + 1) as i64)))
                .collect(),
        )
    }

    /// Coefficientwise derivative with respect to a base variable.
    pub fn dx(&self, v: Var) -> UPoly {
        UPoly::new(self.c.iter().map(|ck| ck.derivative(v)).collect())
    }

    pub fn scale(&self, r: &Rat) -> UPoly {
        UPoly::new(self.c.iter().map(|ck| ck.scale(r)).collect())
    }

    /// Value at `u = 0` over the base point.
    pub fn eval_u0(&self, p: &(Rat, Rat)) -> Rat {
        match self.c.first() {
            None => Rat::from_integer(0.into()),
            Some(c0) => c0.eval(p).expect("base point avoids coefficient poles"),
        }
    }
}

impl std::ops::Add for &UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        let n = self.c.len().max(rhs.c.len());
        UPoly::new(
            (0..n)
                .map(|k| &self.coeff(k) + &rhs.coeff(k))
                .collect(),
        )
    }
}

impl std::ops::Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        let n = self.c.len().max(rhs.c.len());
        UPoly::new(
            (0..n)
                .map(|k| &self.coeff(k) - &rhs.coeff(k))
                .collect(),
        )
    }
}

impl std::ops::Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![RatFunc::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        UPoly::new(c)
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, ck) in self.c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let cs = ck.to_string();
            // Fold a plain leading minus into the joining operator.
            let (negative, mut body) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                _ => (false, cs),
            };
            if body.contains(' ') && !body.starts_with('(') {
                body = format!("({body})");
            }
            match (out.is_empty(), negative) {
                (true, true) => out.push('-'),
                (true, false) => {}
                (false, true) => out.push_str(" - "),
                (false, false) => out.push_str(" + "),
            }
            let part = match k {
                0 => body,
                1 if body == "1" => "u".to_string(),
                1 => format!("{body}*u"),
                _ if body == "1" => format!("u^{k}"),
                _ => format!("{body}*u^{k}"),
            };
            out.push_str(&part);
        }
        write!(f, "{out}")
    }
}

/// The pair `(f, g)` of right-hand sides of the compatible system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSystem {
    pub f: UPoly,
    pub g: UPoly,
}

impl SeriesSystem {
    /// Total `x1`-derivative along solutions: `D1 h = d1 h + f * dh/du`.
    pub fn d1(&self, h: &UPoly) -> UPoly {
        &h.dx(Var::X1) + &(&self.f * &h.du())
    }

    /// Total `x2`-derivative along solutions: `D2 h = d2 h + g * dh/du`.
    pub fn d2(&self, h: &UPoly) -> UPoly {
        &h.dx(Var::X2) + &(&self.g * &h.du())
    }

    /// `D2 f - D1 g`; identically zero exactly when the underlying `a`
    /// solves the order-3 equation, making the system integrable.
    pub fn compatibility_residual(&self) -> UPoly {
        &self.d2(&self.f) - &self.d1(&self.g)
    }

    /// All denominators a base point must avoid.
    fn denominators(&self) -> Vec<Poly2> {
        self.f
            .c
            .iter()
            .chain(self.g.c.iter())
            .map(|c| c.den().clone())
            .filter(|d| !d.is_constant())
            .collect()
    }
}

/// Builds the system attached to a solution `a` of the order-3 equation.
pub fn build_fg(field: &VectorField, a: &RatFunc) -> SeriesSystem {
    let ratio = field.ratio();
    let dr = ratio.derivative(Var::X2);
    let ddr = dr.derivative(Var::X2);
    let half = rat(1, 2);
    let f = UPoly::new(vec![
        &(-&ddr) - &(&ratio * a),
        -&dr,
        -&ratio.scale(&half),
    ]);
    let g = UPoly::new(vec![
        a.clone(),
        RatFunc::zero(),
        RatFunc::from_rat(half),
    ]);
    SeriesSystem { f, g }
}

/// Truncated Taylor expansion of `u` at `base` with `u(base) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSolution {
    pub base: (Rat, Rat),
    /// Coefficients are complete for every total degree `<= trunc`.
    pub trunc: u32,
    /// `(m, n) -> u_{m,n}`; zero coefficients are omitted.
    pub coeffs: BTreeMap<(u32, u32), Rat>,
}

impl SeriesSolution {
    pub fn coeff(&self, m: u32, n: u32) -> Rat {
        self.coeffs
            .get(&(m, n))
            .cloned()
            .unwrap_or_else(|| Rat::from_integer(0.into()))
    }
}

/// Bivariate series truncated past total degree `trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TruncSeries {
    trunc: u32,
    c: BTreeMap<(u32, u32), Rat>,
}

impl TruncSeries {
    fn zero(trunc: u32) -> TruncSeries {
        TruncSeries {
            trunc,
            c: BTreeMap::new(),
        }
    }

    fn coeff(&self, m: u32, n: u32) -> Rat {
        self.c
            .get(&(m, n))
            .cloned()
            .unwrap_or_else(|| Rat::from_integer(0.into()))
    }

    fn set(&mut self, m: u32, n: u32, v: Rat) {
        if m + n > self.trunc {
            return;
        }
        if v == Rat::from_integer(0.into()) {
            self.c.remove(&(m, n));
        } else {
            self.c.insert((m, n), v);
        }
    }

    fn add(&self, o: &TruncSeries) -> TruncSeries {
        let mut out = self.clone();
        out.trunc = self.trunc.min(o.trunc);
        out.c.retain(|&(m, n), _| m + n <= out.trunc);
        for (&(m, n), v) in &o.c {
            let s = out.coeff(m, n) + v.clone();
            out.set(m, n, s);
        }
        out
    }

    fn mul(&self, o: &TruncSeries) -> TruncSeries {
        let trunc = self.trunc.min(o.trunc);
        let mut out = TruncSeries::zero(trunc);
        for (&(a, b), v) in &self.c {
            for (&(c, d), w) in &o.c {
                if a + c + b + d <= trunc {
                    let s = out.coeff(a + c, b + d) + v.clone() * w.clone();
                    out.set(a + c, b + d, s);
                }
            }
        }
        out
    }

    /// `d/dx1`: exact only through `trunc - 1`.
    fn dx1(&self) -> TruncSeries {
        let mut out = TruncSeries::zero(self.trunc.saturating_sub(1));
        for (&(m, n), v) in &self.c {
            if m >= 1 {
                out.set(m - 1, n, v.clone() * rat_i(m as i64));
            }
        }
        out
    }

    fn dx2(&self) -> TruncSeries {
        let mut out = TruncSeries::zero(self.trunc.saturating_sub(1));
        for (&(m, n), v) in &self.c {
            if n >= 1 {
                out.set(m, n - 1, v.clone() * rat_i(n as i64));
            }
        }
        out
    }

    /// Expansion of a polynomial around `base` (exact; degrees beyond the
    /// truncation are dropped).
    fn from_poly_at(p: &Poly2, base: &(Rat, Rat), trunc: u32) -> TruncSeries {
        let mut out = TruncSeries::zero(trunc);
        for (mono, coeff) in p.iter() {
            // (b1 + t1)^e1 (b2 + t2)^e2 expanded binomially.
            for i in 0..=mono.e1 {
                for j in 0..=mono.e2 {
                    if i + j > trunc {
                        continue;
                    }
                    let b1 = pow_rat(&base.0, mono.e1 - i);
                    let b2 = pow_rat(&base.1, mono.e2 - j);
                    let w = Rat::from_integer(
                        binomial(mono.e1 as u64, i as u64) * binomial(mono.e2 as u64, j as u64),
                    ) * b1
                        * b2
                        * coeff.clone();
                    let s = out.coeff(i, j) + w;
                    out.set(i, j, s);
                }
            }
        }
        out
    }

    /// Expansion of a rational function around a base point where the
    /// denominator does not vanish.
    fn from_ratfunc_at(f: &RatFunc, base: &(Rat, Rat), trunc: u32) -> TruncSeries {
        let num = TruncSeries::from_poly_at(f.num(), base, trunc);
        let den = TruncSeries::from_poly_at(f.den(), base, trunc);
        let d00 = den.coeff(0, 0);
        assert!(
            d00 != Rat::from_integer(0.into()),
            "base point must avoid the denominator's zero set"
        );
        let mut q = TruncSeries::zero(trunc);
        for d in 0..=trunc {
            for m in 0..=d {
                let n = d - m;
                let mut acc = num.coeff(m, n);
                for i in 0..=m {
                    for j in 0..=n {
                        if i == m && j == n {
                            continue;
                        }
                        let qij = q.coeff(i, j);
                        if qij != Rat::from_integer(0.into()) {
                            acc -= qij * den.coeff(m - i, n - j);
                        }
                    }
                }
                q.set(m, n, acc / d00.clone());
            }
        }
        q
    }
}

fn pow_rat(b: &Rat, e: u32) -> Rat {
    let mut acc = Rat::from_integer(1.into());
    for _ in 0..e {
        acc *= b.clone();
    }
    acc
}

/// First lattice point, in a deterministic outward sweep from the origin,
/// where `X1` and every coefficient denominator of the system are nonzero.
pub fn choose_base_point(field: &VectorField, sys: &SeriesSystem) -> (Rat, Rat) {
    let mut dens = sys.denominators();
    dens.push(field.x1().clone());
    for h in 0i64..=50 {
        let mut ring: Vec<(i64, i64)> = Vec::new();
        for i in -h..=h {
            for j in -h..=h {
                if i.abs().max(j.abs()) == h {
                    ring.push((i, j));
                }
            }
        }
        ring.sort();
        for (i, j) in ring {
            let p = (rat_i(i), rat_i(j));
            if dens.iter().all(|d| d.eval(&p) != Rat::from_integer(0.into())) {
                return p;
            }
        }
    }
    unreachable!("a valid base point exists within height 50");
}

/// Degreewise solution of the system at `base` with `u(base) = 0`.
///
/// New coefficients of total degree `d + 1` come from the degree-`d`
/// coefficients of the composed right-hand sides: the `x1`-equation yields
/// `u_{m+1,n}`, the `x2`-equation yields `u_{0,d+1}`.
pub fn solve_series(sys: &SeriesSystem, base: &(Rat, Rat), trunc: u32) -> SeriesSolution {
    let expand = |h: &UPoly| -> Vec<TruncSeries> {
        (0..=h.deg_u())
            .map(|k| TruncSeries::from_ratfunc_at(&h.coeff(k), base, trunc))
            .collect()
    };
    let fs = expand(&sys.f);
    let gs = expand(&sys.g);
    let compose = |parts: &[TruncSeries], u: &TruncSeries| -> TruncSeries {
        let mut acc = TruncSeries::zero(trunc);
        let mut upow = TruncSeries::zero(trunc);
        upow.set(0, 0, Rat::from_integer(1.into()));
        for part in parts {
            acc = acc.add(&part.mul(&upow));
            upow = upow.mul(u);
        }
        acc
    };

    let mut u = TruncSeries::zero(trunc);
    for d in 0..trunc {
        let rhs1 = compose(&fs, &u);
        let rhs2 = compose(&gs, &u);
        for m in 0..=d {
            let n = d - m;
            let v = rhs1.coeff(m, n) / rat_i((m + 1) as i64);
            u.set(m + 1, n, v);
        }
        let v = rhs2.coeff(0, d) / rat_i((d + 1) as i64);
        u.set(0, d + 1, v);
    }

    SeriesSolution {
        base: base.clone(),
        trunc,
        coeffs: u.c,
    }
}

/// Substitutes the truncated series into both equations and checks that
/// every residual coefficient of total degree at most `trunc - 1` — the
/// range where truncation cannot leak — vanishes exactly.
pub fn residuals_vanish(sys: &SeriesSystem, sol: &SeriesSolution) -> bool {
    let trunc = sol.trunc;
    let mut u = TruncSeries::zero(trunc);
    for (&(m, n), v) in &sol.coeffs {
        u.set(m, n, v.clone());
    }
    let expand = |h: &UPoly| -> Vec<TruncSeries> {
        (0..=h.deg_u())
            .map(|k| TruncSeries::from_ratfunc_at(&h.coeff(k), &sol.base, trunc))
            .collect()
    };
    let compose = |parts: &[TruncSeries], u: &TruncSeries| -> TruncSeries {
        let mut acc = TruncSeries::zero(trunc);
        let mut upow = TruncSeries::zero(trunc);
        upow.set(0, 0, Rat::from_integer(1.into()));
        for part in parts {
            acc = acc.add(&part.mul(&upow));
            upow = upow.mul(u);
        }
        acc
    };
    let neg = |t: &TruncSeries| -> TruncSeries {
        let mut out = t.clone();
        for v in out.c.values_mut() {
            *v = -v.clone();
        }
        out
    };
    let r1 = u.dx1().add(&neg(&compose(&expand(&sys.f), &u)));
    let r2 = u.dx2().add(&neg(&compose(&expand(&sys.g), &u)));
    let limit = trunc.saturating_sub(1);
    for r in [&r1, &r2] {
        for (&(m, n), v) in &r.c {
            if m + n <= limit && *v != Rat::from_integer(0.into()) {
                return false;
            }
        }
    }
    true
}

/// Coefficient `u_{m,n}` through iterated total derivatives:
/// `u_{m,n} = eval(D1^m D2^{n-1} g) / (m! n!)` for `n >= 1` and
/// `u_{m,0} = eval(D1^{m-1} f) / m!` for `m >= 1`.  Independent of the
/// degreewise solver.
pub fn coeff_by_operators(sys: &SeriesSystem, base: &(Rat, Rat), m: u32, n: u32) -> Rat {
    if m == 0 && n == 0 {
        return Rat::from_integer(0.into());
    }
    let h = if n >= 1 {
        let mut h = sys.g.clone();
        for _ in 0..(n - 1) {
            h = sys.d2(&h);
        }
        for _ in 0..m {
            h = sys.d1(&h);
        }
        h
    } else {
        let mut h = sys.f.clone();
        for _ in 0..(m - 1) {
            h = sys.d1(&h);
        }
        h
    };
    let scale = factorial(m as u64) * factorial(n as u64);
    h.eval_u0(base) / scale
}

/// Same coefficient through the other equation (`n` derivatives of `f`
/// instead of `g`); defined for `m >= 1`.  Used to cross-check the two
/// derivations against each other.
pub fn coeff_by_operators_alt(sys: &SeriesSystem, base: &(Rat, Rat), m: u32, n: u32) -> Rat {
    assert!(m >= 1, "the x1-equation defines coefficients with m >= 1");
    let mut h = sys.f.clone();
    for _ in 0..n {
        h = sys.d2(&h);
    }
    for _ in 0..(m - 1) {
        h = sys.d1(&h);
    }
    let scale = factorial(m as u64) * factorial(n as u64);
    h.eval_u0(base) / scale
}

/// Advisory convergence-radius estimate from coefficient growth: the
/// reciprocal of the largest `|u_{m,n}|^(1/(m+n))` over the populated
/// total degrees in the upper half of the truncation range, where the
/// growth rate is most visible.  `None` when the series is zero.  Never
/// used in certification.
pub fn radius_hint(sol: &SeriesSolution) -> Option<f64> {
    let mut per_degree: BTreeMap<u32, f64> = BTreeMap::new();
    for (&(m, n), v) in &sol.coeffs {
        let d = m + n;
        if d == 0 {
            continue;
        }
        let a = to_f64(v).abs();
        if a > 0.0 {
            let e = per_degree.entry(d).or_insert(0.0);
            if a > *e {
                *e = a;
            }
        }
    }
    let top_degree = *per_degree.keys().next_back()?;
    let threshold = (sol.trunc / 2).min(top_degree.saturating_sub(1));
    let top = per_degree
        .iter()
        .filter(|(&d, _)| d > threshold)
        .map(|(&d, &a)| a.powf(1.0 / d as f64))
        .fold(f64::MIN, f64::max);
    Some(1.0 / top)
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

    fn zero_rat() -> Rat {
        Rat::from_integer(0.into())
    }

    fn riccati() -> (VectorField, SeriesSystem) {
        let field = VectorField::new(Poly2::one(), &(&x2() * &x2()) - &x1()).unwrap();
        let sys = build_fg(&field, &RatFunc::zero());
        (field, sys)
    }

    #[test]
    fn right_hand_sides_for_known_fields() {
        let (_, sys) = riccati();
        assert_eq!(sys.f.coeff(0), RatFunc::from_rat(rat_i(-2)));
        assert_eq!(sys.f.coeff(1), RatFunc::from_poly(x2().scale(&rat_i(-2))));
        assert_eq!(
            sys.f.coeff(2),
            RatFunc::from_poly(&x1() - &(&x2() * &x2())).scale(&rat(1, 2))
        );
        assert_eq!(sys.g.coeff(0), RatFunc::zero());
        assert_eq!(sys.g.coeff(2), RatFunc::from_rat(rat(1, 2)));
        assert!(sys.compatibility_residual().is_zero());
        assert!(sys.compatibility_residual().deg_u() == 0);
    }

    #[test]
    fn compatibility_detects_wrong_witness_functions() {
        // a = 1 does not solve the order-3 equation for the parabolic
        // Riccati field, and the obstruction shows up here.
        let field = VectorField::new(Poly2::one(), &(&x2() * &x2()) - &x1()).unwrap();
        let sys = build_fg(&field, &RatFunc::one());
        assert!(!sys.compatibility_residual().is_zero());

        // x1' = 1, x2' = x2 with a = 0 is compatible and nontrivial.
        let field = VectorField::new(Poly2::one(), x2()).unwrap();
        let sys = build_fg(&field, &RatFunc::zero());
        assert!(!sys.f.is_zero());
        assert!(sys.compatibility_residual().is_zero());
    }

    #[test]
    fn tangent_series_matches_closed_form() {
        // x1' = 1, x2' = 0 with a = 2: u solves d2 u = 2 + u^2/2 with
        // d1 u = 0, so u = 2 tan(x2) and the coefficients are known.
        let field = VectorField::new(Poly2::one(), Poly2::zero()).unwrap();
        let sys = build_fg(&field, &RatFunc::from_rat(rat_i(2)));
        assert!(sys.compatibility_residual().is_zero());
        let base = choose_base_point(&field, &sys);
        assert_eq!(base, (rat_i(0), rat_i(0)));
        let sol = solve_series(&sys, &base, 6);
        assert_eq!(sol.coeff(0, 1), rat_i(2));
        assert_eq!(sol.coeff(0, 2), zero_rat());
        assert_eq!(sol.coeff(0, 3), rat(2, 3));
        assert_eq!(sol.coeff(0, 5), rat(4, 15));
        for &(m, _) in sol.coeffs.keys() {
            assert_eq!(m, 0, "no x1 dependence for this system");
        }
        assert!(residuals_vanish(&sys, &sol));
        let r = radius_hint(&sol).unwrap();
        assert!(r > 0.5 && r < 3.0, "estimate {r} for true radius pi/2");
    }

    #[test]
    fn riccati_series_leading_coefficients() {
        let (field, sys) = riccati();
        let base = choose_base_point(&field, &sys);
        assert_eq!(base, (rat_i(0), rat_i(0)));
        let sol = solve_series(&sys, &base, 6);
        assert_eq!(sol.coeff(0, 0), zero_rat());
        assert_eq!(sol.coeff(1, 0), rat_i(-2));
        assert_eq!(sol.coeff(0, 1), zero_rat());
        assert!(residuals_vanish(&sys, &sol));
    }

    #[test]
    fn operator_route_agrees_with_degreewise_solver() {
        let cases: Vec<(VectorField, RatFunc)> = vec![
            (
                VectorField::new(Poly2::one(), &(&x2() * &x2()) - &x1()).unwrap(),
                RatFunc::zero(),
            ),
            (
                VectorField::new(Poly2::one(), x2()).unwrap(),
                RatFunc::zero(),
            ),
            (
                VectorField::new(Poly2::one(), Poly2::zero()).unwrap(),
                RatFunc::from_rat(rat_i(2)),
            ),
        ];
        for (field, a) in cases {
            let sys = build_fg(&field, &a);
            assert!(sys.compatibility_residual().is_zero());
            let base = choose_base_point(&field, &sys);
            let sol = solve_series(&sys, &base, 5);
            for m in 0..=5u32 {
                for n in 0..=(5 - m) {
                    let direct = sol.coeff(m, n);
                    let via_ops = coeff_by_operators(&sys, &base, m, n);
                    assert_eq!(direct, via_ops, "u_({m},{n}) on {field}");
                    if m >= 1 && n >= 1 {
                        let alt = coeff_by_operators_alt(&sys, &base, m, n);
                        assert_eq!(direct, alt, "alternative route at ({m},{n})");
                    }
                }
            }
        }
    }

    #[test]
    fn base_point_sweep_avoids_denominators() {
        // X1 = x1 puts a pole on the x2-axis; the sweep must move off it.
        let field = VectorField::new(x1(), &(&x1() * &x2()) + &Poly2::one()).unwrap();
        let sys = build_fg(&field, &RatFunc::zero());
        let base = choose_base_point(&field, &sys);
        assert_eq!(base, (rat_i(-1), rat_i(-1)));
        assert!(field.x1().eval(&base) != zero_rat());
        let sol = solve_series(&sys, &base, 4);
        assert!(residuals_vanish(&sys, &sol));
    }

    #[test]
    fn radius_hint_is_advisory_only() {
        let sol = SeriesSolution {
            base: (rat_i(0), rat_i(0)),
            trunc: 4,
            coeffs: BTreeMap::new(),
        };
        assert_eq!(radius_hint(&sol), None);
    }

    #[test]
    fn series_expansion_helpers_are_exact() {
        // 1 / (1 - x1) at 0: geometric series.
        let f = RatFunc::new(Poly2::one(), &Poly2::one() - &x1()).unwrap();
        let s = TruncSeries::from_ratfunc_at(&f, &(rat_i(0), rat_i(0)), 5);
        for m in 0..=5 {
            assert_eq!(s.coeff(m, 0), rat_i(1));
        }
        // Shifted polynomial: (x1 - 1)^2 at base 1 is t^2.
        let p = (&x1() - &Poly2::one()).pow(2);
        let s = TruncSeries::from_poly_at(&p, &(rat_i(1), rat_i(0)), 5);
        assert_eq!(s.coeff(0, 0), zero_rat());
        assert_eq!(s.coeff(1, 0), zero_rat());
        assert_eq!(s.coeff(2, 0), rat_i(1));
        // Division then multiplication round-trips.
        let den = &(&Poly2::one() + &x1()) + &x2();
        let g = RatFunc::new(&x1() + &(&x2() * &x2()), den.clone()).unwrap();
        let s = TruncSeries::from_ratfunc_at(&g, &(rat_i(0), rat_i(0)), 6);
        let back = s.mul(&TruncSeries::from_poly_at(&den, &(rat_i(0), rat_i(0)), 6));
        let want = TruncSeries::from_poly_at(g.num(), &(rat_i(0), rat_i(0)), 6);
        for d in 0..=6u32 {
            for m in 0..=d {
                assert_eq!(back.coeff(m, d - m), want.coeff(m, d - m));
            }
        }
    }
}
