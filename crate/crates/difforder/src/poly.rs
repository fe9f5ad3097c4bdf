//! Sparse bivariate polynomials over arbitrary-precision rationals.
//!
//! Monomials are ordered graded-lexicographically with `x1 > x2`; the map
//! representation stores no zero coefficients, so structural equality is
//! polynomial equality.  Beyond ring arithmetic the module provides exact
//! division, gcd (content plus primitive-part pseudo-remainder sequence in
//! `(Q[x1])[x2]`) and the squarefree part — no irreducible factorization.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, Integer, One, Signed, Zero};

use crate::rat::{self, Rat};

/// Differentiation / evaluation axis.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    X1,
    X2,
}

/// A monomial `x1^e1 * x2^e2`, ordered graded-lex with `x1 > x2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    pub e1: u32,
    pub e2: u32,
}

impl Mono {
    pub fn new(e1: u32, e2: u32) -> Self {
        Mono { e1, e2 }
    }

    pub fn degree(&self) -> u32 {
        self.e1 + self.e2
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.e1 <= other.e1 && self.e2 <= other.e2
    }

    fn product(&self, other: &Mono) -> Mono {
        Mono::new(self.e1 + other.e1, self.e2 + other.e2)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.e1.cmp(&other.e1))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse bivariate polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly2 {
    terms: BTreeMap<Mono, Rat>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn one() -> Self {
        Poly2::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly2::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::new(0, 0), c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X1 => Poly2::monomial(1, 0, Rat::one()),
            Var::X2 => Poly2::monomial(0, 1, Rat::one()),
        }
    }

    pub fn monomial(e1: u32, e2: u32, c: Rat) -> Self {
        let mut p = Poly2::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::new(e1, e2), c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::degree).max()
    }

    /// Degree in a single variable; `None` for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| match v {
                Var::X1 => m.e1,
                Var::X2 => m.e2,
            })
            .max()
    }

    pub fn coeff(&self, e1: u32, e2: u32) -> Rat {
        self.terms
            .get(&Mono::new(e1, e2))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(0, 0)
    }

    /// Highest term under graded-lex; `None` for zero.
    pub fn leading(&self) -> Option<(Mono, &Rat)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    /// Lowest term under graded-lex; `None` for zero.
    pub fn trailing(&self) -> Option<(Mono, &Rat)> {
        self.terms.iter().next().map(|(m, c)| (*m, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_add(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly2 {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (*m, a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly2 {
        let mut acc = Poly2::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: Var) -> Poly2 {
        let mut out = Poly2::zero();
        for (m, c) in &self.terms {
            let (e, rest) = match v {
                Var::X1 => (m.e1, Mono::new(m.e1.wrapping_sub(1), m.e2)),
                Var::X2 => (m.e2, Mono::new(m.e1, m.e2.wrapping_sub(1))),
            };
            if e > 0 {
                out.insert_add(rest, c.clone() * rat::rat_i(e as i64));
            }
        }
        out
    }

    pub fn eval(&self, p: &(Rat, Rat)) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..m.e1 {
                t *= p.0.clone();
            }
            for _ in 0..m.e2 {
                t *= p.1.clone();
            }
            acc += t;
        }
        acc
    }

    /// Swaps the roles of `x1` and `x2`.
    pub fn swap_vars(&self) -> Poly2 {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Mono::new(m.e2, m.e1), c.clone()))
                .collect(),
        }
    }

    /// Writes `self = scale * prim` with `prim` having coprime integer
    /// coefficients and a positive leading coefficient; `scale > 0` unless
    /// the leading coefficient of `self` is negative.
    pub fn integer_primitive(&self) -> (Poly2, Rat) {
        if self.is_zero() {
            return (Poly2::zero(), Rat::one());
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut scale = Rat::new(num_gcd, den_lcm);
        let (lead_m, lead_c) = self.leading().expect("nonzero");
        if lead_c.is_negative() {
            scale = -scale;
        }
        let _ = lead_m;
        let inv = scale.recip();
        (self.scale(&inv), scale)
    }

    /// Exact multivariate division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly2) -> Option<Poly2> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (dm, dc) = d.leading().unwrap();
        let mut r = self.clone();
        let mut q = Poly2::zero();
        while !r.is_zero() {
            let (rm, rc) = r.leading().unwrap();
            if !dm.divides(&rm) {
                return None;
            }
            let t = Poly2::monomial(
                rm.e1 - dm.e1,
                rm.e2 - dm.e2,
                rc.clone() / dc.clone(),
            );
            r = &r - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    /// Greatest common divisor, returned with coprime integer coefficients
    /// and a positive leading coefficient.  `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly2) -> Poly2 {
        let g = self.gcd_inner(other);
        if g.is_zero() {
            g
        } else {
            g.integer_primitive().0
        }
    }

    fn gcd_inner(&self, other: &Poly2) -> Poly2 {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_constant() || other.is_constant() {
            return Poly2::one();
        }
        let d2 = self.degree_in(Var::X2).unwrap().max(other.degree_in(Var::X2).unwrap());
        if d2 == 0 {
            // Univariate in x1.
            return uni_gcd_x1(self, other);
        }
        let d1 = self.degree_in(Var::X1).unwrap().max(other.degree_in(Var::X1).unwrap());
        if d1 == 0 {
            return uni_gcd_x1(&self.swap_vars(), &other.swap_vars()).swap_vars();
        }
        if let Some(g) = gcd_by_specialization(self, other) {
            return g;
        }
        // View both operands in (Q[x1])[x2] and run a primitive
        // pseudo-remainder sequence.
        let (cf, pf) = x2_content_split(self);
        let (cg, pg) = x2_content_split(other);
        let content_gcd = uni_gcd_x1(&cf, &cg);
        let pf = pf.integer_primitive().0;
        let pg = pg.integer_primitive().0;
        if let Some(g) = gcd_by_interpolation(&pf, &pg) {
            return &content_gcd * &g;
        }
        let mut f = pf;
        let mut g = pg;
        if x2_deg(&f) < x2_deg(&g) {
            std::mem::swap(&mut f, &mut g);
        }
        while !g.is_zero() {
            let r = pseudo_rem_x2(&f, &g);
            f = g;
            g = if r.is_zero() {
                Poly2::zero()
            } else {
                x2_content_split(&r.integer_primitive().0).1.integer_primitive().0
            };
        }
        &content_gcd * &x2_content_split(&f).1
    }

    /// Product of the distinct irreducible factors, via
    /// `self / gcd(self, d1(self), d2(self))`.
    pub fn squarefree_part(&self) -> Poly2 {
        if self.is_zero() {
            return Poly2::zero();
        }
        if self.is_constant() {
            return Poly2::one();
        }
        let g = self
            .gcd(&self.derivative(Var::X1))
            .gcd(&self.derivative(Var::X2));
        let q = self
            .div_exact(&g)
            .expect("gcd with derivatives divides the polynomial");
        q.integer_primitive().0
    }
}

/// Specializing `x2` at a point that preserves the x1-leading coefficient
/// bounds the x1-degree of the gcd by the degree of a univariate gcd.  When
/// that bound is zero the full gcd lies in `Q[x2]` and equals the gcd of the
/// x1-contents, so the expensive bivariate remainder sequence is skipped.
/// `None` means the fast path is inconclusive.
fn gcd_by_specialization(f: &Poly2, g: &Poly2) -> Option<Poly2> {
    let d1f = f.degree_in(Var::X1).unwrap();
    let lc_f: Poly2 = {
        let mut out = Poly2::zero();
        for (m, c) in f.iter() {
            if m.e1 == d1f {
                out.insert_add(Mono::new(0, m.e2), c.clone());
            }
        }
        out
    };
    let t = (0..=16i64).find(|t| !lc_f.eval(&(Rat::zero(), rat::rat_i(*t))).is_zero())?;
    let t = rat::rat_i(t);
    let specialize = |p: &Poly2| -> Poly2 {
        let mut out = Poly2::zero();
        for (m, c) in p.iter() {
            let mut v = c.clone();
            for _ in 0..m.e2 {
                v *= t.clone();
            }
            out.insert_add(Mono::new(m.e1, 0), v);
        }
        out
    };
    let h = uni_gcd_x1(&specialize(f), &specialize(g));
    if !h.is_constant() {
        return None;
    }
    // gcd(f, g) divides the x1-contents of both operands.
    let x1_content = |p: &Poly2| -> Poly2 {
        let d1 = p.degree_in(Var::X1).unwrap();
        let mut content = Poly2::zero();
        for k in 0..=d1 {
            let mut slice = Poly2::zero();
            for (m, c) in p.iter() {
                if m.e1 == k {
                    slice.insert_add(Mono::new(0, m.e2), c.clone());
                }
            }
            if slice.is_zero() {
                continue;
            }
            content = if content.is_zero() {
                slice.integer_primitive().0
            } else {
                uni_gcd_x1(&content.swap_vars(), &slice.swap_vars()).swap_vars()
            };
            if content.is_one() {
                break;
            }
        }
        content
    };
    let cf = x1_content(f);
    if cf.is_one() {
        return Some(Poly2::one());
    }
    let cg = x1_content(g);
    Some(uni_gcd_x1(&cf.swap_vars(), &cg.swap_vars()).swap_vars())
}

/// Gcd of x2-primitive operands by specializing x1 at integer points,
/// taking univariate gcds in `Q[x2]`, and interpolating the x1-dependence.
/// The candidate is verified by exact trial division, which together with the
/// degree bound `deg_x2(candidate) = min specialized gcd degree` proves it is
/// the gcd — specialization can only enlarge the gcd, never shrink it.
/// `None` falls back to the pseudo-remainder sequence.
fn gcd_by_interpolation(f: &Poly2, g: &Poly2) -> Option<Poly2> {
    let lc = |p: &Poly2| -> Poly2 {
        let d = x2_deg(p);
        let mut out = Poly2::zero();
        for (m, c) in p.iter() {
            if m.e2 == d {
                out.insert_add(Mono::new(m.e1, 0), c.clone());
            }
        }
        out
    };
    let lcf = lc(f);
    let lcg = lc(g);
    let gamma = uni_gcd_x1(&lcf, &lcg);
    let d1 = f
        .degree_in(Var::X1)
        .unwrap()
        .min(g.degree_in(Var::X1).unwrap());
    let needed = (gamma.degree_in(Var::X1).unwrap_or(0) + d1 + 1) as usize;

    let specialize = |p: &Poly2, t: &Rat| -> Poly2 {
        // x1 := t, leaving a polynomial in x2 (stored on the x1 axis for the
        // univariate gcd helper).
        let mut out = Poly2::zero();
        for (m, c) in p.iter() {
            let mut v = c.clone();
            for _ in 0..m.e1 {
                v *= t.clone();
            }
            out.insert_add(Mono::new(m.e2, 0), v);
        }
        out
    };

    let mut images: Vec<(Rat, Poly2)> = Vec::new();
    let mut min_deg: Option<u32> = None;
    let mut t = 0i64;
    let mut misses = 0;
    while images.len() < needed {
        if misses > 40 {
            return None;
        }
        let point = rat::rat_i(t);
        t += 1;
        if lcf.eval(&(point.clone(), Rat::zero())).is_zero()
            || lcg.eval(&(point.clone(), Rat::zero())).is_zero()
        {
            misses += 1;
            continue;
        }
        let ft = specialize(f, &point);
        let gt = specialize(g, &point);
        let h = uni_gcd_x1(&ft, &gt);
        let hd = h.degree_in(Var::X1).unwrap_or(0);
        match min_deg {
            Some(m) if hd > m => {
                misses += 1;
                continue; // unlucky point
            }
            Some(m) if hd < m => {
                images.clear();
                min_deg = Some(hd);
            }
            None => min_deg = Some(hd),
            _ => {}
        }
        if min_deg == Some(0) {
            // Coprime after content split.
            return Some(Poly2::one());
        }
        // Scale so the leading coefficient matches gamma(t); then the images
        // are consistent snapshots of (gamma / lc(gcd)) * gcd.
        let target = gamma.eval(&(point.clone(), Rat::zero()));
        let lead = h
            .coeff(hd, 0);
        let scaled = h.scale(&(target / lead));
        images.push((point, scaled));
    }

    let m = min_deg.unwrap();
    // Lagrange interpolation of each x2-coefficient through the images.
    let mut cand = Poly2::zero();
    for k in 0..=m {
        // Values of the coefficient of x2^k at the sample points.
        let mut acc = Poly2::zero();
        for (i, (ti, hi)) in images.iter().enumerate() {
            let mut basis = Poly2::one();
            let mut denom = Rat::one();
            for (j, (tj, _)) in images.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = &basis * &(&Poly2::var(Var::X1) - &Poly2::constant(tj.clone()));
                denom *= ti.clone() - tj.clone();
            }
            acc = &acc + &basis.scale(&(hi.coeff(k, 0) / denom));
        }
        // Move the interpolated x1-polynomial onto the x2^k slice.
        for (mo, c) in acc.iter() {
            cand = &cand + &Poly2::monomial(mo.e1, k, c.clone());
        }
    }
    if cand.is_zero() {
        return None;
    }
    let cand = x2_content_split(&cand.integer_primitive().0).1.integer_primitive().0;
    if f.div_exact(&cand).is_some() && g.div_exact(&cand).is_some() {
        Some(cand)
    } else {
        None
    }
}

/// x2-degree with zero mapped to 0 (callers guard zero separately).
fn x2_deg(p: &Poly2) -> u32 {
    p.degree_in(Var::X2).unwrap_or(0)
}

/// Coefficient of `x2^k` as an x1-only polynomial.
fn x2_coeff(p: &Poly2, k: u32) -> Poly2 {
    let mut out = Poly2::zero();
    for (m, c) in p.iter() {
        if m.e2 == k {
            out.insert_add(Mono::new(m.e1, 0), c.clone());
        }
    }
    out
}

/// Splits `p` into `(content, primitive part)` with respect to x2, the
/// content being the gcd in `Q[x1]` of the x2-coefficients.
fn x2_content_split(p: &Poly2) -> (Poly2, Poly2) {
    let deg = x2_deg(p);
    let mut content = Poly2::zero();
    for k in 0..=deg {
        let c = x2_coeff(p, k);
        if !c.is_zero() {
            content = if content.is_zero() {
                c.integer_primitive().0
            } else {
                uni_gcd_x1(&content, &c)
            };
        }
        if content.is_one() {
            break;
        }
    }
    let prim = p.div_exact(&content).expect("content divides");
    (content, prim)
}

/// Pseudo-remainder of `f` by `g` in `(Q[x1])[x2]`; requires `g` nonzero and
/// `x2_deg(f) >= x2_deg(g)` not required (returns `f` scaled when smaller).
fn pseudo_rem_x2(f: &Poly2, g: &Poly2) -> Poly2 {
    let dg = x2_deg(g);
    let lc_g = x2_coeff(g, dg);
    let mut r = f.clone();
    while !r.is_zero() && x2_deg(&r) >= dg && r.degree_in(Var::X2).is_some() {
        let dr = x2_deg(&r);
        if dr < dg {
            break;
        }
        let lc_r = x2_coeff(&r, dr);
        let shift = Poly2::monomial(0, dr - dg, Rat::one());
        r = &(&r * &lc_g) - &(&(&lc_r * &shift) * g);
    }
    r
}

/// Gcd for polynomials in x1 only, computed as a primitive pseudo-remainder
/// sequence over the integers to keep coefficient growth linear.  Returns an
/// integer-primitive polynomial with positive leading coefficient.
fn uni_gcd_x1(a: &Poly2, b: &Poly2) -> Poly2 {
    let to_vec = |p: &Poly2| -> Vec<BigInt> {
        let prim = p.integer_primitive().0;
        let d = prim.degree_in(Var::X1).unwrap_or(0) as usize;
        let mut v = vec![BigInt::zero(); d + 1];
        for (m, c) in prim.iter() {
            debug_assert_eq!(m.e2, 0);
            v[m.e1 as usize] = c.numer().clone();
        }
        v
    };
    let trim = |v: &mut Vec<BigInt>| {
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
    };
    let make_primitive = |v: &mut Vec<BigInt>| {
        let mut g = BigInt::zero();
        for c in v.iter() {
            g = g.gcd(c);
        }
        if g > BigInt::one() {
            for c in v.iter_mut() {
                *c = &*c / &g;
            }
        }
    };
    let mut u = to_vec(a);
    let mut w = to_vec(b);
    trim(&mut u);
    trim(&mut w);
    if u.len() < w.len() {
        std::mem::swap(&mut u, &mut w);
    }
    while !w.is_empty() {
        // Pseudo-remainder of u by w over Z.
        while u.len() >= w.len() && !u.is_empty() {
            let k = u.len() - w.len();
            let lc_u = u.last().unwrap().clone();
            let lc_w = w.last().unwrap().clone();
            for c in u.iter_mut() {
                *c = &*c * &lc_w;
            }
            for i in 0..w.len() {
                let t = &u[k + i] - &(&lc_u * &w[i]);
                u[k + i] = t;
            }
            trim(&mut u);
            make_primitive(&mut u);
        }
        std::mem::swap(&mut u, &mut w);
    }
    let mut out = Poly2::zero();
    for (i, c) in u.into_iter().enumerate() {
        out.insert_add(Mono::new(i as u32, 0), Rat::from_integer(c));
    }
    if out.is_zero() {
        out
    } else {
        out.integer_primitive().0
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(*m, -c.clone());
        }
        out
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.insert_add(m1.product(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, -c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for Poly2 {
    /// Canonical form: graded-lex descending, `*` between factors, exponents
    /// with `^`, e.g. `-1/3*x1^3 + x1 + x2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.degree() == 0 {
                factors.push(rat::display(&abs));
            }
            for (name, e) in [("x1", m.e1), ("x2", m.e2)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{}^{}", name, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Random polynomial of total degree at most `deg`: each monomial is kept
/// with probability 0.6 and gets a coefficient of height at most `h`.
pub fn sample_poly<R: rand::Rng>(rng: &mut R, deg: u32, h: u64) -> Poly2 {
    let mut p = Poly2::zero();
    for e1 in 0..=deg {
        for e2 in 0..=(deg - e1) {
            if rng.gen_bool(0.6) {
                p = &p + &Poly2::monomial(e1, e2, rat::sample_rat(rng, h));
            }
        }
    }
    p
}
