//! Invariant algebraic curves and rational first integrals.
//!
//! A polynomial `p` is invariant for the field when `X p = K * p` for some
//! polynomial cofactor `K`; its zero set is then a union of trajectories.
//! The search enumerates cofactors over a bounded grid — degree at most
//! `max(deg X1, deg X2) - 1`, every coefficient in
//! `{0} ∪ {±a/b : 1 <= a, b <= height}` — and for each candidate cofactor
//! solves the linear system `X p - K p = 0` in the coefficients of `p`.
//! A full-rank test modulo a large prime rejects almost all candidates
//! cheaply (full rank mod p implies full rank over the rationals, so a
//! rejection is always sound); survivors get an exact rational kernel, and
//! every reported curve is re-verified exactly.  A verification failure
//! would be a bug and panics.
//!
//! The outcome is complete exactly for curves within the degree bound whose
//! cofactor coefficients lie on the grid.  Callers must report misses as
//! bounded-search outcomes, never as impossibility.
//!
//! On top of the curve search sit two routes to a rational first integral
//! `w` (a non-constant function with `X w = 0`):
//!
//! * integer relations among the cofactors of the found curves — if
//!   `sum_i n_i K_i = 0` then `w = prod_i p_i^{n_i}`, and
//! * a direct ansatz `w = P / Q` with `Q` drawn from the candidate
//!   denominators and the coefficients of `P` solved linearly.
//!
//! Either route ends in the same exact check `X w = 0` before anything is
//! returned.

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::linalg::{rank_mod, rat_mod, solve_linear, sub_mod};
use crate::poly::{Mono, Poly2};
use crate::rat::{rat_i, Rat};
use crate::ratfunc::RatFunc;
use crate::vectorfield::VectorField;

/// An invariant curve together with its verified cofactor: `X p = K * p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxPolynomial {
    pub p: Poly2,
    pub cofactor: Poly2,
}

/// Cofactor grids larger than this fall back to constant cofactors only.
const GRID_BUDGET: u128 = 2_000_000;

/// All monomials of total degree at most `d`, ascending graded-lex.
pub(crate) fn monos_up_to(d: u32) -> Vec<Mono> {
    let mut v = Vec::new();
    for e1 in 0..=d {
        for e2 in 0..=(d - e1) {
            v.push(Mono::new(e1, e2));
        }
    }
    v.sort();
    v
}

/// Coefficient grid `{0} ∪ {±a/b : 1 <= a, b <= height}`, zero first, in a
/// fixed deterministic order.
fn coefficient_grid(height: u64) -> Vec<Rat> {
    let mut v = vec![Rat::zero()];
    let mut seen = std::collections::BTreeSet::new();
    for a in 1..=height {
        for b in 1..=height {
            let r = Rat::new(BigInt::from(a), BigInt::from(b));
            if seen.insert(r.clone()) {
                v.push(r.clone());
                v.push(-r);
            }
        }
    }
    v
}

/// Finds invariant algebraic curves up to the given degree whose cofactor
/// coefficients lie on the height-bounded grid.  Deterministic: results
/// are integer-primitive with positive leading coefficient, never divisible
/// by an earlier result, and sorted by (degree, display form).
pub fn darboux_polynomials(field: &VectorField, max_deg: u32, height: u64) -> Vec<DarbouxPolynomial> {
    search(field, max_deg, height, true)
}

fn search(
    field: &VectorField,
    max_deg: u32,
    height: u64,
    use_prefilter: bool,
) -> Vec<DarbouxPolynomial> {
    let fdeg = field.degree();
    let mut cof_monos = monos_up_to(fdeg.saturating_sub(1));
    let values = coefficient_grid(height);
    let grid_size = (values.len() as u128).checked_pow(cof_monos.len() as u32);
    if grid_size.map(|s| s > GRID_BUDGET).unwrap_or(true) {
        cof_monos = monos_up_to(0);
    }

    let mut found: Vec<DarbouxPolynomial> = Vec::new();
    for d in 1..=max_deg {
        let support = monos_up_to(d);
        // Exact action of the field on each candidate monomial.
        let xcols: Vec<Poly2> = support
            .iter()
            .map(|m| field.apply_poly(&Poly2::monomial(m.e1, m.e2, Rat::one())))
            .collect();
        // Row space: everything X p - K p can touch.
        let row_monos = monos_up_to(d + fdeg);
        let row_index: BTreeMap<Mono, usize> = row_monos
            .iter()
            .enumerate()
            .map(|(i, m)| (*m, i))
            .collect();
        // Where K's monomial beta sends support monomial alpha.
        let prod_rows: Vec<Vec<usize>> = cof_monos
            .iter()
            .map(|beta| {
                support
                    .iter()
                    .map(|alpha| row_index[&Mono::new(alpha.e1 + beta.e1, alpha.e2 + beta.e2)])
                    .collect()
            })
            .collect();
        // Prime-field image of the X-action columns; unavailable when a
        // denominator vanishes mod p.
        let base_modp: Option<Vec<Vec<u64>>> = xcols
            .iter()
            .map(|col| {
                let mut v = vec![0u64; row_monos.len()];
                for (m, c) in col.iter() {
                    v[row_index[m]] = rat_mod(c)?;
                }
                Some(v)
            })
            .collect();

        let mut counter = vec![0usize; cof_monos.len()];
        loop {
            let k_zero = counter.iter().all(|&i| i == 0);
            // The zero cofactor admits every constant; restrict its support
            // to non-constant monomials so the kernel is meaningful.
            let col_range = if k_zero { 1..support.len() } else { 0..support.len() };

            let mut skip = false;
            if use_prefilter {
                if let Some(base) = &base_modp {
                    let kvals: Option<Vec<u64>> =
                        counter.iter().map(|&i| rat_mod(&values[i])).collect();
                    if let Some(kvals) = kvals {
                        let ncols = col_range.len();
                        let mut m = vec![vec![0u64; ncols]; row_monos.len()];
                        for (cidx, a) in col_range.clone().enumerate() {
                            for (row, v) in base[a].iter().enumerate() {
                                m[row][cidx] = *v;
                            }
                            for (bidx, &kv) in kvals.iter().enumerate() {
                                if kv != 0 {
                                    let row = prod_rows[bidx][a];
                                    m[row][cidx] = sub_mod(m[row][cidx], kv);
                                }
                            }
                        }
                        skip = rank_mod(m) == ncols;
                    }
                }
            }

            if !skip {
                let k_poly = {
                    let mut k = Poly2::zero();
                    for (bidx, beta) in cof_monos.iter().enumerate() {
                        let c = &values[counter[bidx]];
                        if !c.is_zero() {
                            k = &k + &Poly2::monomial(beta.e1, beta.e2, c.clone());
                        }
                    }
                    k
                };
                let ncols = col_range.len();
                let mut a = vec![vec![Rat::zero(); ncols]; row_monos.len()];
                for (cidx, aidx) in col_range.clone().enumerate() {
                    for (m, c) in xcols[aidx].iter() {
                        a[row_index[m]][cidx] = c.clone();
                    }
                    for bidx in 0..cof_monos.len() {
                        let kv = &values[counter[bidx]];
                        if !kv.is_zero() {
                            let row = prod_rows[bidx][aidx];
                            a[row][cidx] = a[row][cidx].clone() - kv.clone();
                        }
                    }
                }
                let rhs = vec![Rat::zero(); row_monos.len()];
                let sol = solve_linear(&a, &rhs).expect("homogeneous systems are consistent");
                for v in &sol.nullspace {
                    let mut p = Poly2::zero();
                    for (cidx, aidx) in col_range.clone().enumerate() {
                        if !v[cidx].is_zero() {
                            let m = support[aidx];
                            p = &p + &Poly2::monomial(m.e1, m.e2, v[cidx].clone());
                        }
                    }
                    if p.is_zero() || p.is_constant() {
                        continue;
                    }
                    let p = p.integer_primitive().0;
                    if found.iter().any(|g| p.div_exact(&g.p).is_some()) {
                        continue;
                    }
                    let check = &field.apply_poly(&p) - &(&k_poly * &p);
                    assert!(
                        check.is_zero(),
                        "exact kernel must satisfy X p = K p: p = {p}, K = {k_poly}"
                    );
                    found.push(DarbouxPolynomial {
                        p,
                        cofactor: k_poly.clone(),
                    });
                }
            }

            // Odometer step over the grid, last position fastest.
            let mut pos = counter.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                counter[pos] += 1;
                if counter[pos] < values.len() {
                    break;
                }
                counter[pos] = 0;
            }
            if counter.iter().all(|&i| i == 0) {
                break;
            }
        }
    }

    found.sort_by_key(|g| (g.p.degree().unwrap_or(0), g.p.to_string()));
    found
}

/// Canonical representative of a first integral (any `c*w + d` with
/// `c != 0` describes the same level sets).  Polynomials drop their
/// constant term and are scaled to primitive integer coefficients; the
/// first nonzero coefficient in ascending graded-lex order is made
/// positive.  Proper quotients keep their reduced form and only the
/// overall sign is normalized the same way.
pub fn canonicalize_first_integral(w: &RatFunc) -> RatFunc {
    debug_assert!(!w.is_constant(), "only non-constant integrals are canonical");
    if let Some(p) = w.to_poly() {
        let p = &p - &Poly2::constant(p.constant_term());
        let prim = p.integer_primitive().0;
        match prim.trailing() {
            Some((_, c)) if c.is_negative() => RatFunc::from_poly(-&prim),
            _ => RatFunc::from_poly(prim),
        }
    } else if w.num().trailing().map(|(_, c)| c.is_negative()).unwrap_or(false) {
        -w
    } else {
        w.clone()
    }
}

/// Scales a rational vector to coprime integers with the first nonzero
/// entry positive; `None` for the zero vector.
fn primitive_integer_vector(v: &[Rat]) -> Option<Vec<BigInt>> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * &Rat::from_integer(lcm.clone())).numer().clone())
        .collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return None;
    }
    let flip = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    for x in ints.iter_mut() {
        *x = &*x / &g;
        if flip {
            *x = -&*x;
        }
    }
    Some(ints)
}

/// Largest exponent allowed when assembling an integral from cofactor
/// relations; keeps the witness readable and the check cheap.
const MAX_RELATION_EXPONENT: i64 = 6;

/// Searches for a non-constant rational `w` with `X w = 0`.
///
/// Cofactor relations among the supplied curves are tried first; then a
/// direct `P / Q` ansatz with `deg P <= num_deg` and `Q` running over
/// [`candidate_denominators`].  Any returned value has been verified
/// exactly and is canonical per [`canonicalize_first_integral`].
pub fn rational_first_integral(
    field: &VectorField,
    generators: &[DarbouxPolynomial],
    num_deg: u32,
    max_denom_power: u32,
) -> Option<RatFunc> {
    if !generators.is_empty() {
        if let Some(w) = integral_from_cofactor_relations(field, generators) {
            return Some(w);
        }
    }
    integral_from_direct_ansatz(field, generators, num_deg, max_denom_power)
}

fn integral_from_cofactor_relations(
    field: &VectorField,
    generators: &[DarbouxPolynomial],
) -> Option<RatFunc> {
    // Rows: monomials of the cofactor space; columns: generators.
    let mut monos: std::collections::BTreeSet<Mono> = std::collections::BTreeSet::new();
    for g in generators {
        for (m, _) in g.cofactor.iter() {
            monos.insert(*m);
        }
    }
    let n = generators.len();
    let mut a: Vec<Vec<Rat>> = monos
        .iter()
        .map(|m| {
            generators
                .iter()
                .map(|g| g.cofactor.coeff(m.e1, m.e2))
                .collect()
        })
        .collect();
    if a.is_empty() {
        // All cofactors vanish: any single curve is already an integral.
        a.push(vec![Rat::zero(); n]);
    }
    let rhs = vec![Rat::zero(); a.len()];
    let sol = solve_linear(&a, &rhs).expect("homogeneous systems are consistent");

    // Candidate exponent vectors: each basis vector, then small pairwise
    // combinations when the relation space has higher dimension.
    let mut candidates: Vec<Vec<BigInt>> = Vec::new();
    let push = |v: Option<Vec<BigInt>>, out: &mut Vec<Vec<BigInt>>| {
        if let Some(v) = v {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    };
    for v in &sol.nullspace {
        push(primitive_integer_vector(v), &mut candidates);
    }
    for (i, v1) in sol.nullspace.iter().enumerate() {
        for v2 in sol.nullspace.iter().skip(i + 1) {
            for c1 in -2i64..=2 {
                for c2 in -2i64..=2 {
                    if c1 == 0 && c2 == 0 {
                        continue;
                    }
                    let combo: Vec<Rat> = v1
                        .iter()
                        .zip(v2)
                        .map(|(x, y)| x * &rat_i(c1) + y * &rat_i(c2))
                        .collect();
                    push(primitive_integer_vector(&combo), &mut candidates);
                }
            }
        }
    }

    for exps in candidates {
        if exps.iter().any(|e| e.abs() > BigInt::from(MAX_RELATION_EXPONENT)) {
            continue;
        }
        let mut w = RatFunc::one();
        for (g, e) in generators.iter().zip(&exps) {
            let e = e.to_i64().expect("bounded exponent");
            if e != 0 {
                let f = RatFunc::from_poly(g.p.clone())
                    .powi(e)
                    .expect("nonzero curve");
                w = &w * &f;
            }
        }
        if w.is_constant() {
            continue;
        }
        if field.apply(&w).is_zero() {
            return Some(canonicalize_first_integral(&w));
        }
    }
    None
}

fn integral_from_direct_ansatz(
    field: &VectorField,
    generators: &[DarbouxPolynomial],
    num_deg: u32,
    max_denom_power: u32,
) -> Option<RatFunc> {
    for q in candidate_denominators(field, generators, max_denom_power) {
        let support = monos_up_to(num_deg);
        let xq = field.apply_poly(&q);
        // Row space of q * X(P) - P * X(q).
        let rows_deg = num_deg + field.degree() + q.degree().unwrap_or(0);
        let row_monos = monos_up_to(rows_deg);
        let row_index: BTreeMap<Mono, usize> = row_monos
            .iter()
            .enumerate()
            .map(|(i, m)| (*m, i))
            .collect();
        let mut a = vec![vec![Rat::zero(); support.len()]; row_monos.len()];
        for (cidx, alpha) in support.iter().enumerate() {
            let mono = Poly2::monomial(alpha.e1, alpha.e2, Rat::one());
            let col = &(&q * &field.apply_poly(&mono)) - &(&mono * &xq);
            for (m, c) in col.iter() {
                a[row_index[m]][cidx] = c.clone();
            }
        }
        let rhs = vec![Rat::zero(); row_monos.len()];
        let sol = solve_linear(&a, &rhs).expect("homogeneous systems are consistent");
        for v in &sol.nullspace {
            let mut p = Poly2::zero();
            for (cidx, alpha) in support.iter().enumerate() {
                if !v[cidx].is_zero() {
                    p = &p + &Poly2::monomial(alpha.e1, alpha.e2, v[cidx].clone());
                }
            }
            if p.is_zero() {
                continue;
            }
            let w = RatFunc::new(p, q.clone()).expect("nonzero denominator");
            if w.is_constant() {
                continue;
            }
            assert!(
                field.apply(&w).is_zero(),
                "kernel vector must be a first integral"
            );
            return Some(canonicalize_first_integral(&w));
        }
    }
    None
}

/// Denominators worth trying for rational data attached to the field: all
/// products of `X1` (when non-constant) and the found invariant curves,
/// with total power at most `max_power`.  Ordered by total power, then by
/// earlier factors taking higher powers first; the constant 1 comes first.
pub fn candidate_denominators(
    field: &VectorField,
    generators: &[DarbouxPolynomial],
    max_power: u32,
) -> Vec<Poly2> {
    let mut base: Vec<Poly2> = Vec::new();
    let x1 = field.x1().integer_primitive().0;
    if !x1.is_constant() {
        base.push(x1);
    }
    for g in generators {
        if !base.contains(&g.p) {
            base.push(g.p.clone());
        }
    }
    let mut out = vec![Poly2::one()];
    for total in 1..=max_power {
        let mut exps = vec![0u32; base.len()];
        build_products(&base, total, 0, &mut exps, &mut out);
    }
    out
}

fn build_products(
    base: &[Poly2],
    remaining: u32,
    pos: usize,
    exps: &mut Vec<u32>,
    out: &mut Vec<Poly2>,
) {
    if pos == base.len() {
        if remaining == 0 {
            let mut p = Poly2::one();
            for (b, &e) in base.iter().zip(exps.iter()) {
                if e > 0 {
                    p = &p * &b.pow(e);
                }
            }
            if !p.is_one() {
                out.push(p);
            }
        }
        return;
    }
    for e in (0..=remaining).rev() {
        exps[pos] = e;
        build_products(base, remaining - e, pos + 1, exps, out);
        exps[pos] = 0;
    }
}
