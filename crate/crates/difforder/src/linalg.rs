//! Exact rational linear systems.
//!
//! Rows are cleared of denominators and eliminated with the fraction-free
//! Bareiss scheme over the integers (every interior division is exact), then
//! back-substitution over the rationals produces one particular solution
//! (free variables zero) and a nullspace basis (one unit free variable per
//! vector).  The pivot is always the first row with a nonzero entry in
//! column order, so results are deterministic.
//!
//! A reduction modulo a large prime provides sound fast-path rejections for
//! the search loops: the rank over the prime field never exceeds the rank
//! over the rationals, so full column rank mod p proves a trivial kernel,
//! and a strictly larger augmented rank mod p proves inconsistency.  The
//! modular pass can only skip exact work, never change an answer.

use num::{BigInt, Integer, One, ToPrimitive, Zero};

use crate::rat::Rat;

/// Solution set of `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    /// One solution with all free variables set to zero.
    pub particular: Vec<Rat>,
    /// Basis of the homogeneous solutions, ordered by free column.
    pub nullspace: Vec<Vec<Rat>>,
}

/// Solves `A x = b` exactly; `None` when the system is inconsistent.
///
/// `a` is row-major with `m` rows of uniform width `n`; `b` has length `m`.
#[allow(clippy::needless_range_loop)]
pub fn solve_linear(a: &[Vec<Rat>], b: &[Rat]) -> Option<LinearSolution> {
    let m = a.len();
    assert_eq!(b.len(), m, "right-hand side length mismatch");
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    for row in a {
        assert_eq!(row.len(), n, "ragged matrix");
    }
    if n == 0 {
        if b.iter().any(|x| !x.is_zero()) {
            return None;
        }
        return Some(LinearSolution {
            particular: Vec::new(),
            nullspace: Vec::new(),
        });
    }

    // Integer augmented matrix, one cleared denominator per row.
    let mut mat: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for (row, rhs) in a.iter().zip(b) {
        let mut lcm = BigInt::one();
        for c in row.iter().chain(std::iter::once(rhs)) {
            lcm = lcm.lcm(c.denom());
        }
        let scale = Rat::from_integer(lcm);
        let mut irow: Vec<BigInt> = Vec::with_capacity(n + 1);
        for c in row.iter().chain(std::iter::once(rhs)) {
            let v = c.clone() * scale.clone();
            debug_assert!(v.denom().is_one());
            irow.push(v.numer().clone());
        }
        mat.push(irow);
    }

    // Bareiss elimination over the integers.
    let mut prev = BigInt::one();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pivot_row) = (rank..m).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, pivot_row);
        let pivot = mat[rank][col].clone();
        for i in (rank + 1)..m {
            let factor = mat[i][col].clone();
            for j in (col + 1)..=n {
                let t = (&mat[i][j] * &pivot - &factor * &mat[rank][j]) / &prev;
                mat[i][j] = t;
            }
            mat[i][col] = BigInt::zero();
        }
        prev = pivot;
        pivot_cols.push(col);
        rank += 1;
    }

    // A zero coefficient row with a nonzero right-hand side is inconsistent.
    for row in mat.iter().skip(rank) {
        if !row[n].is_zero() {
            return None;
        }
    }

    let back_substitute = |free_assign: &dyn Fn(usize) -> Rat, use_rhs: bool| -> Vec<Rat> {
        let mut x = vec![Rat::zero(); n];
        let mut next_pivot = pivot_cols.iter().copied().peekable();
        for col in 0..n {
            if next_pivot.peek() == Some(&col) {
                next_pivot.next();
            } else {
                x[col] = free_assign(col);
            }
        }
        for (k, &pc) in pivot_cols.iter().enumerate().rev() {
            let mut acc = if use_rhs {
                Rat::from_integer(mat[k][n].clone())
            } else {
                Rat::zero()
            };
            for j in (pc + 1)..n {
                if !mat[k][j].is_zero() && !x[j].is_zero() {
                    acc -= Rat::from_integer(mat[k][j].clone()) * x[j].clone();
                }
            }
            x[pc] = acc / Rat::from_integer(mat[k][pc].clone());
        }
        x
    };

    let particular = back_substitute(&|_| Rat::zero(), true);
    let mut nullspace = Vec::new();
    for col in 0..n {
        if pivot_cols.contains(&col) {
            continue;
        }
        let v = back_substitute(
            &|c| if c == col { Rat::one() } else { Rat::zero() },
            false,
        );
        nullspace.push(v);
    }

    Some(LinearSolution {
        particular,
        nullspace,
    })
}

/// Matrix-vector product for verification in callers and tests.
pub fn mat_vec(a: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .map(|(c, v)| c.clone() * v.clone())
                .fold(Rat::zero(), |acc, t| acc + t)
        })
        .collect()
}

pub(crate) const PRIME: u64 = 1_000_000_007;

pub(crate) fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64) -> u64 {
    (a + PRIME - b) % PRIME
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

/// Image of a rational number in the prime field; `None` when the
/// denominator vanishes there.
pub(crate) fn rat_mod(r: &Rat) -> Option<u64> {
    let p = BigInt::from(PRIME);
    let num = ((r.numer() % &p) + &p) % &p;
    let den = ((r.denom() % &p) + &p) % &p;
    let den = den.to_u64().expect("reduced below the prime");
    if den == 0 {
        return None;
    }
    Some(mul_mod(num.to_u64().expect("reduced below the prime"), inv_mod(den)))
}

/// Rank of a dense matrix over the prime field.
#[allow(clippy::needless_range_loop)]
pub(crate) fn rank_mod(mut m: Vec<Vec<u64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = inv_mod(m[rank][col]);
        for j in col..cols {
            m[rank][j] = mul_mod(m[rank][j], inv);
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for j in col..cols {
                    let t = sub_mod(m[r][j], mul_mod(f, m[rank][j]));
                    m[r][j] = t;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// The whole matrix reduced mod p, or `None` when any denominator
/// vanishes there (in which case the fast path must be skipped).
fn matrix_mod(a: &[Vec<Rat>]) -> Option<Vec<Vec<u64>>> {
    a.iter()
        .map(|row| row.iter().map(rat_mod).collect())
        .collect()
}

/// Nullspace basis of `A x = 0`, with a sound modular fast path: full
/// column rank over the prime field already forces a trivial kernel over
/// the rationals, so only systems that survive the modular rank test pay
/// for exact elimination.
pub fn nullspace(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    if let Some(m) = matrix_mod(a) {
        if rank_mod(m) == n {
            return Vec::new();
        }
    }
    let zeros = vec![Rat::zero(); a.len()];
    solve_linear(a, &zeros)
        .expect("homogeneous systems are consistent")
        .nullspace
}

/// Same contract as [`solve_linear`], with a sound modular fast path for
/// inconsistency: if the coefficient matrix has full column rank mod p and
/// the augmented matrix has strictly larger rank mod p, the system has no
/// rational solution and the exact elimination is skipped.
pub fn solve_with_prefilter(a: &[Vec<Rat>], b: &[Rat]) -> Option<LinearSolution> {
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    if n > 0 {
        let augmented: Option<Vec<Vec<u64>>> = a
            .iter()
            .zip(b)
            .map(|(row, rhs)| {
                row.iter()
                    .chain(std::iter::once(rhs))
                    .map(rat_mod)
                    .collect()
            })
            .collect();
        if let Some(m) = augmented {
            let plain: Vec<Vec<u64>> = m.iter().map(|row| row[..n].to_vec()).collect();
            if rank_mod(plain) == n && rank_mod(m) == n + 1 {
                return None;
            }
        }
    }
    solve_linear(a, b)
}
