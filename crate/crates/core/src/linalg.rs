//! Exact linear algebra: rational matrices, and polynomial matrices treated as
//! matrices over the field of rational functions (fraction-free elimination).

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::polycore::{Polynomial, Rational, VarSpace};

pub type QMatrix = Vec<Vec<Rational>>;
pub type PolyMatrix = Vec<Vec<Polynomial>>;

pub fn zeros(rows: usize, cols: usize) -> QMatrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> QMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Rational::zero(), |acc, k| {
                        if row[k].is_zero() {
                            acc
                        } else {
                            acc + &row[k] * &b[k][j]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn matvec(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &[Vec<Rational>]) -> (QMatrix, Vec<usize>) {
    let mut a: QMatrix = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    rref(m).1.len()
}

/// Basis of `{x : m x = 0}`; `ncols` is needed when `m` has no rows.
pub fn kernel(m: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    if m.is_empty() {
        return identity(ncols);
    }
    let (r, pivots) = rref(m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `a x = b`, or `None` if inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = a.first().map_or(0, Vec::len);
    let aug: QMatrix = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[row][cols].clone();
    }
    Some(x)
}

pub fn inverse(a: &[Vec<Rational>]) -> Option<QMatrix> {
    let n = a.len();
    let aug: QMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Extend linearly independent `rows` by standard basis vectors to a basis of
/// `Q^n`. Returns only the added vectors.
pub fn complete_basis(rows: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut current: QMatrix = rows.to_vec();
    let mut added = Vec::new();
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        current.push(e.clone());
        if rank(&current) == current.len() {
            added.push(e);
        } else {
            current.pop();
        }
    }
    added
}

pub fn to_poly_matrix(space: &Arc<VarSpace>, m: &[Vec<Rational>]) -> PolyMatrix {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|c| Polynomial::constant(space, c.clone()))
                .collect()
        })
        .collect()
}

/// Fraction-free forward elimination. Returns the echelon form and pivot
/// columns; each pivot row is a polynomial multiple of a row of the reduced
/// echelon form over the rational-function field.
pub fn poly_echelon(m: &[Vec<Polynomial>]) -> (PolyMatrix, Vec<usize>) {
    let mut a: PolyMatrix = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev: Option<Polynomial> = None;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // prefer the sparsest nonzero pivot to limit growth
        let Some(p) = (r..rows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].num_terms())
        else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for i in r + 1..rows {
            let f = a[i][c].clone();
            for j in c + 1..cols {
                let mut t = &piv * &a[i][j];
                if !f.is_zero() {
                    t -= &(&f * &a[r][j]);
                }
                a[i][j] = match &prev {
                    Some(d) => t.div_exact(d).unwrap_or(t),
                    None => t,
                };
            }
            a[i][c] = Polynomial::zero(piv.space());
        }
        prev = Some(piv);
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Rank over the rational-function field of the matrix variables.
pub fn poly_rank(m: &[Vec<Polynomial>]) -> usize {
    poly_echelon(m).1.len()
}

/// Kernel basis over the rational-function field, each vector with polynomial
/// entries (denominators cleared).
pub fn poly_kernel(
    m: &[Vec<Polynomial>],
    space: &Arc<VarSpace>,
    ncols: usize,
) -> Vec<Vec<Polynomial>> {
    let (e, pivots) = poly_echelon(m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Polynomial::zero(space); ncols];
        x[free] = Polynomial::one(space);
        for (row, &pc) in pivots.iter().enumerate().rev() {
            let mut s = Polynomial::zero(space);
            for j in pc + 1..ncols {
                if !x[j].is_zero() && !e[row][j].is_zero() {
                    s += &(&e[row][j] * &x[j]);
                }
            }
            let lead = &e[row][pc];
            for v in x.iter_mut() {
                if !v.is_zero() {
                    *v = &*v * lead;
                }
            }
            x[pc] = -s;
        }
        basis.push(x);
    }
    basis
}

/// Determinant of a square polynomial matrix (Bareiss, exact divisions).
pub fn poly_det(m: &[Vec<Polynomial>], space: &Arc<VarSpace>) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one(space);
    }
    let mut a: PolyMatrix = m.to_vec();
    let mut sign = false;
    let mut prev = Polynomial::one(space);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Polynomial::zero(space);
        };
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Polynomial::zero(space);
        }
        prev = a[k][k].clone();
    }
    if sign {
        -&a[n - 1][n - 1]
    } else {
        a[n - 1][n - 1].clone()
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
