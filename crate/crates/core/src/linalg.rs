//! Small dense linear algebra over exact rationals and doubles.
//!
//! Matrices are row-major `Vec<Vec<T>>`; everything here is sized by the
//! multiplicity and dimension of a multiple point, so a handful of rows.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result, C64, Q};

/// Field operations plus a notion of "numerically zero".
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn negligible(&self) -> bool;
    fn magnitude(&self) -> f64;
    fn to_f64(&self) -> f64;
}

impl Scalar for Q {
    fn negligible(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Absolute zero threshold for doubles in elimination.
pub const F64_EPS: f64 = 1e-10;

impl Scalar for f64 {
    fn negligible(&self) -> bool {
        self.abs() <= F64_EPS
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Reduced row echelon form; returns the reduced matrix and pivot columns.
pub fn rref<T: Scalar>(m: &[Vec<T>]) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut a: Vec<Vec<T>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // partial pivoting by magnitude (exact case: any nonzero works)
        let best = (r..rows)
            .filter(|&i| !a[i][c].negligible())
            .max_by(|&i, &j| a[i][c].magnitude().total_cmp(&a[j][c].magnitude()));
        let Some(p) = best else {
            for row in a.iter_mut().skip(r) {
                row[c] = T::zero();
            }
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = x.clone() / piv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let t = f.clone() * a[r][k].clone();
                    a[i][k] = a[i][k].clone() - t;
                }
                a[i][c] = T::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<T: Scalar>(m: &[Vec<T>]) -> usize {
    rref(m).1.len()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|c| m.iter().map(|row| row[c].clone()).collect())
        .collect()
}

/// Basis of the right null space `{x : m x = 0}`.
pub fn nullspace<T: Scalar>(m: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![T::zero(); cols];
            x[f] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -r[row][f].clone();
            }
            x
        })
        .collect()
}

/// Solves `a x = b`, returning one solution when the system is consistent.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let cols = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![T::zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[row][cols].clone();
    }
    Some(x)
}

/// Determinant by elimination.
pub fn det<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = T::one();
    for c in 0..n {
        let best = (c..n)
            .filter(|&i| !a[i][c].is_zero())
            .max_by(|&i, &j| a[i][c].magnitude().total_cmp(&a[j][c].magnitude()));
        let Some(p) = best else {
            return T::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d = d * piv.clone();
        for i in c + 1..n {
            let f = a[i][c].clone() / piv.clone();
            for k in c..n {
                let t = f.clone() * a[c][k].clone();
                a[i][k] = a[i][k].clone() - t;
            }
        }
    }
    d
}

/// Numerical rank from singular values with a threshold relative to the
/// largest one.
pub fn rank_svd(m: &[Vec<f64>], rel_tol: f64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mat = DMatrix::from_fn(rows, cols, |i, j| m[i][j]);
    let sv = mat.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Rank by SVD, cross-checked against exact elimination when an exact copy
/// of the matrix is available.
pub fn checked_rank(m: &[Vec<f64>], exact: Option<&[Vec<Q>]>, rel_tol: f64) -> Result<usize> {
    let numeric = rank_svd(m, rel_tol);
    if let Some(e) = exact {
        let exact = rank(e);
        if exact != numeric {
            return Err(Error::RankDisagreement { exact, numeric });
        }
    }
    Ok(numeric)
}

/// Orthonormalizes `vectors` (modified Gram-Schmidt with one
/// reorthogonalization pass), dropping vectors whose residual norm falls
/// below `rel_tol` times their original norm.
pub fn gram_schmidt(vectors: &[Vec<f64>], rel_tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= p * bi;
                }
            }
        }
        let nw = norm(&w);
        if nw > rel_tol * n0 {
            basis.push(w.iter().map(|x| x / nw).collect());
        }
    }
    basis
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn to_f64_matrix(m: &[Vec<Q>]) -> Vec<Vec<f64>> {
    m.iter()
        .map(|r| r.iter().map(Scalar::to_f64).collect())
        .collect()
}

pub fn to_dmatrix(m: &[Vec<C64>]) -> DMatrix<C64> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    DMatrix::from_fn(rows, cols, |i, j| m[i][j])
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn complex_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = m
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::NonConvergence("complex Schur decomposition".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Complex determinant by LU.
pub fn complex_det(m: &DMatrix<C64>) -> C64 {
    if m.nrows() == 0 {
        return C64::one();
    }
    m.clone().lu().determinant()
}

/// Real solve by LU; `None` for a singular system.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let rhs = DVector::from_column_slice(b);
    m.lu().solve(&rhs).map(|x| x.iter().cloned().collect())
}

/// Enumerates the vertices of `{x >= 0 : a x = b}` as basic feasible
/// solutions. Exponential in the column count, intended for a few columns.
pub fn polytope_vertices<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Vec<Vec<T>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut out: Vec<Vec<T>> = Vec::new();
    let r = rank(a);
    if r == 0 {
        if b.iter().all(Scalar::negligible) {
            out.push(vec![T::zero(); cols]);
        }
        return out;
    }
    for subset in subsets(cols, r) {
        let sub: Vec<Vec<T>> = a
            .iter()
            .map(|row| subset.iter().map(|&c| row[c].clone()).collect())
            .collect();
        if rank(&sub) < r {
            continue;
        }
        let Some(xs) = solve(&sub, b) else { continue };
        if xs.iter().any(|x| !x.negligible() && *x < T::zero()) {
            continue;
        }
        let mut x = vec![T::zero(); cols];
        for (&c, v) in subset.iter().zip(xs) {
            x[c] = if v.negligible() { T::zero() } else { v };
        }
        // residual check guards against rounding in the f64 case
        let ok = a.iter().zip(b).all(|(row, bi)| {
            let s = row
                .iter()
                .zip(&x)
                .fold(T::zero(), |acc, (p, q)| acc + p.clone() * q.clone());
            (s - bi.clone()).negligible()
        });
        if !ok {
            continue;
        }
        let dup = out.iter().any(|y| {
            y.iter()
                .zip(&x)
                .all(|(p, q)| (p.clone() - q.clone()).negligible())
        });
        if !dup {
            out.push(x);
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
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
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qi};

    #[test]
    fn exact_rank_and_nullspace() {
        let m = vec![vec![qi(1), qi(2), qi(3)], vec![qi(2), qi(4), qi(6)]];
        assert_eq!(rank(&m), 1);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s: Q = m[0].iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn det_and_solve() {
        let m = vec![vec![q(1, 2), qi(1)], vec![qi(2), qi(1)]];
        assert_eq!(det(&m), q(-3, 2));
        let x = solve(&m, &[qi(1), qi(1)]).unwrap();
        assert_eq!(x, vec![qi(0), qi(1)]);
        let mf = to_f64_matrix(&m);
        assert!((det(&mf) + 1.5).abs() < 1e-14);
    }

    #[test]
    fn svd_rank_matches_exact() {
        let e = vec![
            vec![q(1, 2), qi(1)],
            vec![qi(1), qi(1)],
            vec![qi(2), qi(1)],
        ];
        let f = to_f64_matrix(&e);
        assert_eq!(checked_rank(&f, Some(&e), 1e-9).unwrap(), 2);
    }

    #[test]
    fn vertices_of_segment() {
        // alpha C = (3/4, 1) for C rows (1/2,1),(1,1),(2,1)
        let a = vec![
            vec![q(1, 2), qi(1), qi(2)],
            vec![qi(1), qi(1), qi(1)],
        ];
        let b = vec![q(3, 4), qi(1)];
        let mut v = polytope_vertices(&a, &b);
        v.sort();
        assert_eq!(
            v,
            vec![
                vec![q(1, 2), q(1, 2), qi(0)],
                vec![q(5, 6), qi(0), q(1, 6)],
            ]
        );
    }

    #[test]
    fn eigenvalues_of_complex_symmetric() {
        let i = C64::i();
        let m = to_dmatrix(&[
            vec![C64::new(2.0, 0.0), i],
            vec![i, C64::new(2.0, 0.0)],
        ]);
        let mut ev = complex_eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - (2.0 - i)).norm() < 1e-12);
        assert!((ev[1] - (2.0 + i)).norm() < 1e-12);
        assert!((complex_det(&m) - 5.0).norm() < 1e-12);
    }

    #[test]
    fn gram_schmidt_drops_dependent() {
        let b = gram_schmidt(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]], 1e-9);
        assert_eq!(b.len(), 2);
        assert!(dot(&b[0], &b[1]).abs() < 1e-14);
    }
}
