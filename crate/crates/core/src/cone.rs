//! The direction matrix `C`, its cone, rank classification, the solution
//! polytope `A(δ) ∩ Δ`, the complementary measure and the projected matrix
//! `C̄`.

use num_traits::{One, Zero};

use crate::linalg::{self, Scalar, F64_EPS};
use crate::locus::Jets;
use crate::model::PointSpec;
use crate::poly::q_to_f64;
use crate::{Error, Result, Q};

/// `(n+1) × (d+1)` matrix whose row `j` is `dir_j(z*)`, last column ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMatrix {
    rows: Vec<Vec<f64>>,
    exact: Option<Vec<Vec<Q>>>,
}

impl DirectionMatrix {
    pub fn from_exact(rows: Vec<Vec<Q>>) -> Self {
        DirectionMatrix {
            rows: linalg::to_f64_matrix(&rows),
            exact: Some(rows),
        }
    }

    pub fn from_f64(rows: Vec<Vec<f64>>) -> Self {
        DirectionMatrix { rows, exact: None }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn exact(&self) -> Option<&[Vec<Q>]> {
        self.exact.as_deref()
    }

    /// `n + 1`.
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// `d + 1`.
    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// `det C`, when square.
    pub fn det(&self) -> Option<f64> {
        if self.nrows() != self.ncols() {
            return None;
        }
        Some(match &self.exact {
            Some(e) => q_to_f64(&linalg::det(e)),
            None => linalg::det(&self.rows),
        })
    }
}

/// Rows `dir_j = (z*_k z*_{d+1} ∂v_j/∂z_k)_k` followed by 1. At `z* = 1` this
/// is `(∂v_j/∂z_k)_k`; the extra `z*_{d+1}` factor makes the row the log
/// normal of the sheet at general `z*`.
pub fn direction_matrix(sheets: &Jets, point: &PointSpec) -> Result<DirectionMatrix> {
    if sheets.is_empty() {
        return Err(Error::Invalid("no sheets at the point".into()));
    }
    let d = point.len() - 1;
    match sheets {
        Jets::Exact(js) => {
            let w = point.last();
            let rows = js
                .iter()
                .map(|j| {
                    if j.grad.len() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: j.grad.len(),
                        });
                    }
                    let mut r: Vec<Q> = (0..d).map(|k| &point.coords()[k] * w * &j.grad[k]).collect();
                    r.push(Q::one());
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DirectionMatrix::from_exact(rows))
        }
        Jets::Approx(js) => {
            let z = point.to_f64();
            let w = z[d];
            let rows = js
                .iter()
                .map(|j| {
                    let mut r: Vec<f64> = (0..d).map(|k| z[k] * w * j.grad[k]).collect();
                    r.push(1.0);
                    r
                })
                .collect();
            Ok(DirectionMatrix::from_f64(rows))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub rank: usize,
    pub n: usize,
    pub d: usize,
    /// rank = d + 1
    pub nondegenerate: bool,
    /// rank = n + 1
    pub transverse: bool,
    pub completely_nondegenerate: bool,
    /// rank of `C̄`
    pub rho: usize,
    /// all rows equal
    pub single_ray: bool,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        if self.completely_nondegenerate {
            "completely_nondegenerate"
        } else if self.nondegenerate {
            "nondegenerate"
        } else if self.transverse {
            "transverse"
        } else if self.single_ray {
            "single_ray"
        } else {
            "degenerate"
        }
    }
}

pub fn classify(c: &DirectionMatrix, rel_tol: f64) -> Result<Classification> {
    let rank = linalg::checked_rank(c.rows(), c.exact(), rel_tol)?;
    let n = c.nrows() - 1;
    let d = c.ncols() - 1;
    let single_ray = match c.exact() {
        Some(e) => e.iter().all(|r| r == &e[0]),
        None => c.rows().iter().all(|r| {
            r.iter()
                .zip(&c.rows()[0])
                .all(|(a, b)| (a - b).abs() <= rel_tol * (1.0 + b.abs()))
        }),
    };
    let nondegenerate = rank == d + 1;
    let transverse = rank == n + 1;
    Ok(Classification {
        rank,
        n,
        d,
        nondegenerate,
        transverse,
        completely_nondegenerate: nondegenerate && transverse,
        rho: project_cbar(c).rho(),
        single_ray,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

impl Membership {
    pub fn label(&self) -> &'static str {
        match self {
            Membership::Interior => "interior",
            Membership::Boundary => "boundary",
            Membership::Outside => "outside",
        }
    }
}

/// `δ = r / r_{d+1}`.
pub fn normalize_direction(r: &[Q]) -> Result<Vec<Q>> {
    let last = r
        .last()
        .ok_or_else(|| Error::Invalid("empty direction".into()))?;
    if last <= &Q::zero() {
        return Err(Error::Invalid(format!(
            "the last direction component must be positive, got {last}"
        )));
    }
    Ok(r.iter().map(|x| x / last).collect())
}

/// Vertices of `{α ∈ Δ : αC = δ}` and its affine dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPolytope {
    pub vertices: Vec<Vec<f64>>,
    pub exact_vertices: Option<Vec<Vec<Q>>>,
    pub affine_dim: usize,
}

impl SolutionPolytope {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// A point of the relative interior (the vertex average).
    pub fn center(&self) -> Vec<f64> {
        let m = self.vertices.len() as f64;
        let len = self.vertices.first().map_or(0, |v| v.len());
        (0..len)
            .map(|j| self.vertices.iter().map(|v| v[j]).sum::<f64>() / m)
            .collect()
    }
}

fn affine_dim<T: Scalar>(vs: &[Vec<T>]) -> usize {
    if vs.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<T>> = vs[1..]
        .iter()
        .map(|v| v.iter().zip(&vs[0]).map(|(a, b)| a.clone() - b.clone()).collect())
        .collect();
    linalg::rank(&diffs)
}

/// Solves `αC = δ` over the simplex by enumerating basic feasible solutions.
pub fn solve_a(c: &DirectionMatrix, delta: &[Q]) -> Result<SolutionPolytope> {
    if delta.len() != c.ncols() {
        return Err(Error::DimensionMismatch {
            expected: c.ncols(),
            got: delta.len(),
        });
    }
    let poly = match c.exact() {
        Some(e) => {
            let vs = linalg::polytope_vertices(&linalg::transpose(e), delta);
            SolutionPolytope {
                vertices: linalg::to_f64_matrix(&vs),
                affine_dim: affine_dim(&vs),
                exact_vertices: Some(vs),
            }
        }
        None => {
            let df: Vec<f64> = delta.iter().map(q_to_f64).collect();
            let vs = linalg::polytope_vertices(&linalg::transpose(c.rows()), &df);
            SolutionPolytope {
                affine_dim: affine_dim(&vs),
                vertices: vs,
                exact_vertices: None,
            }
        }
    };
    if poly.is_empty() {
        return Err(Error::OutsideCone(crate::poly::fmt_vec(delta)));
    }
    Ok(poly)
}

/// Interior when some strictly positive `α` solves `αC = δ`, boundary when
/// every solution has a forced zero, outside when there is none.
pub fn cone_membership(c: &DirectionMatrix, r: &[Q]) -> Result<Membership> {
    let delta = normalize_direction(r)?;
    let poly = match solve_a(c, &delta) {
        Ok(p) => p,
        Err(Error::OutsideCone(_)) => return Ok(Membership::Outside),
        Err(e) => return Err(e),
    };
    let covered = (0..c.nrows()).all(|j| poly.vertices.iter().any(|v| v[j] > F64_EPS));
    Ok(if covered {
        Membership::Interior
    } else {
        Membership::Boundary
    })
}

/// Rows of `C` that are extreme rays of the cone, deduplicated.
pub fn extreme_rays(c: &DirectionMatrix) -> Vec<Vec<f64>> {
    let mut rays: Vec<Vec<f64>> = Vec::new();
    for j in 0..c.nrows() {
        let others: Vec<usize> = (0..c.nrows())
            .filter(|&i| i != j && c.rows()[i] != c.rows()[j])
            .collect();
        let extreme = if others.is_empty() {
            true
        } else {
            match c.exact() {
                Some(e) => {
                    let sub: Vec<Vec<Q>> = others.iter().map(|&i| e[i].clone()).collect();
                    linalg::polytope_vertices(&linalg::transpose(&sub), &e[j]).is_empty()
                }
                None => {
                    let sub: Vec<Vec<f64>> = others.iter().map(|&i| c.rows()[i].clone()).collect();
                    linalg::polytope_vertices(&linalg::transpose(&sub), &c.rows()[j]).is_empty()
                }
            }
        };
        if extreme && !rays.contains(&c.rows()[j]) {
            rays.push(c.rows()[j].clone());
        }
    }
    rays
}

/// `μ_n(Δ_n) = √(n+1)/n!`, the volume of the standard simplex in `R^{n+1}`.
pub fn simplex_volume(n: usize) -> f64 {
    ((n + 1) as f64).sqrt() / factorial(n)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `σ = μ_{n-d_eff}(A ∩ Δ) / μ_n(Δ)`. A polytope of lower dimension than
/// `n - d_eff` (a direction on a wall) has measure zero.
pub fn sigma_measure(a: &SolutionPolytope, n: usize, d_eff: usize) -> Result<f64> {
    if d_eff > n {
        return Err(Error::Invalid(format!("d_eff = {d_eff} exceeds n = {n}")));
    }
    let k = n - d_eff;
    if a.affine_dim > k {
        return Err(Error::Invalid(format!(
            "polytope has dimension {} but n - d = {k}",
            a.affine_dim
        )));
    }
    if a.affine_dim < k {
        return Ok(0.0);
    }
    let vol = polytope_volume(&a.vertices, k)?;
    Ok(vol / simplex_volume(n))
}

fn polytope_volume(vs: &[Vec<f64>], k: usize) -> Result<f64> {
    match k {
        0 => Ok(1.0),
        1 => {
            let mut best: f64 = 0.0;
            for a in vs {
                for b in vs {
                    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                    best = best.max(linalg::norm(&d));
                }
            }
            Ok(best)
        }
        2 | 3 => {
            let local = local_coords(vs, k);
            if k == 2 {
                Ok(hull_area_2d(&local))
            } else {
                Ok(hull_volume_3d(&local))
            }
        }
        _ => Err(Error::Unsupported(format!(
            "polytope volume in dimension {k} (at most 3 supported)"
        ))),
    }
}

/// Coordinates of the points in an orthonormal basis of their affine hull.
fn local_coords(vs: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let diffs: Vec<Vec<f64>> = vs
        .iter()
        .map(|v| v.iter().zip(&vs[0]).map(|(a, b)| a - b).collect())
        .collect();
    let basis = linalg::gram_schmidt(&diffs, 1e-9);
    debug_assert_eq!(basis.len(), k);
    diffs
        .iter()
        .map(|d| basis.iter().map(|b| linalg::dot(d, b)).collect())
        .collect()
}

fn hull_2d(pts: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = pts.iter().map(|v| [v[0], v[1]]).collect();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    if p.len() < 3 {
        return p;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for q in iter {
            while hull.len() >= start + 2
                && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], q) <= 1e-15
            {
                hull.pop();
            }
            hull.push(*q);
        }
        hull.pop();
    }
    hull
}

fn hull_area_2d(pts: &[Vec<f64>]) -> f64 {
    let h = hull_2d(pts);
    let m = h.len();
    if m < 3 {
        return 0.0;
    }
    (0..m)
        .map(|i| {
            let (a, b) = (h[i], h[(i + 1) % m]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

fn hull_volume_3d(pts: &[Vec<f64>]) -> f64 {
    let m = pts.len();
    let centroid: Vec<f64> = (0..3)
        .map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / m as f64)
        .collect();
    let sub = |a: &[f64], b: &[f64]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let mut planes: Vec<([f64; 3], f64)> = Vec::new();
    let mut volume = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let nrm = cross(sub(&pts[j], &pts[i]), sub(&pts[k], &pts[i]));
                let len = linalg::norm(&nrm);
                if len < 1e-12 {
                    continue;
                }
                let mut u = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
                let mut off = linalg::dot(&u, &pts[i]);
                let side: Vec<f64> = pts.iter().map(|p| linalg::dot(&u, p) - off).collect();
                let eps = 1e-10;
                if side.iter().all(|&s| s <= eps) {
                } else if side.iter().all(|&s| s >= -eps) {
                    u = [-u[0], -u[1], -u[2]];
                    off = -off;
                } else {
                    continue;
                }
                if planes
                    .iter()
                    .any(|(v, o)| linalg::norm(&sub(v, &u)) < 1e-9 && (o - off).abs() < 1e-9)
                {
                    continue;
                }
                planes.push((u, off));
                // facet polygon in plane coordinates
                let on: Vec<&Vec<f64>> = pts
                    .iter()
                    .filter(|p| (linalg::dot(&u, p) - off).abs() <= 1e-10)
                    .collect();
                let e1 = {
                    let v = sub(on[1], on[0]);
                    let l = linalg::norm(&v);
                    [v[0] / l, v[1] / l, v[2] / l]
                };
                let e2 = cross(u, e1);
                let flat: Vec<Vec<f64>> = on
                    .iter()
                    .map(|p| {
                        let v = sub(p, on[0]);
                        vec![linalg::dot(&v, &e1), linalg::dot(&v, &e2)]
                    })
                    .collect();
                let area = hull_area_2d(&flat);
                let height = off - linalg::dot(&u, &centroid);
                volume += area * height / 3.0;
            }
        }
    }
    volume
}

/// Orthonormal basis of `A⊥` and the coordinates of the projected columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedMatrix {
    /// `ρ` orthonormal vectors in `R^{n+1}`, each orthogonal to `1`.
    pub basis: Vec<Vec<f64>>,
    /// `ρ × d`.
    pub cbar: Vec<Vec<f64>>,
}

impl ProjectedMatrix {
    pub fn rho(&self) -> usize {
        self.basis.len()
    }

    pub fn det(&self) -> Option<f64> {
        let d = self.cbar.first().map_or(0, |r| r.len());
        if self.rho() != d {
            return None;
        }
        if d == 0 {
            return Some(1.0);
        }
        Some(linalg::det(&self.cbar))
    }

    /// Projection of `C`'s first `d` columns in the given basis of `A⊥`.
    pub fn with_basis(c: &DirectionMatrix, basis: Vec<Vec<f64>>) -> ProjectedMatrix {
        let d = c.ncols() - 1;
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|k| c.rows().iter().map(|r| r[k]).collect())
            .collect();
        let cbar = basis
            .iter()
            .map(|b| cols.iter().map(|col| linalg::dot(b, col)).collect())
            .collect();
        ProjectedMatrix { basis, cbar }
    }
}

/// `A⊥` is spanned by the centered columns of `C`; the last column centers
/// to zero.
pub fn project_cbar(c: &DirectionMatrix) -> ProjectedMatrix {
    let d = c.ncols() - 1;
    let m = c.nrows() as f64;
    let centered: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let col: Vec<f64> = c.rows().iter().map(|r| r[k]).collect();
            let mean = col.iter().sum::<f64>() / m;
            col.iter().map(|x| x - mean).collect()
        })
        .collect();
    let basis = linalg::gram_schmidt(&centered, 1e-9);
    ProjectedMatrix::with_basis(c, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locus::SheetJet;
    use crate::poly::{q, qi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exact(rows: &[&[Q]]) -> DirectionMatrix {
        DirectionMatrix::from_exact(rows.iter().map(|r| r.to_vec()).collect())
    }

    fn dice() -> DirectionMatrix {
        exact(&[&[q(1, 2), qi(1)], &[qi(2), qi(1)]])
    }

    fn planes() -> DirectionMatrix {
        exact(&[&[qi(2), qi(1), qi(1)], &[qi(1), qi(2), qi(1)]])
    }

    fn curves3() -> DirectionMatrix {
        exact(&[&[q(1, 2), qi(1)], &[qi(1), qi(1)], &[qi(2), qi(1)]])
    }

    #[test]
    fn matrix_from_jets() {
        let pt = PointSpec::new(vec![qi(1), qi(1), qi(1)]).unwrap();
        let jets = Jets::Exact(vec![
            SheetJet { value: qi(1), grad: vec![qi(2), qi(1)], hess: None },
            SheetJet { value: qi(1), grad: vec![qi(1), qi(2)], hess: None },
        ]);
        assert_eq!(direction_matrix(&jets, &pt).unwrap(), planes());
        let single = Jets::Exact(vec![SheetJet { value: qi(1), grad: vec![q(1, 2)], hess: None }]);
        let pt2 = PointSpec::new(vec![qi(1), qi(1)]).unwrap();
        let c = direction_matrix(&single, &pt2).unwrap();
        assert_eq!(c.nrows(), 1);
        assert!(classify(&c, 1e-9).unwrap().single_ray);
    }

    #[test]
    fn classifications() {
        let k = classify(&dice(), 1e-9).unwrap();
        assert!(k.completely_nondegenerate);
        assert_eq!(k.rho, 1);
        let k = classify(&planes(), 1e-9).unwrap();
        assert!(k.transverse && !k.nondegenerate);
        assert_eq!(k.label(), "transverse");
        let k = classify(&curves3(), 1e-9).unwrap();
        assert!(k.nondegenerate && !k.transverse);
        assert_eq!(k.rho, 1);
    }

    #[test]
    fn memberships() {
        assert_eq!(cone_membership(&dice(), &[qi(1), qi(1)]).unwrap(), Membership::Interior);
        let lem = dice();
        assert_eq!(cone_membership(&lem, &[qi(2), qi(1)]).unwrap(), Membership::Boundary);
        assert_eq!(cone_membership(&lem, &[qi(3), qi(1)]).unwrap(), Membership::Outside);
        assert!(cone_membership(&lem, &[qi(3), qi(0)]).is_err());
        for c in [dice(), planes(), curves3()] {
            for row in c.exact().unwrap() {
                assert_ne!(cone_membership(&c, row).unwrap(), Membership::Outside);
            }
        }
    }

    #[test]
    fn solution_sets() {
        let a = solve_a(&planes(), &[q(3, 2), q(3, 2), qi(1)]).unwrap();
        assert_eq!(a.exact_vertices.unwrap(), vec![vec![q(1, 2), q(1, 2)]]);
        assert_eq!(a.affine_dim, 0);
        let mut a = solve_a(&curves3(), &[q(3, 4), qi(1)]).unwrap();
        assert_eq!(a.affine_dim, 1);
        let mut v = a.exact_vertices.take().unwrap();
        v.sort();
        assert_eq!(v, vec![vec![q(1, 2), q(1, 2), qi(0)], vec![q(5, 6), qi(0), q(1, 6)]]);
        // a row of C contains its unit vector
        let a = solve_a(&curves3(), &[qi(1), qi(1)]).unwrap();
        assert!(a.exact_vertices.unwrap().contains(&vec![qi(0), qi(1), qi(0)]));
    }

    #[test]
    fn sigma_values() {
        let single = solve_a(&planes(), &[q(3, 2), q(3, 2), qi(1)]).unwrap();
        assert!((sigma_measure(&single, 1, 1).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        let seg = solve_a(&curves3(), &[q(3, 4), qi(1)]).unwrap();
        let sigma = sigma_measure(&seg, 2, 1).unwrap();
        assert!((sigma - 14f64.sqrt() / (3.0 * 3f64.sqrt())).abs() < 1e-14);
        let cbar = project_cbar(&curves3());
        assert!((cbar.det().unwrap().abs() - 42f64.sqrt() / 6.0).abs() < 1e-14);
        assert!((sigma / cbar.det().unwrap().abs() - 2.0 / 3.0).abs() < 1e-14);
        let wall = solve_a(&curves3(), &[q(1, 2), qi(1)]).unwrap();
        assert_eq!(sigma_measure(&wall, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn higher_dimensional_volumes() {
        // the whole simplex has sigma 1
        for n in 1..=3 {
            let vs: Vec<Vec<f64>> = (0..=n)
                .map(|j| (0..=n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            let p = SolutionPolytope { affine_dim: n, vertices: vs, exact_vertices: None };
            assert!((sigma_measure(&p, n, 0).unwrap() - 1.0).abs() < 1e-12, "n = {n}");
        }
        // unit square and unit cube in local coordinates
        let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert!((hull_area_2d(&sq) - 1.0).abs() < 1e-14);
        let mut cube = Vec::new();
        for i in 0..8 {
            cube.push(vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        assert!((hull_volume_3d(&cube) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projected_matrices() {
        let p = project_cbar(&planes());
        assert_eq!(p.rho(), 1);
        let s = 0.5f64.sqrt();
        assert!((p.cbar[0][0].abs() - s).abs() < 1e-14);
        assert!((p.cbar[0][0] + p.cbar[0][1]).abs() < 1e-14);
        let p = project_cbar(&dice());
        assert!((p.det().unwrap().abs() - 1.5 / 2f64.sqrt()).abs() < 1e-14);
        let single = exact(&[&[qi(1), qi(1)], &[qi(1), qi(1)]]);
        let p = project_cbar(&single);
        assert_eq!(p.rho(), 0);
        assert!(p.cbar.is_empty());
    }

    #[test]
    fn det_identity_on_random_square_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let d = rng.random_range(1..=3usize);
            let rows: Vec<Vec<Q>> = (0..=d)
                .map(|_| {
                    let mut r: Vec<Q> = (0..d).map(|_| q(rng.random_range(-9..=9), rng.random_range(1..=5))).collect();
                    r.push(qi(1));
                    r
                })
                .collect();
            let c = DirectionMatrix::from_exact(rows);
            let det_c = c.det().unwrap();
            if det_c.abs() < 1e-6 {
                continue;
            }
            let p = project_cbar(&c);
            let lhs = det_c.abs();
            let rhs = ((d + 1) as f64).sqrt() * p.det().unwrap().abs();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
            // re-orthonormalized basis: random rotation of A⊥
            let shuffled: Vec<Vec<f64>> = {
                let mut vs = p.basis.clone();
                for v in vs.iter_mut() {
                    let s: f64 = rng.random_range(0.5..2.0);
                    for x in v.iter_mut() {
                        *x *= s;
                    }
                }
                vs.reverse();
                let mixed: Vec<Vec<f64>> = (0..vs.len())
                    .map(|i| {
                        let mut w = vs[i].clone();
                        for j in 0..vs.len() {
                            if j != i {
                                let t: f64 = rng.random_range(-1.0..1.0);
                                for (a, b) in w.iter_mut().zip(&vs[j]) {
                                    *a += t * b;
                                }
                            }
                        }
                        w
                    })
                    .collect();
                linalg::gram_schmidt(&mixed, 1e-9)
            };
            let p2 = ProjectedMatrix::with_basis(&c, shuffled);
            assert!((p2.det().unwrap().abs() - p.det().unwrap().abs()).abs() < 1e-10);
        }
    }
}
