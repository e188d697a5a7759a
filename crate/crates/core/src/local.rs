//! Phase Hessians in the torus angles, the bordered matrix `M`, principal
//! square-root determinants and quadrature over the simplex.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::cone::ProjectedMatrix;
use crate::linalg;
use crate::locus::SheetJet;
use crate::model::PointSpec;
use crate::{Error, Result, C64};

/// Complex symmetric `d × d` Hessian of `θ ↦ −log α·v(ẑ* e^{iθ})` at `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix(pub DMatrix<C64>);

/// `(ρ+d) × (ρ+d)` block matrix `[[0, −i C̄], [−i C̄ᵀ, Q]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MMatrix(pub DMatrix<C64>);

impl QMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

impl MMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Angular first and second derivatives of `g_j(θ) = v_j(ẑ* e^{iθ})` at 0.
fn angular_jet(jet: &SheetJet<f64>, z: &[f64]) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
    let hess = jet
        .hess
        .as_ref()
        .ok_or_else(|| Error::Unsupported("sheet Hessians are unavailable".into()))?;
    let d = jet.grad.len();
    let g1 = (0..d).map(|k| I * z[k] * jet.grad[k]).collect();
    let g2 = (0..d)
        .map(|k| {
            (0..d)
                .map(|l| {
                    let mut v = -z[k] * z[l] * hess[k][l];
                    if k == l {
                        v -= z[k] * jet.grad[k];
                    }
                    C64::new(v, 0.0)
                })
                .collect()
        })
        .collect();
    Ok((g1, g2))
}

pub fn q_matrix(sheets: &[SheetJet<f64>], alpha: &[f64], point: &PointSpec) -> Result<QMatrix> {
    if alpha.len() != sheets.len() {
        return Err(Error::DimensionMismatch {
            expected: sheets.len(),
            got: alpha.len(),
        });
    }
    let z = point.to_f64();
    let d = z.len() - 1;
    let vstar = 1.0 / z[d];
    let mut s1 = vec![C64::new(0.0, 0.0); d];
    let mut s2 = DMatrix::<C64>::zeros(d, d);
    for (jet, &a) in sheets.iter().zip(alpha) {
        if jet.grad.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: jet.grad.len(),
            });
        }
        let (g1, g2) = angular_jet(jet, &z)?;
        for k in 0..d {
            s1[k] += a * g1[k];
            for l in 0..d {
                s2[(k, l)] += a * g2[k][l];
            }
        }
    }
    let q = DMatrix::from_fn(d, d, |k, l| -s2[(k, l)] / vstar + s1[k] * s1[l] / (vstar * vstar));
    Ok(QMatrix(q))
}

pub fn m_matrix(q: &QMatrix, cbar: &ProjectedMatrix) -> Result<MMatrix> {
    let d = q.dim();
    let rho = cbar.rho();
    if cbar.cbar.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: cbar.cbar.first().map_or(0, |r| r.len()),
        });
    }
    let size = rho + d;
    let m = DMatrix::from_fn(size, size, |i, j| match (i < rho, j < rho) {
        (true, true) => C64::new(0.0, 0.0),
        (true, false) => -I * cbar.cbar[i][j - rho],
        (false, true) => -I * cbar.cbar[j][i - rho],
        (false, false) => q.0[(i - rho, j - rho)],
    });
    Ok(MMatrix(m))
}

/// Principal-branch square root of a determinant, taken eigenvalue by
/// eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtDet {
    pub sqrt: C64,
    pub det: C64,
}

pub fn sqrt_det(m: &DMatrix<C64>) -> Result<SqrtDet> {
    let det = linalg::complex_det(m);
    let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1.0);
    if det.norm() <= 1e-12 * scale.powi(m.nrows() as i32) {
        return Err(Error::Singular(format!("determinant {det} is numerically zero")));
    }
    let sqrt = linalg::complex_eigenvalues(m)?
        .iter()
        .fold(C64::new(1.0, 0.0), |acc, l| acc * l.sqrt());
    Ok(SqrtDet { sqrt, det })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: C64,
    /// Difference between the extrapolated and the plain finest value.
    pub error: f64,
    pub converged: bool,
}

pub const DEFAULT_LEVEL: u32 = 6;
const QUAD_REL_TOL: f64 = 1e-6;

/// Subdivisions per edge at a level: `4^level` cells on `Δ_1`, roughly the
/// same cell count in higher dimension.
fn cells_per_edge(n: usize, level: u32) -> usize {
    (2f64.powf(2.0 * level as f64 / n as f64).round() as usize).max(2)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Centroid rule on the Freudenthal subdivision of `{1 ≥ t_1 ≥ … ≥ t_n ≥ 0}`
/// into `k^n` congruent cells, mapped to `Δ_n`.
fn centroid_rule<F>(f: &F, n: usize, k: usize) -> C64
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    let perms = permutations(n);
    let bases = k.pow(n as u32);
    let partial: Vec<(C64, usize)> = (0..bases)
        .into_par_iter()
        .map(|idx| {
            let mut base = vec![0usize; n];
            let mut r = idx;
            for b in base.iter_mut() {
                *b = r % k;
                r /= k;
            }
            let mut sum = C64::new(0.0, 0.0);
            let mut count = 0;
            for p in &perms {
                // centroid of the simplex b, b+e_{p0}, b+e_{p0}+e_{p1}, ...
                let mut c: Vec<f64> = base.iter().map(|&b| b as f64).collect();
                for (step, &axis) in p.iter().enumerate() {
                    c[axis] += (n - step) as f64 / (n + 1) as f64;
                }
                let inside = (0..n).all(|i| {
                    let upper = if i == 0 { k as f64 } else { c[i - 1] };
                    c[i] < upper
                });
                if !inside {
                    continue;
                }
                let t: Vec<f64> = c.iter().map(|x| x / k as f64).collect();
                let mut alpha = Vec::with_capacity(n + 1);
                alpha.push(1.0 - t[0]);
                for i in 1..n {
                    alpha.push(t[i - 1] - t[i]);
                }
                alpha.push(t[n - 1]);
                sum += f(&alpha);
                count += 1;
            }
            (sum, count)
        })
        .collect();
    let (sum, count) = partial
        .iter()
        .fold((C64::new(0.0, 0.0), 0usize), |(s, c), (ps, pc)| (s + ps, c + pc));
    sum / count as f64
}

/// Average of `f` over `Δ_n` under the normalized uniform measure.
pub fn simplex_quadrature<F>(f: F, n: usize, level: u32) -> Quadrature
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    if n == 0 {
        return Quadrature {
            value: f(&[1.0]),
            error: 0.0,
            converged: true,
        };
    }
    let k = cells_per_edge(n, level);
    let fine = centroid_rule(&f, n, k);
    let coarse = centroid_rule(&f, n, k / 2);
    let value = (4.0 * fine - coarse) / 3.0;
    let error = (value - fine).norm();
    Quadrature {
        value,
        error,
        converged: error <= QUAD_REL_TOL * value.norm().max(f64::MIN_POSITIVE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{direction_matrix, project_cbar, solve_a};
    use crate::locus::{sheet_jets, Jets};
    use crate::model::parse_polynomial;
    use crate::poly::{q, qi};

    fn vars(n: usize) -> Vec<String> {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    }

    fn jets(factors: &[&str], pt: &[i64]) -> (Vec<SheetJet<f64>>, PointSpec, Jets) {
        let v = vars(pt.len());
        let fs: Vec<_> = factors.iter().map(|f| parse_polynomial(f, &v).unwrap()).collect();
        let p = PointSpec::new(pt.iter().map(|&x| qi(x)).collect()).unwrap();
        let (j, _) = sheet_jets(&fs, &p).unwrap();
        let jf = j.iter().map(|x| x.to_f64()).collect();
        (jf, p, Jets::Exact(j))
    }

    fn planes() -> (Vec<SheetJet<f64>>, PointSpec, Jets) {
        jets(&["4 - 2*x - y - z", "4 - x - 2*y - z"], &[1, 1, 1])
    }

    #[test]
    fn planes_q_entry_sum() {
        let (j, p, _) = planes();
        for a in [0.0, 0.25, 0.5, 0.9] {
            let q = q_matrix(&j, &[a, 1.0 - a], &p).unwrap();
            let s: C64 = q.0.iter().sum();
            assert!((s - C64::new(12.0, 0.0)).norm() < 1e-12, "{s}");
        }
        let q = q_matrix(&j, &[0.5, 0.5], &p).unwrap();
        assert!((q.0[(0, 0)].re - 4.25).abs() < 1e-12);
        assert!((q.0[(0, 1)].re - 1.75).abs() < 1e-12);
    }

    #[test]
    fn vertex_depends_on_one_sheet() {
        let (j, p, _) = planes();
        let q0 = q_matrix(&j, &[1.0, 0.0], &p).unwrap();
        let q0_alone = q_matrix(&j[..1], &[1.0], &p).unwrap();
        assert_eq!(q0, q0_alone);
    }

    #[test]
    fn planes_det_m_is_six() {
        let (j, p, js) = planes();
        let c = direction_matrix(&js, &p).unwrap();
        let cbar = project_cbar(&c);
        let a = solve_a(&c, &[q(3, 2), q(3, 2), qi(1)]).unwrap();
        let m = m_matrix(&q_matrix(&j, &a.vertices[0], &p).unwrap(), &cbar).unwrap();
        assert_eq!(m.dim(), 3);
        let sd = sqrt_det(&m.0).unwrap();
        assert!((sd.det - C64::new(6.0, 0.0)).norm() < 1e-9);
        assert!((sd.sqrt.norm_sqr() - 6.0).abs() < 1e-9);
        assert!((sd.sqrt - C64::new(6f64.sqrt(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn dice_det_m_is_det_cbar_squared() {
        let (j, p, js) = jets(&["1 - x/3 - 2*y/3", "1 - 2*x/3 - y/3"], &[1, 1]);
        let c = direction_matrix(&js, &p).unwrap();
        let cbar = project_cbar(&c);
        let m = m_matrix(&q_matrix(&j, &[0.5, 0.5], &p).unwrap(), &cbar).unwrap();
        let det = linalg::complex_det(&m.0);
        assert!((det - C64::new(9.0 / 8.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn rho_zero_m_is_q() {
        let (j, p, js) = jets(&["1 - x/3 - 2*y/3"], &[1, 1]);
        let c = direction_matrix(&js, &p).unwrap();
        let q = q_matrix(&j, &[1.0], &p).unwrap();
        let m = m_matrix(&q, &project_cbar(&c)).unwrap();
        assert_eq!(m.0, q.0);
    }

    #[test]
    fn linear_sheet_matches_difference_quotient() {
        // v(x) = 2 - x at x = 1: -log v(e^{iθ}) has second derivative -2 at 0
        let (j, p, _) = jets(&["1 - y*(2 - x)"], &[1, 1]);
        let q = q_matrix(&j, &[1.0], &p).unwrap();
        let f = |t: f64| -(2.0 - C64::from_polar(1.0, t)).ln();
        let h = 1e-4;
        let fd = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        assert!((q.0[(0, 0)] - fd).norm() < 1e-6);
        assert!((q.0[(0, 0)] - C64::new(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sqrt_det_simple_cases() {
        let id = DMatrix::<C64>::identity(2, 2);
        assert!((sqrt_det(&id).unwrap().sqrt - C64::new(1.0, 0.0)).norm() < 1e-14);
        let mut d = DMatrix::<C64>::zeros(2, 2);
        d[(0, 0)] = C64::new(4.0, 0.0);
        d[(1, 1)] = C64::new(9.0, 0.0);
        assert!((sqrt_det(&d).unwrap().sqrt - C64::new(6.0, 0.0)).norm() < 1e-13);
        let z = DMatrix::<C64>::zeros(2, 2);
        assert!(matches!(sqrt_det(&z), Err(Error::Singular(_))));
    }

    #[test]
    fn quadrature_examples() {
        let one = simplex_quadrature(|_| C64::new(1.0, 0.0), 3, 4);
        assert!((one.value.re - 1.0).abs() < 1e-12 && one.converged);
        let lin = simplex_quadrature(|a| C64::new(a[0], 0.0), 1, DEFAULT_LEVEL);
        assert!((lin.value.re - 0.5).abs() < 1e-12);
        let inv = simplex_quadrature(
            |a| C64::new((a[0] * 1.0 + a[1] * 4.0).powf(-0.5), 0.0),
            1,
            DEFAULT_LEVEL,
        );
        assert!((inv.value.re - 2.0 / 3.0).abs() < 1e-10);
        assert!(inv.converged);
        // moment of Δ_2: ∫ α_0 α_1 dμ = 2!·1·1/4! = 1/12
        let mom = simplex_quadrature(|a| C64::new(a[0] * a[1], 0.0), 2, DEFAULT_LEVEL);
        assert!((mom.value.re - 1.0 / 12.0).abs() < 1e-10);
    }

    #[test]
    fn freudenthal_cell_counts() {
        for (n, k) in [(1, 5), (2, 4), (3, 3)] {
            let count = centroid_rule(&|_| C64::new(1.0, 0.0), n, k);
            assert!((count.re - 1.0).abs() < 1e-14);
        }
        assert_eq!(cells_per_edge(1, 6), 4096);
        assert_eq!(cells_per_edge(2, 6), 64);
    }
}
