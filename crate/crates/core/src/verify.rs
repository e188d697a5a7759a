//! Oracle comparisons with decay fits, and numeric checks of the integral
//! representation behind the leading-term formulas.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cone::{direction_matrix, factorial, solve_a};
use crate::engine::{predict_unchecked, AsymptoticResult, Leading};
use crate::local::{q_matrix, QMatrix};
use crate::locus::{MultiplePointData, SheetFn};
use crate::model::RationalGF;
use crate::poly::series::SeriesTable;
use crate::poly::{q_to_f64, univariate, MPoly};
use crate::{Error, Result, C64, Q};

/// Twelve significant digits in exponent notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub scale: u32,
    pub r: Vec<u32>,
    pub oracle: Q,
    pub predicted: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `log|a_r − C|` against `|r|`.
    LogLinear,
    /// `log|a_r (z*)^r|` against `log s`.
    PowerLaw,
}

impl FitModel {
    pub fn label(&self) -> &'static str {
        match self {
            FitModel::LogLinear => "log-linear",
            FitModel::PowerLaw => "power-law",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub fit: Fit,
}

impl ComparisonTable {
    pub fn row_at_scale(&self, scale: u32) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.scale == scale)
    }

    /// Columns `r…, oracle, predicted, abs_err, rel_err`.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = names.join(",");
        out.push_str(",oracle,predicted,abs_err,rel_err\n");
        for row in &self.rows {
            for v in &row.r {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_float(q_to_f64(&row.oracle)),
                fmt_float(row.predicted),
                fmt_float(row.abs_err),
                fmt_float(row.rel_err)
            ));
        }
        out
    }
}

/// Least-squares line; returns `(slope, intercept, rms residual)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// `round(scale · direction)`, componentwise.
pub fn scaled_point(direction: &[Q], scale: u32) -> Result<Vec<u32>> {
    direction
        .iter()
        .map(|c| {
            let v = (c * Q::from_integer(BigInt::from(scale))).round();
            v.to_integer()
                .to_u32()
                .ok_or_else(|| Error::Invalid(format!("direction component {c} is negative or too large")))
        })
        .collect()
}

/// Smallest box holding every scaled point.
pub fn oracle_shape(direction: &[Q], scales: &[u32]) -> Result<Vec<u32>> {
    let mut shape = vec![0u32; direction.len()];
    for &s in scales {
        for (b, v) in shape.iter_mut().zip(scaled_point(direction, s)?) {
            *b = (*b).max(v);
        }
    }
    Ok(shape)
}

fn ratio_q(r: &[u32]) -> Vec<Q> {
    r.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect()
}

/// Oracle against prediction along `direction` at each scale, with a decay
/// fit on the last half of the rows.
pub fn compare_direction(
    res: &AsymptoticResult,
    direction: &[Q],
    scales: &[u32],
    oracle: &SeriesTable,
) -> Result<ComparisonTable> {
    let mut scales = scales.to_vec();
    scales.sort_unstable();
    scales.dedup();
    let needed = oracle_shape(direction, &scales)?;
    let points: Vec<(u32, Vec<u32>)> = scales
        .iter()
        .map(|&s| scaled_point(direction, s).map(|r| (s, r)))
        .collect::<Result<_>>()?;
    if points.iter().any(|(_, r)| !oracle.contains(r)) {
        return Err(Error::BoxTooSmall {
            needed,
            have: oracle.shape().to_vec(),
        });
    }
    let rows: Vec<ComparisonRow> = points
        .par_iter()
        .map(|(s, r)| {
            let a = oracle.get(r).expect("checked above");
            let predicted = predict_unchecked(res, &ratio_q(r));
            // the oracle becomes a double only here
            let af = q_to_f64(&a);
            let abs_err = (af - predicted).abs();
            ComparisonRow {
                scale: *s,
                r: r.clone(),
                oracle: a,
                predicted,
                abs_err,
                rel_err: abs_err / af.abs(),
            }
        })
        .collect();

    let tail = if rows.len() >= 4 { &rows[rows.len() / 2..] } else { &rows[..] };
    let (model, xs, ys): (FitModel, Vec<f64>, Vec<f64>) = match res.leading {
        Leading::Constant { .. } => {
            let pts: Vec<(f64, f64)> = tail
                .iter()
                .filter(|row| row.abs_err > 0.0)
                .map(|row| {
                    let norm = row.r.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
                    (norm, row.abs_err.ln())
                })
                .collect();
            (FitModel::LogLinear, pts.iter().map(|p| p.0).collect(), pts.iter().map(|p| p.1).collect())
        }
        Leading::Power { .. } => {
            let pts: Vec<(f64, f64)> = tail
                .iter()
                .map(|row| {
                    let s = *row.r.last().unwrap() as f64;
                    let normalized: f64 = row
                        .r
                        .iter()
                        .zip(&res.prefactor_log)
                        .map(|(&rk, lk)| -(rk as f64) * lk)
                        .sum();
                    (s.ln(), q_to_f64(&row.oracle).abs().ln() + normalized)
                })
                .collect();
            (FitModel::PowerLaw, pts.iter().map(|p| p.0).collect(), pts.iter().map(|p| p.1).collect())
        }
    };
    let (slope, intercept, residual) = fit_line(&xs, &ys);
    Ok(ComparisonTable {
        rows,
        fit: Fit {
            model,
            slope,
            intercept,
            residual,
            points: xs.len(),
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DividedDifferenceReport {
    /// `h[v_0, …, v_n]`.
    pub divided_difference: Q,
    /// `∫_Δ h^{(n)}(α·v) dμ` against the normalized measure.
    pub integral: Q,
    /// `divided_difference = integral / n!`.
    pub holds: bool,
    /// `divided_difference = integral` (the identity without `1/n!`).
    pub uncorrected_holds: bool,
}

/// Complete homogeneous symmetric polynomials `h_0, …, h_m` of `v`.
fn complete_homogeneous(v: &[Q], m: usize) -> Vec<Q> {
    let mut h = vec![Q::zero(); m + 1];
    h[0] = Q::one();
    for x in v {
        // h_k(v_0..v_j) = h_k(v_0..v_{j-1}) + x h_{k-1}(v_0..v_j)
        for k in 1..=m {
            let prev = h[k - 1].clone();
            h[k] += x * prev;
        }
    }
    h
}

/// Divided difference of the polynomial `h` (coefficients low to high) at
/// the nodes `v`, repeated nodes allowed: `y^k[v] = h_{k−n}(v)`.
pub fn divided_difference(v: &[Q], h: &[Q]) -> Q {
    let n = v.len() - 1;
    if h.len() <= n {
        return Q::zero();
    }
    let hk = complete_homogeneous(v, h.len() - 1 - n);
    h.iter()
        .enumerate()
        .skip(n)
        .map(|(k, c)| c * &hk[k - n])
        .fold(Q::zero(), |a, b| a + b)
}

/// `Σ_j h(v_j)/Π_{r≠j}(v_j − v_r)` for distinct nodes.
pub fn divided_difference_explicit(v: &[Q], h: &[Q]) -> Option<Q> {
    let mut total = Q::zero();
    for (j, vj) in v.iter().enumerate() {
        let mut den = Q::one();
        for (r, vr) in v.iter().enumerate() {
            if r != j {
                let diff = vj - vr;
                if diff.is_zero() {
                    return None;
                }
                den *= diff;
            }
        }
        total += univariate::eval(h, vj) / den;
    }
    Some(total)
}

fn q_factorial(n: usize) -> Q {
    Q::from_integer((1..=n as u64).map(BigInt::from).product())
}

/// Compositions of `k` into `parts` nonnegative parts.
fn compositions(k: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in compositions(k - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `∫_Δ (α·v)^k dμ` by the multinomial expansion and the exact moments
/// `∫ α^β dμ = n! Π β_j! / (n + |β|)!`.
fn simplex_power_moment(v: &[Q], k: usize) -> Q {
    let n = v.len() - 1;
    let kf = q_factorial(k);
    let scale = q_factorial(n) / q_factorial(n + k);
    let mut total = Q::zero();
    for beta in compositions(k, n + 1) {
        // k!/β! from the multinomial times β! from the moment
        let mono = v
            .iter()
            .zip(&beta)
            .fold(Q::one(), |acc, (x, &b)| acc * x.pow(b as i32));
        total += mono;
    }
    kf * scale * total
}

pub fn divided_difference_identity_check(v: &[Q], h: &[Q]) -> DividedDifferenceReport {
    let n = v.len() - 1;
    let lhs = divided_difference(v, h);
    let mut deriv = h.to_vec();
    for _ in 0..n {
        deriv = univariate::derivative(&deriv);
    }
    let integral = deriv
        .iter()
        .enumerate()
        .map(|(k, c)| c * simplex_power_moment(v, k))
        .fold(Q::zero(), |a, b| a + b);
    DividedDifferenceReport {
        holds: lhs == &integral / q_factorial(n),
        uncorrected_holds: lhs == integral,
        divided_difference: lhs,
        integral,
    }
}

/// `Σ_j α_j v_j(ẑ* e^{iθ})`.
fn weighted_sheets(fns: &[SheetFn], alpha: &[f64], theta: &[f64]) -> Result<C64> {
    let mut total = C64::new(0.0, 0.0);
    for (f, &a) in fns.iter().zip(alpha) {
        if a != 0.0 {
            total += a * f.v_at_angles(theta)?;
        }
    }
    Ok(total)
}

/// Richardson-extrapolated central differences of `θ ↦ −log g(θ)` against
/// `Q`; returns the largest entrywise relative error.
pub fn hessian_fd_check<F>(g: F, q: &QMatrix) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<C64>,
{
    let d = q.dim();
    let f = |t: &[f64]| g(t).map(|v| -v.ln());
    let second = |k: usize, l: usize, h: f64| -> Result<C64> {
        let at = |sk: f64, sl: f64| {
            let mut t = vec![0.0; d];
            t[k] += sk * h;
            t[l] += sl * h;
            f(&t)
        };
        if k == l {
            Ok((at(1.0, 0.0)? - 2.0 * f(&vec![0.0; d])? + at(-1.0, 0.0)?) / (h * h))
        } else {
            Ok((at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)? + at(-1.0, -1.0)?) / (4.0 * h * h))
        }
    };
    let h = 1e-4;
    let scale = q.0.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            let fd = (4.0 * second(k, l, h / 2.0)? - second(k, l, h)?) / 3.0;
            let exact = q.0[(k, l)];
            let denom = if exact.norm() > 1e-8 * scale { exact.norm() } else { scale };
            worst = worst.max((fd - exact).norm() / denom);
        }
    }
    Ok(worst)
}

/// [`hessian_fd_check`] on the sheets of a factored multiple point.
pub fn hessian_fd_check_at(mp: &MultiplePointData, alpha: &[f64]) -> Result<f64> {
    let fns = mp
        .sheet_fns()
        .ok_or_else(|| Error::Unsupported("finite-difference check needs denominator factors".into()))?;
    let q = q_matrix(&mp.sheets.to_f64(), alpha, &mp.point)?;
    hessian_fd_check(|t| weighted_sheets(&fns, alpha, t), &q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSetReport {
    pub alpha: Vec<f64>,
    /// `|∇_θ f(0, α)|` from the sheet jets.
    pub gradient_at_solution: f64,
    /// The same by finite differences of the continued sheets.
    pub fd_gradient_at_solution: Option<f64>,
    /// `|∇_θ f(0, α')|` at weights with `α'C ≠ δ`.
    pub perturbed_gradients: Vec<f64>,
    /// Smallest `Re f(θ, α)` over sampled `θ ≠ 0`.
    pub min_real_part: Option<f64>,
    pub violations: Vec<String>,
}

impl CriticalSetReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const GRADIENT_TOL: f64 = 1e-10;
const FD_GRADIENT_TOL: f64 = 1e-8;
const AWAY_TOL: f64 = 1e-3;

/// Checks that `f(θ, α) = −log(α·v(ẑ* e^{iθ})/v*) + i δ̂·θ` is stationary at
/// `θ = 0` exactly for `αC = δ`, and has positive real part elsewhere.
pub fn critical_set_check(mp: &MultiplePointData, delta: &[Q], samples: usize) -> Result<CriticalSetReport> {
    let c = direction_matrix(&mp.sheets, &mp.point)?;
    let poly = solve_a(&c, delta)?;
    let alpha = poly.center();
    let d = mp.d();
    let df: Vec<f64> = delta.iter().map(q_to_f64).collect();
    let analytic = |a: &[f64]| -> f64 {
        (0..d)
            .map(|k| {
                let ac: f64 = a.iter().zip(c.rows()).map(|(x, row)| x * row[k]).sum();
                (ac - df[k]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    };
    let fns = mp.sheet_fns();
    let vstar = 1.0 / q_to_f64(mp.point.last());
    let phase = |fns: &[SheetFn], a: &[f64], t: &[f64]| -> Result<C64> {
        let g = weighted_sheets(fns, a, t)?;
        let lin: f64 = t.iter().zip(&df).map(|(x, y)| x * y).sum();
        Ok(-(g / vstar).ln() + C64::new(0.0, lin))
    };
    let fd_gradient = |fns: &[SheetFn], a: &[f64]| -> Result<f64> {
        let mut total = 0.0;
        for k in 0..d {
            let diff = |h: f64| -> Result<C64> {
                let mut p = vec![0.0; d];
                let mut m = vec![0.0; d];
                p[k] = h;
                m[k] = -h;
                Ok((phase(fns, a, &p)? - phase(fns, a, &m)?) / (2.0 * h))
            };
            let h = 1e-3;
            let g = (4.0 * diff(h / 2.0)? - diff(h)?) / 3.0;
            total += g.norm_sqr();
        }
        Ok(total.sqrt())
    };

    let mut violations = Vec::new();
    let gradient_at_solution = analytic(&alpha);
    if gradient_at_solution > GRADIENT_TOL {
        violations.push(format!("gradient {gradient_at_solution:e} at the critical weights"));
    }
    let fd_gradient_at_solution = match &fns {
        Some(f) => {
            let g = fd_gradient(f, &alpha)?;
            if g > FD_GRADIENT_TOL {
                violations.push(format!("finite-difference gradient {g:e} at the critical weights"));
            }
            Some(g)
        }
        None => None,
    };

    let n = mp.n();
    let mut perturbed_gradients = Vec::new();
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut a = alpha.clone();
            a[j] += 0.1 * sign;
            a[j + 1] -= 0.1 * sign;
            if a.iter().any(|&x| x < 0.0) || analytic(&a) <= 1e-9 {
                continue;
            }
            let g = match &fns {
                Some(f) => fd_gradient(f, &a)?,
                None => analytic(&a),
            };
            if g <= AWAY_TOL {
                violations.push(format!("gradient {g:e} at non-critical weights {a:?}"));
            }
            perturbed_gradients.push(g);
        }
    }

    let min_real_part = match &fns {
        Some(f) => {
            // Kronecker sequence on the torus, away from θ = 0
            let gens: Vec<f64> = (0..d).map(|k| (2.0 + k as f64).sqrt().fract()).collect();
            let mut best = f64::INFINITY;
            let mut taken = 0;
            let mut i = 1usize;
            while taken < samples {
                let t: Vec<f64> = gens
                    .iter()
                    .map(|g| ((i as f64 * g).fract() * 2.0 - 1.0) * std::f64::consts::PI)
                    .collect();
                i += 1;
                if t.iter().all(|x| x.abs() < 0.05) {
                    continue;
                }
                let re = phase(f, &alpha, &t)?.re;
                if re <= 0.0 {
                    violations.push(format!("Re f = {re:e} at theta = {t:?}"));
                }
                best = best.min(re);
                taken += 1;
            }
            Some(best)
        }
        None => None,
    };

    Ok(CriticalSetReport {
        alpha,
        gradient_at_solution,
        fd_gradient_at_solution,
        perturbed_gradients,
        min_real_part,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlRow {
    pub s: u32,
    pub r: Vec<u32>,
    pub oracle: Q,
    pub value: f64,
    pub rel_err: f64,
    /// Angular nodes at convergence.
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlReport {
    pub theta0: f64,
    pub rows: Vec<FlRow>,
    pub decreasing: bool,
}

pub const FL_THETA0: f64 = std::f64::consts::FRAC_PI_2;
const FL_TOL: f64 = 1e-8;
const FL_MAX_DOUBLINGS: usize = 7;

/// Truncated power series in `ε` with complex coefficients.
#[derive(Debug, Clone)]
struct Series(Vec<C64>);

impl Series {
    fn constant(c: C64, len: usize) -> Series {
        let mut v = vec![C64::new(0.0, 0.0); len];
        v[0] = c;
        Series(v)
    }

    fn mul(&self, o: &Series) -> Series {
        let len = self.0.len();
        let mut v = vec![C64::new(0.0, 0.0); len];
        for i in 0..len {
            for j in 0..len - i {
                v[i + j] += self.0[i] * o.0[j];
            }
        }
        Series(v)
    }

    fn div(&self, o: &Series) -> Series {
        let len = self.0.len();
        let mut q = vec![C64::new(0.0, 0.0); len];
        for i in 0..len {
            let mut acc = self.0[i];
            for j in 1..=i {
                acc -= o.0[j] * q[i - j];
            }
            q[i] = acc / o.0[0];
        }
        Series(q)
    }

    /// `p(x)` for a polynomial `p` (coefficients low to high).
    fn compose(p: &[C64], x: &Series) -> Series {
        let len = x.0.len();
        let mut acc = Series::constant(C64::new(0.0, 0.0), len);
        for c in p.iter().rev() {
            acc = acc.mul(x);
            acc.0[0] += c;
        }
        acc
    }
}

/// Quotient of `p(w)` by `w − root` (synthetic division, remainder dropped).
fn deflate(p: &[C64], root: C64) -> Vec<C64> {
    let deg = p.len() - 1;
    let mut q = vec![C64::new(0.0, 0.0); deg];
    let mut carry = C64::new(0.0, 0.0);
    for k in (1..=deg).rev() {
        carry = p[k] + carry * root;
        q[k - 1] = carry;
    }
    q
}

/// Nodes `(t, weight)` of an `m`-point Gauss–Legendre rule on `[a, b]`.
fn gl_nodes(m: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(m).expect("positive node count"));
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * ((b - a) * x + a + b), 0.5 * (b - a) * w))
        .collect()
}

/// Points and weights of a conical product rule for the normalized measure
/// on `Δ_n`.
fn simplex_rule(n: usize, m: usize) -> Vec<(Vec<f64>, f64)> {
    if n == 0 {
        return vec![(vec![1.0], 1.0)];
    }
    let base = gl_nodes(m, 0.0, 1.0);
    let mut out = Vec::new();
    let total = base.len().pow(n as u32);
    for idx in 0..total {
        let mut r = idx;
        let mut t = Vec::with_capacity(n);
        let mut w = factorial(n);
        for i in 0..n {
            let (ti, wi) = base[r % base.len()];
            r /= base.len();
            t.push(ti);
            w *= wi * ti.powi((n - 1 - i) as i32);
        }
        let mut alpha = Vec::with_capacity(n + 1);
        let mut stick = 1.0;
        for ti in &t {
            alpha.push(stick * (1.0 - ti));
            stick *= ti;
        }
        alpha.push(stick);
        out.push((alpha, w));
    }
    out
}

/// Sheet values, numerator and cofactor coefficients in `w`, and the
/// deflated sheet factors, all at one angle.
type AngleData = (Vec<C64>, Vec<C64>, Vec<C64>, Vec<Vec<C64>>);

/// Local Weierstrass data along the torus for a factored bivariate `F`.
struct FlModel {
    numer: MPoly<C64>,
    rest: MPoly<C64>,
    sheets: Vec<MPoly<C64>>,
    fns: Vec<SheetFn>,
    zstar: f64,
    n: usize,
}

impl FlModel {
    /// Sheet values `v_j` and `Ψ(ẑ, ·)` pieces at the angle `θ`.
    fn at_angle(&self, theta: f64) -> Result<AngleData> {
        let z = C64::from_polar(self.zstar, 0.0) * C64::from_polar(1.0, theta);
        let pt = [z, C64::new(0.0, 0.0)];
        let mut vs = Vec::with_capacity(self.fns.len());
        let mut es = Vec::with_capacity(self.fns.len());
        for (f, chi) in self.fns.iter().zip(&self.sheets) {
            let v = f.v_at_angles(&[theta])?;
            let u = 1.0 / v;
            // χ_j = (1 − w v_j) e_j with e_j = −u_j χ_j/(w − u_j)
            let q = deflate(&chi.restrict_to_var(1, &pt)?, u);
            es.push(q.iter().map(|c| -u * c).collect());
            vs.push(v);
        }
        Ok((
            vs,
            self.numer.restrict_to_var(1, &pt)?,
            self.rest.restrict_to_var(1, &pt)?,
            es,
        ))
    }

    /// `Σ_k p_k(s) ψ_k(y)` with `ψ_k(y) = y^k ∂_y^k Ψ(ẑ, 1/y)`.
    fn amplitude(&self, y: C64, s: u32, numer: &[C64], rest: &[C64], es: &[Vec<C64>]) -> C64 {
        let len = self.n + 1;
        // w = 1/(y + ε)
        let mut w = Series::constant(C64::new(0.0, 0.0), len);
        for m in 0..len {
            w.0[m] = (-1.0f64).powi(m as i32) / y.powi(m as i32 + 1);
        }
        let mut den = Series::compose(rest, &w);
        for e in es {
            den = den.mul(&Series::compose(e, &w));
        }
        let psi = Series::compose(numer, &w).div(&den);
        let mut total = C64::new(0.0, 0.0);
        for k in 0..=self.n {
            // p_k(s) = C(n, k) (s+k+1)…(s+n)
            let mut p = factorial(self.n) / (factorial(k) * factorial(self.n - k));
            for i in k + 1..=self.n {
                p *= s as f64 + i as f64;
            }
            total += p * y.powi(k as i32) * factorial(k) * psi.0[k];
        }
        total
    }
}

/// Evaluates the coefficient `a_{(r, s)}` of a factored bivariate `F` from
/// the residue sum and the simplex integral, integrating `θ` over
/// `[−θ0, θ0]`, and compares it with the oracle.
pub fn fl_quadrature_check(
    gf: &RationalGF,
    mp: &MultiplePointData,
    delta: &Q,
    s_list: &[u32],
    oracle: &SeriesTable,
    theta0: f64,
) -> Result<FlReport> {
    if mp.d() != 1 {
        return Err(Error::Unsupported("the Fourier-Laplace check needs two variables".into()));
    }
    let (Some(factors), Some(sheets)) = (&gf.factors, &mp.sheet_factors) else {
        return Err(Error::Unsupported("the Fourier-Laplace check needs denominator factors".into()));
    };
    let mut rest = MPoly::<Q>::one(2);
    for f in factors {
        if !f.eval(mp.point.coords())?.is_zero() {
            rest = &rest * f;
        }
    }
    let model = FlModel {
        numer: gf.numerator.to_complex(),
        rest: rest.to_complex(),
        sheets: sheets.iter().map(MPoly::to_complex).collect(),
        fns: mp.sheet_fns().expect("factored point"),
        zstar: q_to_f64(&mp.point.coords()[0]),
        n: mp.n(),
    };
    let n = mp.n();
    let zf = q_to_f64(&mp.point.coords()[0]);

    let integrate = |r: u32, s: u32, m_theta: usize, m_alpha: usize| -> Result<C64> {
        let thetas = gl_nodes(m_theta, -theta0, theta0);
        let simplex = simplex_rule(n, m_alpha);
        let parts: Vec<Result<C64>> = thetas
            .par_iter()
            .map(|&(t, wt)| {
                let (vs, numer, rest, es) = model.at_angle(t)?;
                let zr = C64::from_polar(zf.powi(-(r as i32)), -(r as f64) * t);
                let mut inner = C64::new(0.0, 0.0);
                for (alpha, wa) in &simplex {
                    let y: C64 = alpha.iter().zip(&vs).map(|(a, v)| a * v).sum();
                    inner += wa * y.powi(s as i32) * model.amplitude(y, s, &numer, &rest, &es);
                }
                Ok(wt * zr * inner)
            })
            .collect();
        let mut total = C64::new(0.0, 0.0);
        for p in parts {
            total += p?;
        }
        Ok(total / (2.0 * std::f64::consts::PI * factorial(n)))
    };

    let mut rows = Vec::new();
    for &s in s_list {
        let rq = (delta * Q::from_integer(BigInt::from(s))).round();
        let r = rq
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::Invalid("negative direction".into()))?;
        let idx = vec![r, s];
        let a = oracle.get(&idx).ok_or_else(|| Error::BoxTooSmall {
            needed: idx.clone(),
            have: oracle.shape().to_vec(),
        })?;
        let (mut mt, mut ma) = (64usize, 16usize);
        let mut prev = integrate(r, s, mt, ma)?;
        let mut converged = false;
        for _ in 0..FL_MAX_DOUBLINGS {
            mt *= 2;
            ma *= 2;
            let next = integrate(r, s, mt, ma)?;
            let change = (next - prev).norm() / next.norm().max(f64::MIN_POSITIVE);
            prev = next;
            if change <= FL_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(format!(
                "Fourier-Laplace quadrature at s = {s}"
            )));
        }
        let af = q_to_f64(&a);
        rows.push(FlRow {
            s,
            r: idx,
            oracle: a,
            value: prev.re,
            rel_err: (prev.re - af).abs() / af.abs(),
            nodes: mt,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].rel_err < w[0].rel_err);
    Ok(FlReport {
        theta0,
        rows,
        decreasing,
    })
}
