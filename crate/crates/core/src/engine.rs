//! Dispatch from the local geometry at a multiple point to a leading-term
//! formula, and numeric evaluation of the resulting prediction.

use num_traits::{Signed, ToPrimitive, Zero};
use statrs::function::gamma::gamma;

use crate::cone::{
    classify, cone_membership, direction_matrix, factorial, normalize_direction, project_cbar,
    sigma_measure, solve_a, Classification, DirectionMatrix, Membership,
};
use crate::local::{m_matrix, q_matrix, simplex_quadrature, sqrt_det, Quadrature, DEFAULT_LEVEL};
use crate::locus::jets::rational_sqrt;
use crate::locus::{Minimality, MultiplePointData};
use crate::model::RationalGF;
use crate::poly::{fmt_vec, q_to_f64};
use crate::{Error, Result, C64, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DoublePoint2d,
    CompletelyNondegenerate,
    NondegeneratePiecewise,
    Transverse,
    FullyTangent,
    Tangent2dOrderM,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::DoublePoint2d => "double_point_2d",
            Method::CompletelyNondegenerate => "completely_nondegenerate",
            Method::NondegeneratePiecewise => "nondegenerate_piecewise",
            Method::Transverse => "transverse",
            Method::FullyTangent => "fully_tangent",
            Method::Tangent2dOrderM => "tangent_2d_order_m",
        }
    }

    /// Whether the leading coefficient depends on the direction inside the
    /// cone.
    pub fn direction_dependent(&self) -> bool {
        matches!(
            self,
            Method::NondegeneratePiecewise | Method::Transverse
        )
    }
}

/// Leading behaviour of `a_r (z*)^r` along a ray, in terms of `s = r_{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Leading {
    Constant { value: f64, exact: Option<Q> },
    Power { b0: f64, power: f64 },
}

impl Leading {
    pub fn at(&self, s: f64) -> f64 {
        match self {
            Leading::Constant { value, .. } => *value,
            Leading::Power { b0, power } => b0 * s.powf(*power),
        }
    }
}

/// Intermediate quantities, kept for reports.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub det_hess: Option<Q>,
    pub det_c: Option<f64>,
    pub det_cbar: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<Vec<f64>>,
    pub det_m: Option<C64>,
    pub sqrt_det_m: Option<C64>,
    pub tangent_d: Option<[f64; 2]>,
    pub quadrature: Option<Quadrature>,
}

#[derive(Debug, Clone)]
pub struct AsymptoticResult {
    pub point: crate::model::PointSpec,
    pub theorem: Method,
    /// `−log|z*|`; the prediction carries `(z*)^{−r}`.
    pub prefactor_log: Vec<f64>,
    pub leading: Leading,
    pub direction: Vec<Q>,
    pub membership: Membership,
    pub cone: DirectionMatrix,
    pub classification: Classification,
    pub boundary_halved: bool,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    /// Proceed when the minimality sampler found a witness.
    pub allow_nonminimal: bool,
    pub quadrature_level: u32,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            allow_nonminimal: false,
            quadrature_level: DEFAULT_LEVEL,
        }
    }
}

pub const TANGENT_EXAMPLE_WARNING: &str = "tangent 2D: the alternative printed constant 2*phi/(sqrt(2*pi)*(sqrt(d0)+sqrt(d1))) is larger by sqrt(2); the emitted value follows the order-m formula";

fn describe_witness(w: &[C64]) -> String {
    let parts: Vec<String> = w
        .iter()
        .map(|c| {
            if c.im.abs() < 1e-12 {
                format!("{:.6}", c.re)
            } else {
                format!("{:.6}{:+.6}i", c.re, c.im)
            }
        })
        .collect();
    format!("({})", parts.join(", "))
}

/// `C = G(z*)/√(−z*² w*² det Hess H)` at a 2D double point.
pub fn double_point_constant(gf: &RationalGF, mp: &MultiplePointData) -> Result<(f64, Option<Q>)> {
    let dp = mp
        .double_point
        .as_ref()
        .ok_or_else(|| Error::Unsupported("not a 2D double point".into()))?;
    if dp.det_hess.is_zero() || dp.degenerate {
        return Err(Error::Unsupported(
            "double point with degenerate Hessian (tangent branches)".into(),
        ));
    }
    let c = mp.point.coords();
    let rad = -(&c[0] * &c[0]) * (&c[1] * &c[1]) * &dp.det_hess;
    if !rad.is_positive() {
        return Err(Error::Unsupported(format!(
            "-z^2 w^2 det Hess = {rad} is not positive"
        )));
    }
    let g = gf.numerator.eval(c)?;
    let exact = rational_sqrt(&rad).map(|r| &g / r);
    let value = exact
        .as_ref()
        .map(q_to_f64)
        .unwrap_or_else(|| q_to_f64(&g) / q_to_f64(&rad).sqrt());
    Ok((value, exact))
}

/// `φ/|det C|` (`n = d`).
pub fn completely_nondegenerate_constant(mp: &MultiplePointData, c: &DirectionMatrix) -> Result<(f64, Option<Q>)> {
    if c.nrows() != c.ncols() {
        return Err(Error::Unsupported("C is not square".into()));
    }
    let exact = c.exact().map(|e| {
        let det = crate::linalg::det(e);
        (!det.is_zero()).then(|| &mp.phi / det.abs())
    });
    match exact {
        Some(Some(v)) => Ok((q_to_f64(&v), Some(v))),
        Some(None) => Err(Error::Singular("det C = 0".into())),
        None => {
            let det = c.det().unwrap_or(0.0);
            if det.abs() < 1e-12 {
                return Err(Error::Singular("det C = 0".into()));
            }
            Ok((q_to_f64(&mp.phi) / det.abs(), None))
        }
    }
}

/// `φ σ(δ) / (n! |det C̄|)`, coefficient of `s^{n−d}`.
pub fn nondegenerate_coefficient(
    mp: &MultiplePointData,
    c: &DirectionMatrix,
    delta: &[Q],
    diag: &mut Diagnostics,
) -> Result<f64> {
    let n = mp.n();
    let d = mp.d();
    let cbar = project_cbar(c);
    let det_cbar = cbar
        .det()
        .ok_or_else(|| Error::Unsupported(format!("rho = {} differs from d = {d}", cbar.rho())))?;
    if det_cbar.abs() < 1e-12 {
        return Err(Error::Singular("det C-bar = 0".into()));
    }
    let a = solve_a(c, delta)?;
    let sigma = sigma_measure(&a, n, d)?;
    diag.det_cbar = Some(det_cbar);
    diag.sigma = Some(sigma);
    Ok(q_to_f64(&mp.phi) * sigma / (factorial(n) * det_cbar.abs()))
}

/// `(2π)^{(n−d)/2} φ / (√(n+1) √det M(α(δ)))`, coefficient of
/// `s^{(n−d)/2}`.
pub fn transverse_coefficient(
    mp: &MultiplePointData,
    c: &DirectionMatrix,
    delta: &[Q],
    diag: &mut Diagnostics,
) -> Result<C64> {
    let n = mp.n();
    let d = mp.d();
    let a = solve_a(c, delta)?;
    if a.vertices.len() != 1 {
        return Err(Error::Invalid(format!(
            "expected a unique weight vector, found {} vertices",
            a.vertices.len()
        )));
    }
    let alpha = a.vertices[0].clone();
    let sheets = mp.sheets.to_f64();
    let q = q_matrix(&sheets, &alpha, &mp.point)?;
    let m = m_matrix(&q, &project_cbar(c))?;
    let sd = sqrt_det(&m.0)?;
    diag.alpha = Some(alpha);
    diag.det_m = Some(sd.det);
    diag.sqrt_det_m = Some(sd.sqrt);
    let scale = (2.0 * std::f64::consts::PI).powf((n as f64 - d as f64) / 2.0) / ((n + 1) as f64).sqrt();
    Ok(scale * q_to_f64(&mp.phi) / sd.sqrt)
}

const MAX_EXTRA_LEVELS: u32 = 3;

/// `φ/(n! (2π)^{d/2}) ∫_Δ det Q(α)^{−1/2} dμ`, coefficient of `s^{n−d/2}`.
pub fn fully_tangent_coefficient(mp: &MultiplePointData, level: u32, diag: &mut Diagnostics) -> Result<C64> {
    let n = mp.n();
    let d = mp.d();
    let sheets = mp.sheets.to_f64();
    // det Q must stay away from zero on the simplex
    let probes: Vec<Vec<f64>> = (0..=n)
        .map(|j| (0..=n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .chain(std::iter::once(vec![1.0 / (n + 1) as f64; n + 1]))
        .collect();
    for p in &probes {
        let q = q_matrix(&sheets, p, &mp.point)?;
        sqrt_det(&q.0).map_err(|_| Error::Singular(format!("det Q vanishes at alpha = {p:?}")))?;
    }
    let integrand = |alpha: &[f64]| match q_matrix(&sheets, alpha, &mp.point).and_then(|q| sqrt_det(&q.0)) {
        Ok(sd) => 1.0 / sd.sqrt,
        Err(_) => C64::new(f64::NAN, f64::NAN),
    };
    let mut quad = simplex_quadrature(integrand, n, level);
    for extra in 1..=MAX_EXTRA_LEVELS {
        if quad.converged || !quad.value.re.is_finite() {
            break;
        }
        quad = simplex_quadrature(integrand, n, level + extra);
    }
    if !quad.value.re.is_finite() {
        return Err(Error::Singular("det Q vanishes inside the simplex".into()));
    }
    diag.quadrature = Some(quad);
    let scale = factorial(n) * (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0);
    Ok(q_to_f64(&mp.phi) * quad.value / scale)
}

/// Leading coefficient when two sheets vanish to the same even order `m`
/// along the common ray, with order constants `d0`, `d1`; power `n − 1/m`.
pub fn tangent_2d_order_m(d0: f64, d1: f64, phi: f64, n: usize, m: u32) -> Result<(f64, f64)> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::Invalid(format!("order m = {m} must be positive and even")));
    }
    if d0 <= 0.0 || d1 <= 0.0 {
        return Err(Error::Invalid("order constants must be positive".into()));
    }
    let mf = m as f64;
    let g = gamma(1.0 / mf);
    let b0 = if (d0 - d1).abs() < 1e-12 * d0.abs() {
        phi * g / (2.0 * std::f64::consts::PI * d0.powf(1.0 / mf))
    } else {
        let e = 1.0 - 1.0 / mf;
        phi * g / (2.0 * std::f64::consts::PI * e) * (d1.powf(e) - d0.powf(e)) / (d1 - d0)
    };
    Ok((b0, n as f64 - 1.0 / mf))
}

/// `2φ/(√(2π)(√d0+√d1))`, the other printed constant for the tangent 2D
/// case.
pub fn tangent_2d_example_constant(d0: f64, d1: f64, phi: f64) -> f64 {
    2.0 * phi / ((2.0 * std::f64::consts::PI).sqrt() * (d0.sqrt() + d1.sqrt()))
}

/// Piecewise linear leading form for three curves through a point with
/// slopes `c0 ≤ c1 ≤ c2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    pub c: [Q; 3],
    pub phi: Q,
}

pub fn piecewise_polynomial_3curves(c: [Q; 3], phi: Q) -> Result<PiecewiseLinear> {
    if c[0] > c[1] || c[1] > c[2] || c[0] == c[2] {
        return Err(Error::Invalid(format!(
            "slopes must satisfy c0 <= c1 <= c2 with c0 < c2, got {}, {}, {}",
            c[0], c[1], c[2]
        )));
    }
    Ok(PiecewiseLinear { c, phi })
}

impl PiecewiseLinear {
    /// `P(r, s)`; zero on the walls.
    pub fn eval(&self, r: &Q, s: &Q) -> Result<Q> {
        if !s.is_positive() {
            return Err(Error::Invalid("s must be positive".into()));
        }
        let [c0, c1, c2] = &self.c;
        let delta = r / s;
        let two = Q::from_integer(2.into());
        if &delta < c0 || &delta > c2 {
            return Err(Error::OutsideCone(format!("r/s = {delta}")));
        }
        let v = if &delta <= c1 && c1 > c0 {
            &two * (r - c0 * s) / ((c1 - c0) * (c2 - c0))
        } else {
            &two * (c2 * s - r) / ((c2 - c1) * (c2 - c0))
        };
        Ok(&self.phi * v)
    }
}

/// Computes the leading term at `mp` in the direction `r`.
pub fn leading_term(
    gf: &RationalGF,
    mp: &MultiplePointData,
    r: &[Q],
    opts: &EngineOptions,
) -> Result<AsymptoticResult> {
    mp.point.check_dim(r.len())?;
    let mut warnings: Vec<String> = mp.flags.clone();
    match &mp.minimality {
        Minimality::Failed { witness } => {
            if !opts.allow_nonminimal {
                return Err(Error::NotMinimal {
                    witness: describe_witness(witness),
                });
            }
            warnings.push(format!(
                "minimality check failed at {}; result computed on request",
                describe_witness(witness)
            ));
        }
        Minimality::HeuristicallyStrictlyMinimal { .. } => warnings.push(
            "strict minimality is heuristic: only sampled points of the polydisk were checked".into(),
        ),
        Minimality::Unchecked => warnings.push("strict minimality was not checked".into()),
    }

    let c = direction_matrix(&mp.sheets, &mp.point)?;
    let classification = classify(&c, 1e-9)?;
    let delta = normalize_direction(r)?;
    let membership = cone_membership(&c, r)?;
    if membership == Membership::Outside {
        return Err(Error::OutsideCone(fmt_vec(r)));
    }
    let n = mp.n();
    let d = mp.d();
    let mut diag = Diagnostics::default();
    let mut boundary_halved = false;

    let plain_double = d == 1
        && n == 1
        && mp
            .double_point
            .as_ref()
            .is_some_and(|dp| !dp.degenerate && !dp.det_hess.is_zero());

    let (theorem, leading) = if plain_double {
        diag.det_hess = mp.double_point.as_ref().map(|dp| dp.det_hess.clone());
        let (value, exact) = double_point_constant(gf, mp)?;
        if membership == Membership::Boundary {
            boundary_halved = true;
            warnings.push(
                "boundary direction: half the interior constant; no error bound is claimed".into(),
            );
            (Method::DoublePoint2d, Leading::Power { b0: value / 2.0, power: 0.0 })
        } else {
            (Method::DoublePoint2d, Leading::Constant { value, exact })
        }
    } else if membership == Membership::Boundary {
        return Err(Error::BoundaryUnsupported(
            "only the 2D double point has a boundary formula; heuristically the magnitude halves on a face".into(),
        ));
    } else if classification.completely_nondegenerate {
        diag.det_c = c.det();
        let (value, exact) = completely_nondegenerate_constant(mp, &c)?;
        (Method::CompletelyNondegenerate, Leading::Constant { value, exact })
    } else if classification.nondegenerate {
        let b0 = nondegenerate_coefficient(mp, &c, &delta, &mut diag)?;
        warnings.push("leading term only: lower-order terms of the piecewise polynomial are omitted".into());
        (
            Method::NondegeneratePiecewise,
            Leading::Power { b0, power: (n - d) as f64 },
        )
    } else if classification.transverse {
        let b0 = transverse_coefficient(mp, &c, &delta, &mut diag)?;
        if b0.im.abs() > 1e-9 * b0.norm() {
            warnings.push(format!("leading coefficient has imaginary part {:.3e}", b0.im));
        }
        (
            Method::Transverse,
            Leading::Power { b0: b0.re, power: (n as f64 - d as f64) / 2.0 },
        )
    } else if classification.single_ray && n >= 1 {
        let b0 = fully_tangent_coefficient(mp, opts.quadrature_level, &mut diag)?;
        if let Some(q) = diag.quadrature.filter(|q| !q.converged) {
            warnings.push(format!(
                "simplex quadrature did not reach its tolerance (error estimate {:.3e})",
                q.error
            ));
        }
        if d == 1 && n == 1 {
            let sheets = mp.sheets.to_f64();
            let dj: Vec<f64> = (0..2)
                .map(|j| {
                    let mut a = [0.0, 0.0];
                    a[j] = 1.0;
                    q_matrix(&sheets, &a, &mp.point).map(|q| q.0[(0, 0)].re / 2.0)
                })
                .collect::<Result<_>>()?;
            let phi = q_to_f64(&mp.phi);
            let (b0m, power) = tangent_2d_order_m(dj[0], dj[1], phi, n, 2)?;
            if (b0m - b0.re).abs() > 1e-6 * b0m.abs() {
                warnings.push(format!(
                    "order-m formula {b0m:.12e} and simplex quadrature {:.12e} disagree",
                    b0.re
                ));
            }
            diag.tangent_d = Some([dj[0], dj[1]]);
            warnings.push(TANGENT_EXAMPLE_WARNING.into());
            (Method::Tangent2dOrderM, Leading::Power { b0: b0m, power })
        } else {
            (
                Method::FullyTangent,
                Leading::Power { b0: b0.re, power: n as f64 - d as f64 / 2.0 },
            )
        }
    } else {
        return Err(Error::Unsupported(format!(
            "classification {} (rank {}, n = {n}, d = {d}) has no leading-term formula",
            classification.label(),
            classification.rank
        )));
    };

    let prefactor_log = mp.point.to_f64().iter().map(|z| -z.abs().ln()).collect();
    Ok(AsymptoticResult {
        point: mp.point.clone(),
        theorem,
        prefactor_log,
        leading,
        direction: r.to_vec(),
        membership,
        cone: c,
        classification,
        boundary_halved,
        diagnostics: diag,
        warnings,
    })
}

fn parallel(a: &[Q], b: &[Q]) -> bool {
    match (normalize_direction(a), normalize_direction(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// `(z*)^{−r} × leading(r)`.
pub fn evaluate_prediction(res: &AsymptoticResult, r: &[Q]) -> Result<f64> {
    res.point.check_dim(r.len())?;
    if r.iter().all(Zero::is_zero) {
        return Err(Error::Invalid("r = 0 has no asymptotic prediction".into()));
    }
    let membership = cone_membership(&res.cone, r)?;
    if membership == Membership::Outside {
        return Err(Error::OutsideCone(fmt_vec(r)));
    }
    if membership != res.membership {
        return Err(Error::Invalid(format!(
            "r is {} but the result was computed for a {} direction",
            membership.label(),
            res.membership.label()
        )));
    }
    let needs_ray = res.theorem.direction_dependent()
        || matches!(res.theorem, Method::FullyTangent | Method::Tangent2dOrderM);
    if needs_ray && !parallel(r, &res.direction) {
        return Err(Error::Invalid(
            "the leading coefficient depends on the direction; r must be parallel to the computed direction".into(),
        ));
    }
    Ok(predict_unchecked(res, r))
}

/// `(z*)^{−r} × leading(r_{d+1})` without any direction checks; for lattice
/// points rounded from a ray.
pub fn predict_unchecked(res: &AsymptoticResult, r: &[Q]) -> f64 {
    let z = res.point.to_f64();
    let mut log = 0.0;
    let mut sign = 1.0;
    for ((rk, lk), zk) in r.iter().zip(&res.prefactor_log).zip(&z) {
        let rf = q_to_f64(rk);
        log += rf * lk;
        if *zk < 0.0 && rk.to_integer().to_i64().is_some_and(|e| e % 2 != 0) {
            sign = -sign;
        }
    }
    let s = q_to_f64(r.last().unwrap());
    sign * log.exp() * res.leading.at(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locus::analyze_point;
    use crate::model::{parse_problem, PointSpec};
    use crate::poly::{q, qi};

    fn setup(text: &str) -> (RationalGF, MultiplePointData) {
        let p = parse_problem(text, "test").unwrap();
        let pt = match &p.point {
            Some(pt) => pt.clone(),
            None => crate::locus::locate_point(&p.gf, None, 32).unwrap(),
        };
        let mp = analyze_point(&p.gf, &pt, Some(32)).unwrap();
        (p.gf, mp)
    }

    const LEMNISCATE: &str = r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "19 - 20*x - 20*y + 5*x^2 + 14*x*y + 5*y^2 - 2*x^2*y - 2*x*y^2 + x^2*y^2"
"#;

    const DICE: &str = r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "(1 - x/3 - 2*y/3)*(1 - 2*x/3 - y/3)"
denominator_factors = ["1 - x/3 - 2*y/3", "1 - 2*x/3 - y/3"]
"#;

    const PLANES: &str = r#"
[gf]
variables = ["x", "y", "z"]
numerator = "16"
denominator = "(4 - 2*x - y - z)*(4 - x - 2*y - z)"
denominator_factors = ["4 - 2*x - y - z", "4 - x - 2*y - z"]

[point]
coordinates = [1, 1, 1]
"#;

    const CURVES: &str = r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "(1 - (2*x + y)/3)*(1 - (x + y)/2)*(1 - (x + 2*y)/3)"
denominator_factors = ["1 - (2*x + y)/3", "1 - (x + y)/2", "1 - (x + 2*y)/3"]

[point]
coordinates = [1, 1]
"#;

    const TANGENT: &str = r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "(1 - y*(1 + x)/2)*(1 - y*(4 + x + x^2)/6)"
denominator_factors = ["1 - y*(1 + x)/2", "1 - y*(4 + x + x^2)/6"]

[point]
coordinates = [1, 1]
"#;

    fn r(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn lemniscate_interior_and_boundary() {
        let (gf, mp) = setup(LEMNISCATE);
        let res = leading_term(&gf, &mp, &r(&[1, 1]), &EngineOptions::default()).unwrap();
        assert_eq!(res.theorem, Method::DoublePoint2d);
        assert_eq!(res.leading, Leading::Constant { value: 1.0 / 6.0, exact: Some(q(1, 6)) });
        assert_eq!(res.diagnostics.det_hess, Some(qi(-36)));
        let b = leading_term(&gf, &mp, &r(&[2, 1]), &EngineOptions::default()).unwrap();
        assert!(b.boundary_halved);
        assert_eq!(b.leading, Leading::Power { b0: 1.0 / 12.0, power: 0.0 });
        let out = leading_term(&gf, &mp, &r(&[3, 1]), &EngineOptions::default());
        assert!(matches!(out, Err(Error::OutsideCone(_))));
    }

    #[test]
    fn dice_both_paths_give_three() {
        let (gf, mp) = setup(DICE);
        let (a, ea) = double_point_constant(&gf, &mp).unwrap();
        let c = direction_matrix(&mp.sheets, &mp.point).unwrap();
        let (b, eb) = completely_nondegenerate_constant(&mp, &c).unwrap();
        assert_eq!(ea, Some(qi(3)));
        assert_eq!(eb, Some(qi(3)));
        assert!((a - b).abs() < 1e-12);
        let res = leading_term(&gf, &mp, &r(&[1, 1]), &EngineOptions::default()).unwrap();
        assert!((evaluate_prediction(&res, &r(&[100, 100])).unwrap() - 3.0).abs() < 1e-12);
        assert!(evaluate_prediction(&res, &r(&[0, 0])).is_err());
    }

    #[test]
    fn dice_transverse_matches_constant() {
        let (_, mp) = setup(DICE);
        let c = direction_matrix(&mp.sheets, &mp.point).unwrap();
        let mut diag = Diagnostics::default();
        let b0 = transverse_coefficient(&mp, &c, &r(&[1, 1]), &mut diag).unwrap();
        assert!((b0 - C64::new(3.0, 0.0)).norm() < 1e-10, "{b0}");
    }

    #[test]
    fn planes_transverse() {
        let (gf, mp) = setup(PLANES);
        assert_eq!(mp.phi, qi(16));
        let dir = vec![q(3, 2), q(3, 2), qi(1)];
        let res = leading_term(&gf, &mp, &dir, &EngineOptions::default()).unwrap();
        assert_eq!(res.theorem, Method::Transverse);
        let want = 16.0 / (24.0 * std::f64::consts::PI).sqrt();
        match res.leading {
            Leading::Power { b0, power } => {
                assert!((b0 - want).abs() < 1e-10);
                assert_eq!(power, -0.5);
            }
            ref other => panic!("{other:?}"),
        }
        assert!((res.diagnostics.det_m.unwrap() - C64::new(6.0, 0.0)).norm() < 1e-9);
        let v = evaluate_prediction(&res, &r(&[90, 90, 60])).unwrap();
        assert!((v - 16.0 / (24.0 * std::f64::consts::PI * 60.0).sqrt()).abs() < 1e-12);
        assert!((v - 0.23788).abs() < 1e-5);
        assert!(evaluate_prediction(&res, &r(&[80, 90, 60])).is_err());
        let wall = leading_term(&gf, &mp, &r(&[2, 1, 1]), &EngineOptions::default());
        assert!(matches!(wall, Err(Error::BoundaryUnsupported(_))));
    }

    #[test]
    fn planes_det_m_is_direction_invariant() {
        let (_, mp) = setup(PLANES);
        let c = direction_matrix(&mp.sheets, &mp.point).unwrap();
        for t in 1..10 {
            let a = q(t, 10);
            let delta = vec![&a * qi(2) + (qi(1) - &a), &a + (qi(1) - &a) * qi(2), qi(1)];
            let mut diag = Diagnostics::default();
            transverse_coefficient(&mp, &c, &delta, &mut diag).unwrap();
            assert!((diag.det_m.unwrap() - C64::new(6.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn three_curves_piecewise() {
        let (gf, mp) = setup(CURVES);
        assert_eq!(mp.phi, qi(9));
        let res = leading_term(&gf, &mp, &[q(3, 4), qi(1)], &EngineOptions::default()).unwrap();
        assert_eq!(res.theorem, Method::NondegeneratePiecewise);
        match res.leading {
            Leading::Power { b0, power } => {
                assert_eq!(power, 1.0);
                assert!((b0 - 9.0 * (2.0 / 3.0) / 2.0).abs() < 1e-12);
            }
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn piecewise_examples() {
        let p = piecewise_polynomial_3curves([q(1, 2), qi(1), qi(2)], qi(1)).unwrap();
        assert_eq!(p.eval(&qi(3), &qi(4)).unwrap(), q(8, 3));
        let left = &qi(2) * (qi(1) - q(1, 2)) / ((qi(1) - q(1, 2)) * (qi(2) - q(1, 2)));
        let right = &qi(2) * (qi(2) - qi(1)) / ((qi(2) - qi(1)) * (qi(2) - q(1, 2)));
        assert_eq!(left, right);
        assert_eq!(p.eval(&qi(5), &qi(5)).unwrap(), left * qi(5));
        assert_eq!(p.eval(&qi(1), &qi(2)).unwrap(), qi(0));
        assert_eq!(p.eval(&qi(4), &qi(2)).unwrap(), qi(0));
        assert!(piecewise_polynomial_3curves([qi(1), q(1, 2), qi(2)], qi(1)).is_err());
    }

    #[test]
    fn order_m_examples() {
        let (b, p) = tangent_2d_order_m(1.0, 4.0, 1.0, 1, 2).unwrap();
        assert!((b - 1.0 / (3.0 * std::f64::consts::PI.sqrt())).abs() < 1e-14);
        assert_eq!(p, 0.5);
        for m in [2u32, 4, 6] {
            let (b, _) = tangent_2d_order_m(0.3, 0.3, 2.0, 1, m).unwrap();
            let want = 2.0 * gamma(1.0 / m as f64) / (2.0 * std::f64::consts::PI * 0.3f64.powf(1.0 / m as f64));
            assert!((b - want).abs() < 1e-13);
        }
        assert!(tangent_2d_order_m(1.0, 2.0, 1.0, 1, 3).is_err());
        let ratio = tangent_2d_example_constant(1.0, 4.0, 1.0) / b_of(1.0, 4.0);
        assert!((ratio - 2f64.sqrt()).abs() < 1e-14);
    }

    fn b_of(d0: f64, d1: f64) -> f64 {
        tangent_2d_order_m(d0, d1, 1.0, 1, 2).unwrap().0
    }

    #[test]
    fn tangent_two_sheets() {
        let (gf, mp) = setup(TANGENT);
        let res = leading_term(&gf, &mp, &r(&[1, 2]), &EngineOptions::default()).unwrap();
        assert_eq!(res.theorem, Method::Tangent2dOrderM);
        let [d0, d1] = res.diagnostics.tangent_d.unwrap();
        assert!((d0 - 1.0 / 8.0).abs() < 1e-14 && (d1 - 7.0 / 24.0).abs() < 1e-14);
        let phi = q_to_f64(&mp.phi);
        let want = phi / (std::f64::consts::PI.sqrt() * (d0.sqrt() + d1.sqrt()));
        match res.leading {
            Leading::Power { b0, power } => {
                assert!((b0 - want).abs() < 1e-14);
                assert_eq!(power, 0.5);
            }
            ref other => panic!("{other:?}"),
        }
        assert!(res.warnings.iter().any(|w| w == TANGENT_EXAMPLE_WARNING));
        assert!(!res.warnings.iter().any(|w| w.contains("disagree")));
        assert!(leading_term(&gf, &mp, &r(&[1, 1]), &EngineOptions::default()).is_err());
    }

    #[test]
    fn nonminimal_point_is_refused() {
        let (gf, mp) = setup(
            r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "(1 - 2*x)*(1 - x/3 - 2*y/3)*(1 - 2*x/3 - y/3)"
denominator_factors = ["1 - 2*x", "1 - x/3 - 2*y/3", "1 - 2*x/3 - y/3"]

[point]
coordinates = [1, 1]
"#,
        );
        let err = leading_term(&gf, &mp, &r(&[1, 1]), &EngineOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotMinimal { .. }));
        let forced = EngineOptions { allow_nonminimal: true, ..Default::default() };
        let res = leading_term(&gf, &mp, &r(&[1, 1]), &forced).unwrap();
        assert!(res.warnings.iter().any(|w| w.contains("minimality check failed")));
        assert_eq!(mp.point, PointSpec::new(r(&[1, 1])).unwrap());
    }
}
