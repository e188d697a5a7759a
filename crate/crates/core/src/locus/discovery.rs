use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::model::PointSpec;
use crate::poly::{q_to_f64, univariate, MPoly};
use crate::{Error, Result, C64, Q};

/// Solutions of `H = H_z = H_w = 0` for a bivariate `H`.
#[derive(Debug, Clone, Default)]
pub struct DoublePointSearch {
    /// Real points in the open positive quadrant whose coordinates are
    /// rational (verified exactly).
    pub points: Vec<PointSpec>,
    /// Real positive solutions that did not rationalize.
    pub irrational: Vec<[f64; 2]>,
    /// Every other solution (complex, or with a nonpositive coordinate).
    pub other: Vec<[C64; 2]>,
}

fn coeffs_in_y(p: &MPoly, x: &Q) -> Vec<Q> {
    // formal degree in y is kept so that specializing x commutes with the
    // Sylvester determinant
    let deg = p.degree_in(1) as usize;
    let mut out = vec![Q::zero(); deg + 1];
    for (m, c) in p.terms() {
        let e = m.exponents();
        out[e[1] as usize] += c * x.pow(e[0] as i32);
    }
    out
}

/// `Res_y(a, b)` as a polynomial in `x`, by evaluation at integer nodes and
/// exact interpolation.
fn resultant_in_x(a: &MPoly, b: &MPoly) -> Vec<Q> {
    let bound = a.degree_in(1) * b.total_degree() + b.degree_in(1) * a.total_degree();
    let xs: Vec<Q> = (0..=bound as i64).map(|i| Q::from_integer(BigInt::from(i))).collect();
    let ys: Vec<Q> = xs
        .iter()
        .map(|x| univariate::sylvester_resultant(&coeffs_in_y(a, x), &coeffs_in_y(b, x)))
        .collect();
    univariate::interpolate(&xs, &ys)
}

fn newton_2d(hx: &MPoly<C64>, hy: &MPoly<C64>, mut p: [C64; 2]) -> [C64; 2] {
    // Newton on (H_x, H_y): the Jacobian is the Hessian of H, nonsingular at
    // an ordinary double point
    let hxx = hx.diff(0, 1);
    let hxy = hx.diff(1, 1);
    let hyy = hy.diff(1, 1);
    for _ in 0..50 {
        let e = |q: &MPoly<C64>| q.eval(&p).unwrap();
        let (fx, fy) = (e(hx), e(hy));
        let (a, b, d) = (e(&hxx), e(&hxy), e(&hyy));
        let det = a * d - b * b;
        if det.norm() < 1e-300 {
            break;
        }
        let dx = (d * fx - b * fy) / det;
        let dy = (a * fy - b * fx) / det;
        p = [p[0] - dx, p[1] - dy];
        if dx.norm() + dy.norm() < 1e-16 * (1.0 + p[0].norm() + p[1].norm()) {
            break;
        }
    }
    p
}

/// Best rational approximation with bounded denominator (continued fractions).
fn rationalize(x: f64, max_den: i64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-13 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Q::new(BigInt::from(h1), BigInt::from(k1)))
}

/// All common zeros of `H`, `H_z` and `H_w` for bivariate `H`, by resultant
/// elimination of `w`, exact gcd, numeric root finding and back-substitution,
/// refined by Newton's method.
pub fn find_double_points_2d(h: &MPoly) -> Result<DoublePointSearch> {
    if h.nvars() != 2 {
        return Err(Error::Unsupported(
            "automatic point discovery needs exactly two variables; supply [point]".into(),
        ));
    }
    let hx = h.diff(0, 1);
    let hy = h.diff(1, 1);
    let mut out = DoublePointSearch::default();
    if h.degree_in(1) == 0 {
        return Err(Error::Unsupported(
            "H does not depend on the last variable".into(),
        ));
    }
    let r1 = resultant_in_x(h, &hy);
    let r2 = resultant_in_x(&hx, &hy);
    let g = univariate::gcd(&r1, &r2);
    if r1.is_empty() && r2.is_empty() {
        return Err(Error::Unsupported(
            "the singular set is positive-dimensional".into(),
        ));
    }
    if g.len() <= 1 {
        return Ok(out);
    }
    let gc: Vec<C64> = g.iter().map(|c| C64::new(q_to_f64(c), 0.0)).collect();
    let xs = univariate::complex_roots(&gc);
    let hc = h.to_complex();
    let hxc = hx.to_complex();
    let hyc = hy.to_complex();
    let mut found: Vec<[C64; 2]> = Vec::new();
    for x in xs {
        let ycoeffs = hc.restrict_to_var(1, &[x, C64::zero()])?;
        for y in univariate::complex_roots(&ycoeffs) {
            let p = newton_2d(&hxc, &hyc, [x, y]);
            let scale = 1.0 + p[0].norm() + p[1].norm();
            let res = [&hc, &hxc, &hyc]
                .iter()
                .map(|q| q.eval(&p).unwrap().norm())
                .fold(0.0, f64::max);
            if res > 1e-8 * scale.powi(h.total_degree() as i32) {
                continue;
            }
            let dup = found
                .iter()
                .any(|f| (f[0] - p[0]).norm() + (f[1] - p[1]).norm() < 1e-7 * scale);
            if !dup {
                found.push(p);
            }
        }
    }
    for p in found {
        let real = p.iter().all(|c| c.im.abs() <= 1e-9 * (1.0 + c.re.abs()));
        if real && p[0].re > 0.0 && p[1].re > 0.0 {
            let exact = rationalize(p[0].re, 1_000_000).zip(rationalize(p[1].re, 1_000_000));
            let verified = exact.filter(|(a, b)| {
                let pt = [a.clone(), b.clone()];
                [h, &hx, &hy]
                    .iter()
                    .all(|q| q.eval(&pt).map(|v| v.is_zero()).unwrap_or(false))
            });
            match verified {
                Some((a, b)) if a.is_positive() && b.is_positive() => {
                    out.points.push(PointSpec::new(vec![a, b])?)
                }
                _ => out.irrational.push([p[0].re, p[1].re]),
            }
        } else {
            out.other.push(p);
        }
    }
    out.points.sort_by(|a, b| a.coords().cmp(b.coords()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_polynomial;
    use crate::poly::qi;

    fn p(text: &str) -> MPoly {
        parse_polynomial(text, &["x".to_string(), "y".to_string()]).unwrap()
    }

    #[test]
    fn lemniscate_has_one_double_point() {
        let r = find_double_points_2d(&p(
            "19 - 20*x - 20*y + 5*x^2 + 14*x*y + 5*y^2 - 2*x^2*y - 2*x*y^2 + x^2*y^2",
        ))
        .unwrap();
        assert_eq!(r.points, vec![PointSpec::new(vec![qi(1), qi(1)]).unwrap()]);
        assert!(r.irrational.is_empty());
    }

    #[test]
    fn dice_double_point() {
        let r = find_double_points_2d(&p("(1 - x/3 - 2*y/3)*(1 - 2*x/3 - y/3)")).unwrap();
        assert_eq!(r.points, vec![PointSpec::new(vec![qi(1), qi(1)]).unwrap()]);
    }

    #[test]
    fn smooth_line_has_none() {
        let r = find_double_points_2d(&p("1 - x - y")).unwrap();
        assert!(r.points.is_empty() && r.irrational.is_empty() && r.other.is_empty());
    }

    #[test]
    fn nodal_cubic() {
        let r = find_double_points_2d(&p("(y - 2)^2 - (x - 2)^2*(x - 1)")).unwrap();
        assert_eq!(r.points, vec![PointSpec::new(vec![qi(2), qi(2)]).unwrap()]);
    }

    #[test]
    fn irrational_points_reported_numerically() {
        // two parabolas crossing at (±sqrt 2, ±sqrt 2)
        let r = find_double_points_2d(&p("(y - x)^2 - (x^2 - 2)^2")).unwrap();
        assert!(r.points.is_empty());
        let s = 2f64.sqrt();
        assert_eq!(r.irrational.len(), 1);
        assert!((r.irrational[0][0] - s).abs() < 1e-12 && (r.irrational[0][1] - s).abs() < 1e-12);
        assert!(r
            .other
            .iter()
            .any(|q| (q[0].re + s).abs() < 1e-10 && (q[1].re + s).abs() < 1e-10));
    }

    #[test]
    fn rejects_three_variables() {
        let h = parse_polynomial(
            "1 - x - y - z",
            &["x".to_string(), "y".to_string(), "z".to_string()],
        )
        .unwrap();
        assert!(matches!(find_double_points_2d(&h), Err(Error::Unsupported(_))));
    }
}
