//! Dense univariate helpers: exact arithmetic over `Q` (gcd, resultants,
//! interpolation) and numeric complex root finding.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::Q;

/// Coefficients low-to-high with trailing zeros removed.
pub fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn eval(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

pub fn derivative(p: &[Q]) -> Vec<Q> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Q::from_integer(k.into()))
        .collect()
}

/// Multiplicity of `x` as a root of `p` (0 when `p(x) != 0`). The zero
/// polynomial has no well-defined multiplicity and yields `None`.
pub fn root_multiplicity(p: &[Q], x: &Q) -> Option<usize> {
    let mut cur = trim(p.to_vec());
    if cur.is_empty() {
        return None;
    }
    let mut m = 0;
    while !cur.is_empty() && eval(&cur, x).is_zero() {
        cur = derivative(&cur);
        m += 1;
    }
    Some(m)
}

/// Quotient and remainder of exact polynomial division.
pub fn div_rem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().unwrap().clone();
    let mut quo = vec![Q::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &c * bc;
        }
        quo[shift] = c;
        r = trim(r);
    }
    (trim(quo), r)
}

/// Monic greatest common divisor; empty when both inputs vanish.
pub fn gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in &mut x {
            *c /= &lead;
        }
    }
    x
}

/// Exact determinant by fraction-free-style Gaussian elimination over `Q`.
pub fn det_exact(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Resultant of two polynomials with the given formal degrees
/// (`a.len() - 1`, `b.len() - 1`), via the Sylvester determinant. Using
/// formal degrees makes the result commute with specialization of
/// coefficients.
pub fn sylvester_resultant(a: &[Q], b: &[Q]) -> Q {
    let m = a.len().saturating_sub(1);
    let n = b.len().saturating_sub(1);
    if m == 0 && n == 0 {
        return Q::one();
    }
    let size = m + n;
    let mut s = vec![vec![Q::zero(); size]; size];
    for row in 0..n {
        for (i, c) in a.iter().rev().enumerate() {
            s[row][row + i] = c.clone();
        }
    }
    for row in 0..m {
        for (i, c) in b.iter().rev().enumerate() {
            s[n + row][row + i] = c.clone();
        }
    }
    det_exact(s)
}

/// Lagrange interpolation through `(xs[i], ys[i])`, returned low-to-high.
pub fn interpolate(xs: &[Q], ys: &[Q]) -> Vec<Q> {
    let n = xs.len();
    let mut out = vec![Q::zero(); n];
    for i in 0..n {
        // basis polynomial prod_{j != i} (x - x_j) / (x_i - x_j)
        let mut basis = vec![Q::one()];
        let mut denom = Q::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut next = vec![Q::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * &xs[j];
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let w = &ys[i] / denom;
        for (k, c) in basis.iter().enumerate() {
            out[k] += c * &w;
        }
    }
    trim(out)
}

fn eval_c(p: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::zero();
    let mut d = Complex64::zero();
    for c in p.iter().rev() {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}

/// All complex roots of `p` (low-to-high coefficients), by closed forms for
/// degree <= 2 and Aberth-Ehrlich iteration with Newton polishing above.
pub fn complex_roots(p: &[Complex64]) -> Vec<Complex64> {
    let mut p = p.to_vec();
    while p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    let deg = p.len().saturating_sub(1);
    match deg {
        0 => Vec::new(),
        1 => vec![-p[0] / p[1]],
        2 => {
            let (a, b, c) = (p[2], p[1], p[0]);
            let disc = (b * b - 4.0 * a * c).sqrt();
            // pick the sign that avoids cancellation
            let q = if (b.conj() * disc).re >= 0.0 {
                -0.5 * (b + disc)
            } else {
                -0.5 * (b - disc)
            };
            if q.norm() == 0.0 {
                vec![Complex64::zero(), Complex64::zero()]
            } else {
                vec![q / a, c / q]
            }
        }
        _ => aberth(&p),
    }
}

fn aberth(p: &[Complex64]) -> Vec<Complex64> {
    let deg = p.len() - 1;
    let lead = p[deg];
    // Fujiwara-type radius bound.
    let radius = (0..deg)
        .map(|k| (p[k] / lead).norm().powf(1.0 / (deg - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / deg as f64 + 0.4;
            Complex64::from_polar(radius, ang)
        })
        .collect();
    for _ in 0..800 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let (v, d) = eval_c(p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let sum: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::zero()
                    } else {
                        Complex64::one() / diff
                    }
                })
                .sum();
            let step = ratio / (Complex64::one() - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let (v, d) = eval_c(p, *zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    z
}
