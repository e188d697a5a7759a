use rayon::prelude::*;

use crate::model::PointSpec;
use crate::poly::{univariate, MPoly};
use crate::{C64, Q};

/// Outcome of the sampling check for strict minimality. A pass is a
/// heuristic statement about the sampled points only.
#[derive(Debug, Clone, PartialEq)]
pub enum Minimality {
    /// Every sampled root lay strictly outside the polydisk; `margin` is the
    /// smallest observed `|w|/|w*| - 1`.
    HeuristicallyStrictlyMinimal { margin: f64, samples: usize },
    /// A sampled point of the variety inside the closed polydisk.
    Failed { witness: Vec<C64> },
    Unchecked,
}

impl Minimality {
    pub fn passed(&self) -> bool {
        matches!(self, Minimality::HeuristicallyStrictlyMinimal { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Minimality::HeuristicallyStrictlyMinimal { .. } => "heuristically_strictly_minimal",
            Minimality::Failed { .. } => "failed",
            Minimality::Unchecked => "unchecked",
        }
    }
}

const RADIAL_SHELLS: usize = 8;
const MAX_SAMPLES: usize = 400_000;
const MARGIN_TOL: f64 = 1e-9;

/// `H` grouped by powers of the last variable: entry `k` is the coefficient
/// of `w^k` as a polynomial in the remaining variables (with `w` set to 1).
fn split_by_last(h: &MPoly) -> Vec<MPoly<C64>> {
    let n = h.nvars();
    let w = n - 1;
    let deg = h.degree_in(w) as usize;
    let mut parts: Vec<Vec<(Vec<u32>, C64)>> = vec![Vec::new(); deg + 1];
    for (m, c) in h.terms() {
        let mut e = m.exponents().to_vec();
        let k = e[w] as usize;
        e[w] = 0;
        parts[k].push((e, C64::new(crate::poly::q_to_f64(c), 0.0)));
    }
    parts
        .into_iter()
        .map(|t| MPoly::from_terms(n, t))
        .collect()
}

/// Samples the torus through `ẑ*` on a `grid^d` angular grid and eight inner
/// radial shells plus the origin, and checks that every root `w` of
/// `H(ẑ, ·)` satisfies `|w| > |w*|`, ignoring the point itself.
pub fn check_strict_minimality(h: &MPoly, point: &PointSpec, grid: u32) -> Minimality {
    let n = h.nvars();
    let d = n - 1;
    let zhat: Vec<f64> = point.head().iter().map(crate::poly::q_to_f64).collect();
    let wstar = crate::poly::q_to_f64(point.last());
    let wabs = wstar.abs();
    let parts = split_by_last(h);

    // cap the total sample count in higher dimensions
    let mut g = grid.max(1) as usize;
    while g > 4 && g.pow(d as u32) * (RADIAL_SHELLS + 1) > MAX_SAMPLES {
        g -= 1;
    }
    let per_shell = g.pow(d as u32);
    let total = per_shell * RADIAL_SHELLS + 1;

    let sample = |idx: usize| -> (Vec<C64>, bool) {
        if idx == total - 1 {
            return (vec![C64::new(0.0, 0.0); n], false);
        }
        let shell = idx / per_shell;
        let mut rest = idx % per_shell;
        let rho = 1.0 - shell as f64 / RADIAL_SHELLS as f64;
        let mut z = Vec::with_capacity(n);
        let mut at_point = shell == 0;
        for zk in &zhat {
            let a = rest % g;
            rest /= g;
            if a != 0 {
                at_point = false;
            }
            let theta = 2.0 * std::f64::consts::PI * a as f64 / g as f64;
            z.push(C64::from_polar(rho * zk.abs(), theta) * zk.signum());
        }
        z.push(C64::new(1.0, 0.0));
        (z, at_point)
    };

    // (margin, violation) per sample; reduction below is order independent
    let results: Vec<(f64, Option<Vec<C64>>)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (z, at_point) = sample(idx);
            let coeffs: Vec<C64> = parts.iter().map(|p| p.eval(&z).unwrap()).collect();
            let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if scale == 0.0 || coeffs.iter().all(|c| c.norm() <= 1e-14 * scale.max(1.0)) {
                // H(ẑ, ·) vanishes identically: the whole fibre is in V
                let mut w = z.clone();
                w[d] = C64::new(wstar, 0.0);
                return (f64::NEG_INFINITY, Some(w));
            }
            let mut margin = f64::INFINITY;
            let mut bad = None;
            let roots = if at_point {
                deflated_roots_at_point(h, point)
            } else {
                univariate::complex_roots(&coeffs)
            };
            for r in roots {
                let m = r.norm() / wabs - 1.0;
                if m < margin {
                    margin = m;
                }
                if m <= MARGIN_TOL && bad.is_none() {
                    let mut w = z.clone();
                    w[d] = r;
                    bad = Some(w);
                }
            }
            (margin, bad)
        })
        .collect();

    let margin = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    // the deepest violation is the most convincing witness
    let worst = results
        .into_iter()
        .filter_map(|(m, w)| w.map(|w| (m, w)))
        .fold(None, |acc: Option<(f64, Vec<C64>)>, (m, w)| match acc {
            Some((am, aw)) if am <= m => Some((am, aw)),
            _ => Some((m, w)),
        });
    if let Some((_, witness)) = worst {
        return Minimality::Failed { witness };
    }
    Minimality::HeuristicallyStrictlyMinimal {
        margin,
        samples: total,
    }
}

/// Roots of `H(ẑ*, ·)` other than `w*`, after dividing out `(w − w*)^m`
/// exactly; a numerically clustered multiple root would otherwise pose as
/// nearby roots.
fn deflated_roots_at_point(h: &MPoly, point: &PointSpec) -> Vec<C64> {
    let w = h.nvars() - 1;
    let Ok(mut uni) = h.restrict_to_var(w, point.coords()) else {
        return Vec::new();
    };
    let lin = vec![-point.last().clone(), Q::from_integer(1.into())];
    loop {
        let t = univariate::trim(uni.clone());
        if t.len() <= 1 {
            break;
        }
        let (quot, rem) = univariate::div_rem(&t, &lin);
        if !univariate::trim(rem).is_empty() {
            break;
        }
        uni = quot;
    }
    let coeffs: Vec<C64> = uni
        .iter()
        .map(|c| C64::new(crate::poly::q_to_f64(c), 0.0))
        .collect();
    univariate::complex_roots(&coeffs)
}

/// Radius of the largest punctured disc about `w*` free of other roots of
/// `H(ẑ*, ·)`, halved.
pub fn isolation_radius(h: &MPoly, point: &PointSpec) -> Option<f64> {
    let w = h.nvars() - 1;
    let uni: Vec<Q> = h.restrict_to_var(w, point.coords()).ok()?;
    let coeffs: Vec<C64> = uni
        .iter()
        .map(|c| C64::new(crate::poly::q_to_f64(c), 0.0))
        .collect();
    let wstar = crate::poly::q_to_f64(point.last());
    univariate::complex_roots(&coeffs)
        .into_iter()
        .map(|r| (r - wstar).norm())
        .filter(|&dist| dist > 1e-6 * wstar.abs().max(1.0))
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))))
        .map(|r| r / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_polynomial;
    use crate::poly::qi;

    fn p(text: &str, vars: &[&str]) -> MPoly {
        let v: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        parse_polynomial(text, &v).unwrap()
    }

    fn one_one() -> PointSpec {
        PointSpec::new(vec![qi(1), qi(1)]).unwrap()
    }

    #[test]
    fn lemniscate_passes() {
        let h = p(
            "19 - 20*x - 20*y + 5*x^2 + 14*x*y + 5*y^2 - 2*x^2*y - 2*x*y^2 + x^2*y^2",
            &["x", "y"],
        );
        let m = check_strict_minimality(&h, &one_one(), 64);
        assert!(m.passed(), "{m:?}");
    }

    #[test]
    fn dice_passes() {
        let h = p("(1 - x/3 - 2*y/3)*(1 - 2*x/3 - y/3)", &["x", "y"]);
        let m = check_strict_minimality(&h, &one_one(), 64);
        match m {
            Minimality::HeuristicallyStrictlyMinimal { margin, samples } => {
                assert!(margin > 0.0);
                assert_eq!(samples, 64 * 8 + 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn planes_pass() {
        let h = p("(4 - 2*x - y - z)*(4 - x - 2*y - z)", &["x", "y", "z"]);
        let pt = PointSpec::new(vec![qi(1), qi(1), qi(1)]).unwrap();
        assert!(check_strict_minimality(&h, &pt, 32).passed());
    }

    #[test]
    fn non_minimal_point_fails_at_half() {
        let h = p("(1 - 2*x)*(1 - y)", &["x", "y"]);
        match check_strict_minimality(&h, &one_one(), 64) {
            // the fibre over x = 1/2 lies entirely in V
            Minimality::Failed { witness } => {
                assert_eq!(witness.len(), 2);
                assert!((witness[0] - C64::new(0.5, 0.0)).norm() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn isolation_radius_of_planes() {
        let h = p("(1 - x/3 - 2*y/3)*(1 - 2*x/3 - y/3)*(1 - y/3)", &["x", "y"]);
        let r = isolation_radius(&h, &one_one()).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }
}
