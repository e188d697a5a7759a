use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::model::PointSpec;
use crate::poly::{q_to_f64, univariate, MPoly};
use crate::{Error, Result, Q};

/// Value, gradient and (optionally) Hessian of `v_j = 1/u_j` at `ẑ*`, where
/// the sheet is `z_{d+1} = u_j(ẑ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetJet<T> {
    pub value: T,
    pub grad: Vec<T>,
    pub hess: Option<Vec<Vec<T>>>,
}

impl SheetJet<Q> {
    pub fn to_f64(&self) -> SheetJet<f64> {
        SheetJet {
            value: q_to_f64(&self.value),
            grad: self.grad.iter().map(q_to_f64).collect(),
            hess: self
                .hess
                .as_ref()
                .map(|h| h.iter().map(|r| r.iter().map(q_to_f64).collect()).collect()),
        }
    }
}

/// Sheet jets, exact when every ingredient is rational.
#[derive(Debug, Clone, PartialEq)]
pub enum Jets {
    Exact(Vec<SheetJet<Q>>),
    Approx(Vec<SheetJet<f64>>),
}

impl Jets {
    pub fn len(&self) -> usize {
        match self {
            Jets::Exact(v) => v.len(),
            Jets::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exact(&self) -> Option<&[SheetJet<Q>]> {
        match self {
            Jets::Exact(v) => Some(v),
            Jets::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> Vec<SheetJet<f64>> {
        match self {
            Jets::Exact(v) => v.iter().map(SheetJet::to_f64).collect(),
            Jets::Approx(v) => v.clone(),
        }
    }

    pub fn has_hessians(&self) -> bool {
        match self {
            Jets::Exact(v) => v.iter().all(|j| j.hess.is_some()),
            Jets::Approx(v) => v.iter().all(|j| j.hess.is_some()),
        }
    }
}

fn last(p: &PointSpec) -> usize {
    p.len() - 1
}

/// Multiplicity of `z*_{d+1}` as a root of `z -> H(ẑ*, z)`.
pub fn multiplicity_at(h: &MPoly, point: &PointSpec) -> Result<usize> {
    point.check_dim(h.nvars())?;
    let value = h.eval(point.coords())?;
    if !value.is_zero() {
        return Err(Error::NotOnVariety {
            value: value.to_string(),
        });
    }
    let w = last(point);
    let uni = h.restrict_to_var(w, point.coords())?;
    univariate::root_multiplicity(&uni, point.last()).ok_or_else(|| {
        Error::Unsupported("H vanishes identically along the last coordinate at the point".into())
    })
}

/// `φ(z*) = (n+1)!/(-z*_{d+1})^{n+1} · G(z*)/∂^{n+1}_{z_{d+1}} H(z*)`.
pub fn compute_phi(g: &MPoly, h: &MPoly, point: &PointSpec, n: usize) -> Result<Q> {
    point.check_dim(h.nvars())?;
    let w = last(point);
    let m = (n + 1) as u32;
    let dh = h.diff(w, m).eval(point.coords())?;
    if dh.is_zero() {
        return Err(Error::InconsistentMultiplicity);
    }
    let fact: BigInt = (1..=m).map(BigInt::from).product();
    let denom = (-point.last().clone()).pow(m as i32);
    Ok(Q::from_integer(fact) / denom * g.eval(point.coords())? / dh)
}

/// Jets of the sheets cut out by the given factors, each solved for the last
/// variable by implicit differentiation. Also returns a note for every sheet
/// with a vanishing first derivative.
pub fn sheet_jets(factors: &[MPoly], point: &PointSpec) -> Result<(Vec<SheetJet<Q>>, Vec<String>)> {
    let mut jets = Vec::with_capacity(factors.len());
    let mut flags = Vec::new();
    let at = point.coords();
    for (idx, f) in factors.iter().enumerate() {
        point.check_dim(f.nvars())?;
        let w = last(point);
        let d = w;
        let e = |p: &MPoly| p.eval(at);
        let hw = e(&f.diff(w, 1))?;
        if hw.is_zero() {
            return Err(Error::NotSolvable { index: idx });
        }
        let hww = e(&f.diff(w, 2))?;
        let hk: Vec<Q> = (0..d).map(|k| e(&f.diff(k, 1))).collect::<Result<_>>()?;
        let hkw: Vec<Q> = (0..d)
            .map(|k| e(&f.diff(k, 1).diff(w, 1)))
            .collect::<Result<_>>()?;
        let gu: Vec<Q> = hk.iter().map(|x| -x / &hw).collect();
        let mut hu = vec![vec![Q::zero(); d]; d];
        for k in 0..d {
            for l in k..d {
                let hkl = e(&f.diff(k, 1).diff(l, 1))?;
                let num = hkl + &hkw[k] * &gu[l] + &hkw[l] * &gu[k] + &hww * &gu[k] * &gu[l];
                let val = -num / &hw;
                hu[k][l] = val.clone();
                hu[l][k] = val;
            }
        }
        let v = Q::one() / point.last();
        let v2 = &v * &v;
        let v3 = &v2 * &v;
        let grad: Vec<Q> = gu.iter().map(|g| -&v2 * g).collect();
        let hess: Vec<Vec<Q>> = (0..d)
            .map(|k| {
                (0..d)
                    .map(|l| Q::from_integer(2.into()) * &v3 * &gu[k] * &gu[l] - &v2 * &hu[k][l])
                    .collect()
            })
            .collect();
        for (k, g) in grad.iter().enumerate() {
            if g.is_zero() {
                flags.push(format!(
                    "sheet {idx}: dv/dz_{} vanishes at the point (local factorization condition (ii) fails)",
                    k + 1
                ));
            }
        }
        jets.push(SheetJet {
            value: v,
            grad,
            hess: Some(hess),
        });
    }
    Ok((jets, flags))
}

/// Local data at a double point of a bivariate `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublePointLocal {
    /// Roots `c0 <= c1` of the tangent quadratic, i.e. the cone slopes.
    pub c: [f64; 2],
    pub c_exact: Option<[Q; 2]>,
    pub det_hess: Q,
    pub h_ww: Q,
    /// Equal tangents (zero discriminant).
    pub degenerate: bool,
}

impl DoublePointLocal {
    /// First-order sheet data equivalent to the two roots, so cone code can
    /// treat factored and irreducible inputs alike.
    pub fn jets(&self, point: &PointSpec) -> Jets {
        let z = &point.coords()[0];
        let w = point.last();
        match &self.c_exact {
            Some(c) => Jets::Exact(
                c.iter()
                    .map(|cj| SheetJet {
                        value: Q::one() / w,
                        grad: vec![cj / (z * w)],
                        hess: None,
                    })
                    .collect(),
            ),
            None => {
                let (zf, wf) = (q_to_f64(z), q_to_f64(w));
                Jets::Approx(
                    self.c
                        .iter()
                        .map(|cj| SheetJet {
                            value: 1.0 / wf,
                            grad: vec![cj / (zf * wf)],
                            hess: None,
                        })
                        .collect(),
                )
            }
        }
    }
}

pub(crate) fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Tangent slopes and Hessian determinant at a double point of a bivariate
/// `H`. The slopes are the roots of
/// `w*² H_ww x² − 2 z* w* H_zw x + z*² H_zz`, which at `(1,1)` is the plain
/// Hessian quadratic.
pub fn double_point_local_2d(h: &MPoly, point: &PointSpec) -> Result<DoublePointLocal> {
    if h.nvars() != 2 {
        return Err(Error::Unsupported(format!(
            "double_point_local_2d needs 2 variables, got {}",
            h.nvars()
        )));
    }
    let m = multiplicity_at(h, point)?;
    if m != 2 {
        return Err(Error::Invalid(format!(
            "expected a double point, multiplicity is {m}"
        )));
    }
    let at = point.coords();
    let hzz = h.diff(0, 2).eval(at)?;
    let hzw = h.diff(0, 1).diff(1, 1).eval(at)?;
    let hww = h.diff(1, 2).eval(at)?;
    if hww.is_zero() {
        return Err(Error::Unsupported(
            "H_ww vanishes at the point; swap the variables".into(),
        ));
    }
    let det_hess = &hzz * &hww - &hzw * &hzw;
    let (z, w) = (&at[0], &at[1]);
    let a = w * w * &hww;
    let b = z * w * &hzw;
    let c = z * z * &hzz;
    let disc = &b * &b - &a * &c;
    let degenerate = disc.is_zero();
    let c_exact = rational_sqrt(&disc).map(|s| {
        let r0 = (&b - &s) / &a;
        let r1 = (&b + &s) / &a;
        if r0 <= r1 {
            [r0, r1]
        } else {
            [r1, r0]
        }
    });
    let c_f = match &c_exact {
        Some([r0, r1]) => [q_to_f64(r0), q_to_f64(r1)],
        None => {
            let coeffs = [
                crate::C64::new(q_to_f64(&c), 0.0),
                crate::C64::new(-2.0 * q_to_f64(&b), 0.0),
                crate::C64::new(q_to_f64(&a), 0.0),
            ];
            let mut r: Vec<f64> = univariate::complex_roots(&coeffs)
                .into_iter()
                .map(|x| x.re)
                .collect();
            r.sort_by(f64::total_cmp);
            [r[0], r[1]]
        }
    };
    Ok(DoublePointLocal {
        c: c_f,
        c_exact,
        det_hess,
        h_ww: hww,
        degenerate,
    })
}
