use crate::model::PointSpec;
use crate::poly::{q_to_f64, MPoly};
use crate::{Error, Result, C64};

/// Numerical evaluation of one sheet `v_j = 1/u_j` at complex points, by
/// continuation of the root `u_j` of the factor from `ẑ*`.
#[derive(Debug, Clone)]
pub struct SheetFn {
    factor: MPoly<C64>,
    dfactor: MPoly<C64>,
    zhat: Vec<C64>,
    wstar: C64,
}

const STEPS: usize = 32;

impl SheetFn {
    pub fn new(factor: &MPoly, point: &PointSpec) -> SheetFn {
        let w = factor.nvars() - 1;
        let f = factor.to_complex();
        SheetFn {
            dfactor: f.diff(w, 1),
            factor: f,
            zhat: point.head().iter().map(|c| C64::new(q_to_f64(c), 0.0)).collect(),
            wstar: C64::new(q_to_f64(point.last()), 0.0),
        }
    }

    fn newton(&self, z: &mut [C64], mut w: C64) -> Result<C64> {
        let d = z.len() - 1;
        for _ in 0..30 {
            z[d] = w;
            let f = self.factor.eval(z)?;
            let df = self.dfactor.eval(z)?;
            if df.norm() == 0.0 {
                return Err(Error::NonConvergence("sheet continuation hit a branch point".into()));
            }
            let step = f / df;
            w -= step;
            if step.norm() <= 1e-15 * w.norm().max(1.0) {
                return Ok(w);
            }
        }
        z[d] = w;
        let f = self.factor.eval(z)?;
        if f.norm() < 1e-10 {
            Ok(w)
        } else {
            Err(Error::NonConvergence("sheet continuation".into()))
        }
    }

    /// `u_j` along the path `t ↦ path(t)`, `t ∈ [0, 1]`, with `path(0) = ẑ*`.
    pub fn u_along(&self, path: impl Fn(f64) -> Vec<C64>) -> Result<C64> {
        let mut w = self.wstar;
        for k in 1..=STEPS {
            let mut z = path(k as f64 / STEPS as f64);
            z.push(w);
            w = self.newton(&mut z, w)?;
        }
        Ok(w)
    }

    /// `v_j(ẑ* e^{iθ})`.
    pub fn v_at_angles(&self, theta: &[f64]) -> Result<C64> {
        let u = self.u_along(|t| {
            self.zhat
                .iter()
                .zip(theta)
                .map(|(z, th)| z * C64::from_polar(1.0, t * th))
                .collect()
        })?;
        Ok(1.0 / u)
    }

    /// `v_j(ẑ)` by straight-line continuation from `ẑ*`.
    pub fn v_at(&self, zhat: &[C64]) -> Result<C64> {
        let u = self.u_along(|t| {
            self.zhat
                .iter()
                .zip(zhat)
                .map(|(a, b)| a + (b - a) * t)
                .collect()
        })?;
        Ok(1.0 / u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_polynomial;
    use crate::poly::qi;

    #[test]
    fn dice_sheet_matches_closed_form() {
        let f = parse_polynomial("1 - x/3 - 2*y/3", &["x".into(), "y".into()]).unwrap();
        let s = SheetFn::new(&f, &PointSpec::new(vec![qi(1), qi(1)]).unwrap());
        let th = 0.7;
        let x = C64::from_polar(1.0, th);
        let want = 2.0 / (3.0 - x);
        assert!((s.v_at_angles(&[th]).unwrap() - want).norm() < 1e-13);
        let z = C64::new(0.3, 0.2);
        assert!((s.v_at(&[z]).unwrap() - 2.0 / (3.0 - z)).norm() < 1e-13);
    }

    #[test]
    fn quadratic_sheet_follows_branch() {
        // u^2 - x = 0 near (1, 1): u = sqrt(x)
        let f = parse_polynomial("y^2 - x", &["x".into(), "y".into()]).unwrap();
        let s = SheetFn::new(&f, &PointSpec::new(vec![qi(1), qi(1)]).unwrap());
        let v = s.v_at_angles(&[1.0]).unwrap();
        assert!((v - C64::from_polar(1.0, -0.5)).norm() < 1e-12);
    }
}
