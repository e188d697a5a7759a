//! Multiple points of the singular variety: discovery, local sheet data,
//! `φ`, and the sampling check for strict minimality.

pub mod discovery;
pub mod jets;
pub mod minimality;
pub mod sheet;

use num_traits::Zero;

pub use discovery::{find_double_points_2d, DoublePointSearch};
pub use jets::{
    compute_phi, double_point_local_2d, multiplicity_at, sheet_jets, DoublePointLocal, Jets,
    SheetJet,
};
pub use minimality::{check_strict_minimality, isolation_radius, Minimality};
pub use sheet::SheetFn;

use crate::model::{PointSpec, RationalGF};
use crate::poly::MPoly;
use crate::{Error, Result, Q};

/// Everything the engine needs to know about one multiple point.
#[derive(Debug, Clone)]
pub struct MultiplePointData {
    pub point: PointSpec,
    /// `n + 1`.
    pub multiplicity: usize,
    pub sheets: Jets,
    /// The vanishing denominator factors, one per sheet, when known.
    pub sheet_factors: Option<Vec<MPoly>>,
    pub phi: Q,
    pub minimality: Minimality,
    pub double_point: Option<DoublePointLocal>,
    /// Notes about unverified or violated local conditions.
    pub flags: Vec<String>,
}

impl MultiplePointData {
    pub fn n(&self) -> usize {
        self.multiplicity - 1
    }

    pub fn d(&self) -> usize {
        self.point.len() - 1
    }

    /// Numerical sheet functions, available for factored denominators.
    pub fn sheet_fns(&self) -> Option<Vec<SheetFn>> {
        self.sheet_factors
            .as_ref()
            .map(|fs| fs.iter().map(|f| SheetFn::new(f, &self.point)).collect())
    }
}

/// Computes multiplicity, sheet jets and `φ` at `point`, and optionally runs
/// the minimality sampler on a `grid`.
pub fn analyze_point(gf: &RationalGF, point: &PointSpec, grid: Option<u32>) -> Result<MultiplePointData> {
    let h = &gf.denominator;
    point.check_dim(gf.nvars())?;
    let multiplicity = multiplicity_at(h, point)?;
    let n = multiplicity - 1;
    let phi = compute_phi(&gf.numerator, h, point, n)?;
    let mut flags = Vec::new();
    let mut double_point = None;
    let mut sheet_factors = None;

    let sheets = if let Some(factors) = &gf.factors {
        let mut vanishing = Vec::new();
        for f in factors {
            if f.eval(point.coords())?.is_zero() {
                vanishing.push(f.clone());
            }
        }
        let (jets, fl) = sheet_jets(&vanishing, point)?;
        flags.extend(fl);
        if jets.len() != multiplicity {
            return Err(Error::Invalid(format!(
                "{} factors vanish at the point but the multiplicity is {multiplicity}",
                jets.len()
            )));
        }
        sheet_factors = Some(vanishing);
        if gf.nvars() == 2 && multiplicity == 2 {
            double_point = double_point_local_2d(h, point).ok();
        }
        Jets::Exact(jets)
    } else if multiplicity == 1 {
        let (jets, fl) = sheet_jets(std::slice::from_ref(h), point)?;
        flags.extend(fl);
        sheet_factors = Some(vec![h.clone()]);
        Jets::Exact(jets)
    } else if gf.nvars() == 2 && multiplicity == 2 {
        let dp = double_point_local_2d(h, point)?;
        flags.push(
            "no factorization given: absence of extraneous vanishing factors is not verified".into(),
        );
        if dp.degenerate {
            flags.push("the two branches are tangent (zero discriminant)".into());
        }
        let jets = dp.jets(point);
        double_point = Some(dp);
        jets
    } else {
        return Err(Error::Unsupported(format!(
            "multiplicity {multiplicity} in {} variables needs denominator_factors",
            gf.nvars()
        )));
    };

    let minimality = match grid {
        Some(g) => check_strict_minimality(h, point, g),
        None => Minimality::Unchecked,
    };

    Ok(MultiplePointData {
        point: point.clone(),
        multiplicity,
        sheets,
        sheet_factors,
        phi,
        minimality,
        double_point,
        flags,
    })
}

/// Uses the supplied point, or in two variables the discovered rational
/// double point (preferring one that passes the minimality sampler).
pub fn locate_point(gf: &RationalGF, supplied: Option<&PointSpec>, grid: u32) -> Result<PointSpec> {
    if let Some(p) = supplied {
        p.check_dim(gf.nvars())?;
        return Ok(p.clone());
    }
    let found = find_double_points_2d(&gf.denominator)?;
    if found.points.is_empty() {
        let hint = if found.irrational.is_empty() {
            String::new()
        } else {
            format!(
                " (irrational double points found at {:?}; supply [point])",
                found.irrational
            )
        };
        return Err(Error::Unsupported(format!(
            "no rational double point in the positive quadrant{hint}"
        )));
    }
    let pick = found
        .points
        .iter()
        .find(|p| check_strict_minimality(&gf.denominator, p, grid).passed())
        .unwrap_or(&found.points[0]);
    Ok(pick.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_problem;
    use crate::poly::{q, qi};

    #[test]
    fn analyze_dice_with_factors() {
        let p = parse_problem(
            r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "(1 - x/3 - 2*y/3)*(1 - 2*x/3 - y/3)"
denominator_factors = ["1 - x/3 - 2*y/3", "1 - 2*x/3 - y/3"]
"#,
            "dice",
        )
        .unwrap();
        let pt = locate_point(&p.gf, None, 64).unwrap();
        let mp = analyze_point(&p.gf, &pt, Some(64)).unwrap();
        assert_eq!(mp.multiplicity, 2);
        assert_eq!(mp.phi, q(9, 2));
        assert!(mp.minimality.passed());
        assert!(mp.double_point.is_some());
        let j = mp.sheets.exact().unwrap();
        assert_eq!(j[0].grad, vec![q(1, 2)]);
        assert_eq!(j[1].grad, vec![qi(2)]);
    }

    #[test]
    fn analyze_lemniscate_without_factors() {
        let p = parse_problem(
            r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "19 - 20*x - 20*y + 5*x^2 + 14*x*y + 5*y^2 - 2*x^2*y - 2*x*y^2 + x^2*y^2"
"#,
            "lem",
        )
        .unwrap();
        let pt = locate_point(&p.gf, None, 64).unwrap();
        let mp = analyze_point(&p.gf, &pt, None).unwrap();
        assert_eq!(mp.phi, q(1, 4));
        assert_eq!(mp.minimality, Minimality::Unchecked);
        assert!(mp.sheet_factors.is_none());
        assert_eq!(mp.sheets.len(), 2);
        assert!(!mp.flags.is_empty());
    }

    #[test]
    fn multiplicity_three_needs_factors() {
        let p = parse_problem(
            r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "(1 - (2*x + y)/3)*(1 - (x + y)/2)*(1 - (x + 2*y)/3)"

[point]
coordinates = ["1", "1"]
"#,
            "3c",
        )
        .unwrap();
        let err = analyze_point(&p.gf, p.point.as_ref().unwrap(), None).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
