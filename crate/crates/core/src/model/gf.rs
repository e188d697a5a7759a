use num_traits::Zero;

use crate::poly::{q_to_f64, Monomial, MPoly};
use crate::{Error, Result, Q};

/// A rational generating function `F = G/H` in named variables. The last
/// variable is the distinguished one that the local factorization solves for.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalGF {
    pub variables: Vec<String>,
    pub numerator: MPoly,
    pub denominator: MPoly,
    pub factors: Option<Vec<MPoly>>,
}

impl RationalGF {
    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    /// `d`: the number of non-distinguished variables.
    pub fn d(&self) -> usize {
        self.variables.len() - 1
    }

    /// Reorders variables so that `name` becomes the last one.
    pub fn with_last_variable(&self, name: &str) -> Result<RationalGF> {
        let idx = self
            .variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Invalid(format!("unknown variable `{name}`")))?;
        let n = self.nvars();
        let mut order: Vec<usize> = (0..n).filter(|&i| i != idx).collect();
        order.push(idx);
        Ok(self.permute(&order))
    }

    /// New variable `k` is old variable `order[k]`.
    pub fn permute(&self, order: &[usize]) -> RationalGF {
        let perm = |p: &MPoly| -> MPoly {
            MPoly::from_terms(
                p.nvars(),
                p.terms().map(|(m, c)| {
                    let e: Vec<u32> = order.iter().map(|&i| m.exponents()[i]).collect();
                    (e, c.clone())
                }),
            )
        };
        RationalGF {
            variables: order.iter().map(|&i| self.variables[i].clone()).collect(),
            numerator: perm(&self.numerator),
            denominator: perm(&self.denominator),
            factors: self.factors.as_ref().map(|fs| fs.iter().map(perm).collect()),
        }
    }
}

/// A candidate point with exact, nonzero coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSpec(Vec<Q>);

impl PointSpec {
    pub fn new(coords: Vec<Q>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| c.is_zero()) {
            return Err(Error::Invalid(format!("point coordinate {i} is zero")));
        }
        Ok(PointSpec(coords))
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> &Q {
        self.0.last().expect("nonempty point")
    }

    /// All coordinates but the last.
    pub fn head(&self) -> &[Q] {
        &self.0[..self.0.len() - 1]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(q_to_f64).collect()
    }

    pub fn check_dim(&self, nvars: usize) -> Result<()> {
        if self.0.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for PointSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn monomial_text(m: &Monomial, names: &[String]) -> String {
    let parts: Vec<String> = m
        .exponents()
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Checks analyticity at the origin and the factor product identity.
pub fn validate_gf(gf: RationalGF) -> Result<RationalGF> {
    let n = gf.nvars();
    if n < 2 {
        return Err(Error::Invalid(format!(
            "at least two variables are required, got {n}"
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for v in &gf.variables {
        if !seen.insert(v) {
            return Err(Error::Invalid(format!("duplicate variable `{v}`")));
        }
    }
    for p in std::iter::once(&gf.numerator)
        .chain(std::iter::once(&gf.denominator))
        .chain(gf.factors.iter().flatten())
    {
        if p.nvars() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.nvars(),
            });
        }
    }
    if gf.denominator.constant_term().is_zero() {
        return Err(Error::NotAnalyticAtOrigin);
    }
    if let Some(factors) = &gf.factors {
        if factors.is_empty() {
            return Err(Error::Invalid("denominator_factors is empty".into()));
        }
        let product = factors
            .iter()
            .fold(MPoly::one(n), |acc, f| &acc * f);
        let diff = &product - &gf.denominator;
        let lowest = diff
            .terms()
            .map(|(m, _)| m)
            .min_by_key(|m| (m.total_degree(), (*m).clone()));
        if let Some(m) = lowest {
            let m = m.clone();
            return Err(Error::FactorMismatch {
                monomial: monomial_text(&m, &gf.variables),
                product: product.coeff(&m).to_string(),
                denominator: gf.denominator.coeff(&m).to_string(),
            });
        }
    }
    Ok(gf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_polynomial;
    use crate::poly::qi;

    fn vars() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn gf(num: &str, den: &str, factors: Option<&[&str]>) -> RationalGF {
        let v = vars();
        RationalGF {
            numerator: parse_polynomial(num, &v).unwrap(),
            denominator: parse_polynomial(den, &v).unwrap(),
            factors: factors.map(|fs| fs.iter().map(|f| parse_polynomial(f, &v).unwrap()).collect()),
            variables: v,
        }
    }

    #[test]
    fn dice_is_valid_and_idempotent() {
        let g = gf(
            "1",
            "(1 - x/3 - 2*y/3)*(1 - 2*x/3 - y/3)",
            Some(&["1 - x/3 - 2*y/3", "1 - 2*x/3 - y/3"]),
        );
        let once = validate_gf(g.clone()).unwrap();
        assert_eq!(once, g);
        assert_eq!(validate_gf(once.clone()).unwrap(), once);
    }

    #[test]
    fn not_analytic() {
        assert!(matches!(
            validate_gf(gf("1", "x + y", None)),
            Err(Error::NotAnalyticAtOrigin)
        ));
    }

    #[test]
    fn factor_mismatch_reports_coefficient() {
        match validate_gf(gf("1", "1 - x - y", Some(&["1 - x", "1 - y"]))) {
            Err(Error::FactorMismatch {
                monomial,
                product,
                denominator,
            }) => {
                assert_eq!(monomial, "x*y");
                assert_eq!(product, "1");
                assert_eq!(denominator, "0");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn one_variable_rejected() {
        let v = vec!["x".to_string()];
        let g = RationalGF {
            numerator: parse_polynomial("1", &v).unwrap(),
            denominator: parse_polynomial("1 - x", &v).unwrap(),
            factors: None,
            variables: v,
        };
        assert!(matches!(validate_gf(g), Err(Error::Invalid(_))));
    }

    #[test]
    fn permutation_moves_variable_last() {
        let g = gf("x", "1 - 2*x - y", None);
        let p = g.with_last_variable("x").unwrap();
        assert_eq!(p.variables, vec!["y".to_string(), "x".to_string()]);
        assert_eq!(p.denominator.eval(&[qi(1), qi(0)]).unwrap(), qi(0));
        assert_eq!(p.numerator.eval(&[qi(5), qi(3)]).unwrap(), qi(3));
    }

    #[test]
    fn point_rejects_zero() {
        assert!(PointSpec::new(vec![qi(1), qi(0)]).is_err());
        let p = PointSpec::new(vec![qi(1), qi(2)]).unwrap();
        assert_eq!(p.to_string(), "(1, 2)");
    }
}
