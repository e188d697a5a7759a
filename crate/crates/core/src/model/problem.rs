//! TOML problem files.
//!
//! ```toml
//! [gf]
//! variables = ["x", "y"]
//! numerator = "1"
//! denominator = "(1 - x/3 - 2*y/3)*(1 - 2*x/3 - y/3)"
//! denominator_factors = ["1 - x/3 - 2*y/3", "1 - 2*x/3 - y/3"]
//!
//! [point]
//! coordinates = ["1", "1"]
//!
//! [options]
//! oracle_max_total_degree = 200
//! rank_tolerance = 1e-9
//! minimality_grid = 64
//! last_variable = "y"
//! ```

use std::path::Path;

use serde::Deserialize;

use super::gf::{validate_gf, PointSpec, RationalGF};
use super::parser::parse_polynomial;
use crate::poly::parse_rational_or_decimal;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub oracle_max_total_degree: Option<u32>,
    pub rank_tolerance: f64,
    pub minimality_grid: u32,
    pub last_variable: Option<String>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            oracle_max_total_degree: None,
            rank_tolerance: 1e-9,
            minimality_grid: 64,
            last_variable: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub gf: RationalGF,
    pub point: Option<PointSpec>,
    pub options: Options,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    gf: Option<RawGf>,
    point: Option<RawPoint>,
    options: Option<RawOptions>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGf {
    variables: Vec<String>,
    numerator: String,
    denominator: String,
    denominator_factors: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    coordinates: Vec<RawScalar>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    oracle_max_total_degree: Option<u32>,
    rank_tolerance: Option<f64>,
    minimality_grid: Option<u32>,
    last_variable: Option<String>,
}

fn schema(origin: &str, field: &str, message: impl std::fmt::Display) -> Error {
    Error::Schema {
        location: format!("{origin}: {field}"),
        message: message.to_string(),
    }
}

/// Parses problem text; `origin` labels error locations (usually the path).
pub fn parse_problem(text: &str, origin: &str) -> Result<Problem> {
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::Schema {
        location: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let g = raw
        .gf
        .ok_or_else(|| schema(origin, "[gf]", "missing required section"))?;
    let vars = g.variables;
    let poly = |field: &str, text: &str| {
        parse_polynomial(text, &vars).map_err(|e| schema(origin, field, e))
    };
    let numerator = poly("[gf].numerator", &g.numerator)?;
    let denominator = poly("[gf].denominator", &g.denominator)?;
    let factors = match &g.denominator_factors {
        Some(fs) => Some(
            fs.iter()
                .enumerate()
                .map(|(i, f)| poly(&format!("[gf].denominator_factors[{i}]"), f))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let gf = validate_gf(RationalGF {
        variables: vars.clone(),
        numerator,
        denominator,
        factors,
    })
    .map_err(|e| schema(origin, "[gf]", e))?;

    let point = match raw.point {
        Some(p) => {
            let coords = p
                .coordinates
                .iter()
                .enumerate()
                .map(|(i, c)| match c {
                    RawScalar::Int(n) => Ok(crate::Q::from_integer((*n).into())),
                    RawScalar::Text(s) => parse_rational_or_decimal(s).ok_or_else(|| {
                        schema(
                            origin,
                            &format!("[point].coordinates[{i}]"),
                            format!("`{s}` is not a rational number"),
                        )
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            let p = PointSpec::new(coords).map_err(|e| schema(origin, "[point]", e))?;
            p.check_dim(vars.len())
                .map_err(|e| schema(origin, "[point].coordinates", e))?;
            Some(p)
        }
        None => None,
    };

    let mut options = Options::default();
    if let Some(o) = raw.options {
        options.oracle_max_total_degree = o.oracle_max_total_degree;
        if let Some(t) = o.rank_tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(schema(origin, "[options].rank_tolerance", "must be positive"));
            }
            options.rank_tolerance = t;
        }
        if let Some(g) = o.minimality_grid {
            if g == 0 {
                return Err(schema(origin, "[options].minimality_grid", "must be positive"));
            }
            options.minimality_grid = g;
        }
        options.last_variable = o.last_variable;
    }

    let mut problem = Problem { gf, point, options };
    if let Some(name) = problem.options.last_variable.clone() {
        problem = problem
            .with_last_variable(&name)
            .map_err(|e| schema(origin, "[options].last_variable", e))?;
    }
    Ok(problem)
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<Problem> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_problem(&text, &path.display().to_string())
}

impl Problem {
    /// Moves the named variable to the last position, permuting the point
    /// coordinates along with the polynomials.
    pub fn with_last_variable(&self, name: &str) -> Result<Problem> {
        let gf = self.gf.with_last_variable(name)?;
        let point = match &self.point {
            Some(p) => {
                let coords = gf
                    .variables
                    .iter()
                    .map(|v| {
                        let i = self.gf.variables.iter().position(|w| w == v).unwrap();
                        p.coords()[i].clone()
                    })
                    .collect();
                Some(PointSpec::new(coords)?)
            }
            None => None,
        };
        Ok(Problem {
            gf,
            point,
            options: self.options.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qi};

    const LEMNISCATE: &str = r#"
[gf]
variables = ["x", "y"]
numerator = "1"
denominator = "19 - 20*x - 20*y + 5*x^2 + 14*x*y + 5*y^2 - 2*x^2*y - 2*x*y^2 + x^2*y^2"
"#;

    const TWO_PLANES: &str = r#"
[gf]
variables = ["x", "y", "z"]
numerator = "16"
denominator = "(4 - 2*x - y - z)*(4 - x - 2*y - z)"
denominator_factors = ["4 - 2*x - y - z", "4 - x - 2*y - z"]

[point]
coordinates = ["1", "1", 1]
"#;

    #[test]
    fn lemniscate_file() {
        let p = parse_problem(LEMNISCATE, "lemniscate.toml").unwrap();
        assert_eq!(p.gf.nvars(), 2);
        assert!(p.gf.factors.is_none());
        assert!(p.point.is_none());
        assert_eq!(p.options, Options::default());
    }

    #[test]
    fn two_planes_file() {
        let p = parse_problem(TWO_PLANES, "2planes.toml").unwrap();
        assert_eq!(p.gf.factors.as_ref().unwrap().len(), 2);
        assert_eq!(p.point.unwrap().coords(), &[qi(1), qi(1), qi(1)]);
    }

    #[test]
    fn missing_gf_section() {
        match parse_problem("[point]\ncoordinates = [\"1\"]\n", "bad.toml") {
            Err(Error::Schema { location, .. }) => assert!(location.contains("[gf]")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_location() {
        let text = LEMNISCATE.replace("20*x", "20x");
        match parse_problem(&text, "f.toml") {
            Err(Error::Schema { location, message }) => {
                assert!(location.starts_with("f.toml"));
                assert!(location.contains("denominator"));
                assert!(message.contains("offset"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = format!("{TWO_PLANES}\n[options]\nbogus = 1\n");
        assert!(matches!(parse_problem(&text, "f.toml"), Err(Error::Schema { .. })));
    }

    #[test]
    fn decimal_point_coordinates_are_exact() {
        let text = TWO_PLANES.replace(r#"["1", "1", 1]"#, r#"["0.5", "3/2", "1"]"#);
        let p = parse_problem(&text, "f").unwrap();
        assert_eq!(p.point.unwrap().coords(), &[q(1, 2), q(3, 2), qi(1)]);
    }

    #[test]
    fn last_variable_option_permutes() {
        let text = format!("{TWO_PLANES}\n[options]\nlast_variable = \"x\"\n");
        let p = parse_problem(&text, "f").unwrap();
        assert_eq!(p.gf.variables, ["y", "z", "x"]);
        let f0 = &p.gf.factors.as_ref().unwrap()[0];
        // 4 - 2x - y - z with x now last
        assert_eq!(f0.eval(&[qi(0), qi(0), qi(2)]).unwrap(), qi(0));
    }

    #[test]
    fn io_error() {
        assert!(matches!(
            load_problem("/nonexistent/problem.toml"),
            Err(Error::Io { .. })
        ));
    }
}
