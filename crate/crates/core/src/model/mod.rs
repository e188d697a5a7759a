//! Problem definition: generating functions, points, problem files.

pub mod gf;
pub mod parser;
pub mod problem;

pub use gf::{validate_gf, PointSpec, RationalGF};
pub use parser::parse_polynomial;
pub use problem::{load_problem, parse_problem, Options, Problem};
