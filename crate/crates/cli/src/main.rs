mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multipole::cone::{classify, direction_matrix, solve_a, DirectionMatrix};
use multipole::engine::{evaluate_prediction, leading_term, EngineOptions};
use multipole::error::ErrorKind;
use multipole::locus::{analyze_point, locate_point, Minimality, MultiplePointData};
use multipole::model::{load_problem, Problem};
use multipole::poly::parse_rational;
use multipole::poly::series::{coefficients_box, coefficients_total_degree};
use multipole::verify::{
    compare_direction, critical_set_check, divided_difference_identity_check, fl_quadrature_check,
    fmt_float, hessian_fd_check_at, oracle_shape, FL_THETA0,
};
use multipole::{Error, Result, Q};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "multipole", version, about = "Leading-term asymptotics at multiple points of rational generating functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file (TOML).
    file: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Locate and classify the multiple point.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Polydisk sampling grid for the minimality check.
        #[arg(long)]
        grid: Option<u32>,
    },
    /// Leading asymptotic term in a direction.
    Asym {
        #[command(flatten)]
        common: Common,
        /// Comma-separated direction, e.g. `1,1` or `3/2,1`.
        #[arg(long)]
        direction: String,
        #[arg(long)]
        allow_nonminimal: bool,
    },
    /// Exact series coefficients as CSV.
    Coeffs {
        #[command(flatten)]
        common: Common,
        /// Defaults to `[options].oracle_max_total_degree` from the problem file.
        #[arg(long, conflicts_with = "box_shape")]
        max_total_degree: Option<u32>,
        /// Largest index in each variable, comma-separated.
        #[arg(long = "box")]
        box_shape: Option<String>,
    },
    /// Oracle against prediction along a ray, with a decay fit.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        direction: String,
        /// Inclusive scale range `a..b`.
        #[arg(long)]
        scales: String,
        #[arg(long, default_value_t = 1)]
        step: u32,
        /// Write the fit as JSON here instead of stderr.
        #[arg(long)]
        fit: Option<PathBuf>,
        #[arg(long)]
        allow_nonminimal: bool,
    },
    /// Numeric self-checks of the local analysis.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        direction: Option<String>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Input => 2,
        ErrorKind::Unsupported => 3,
        ErrorKind::Minimality => 4,
        ErrorKind::Internal => 5,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_direction(s: &str) -> Result<Vec<Q>> {
    s.split(',')
        .map(|t| parse_rational(t).ok_or_else(|| Error::Invalid(format!("bad direction component '{t}'"))))
        .collect()
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Invalid(format!("bad integer '{t}'"))))
        .collect()
}

fn parse_scales(s: &str, step: u32) -> Result<Vec<u32>> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::Invalid(format!("scales must look like a..b, got '{s}'")))?;
    let a: u32 = a.trim().parse().map_err(|_| Error::Invalid(format!("bad scale '{a}'")))?;
    let b: u32 = b.trim().parse().map_err(|_| Error::Invalid(format!("bad scale '{b}'")))?;
    if a == 0 || a > b || step == 0 {
        return Err(Error::Invalid(format!("empty scale range {a}..{b} step {step}")));
    }
    Ok((a..=b).step_by(step as usize).collect())
}

struct Loaded {
    problem: Problem,
    mp: MultiplePointData,
}

fn load(file: &Path, grid: Option<u32>) -> Result<Loaded> {
    let problem = load_problem(file)?;
    let grid = grid.unwrap_or(problem.options.minimality_grid);
    let point = locate_point(&problem.gf, problem.point.as_ref(), grid)?;
    let mp = analyze_point(&problem.gf, &point, Some(grid))?;
    Ok(Loaded { problem, mp })
}

fn run_classify(common: &Common, grid: Option<u32>) -> Result<u8> {
    let l = load(&common.file, grid)?;
    let c = direction_matrix(&l.mp.sheets, &l.mp.point)?;
    let k = classify(&c, l.problem.options.rank_tolerance)?;
    let obj = report::classify_report(&l.mp, &c, &k);
    emit(common.out.as_deref(), &report::render(&Value::Object(obj)))?;
    Ok(if matches!(l.mp.minimality, Minimality::Failed { .. }) { 4 } else { 0 })
}

fn run_asym(common: &Common, direction: &str, allow_nonminimal: bool) -> Result<u8> {
    let r = parse_direction(direction)?;
    let l = load(&common.file, None)?;
    let opts = EngineOptions {
        allow_nonminimal,
        ..EngineOptions::default()
    };
    let res = leading_term(&l.problem.gf, &l.mp, &r, &opts)?;
    let prediction = evaluate_prediction(&res, &r)?;
    let obj = report::asym_report(&l.mp, &res, prediction);
    emit(common.out.as_deref(), &report::render(&Value::Object(obj)))?;
    Ok(0)
}

fn run_coeffs(common: &Common, max_total_degree: Option<u32>, box_shape: Option<&str>) -> Result<u8> {
    let problem = load_problem(&common.file)?;
    let gf = &problem.gf;
    let max_total_degree = match box_shape {
        Some(_) => max_total_degree,
        None => max_total_degree.or(problem.options.oracle_max_total_degree),
    };
    let table = match (max_total_degree, box_shape) {
        (Some(n), _) => coefficients_total_degree(&gf.numerator, &gf.denominator, n)?,
        (None, Some(b)) => {
            let shape = parse_u32_list(b)?;
            if shape.len() != gf.nvars() {
                return Err(Error::DimensionMismatch {
                    expected: gf.nvars(),
                    got: shape.len(),
                });
            }
            coefficients_box(&gf.numerator, &gf.denominator, &shape)?
        }
        (None, None) => {
            return Err(Error::Invalid(
                "give --max-total-degree or --box, or set [options].oracle_max_total_degree".into(),
            ))
        }
    };
    let mut csv = gf.variables.join(",");
    csv.push_str(",exact,decimal\n");
    for r in table.indices() {
        let a = table.get(&r).expect("index from table");
        let idx: Vec<String> = r.iter().map(u32::to_string).collect();
        csv.push_str(&format!(
            "{},{},{}\n",
            idx.join(","),
            a,
            fmt_float(multipole::poly::q_to_f64(&a))
        ));
    }
    emit(common.out.as_deref(), &csv)?;
    Ok(0)
}

fn run_compare(
    common: &Common,
    direction: &str,
    scales: &str,
    step: u32,
    fit: Option<&Path>,
    allow_nonminimal: bool,
) -> Result<u8> {
    let r = parse_direction(direction)?;
    let scales = parse_scales(scales, step)?;
    let l = load(&common.file, None)?;
    let opts = EngineOptions {
        allow_nonminimal,
        ..EngineOptions::default()
    };
    let res = leading_term(&l.problem.gf, &l.mp, &r, &opts)?;
    let shape = oracle_shape(&r, &scales)?;
    let gf = &l.problem.gf;
    let oracle = coefficients_box(&gf.numerator, &gf.denominator, &shape)?;
    let table = compare_direction(&res, &r, &scales, &oracle)?;
    emit(common.out.as_deref(), &table.to_csv(&gf.variables))?;
    let fit_text = report::render(&report::fit(&table));
    match fit {
        Some(p) => emit(Some(p), &fit_text)?,
        None => eprint!("{fit_text}"),
    }
    Ok(0)
}

/// An interior direction: the mean of the rows of `C`, last entry scaled to 1.
fn default_direction(c: &DirectionMatrix) -> Vec<Q> {
    let m = Q::from_integer(c.nrows().into());
    let cols = c.ncols();
    match c.exact() {
        Some(e) => (0..cols)
            .map(|k| e.iter().map(|row| row[k].clone()).sum::<Q>() / &m)
            .collect(),
        None => (0..cols)
            .map(|k| {
                let v = c.rows().iter().map(|row| row[k]).sum::<f64>() / c.nrows() as f64;
                Q::from_float(v).unwrap_or_default()
            })
            .collect(),
    }
}

fn outcome(name: &str, status: &str, detail: Value) -> Value {
    json!({ "name": name, "status": status, "detail": detail })
}

fn skipped(name: &str, e: &Error) -> Value {
    outcome(name, "skipped", json!({ "reason": e.to_string() }))
}

fn run_check(common: &Common, direction: Option<&str>) -> Result<u8> {
    let l = load(&common.file, None)?;
    let gf = &l.problem.gf;
    let mp = &l.mp;
    let c = direction_matrix(&mp.sheets, &mp.point)?;
    let r = match direction {
        Some(d) => parse_direction(d)?,
        None => default_direction(&c),
    };
    let delta = multipole::cone::normalize_direction(&r)?;
    let mut checks = Vec::new();

    // divided differences at the first column of C with h = y^(n+5)
    match c.exact() {
        Some(e) => {
            let nodes: Vec<Q> = e.iter().map(|row| row[0].clone()).collect();
            let mut h = vec![Q::from_integer(0.into()); mp.n() + 6];
            h[mp.n() + 5] = Q::from_integer(1.into());
            let rep = divided_difference_identity_check(&nodes, &h);
            checks.push(outcome(
                "divided_difference",
                if rep.holds { "passed" } else { "failed" },
                json!({
                    "divided_difference": report::exact(&rep.divided_difference),
                    "integral": report::exact(&rep.integral),
                    "uncorrected_holds": rep.uncorrected_holds,
                }),
            ));
        }
        None => checks.push(outcome(
            "divided_difference",
            "skipped",
            json!({ "reason": "the direction matrix is not exact" }),
        )),
    }

    match critical_set_check(mp, &delta, 64) {
        Ok(rep) => checks.push(outcome(
            "critical_set",
            if rep.passed() { "passed" } else { "failed" },
            json!({
                "alpha": rep.alpha.iter().map(|&x| report::num(x)).collect::<Vec<_>>(),
                "gradient_at_solution": report::num(rep.gradient_at_solution),
                "fd_gradient_at_solution": rep.fd_gradient_at_solution.map(report::num),
                "min_real_part": rep.min_real_part.map(report::num),
                "violations": rep.violations,
            }),
        )),
        Err(e) if e.kind() == ErrorKind::Internal => return Err(e),
        Err(e) => checks.push(skipped("critical_set", &e)),
    }

    let hess = solve_a(&c, &delta).and_then(|p| hessian_fd_check_at(mp, &p.center()));
    match hess {
        Ok(err) => checks.push(outcome(
            "hessian_finite_difference",
            if err <= 1e-5 { "passed" } else { "failed" },
            json!({ "max_rel_err": report::num(err), "tolerance": 1e-5 }),
        )),
        Err(e) if e.kind() == ErrorKind::Internal => return Err(e),
        Err(e) => checks.push(skipped("hessian_finite_difference", &e)),
    }

    let s_list = [20u32, 40, 80];
    let fl = oracle_shape(&delta, &s_list)
        .and_then(|shape| coefficients_box(&gf.numerator, &gf.denominator, &shape))
        .and_then(|oracle| fl_quadrature_check(gf, mp, &delta[0], &s_list, &oracle, FL_THETA0));
    match fl {
        Ok(rep) => {
            let last = rep.rows.last().map_or(f64::INFINITY, |row| row.rel_err);
            let ok = rep.decreasing && last <= 1e-6;
            let rows: Vec<Value> = rep
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "s": row.s,
                        "r": row.r,
                        "value": report::num(row.value),
                        "oracle": report::exact(&row.oracle),
                        "rel_err": report::num(row.rel_err),
                        "nodes": row.nodes,
                    })
                })
                .collect();
            checks.push(outcome(
                "fourier_laplace",
                if ok { "passed" } else { "failed" },
                json!({ "theta0": report::num(rep.theta0), "rows": rows, "decreasing": rep.decreasing }),
            ));
        }
        Err(e) if e.kind() == ErrorKind::Internal => return Err(e),
        Err(e) => checks.push(skipped("fourier_laplace", &e)),
    }

    let failed = checks.iter().any(|c| c["status"] == "failed");
    let mut obj = Map::new();
    obj.insert("point".into(), report::point(&mp.point));
    obj.insert(
        "direction".into(),
        Value::Array(r.iter().map(|x| json!(x.to_string())).collect()),
    );
    obj.insert("checks".into(), Value::Array(checks));
    obj.insert("passed".into(), json!(!failed));
    emit(common.out.as_deref(), &report::render(&Value::Object(obj)))?;
    Ok(if failed { 5 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify { common, grid } => run_classify(common, *grid),
        Command::Asym {
            common,
            direction,
            allow_nonminimal,
        } => run_asym(common, direction, *allow_nonminimal),
        Command::Coeffs {
            common,
            max_total_degree,
            box_shape,
        } => run_coeffs(common, *max_total_degree, box_shape.as_deref()),
        Command::Compare {
            common,
            direction,
            scales,
            step,
            fit,
            allow_nonminimal,
        } => run_compare(common, direction, scales, *step, fit.as_deref(), *allow_nonminimal),
        Command::Check { common, direction } => run_check(common, direction.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
