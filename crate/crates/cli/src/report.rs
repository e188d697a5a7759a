//! JSON rendering. Maps are ordered by key and floats are rounded to twelve
//! significant digits, so equal inputs give byte-identical output.

use multipole::cone::{extreme_rays, Classification, DirectionMatrix};
use multipole::engine::{AsymptoticResult, Diagnostics, Leading};
use multipole::locus::{Minimality, MultiplePointData};
use multipole::model::PointSpec;
use multipole::poly::{primitive_integer_vector, q_to_f64};
use multipole::verify::{fmt_float, ComparisonTable};
use multipole::{C64, Q};
use serde_json::{json, Map, Value};

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    let rounded: f64 = fmt_float(x).parse().unwrap_or(x);
    json!(rounded)
}

pub fn exact(q: &Q) -> Value {
    json!({ "exact": q.to_string(), "decimal": num(q_to_f64(q)) })
}

pub fn complex(c: C64) -> Value {
    json!({ "re": num(c.re), "im": num(c.im) })
}

pub fn point(p: &PointSpec) -> Value {
    Value::Array(p.coords().iter().map(|c| Value::String(c.to_string())).collect())
}

/// Extreme rays as primitive integer vectors when exact, else scaled to a
/// unit last entry.
fn rays(c: &DirectionMatrix) -> Value {
    let rays = extreme_rays(c);
    let out: Vec<Value> = rays
        .iter()
        .map(|ray| {
            let exact_row = c
                .exact()
                .and_then(|e| e.iter().zip(c.rows()).find(|(_, f)| *f == ray).map(|(e, _)| e.clone()));
            match exact_row {
                Some(row) => Value::Array(
                    primitive_integer_vector(&row)
                        .into_iter()
                        .map(|v| serde_json::from_str(&v.to_string()).unwrap_or(Value::Null))
                        .collect(),
                ),
                None => {
                    let last = *ray.last().unwrap();
                    Value::Array(ray.iter().map(|x| num(x / last)).collect())
                }
            }
        })
        .collect();
    Value::Array(out)
}

pub fn cone(c: &DirectionMatrix, k: &Classification) -> Value {
    let matrix: Vec<Value> = match c.exact() {
        Some(e) => e
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| Value::String(x.to_string())).collect()))
            .collect(),
        None => c
            .rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|&x| num(x)).collect()))
            .collect(),
    };
    json!({
        "rays": rays(c),
        "dim": k.rank,
        "matrix": matrix,
        "rank": k.rank,
        "nondegenerate": k.nondegenerate,
        "transverse": k.transverse,
        "completely_nondegenerate": k.completely_nondegenerate,
        "rho": k.rho,
        "single_ray": k.single_ray,
    })
}

pub fn minimality(m: &Minimality) -> Value {
    let mut obj = Map::new();
    obj.insert("status".into(), json!(m.label()));
    match m {
        Minimality::HeuristicallyStrictlyMinimal { margin, samples } => {
            obj.insert("margin".into(), num(*margin));
            obj.insert("samples".into(), json!(samples));
        }
        Minimality::Failed { witness } => {
            obj.insert("margin".into(), Value::Null);
            obj.insert(
                "witness".into(),
                Value::Array(witness.iter().map(|c| complex(*c)).collect()),
            );
        }
        Minimality::Unchecked => {
            obj.insert("margin".into(), Value::Null);
        }
    }
    Value::Object(obj)
}

/// The label shown for a point: the 2D double point takes precedence over
/// the cone classification.
pub fn classification_label(mp: &MultiplePointData, k: &Classification) -> &'static str {
    let plain_double = mp.d() == 1
        && mp.n() == 1
        && mp
            .double_point
            .as_ref()
            .is_some_and(|dp| !dp.degenerate && dp.det_hess != Q::from_integer(0.into()));
    if plain_double {
        "double_point_2d"
    } else if mp.n() == 0 {
        "smooth"
    } else {
        k.label()
    }
}

pub fn classify_report(mp: &MultiplePointData, c: &DirectionMatrix, k: &Classification) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("point".into(), point(&mp.point));
    obj.insert("multiplicity".into(), json!(mp.multiplicity));
    obj.insert("classification".into(), json!(classification_label(mp, k)));
    obj.insert("cone".into(), cone(c, k));
    obj.insert("phi".into(), exact(&mp.phi));
    obj.insert("minimality".into(), minimality(&mp.minimality));
    if let Some(dp) = &mp.double_point {
        obj.insert("det_hess".into(), exact(&dp.det_hess));
        let slopes = match &dp.c_exact {
            Some(cs) => Value::Array(cs.iter().map(exact).collect()),
            None => Value::Array(dp.c.iter().map(|&x| num(x)).collect()),
        };
        obj.insert("cone_slopes".into(), slopes);
    }
    obj.insert(
        "warnings".into(),
        Value::Array(mp.flags.iter().map(|w| json!(w)).collect()),
    );
    obj
}

fn leading(l: &Leading) -> Value {
    match l {
        Leading::Constant { value, exact: ex } => {
            let mut obj = Map::new();
            obj.insert("kind".into(), json!("constant"));
            obj.insert("value".into(), num(*value));
            obj.insert("exact".into(), ex.as_ref().map_or(Value::Null, |q| json!(q.to_string())));
            Value::Object(obj)
        }
        Leading::Power { b0, power } => json!({
            "kind": "power",
            "b0": num(*b0),
            "power": num(*power),
        }),
    }
}

fn diagnostics(d: &Diagnostics) -> Value {
    let mut obj = Map::new();
    if let Some(v) = &d.det_hess {
        obj.insert("det_hess".into(), exact(v));
    }
    if let Some(v) = d.det_c {
        obj.insert("det_c".into(), num(v));
    }
    if let Some(v) = d.det_cbar {
        obj.insert("det_cbar".into(), num(v));
    }
    if let Some(v) = d.sigma {
        obj.insert("sigma".into(), num(v));
    }
    if let Some(v) = &d.alpha {
        obj.insert("alpha".into(), Value::Array(v.iter().map(|&x| num(x)).collect()));
    }
    if let Some(v) = d.det_m {
        obj.insert("det_m".into(), complex(v));
    }
    if let Some(v) = d.sqrt_det_m {
        obj.insert("sqrt_det_m".into(), complex(v));
    }
    if let Some([d0, d1]) = d.tangent_d {
        obj.insert("tangent_d".into(), json!([num(d0), num(d1)]));
    }
    if let Some(q) = &d.quadrature {
        obj.insert(
            "quadrature".into(),
            json!({ "value": complex(q.value), "error": num(q.error), "converged": q.converged }),
        );
    }
    Value::Object(obj)
}

pub fn asym_report(
    mp: &MultiplePointData,
    res: &AsymptoticResult,
    prediction: f64,
) -> Map<String, Value> {
    let mut obj = classify_report(mp, &res.cone, &res.classification);
    obj.insert("theorem".into(), json!(res.theorem.tag()));
    obj.insert("leading".into(), leading(&res.leading));
    obj.insert(
        "direction".into(),
        Value::Array(res.direction.iter().map(|x| json!(x.to_string())).collect()),
    );
    obj.insert("membership".into(), json!(res.membership.label()));
    obj.insert("boundary_halved".into(), json!(res.boundary_halved));
    obj.insert(
        "prefactor_log".into(),
        Value::Array(res.prefactor_log.iter().map(|&x| num(x)).collect()),
    );
    obj.insert("prediction".into(), num(prediction));
    obj.insert("diagnostics".into(), diagnostics(&res.diagnostics));
    obj.insert(
        "warnings".into(),
        Value::Array(res.warnings.iter().map(|w| json!(w)).collect()),
    );
    obj
}

pub fn fit(table: &ComparisonTable) -> Value {
    let f = &table.fit;
    json!({
        "model": f.model.label(),
        "slope": num(f.slope),
        "intercept": num(f.intercept),
        "residual": num(f.residual),
        "points": f.points,
        "rows": table.rows.len(),
    })
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
