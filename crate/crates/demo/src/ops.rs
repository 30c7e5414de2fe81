//! The demo's operations as plain functions, JSON text in and out, so they
//! can be tested natively.

use convexity::spec;
use convexity::stone::generate_carrier;
use convexity::{ConvexModel, HullModel, Point, ProbDist, Rational, Weight};
use serde_json::{json, Value};

fn floats(v: &[Rational]) -> Vec<f64> {
    v.iter().map(Rational::to_f64).collect()
}

fn point_json(p: &Point) -> Value {
    let v = p.as_vector().expect("hull point");
    json!({ "exact": v, "approx": floats(v) })
}

fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("{what}: {e}"))
}

/// `γ_μ(points)` plus the barycentres of each prefix, which are the
/// intermediate values of the recursive definition.
pub fn barycentre(points: &str, weights: &str) -> Result<String, String> {
    let pts: Vec<Vec<Rational>> = parse("points", points)?;
    let ws: Vec<Rational> = parse("weights", weights)?;
    let dim = pts.first().ok_or("points: need at least one")?.len();
    let hull = HullModel::new(dim, pts.clone()).map_err(|e| e.to_string())?;
    let model = ConvexModel::hull(hull, None).map_err(|e| e.to_string())?;
    let mu = ProbDist::from_rationals(ws.clone()).map_err(|e| e.to_string())?;
    let points: Vec<Point> = pts.into_iter().map(Point::Vector).collect();
    let result = model.gamma(&mu, &points).map_err(|e| e.to_string())?;

    let mut steps = Vec::new();
    let mut mass = Rational::zero();
    for k in 1..=ws.len() {
        mass += &ws[k - 1];
        if mass.is_zero() {
            continue;
        }
        let prefix = ProbDist::from_rationals(ws[..k].iter().map(|w| w / &mass).collect()).map_err(|e| e.to_string())?;
        let p = model.gamma(&prefix, &points[..k]).map_err(|e| e.to_string())?;
        steps.push(json!({ "k": k, "mass": mass, "point": point_json(&p) }));
    }
    Ok(json!({ "point": point_json(&result), "steps": steps }).to_string())
}

/// `λ_1 … λ_k` from `λ_0`, exact and as floats.
pub fn lambda_sequence(lambda0: &str, k: usize) -> Result<String, String> {
    let l: Rational = lambda0.trim().parse().map_err(|e| format!("lambda0: {e}"))?;
    let w = Weight::new(l).map_err(|e| e.to_string())?;
    let seq = convexity::lambda_sequence(&w, k).map_err(|e| e.to_string())?;
    let items: Vec<Value> = seq.iter().map(|w| json!({ "exact": w, "approx": w.value().to_f64() })).collect();
    Ok(Value::Array(items).to_string())
}

/// The norm of `direction` read off the metric of a model spec, with the
/// base points that witnessed it.
pub fn recover_norm(spec_text: &str, direction: &str) -> Result<String, String> {
    let loaded = spec::parse(spec_text).map_err(|e| e.to_string())?;
    let v: Vec<Rational> = direction
        .split(',')
        .map(|s| s.trim().parse::<Rational>().map_err(|e| format!("direction: {e}")))
        .collect::<Result<_, _>>()?;
    let model = &loaded.model;
    let carrier = generate_carrier(model, &model.generators(), &loaded.grid, loaded.depth).map_err(|e| e.to_string())?;
    let probe = convexity::recover_norm(model, carrier.points(), &v, 8).map_err(|e| e.to_string())?;
    let bases: Vec<Value> = probe.bases.iter().map(point_json).collect();
    Ok(json!({
        "value": probe.value,
        "approx": probe.value.to_f64(),
        "scale": probe.scale,
        "well_defined": probe.well_defined(),
        "bases": bases,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(text: &str) -> Value {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn barycentre_of_triangle() {
        let out = get(&barycentre(r#"[["0","0"],["1","0"],["0","1"]]"#, r#"["1/2","1/4","1/4"]"#).unwrap());
        assert_eq!(out["point"]["exact"], json!(["1/4", "1/4"]));
        let steps = out["steps"].as_array().unwrap();
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[1]["point"]["exact"], json!(["1/3", "0/1"]));
        assert_eq!(steps[2]["mass"], "1/1");
    }

    #[test]
    fn barycentre_skips_massless_prefixes() {
        let out = get(&barycentre(r#"[["0"],["4"]]"#, r#"["0","1"]"#).unwrap());
        assert_eq!(out["steps"].as_array().unwrap().len(), 1);
        assert_eq!(out["point"]["exact"], json!(["4/1"]));
    }

    #[test]
    fn barycentre_rejects_bad_input() {
        assert!(barycentre("[]", "[]").is_err());
        assert!(barycentre(r#"[["0"],["1"]]"#, r#"["1/2","1/3"]"#).is_err());
        assert!(barycentre(r#"[["0"],["1"]]"#, r#"["1/2"]"#).is_err());
    }

    #[test]
    fn sequence_closed_form() {
        let out = get(&lambda_sequence("1/2", 3).unwrap());
        let exact: Vec<&str> = out.as_array().unwrap().iter().map(|v| v["exact"].as_str().unwrap()).collect();
        assert_eq!(exact, ["2/3", "4/5", "8/9"]);
        assert!(lambda_sequence("1", 3).is_err());
    }

    #[test]
    fn norm_on_square() {
        let spec = r#"{"kind":"hull","dimension":2,"generators":[["0","0"],["1","0"],["1","1"],["0","1"]],"metric":"linf"}"#;
        let out = get(&recover_norm(spec, "1/2,1/4").unwrap());
        assert_eq!(out["value"], "1/2");
        assert_eq!(out["well_defined"], true);
        assert!(recover_norm(spec, "1/2").is_err());
    }
}
