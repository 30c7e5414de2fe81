//! The JSON model specification read by the command-line tool.
//!
//! ```json
//! {
//!   "kind": "hull",
//!   "dimension": 2,
//!   "generators": [["0/1", "0/1"], ["1/1", "0/1"], ["0/1", "1/1"]],
//!   "metric": "l1",
//!   "grid": ["0/1", "1/3", "1/2", "2/3", "1/1"],
//!   "seed": 7,
//!   "budget": 100,
//!   "depth": 2
//! }
//! ```
//!
//! Semilattices give `elements` and a symmetric `meet` table of element
//! names; tables give `elements` and a `cc` map from weight to an
//! element-name matrix. Every rational is a `"num/den"` string.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{ConvexModel, HullModel, MetricKind, Semilattice, TableModel};
use crate::rational::{dyadic_plus_thirds, Rational, Weight};
use crate::sampler::Sampler;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_BUDGET: usize = 100;
pub const DEFAULT_DEPTH: usize = 1;
/// Dyadic level of the default grid.
pub const DEFAULT_GRID_LEVEL: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Hull,
    Semilattice,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    L1,
    Linf,
    WeightedL1,
}

/// The file format, field for field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meet: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cc: BTreeMap<Weight, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricName>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metric_weights: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<Weight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

/// A spec problem, tagged with the JSON path of the offending field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

impl SpecError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError { path: path.into(), message: message.into() }
    }
}

/// A parsed, validated spec ready to run.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub spec: ModelSpec,
    pub model: ConvexModel,
    pub grid: Vec<Weight>,
    pub seed: u64,
    pub budget: usize,
    pub depth: usize,
}

impl LoadedSpec {
    pub fn sampler(&self) -> Sampler {
        Sampler::new(self.seed, self.grid.clone(), self.budget)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

pub fn parse(text: &str) -> Result<LoadedSpec, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: ModelSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." || path == "?" { format!("line {} column {}", inner.line(), inner.column()) } else { path };
        SpecError::at(path, inner.to_string())
    })?;
    load(spec)
}

fn lookup(names: &[String], name: &str, path: String) -> Result<usize, SpecError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| SpecError::at(path, format!("unknown element {name:?}")))
}

fn name_matrix(names: &[String], rows: &[Vec<String>], field: &str) -> Result<Vec<Vec<usize>>, SpecError> {
    let n = names.len();
    if rows.len() != n {
        return Err(SpecError::at(field, format!("expected {n} rows, found {}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != n {
                return Err(SpecError::at(format!("{field}[{i}]"), format!("expected {n} entries, found {}", row.len())));
            }
            row.iter()
                .enumerate()
                .map(|(j, v)| lookup(names, v, format!("{field}[{i}][{j}]")))
                .collect()
        })
        .collect()
}

fn require_empty<T>(items: &[T], field: &str, kind: &str) -> Result<(), SpecError> {
    if items.is_empty() {
        Ok(())
    } else {
        Err(SpecError::at(field, format!("not allowed for kind {kind:?}")))
    }
}

/// Validates a deserialized spec and builds its model.
pub fn load(spec: ModelSpec) -> Result<LoadedSpec, SpecError> {
    let metric = match (spec.metric, spec.metric_weights.is_empty()) {
        (None, true) => None,
        (Some(MetricName::L1), true) => Some(MetricKind::L1),
        (Some(MetricName::Linf), true) => Some(MetricKind::LInf),
        (Some(MetricName::WeightedL1), false) => Some(MetricKind::WeightedL1(spec.metric_weights.clone())),
        (Some(MetricName::WeightedL1), true) => {
            return Err(SpecError::at("metric_weights", "required for weighted_l1"));
        }
        (_, false) => return Err(SpecError::at("metric_weights", "only allowed with weighted_l1")),
    };

    let model = match spec.kind {
        Kind::Hull => {
            require_empty(&spec.elements, "elements", "hull")?;
            require_empty(&spec.meet, "meet", "hull")?;
            if !spec.cc.is_empty() {
                return Err(SpecError::at("cc", "not allowed for kind \"hull\""));
            }
            let dimension = spec.dimension.ok_or_else(|| SpecError::at("dimension", "required for hull"))?;
            if spec.generators.is_empty() {
                return Err(SpecError::at("generators", "at least one generator is required"));
            }
            for (i, g) in spec.generators.iter().enumerate() {
                if g.len() != dimension {
                    return Err(SpecError::at(
                        format!("generators[{i}]"),
                        format!("expected {dimension} coordinates, found {}", g.len()),
                    ));
                }
            }
            if let Some(MetricKind::WeightedL1(w)) = &metric {
                if w.len() != dimension {
                    return Err(SpecError::at("metric_weights", format!("expected {dimension} weights, found {}", w.len())));
                }
                if let Some(i) = w.iter().position(|x| !x.is_positive()) {
                    return Err(SpecError::at(format!("metric_weights[{i}]"), "must be strictly positive"));
                }
            }
            let hull = HullModel::new(dimension, spec.generators.clone()).map_err(|e| SpecError::at("generators", e.to_string()))?;
            ConvexModel::hull(hull, metric).map_err(|e| SpecError::at("metric", e.to_string()))?
        }
        Kind::Semilattice | Kind::Table => {
            if metric.is_some() {
                return Err(SpecError::at("metric", "finite models carry no metric"));
            }
            require_empty(&spec.generators, "generators", "finite")?;
            if spec.elements.is_empty() {
                return Err(SpecError::at("elements", "at least one element is required"));
            }
            let mut seen = std::collections::BTreeSet::new();
            for (i, e) in spec.elements.iter().enumerate() {
                if !seen.insert(e) {
                    return Err(SpecError::at(format!("elements[{i}]"), format!("duplicate element {e:?}")));
                }
            }
            if spec.kind == Kind::Semilattice {
                if !spec.cc.is_empty() {
                    return Err(SpecError::at("cc", "not allowed for kind \"semilattice\""));
                }
                let meet = name_matrix(&spec.elements, &spec.meet, "meet")?;
                let s = Semilattice::new(spec.elements.clone(), meet).map_err(|e| SpecError::at("meet", e.to_string()))?;
                ConvexModel::semilattice(s)
            } else {
                require_empty(&spec.meet, "meet", "table")?;
                if spec.cc.is_empty() {
                    return Err(SpecError::at("cc", "at least one weight is required"));
                }
                let mut values = BTreeMap::new();
                for (w, rows) in &spec.cc {
                    values.insert(w.clone(), name_matrix(&spec.elements, rows, &format!("cc.{w}"))?);
                }
                let t = TableModel::new(spec.elements.clone(), values).map_err(|e| SpecError::at("cc", e.to_string()))?;
                ConvexModel::table(t)
            }
        }
    };

    let grid = if spec.grid.is_empty() {
        model.declared_grid().unwrap_or_else(|| dyadic_plus_thirds(DEFAULT_GRID_LEVEL))
    } else {
        let mut g = spec.grid.clone();
        g.sort();
        g.dedup();
        g
    };
    let budget = spec.budget.unwrap_or(DEFAULT_BUDGET);
    if budget == 0 {
        return Err(SpecError::at("budget", "must be positive"));
    }
    Ok(LoadedSpec {
        seed: spec.seed.unwrap_or(DEFAULT_SEED),
        budget,
        depth: spec.depth.unwrap_or(DEFAULT_DEPTH),
        grid,
        model,
        spec,
    })
}

/// SHA-256 of the spec's canonical JSON form (rationals reduced, weights
/// sorted, optional fields omitted when absent).
pub fn digest(spec: &ModelSpec) -> String {
    let canonical = serde_json::to_string(spec).expect("spec serializes");
    format!("sha256:{}", hex::encode(Sha256::digest(canonical.as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = r#"{
        "kind": "hull", "dimension": 2,
        "generators": [["0/1","0/1"],["1/1","0/1"],["0/1","1/1"]],
        "metric": "l1", "seed": 3
    }"#;

    #[test]
    fn parses_hull() {
        let l = parse(TRIANGLE).unwrap();
        assert_eq!(l.seed, 3);
        assert_eq!(l.grid, dyadic_plus_thirds(DEFAULT_GRID_LEVEL));
        assert_eq!(l.model.metric_kind(), Some(&MetricKind::L1));
        assert_eq!(l.model.generators().len(), 3);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = TRIANGLE.replace("[\"1/1\",\"0/1\"]", "[\"1/1\",\"zero\"]");
        let e = parse(&bad).unwrap_err();
        assert_eq!(e.path, "generators[1][1]", "{e}");

        let bad = TRIANGLE.replace("[\"1/1\",\"0/1\"]", "[\"1/1\"]");
        assert_eq!(parse(&bad).unwrap_err().path, "generators[1]");

        let bad = TRIANGLE.replace("\"l1\"", "\"l2\"");
        assert_eq!(parse(&bad).unwrap_err().path, "metric");

        let e = parse("{\"kind\": \"hull\",").unwrap_err();
        assert!(e.path.starts_with("line "), "{e}");

        let e = parse(r#"{"kind":"semilattice","elements":["a","b"],"meet":[["a","a"],["a","c"]]}"#).unwrap_err();
        assert_eq!(e.path, "meet[1][1]");

        let e = parse(r#"{"kind":"hull","dimension":1,"generators":[["0"]],"colour":"red"}"#).unwrap_err();
        assert!(e.message.contains("colour"), "{e}");
    }

    #[test]
    fn parses_table_with_declared_grid() {
        let text = r#"{
            "kind": "table", "elements": ["a","b"],
            "cc": {
                "0/1": [["a","b"],["a","b"]],
                "1/2": [["a","a"],["a","b"]],
                "2/2": [["a","a"],["b","b"]]
            }
        }"#;
        let l = parse(text).unwrap();
        assert_eq!(l.grid, vec![Weight::zero(), Weight::of(1, 2), Weight::one()]);
    }

    #[test]
    fn digest_tracks_canonical_content() {
        let a = parse(TRIANGLE).unwrap();
        let reformatted = TRIANGLE.replace("\"1/1\",\"0/1\"", "\"2/2\", \"0/5\"").replace('\n', " ");
        let b = parse(&reformatted).unwrap();
        assert_eq!(digest(&a.spec), digest(&b.spec));
        let c = parse(&TRIANGLE.replace("\"seed\": 3", "\"seed\": 4")).unwrap();
        assert_ne!(digest(&a.spec), digest(&c.spec));
    }
}
