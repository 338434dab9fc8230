//! JSON forms of paths and path vectors, with vertices written as labels.

use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};
use crate::graph::Graph;
use crate::path::{ElementaryPath, PathVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub path: Vec<String>,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathVectorJson {
    pub terms: Vec<TermJson>,
}

pub fn path_to_json(g: &Graph, p: &ElementaryPath) -> Vec<String> {
    p.labels(g).into_iter().map(str::to_string).collect()
}

pub fn path_vector_to_json(g: &Graph, v: &PathVector) -> PathVectorJson {
    PathVectorJson {
        terms: v
            .terms()
            .map(|(p, c)| TermJson { path: path_to_json(g, p), coeff: c })
            .collect(),
    }
}

pub fn path_vector_from_json(g: &Graph, v: &PathVectorJson) -> Result<PathVector> {
    let mut terms = Vec::with_capacity(v.terms.len());
    for t in &v.terms {
        if !t.coeff.is_finite() {
            return input_err(format!("coefficient {} is not finite", t.coeff));
        }
        let labels: Vec<&str> = t.path.iter().map(String::as_str).collect();
        terms.push((ElementaryPath::from_labels(g, &labels)?, t.coeff));
    }
    Ok(PathVector::from_terms(terms))
}

/// Either a JSON path vector or a comma separated list of labels (optionally
/// in brackets) naming one elementary path.
pub fn parse_path_vector(g: &Graph, text: &str) -> Result<PathVector> {
    let t = text.trim();
    if t.starts_with('{') {
        let v: PathVectorJson = serde_json::from_str(t)?;
        return path_vector_from_json(g, &v);
    }
    let inner = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(t);
    let labels: Vec<&str> = inner
        .split(',')
        .map(|s| s.trim().trim_matches('"'))
        .collect();
    if labels.iter().any(|l| l.is_empty()) {
        return input_err(format!("cannot read a path from '{text}'"));
    }
    Ok(PathVector::from_path(ElementaryPath::from_labels(g, &labels)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin;

    #[test]
    fn round_trip() {
        let g = builtin("E6").unwrap();
        let v = parse_path_vector(&g, "2,1,0").unwrap();
        let j = path_vector_to_json(&g, &v);
        assert_eq!(j.terms[0].path, vec!["2", "1", "0"]);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(parse_path_vector(&g, &text).unwrap(), v);
        assert_eq!(parse_path_vector(&g, "[2, 1, 0]").unwrap(), v);
    }

    #[test]
    fn bad_input() {
        let g = builtin("A3").unwrap();
        assert!(parse_path_vector(&g, "1,3").is_err());
        assert!(parse_path_vector(&g, "1,,2").is_err());
        assert!(parse_path_vector(&g, "9").is_err());
        assert!(parse_path_vector(&g, "{\"terms\": 3}").is_err());
    }
}
