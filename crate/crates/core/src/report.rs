use serde::Serialize;
use serde_json::Value;

/// Outcome of one identity or axiom check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckReport {
    /// Passes when `residual <= tolerance`.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            witness: None,
        }
    }

    /// Non-existence checks: passes when `residual > floor`.
    pub fn above(name: impl Into<String>, residual: f64, floor: f64) -> Self {
        CheckReport {
            name: name.into(),
            residual,
            tolerance: floor,
            pass: residual > floor,
            witness: None,
        }
    }

    /// Measured and reported only.
    pub fn informational(name: impl Into<String>, residual: f64) -> Self {
        CheckReport {
            name: name.into(),
            residual,
            tolerance: f64::INFINITY,
            pass: true,
            witness: None,
        }
    }

    /// Passes when every part passes; the residual is the worst one.
    pub fn combine(name: impl Into<String>, parts: &[CheckReport]) -> Self {
        let worst = parts
            .iter()
            .find(|p| !p.pass)
            .or_else(|| parts.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)));
        CheckReport {
            name: name.into(),
            residual: worst.map_or(0.0, |w| w.residual),
            tolerance: worst.map_or(0.0, |w| w.tolerance),
            pass: parts.iter().all(|p| p.pass),
            witness: Some(Value::Array(
                parts
                    .iter()
                    .map(|p| serde_json::json!({"name": p.name, "residual": p.residual, "pass": p.pass}))
                    .collect(),
            )),
        }
    }

    pub fn with_witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions() {
        assert!(CheckReport::at_most("x", 1e-12, 1e-9).pass);
        assert!(!CheckReport::at_most("x", 1e-3, 1e-9).pass);
        assert!(CheckReport::above("x", 1.4, 0.5).pass);
        assert!(!CheckReport::above("x", 0.1, 0.5).pass);
        assert!(CheckReport::informational("x", 7.0).pass);
    }

    #[test]
    fn combine_reports_failure() {
        let a = CheckReport::at_most("a", 0.0, 1.0);
        let b = CheckReport::at_most("b", 2.0, 1.0);
        let c = CheckReport::combine("ab", &[a, b]);
        assert!(!c.pass);
        assert_eq!(c.residual, 2.0);
    }
}
