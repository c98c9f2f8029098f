//! Aggregating per-element metric arrays into one system-wide result.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::cvss::{
    AttackComplexity, AttackVector, CvssResult, CvssVector, Impact, Metric, MetricError,
    PrivilegesRequired, Scope, UserInteraction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Most severe value per metric, then score the composed vector.
    #[default]
    WorstCase,
    /// Score each aligned element vector and keep the highest.
    MaxScore,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::WorstCase => "worst-case",
            Strategy::MaxScore => "max-score",
        })
    }
}

impl FromStr for Strategy {
    type Err = RollUpError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "worst-case" => Ok(Strategy::WorstCase),
            "max-score" => Ok(Strategy::MaxScore),
            other => Err(RollUpError::UnknownStrategy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RollUpError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("missing in-port for metric {0}")]
    MissingPort(&'static str),
    #[error("port for metric {0} has no values")]
    Empty(&'static str),
    #[error("port for metric {metric} holds a non-string value {value}")]
    NotText { metric: &'static str, value: String },
    #[error("max-score needs equal-length arrays, {metric} has {found} values but AV has {expected}")]
    LengthMismatch { metric: &'static str, expected: usize, found: usize },
    #[error("unknown strategy '{0}' (expected worst-case or max-score)")]
    UnknownStrategy(String),
}

/// Per-metric value arrays, one entry per contributing element.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetricArrays {
    pub av: Vec<String>,
    pub ac: Vec<String>,
    pub pr: Vec<String>,
    pub ui: Vec<String>,
    pub s: Vec<String>,
    pub c: Vec<String>,
    pub i: Vec<String>,
    pub a: Vec<String>,
}

impl MetricArrays {
    /// Reads `<metric>_inherited` ports (or bare `<metric>`) from a model view.
    /// A scalar port counts as a one-element array.
    pub fn from_ports(ports: &Map<String, Value>) -> Result<Self, RollUpError> {
        fn take(ports: &Map<String, Value>, key: &'static str, name: &'static str) -> Result<Vec<String>, RollUpError> {
            let value = ports
                .get(&format!("{key}_inherited"))
                .or_else(|| ports.get(key))
                .ok_or(RollUpError::MissingPort(name))?;
            let items = match value {
                Value::Array(items) => items.clone(),
                other => vec![other.clone()],
            };
            items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    other => Err(RollUpError::NotText { metric: name, value: other.to_string() }),
                })
                .collect()
        }
        Ok(MetricArrays {
            av: take(ports, "av", "AV")?,
            ac: take(ports, "ac", "AC")?,
            pr: take(ports, "pr", "PR")?,
            ui: take(ports, "ui", "UI")?,
            s: take(ports, "s", "S")?,
            c: take(ports, "c", "C")?,
            i: take(ports, "i", "I")?,
            a: take(ports, "a", "A")?,
        })
    }

    pub fn single(v: &CvssVector) -> Self {
        let one = |s: &str| vec![s.to_string()];
        MetricArrays {
            av: one(v.av.long_name()),
            ac: one(v.ac.long_name()),
            pr: one(v.pr.long_name()),
            ui: one(v.ui.long_name()),
            s: one(v.s.long_name()),
            c: one(v.c.long_name()),
            i: one(v.i.long_name()),
            a: one(v.a.long_name()),
        }
    }

    fn columns(&self) -> [(&'static str, &Vec<String>); 8] {
        [
            ("AV", &self.av),
            ("AC", &self.ac),
            ("PR", &self.pr),
            ("UI", &self.ui),
            ("S", &self.s),
            ("C", &self.c),
            ("I", &self.i),
            ("A", &self.a),
        ]
    }
}

fn parse_all<M: Metric>(values: &[String], name: &'static str) -> Result<Vec<M>, RollUpError> {
    if values.is_empty() {
        return Err(RollUpError::Empty(name));
    }
    Ok(values.iter().map(|v| M::parse_value(v)).collect::<Result<_, _>>()?)
}

fn worst<M: Metric>(values: &[String], name: &'static str) -> Result<M, RollUpError> {
    Ok(parse_all::<M>(values, name)?.into_iter().max().expect("non-empty"))
}

/// The most severe vector: per metric, the maximum over all elements.
pub fn worst_case_vector(arrays: &MetricArrays) -> Result<CvssVector, RollUpError> {
    Ok(CvssVector {
        av: worst::<AttackVector>(&arrays.av, "AV")?,
        ac: worst::<AttackComplexity>(&arrays.ac, "AC")?,
        pr: worst::<PrivilegesRequired>(&arrays.pr, "PR")?,
        ui: worst::<UserInteraction>(&arrays.ui, "UI")?,
        s: worst::<Scope>(&arrays.s, "S")?,
        c: worst::<Impact>(&arrays.c, "C")?,
        i: worst::<Impact>(&arrays.i, "I")?,
        a: worst::<Impact>(&arrays.a, "A")?,
    })
}

/// Element-wise vectors; all arrays must share one length.
pub fn element_vectors(arrays: &MetricArrays) -> Result<Vec<CvssVector>, RollUpError> {
    let expected = arrays.av.len();
    for (metric, column) in arrays.columns() {
        if column.is_empty() {
            return Err(RollUpError::Empty(metric));
        }
        if column.len() != expected {
            return Err(RollUpError::LengthMismatch { metric, expected, found: column.len() });
        }
    }
    let av = parse_all::<AttackVector>(&arrays.av, "AV")?;
    let ac = parse_all::<AttackComplexity>(&arrays.ac, "AC")?;
    let pr = parse_all::<PrivilegesRequired>(&arrays.pr, "PR")?;
    let ui = parse_all::<UserInteraction>(&arrays.ui, "UI")?;
    let s = parse_all::<Scope>(&arrays.s, "S")?;
    let c = parse_all::<Impact>(&arrays.c, "C")?;
    let i = parse_all::<Impact>(&arrays.i, "I")?;
    let a = parse_all::<Impact>(&arrays.a, "A")?;
    Ok((0..expected)
        .map(|k| CvssVector { av: av[k], ac: ac[k], pr: pr[k], ui: ui[k], s: s[k], c: c[k], i: i[k], a: a[k] })
        .collect())
}

pub fn roll_up(arrays: &MetricArrays, strategy: Strategy) -> Result<CvssResult, RollUpError> {
    match strategy {
        Strategy::WorstCase => Ok(worst_case_vector(arrays)?.score()),
        Strategy::MaxScore => {
            let mut best: Option<CvssResult> = None;
            // Ties keep the first element so the vector string is deterministic.
            for v in element_vectors(arrays)? {
                let r = v.score();
                if best.as_ref().is_none_or(|b| r.base_score > b.base_score) {
                    best = Some(r);
                }
            }
            Ok(best.expect("at least one element"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrays(rows: &[[&str; 8]]) -> MetricArrays {
        let col = |k: usize| rows.iter().map(|r| r[k].to_string()).collect();
        MetricArrays { av: col(0), ac: col(1), pr: col(2), ui: col(3), s: col(4), c: col(5), i: col(6), a: col(7) }
    }

    #[test]
    fn scope_changed_wins_worst_case() {
        let a = arrays(&[
            ["Physical", "High", "High", "Required", "Changed", "None", "None", "Low"],
            ["Network", "Low", "Low", "None", "Unchanged", "Low", "None", "None"],
        ]);
        let v = worst_case_vector(&a).unwrap();
        assert_eq!(v.s, Scope::Changed);
        assert_eq!(v.to_string(), "CVSS:3.1/AV:N/AC:L/PR:L/UI:N/S:C/C:L/I:N/A:L");
    }

    #[test]
    fn max_score_requires_alignment() {
        let mut a = arrays(&[["Physical", "High", "High", "Required", "Unchanged", "None", "None", "Low"]]);
        a.pr.push("Low".into());
        assert!(matches!(roll_up(&a, Strategy::MaxScore), Err(RollUpError::LengthMismatch { metric: "PR", .. })));
        assert!(roll_up(&a, Strategy::WorstCase).is_ok());
    }

    #[test]
    fn bad_value_is_named() {
        let a = arrays(&[["Orbital", "High", "High", "Required", "Unchanged", "None", "None", "Low"]]);
        let err = roll_up(&a, Strategy::WorstCase).unwrap_err().to_string();
        assert!(err.contains("Orbital") && err.contains("AV"), "{err}");
    }

    #[test]
    fn ports_by_name() {
        let view = serde_json::json!({
            "av_inherited": ["Physical"], "ac_inherited": ["High"], "pr_inherited": ["High"],
            "ui_inherited": ["Required"], "s_inherited": ["Unchanged"], "c_inherited": ["None"],
            "i_inherited": ["None"], "a_inherited": ["Low"], "score": null
        });
        let a = MetricArrays::from_ports(view.as_object().unwrap()).unwrap();
        assert_eq!(roll_up(&a, Strategy::WorstCase).unwrap().base_score, 1.6);
        let mut partial = view.as_object().unwrap().clone();
        partial.remove("ui_inherited");
        assert_eq!(MetricArrays::from_ports(&partial), Err(RollUpError::MissingPort("UI")));
    }
}
