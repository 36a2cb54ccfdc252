//! Replayable blowup scripts.
//!
//! Text format, one step per line: `P <id>` blows up a point on the named
//! curve, `E <id> <id>` blows up the intersection of two adjacent curves.
//! Ids are 0-based creation order; `#` starts a comment line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{CurveTree, GraphError, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Point(VertexId),
    Edge(VertexId, VertexId),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Point(v) => write!(f, "P {v}"),
            Step::Edge(a, b) => write!(f, "E {a} {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("line {line}: malformed step: {text:?}")]
    Malformed { line: usize, text: String },
    #[error("step {step} ({text}): {source}")]
    BadStep { step: usize, text: String, source: GraphError },
}

/// An ordered list of blowup instructions, replayable from the initial tree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct BlowupScript {
    pub steps: Vec<Step>,
}

impl BlowupScript {
    pub fn new(steps: Vec<Step>) -> Self {
        BlowupScript { steps }
    }

    /// The 10-step script producing the 11-curve tree with label spine
    /// 0,-1,-2,-1,-2,-1,0, four label-1 leaves, and self-intersections -3
    /// and -4 on the two zero-labeled vertices.
    pub fn section2_example() -> Self {
        use Step::*;
        BlowupScript {
            steps: vec![
                Point(VertexId(0)),
                Point(VertexId(0)),
                Point(VertexId(2)),
                Edge(VertexId(2), VertexId(3)),
                Edge(VertexId(2), VertexId(4)),
                Point(VertexId(1)),
                Point(VertexId(6)),
                Point(VertexId(6)),
                Point(VertexId(3)),
                Point(VertexId(3)),
            ],
        }
    }

    /// Folds the steps over the initial tree. Deterministic; fails on the
    /// first step whose ids do not exist at that point.
    pub fn replay(&self) -> Result<CurveTree, ScriptError> {
        let mut t = CurveTree::initial();
        for (i, step) in self.steps.iter().enumerate() {
            t = match *step {
                Step::Point(v) => t.blowup_point(v),
                Step::Edge(a, b) => t.blowup_edge(a, b),
            }
            .map_err(|source| ScriptError::BadStep {
                step: i,
                text: step.to_string(),
                source,
            })?;
        }
        Ok(t)
    }

    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut steps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || ScriptError::Malformed { line: idx + 1, text: raw.to_string() };
            let mut parts = line.split_whitespace();
            let step = match parts.next() {
                Some("P") => {
                    let v = parts.next().and_then(|s| u32::from_str(s).ok()).ok_or_else(malformed)?;
                    Step::Point(VertexId(v))
                }
                Some("E") => {
                    let a = parts.next().and_then(|s| u32::from_str(s).ok()).ok_or_else(malformed)?;
                    let b = parts.next().and_then(|s| u32::from_str(s).ok()).ok_or_else(malformed)?;
                    Step::Edge(VertexId(a), VertexId(b))
                }
                _ => return Err(malformed()),
            };
            if parts.next().is_some() {
                return Err(malformed());
            }
            steps.push(step);
        }
        Ok(BlowupScript { steps })
    }
}

impl fmt::Display for BlowupScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(f, "{step}")?;
        }
        Ok(())
    }
}

impl From<BlowupScript> for Vec<String> {
    fn from(s: BlowupScript) -> Self {
        s.steps.iter().map(|st| st.to_string()).collect()
    }
}

impl TryFrom<Vec<String>> for BlowupScript {
    type Error = ScriptError;

    fn try_from(lines: Vec<String>) -> Result<Self, Self::Error> {
        BlowupScript::parse(&lines.join("\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_script_is_initial() {
        let t = BlowupScript::default().replay().unwrap();
        assert_eq!(t, CurveTree::initial());
    }

    #[test]
    fn parse_roundtrip_with_comments() {
        let text = "# spine first\nP 0\nP 0\n\nE 1 0\n";
        let s = BlowupScript::parse(text).unwrap();
        assert_eq!(
            s.steps,
            vec![
                Step::Point(VertexId(0)),
                Step::Point(VertexId(0)),
                Step::Edge(VertexId(1), VertexId(0)),
            ]
        );
        let back = BlowupScript::parse(&s.to_string()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(
            BlowupScript::parse("P x"),
            Err(ScriptError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            BlowupScript::parse("P 0\nQ 1"),
            Err(ScriptError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            BlowupScript::parse("E 0"),
            Err(ScriptError::Malformed { .. })
        ));
        assert!(matches!(
            BlowupScript::parse("P 0 1"),
            Err(ScriptError::Malformed { .. })
        ));
    }

    #[test]
    fn replay_reports_out_of_range_step() {
        let s = BlowupScript::parse("P 0\nP 5").unwrap();
        let err = s.replay().unwrap_err();
        assert!(matches!(err, ScriptError::BadStep { step: 1, .. }));
    }
}
