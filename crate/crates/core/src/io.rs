//! Wire formats.
//!
//! * Loop JSON: `{"n": int, "space": "lambda1"|"lambda2", "harmonics":
//!   [{"k": int, "a": float, "b": float}, ...]}`, harmonics strictly
//!   ascending in `k`, omitted entries meaning zero.
//! * Minimization JSON: `{"action", "gradient_norm", "iterations",
//!   "amplitude", "converged", "loop"}`.
//! * Trajectory CSV with header `t,z,v,energy`.
//! * Saddle-scan CSV with header `n,csc_sum,radius,conjugate_point,is_saddle`.
//!
//! Floats are written in shortest round-trip form.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::action::MinimizeResult;
use crate::dynamics::TrajectorySample;
use crate::error::{Error, Result};
use crate::jacobi::ScanEntry;
use crate::loopspace::{Harmonic, LoopPath, SymmetryClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopDocument {
    pub n: usize,
    pub space: SymmetryClass,
    pub harmonics: Vec<Harmonic>,
}

impl LoopDocument {
    pub fn from_loop(n: usize, path: &LoopPath) -> Self {
        Self {
            n,
            space: path.symmetry(),
            harmonics: path.harmonics(),
        }
    }

    /// Validates ordering and class membership. The truncation order is the
    /// largest listed `k` (at least 1).
    pub fn to_loop(&self) -> Result<LoopPath> {
        if self.n < 2 {
            return Err(Error::Format(format!("n must be at least 2, got {}", self.n)));
        }
        for pair in self.harmonics.windows(2) {
            if pair[1].k <= pair[0].k {
                return Err(Error::Format(format!(
                    "harmonics must be strictly ascending in k ({} follows {})",
                    pair[1].k, pair[0].k
                )));
            }
        }
        let max_harmonic = self.harmonics.iter().map(|h| h.k).max().unwrap_or(1).max(1);
        LoopPath::new(self.space, max_harmonic, &self.harmonics).map_err(|e| Error::Format(e.to_string()))
    }

    /// Accepts either a bare loop document or any object carrying one under
    /// `"loop"` (such as a minimization report).
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let inner = match value.get("loop") {
            Some(inner) => inner.clone(),
            None => value,
        };
        serde_json::from_value(inner).map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeDocument {
    pub action: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub amplitude: f64,
    pub converged: bool,
    #[serde(rename = "loop")]
    pub loop_doc: LoopDocument,
}

impl MinimizeDocument {
    pub fn new(n: usize, result: &MinimizeResult) -> Self {
        Self {
            action: result.action,
            gradient_norm: result.gradient_norm,
            iterations: result.iterations,
            amplitude: result.amplitude,
            converged: result.converged,
            loop_doc: LoopDocument::from_loop(n, &result.loop_path),
        }
    }
}

pub fn format_float(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

pub const TRAJECTORY_HEADER: &str = "t,z,v,energy";
pub const SCAN_HEADER: &str = "n,csc_sum,radius,conjugate_point,is_saddle";

pub fn write_trajectory_csv<W: Write>(mut out: W, samples: &[TrajectorySample]) -> std::io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{}",
            format_float(s.t),
            format_float(s.z),
            format_float(s.v),
            format_float(s.energy)
        )?;
    }
    Ok(())
}

pub fn write_scan_csv<W: Write>(mut out: W, entries: &[ScanEntry]) -> std::io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    for e in entries {
        writeln!(
            out,
            "{},{},{},{},{}",
            e.n,
            format_float(e.csc_sum),
            format_float(e.radius),
            format_float(e.conjugate_point),
            e.is_saddle
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopspace::random_loop;
    use proptest::prelude::*;

    #[test]
    fn parses_minimal_document() {
        let doc = LoopDocument::parse(r#"{"n": 2, "space": "lambda2", "harmonics": [{"k": 1, "a": 0, "b": 1.0}]}"#)
            .unwrap();
        let l = doc.to_loop().unwrap();
        assert_eq!(l.symmetry(), SymmetryClass::Lambda2);
        assert_eq!(l.sine(1), 1.0);

        let empty = LoopDocument::parse(r#"{"n": 3, "space": "lambda1", "harmonics": []}"#).unwrap();
        assert!(empty.to_loop().unwrap().is_zero());
    }

    #[test]
    fn rejects_bad_documents() {
        let even_in_lambda1 = r#"{"n": 2, "space": "lambda1", "harmonics": [{"k": 2, "a": 0.1, "b": 0}]}"#;
        assert!(LoopDocument::parse(even_in_lambda1).unwrap().to_loop().is_err());
        let unsorted = r#"{"n": 2, "space": "lambda2", "harmonics": [{"k": 2, "a": 0, "b": 1}, {"k": 1, "a": 0, "b": 1}]}"#;
        assert!(LoopDocument::parse(unsorted).unwrap().to_loop().is_err());
        assert!(LoopDocument::parse(r#"{"n": 2, "space": "lambda9", "harmonics": []}"#).is_err());
        assert!(LoopDocument::parse("not json").is_err());
        assert!(LoopDocument::parse(r#"{"n": 1, "space": "lambda1", "harmonics": []}"#)
            .unwrap()
            .to_loop()
            .is_err());
    }

    #[test]
    fn accepts_wrapped_loop() {
        let text = r#"{"action": 1.0, "loop": {"n": 2, "space": "lambda1", "harmonics": [{"k": 1, "a": 0.1, "b": 0.2}]}}"#;
        assert_eq!(LoopDocument::parse(text).unwrap().n, 2);
    }

    #[test]
    fn csv_headers() {
        let mut buf = Vec::new();
        write_trajectory_csv(
            &mut buf,
            &[TrajectorySample {
                t: 0.0,
                z: 1e-5,
                v: -0.5,
                energy: -10.0,
            }],
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,z,v,energy\n0.0,0.00001,-0.5,-10.0\n");
    }

    proptest! {
        #[test]
        fn loop_json_round_trips(seed in any::<u64>(), lambda1 in any::<bool>(), k in 1usize..20) {
            let class = if lambda1 { SymmetryClass::Lambda1 } else { SymmetryClass::Lambda2 };
            let l = random_loop(class, k, 0.7, seed).unwrap();
            let text = serde_json::to_string(&LoopDocument::from_loop(4, &l)).unwrap();
            let back = LoopDocument::parse(&text).unwrap().to_loop().unwrap();
            // Lambda1 documents end at the last odd k.
            prop_assert_eq!(back.resized(k), l);
        }
    }
}
