//! Versioned JSON artifacts and their re-verification.
//!
//! Every artifact carries a `schema` tag, the configuration that produced it,
//! and a payload. Exact payloads re-verify by re-running the computation they
//! claim; diagnostic payloads (double-precision averages and the like) only
//! check structure. Verification never trusts stored values it can recompute.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::index_sets::IndexSet;
use crate::interpolation::{verify_interpolation, Interpolant, InterpolationReport, TargetSequence};
use crate::nilseq::{verify_two_step_witness, TwoStepWitness};
use crate::rat::serde_rat;
use crate::recurrence::{doubling_orbit, DyadicOrbitPoint, PartitionTrace, SupMinResult, ThresholdOutcome};
use crate::riesz::{correlation_gap_check, GapReport};
use crate::separability::{NdOutcome, NiceReport, PairSearchOutcome, SeparabilityOutcome};
use crate::torus::CircleInterval;

pub const SCHEMA_SEPARABILITY: &str = "interpolab/separability/v1";
pub const SCHEMA_ND_SEARCH: &str = "interpolab/nd-search/v1";
pub const SCHEMA_SUPMIN: &str = "interpolab/supmin/v1";
pub const SCHEMA_THRESHOLD: &str = "interpolab/threshold/v1";
pub const SCHEMA_PARTITION: &str = "interpolab/partition/v1";
pub const SCHEMA_NICE_REPORT: &str = "interpolab/nice-report/v1";
pub const SCHEMA_INTERPOLANT: &str = "interpolab/interpolant/v1";
pub const SCHEMA_TWO_STEP: &str = "interpolab/two-step/v1";
pub const SCHEMA_ORBIT: &str = "interpolab/orbit/v1";
pub const SCHEMA_RIESZ_GAPS: &str = "interpolab/riesz-gaps/v1";
pub const SCHEMA_INDEX_SET: &str = "interpolab/index-set/v1";
pub const SCHEMA_PAIR_SEARCH: &str = "interpolab/pair-search/v1";
pub const SCHEMA_AVERAGE: &str = "interpolab/average/v1";
pub const SCHEMA_WEYL: &str = "interpolab/weyl/v1";
pub const SCHEMA_DEMO: &str = "interpolab/demo/v1";
pub const SCHEMA_LIMINF: &str = "interpolab/liminf/v1";
pub const SCHEMA_NONCONVERGENT: &str = "interpolab/nonconvergent/v1";

/// Envelope written to disk: schema tag, producing configuration, payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact {
    pub schema: String,
    pub config: Value,
    pub payload: Value,
}

impl Artifact {
    pub fn new<T: Serialize>(schema: &str, config: Value, payload: &T) -> Result<Self> {
        Ok(Artifact {
            schema: schema.to_string(),
            config,
            payload: serde_json::to_value(payload)
                .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))?,
        })
    }

    /// Deterministic byte rendering (struct field order, no maps).
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("artifact serializes");
        out.push(b'\n');
        out
    }

    /// Content hash of the byte rendering.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_json_bytes());
        format!("{:x}", h.finalize())
    }
}

/// Threshold outcomes only make sense alongside the eps they chased.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdPayload {
    #[serde(with = "serde_rat")]
    pub eps: BigRational,
    pub outcome: ThresholdOutcome,
}

/// Interpolants are audited against the nodes and targets they were built for.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InterpolantPayload {
    pub e: IndexSet,
    pub b: TargetSequence,
    pub interpolant: Interpolant,
    pub report: InterpolationReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoStepPayload {
    pub witness: TwoStepWitness,
    pub upto: usize,
    #[serde(with = "serde_rat")]
    pub c: BigRational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitPayload {
    pub n_max: u32,
    pub forbidden: CircleInterval,
    pub points: Vec<DyadicOrbitPoint>,
}

fn payload<T: for<'de> Deserialize<'de>>(artifact: &Artifact) -> Result<T> {
    serde_json::from_value(artifact.payload.clone())
        .map_err(|e| Error::Parse(format!("payload does not match schema {}: {e}", artifact.schema)))
}

/// Re-runs the exact verification appropriate to the artifact's schema.
/// Returns a short human-readable description of what was checked.
pub fn verify_artifact(artifact: &Artifact) -> Result<String> {
    match artifact.schema.as_str() {
        SCHEMA_SEPARABILITY => {
            match payload::<SeparabilityOutcome>(artifact)? {
                SeparabilityOutcome::Separable(cert) => {
                    cert.verify()?;
                    Ok(format!("separability certificate re-verified (dim {})", cert.dim))
                }
                SeparabilityOutcome::NotSeparable(v) => {
                    v.verify()?;
                    Ok("non-separability verdict re-verified (exact 1-D sup)".into())
                }
            }
        }
        SCHEMA_ND_SEARCH => match payload::<NdOutcome>(artifact)? {
            NdOutcome::Certificate(cert) => {
                cert.verify()?;
                Ok(format!("search certificate re-verified (dim {})", cert.dim))
            }
            NdOutcome::Unknown { candidates_tried } => {
                Ok(format!("inconclusive search ({candidates_tried} candidates); nothing to verify"))
            }
        },
        SCHEMA_SUPMIN => {
            let r: SupMinResult = payload(artifact)?;
            r.verify()?;
            Ok("sup-min value and maximizer re-verified".into())
        }
        SCHEMA_THRESHOLD => {
            let p: ThresholdPayload = payload(artifact)?;
            match &p.outcome {
                ThresholdOutcome::Reached { n, block, certificate } => {
                    certificate.verify()?;
                    if certificate.value >= p.eps {
                        return Err(Error::InvariantViolation(
                            "threshold certificate not below eps".into(),
                        ));
                    }
                    if block.max() != Some(n) {
                        return Err(Error::InvariantViolation(
                            "threshold bound does not match its block".into(),
                        ));
                    }
                    Ok(format!("threshold N = {n} re-verified"))
                }
                ThresholdOutcome::NotReached { final_sup } => {
                    final_sup.verify()?;
                    if final_sup.value < p.eps {
                        return Err(Error::InvariantViolation(
                            "final sup is below eps but threshold claims NotReached".into(),
                        ));
                    }
                    Ok("NotReached outcome re-verified".into())
                }
            }
        }
        SCHEMA_PARTITION => {
            let trace: PartitionTrace = payload(artifact)?;
            trace.verify()?;
            Ok(format!("partition trace re-verified ({} stages)", trace.stages.len()))
        }
        SCHEMA_NICE_REPORT => {
            let report: NiceReport = payload(artifact)?;
            let fresh = crate::separability::nice_collections(&report.f, &report.epsilon)?;
            if fresh.pre_dedup_count != report.pre_dedup_count
                || fresh.distinct_collections != report.distinct_collections
                || fresh.distinct_nice_sets != report.distinct_nice_sets
                || fresh.bound != report.bound
            {
                return Err(Error::InvariantViolation("nice-report recomputation differs".into()));
            }
            Ok("nice-collection census recomputed and matched".into())
        }
        SCHEMA_INTERPOLANT => {
            let p: InterpolantPayload = payload(artifact)?;
            let fresh = verify_interpolation(&p.interpolant, &p.e, &p.b)?;
            if !fresh.ok {
                return Err(Error::InvariantViolation("node error exceeds 2^-depth".into()));
            }
            if fresh.max_error != p.report.max_error {
                return Err(Error::InvariantViolation("stored max error differs".into()));
            }
            Ok(format!(
                "interpolant re-audited at {} nodes (max error {})",
                p.e.len(),
                crate::rat::rat_str(&fresh.max_error)
            ))
        }
        SCHEMA_TWO_STEP => {
            let p: TwoStepPayload = payload(artifact)?;
            let report = verify_two_step_witness(&p.witness, p.upto, &p.c)?;
            if !report.ok {
                return Err(Error::InvariantViolation("witness membership checks failed".into()));
            }
            Ok(format!("two-step witness re-verified on {} pairs", report.pair_checks.len()))
        }
        SCHEMA_ORBIT => {
            let p: OrbitPayload = payload(artifact)?;
            let fresh = doubling_orbit(p.n_max, &p.forbidden)?;
            if fresh.len() != p.points.len() {
                return Err(Error::InvariantViolation("orbit length differs".into()));
            }
            for (a, b) in fresh.iter().zip(&p.points) {
                if a.mantissa != b.mantissa || a.digits != b.digits || a.verdict != b.verdict {
                    return Err(Error::InvariantViolation(format!(
                        "orbit point n = {} differs on recomputation",
                        b.n
                    )));
                }
            }
            Ok(format!("doubling orbit recomputed and matched ({} points)", p.points.len()))
        }
        SCHEMA_RIESZ_GAPS => {
            let report: GapReport = payload(artifact)?;
            let n_max = report.rows.len() as u32;
            let fresh = correlation_gap_check(n_max, &report.delta, report.delta_seed)?;
            if fresh.min_gap != report.min_gap || fresh.rows.len() != report.rows.len() {
                return Err(Error::InvariantViolation("gap report recomputation differs".into()));
            }
            for (a, b) in fresh.rows.iter().zip(&report.rows) {
                if a.gap != b.gap || a.a_power != b.a_power {
                    return Err(Error::InvariantViolation(format!(
                        "gap row n = {} differs on recomputation",
                        b.n
                    )));
                }
            }
            Ok(format!("correlation gaps recomputed and matched (min {})", crate::rat::rat_str(&report.min_gap)))
        }
        SCHEMA_INDEX_SET => {
            let set: IndexSet = payload(artifact)?;
            IndexSet::new(set.elements().to_vec(), None)?;
            Ok(format!("index set structurally valid ({} elements)", set.len()))
        }
        SCHEMA_PAIR_SEARCH => match payload::<PairSearchOutcome>(artifact)? {
            PairSearchOutcome::Found { verdict, .. } => {
                verdict.verify()?;
                Ok("refuted pair re-verified".into())
            }
            PairSearchOutcome::NotFound { pairs_tried } => {
                Ok(format!("no refuted pair in {pairs_tried} tries; nothing to verify"))
            }
        },
        SCHEMA_AVERAGE | SCHEMA_WEYL | SCHEMA_DEMO | SCHEMA_LIMINF | SCHEMA_NONCONVERGENT => {
            Ok("diagnostic artifact; structural check only".into())
        }
        other => Err(Error::Parse(format!("unknown artifact schema `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::separability::separability_1d;

    #[test]
    fn artifact_round_trip_and_verify() {
        let a = IndexSet::from_i64s(&[4]).unwrap();
        let b = IndexSet::from_i64s(&[5]).unwrap();
        let outcome = separability_1d(&a, &b, &rat(1, 2)).unwrap();
        let artifact = Artifact::new(
            SCHEMA_SEPARABILITY,
            serde_json::json!({"A": "4", "B": "5", "eps": "1/2"}),
            &outcome,
        )
        .unwrap();
        let bytes = artifact.to_json_bytes();
        let parsed: Artifact = serde_json::from_slice(&bytes).unwrap();
        let msg = verify_artifact(&parsed).unwrap();
        assert!(msg.contains("re-verified"));
        assert_eq!(artifact.content_hash(), parsed.content_hash());
    }

    #[test]
    fn tampering_is_detected() {
        let a = IndexSet::from_i64s(&[4]).unwrap();
        let b = IndexSet::from_i64s(&[5]).unwrap();
        let outcome = separability_1d(&a, &b, &rat(1, 2)).unwrap();
        let artifact =
            Artifact::new(SCHEMA_SEPARABILITY, serde_json::Value::Null, &outcome).unwrap();
        let mut tampered = artifact.clone();
        tampered.payload["achieved"] = serde_json::json!("3/4");
        assert!(verify_artifact(&tampered).is_err());
        // Hash changes with content.
        assert_ne!(artifact.content_hash(), tampered.content_hash());
    }

    #[test]
    fn unknown_schema_is_rejected() {
        let artifact = Artifact {
            schema: "interpolab/unheard-of/v9".into(),
            config: serde_json::Value::Null,
            payload: serde_json::Value::Null,
        };
        assert!(verify_artifact(&artifact).is_err());
    }
}
