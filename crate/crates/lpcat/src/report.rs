//! Serializable mirrors of the core result types. Rationals are written as
//! exact `"n/d"` strings and enclosures as their endpoints.

use lpcat_core::construction::{BitReport, E0Approx};
use lpcat_core::genset::{BallMapDescriptor, CheckReport, GensetDescriptor, RationalBall, Schedule};
use lpcat_core::isometry::{ClassifierVerdict, RotationReport, RotationSample, Witness, WitnessKind};
use serde::Serialize;

use crate::format::{rat_str, scalar_to_json, vector_to_json, EnclosureJson, ScalarJson, VectorJson};

fn params(p: &[(String, String)]) -> Vec<[String; 2]> {
    p.iter().map(|(k, v)| [k.clone(), v.clone()]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GensetJson {
    pub label: String,
    pub field: String,
    pub kind: String,
    pub params: Vec<[String; 2]>,
}

impl From<&GensetDescriptor> for GensetJson {
    fn from(d: &GensetDescriptor) -> Self {
        Self { label: d.label.clone(), field: d.field.as_str().into(), kind: d.kind.clone(), params: params(&d.params) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallMapJson {
    pub kind: String,
    pub source: String,
    pub target: String,
    pub params: Vec<[String; 2]>,
}

impl From<&BallMapDescriptor> for BallMapJson {
    fn from(d: &BallMapDescriptor) -> Self {
        Self { kind: d.kind.clone(), source: d.source.clone(), target: d.target.clone(), params: params(&d.params) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallJson {
    pub center: Vec<ScalarJson>,
    pub radius: String,
    pub presentation: String,
}

impl From<&RationalBall> for BallJson {
    fn from(b: &RationalBall) -> Self {
        Self {
            center: b.center.iter().map(scalar_to_json).collect(),
            radius: rat_str(&b.radius),
            presentation: b.presentation.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleJson {
    pub centers: Vec<Vec<ScalarJson>>,
    pub radii: Vec<String>,
    pub probes_per_ball: usize,
    pub eps_grid: Vec<u32>,
    pub fuel: u32,
    pub verify_precision: u32,
}

impl From<&Schedule> for ScheduleJson {
    fn from(s: &Schedule) -> Self {
        Self {
            centers: s.centers.iter().map(|c| c.iter().map(scalar_to_json).collect()).collect(),
            radii: s.radii.iter().map(rat_str).collect(),
            probes_per_ball: s.probes_per_ball,
            eps_grid: s.eps_grid.clone(),
            fuel: s.fuel,
            verify_precision: s.verify_precision,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrectnessJson {
    pub input: BallJson,
    pub output: BallJson,
    pub probe: VectorJson,
    pub distance: EnclosureJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckJson {
    pub map: BallMapJson,
    pub schedule: ScheduleJson,
    pub balls_tested: usize,
    pub probes_tested: usize,
    pub no_output: usize,
    pub undetermined: usize,
    pub correctness_violations: Vec<CorrectnessJson>,
    pub convergence_achieved: usize,
    pub convergence_failures: Vec<(Vec<ScalarJson>, u32)>,
    pub passed: bool,
}

impl From<&CheckReport> for CheckJson {
    fn from(r: &CheckReport) -> Self {
        Self {
            map: (&r.map).into(),
            schedule: (&r.schedule).into(),
            balls_tested: r.balls_tested,
            probes_tested: r.probes_tested,
            no_output: r.no_output,
            undetermined: r.undetermined,
            correctness_violations: r
                .correctness_violations
                .iter()
                .map(|w| CorrectnessJson {
                    input: (&w.input).into(),
                    output: (&w.output).into(),
                    probe: vector_to_json(&w.probe),
                    distance: (&w.distance).into(),
                })
                .collect(),
            convergence_achieved: r.convergence_achieved,
            convergence_failures: r
                .convergence_failures
                .iter()
                .map(|f| (f.center.iter().map(scalar_to_json).collect(), f.eps_exponent))
                .collect(),
            passed: r.passed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessJson {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<usize>,
    /// Absent when the straddle concerns the images' radii as a whole.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<usize>,
    pub evidence: Vec<EnclosureJson>,
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        let evidence = w.evidence.iter().map(Into::into).collect();
        match w.kind {
            WitnessKind::Norm { index } => {
                Self { kind: "norm", index: Some(index), first: None, second: None, coordinate: None, evidence }
            }
            WitnessKind::Overlap { first, second, coordinate } => Self {
                kind: "overlap",
                index: None,
                first: Some(first),
                second: Some(second),
                coordinate: (coordinate != usize::MAX).then_some(coordinate),
                evidence,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictJson {
    pub verdict: &'static str,
    pub tol: u32,
    pub witnesses: Vec<WitnessJson>,
    pub undecided: Vec<WitnessJson>,
}

impl From<&ClassifierVerdict> for VerdictJson {
    fn from(v: &ClassifierVerdict) -> Self {
        Self {
            verdict: v.verdict.as_str(),
            tol: v.tol,
            witnesses: v.witnesses.iter().map(Into::into).collect(),
            undecided: v.undecided.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E0Json {
    pub k: u32,
    #[serde(rename = "N1")]
    pub n1: usize,
    pub q1: String,
    #[serde(rename = "M")]
    pub m: u64,
    pub coefficients: Vec<ScalarJson>,
    pub certified_error: EnclosureJson,
    pub certified_error_bound: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_error: Option<String>,
    pub rounding_bits: u32,
    pub decide_queries: usize,
    /// Largest enumeration index read, if any.
    pub enumeration_index: Option<usize>,
}

impl From<&E0Approx> for E0Json {
    fn from(a: &E0Approx) -> Self {
        Self {
            k: a.k,
            n1: a.n1,
            q1: rat_str(&a.q1),
            m: a.m,
            coefficients: a.coefficients.iter().map(scalar_to_json).collect(),
            certified_error: (&a.certified_error).into(),
            certified_error_bound: rat_str(a.certified_error_bound()),
            exact_error: a.exact_error.as_ref().map(rat_str),
            rounding_bits: a.rounding_bits,
            decide_queries: a.decide_queries,
            enumeration_index: a.enumeration_index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BitsJson {
    /// `[n, recovered]`, `null` where the pipeline failed.
    pub bits: Vec<(usize, Option<bool>)>,
    pub ground_truth: Vec<bool>,
    /// `"agreeing/total"`.
    pub ground_truth_agreement: String,
    pub flagged: bool,
    pub failures: Vec<(usize, String)>,
    /// `[k, k', oracle queries]`.
    pub query_log: Vec<(u32, u32, usize)>,
}

impl From<&BitReport> for BitsJson {
    fn from(r: &BitReport) -> Self {
        Self {
            bits: r.bits.clone(),
            ground_truth: r.ground_truth.clone(),
            ground_truth_agreement: format!("{}/{}", r.agreement, r.bits.len()),
            flagged: r.flagged,
            failures: r.failures.clone(),
            query_log: r.query_log.iter().map(|t| (t.k, t.k_prime, t.queries)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotationSampleJson {
    pub v: VectorJson,
    pub norm_v: EnclosureJson,
    pub norm_tv: EnclosureJson,
    pub consistent: bool,
}

impl From<&RotationSample> for RotationSampleJson {
    fn from(s: &RotationSample) -> Self {
        Self { v: vector_to_json(&s.v), norm_v: (&s.norm_v).into(), norm_tv: (&s.norm_tv).into(), consistent: s.consistent }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotationJson {
    pub p: String,
    pub k: u32,
    pub samples: usize,
    pub preserved: usize,
    pub counterexample: Option<RotationSampleJson>,
    pub classifier: VerdictJson,
}

impl From<&RotationReport> for RotationJson {
    fn from(r: &RotationReport) -> Self {
        Self {
            p: r.p.clone(),
            k: r.k,
            samples: r.samples.len(),
            preserved: r.preserved,
            counterexample: r.counterexample.as_ref().map(Into::into),
            classifier: (&r.classifier).into(),
        }
    }
}
