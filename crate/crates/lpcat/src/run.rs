//! The subcommands as functions from a config to a report. Nothing here
//! touches the filesystem or the clock.

use std::sync::Arc;

use lpcat_core::construction::{
    approx_e0, descriptor_map_over_f, e0_rep, recover_bits, twisted_genset, CeSet, TwistedGenSet,
};
use lpcat_core::genset::{
    check_ballmap, rep_from_ballmap, scaled_genset, standard_genset, BallMap, Field, GeneratingSet, Schedule,
    VectorRep,
};
use lpcat_core::isometry::{
    classify, descriptor_to_ballmap, rotation_demo, rotation_images, ImageCandidate, IsometryDescriptor,
};
use lpcat_core::lpspace::FiniteVector;
use lpcat_core::rigor::{pow2, CRat, ComputablePoint, Exponent, Rat};
use serde::Serialize;

use crate::config::{ConfigJson, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::format::{rat_str, scalar_to_json, DescriptorJson, ScalarJson, SCHEMA_VERSION};
use crate::report::{BitsJson, CheckJson, E0Json, GensetJson, RotationJson, VerdictJson};
use crate::sample;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GensetChoice {
    /// The standard basis.
    E,
    /// The twisted generating set over the configured c.e. set.
    F,
}

pub fn twisted(cfg: &ExperimentConfig) -> TwistedGenSet {
    twisted_genset(Arc::new(cfg.ce_set.clone()), cfg.p.clone(), cfg.field)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormRecord {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: ConfigJson,
    pub genset: GensetJson,
    pub coeffs: Vec<ScalarJson>,
    pub k: u32,
    /// Within `bound` of the norm.
    pub q: String,
    pub bound: String,
    pub enumeration_stages_consulted: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

pub fn cmd_norm(cfg: &ExperimentConfig, genset: GensetChoice, coeffs: &[CRat]) -> CliResult<NormRecord> {
    if coeffs.is_empty() {
        return Err(CliError::invalid("at least one coefficient is required"));
    }
    let (descriptor, q, stages) = match genset {
        GensetChoice::E => {
            let e = standard_genset(cfg.p.clone(), cfg.field);
            (e.descriptor(), e.norm_query(coeffs, cfg.k)?, 0)
        }
        GensetChoice::F => {
            let f = twisted(cfg);
            let (q, counts) = f.norm_query_traced(coeffs, cfg.k)?;
            let stages = counts.max_index.map_or(0, |n| cfg.ce_set.stage_of(n) + 1);
            (f.descriptor(), q, stages)
        }
    };
    Ok(NormRecord {
        schema: SCHEMA_VERSION,
        command: "norm",
        config: cfg.json(),
        genset: (&descriptor).into(),
        coeffs: coeffs.iter().map(scalar_to_json).collect(),
        k: cfg.k,
        q: rat_str(&q),
        bound: rat_str(&pow2(-(cfg.k as i64))),
        enumeration_stages_consulted: stages,
        elapsed_ms: None,
    })
}

/// One row of a precision sweep of the decide-mode approximation of `e_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub k: u32,
    pub bound: String,
    pub exact_error: String,
    pub queries: usize,
    pub stages: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E0Record {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: ConfigJson,
    pub result: E0Json,
    /// `k = 1 ..= config.k`, when requested.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
}

fn sweep_row(a: &lpcat_core::construction::E0Approx) -> SweepRow {
    SweepRow {
        k: a.k,
        bound: rat_str(a.certified_error_bound()),
        exact_error: a.exact_error.as_ref().map(rat_str).unwrap_or_default(),
        queries: a.decide_queries,
        stages: a.enumeration_index.map_or(0, |n| n + 1),
    }
}

pub fn sweep_e0(set: &CeSet, p: &Exponent, k_max: u32) -> CliResult<Vec<SweepRow>> {
    (1..=k_max).map(|k| Ok(sweep_row(&approx_e0(set, p, k)?))).collect()
}

pub fn cmd_approx_e0(cfg: &ExperimentConfig, sweep: bool) -> CliResult<E0Record> {
    let a = approx_e0(&cfg.ce_set, &cfg.p, cfg.k)?;
    Ok(E0Record {
        schema: SCHEMA_VERSION,
        command: "approx-e0",
        config: cfg.json(),
        result: (&a).into(),
        sweep: if sweep { sweep_e0(&cfg.ce_set, &cfg.p, cfg.k)? } else { Vec::new() },
    })
}

#[derive(Clone, Debug)]
pub enum OracleChoice {
    /// The decide-mode representation of `e_0` over `F`.
    InternalE0,
    /// `lambda e_0` read off the ball map of a surjective isometry.
    Descriptor(IsometryDescriptor),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtractRecord {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: ConfigJson,
    pub oracle: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<DescriptorJson>,
    /// The offset added to every oracle answer, when injecting a fault.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
    pub n_max: usize,
    #[serde(flatten)]
    pub bits: BitsJson,
}

/// The oracle handed to the extraction, before any fault.
pub fn extraction_oracle(cfg: &ExperimentConfig, oracle: &OracleChoice) -> CliResult<VectorRep> {
    match oracle {
        OracleChoice::InternalE0 => Ok(e0_rep(Arc::new(cfg.ce_set.clone()), cfg.p.clone(), "F")),
        OracleChoice::Descriptor(d) => {
            let source = (0..d.range() + 1)
                .find(|&n| d.phi(n) == 0)
                .ok_or_else(|| CliError::invalid("descriptor does not reach e_0, so it is not surjective"))?;
            let f = Arc::new(twisted(cfg));
            let map: Arc<dyn BallMap> = Arc::new(descriptor_map_over_f(d, f)?);
            let center = FiniteVector::basis(source).to_dense();
            Ok(rep_from_ballmap(map, center, cfg.fuel))
        }
    }
}

pub fn cmd_extract(
    cfg: &ExperimentConfig,
    oracle: &OracleChoice,
    n_max: usize,
    fault: Option<&Rat>,
) -> CliResult<ExtractRecord> {
    let mut rep = extraction_oracle(cfg, oracle)?;
    if let Some(offset) = fault {
        rep = rep.perturbed(offset.clone());
    }
    let report = recover_bits(&rep, &cfg.ce_set, &cfg.p, n_max, cfg.fuel as usize)?;
    let (name, descriptor) = match oracle {
        OracleChoice::InternalE0 => ("internal-e0", None),
        OracleChoice::Descriptor(d) => ("descriptor", Some(DescriptorJson::from_descriptor(d))),
    };
    Ok(ExtractRecord {
        schema: SCHEMA_VERSION,
        command: "extract",
        config: cfg.json(),
        oracle: name.into(),
        descriptor,
        fault: fault.map(rat_str),
        n_max,
        bits: (&report).into(),
    })
}

#[derive(Clone, Debug)]
pub enum ImageSource {
    Descriptor(IsometryDescriptor),
    Images(Vec<ImageCandidate>),
    /// The basis images of the rotation of the first two coordinates.
    Rotation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifyRecord {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: ConfigJson,
    pub source: &'static str,
    pub images: usize,
    #[serde(flatten)]
    pub verdict: VerdictJson,
}

/// Basis images of a descriptor: past its range it is a fixed shift, so two
/// extra images cover every pattern.
pub fn descriptor_images(d: &IsometryDescriptor) -> Vec<ImageCandidate> {
    (0..d.range() + 2).map(|n| ImageCandidate::exact(d.image(n))).collect()
}

pub fn cmd_classify(cfg: &ExperimentConfig, source: &ImageSource, tol: u32) -> CliResult<ClassifyRecord> {
    let (name, images) = match source {
        ImageSource::Descriptor(d) => ("descriptor", descriptor_images(d)),
        ImageSource::Images(v) => ("images", v.clone()),
        ImageSource::Rotation => ("rotation", rotation_images(tol)?),
    };
    if images.is_empty() {
        return Err(CliError::invalid("no images to classify"));
    }
    let v = classify(&images, &cfg.p, tol)?;
    Ok(ClassifyRecord {
        schema: SCHEMA_VERSION,
        command: "classify",
        config: cfg.json(),
        source: name,
        images: images.len(),
        verdict: (&v).into(),
    })
}

/// Seeded ball centers for a checking schedule.
pub fn schedule_for(seed: u64, stream: u64, field: Field, balls: usize) -> Schedule {
    let mut rng = sample::stream(seed, stream);
    let mut centers = Vec::from([FiniteVector::basis(0).to_dense()]);
    centers.extend((1..balls).map(|_| sample::vector(&mut rng, 4, 3, field).to_dense()));
    Schedule::standard(centers)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaSample {
    pub coeffs: Vec<ScalarJson>,
    pub q_e: String,
    pub q_f: String,
    /// `|q_e - q_f| < 2^(1-k)`, as both answer the same norm.
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaDemo {
    pub zeta: ScalarJson,
    pub genset: GensetJson,
    pub samples: Vec<ZetaSample>,
    pub check: CheckJson,
    pub classifier: VerdictJson,
    pub note: &'static str,
}

pub fn demo_zeta(cfg: &ExperimentConfig, zeta: &CRat, samples: usize) -> CliResult<ZetaDemo> {
    let field = Field::Complex;
    let e = standard_genset(cfg.p.clone(), field);
    let f = scaled_genset(ComputablePoint::exact(zeta.clone()), cfg.p.clone(), field)?;
    let mut rng = sample::stream(cfg.seed, 11);
    let tol = pow2(1 - cfg.k as i64);
    let mut rows = Vec::with_capacity(samples);
    for _ in 0..samples {
        let len = rand::Rng::gen_range(&mut rng, 1..=5);
        let coeffs = sample::coefficients(&mut rng, len, field);
        let q_e = e.norm_query(&coeffs, cfg.k)?;
        let q_f = f.norm_query(&coeffs, cfg.k)?;
        rows.push(ZetaSample {
            coeffs: coeffs.iter().map(scalar_to_json).collect(),
            agree: num_traits::Signed::abs(&(&q_e - &q_f)) < tol,
            q_e: rat_str(&q_e),
            q_f: rat_str(&q_f),
        });
    }
    let d = IsometryDescriptor::scalar(zeta.clone())?;
    let map = descriptor_to_ballmap(&d, cfg.p.clone(), field)?;
    let schedule = schedule_for(cfg.seed, 12, field, 4);
    let check = check_ballmap(&map, &e, &e, |v| d.apply(v), &schedule)?;
    let verdict = classify(&descriptor_images(&d), &cfg.p, cfg.k)?;
    Ok(ZetaDemo {
        zeta: scalar_to_json(zeta),
        genset: (&f.descriptor()).into(),
        samples: rows,
        check: (&check).into(),
        classifier: (&verdict).into(),
        note: "only the positive direction is checked: the norms over F_zeta match E and multiplication by zeta is a \
               surjective isometry; non-computability of e_0 over F_zeta is not claimed",
    })
}

pub const ROTATION_EXPONENTS: [(i64, i64); 4] = [(1, 1), (3, 2), (2, 1), (3, 1)];

/// `count` seeded rational vectors supported on the first four coordinates.
pub fn rotation_samples(seed: u64, count: usize) -> Vec<FiniteVector> {
    let mut rng = sample::stream(seed, 21);
    (0..count).map(|_| sample::vector(&mut rng, 4, 4, Field::Real)).collect()
}

pub fn demo_rotation(cfg: &ExperimentConfig, samples: usize) -> CliResult<Vec<RotationJson>> {
    let vs = rotation_samples(cfg.seed, samples);
    ROTATION_EXPONENTS
        .iter()
        .map(|&(a, b)| {
            let p = Exponent::from_ratio(a, b)?;
            Ok((&rotation_demo(&p, &vs, cfg.k, 20)?).into())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineDemo {
    pub genset: GensetJson,
    /// `||f_0||` to within `2^-k`; it is 1.
    pub f0_norm: String,
    pub sweep: Vec<SweepRow>,
    pub extraction: BitsJson,
}

pub fn demo_pipeline(cfg: &ExperimentConfig, n_max: usize) -> CliResult<PipelineDemo> {
    let f = twisted(cfg);
    let f0 = f.norm_query(&[CRat::one()], cfg.k)?;
    let sweep = sweep_e0(&cfg.ce_set, &cfg.p, cfg.k.min(12))?;
    let rep = e0_rep(Arc::new(cfg.ce_set.clone()), cfg.p.clone(), f.label());
    let bits = recover_bits(&rep, &cfg.ce_set, &cfg.p, n_max, cfg.fuel as usize)?;
    Ok(PipelineDemo { genset: (&f.descriptor()).into(), f0_norm: rat_str(&f0), sweep, extraction: (&bits).into() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum DemoBody {
    Zeta(ZetaDemo),
    Rotation { rotations: Vec<RotationJson> },
    Pipeline(PipelineDemo),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoRecord {
    pub schema: &'static str,
    pub command: &'static str,
    pub scenario: &'static str,
    pub config: ConfigJson,
    #[serde(flatten)]
    pub body: DemoBody,
}

impl DemoRecord {
    /// The CSV table accompanying the report.
    pub fn table(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.body {
            DemoBody::Zeta(z) => {
                w.write_record(["sample", "q_e", "q_f", "agree"])?;
                for (i, s) in z.samples.iter().enumerate() {
                    w.write_record([i.to_string(), s.q_e.clone(), s.q_f.clone(), s.agree.to_string()])?;
                }
            }
            DemoBody::Rotation { rotations } => {
                w.write_record(["p", "samples", "preserved", "counterexample", "verdict"])?;
                for r in rotations {
                    w.write_record([
                        r.p.clone(),
                        r.samples.to_string(),
                        r.preserved.to_string(),
                        r.counterexample.is_some().to_string(),
                        r.classifier.verdict.to_string(),
                    ])?;
                }
            }
            DemoBody::Pipeline(d) => return sweep_table(&d.sweep),
        }
        Ok(w.into_inner().map_err(|e| CliError::Io(e.into_error()))?)
    }
}

pub fn sweep_table(rows: &[SweepRow]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner().map_err(|e| CliError::Io(e.into_error()))?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scenario {
    Zeta(CRat),
    Rotation,
    PourElRichards,
}

pub fn cmd_demo(cfg: &ExperimentConfig, scenario: &Scenario, samples: usize) -> CliResult<DemoRecord> {
    let (name, body) = match scenario {
        Scenario::Zeta(z) => ("zeta", DemoBody::Zeta(demo_zeta(cfg, z, samples)?)),
        Scenario::Rotation => ("rotation", DemoBody::Rotation { rotations: demo_rotation(cfg, samples)? }),
        Scenario::PourElRichards => ("pour-el-richards", DemoBody::Pipeline(demo_pipeline(cfg, 20)?)),
    };
    Ok(DemoRecord { schema: SCHEMA_VERSION, command: "demo", scenario: name, config: cfg.json(), body })
}
