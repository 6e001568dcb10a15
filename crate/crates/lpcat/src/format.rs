//! On-disk formats: canonical vectors, c.e.-set specs, isometry descriptors
//! and image files. Every document may carry a `schema` tag; when present it
//! must equal [`SCHEMA_VERSION`].

use std::collections::BTreeMap;
use std::path::Path;

use lpcat_core::construction::CeSet;
use lpcat_core::isometry::{ImageCandidate, IsometryDescriptor};
use lpcat_core::lpspace::FiniteVector;
use lpcat_core::rigor::{parse_rat, CRat, Enclosure, Rat};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "lpcat/1";

/// An integer as a JSON number when it fits in `i64`, otherwise a decimal
/// string. Both forms are accepted on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Int {
    Small(i64),
    Big(String),
}

impl Int {
    pub fn from_big(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(n.to_string()),
        }
    }

    pub fn to_big(&self) -> CliResult<BigInt> {
        match self {
            Int::Small(v) => Ok(BigInt::from(*v)),
            Int::Big(s) => s.trim().parse().map_err(|_| CliError::invalid(format!("not an integer: {s:?}"))),
        }
    }
}

fn ratio(num: &Int, den: &Int) -> CliResult<Rat> {
    let d = den.to_big()?;
    if d.is_zero() {
        return Err(CliError::invalid("zero denominator"));
    }
    Ok(Rat::new(num.to_big()?, d))
}

/// `[re_num, re_den, im_num, im_den]`.
pub type ScalarJson = [Int; 4];

pub fn scalar_to_json(z: &CRat) -> ScalarJson {
    [
        Int::from_big(z.re.numer()),
        Int::from_big(z.re.denom()),
        Int::from_big(z.im.numer()),
        Int::from_big(z.im.denom()),
    ]
}

pub fn scalar_from_json(s: &ScalarJson) -> CliResult<CRat> {
    Ok(CRat::new(ratio(&s[0], &s[1])?, ratio(&s[2], &s[3])?))
}

/// `[index, re_num, re_den, im_num, im_den]`, sorted by index.
pub type VectorJson = Vec<[Int; 5]>;

pub fn vector_to_json(v: &FiniteVector) -> VectorJson {
    v.iter()
        .map(|(n, a)| {
            let [a, b, c, d] = scalar_to_json(a);
            [Int::Small(n as i64), a, b, c, d]
        })
        .collect()
}

pub fn vector_from_json(v: &VectorJson) -> CliResult<FiniteVector> {
    let mut out = FiniteVector::zero();
    let mut last = None;
    for [n, a, b, c, d] in v {
        let n = n
            .to_big()?
            .to_usize()
            .ok_or_else(|| CliError::invalid("vector index must be a natural number"))?;
        if last.is_some_and(|m| m >= n) {
            return Err(CliError::invalid("vector entries must be sorted by strictly increasing index"));
        }
        last = Some(n);
        out.add_at(n, &scalar_from_json(&[a.clone(), b.clone(), c.clone(), d.clone()])?);
    }
    Ok(out)
}

pub fn rat_str(x: &Rat) -> String {
    x.to_string()
}

/// Exact rational from `"a"`, `"a/b"` or a finite decimal.
pub fn rat_from_str(s: &str) -> CliResult<Rat> {
    parse_rat(s.trim()).ok_or_else(|| CliError::invalid(format!("not a rational: {s:?}")))
}

/// Scalar from `"re"` or `"re:im"` with rational parts.
pub fn scalar_from_str(s: &str) -> CliResult<CRat> {
    match s.split_once(':') {
        Some((re, im)) => Ok(CRat::new(rat_from_str(re)?, rat_from_str(im)?)),
        None => Ok(CRat::real(rat_from_str(s)?)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnclosureJson {
    pub lo: String,
    pub hi: String,
}

impl From<&Enclosure> for EnclosureJson {
    fn from(e: &Enclosure) -> Self {
        Self { lo: rat_str(e.lo()), hi: rat_str(e.hi()) }
    }
}

fn check_schema(schema: &Option<String>) -> CliResult<()> {
    match schema {
        Some(s) if s != SCHEMA_VERSION => Err(CliError::invalid(format!(
            "unsupported schema {s:?}, expected {SCHEMA_VERSION:?}"
        ))),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CeSetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub label: String,
    /// `odds`, `primes`, `explicit` or `throttled`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<u64>>,
    /// `[element, stage]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delays: Option<Vec<[u64; 2]>>,
}

impl CeSetSpec {
    pub fn build(&self) -> CliResult<CeSet> {
        check_schema(&self.schema)?;
        let elements: Vec<usize> = self.elements.iter().flatten().map(|&n| n as usize).collect();
        let delays: Vec<[usize; 2]> = self.delays.iter().flatten().map(|&[a, b]| [a as usize, b as usize]).collect();
        if elements.contains(&0) || delays.iter().any(|d| d[0] == 0) {
            return Err(CliError::invalid("a c.e. set spec may not contain 0"));
        }
        let needs_elements = |what: &str| -> CliResult<()> {
            if self.elements.is_none() {
                return Err(CliError::invalid(format!("kind {what:?} needs `elements`")));
            }
            Ok(())
        };
        let set = match self.kind.as_str() {
            "odds" | "primes" => {
                if self.elements.is_some() || self.delays.is_some() {
                    return Err(CliError::invalid(format!("kind {:?} takes no elements or delays", self.kind)));
                }
                if self.kind == "odds" { CeSet::odds() } else { CeSet::primes() }
            }
            "explicit" => {
                needs_elements("explicit")?;
                if self.delays.is_some() {
                    return Err(CliError::invalid("kind \"explicit\" takes no delays; use \"throttled\""));
                }
                CeSet::explicit(self.label.clone(), elements)?
            }
            "throttled" => {
                needs_elements("throttled")?;
                let mut map = BTreeMap::new();
                for [e, s] in delays {
                    if map.insert(e, s).is_some() {
                        return Err(CliError::invalid(format!("element {e} delayed twice")));
                    }
                }
                CeSet::throttled(self.label.clone(), elements, map)?
            }
            other => return Err(CliError::invalid(format!("unknown c.e. set kind {other:?}"))),
        };
        Ok(set)
    }
}

/// A built-in name (`odds`, `primes`) or the path of a spec file.
pub fn load_ce_set(arg: &str) -> CliResult<CeSet> {
    match arg {
        "odds" => Ok(CeSet::odds()),
        "primes" => Ok(CeSet::primes()),
        path => read_json::<CeSetSpec>(Path::new(path))?.build(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    /// `[n, phi(n)]` pairs; indices without a pair map to `n + shift`.
    pub phi: Vec<[usize; 2]>,
    pub lambdas: Vec<ScalarJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<usize>,
    /// `lambda_n` past the listed ones; 1 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_tail: Option<ScalarJson>,
}

impl DescriptorJson {
    pub fn build(&self) -> CliResult<IsometryDescriptor> {
        check_schema(&self.schema)?;
        let mut pairs = BTreeMap::new();
        for [n, m] in &self.phi {
            if pairs.insert(*n, *m).is_some() {
                return Err(CliError::invalid(format!("phi({n}) given twice")));
            }
        }
        let lambdas = self.lambdas.iter().map(scalar_from_json).collect::<CliResult<Vec<_>>>()?;
        let tail = match &self.lambda_tail {
            Some(t) => scalar_from_json(t)?,
            None => CRat::one(),
        };
        Ok(IsometryDescriptor::new(pairs, self.shift.unwrap_or(0), lambdas, tail)?)
    }

    pub fn from_descriptor(d: &IsometryDescriptor) -> Self {
        Self {
            schema: Some(SCHEMA_VERSION.into()),
            phi: (0..d.range()).map(|n| [n, d.phi(n)]).collect(),
            lambdas: (0..d.range()).map(|n| scalar_to_json(d.lambda(n))).collect(),
            shift: Some(d.phi(d.range()) - d.range()),
            lambda_tail: Some(scalar_to_json(d.lambda(d.range()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageJson {
    pub approx: VectorJson,
    /// Norm distance to the true image; exact when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImagesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub images: Vec<ImageJson>,
}

impl ImagesFile {
    pub fn build(&self) -> CliResult<Vec<ImageCandidate>> {
        check_schema(&self.schema)?;
        self.images
            .iter()
            .map(|g| {
                let radius = match &g.radius {
                    Some(r) => rat_from_str(r)?,
                    None => Rat::zero(),
                };
                if radius < Rat::zero() {
                    return Err(CliError::invalid("negative image radius"));
                }
                Ok(ImageCandidate { approx: vector_from_json(&g.approx)?, radius })
            })
            .collect()
    }

    pub fn from_images(images: &[ImageCandidate]) -> Self {
        Self {
            schema: Some(SCHEMA_VERSION.into()),
            images: images
                .iter()
                .map(|g| ImageJson {
                    approx: vector_to_json(&g.approx),
                    radius: (!g.radius.is_zero()).then(|| rat_str(&g.radius)),
                })
                .collect(),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Pretty JSON with a trailing newline; the byte form compared for determinism.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("reports serialize");
    out.push(b'\n');
    out
}
