//! Validated experiment settings shared by every subcommand.

use lpcat_core::construction::CeSet;
use lpcat_core::genset::Field;
use lpcat_core::rigor::{ComputableReal, Exponent};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{load_ce_set, rat_from_str};

/// Largest precision any command accepts.
pub const MAX_PRECISION: u32 = 200;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub p: Exponent,
    pub p_spec: String,
    pub field: Field,
    pub ce_set: CeSet,
    pub k: u32,
    pub seed: u64,
    pub fuel: u32,
}

/// The settings as recorded in every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigJson {
    pub p: String,
    pub field: String,
    pub ce_set: String,
    pub k: u32,
    pub seed: u64,
    pub fuel: u32,
}

/// `"3/2"`, `"1.5"`, or `"sqrt(2)"` for the square root of a rational.
pub fn parse_exponent(s: &str) -> CliResult<Exponent> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        let x = rat_from_str(inner)?;
        if x < num_traits::Zero::zero() {
            return Err(CliError::invalid("sqrt of a negative rational"));
        }
        return Ok(Exponent::computable(ComputableReal::sqrt_of(x))?);
    }
    Ok(Exponent::rational(rat_from_str(s)?)?)
}

pub fn parse_field(s: &str) -> CliResult<Field> {
    match s {
        "real" => Ok(Field::Real),
        "complex" => Ok(Field::Complex),
        other => Err(CliError::invalid(format!("field must be real or complex, not {other:?}"))),
    }
}

impl ExperimentConfig {
    pub fn new(p: &str, field: &str, ce_set: &str, k: u32, seed: u64, fuel: u32) -> CliResult<Self> {
        if k > MAX_PRECISION {
            return Err(CliError::invalid(format!("precision {k} exceeds the cap {MAX_PRECISION}")));
        }
        Ok(Self {
            p: parse_exponent(p)?,
            p_spec: p.trim().to_string(),
            field: parse_field(field)?,
            ce_set: load_ce_set(ce_set)?,
            k,
            seed,
            fuel,
        })
    }

    pub fn json(&self) -> ConfigJson {
        ConfigJson {
            p: self.p.label(),
            field: self.field.as_str().to_string(),
            ce_set: self.ce_set.label().to_string(),
            k: self.k,
            seed: self.seed,
            fuel: self.fuel,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        assert!(parse_exponent("3/2").unwrap().rational_fast_path().is_some());
        assert!(parse_exponent("1.5").unwrap().rational_fast_path().is_some());
        assert!(parse_exponent("sqrt(2)").unwrap().rational_fast_path().is_none());
        for bad in ["1/2", "0.9", "sqrt(1/2)", "sqrt(-1)", "p"] {
            assert!(parse_exponent(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn precision_cap() {
        assert!(ExperimentConfig::new("1", "real", "odds", MAX_PRECISION + 1, 0, 10).is_err());
        assert!(ExperimentConfig::new("1", "quaternion", "odds", 10, 0, 10).is_err());
        assert!(ExperimentConfig::new("2", "complex", "primes", 10, 0, 10).is_ok());
    }
}
