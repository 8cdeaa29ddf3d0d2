//! Experiment configuration: group and state specifications from flags or a
//! JSON config file, with flags taking precedence.

use num_complex::Complex64;
use serde_json::Value;
use weylmeas::suite::Tolerances;
use weylmeas::{CMatrix, CVector, FiniteLcaGroup};

/// Largest group order the CLI will materialize Weyl matrices for.
pub const MAX_GROUP_ORDER: usize = 256;
/// Largest group order for which the full POVM effect family is dumped.
pub const MAX_POVM_DUMP_ORDER: usize = 64;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// A vector or matrix specification, materialized once the dimension is known.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Delta0,
    Uniform,
    Plus,
    MaximallyMixed,
    Vacuum,
    Fock(usize),
    Vector(Vec<Complex64>),
    Matrix(Vec<Vec<Complex64>>),
}

/// Everything a command needs, merged from defaults, config file, and flags.
#[derive(Debug, Clone, Default)]
pub struct Experiment {
    pub moduli: Option<Vec<u32>>,
    pub fiducial: Option<StateSpec>,
    pub state: Option<StateSpec>,
    pub seed: Option<u64>,
    pub tolerance_overrides: Vec<(String, f64)>,
    pub cv_dim: Option<usize>,
    pub cv_radius: Option<f64>,
    pub cv_step: Option<f64>,
    pub cv_block: Option<usize>,
    pub cv_x: Option<f64>,
    pub cv_y: Option<f64>,
}

impl Experiment {
    pub fn group(&self) -> Result<FiniteLcaGroup, ConfigError> {
        let moduli = self
            .moduli
            .clone()
            .ok_or_else(|| ConfigError("no group given; pass --group or a config file".into()))?;
        let group = FiniteLcaGroup::new(moduli).map_err(|e| ConfigError(e.to_string()))?;
        if group.order() > MAX_GROUP_ORDER {
            return err(format!(
                "size limit: |G| = {} exceeds the dense-matrix limit {MAX_GROUP_ORDER}",
                group.order()
            ));
        }
        Ok(group)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn tolerances(&self) -> Result<Tolerances, ConfigError> {
        let mut tol = Tolerances::default();
        for (name, value) in &self.tolerance_overrides {
            if !tol.set_named(name, *value) {
                return err(format!("unknown tolerance name {name:?}"));
            }
        }
        Ok(tol)
    }

    /// Fiducial vector for the group (default: delta0). Explicit vectors are
    /// normalized; a warning is printed when the correction exceeds 1e-8.
    pub fn fiducial_vector(&self, n: usize) -> Result<CVector, ConfigError> {
        let spec = self.fiducial.clone().unwrap_or(StateSpec::Delta0);
        materialize_vector(&spec, n, "fiducial")
    }

    /// State density matrix for the group (default: maximally mixed).
    pub fn state_matrix(&self, n: usize) -> Result<CMatrix, ConfigError> {
        let spec = self.state.clone().unwrap_or(StateSpec::MaximallyMixed);
        materialize_matrix(&spec, n, "state")
    }

    /// Fock-space state for the cv commands (default: vacuum).
    pub fn cv_state_matrix(&self, dim: usize) -> Result<CMatrix, ConfigError> {
        let spec = self.state.clone().unwrap_or(StateSpec::Vacuum);
        materialize_matrix(&spec, dim, "cv state")
    }
}

fn normalized(mut v: CVector, what: &str) -> Result<CVector, ConfigError> {
    let norm = v.norm();
    if norm < 1e-12 {
        return err(format!("{what} vector has zero norm"));
    }
    if (norm - 1.0).abs() > 1e-8 {
        eprintln!("warning: {what} vector renormalized (norm was {norm:.12})");
    }
    v /= Complex64::new(norm, 0.0);
    Ok(v)
}

pub fn materialize_vector(
    spec: &StateSpec,
    n: usize,
    what: &str,
) -> Result<CVector, ConfigError> {
    match spec {
        StateSpec::Delta0 | StateSpec::Vacuum => {
            let mut v = CVector::zeros(n);
            v[0] = Complex64::new(1.0, 0.0);
            Ok(v)
        }
        StateSpec::Fock(k) => {
            if *k >= n {
                return err(format!("{what}: Fock level {k} outside dimension {n}"));
            }
            let mut v = CVector::zeros(n);
            v[*k] = Complex64::new(1.0, 0.0);
            Ok(v)
        }
        StateSpec::Uniform | StateSpec::Plus => Ok(CVector::from_element(
            n,
            Complex64::new(1.0 / (n as f64).sqrt(), 0.0),
        )),
        StateSpec::Vector(entries) => {
            if entries.len() != n {
                return err(format!(
                    "{what} vector has length {}, expected {n}",
                    entries.len()
                ));
            }
            normalized(CVector::from_fn(n, |i, _| entries[i]), what)
        }
        StateSpec::MaximallyMixed | StateSpec::Matrix(_) => {
            err(format!("{what} must be a vector, not a density matrix"))
        }
    }
}

pub fn materialize_matrix(
    spec: &StateSpec,
    n: usize,
    what: &str,
) -> Result<CMatrix, ConfigError> {
    match spec {
        StateSpec::MaximallyMixed => {
            Ok(CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0))
        }
        StateSpec::Matrix(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return err(format!("{what} matrix must be {n}x{n}"));
            }
            Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
        }
        other => {
            let v = materialize_vector(other, n, what)?;
            Ok(weylmeas::linalg::outer(&v, &v))
        }
    }
}

// --- parsing -------------------------------------------------------------

pub fn parse_moduli(text: &str) -> Result<Vec<u32>, ConfigError> {
    let trimmed = text.trim().trim_start_matches('[').trim_end_matches(']');
    let mut moduli = Vec::new();
    for part in trimmed.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match part.parse::<u32>() {
            Ok(n) => moduli.push(n),
            Err(_) => return err(format!("bad modulus {part:?} in group spec {text:?}")),
        }
    }
    if moduli.is_empty() {
        return err(format!("empty group spec {text:?}"));
    }
    Ok(moduli)
}

/// Complex entries are plain numbers (real) or {"re": .., "im": ..} objects.
fn parse_complex_value(v: &Value) -> Result<Complex64, ConfigError> {
    match v {
        Value::Number(x) => Ok(Complex64::new(
            x.as_f64().ok_or_else(|| ConfigError("bad number".into()))?,
            0.0,
        )),
        Value::Object(map) => {
            let re = map.get("re").and_then(Value::as_f64).unwrap_or(0.0);
            let im = map.get("im").and_then(Value::as_f64).unwrap_or(0.0);
            Ok(Complex64::new(re, im))
        }
        other => err(format!(
            "cannot read a complex number from {other}; use a number or {{\"re\", \"im\"}}"
        )),
    }
}

/// An array of entries is a vector; an array of arrays is a matrix (rows).
fn parse_state_value(v: &Value, what: &str) -> Result<StateSpec, ConfigError> {
    match v {
        Value::String(s) => parse_state_name(s, what),
        Value::Array(items) => {
            if items.is_empty() {
                return err(format!("{what}: empty array"));
            }
            if items.iter().all(Value::is_array) {
                let rows = items
                    .iter()
                    .map(|row| {
                        row.as_array()
                            .unwrap()
                            .iter()
                            .map(parse_complex_value)
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                return Ok(StateSpec::Matrix(rows));
            }
            let entries = items
                .iter()
                .map(parse_complex_value)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(StateSpec::Vector(entries))
        }
        other => err(format!("{what}: cannot parse {other}")),
    }
}

pub fn parse_state_name(s: &str, what: &str) -> Result<StateSpec, ConfigError> {
    let s = s.trim();
    match s {
        "delta0" => return Ok(StateSpec::Delta0),
        "uniform" => return Ok(StateSpec::Uniform),
        "plus" => return Ok(StateSpec::Plus),
        "maximally_mixed" => return Ok(StateSpec::MaximallyMixed),
        "vacuum" => return Ok(StateSpec::Vacuum),
        _ => {}
    }
    if let Some(level) = s.strip_prefix("fock:") {
        return match level.parse::<usize>() {
            Ok(k) => Ok(StateSpec::Fock(k)),
            Err(_) => err(format!("{what}: bad Fock level in {s:?}")),
        };
    }
    if s.starts_with('[') {
        let value: Value = serde_json::from_str(s)
            .map_err(|e| ConfigError(format!("{what}: invalid JSON: {e}")))?;
        return parse_state_value(&value, what);
    }
    err(format!(
        "{what}: unknown preset {s:?} (expected delta0, uniform, plus, maximally_mixed, \
         vacuum, fock:<n>, or a JSON array)"
    ))
}

pub fn parse_tolerance_override(s: &str) -> Result<(String, f64), ConfigError> {
    let Some((name, value)) = s.split_once('=') else {
        return err(format!("--tol expects name=value, got {s:?}"));
    };
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad tolerance value in {s:?}")))?;
    Ok((name.trim().to_string(), value))
}

/// Load an Experiment from a JSON config file.
pub fn load_config_file(path: &std::path::Path) -> Result<Experiment, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| ConfigError(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return err("config file must hold a JSON object");
    };

    let mut exp = Experiment::default();
    for (key, v) in &map {
        match key.as_str() {
            "group" => {
                exp.moduli = Some(match v {
                    Value::Array(items) => items
                        .iter()
                        .map(|x| {
                            x.as_u64()
                                .map(|n| n as u32)
                                .ok_or_else(|| ConfigError("bad modulus in group".into()))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    Value::Object(obj) => obj
                        .get("moduli")
                        .and_then(Value::as_array)
                        .ok_or_else(|| ConfigError("group object needs \"moduli\"".into()))?
                        .iter()
                        .map(|x| {
                            x.as_u64()
                                .map(|n| n as u32)
                                .ok_or_else(|| ConfigError("bad modulus in group".into()))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    other => return err(format!("cannot parse group from {other}")),
                });
            }
            "fiducial" => exp.fiducial = Some(parse_state_value(v, "fiducial")?),
            "state" => exp.state = Some(parse_state_value(v, "state")?),
            "seed" => {
                exp.seed = Some(
                    v.as_u64()
                        .ok_or_else(|| ConfigError("seed must be a nonnegative integer".into()))?,
                )
            }
            "tolerances" => {
                let Value::Object(tols) = v else {
                    return err("tolerances must be an object");
                };
                for (name, tv) in tols {
                    let value = tv
                        .as_f64()
                        .ok_or_else(|| ConfigError(format!("bad tolerance {name}")))?;
                    exp.tolerance_overrides.push((name.clone(), value));
                }
            }
            "cv" => {
                let Value::Object(cv) = v else {
                    return err("cv must be an object");
                };
                for (name, cv_v) in cv {
                    match name.as_str() {
                        "dim" => exp.cv_dim = cv_v.as_u64().map(|x| x as usize),
                        "radius" => exp.cv_radius = cv_v.as_f64(),
                        "step" => exp.cv_step = cv_v.as_f64(),
                        "block" => exp.cv_block = cv_v.as_u64().map(|x| x as usize),
                        "x" => exp.cv_x = cv_v.as_f64(),
                        "y" => exp.cv_y = cv_v.as_f64(),
                        "state" => exp.state = Some(parse_state_value(cv_v, "cv state")?),
                        other => return err(format!("unknown cv key {other:?}")),
                    }
                }
            }
            other => return err(format!("unknown config key {other:?}")),
        }
    }
    Ok(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_parse_both_forms() {
        assert_eq!(parse_moduli("3,2").unwrap(), vec![3, 2]);
        assert_eq!(parse_moduli("[4]").unwrap(), vec![4]);
        assert!(parse_moduli("a,b").is_err());
        assert!(parse_moduli("").is_err());
    }

    #[test]
    fn state_names_parse() {
        assert_eq!(parse_state_name("delta0", "t").unwrap(), StateSpec::Delta0);
        assert_eq!(parse_state_name("plus", "t").unwrap(), StateSpec::Plus);
        assert_eq!(parse_state_name("fock:3", "t").unwrap(), StateSpec::Fock(3));
        let vec = parse_state_name("[{\"re\":1,\"im\":0},{\"re\":0,\"im\":1}]", "t").unwrap();
        match vec {
            StateSpec::Vector(v) => {
                assert_eq!(v.len(), 2);
                assert!((v[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
            }
            other => panic!("expected vector, got {other:?}"),
        }
        assert!(parse_state_name("nonsense", "t").is_err());
    }

    #[test]
    fn vectors_materialize_with_normalization() {
        let spec = StateSpec::Vector(vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0)]);
        let v = materialize_vector(&spec, 2, "t").unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(materialize_vector(&spec, 3, "t").is_err());
    }

    #[test]
    fn tolerance_overrides_parse() {
        let (name, value) = parse_tolerance_override("completeness=1e-9").unwrap();
        assert_eq!(name, "completeness");
        assert!((value - 1e-9).abs() < 1e-20);
        assert!(parse_tolerance_override("junk").is_err());
    }
}
