//! Subcommand implementations. Every report goes through the deterministic
//! JSON writer; exit codes follow the contract 0 = pass, 1 = invariant
//! failure, 2 = config error, 3 = reconstruction impossible, 4 = CV regime
//! error.

use crate::config::{Experiment, MAX_POVM_DUMP_ORDER};
use crate::jsonout::{format_f64, Json};
use num_complex::Complex64;
use std::path::Path;
use weylmeas::error::Error;
use weylmeas::group::FiniteLcaGroup;
use weylmeas::linalg::CVector;
use weylmeas::{channels, oscillator, phase_space, povm, suite, weyl};

pub struct CommandOutput {
    pub text: String,
    pub exit: i32,
}

pub enum CliError {
    /// Invalid configuration or inputs; exit 2.
    Config(String),
    /// Informationally incomplete fiducial; exit 3, report on stdout.
    Reconstruction { message: String, report: String },
    /// CV validity regime violated; exit 4.
    Regime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Reconstruction { .. } => 3,
            CliError::Regime(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) => m,
            CliError::Reconstruction { message, .. } => message,
            CliError::Regime(m) => m,
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

/// Library errors outside the reconstruction/regime paths mean the inputs
/// were unusable: a config error.
fn config_err(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

fn group_json(group: &FiniteLcaGroup) -> Json {
    Json::object(vec![(
        "moduli",
        Json::Array(
            group
                .moduli()
                .iter()
                .map(|&n| Json::Int(n as i64))
                .collect(),
        ),
    )])
}

fn vector_json(v: &CVector) -> Json {
    Json::Array(v.iter().map(|&z| Json::complex(z)).collect())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub fn cmd_verify(exp: &Experiment) -> Result<CommandOutput, CliError> {
    let group = exp.group()?;
    let psi = exp.fiducial_vector(group.order())?;
    let tol = exp.tolerances()?;
    let report = suite::run_verify(&group, &psi, exp.seed()).map_err(config_err)?;
    let failures = report.failures(&tol);
    let pass = failures.is_empty();

    let doc = Json::object(vec![
        ("group", group_json(&group)),
        ("seed", Json::Int(exp.seed() as i64)),
        ("fiducial", vector_json(&psi)),
        ("completeness_error", Json::Float(report.completeness_error)),
        (
            "min_effect_eigenvalue",
            Json::Float(report.min_effect_eigenvalue),
        ),
        (
            "covariance_max_deviation",
            Json::Float(report.covariance_max_deviation),
        ),
        ("convexity_error", Json::Float(report.convexity_error)),
        ("parseval_error", Json::Float(report.parseval_error)),
        (
            "polarized_parseval_error",
            Json::Float(report.polarized_parseval_error),
        ),
        ("round_trip_error", Json::Float(report.round_trip_error)),
        ("basis_gram_error", Json::Float(report.basis_gram_error)),
        (
            "coherent_isometry_error",
            Json::Float(report.coherent_isometry_error),
        ),
        (
            "vector_resolution_error",
            Json::Float(report.vector_resolution_error),
        ),
        (
            "tomography_residual",
            Json::Float(report.tomography_residual),
        ),
        (
            "tomography_used_fallback_fiducial",
            Json::Bool(report.tomography_used_fallback_fiducial),
        ),
        (
            "partial_trace_deviation",
            Json::Float(report.partial_trace_deviation),
        ),
        ("channel_deviation", Json::Float(report.channel_deviation)),
        ("entropy_deviation", Json::Float(report.entropy_deviation)),
        (
            "failures",
            Json::Array(
                failures
                    .iter()
                    .map(|f| Json::Str(f.to_string()))
                    .collect(),
            ),
        ),
        ("pass", Json::Bool(pass)),
    ]);

    Ok(CommandOutput {
        text: doc.render(),
        exit: if pass { 0 } else { 1 },
    })
}

// ---------------------------------------------------------------------------
// measure
// ---------------------------------------------------------------------------

pub fn cmd_measure(exp: &Experiment) -> Result<CommandOutput, CliError> {
    let group = exp.group()?;
    let psi = exp.fiducial_vector(group.order())?;
    let rho = exp.state_matrix(group.order())?;
    let density = channels::measure(&group, &psi, &rho).map_err(config_err)?;
    let entropy = channels::classical_entropy(&density).map_err(config_err)?;
    let w = group.weight_phase();

    let points: Vec<Json> = group
        .phase_points()
        .enumerate()
        .map(|(qi, q)| {
            let d = density.density()[qi];
            Json::object(vec![
                ("chi", Json::residues(q.chi.residues())),
                ("g", Json::residues(q.g.residues())),
                ("weight", Json::Float(w)),
                ("density", Json::Float(d)),
                ("probability", Json::Float(d * w)),
            ])
        })
        .collect();

    let doc = Json::object(vec![
        ("group", group_json(&group)),
        ("fiducial", vector_json(&psi)),
        ("points", Json::Array(points)),
        (
            "total_probability",
            Json::Float(density.total_probability()),
        ),
        ("entropy_nats", Json::Float(entropy)),
        ("entropy_bits", Json::Float(entropy / 2.0_f64.ln())),
    ]);

    Ok(CommandOutput {
        text: doc.render(),
        exit: 0,
    })
}

// ---------------------------------------------------------------------------
// complementarity
// ---------------------------------------------------------------------------

/// Deviations of the three complementarity identities for one pure input,
/// supplied through --state (a vector).
pub fn cmd_complementarity(exp: &Experiment) -> Result<CommandOutput, CliError> {
    let group = exp.group()?;
    let psi = exp.fiducial_vector(group.order())?;
    let state_spec = exp
        .state
        .clone()
        .unwrap_or(crate::config::StateSpec::Plus);
    let xi = crate::config::materialize_vector(&state_spec, group.order(), "state")?;
    let tol = exp.tolerances()?;

    let report = channels::verify_complementarity(&group, &psi, &xi).map_err(config_err)?;
    let pass = report.partial_trace_deviation <= tol.partial_trace
        && report.channel_deviation <= tol.channel
        && report.entropy_deviation <= tol.entropy;

    let doc = Json::object(vec![
        ("group", group_json(&group)),
        ("fiducial", vector_json(&psi)),
        ("state", vector_json(&xi)),
        (
            "partial_trace_dev",
            Json::Float(report.partial_trace_deviation),
        ),
        ("channel_dev", Json::Float(report.channel_deviation)),
        ("entropy_dev", Json::Float(report.entropy_deviation)),
        (
            "measurement_entropy_nats",
            Json::Float(report.measurement_entropy),
        ),
        (
            "ensemble_entropy_nats",
            Json::Float(report.ensemble_entropy),
        ),
        ("pass", Json::Bool(pass)),
    ]);
    Ok(CommandOutput {
        text: doc.render(),
        exit: if pass { 0 } else { 1 },
    })
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

/// Probabilities come either as the `measure` report (scattered back through
/// each point's chi/g indices) or as a bare JSON array in phase-point order.
fn load_probabilities(
    group: &FiniteLcaGroup,
    path: &Path,
) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))?;

    let count = group.phase_count();
    match &value {
        serde_json::Value::Array(items) => {
            let probs: Option<Vec<f64>> = items.iter().map(|x| x.as_f64()).collect();
            probs.ok_or_else(|| {
                CliError::Config("probability array must hold numbers".to_string())
            })
        }
        serde_json::Value::Object(map) => {
            let points = map
                .get("points")
                .and_then(serde_json::Value::as_array)
                .ok_or_else(|| {
                    CliError::Config("expected a \"points\" array or a bare array".to_string())
                })?;
            let mut probs = vec![f64::NAN; count];
            for point in points {
                let chi: Vec<i64> = point
                    .get("chi")
                    .and_then(serde_json::Value::as_array)
                    .ok_or_else(|| CliError::Config("point without chi".to_string()))?
                    .iter()
                    .filter_map(serde_json::Value::as_i64)
                    .collect();
                let g: Vec<i64> = point
                    .get("g")
                    .and_then(serde_json::Value::as_array)
                    .ok_or_else(|| CliError::Config("point without g".to_string()))?
                    .iter()
                    .filter_map(serde_json::Value::as_i64)
                    .collect();
                let p = point
                    .get("probability")
                    .and_then(serde_json::Value::as_f64)
                    .ok_or_else(|| CliError::Config("point without probability".to_string()))?;
                let point = weylmeas::group::PhasePoint {
                    chi: group.character(&chi).map_err(config_err)?,
                    g: group.element(&g).map_err(config_err)?,
                };
                probs[group.phase_index(&point)] = p;
            }
            if probs.iter().any(|p| p.is_nan()) {
                return Err(CliError::Config(
                    "probability file does not cover every phase point".to_string(),
                ));
            }
            Ok(probs)
        }
        _ => Err(CliError::Config(
            "probability file must hold an object or an array".to_string(),
        )),
    }
}

pub fn cmd_reconstruct(exp: &Experiment, probabilities: &Path) -> Result<CommandOutput, CliError> {
    let group = exp.group()?;
    let psi = exp.fiducial_vector(group.order())?;
    let probs = load_probabilities(&group, probabilities)?;

    let rec = match phase_space::reconstruct_state(&group, &probs, &psi) {
        Ok(rec) => rec,
        Err(Error::NotInformationallyComplete {
            tolerance,
            total,
            first,
            vanishing,
        }) => {
            let report = Json::object(vec![
                ("error", Json::Str("reconstruction impossible".to_string())),
                ("tolerance", Json::Float(tolerance)),
                ("phase_points", Json::Int(total as i64)),
                (
                    "vanishing_points",
                    Json::Array(
                        vanishing
                            .iter()
                            .map(|p| {
                                Json::object(vec![
                                    ("chi", Json::residues(p.chi.residues())),
                                    ("g", Json::residues(p.g.residues())),
                                ])
                            })
                            .collect(),
                    ),
                ),
            ]);
            return Err(CliError::Reconstruction {
                message: format!(
                    "fiducial is not informationally complete; transform vanishes first at {first}"
                ),
                report: report.render(),
            });
        }
        Err(e) => return Err(config_err(e)),
    };

    let negativity_warning = rec.min_eigenvalue < -1e-8;
    let doc = Json::object(vec![
        ("group", group_json(&group)),
        ("fiducial", vector_json(&psi)),
        ("rho", Json::matrix(&rec.rho)),
        ("residual", Json::Float(rec.residual)),
        ("min_eigenvalue", Json::Float(rec.min_eigenvalue)),
        ("negativity_warning", Json::Bool(negativity_warning)),
        ("used_least_squares", Json::Bool(rec.used_least_squares)),
    ]);
    Ok(CommandOutput {
        text: doc.render(),
        exit: 0,
    })
}

// ---------------------------------------------------------------------------
// cv
// ---------------------------------------------------------------------------

pub fn cmd_cv_husimi_grid(exp: &Experiment) -> Result<CommandOutput, CliError> {
    let dim = exp.cv_dim.unwrap_or(40);
    let radius = exp.cv_radius.unwrap_or(3.0);
    let step = exp.cv_step.unwrap_or(0.1);
    let rho = exp.cv_state_matrix(dim)?;
    let rows = oscillator::husimi_grid(&rho, radius, step).map_err(config_err)?;
    let mut text = String::from("re_alpha,im_alpha,q\n");
    for (re, im, q) in rows {
        text.push_str(&format!(
            "{},{},{}\n",
            format_f64(re),
            format_f64(im),
            format_f64(q)
        ));
    }
    Ok(CommandOutput { text, exit: 0 })
}

pub fn cmd_cv_resolution_check(exp: &Experiment) -> Result<CommandOutput, CliError> {
    let dim = exp.cv_dim.unwrap_or(40);
    let radius = exp.cv_radius.unwrap_or(6.0);
    let step = exp.cv_step.unwrap_or(0.05);
    let block = exp.cv_block.unwrap_or(10);
    let tolerance = exp
        .tolerance_overrides
        .iter()
        .rev()
        .find(|(name, _)| name == "resolution")
        .map(|(_, v)| *v)
        .unwrap_or(1e-3);

    let report = oscillator::resolution_check(dim, radius, step, block).map_err(config_err)?;
    let pass = report.max_block_deviation <= tolerance;
    let doc = Json::object(vec![
        ("dim", Json::Int(dim as i64)),
        ("radius", Json::Float(radius)),
        ("step", Json::Float(step)),
        ("block", Json::Int(block as i64)),
        ("grid_points", Json::Int(report.grid_points as i64)),
        (
            "max_block_deviation",
            Json::Float(report.max_block_deviation),
        ),
        ("tolerance", Json::Float(tolerance)),
        ("pass", Json::Bool(pass)),
    ]);
    Ok(CommandOutput {
        text: doc.render(),
        exit: if pass { 0 } else { 1 },
    })
}

pub fn cmd_cv_phase_check(exp: &Experiment) -> Result<CommandOutput, CliError> {
    let dim = exp.cv_dim.unwrap_or(60);
    let x = exp.cv_x.unwrap_or(1.0);
    let y = exp.cv_y.unwrap_or(1.0);
    let block = exp.cv_block.unwrap_or(oscillator::default_phase_block(dim));

    let alpha = Complex64::new(-y, x) / Complex64::new(2.0_f64.sqrt(), 0.0);
    if !oscillator::in_displacement_regime(alpha, dim) {
        return Err(CliError::Regime(format!(
            "displacement regime violated: |alpha|^2 = {:.3} > dim/4 = {:.3}; \
             raise --dim or shrink x, y",
            alpha.norm_sqr(),
            dim as f64 / 4.0
        )));
    }

    let report = match oscillator::weyl_phase_check(x, y, dim, block) {
        Ok(r) => r,
        Err(e @ Error::PhaseRelationBreakdown { .. }) => {
            return Err(CliError::Regime(e.to_string()))
        }
        Err(e) => return Err(config_err(e)),
    };
    let unimodular = (report.omega_modulus - 1.0).abs() <= 1e-8;
    let doc = Json::object(vec![
        ("x", Json::Float(x)),
        ("y", Json::Float(y)),
        ("dim", Json::Int(dim as i64)),
        ("block", Json::Int(block as i64)),
        ("omega", Json::complex(report.omega)),
        ("omega_modulus", Json::Float(report.omega_modulus)),
        ("unimodular", Json::Bool(unimodular)),
        ("block_residual", Json::Float(report.block_residual)),
        ("bch_phase", Json::complex(report.bch_phase)),
        ("printed_phase", Json::complex(report.printed_phase)),
        ("omega_vs_bch", Json::Float(report.omega_vs_bch)),
        ("omega_vs_printed", Json::Float(report.omega_vs_printed)),
    ]);
    Ok(CommandOutput {
        text: doc.render(),
        exit: if unimodular { 0 } else { 1 },
    })
}

// ---------------------------------------------------------------------------
// dump
// ---------------------------------------------------------------------------

pub fn cmd_dump(exp: &Experiment, what: &str) -> Result<CommandOutput, CliError> {
    let group = exp.group()?;
    match what {
        "weyl" => {
            let operators: Vec<Json> = group
                .phase_points()
                .map(|q| {
                    let op = weyl::weyl_matrix(&group, &q).map_err(config_err)?;
                    Ok(Json::object(vec![
                        ("chi", Json::residues(q.chi.residues())),
                        ("g", Json::residues(q.g.residues())),
                        ("matrix", Json::matrix(&op.matrix)),
                    ]))
                })
                .collect::<Result<_, CliError>>()?;
            let doc = Json::object(vec![
                ("group", group_json(&group)),
                ("what", Json::Str("weyl".to_string())),
                ("operators", Json::Array(operators)),
            ]);
            Ok(CommandOutput {
                text: doc.render(),
                exit: 0,
            })
        }
        "povm" => {
            if group.order() > MAX_POVM_DUMP_ORDER {
                return Err(CliError::Config(format!(
                    "size limit: dumping all |G|^2 effects needs |G| <= {MAX_POVM_DUMP_ORDER}, \
                     got {}",
                    group.order()
                )));
            }
            let psi = exp.fiducial_vector(group.order())?;
            let povm = povm::build_povm_from_vector(&group, &psi).map_err(config_err)?;
            let effects: Vec<Json> = group
                .phase_points()
                .map(|q| {
                    Json::object(vec![
                        ("chi", Json::residues(q.chi.residues())),
                        ("g", Json::residues(q.g.residues())),
                        ("matrix", Json::matrix(povm.effect_at(&q))),
                    ])
                })
                .collect();
            let doc = Json::object(vec![
                ("group", group_json(&group)),
                ("what", Json::Str("povm".to_string())),
                ("fiducial", vector_json(&psi)),
                ("effects", Json::Array(effects)),
                ("completeness_error", Json::Float(povm.completeness_error())),
                (
                    "min_effect_eigenvalue",
                    Json::Float(povm.min_effect_eigenvalue()),
                ),
            ]);
            Ok(CommandOutput {
                text: doc.render(),
                exit: 0,
            })
        }
        "transform" => {
            // phase-space transform of the configured state, serialized as
            // one record per phase point
            let rho = exp.state_matrix(group.order())?;
            let f = phase_space::hs_transform(&group, &rho).map_err(config_err)?;
            let records: Vec<Json> = group
                .phase_points()
                .map(|q| {
                    let value = f.value_at(&q);
                    Json::object(vec![
                        ("chi", Json::residues(q.chi.residues())),
                        ("g", Json::residues(q.g.residues())),
                        ("re", Json::Float(value.re)),
                        ("im", Json::Float(value.im)),
                    ])
                })
                .collect();
            let doc = Json::object(vec![
                ("group", group_json(&group)),
                ("what", Json::Str("transform".to_string())),
                ("values", Json::Array(records)),
                (
                    "weighted_norm_sqr",
                    Json::Float(f.weighted_norm_sqr()),
                ),
            ]);
            Ok(CommandOutput {
                text: doc.render(),
                exit: 0,
            })
        }
        other => Err(CliError::Config(format!(
            "unknown dump target {other:?}; expected weyl, povm, or transform"
        ))),
    }
}
