//! The two hybrid channels generated by a covariant POVM: the measurement
//! channel (state -> outcome density on phase space) and the posterior
//! ensemble channel (state -> weighted family of post-measurement states),
//! their entropy extensions, the isometric embedding W, and the
//! complementarity checks tying them together.

use crate::error::{Error, Result};
use crate::group::{FiniteLcaGroup, PhasePoint};
use crate::linalg::{
    hermitian_eigenvalues, max_abs_diff, outer, validate_density, validate_unit_vector, CMatrix,
    CVector,
};
use crate::weyl::apply_weyl;
use num_complex::Complex64;

/// Validation tolerance for states and fiducial vectors.
pub const STATE_TOL: f64 = 1e-8;

/// Outcome density p(chi, g) with respect to the phase-space weight;
/// probability per point = density * weight.
#[derive(Debug, Clone)]
pub struct ProbabilityDensity {
    group: FiniteLcaGroup,
    density: Vec<f64>,
}

impl ProbabilityDensity {
    pub fn new(group: FiniteLcaGroup, density: Vec<f64>) -> Result<Self> {
        if density.len() != group.phase_count() {
            return Err(Error::LengthMismatch {
                what: "outcome density",
                expected: group.phase_count(),
                found: density.len(),
            });
        }
        for (i, &d) in density.iter().enumerate() {
            if d < -STATE_TOL {
                return Err(Error::NegativeDensity { index: i, value: d });
            }
        }
        Ok(Self { group, density })
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn density_at(&self, p: &PhasePoint) -> f64 {
        self.density[self.group.phase_index(p)]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let w = self.group.weight_phase();
        self.density.iter().map(|d| d * w).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.group.weight_phase() * self.density.iter().sum::<f64>()
    }
}

/// The post-measurement ensemble: outcome density pi(chi, g) together with
/// the pure posterior state U_{chi,g}|psi> at every phase point.
#[derive(Debug, Clone)]
pub struct PosteriorEnsemble {
    group: FiniteLcaGroup,
    weights: Vec<f64>,
    states: Vec<CMatrix>,
}

impl PosteriorEnsemble {
    pub fn new(group: FiniteLcaGroup, weights: Vec<f64>, states: Vec<CMatrix>) -> Result<Self> {
        if weights.len() != group.phase_count() || states.len() != group.phase_count() {
            return Err(Error::LengthMismatch {
                what: "posterior ensemble",
                expected: group.phase_count(),
                found: weights.len().min(states.len()),
            });
        }
        Ok(Self {
            group,
            weights,
            states,
        })
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    /// Outcome density pi(chi, g).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[CMatrix] {
        &self.states
    }

    /// Average output sum_q weight pi(q) rho_q; a valid state.
    pub fn average_state(&self) -> CMatrix {
        let n = self.group.order();
        let w = self.group.weight_phase();
        let mut avg = CMatrix::zeros(n, n);
        for (pi, state) in self.weights.iter().zip(&self.states) {
            avg += state * Complex64::new(w * pi, 0.0);
        }
        avg
    }
}

/// Outcome density without state validation; shared by `measure` and the
/// reconstruction residual. p(q) = <U_q psi, rho U_q psi>.
pub(crate) fn density_unchecked(
    group: &FiniteLcaGroup,
    psi: &CVector,
    rho: &CMatrix,
) -> Result<Vec<f64>> {
    let n = group.order();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::ShapeMismatch {
            what: "state matrix",
            expected: n,
            rows: rho.nrows(),
            cols: rho.ncols(),
        });
    }
    if psi.len() != n {
        return Err(Error::LengthMismatch {
            what: "fiducial vector",
            expected: n,
            found: psi.len(),
        });
    }
    let mut density = Vec::with_capacity(group.phase_count());
    for q in group.phase_points() {
        let v = apply_weyl(group, &q, psi)?;
        density.push(v.dotc(&(rho * &v)).re);
    }
    Ok(density)
}

/// Measurement channel: the outcome density of `rho` for the covariant POVM
/// seeded by the pure fiducial `psi`.
pub fn measure(
    group: &FiniteLcaGroup,
    psi: &CVector,
    rho: &CMatrix,
) -> Result<ProbabilityDensity> {
    validate_unit_vector(psi, group.order(), STATE_TOL)?;
    validate_density(rho, group.order(), STATE_TOL)?;
    ProbabilityDensity::new(group.clone(), density_unchecked(group, psi, rho)?)
}

/// Ensemble channel: outcome density plus the posterior pure state
/// |U_{chi,g} psi><U_{chi,g} psi| at every phase point.
pub fn ensemble_channel(
    group: &FiniteLcaGroup,
    psi: &CVector,
    rho: &CMatrix,
) -> Result<PosteriorEnsemble> {
    validate_unit_vector(psi, group.order(), STATE_TOL)?;
    validate_density(rho, group.order(), STATE_TOL)?;
    let weights = density_unchecked(group, psi, rho)?;
    let mut states = Vec::with_capacity(group.phase_count());
    for q in group.phase_points() {
        let v = apply_weyl(group, &q, psi)?;
        states.push(outer(&v, &v));
    }
    PosteriorEnsemble::new(group.clone(), weights, states)
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Classical entropy of an outcome density relative to the phase-space
/// weight, in nats: -sum_q weight p(q) ln p(q). Being weight-relative it can
/// be negative (a point mass of probability 1 on a weight-1/2 point scores
/// -ln 2). Densities in [-STATE_TOL, 0) are clamped to zero before the log.
pub fn classical_entropy(p: &ProbabilityDensity) -> Result<f64> {
    let w = p.group().weight_phase();
    let mut s = 0.0;
    for (i, &d) in p.density().iter().enumerate() {
        if d < -STATE_TOL {
            return Err(Error::NegativeDensity { index: i, value: d });
        }
        s -= w * xlogx(d.max(0.0));
    }
    Ok(s)
}

/// Entropy extension to the ensemble, in nats: with sigma(q) = pi(q) rho_q,
/// S = -sum_q weight Tr(sigma ln sigma). For pure posteriors this equals the
/// classical entropy of pi, which is the mechanism behind the measurement /
/// ensemble complementarity.
pub fn ensemble_entropy(e: &PosteriorEnsemble) -> f64 {
    let w = e.group().weight_phase();
    let mut s = 0.0;
    for (pi, state) in e.weights().iter().zip(e.states()) {
        if *pi <= 0.0 {
            continue;
        }
        let sigma = state * Complex64::new(*pi, 0.0);
        for lambda in hermitian_eigenvalues(&sigma) {
            s -= w * xlogx(lambda.max(0.0));
        }
    }
    s
}

/// Von Neumann entropy -Tr(rho ln rho) in nats. The state must be Hermitian,
/// unit trace, and PSD down to an eigenvalue floor of -1e-8; eigenvalues are
/// clamped to [0, 1] after validation.
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    let n = rho.nrows();
    validate_density(rho, n, STATE_TOL)?;
    let mut s = 0.0;
    for lambda in hermitian_eigenvalues(rho) {
        s -= xlogx(lambda.clamp(0.0, 1.0));
    }
    Ok(s)
}

/// Holevo quantity of an ensemble: S(average state) minus the average
/// posterior entropy. Nonnegative; equal to S(average) for pure posteriors.
pub fn holevo_quantity(e: &PosteriorEnsemble) -> Result<f64> {
    let avg = e.average_state();
    let s_avg = von_neumann_entropy(&avg)?;
    let w = e.group().weight_phase();
    let mut mean_posterior = 0.0;
    for (pi, state) in e.weights().iter().zip(e.states()) {
        if *pi <= 0.0 {
            continue;
        }
        let mut s = 0.0;
        for lambda in hermitian_eigenvalues(state) {
            s -= xlogx(lambda.max(0.0));
        }
        mean_posterior += w * pi * s;
    }
    Ok(s_avg - mean_posterior)
}

/// Image of a vector under the isometric embedding W: per phase point the
/// block [W xi](chi, g) = <U_{chi,g} psi, xi> U_{chi,g} psi.
#[derive(Debug, Clone)]
pub struct EmbeddingImage {
    group: FiniteLcaGroup,
    blocks: Vec<CVector>,
}

impl EmbeddingImage {
    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    pub fn blocks(&self) -> &[CVector] {
        &self.blocks
    }

    pub fn block_at(&self, p: &PhasePoint) -> &CVector {
        &self.blocks[self.group.phase_index(p)]
    }

    /// <W xi, W eta> = sum_q weight <block_xi(q), block_eta(q)>.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let acc: Complex64 = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dotc(b))
            .sum();
        acc * self.group.weight_phase()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    /// Per-point trace of [W rho W^†](q) for the pure state behind this
    /// image: Tr |block(q)><block(q)| = ||block(q)||^2.
    pub fn block_traces(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.norm_squared()).collect()
    }

    /// The block operator [W rho W^†](q) = |block(q)><block(q)|.
    pub fn block_operator(&self, p: &PhasePoint) -> CMatrix {
        let b = self.block_at(p);
        outer(b, b)
    }
}

/// W applied to a vector. Linear in `xi`; the fiducial must be a unit vector.
pub fn embedding_w(group: &FiniteLcaGroup, psi: &CVector, xi: &CVector) -> Result<EmbeddingImage> {
    validate_unit_vector(psi, group.order(), STATE_TOL)?;
    if xi.len() != group.order() {
        return Err(Error::LengthMismatch {
            what: "embedded vector",
            expected: group.order(),
            found: xi.len(),
        });
    }
    let mut blocks = Vec::with_capacity(group.phase_count());
    for q in group.phase_points() {
        let u_psi = apply_weyl(group, &q, psi)?;
        let coeff = u_psi.dotc(xi);
        blocks.push(u_psi * coeff);
    }
    Ok(EmbeddingImage {
        group: group.clone(),
        blocks,
    })
}

/// Deviations of the three complementarity identities for a pure input.
#[derive(Debug, Clone)]
pub struct ComplementarityReport {
    /// max_q |p(q) - Tr[W rho W^†](q)|
    pub partial_trace_deviation: f64,
    /// max_q || pi(q) rho_q - [W rho W^†](q) ||_max
    pub channel_deviation: f64,
    /// |S(measurement) - S(ensemble)|
    pub entropy_deviation: f64,
    pub measurement_entropy: f64,
    pub ensemble_entropy: f64,
}

/// Check, for the pure input |xi><xi|, that (a) the measurement density is
/// the per-point partial trace of W rho W^†, (b) the ensemble channel equals
/// W rho W^† pointwise, and (c) the two entropy extensions agree.
pub fn verify_complementarity(
    group: &FiniteLcaGroup,
    psi: &CVector,
    xi: &CVector,
) -> Result<ComplementarityReport> {
    validate_unit_vector(psi, group.order(), STATE_TOL)?;
    validate_unit_vector(xi, group.order(), STATE_TOL)?;
    let rho = outer(xi, xi);

    let density = measure(group, psi, &rho)?;
    let ensemble = ensemble_channel(group, psi, &rho)?;
    let image = embedding_w(group, psi, xi)?;

    let traces = image.block_traces();
    let partial_trace_deviation = density
        .density()
        .iter()
        .zip(&traces)
        .map(|(d, t)| (d - t).abs())
        .fold(0.0, f64::max);

    let mut channel_deviation = 0.0_f64;
    for (qi, q) in group.phase_points().enumerate() {
        let block = image.block_operator(&q);
        let sigma = &ensemble.states()[qi] * Complex64::new(ensemble.weights()[qi], 0.0);
        channel_deviation = channel_deviation.max(max_abs_diff(&sigma, &block));
    }

    let measurement_entropy = classical_entropy(&density)?;
    let ensemble_entropy_value = ensemble_entropy(&ensemble);

    Ok(ComplementarityReport {
        partial_trace_deviation,
        channel_deviation,
        entropy_deviation: (measurement_entropy - ensemble_entropy_value).abs(),
        measurement_entropy,
        ensemble_entropy: ensemble_entropy_value,
    })
}
