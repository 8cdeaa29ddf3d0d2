//! Seeded verification suites behind the CLI `verify` command: POVM
//! completeness / covariance / convexity, Parseval and round trips, the
//! coherent-transform isometry, tomography, and the complementarity
//! identities, each reported as a single worst-case deviation.
//!
//! Effects are streamed as rank-one operators, so no |G|^2 family of dense
//! matrices is ever materialized; groups beyond desk scale merely get slow,
//! not infeasible.

use crate::channels;
use crate::error::Result;
use crate::group::FiniteLcaGroup;
use crate::linalg::{
    hermitian_eigenvalues, max_abs_diff, outer, CMatrix, CVector,
};
use crate::phase_space::{self, PhaseSpaceFunction};
use crate::povm;
use crate::random;
use crate::weyl::apply_weyl;
use num_complex::Complex64;
use rand::Rng;

/// Pass thresholds for every suite check.
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub completeness: f64,
    pub effect_floor: f64,
    pub covariance: f64,
    pub convexity: f64,
    pub parseval: f64,
    pub round_trip: f64,
    pub basis_gram: f64,
    pub isometry: f64,
    pub tomography: f64,
    pub partial_trace: f64,
    pub channel: f64,
    pub entropy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            completeness: 1e-10,
            effect_floor: 1e-10,
            covariance: 1e-11,
            convexity: 1e-10,
            parseval: 1e-11,
            round_trip: 1e-11,
            basis_gram: 1e-11,
            isometry: 1e-11,
            tomography: 1e-9,
            partial_trace: 1e-10,
            channel: 1e-10,
            entropy: 1e-9,
        }
    }
}

impl Tolerances {
    /// Set one threshold by its report name; returns false for unknown names.
    pub fn set_named(&mut self, name: &str, value: f64) -> bool {
        match name {
            "completeness" => self.completeness = value,
            "effect_floor" => self.effect_floor = value,
            "covariance" => self.covariance = value,
            "convexity" => self.convexity = value,
            "parseval" => self.parseval = value,
            "round_trip" => self.round_trip = value,
            "basis_gram" => self.basis_gram = value,
            "isometry" => self.isometry = value,
            "tomography" => self.tomography = value,
            "partial_trace" => self.partial_trace = value,
            "channel" => self.channel = value,
            "entropy" => self.entropy = value,
            _ => return false,
        }
        true
    }
}

/// Worst-case deviations of every named invariant for one group + fiducial.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub completeness_error: f64,
    pub min_effect_eigenvalue: f64,
    pub covariance_max_deviation: f64,
    pub convexity_error: f64,
    pub parseval_error: f64,
    pub polarized_parseval_error: f64,
    pub round_trip_error: f64,
    pub basis_gram_error: f64,
    pub coherent_isometry_error: f64,
    pub vector_resolution_error: f64,
    pub tomography_residual: f64,
    /// True when the configured fiducial was not informationally complete and
    /// a seeded random fiducial was used for the tomography round trip.
    pub tomography_used_fallback_fiducial: bool,
    pub partial_trace_deviation: f64,
    pub channel_deviation: f64,
    pub entropy_deviation: f64,
}

impl VerifyReport {
    /// Names of the invariants whose deviation exceeds its tolerance.
    pub fn failures(&self, tol: &Tolerances) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.completeness_error > tol.completeness {
            out.push("completeness");
        }
        if self.min_effect_eigenvalue < -tol.effect_floor {
            out.push("effect_floor");
        }
        if self.covariance_max_deviation > tol.covariance {
            out.push("covariance");
        }
        if self.convexity_error > tol.convexity {
            out.push("convexity");
        }
        if self.parseval_error > tol.parseval {
            out.push("parseval");
        }
        if self.polarized_parseval_error > tol.parseval {
            out.push("polarized_parseval");
        }
        if self.round_trip_error > tol.round_trip {
            out.push("round_trip");
        }
        if self.basis_gram_error > tol.basis_gram {
            out.push("basis_gram");
        }
        if self.coherent_isometry_error > tol.isometry {
            out.push("coherent_isometry");
        }
        if self.vector_resolution_error > tol.isometry {
            out.push("vector_resolution");
        }
        if self.tomography_residual > tol.tomography {
            out.push("tomography");
        }
        if self.partial_trace_deviation > tol.partial_trace {
            out.push("partial_trace");
        }
        if self.channel_deviation > tol.channel {
            out.push("channel");
        }
        if self.entropy_deviation > tol.entropy {
            out.push("entropy");
        }
        out
    }

    pub fn pass(&self, tol: &Tolerances) -> bool {
        self.failures(tol).is_empty()
    }
}

fn sample_count(order: usize) -> usize {
    match order {
        0..=8 => 20,
        9..=16 => 8,
        _ => 3,
    }
}

/// Streamed completeness of the rank-one effect family of a pure fiducial:
/// || sum_q w |U_q psi><U_q psi| - I ||_max.
fn streamed_completeness(group: &FiniteLcaGroup, psi: &CVector) -> Result<CMatrix> {
    let n = group.order();
    let w = Complex64::new(group.weight_phase(), 0.0);
    let mut sum = CMatrix::zeros(n, n);
    for q in group.phase_points() {
        let v = apply_weyl(group, &q, psi)?;
        sum += outer(&v, &v) * w;
    }
    Ok(sum)
}

/// Run every suite against `group` with the pure fiducial `psi`.
/// Deterministic for a fixed seed.
pub fn run_verify(group: &FiniteLcaGroup, psi: &CVector, seed: u64) -> Result<VerifyReport> {
    crate::linalg::validate_unit_vector(psi, group.order(), 1e-8)?;
    let n = group.order();
    let count = group.phase_count();
    let w = group.weight_phase();
    let mut rng = random::rng_from_seed(seed);
    let samples = sample_count(n);

    // --- POVM completeness and effect positivity ---
    let sum = streamed_completeness(group, psi)?;
    let completeness_error = max_abs_diff(&sum, &CMatrix::identity(n, n));

    let min_effect_eigenvalue = if n <= 12 {
        let povm = povm::build_povm_from_vector(group, psi)?;
        povm.min_effect_eigenvalue()
    } else {
        // sample effects; each is w |U psi><U psi|, PSD by construction
        let mut min_eig = f64::INFINITY;
        for _ in 0..64 {
            let q = group.phase_point_at(rng.gen_range(0..count));
            let v = apply_weyl(group, &q, psi)?;
            let effect = outer(&v, &v) * Complex64::new(w, 0.0);
            min_eig = min_eig.min(hermitian_eigenvalues(&effect)[0]);
        }
        min_eig
    };

    // --- covariance: exhaustive for |G| <= 4, else 64 sampled pairs ---
    let mut covariance_max_deviation = 0.0_f64;
    if n <= 4 {
        let povm = povm::build_povm_from_vector(group, psi)?;
        for p in group.phase_points() {
            covariance_max_deviation =
                covariance_max_deviation.max(povm.verify_covariance(&p)?.max_deviation);
        }
    } else {
        for _ in 0..64 {
            let p = group.phase_point_at(rng.gen_range(0..count));
            let q = group.phase_point_at(rng.gen_range(0..count));
            let vq = apply_weyl(group, &q, psi)?;
            let moved = apply_weyl(group, &p, &vq)?;
            let target = apply_weyl(group, &group.phase_add(&p, &q)?, psi)?;
            let dev = max_abs_diff(
                &(outer(&moved, &moved) * Complex64::new(w, 0.0)),
                &(outer(&target, &target) * Complex64::new(w, 0.0)),
            );
            covariance_max_deviation = covariance_max_deviation.max(dev);
        }
    }

    // --- convexity of the construction ---
    let v1 = random::unit_vector(n, &mut rng);
    let v2 = random::unit_vector(n, &mut rng);
    let convexity_error = if n <= 16 {
        povm::convexity_error(group, &[0.3, 0.7], &[outer(&v1, &v1), outer(&v2, &v2)])?
    } else {
        // rank-one streaming variant of the same identity
        let mut max_dev = 0.0_f64;
        for _ in 0..32 {
            let q = group.phase_point_at(rng.gen_range(0..count));
            let m1 = apply_weyl(group, &q, &v1)?;
            let m2 = apply_weyl(group, &q, &v2)?;
            let combo = outer(&m1, &m1) * Complex64::new(0.3 * w, 0.0)
                + outer(&m2, &m2) * Complex64::new(0.7 * w, 0.0);
            let mixture = outer(&v1, &v1) * Complex64::new(0.3, 0.0)
                + outer(&v2, &v2) * Complex64::new(0.7, 0.0);
            let direct = crate::weyl::conjugate_state(group, &q, &mixture)?
                * Complex64::new(w, 0.0);
            max_dev = max_dev.max(max_abs_diff(&combo, &direct));
        }
        max_dev
    };

    // --- Parseval, polarized Parseval, round trips ---
    let mut parseval_error = 0.0_f64;
    let mut polarized_parseval_error = 0.0_f64;
    let mut round_trip_error = 0.0_f64;
    for _ in 0..samples {
        let rho = random::hs_operator(n, &mut rng);
        let sigma = random::hs_operator(n, &mut rng);
        let f = phase_space::hs_transform(group, &rho)?;
        let frob: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
        parseval_error =
            parseval_error.max((f.weighted_norm_sqr() - frob).abs() / frob.max(1.0));

        let pairing = phase_space::parseval_pairing(group, &rho, &sigma)?;
        let direct = (&rho * sigma.adjoint()).trace();
        let scale = (frob.sqrt()) * sigma.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        polarized_parseval_error =
            polarized_parseval_error.max((pairing - direct).norm() / scale.max(1.0));

        let back = phase_space::hs_inverse(group, &f)?;
        round_trip_error = round_trip_error.max(max_abs_diff(&back, &rho));
    }
    {
        // transform -> inverse -> transform on a random phase-space function
        let values = CVector::from_fn(count, |_, _| random::complex_gaussian(&mut rng));
        let f = PhaseSpaceFunction::new(group.clone(), values)?;
        let op = phase_space::hs_inverse(group, &f)?;
        let again = phase_space::hs_transform(group, &op)?;
        let dev = (again.values() - f.values())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        round_trip_error = round_trip_error.max(dev);
    }

    // --- orthonormality of the basis functions ---
    let mut basis_gram_error = 0.0_f64;
    if n <= 8 {
        let elements: Vec<_> = group.elements().collect();
        let mut fns = Vec::with_capacity(count);
        for j in &elements {
            for k in &elements {
                fns.push((j.clone(), k.clone(), phase_space::basis_function(group, j, k)?));
            }
        }
        for (j, k, f) in &fns {
            for (jp, kp, fp) in &fns {
                let inner = f.weighted_inner(fp);
                let target = if j == jp && k == kp { 1.0 } else { 0.0 };
                basis_gram_error =
                    basis_gram_error.max((inner - Complex64::new(target, 0.0)).norm());
            }
        }
    } else {
        for _ in 0..64 {
            let j = group.element_at(rng.gen_range(0..n));
            let k = group.element_at(rng.gen_range(0..n));
            let jp = group.element_at(rng.gen_range(0..n));
            let kp = group.element_at(rng.gen_range(0..n));
            let inner = phase_space::basis_function(group, &j, &k)?
                .weighted_inner(&phase_space::basis_function(group, &jp, &kp)?);
            let target = if j == jp && k == kp { 1.0 } else { 0.0 };
            basis_gram_error =
                basis_gram_error.max((inner - Complex64::new(target, 0.0)).norm());
        }
    }

    // --- coherent transform isometry and vector resolution ---
    let mut coherent_isometry_error = 0.0_f64;
    let mut vector_resolution_error = 0.0_f64;
    for _ in 0..samples {
        let xi = random::unit_vector(n, &mut rng);
        let f = povm::coherent_transform(group, psi, &xi)?;
        coherent_isometry_error =
            coherent_isometry_error.max((f.weighted_norm_sqr() - 1.0).abs());
        vector_resolution_error =
            vector_resolution_error.max(povm::coherent_resolution_error(group, psi, &xi, &f)?);
    }

    // --- tomography round trip ---
    let fid = phase_space::fiducial_transform(group, psi)?;
    let min_fid = fid.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let (tomo_fiducial, tomography_used_fallback_fiducial) = if min_fid > 1e-6 {
        (psi.clone(), false)
    } else {
        // the configured fiducial cannot see every phase-space direction;
        // fall back to a seeded random one for the round trip
        let mut candidate = random::unit_vector(n, &mut rng);
        for _ in 0..32 {
            let t = phase_space::fiducial_transform(group, &candidate)?;
            if t.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min) > 1e-4 {
                break;
            }
            candidate = random::unit_vector(n, &mut rng);
        }
        (candidate, true)
    };
    let rho = random::density_matrix(n, &mut rng);
    let density = channels::measure(group, &tomo_fiducial, &rho)?;
    let rec = phase_space::reconstruct_state(group, &density.probabilities(), &tomo_fiducial)?;
    let tomography_residual = max_abs_diff(&rec.rho, &rho);

    // --- complementarity ---
    let mut partial_trace_deviation = 0.0_f64;
    let mut channel_deviation = 0.0_f64;
    let mut entropy_deviation = 0.0_f64;
    for _ in 0..samples {
        let xi = random::unit_vector(n, &mut rng);
        let report = channels::verify_complementarity(group, psi, &xi)?;
        partial_trace_deviation = partial_trace_deviation.max(report.partial_trace_deviation);
        channel_deviation = channel_deviation.max(report.channel_deviation);
        entropy_deviation = entropy_deviation.max(report.entropy_deviation);
    }

    Ok(VerifyReport {
        completeness_error,
        min_effect_eigenvalue,
        covariance_max_deviation,
        convexity_error,
        parseval_error,
        polarized_parseval_error,
        round_trip_error,
        basis_gram_error,
        coherent_isometry_error,
        vector_resolution_error,
        tomography_residual,
        tomography_used_fallback_fiducial,
        partial_trace_deviation,
        channel_deviation,
        entropy_deviation,
    })
}
