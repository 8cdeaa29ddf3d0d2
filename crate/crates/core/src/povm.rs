//! The covariant POVM generated by a fiducial state: effects
//! E(chi, g) = weight * U_{chi,g} rho_0 U_{chi,g}^†, the resolution of the
//! identity, covariance checks, and the coherent transform V.

use crate::error::Result;
use crate::group::{FiniteLcaGroup, PhasePoint};
use crate::linalg::{
    hermitian_eigenvalues, max_abs_diff, validate_density, validate_unit_vector, CMatrix, CVector,
};
use crate::phase_space::PhaseSpaceFunction;
use crate::weyl::{apply_weyl, conjugate_state, weyl_matrix};
use num_complex::Complex64;

/// Fiducial validation tolerance.
pub const FIDUCIAL_TOL: f64 = 1e-10;

/// A covariant POVM over all |G|^2 phase points. Effects are stored
/// pre-weighted by the phase-space weight, so subset sums need no extra
/// factors and the full sum is the identity.
#[derive(Debug, Clone)]
pub struct CovariantPovm {
    group: FiniteLcaGroup,
    fiducial: CMatrix,
    effects: Vec<CMatrix>,
}

/// Build the POVM of a (possibly mixed) fiducial state.
pub fn build_povm(group: &FiniteLcaGroup, fiducial: &CMatrix) -> Result<CovariantPovm> {
    validate_density(fiducial, group.order(), FIDUCIAL_TOL)?;
    let w = Complex64::new(group.weight_phase(), 0.0);
    let mut effects = Vec::with_capacity(group.phase_count());
    for q in group.phase_points() {
        effects.push(conjugate_state(group, &q, fiducial)? * w);
    }
    Ok(CovariantPovm {
        group: group.clone(),
        fiducial: fiducial.clone(),
        effects,
    })
}

/// Convenience for a pure fiducial vector.
pub fn build_povm_from_vector(group: &FiniteLcaGroup, psi: &CVector) -> Result<CovariantPovm> {
    validate_unit_vector(psi, group.order(), FIDUCIAL_TOL.sqrt())?;
    build_povm(group, &crate::linalg::outer(psi, psi))
}

impl CovariantPovm {
    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    pub fn fiducial(&self) -> &CMatrix {
        &self.fiducial
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn effect_at(&self, p: &PhasePoint) -> &CMatrix {
        &self.effects[self.group.phase_index(p)]
    }

    /// Effect of a subset B: sum of the effects of its points. Finitely
    /// additive; the empty set gives 0 and all points give the identity.
    pub fn effect_of_subset(&self, points: &[PhasePoint]) -> Result<CMatrix> {
        let n = self.group.order();
        let mut acc = CMatrix::zeros(n, n);
        for p in points {
            acc += self.effect_at(p);
        }
        Ok(acc)
    }

    /// || sum of all effects - identity ||_max.
    pub fn completeness_error(&self) -> f64 {
        let n = self.group.order();
        let mut sum = CMatrix::zeros(n, n);
        for e in &self.effects {
            sum += e;
        }
        max_abs_diff(&sum, &CMatrix::identity(n, n))
    }

    /// Smallest eigenvalue across all effects (>= -1e-10 for a valid POVM).
    pub fn min_effect_eigenvalue(&self) -> f64 {
        self.effects
            .iter()
            .map(|e| hermitian_eigenvalues(e)[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Covariance under the point p: U_p E(q) U_p^† must equal the effect at
    /// the translated point (chi_p chi_q, g_p + g_q) for every q. Returns the
    /// largest deviation and the point where it occurs.
    pub fn verify_covariance(&self, p: &PhasePoint) -> Result<CovarianceReport> {
        let u = weyl_matrix(&self.group, p)?.matrix;
        let mut max_deviation = 0.0_f64;
        let mut worst_point = self.group.trivial_point();
        for q in self.group.phase_points() {
            let moved = &u * self.effect_at(&q) * u.adjoint();
            let target = self.group.phase_add(p, &q)?;
            let dev = max_abs_diff(&moved, self.effect_at(&target));
            if dev > max_deviation {
                max_deviation = dev;
                worst_point = q.clone();
            }
        }
        Ok(CovarianceReport {
            translation: p.clone(),
            max_deviation,
            worst_point,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CovarianceReport {
    pub translation: PhasePoint,
    pub max_deviation: f64,
    pub worst_point: PhasePoint,
}

/// The coherent transform (V xi)(chi, g) = <U_{chi,g} psi, xi>. An isometry
/// from C^{|G|} into the weighted phase-space Hilbert space.
pub fn coherent_transform(
    group: &FiniteLcaGroup,
    psi: &CVector,
    xi: &CVector,
) -> Result<PhaseSpaceFunction> {
    validate_unit_vector(psi, group.order(), 1e-8)?;
    validate_unit_vector(xi, group.order(), 1e-8)?;
    let mut values = CVector::zeros(group.phase_count());
    for (qi, q) in group.phase_points().enumerate() {
        let u_psi = apply_weyl(group, &q, psi)?;
        values[qi] = u_psi.dotc(xi);
    }
    PhaseSpaceFunction::new(group.clone(), values)
}

/// Reassemble xi from its coherent transform:
/// xi = sum_q weight (V xi)(q) U_q psi. Returns the reconstruction error
/// ||sum - xi||_inf; small iff V is an isometry onto its range.
pub fn coherent_resolution_error(
    group: &FiniteLcaGroup,
    psi: &CVector,
    xi: &CVector,
    transform: &PhaseSpaceFunction,
) -> Result<f64> {
    let w = Complex64::new(group.weight_phase(), 0.0);
    let mut sum = CVector::zeros(group.order());
    for (qi, q) in group.phase_points().enumerate() {
        let u_psi = apply_weyl(group, &q, psi)?;
        sum += u_psi * (w * transform.values()[qi]);
    }
    Ok((sum - xi)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Convexity of the construction: the POVM of a mixture is the mixture of
/// the POVMs. Returns the largest effect deviation.
pub fn convexity_error(
    group: &FiniteLcaGroup,
    weights: &[f64],
    parts: &[CMatrix],
) -> Result<f64> {
    assert_eq!(weights.len(), parts.len());
    let n = group.order();
    let mut mixture = CMatrix::zeros(n, n);
    for (w, part) in weights.iter().zip(parts) {
        mixture += part * Complex64::new(*w, 0.0);
    }
    let mixed_povm = build_povm(group, &mixture)?;
    let part_povms: Vec<CovariantPovm> = parts
        .iter()
        .map(|p| build_povm(group, p))
        .collect::<Result<_>>()?;

    let mut max_dev = 0.0_f64;
    for qi in 0..group.phase_count() {
        let mut combo = CMatrix::zeros(n, n);
        for (w, povm) in weights.iter().zip(&part_povms) {
            combo += &povm.effects()[qi] * Complex64::new(*w, 0.0);
        }
        max_dev = max_dev.max(max_abs_diff(&combo, &mixed_povm.effects()[qi]));
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linalg::{max_abs, outer};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z2() -> FiniteLcaGroup {
        FiniteLcaGroup::cyclic(2).unwrap()
    }

    fn delta0(n: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[0] = c(1.0, 0.0);
        v
    }

    #[test]
    fn delta_fiducial_povm_on_z2() {
        let g = z2();
        let povm = build_povm_from_vector(&g, &delta0(2)).unwrap();
        assert_eq!(povm.effects().len(), 4);
        // each effect is (1/2)|b><b| with b the group element of the point
        for q in g.phase_points() {
            let b = g.index_of(&q.g);
            let mut v = CVector::zeros(2);
            v[b] = c(1.0, 0.0);
            let expected = outer(&v, &v) * c(0.5, 0.0);
            assert!(max_abs_diff(povm.effect_at(&q), &expected) < 1e-14);
        }
        assert!(povm.completeness_error() < 1e-12);
        assert!(povm.min_effect_eigenvalue() > -1e-14);
    }

    #[test]
    fn maximally_mixed_fiducial_gives_constant_effects() {
        let g = z2();
        let fiducial = CMatrix::identity(2, 2) * c(0.5, 0.0);
        let povm = build_povm(&g, &fiducial).unwrap();
        let expected = CMatrix::identity(2, 2) * c(0.25, 0.0);
        for e in povm.effects() {
            assert!(max_abs_diff(e, &expected) < 1e-14);
        }
        assert!(povm.completeness_error() < 1e-13);

        // the 50/50 mixture of the basis projectors is the same fiducial
        let mut v1 = CVector::zeros(2);
        v1[1] = c(1.0, 0.0);
        let mix = outer(&delta0(2), &delta0(2)) * c(0.5, 0.0) + outer(&v1, &v1) * c(0.5, 0.0);
        let povm2 = build_povm(&g, &mix).unwrap();
        for (a, b) in povm.effects().iter().zip(povm2.effects()) {
            assert!(max_abs_diff(a, b) < 1e-14);
        }
    }

    #[test]
    fn build_rejects_invalid_fiducials() {
        let g = z2();
        assert!(matches!(
            build_povm(&g, &CMatrix::identity(2, 2)),
            Err(Error::TraceNotUnit { .. })
        ));
        let mut neg = CMatrix::identity(2, 2);
        neg[(0, 0)] = c(1.5, 0.0);
        neg[(1, 1)] = c(-0.5, 0.0);
        assert!(matches!(
            build_povm(&g, &neg),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let mut skew = CMatrix::identity(2, 2) * c(0.5, 0.0);
        skew[(0, 1)] = c(0.3, 0.0);
        assert!(matches!(
            build_povm(&g, &skew),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn subset_effects_are_additive() {
        let g = z2();
        let povm = build_povm_from_vector(&g, &delta0(2)).unwrap();
        let all: Vec<PhasePoint> = g.phase_points().collect();

        let empty = povm.effect_of_subset(&[]).unwrap();
        assert!(max_abs(&empty) < 1e-30);

        let full = povm.effect_of_subset(&all).unwrap();
        assert!(max_abs_diff(&full, &CMatrix::identity(2, 2)) < 1e-10);

        let (b1, b2) = all.split_at(2);
        let sum = povm.effect_of_subset(b1).unwrap() + povm.effect_of_subset(b2).unwrap();
        assert!(max_abs_diff(&sum, &full) < 1e-13);
    }

    #[test]
    fn covariance_identity_translation_is_exact() {
        let g = z2();
        let povm = build_povm_from_vector(&g, &delta0(2)).unwrap();
        let report = povm.verify_covariance(&g.trivial_point()).unwrap();
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn covariance_worked_qubit_case() {
        // X (1/2)|0><0| X = (1/2)|1><1| = E(chi=0, g=1)
        let g = z2();
        let povm = build_povm_from_vector(&g, &delta0(2)).unwrap();
        let p = PhasePoint {
            chi: g.trivial_character(),
            g: g.element(&[1]).unwrap(),
        };
        let report = povm.verify_covariance(&p).unwrap();
        assert!(report.max_deviation < 1e-13);
    }

    #[test]
    fn covariance_exhaustive_on_z3() {
        let g = FiniteLcaGroup::cyclic(3).unwrap();
        let mut psi = CVector::from_fn(3, |i, _| c(0.4 + 0.3 * i as f64, 0.2 - 0.1 * i as f64));
        psi /= c(psi.norm(), 0.0);
        let povm = build_povm_from_vector(&g, &psi).unwrap();
        for p in g.phase_points() {
            let report = povm.verify_covariance(&p).unwrap();
            assert!(
                report.max_deviation <= 1e-12,
                "covariance broken at {p}: {}",
                report.max_deviation
            );
        }
    }

    #[test]
    fn coherent_transform_of_delta_pair() {
        let g = z2();
        let psi = delta0(2);
        let f = coherent_transform(&g, &psi, &psi).unwrap();
        for q in g.phase_points() {
            let expected = if q.g == g.zero() { 1.0 } else { 0.0 };
            assert!((f.value_at(&q) - c(expected, 0.0)).norm() < 1e-14);
        }
        assert!((f.weighted_norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn coherent_transform_is_isometric_on_z6() {
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        let mut psi = CVector::from_fn(6, |i, _| c(0.3 * i as f64 + 0.2, (i as f64 * 0.9).sin()));
        psi /= c(psi.norm(), 0.0);
        let mut xi = CVector::from_fn(6, |i, _| c((i as f64 * 1.1).cos(), 0.4 - 0.1 * i as f64));
        xi /= c(xi.norm(), 0.0);
        let f = coherent_transform(&g, &psi, &xi).unwrap();
        assert!((f.weighted_norm_sqr() - 1.0).abs() < 1e-11);

        let err = coherent_resolution_error(&g, &psi, &xi, &f).unwrap();
        assert!(err < 1e-11, "vector resolution error {err}");
    }

    #[test]
    fn coherent_transform_validates_norms() {
        let g = z2();
        let not_unit = CVector::from_element(2, c(1.0, 0.0));
        assert!(matches!(
            coherent_transform(&g, &not_unit, &delta0(2)),
            Err(Error::NormNotUnit { .. })
        ));
        assert!(matches!(
            coherent_transform(&g, &delta0(2), &not_unit),
            Err(Error::NormNotUnit { .. })
        ));
    }

    #[test]
    fn povm_of_mixture_is_mixture_of_povms() {
        let g = FiniteLcaGroup::cyclic(3).unwrap();
        let mut v1 = CVector::from_fn(3, |i, _| c(0.5 + 0.2 * i as f64, 0.1 * i as f64));
        v1 /= c(v1.norm(), 0.0);
        let mut v2 = CVector::from_fn(3, |i, _| c((i as f64).cos(), 0.3 - 0.2 * i as f64));
        v2 /= c(v2.norm(), 0.0);
        let err = convexity_error(
            &g,
            &[0.3, 0.7],
            &[outer(&v1, &v1), outer(&v2, &v2)],
        )
        .unwrap();
        assert!(err < 1e-13);
    }
}
