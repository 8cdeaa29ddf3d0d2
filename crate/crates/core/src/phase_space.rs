//! The isometry between Hilbert-Schmidt operators on C^{|G|} and
//! square-summable functions on the phase space dual(G) x G, its inverse,
//! the matrix-unit basis functions, and linear-inversion state
//! reconstruction from covariant measurement statistics.

use crate::error::{Error, Result};
use crate::group::{FiniteLcaGroup, GroupElement, PhasePoint};
use crate::linalg::{hermitian_eigenvalues, hermitize, CMatrix, CVector};
use num_complex::Complex64;

/// Fiducial transform values below this are treated as vanishing; the
/// fiducial is then not informationally complete.
pub const INFO_COMPLETENESS_TOL: f64 = 1e-10;

/// Above this ratio max|F|/min|F| the reconstruction switches from the
/// phase-space quotient to a dense least-squares solve.
pub const CONDITION_LIMIT: f64 = 1e8;

/// A complex-valued function on all |G|^2 phase points, indexed like
/// [`FiniteLcaGroup::phase_index`].
#[derive(Debug, Clone)]
pub struct PhaseSpaceFunction {
    group: FiniteLcaGroup,
    values: CVector,
}

impl PhaseSpaceFunction {
    pub fn new(group: FiniteLcaGroup, values: CVector) -> Result<Self> {
        if values.len() != group.phase_count() {
            return Err(Error::LengthMismatch {
                what: "phase-space function",
                expected: group.phase_count(),
                found: values.len(),
            });
        }
        Ok(Self { group, values })
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    pub fn values(&self) -> &CVector {
        &self.values
    }

    pub fn value_at(&self, p: &PhasePoint) -> Complex64 {
        self.values[self.group.phase_index(p)]
    }

    /// ||F||^2 = sum_q weight_phase |F(q)|^2.
    pub fn weighted_norm_sqr(&self) -> f64 {
        self.group.weight_phase() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// <F, G> = sum_q weight_phase F(q) conj(G(q)).
    pub fn weighted_inner(&self, other: &Self) -> Complex64 {
        let acc: Complex64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        acc * self.group.weight_phase()
    }
}

fn check_square(group: &FiniteLcaGroup, m: &CMatrix, what: &'static str) -> Result<()> {
    let n = group.order();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::ShapeMismatch {
            what,
            expected: n,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// (T rho)(chi, g) = Tr(rho U_{chi,g}).
///
/// The Weyl matrix has a single nonzero per row, so each trace costs O(|G|):
/// Tr(rho U_{chi,g}) = sum_k chi(k) rho[k+g, k].
pub fn hs_transform(group: &FiniteLcaGroup, rho: &CMatrix) -> Result<PhaseSpaceFunction> {
    check_square(group, rho, "Hilbert-Schmidt operator")?;
    let mut values = CVector::zeros(group.phase_count());
    let chars = group.char_table();
    for (qi, q) in group.phase_points().enumerate() {
        let ci = group.char_index_of(&q.chi);
        let mut acc = Complex64::new(0.0, 0.0);
        for (ki, k) in group.elements().enumerate() {
            let row = group.index_of(&group.add(&k, &q.g)?);
            acc += rho[(row, ki)] * chars[(ci, ki)];
        }
        values[qi] = acc;
    }
    PhaseSpaceFunction::new(group.clone(), values)
}

/// T^{-1} F = sum_q weight_phase F(q) U_q^†. Inverse of [`hs_transform`].
pub fn hs_inverse(group: &FiniteLcaGroup, f: &PhaseSpaceFunction) -> Result<CMatrix> {
    if f.group() != group {
        return Err(Error::LengthMismatch {
            what: "phase-space function group",
            expected: group.order(),
            found: f.group().order(),
        });
    }
    let n = group.order();
    let w = Complex64::new(group.weight_phase(), 0.0);
    let chars = group.char_table();
    let mut rho = CMatrix::zeros(n, n);
    for (qi, q) in group.phase_points().enumerate() {
        let ci = group.char_index_of(&q.chi);
        let coeff = w * f.values()[qi];
        // U_q^†[j+g, j] = conj(chi(j))
        for (ji, j) in group.elements().enumerate() {
            let row = group.index_of(&group.add(&j, &q.g)?);
            rho[(row, ji)] += coeff * chars[(ci, ji)].conj();
        }
    }
    Ok(rho)
}

/// The transform of the matrix unit |delta_j><delta_k|:
/// F_{jk}(chi, g) = chi(k) [j = k + g]. These form an orthonormal basis of
/// the weighted phase-space Hilbert space.
pub fn basis_function(
    group: &FiniteLcaGroup,
    j: &GroupElement,
    k: &GroupElement,
) -> Result<PhaseSpaceFunction> {
    let ji = group.index_of(j);
    let mut values = CVector::zeros(group.phase_count());
    for (qi, q) in group.phase_points().enumerate() {
        if group.index_of(&group.add(k, &q.g)?) == ji {
            values[qi] = group.char_eval(&q.chi, k)?;
        }
    }
    PhaseSpaceFunction::new(group.clone(), values)
}

/// Polarized Parseval pairing: sum_q weight_phase (T rho)(q) conj((T sigma)(q)),
/// which equals Tr(rho sigma^†).
pub fn parseval_pairing(
    group: &FiniteLcaGroup,
    rho: &CMatrix,
    sigma: &CMatrix,
) -> Result<Complex64> {
    let fr = hs_transform(group, rho)?;
    let fs = hs_transform(group, sigma)?;
    Ok(fr.weighted_inner(&fs))
}

/// Result of a linear-inversion reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Hermitian, trace-renormalized estimate. Eigenvalues are *not* clipped.
    pub rho: CMatrix,
    /// max_q |input probability - probability predicted by `rho`|.
    pub residual: f64,
    /// Smallest eigenvalue of `rho`; negativity beyond -1e-8 signals a
    /// numerically inconsistent input.
    pub min_eigenvalue: f64,
    /// Whether the dense least-squares fallback was used.
    pub used_least_squares: bool,
}

/// Fiducial transform F(r) = <psi, U_r psi> at every phase point.
pub fn fiducial_transform(group: &FiniteLcaGroup, psi: &CVector) -> Result<CVector> {
    crate::linalg::validate_unit_vector(psi, group.order(), 1e-8)?;
    let mut out = CVector::zeros(group.phase_count());
    for (qi, q) in group.phase_points().enumerate() {
        let u_psi = crate::weyl::apply_weyl(group, &q, psi)?;
        out[qi] = psi.dotc(&u_psi);
    }
    Ok(out)
}

/// Recover a state from exact covariant measurement probabilities.
///
/// The statistics p(q) = Tr(rho U_q P U_q^†), P = |psi><psi|, expand over the
/// conjugation characters c(q, r) as p(q) = sum_r weight A(r) c(q, r) with
/// A(r) = (T rho)(r) conj((T P)(r)). Orthogonality of the c(., r) recovers A,
/// the quotient by conj((T P)(r)) recovers T rho, and `hs_inverse` finishes.
/// Requires |T P| bounded away from zero everywhere (informational
/// completeness); falls back to dense least squares when the quotient is
/// poorly conditioned.
pub fn reconstruct_state(
    group: &FiniteLcaGroup,
    probabilities: &[f64],
    psi: &CVector,
) -> Result<Reconstruction> {
    let count = group.phase_count();
    if probabilities.len() != count {
        return Err(Error::LengthMismatch {
            what: "probability map",
            expected: count,
            found: probabilities.len(),
        });
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::ProbabilitiesNotNormalized { sum: total });
    }

    let fid = fiducial_transform(group, psi)?;
    let mut min_abs = f64::INFINITY;
    let mut max_abs = 0.0_f64;
    let mut vanishing = Vec::new();
    for (ri, v) in fid.iter().enumerate() {
        let a = v.norm();
        min_abs = min_abs.min(a);
        max_abs = max_abs.max(a);
        if a < INFO_COMPLETENESS_TOL {
            vanishing.push(group.phase_point_at(ri));
        }
    }
    if !vanishing.is_empty() {
        return Err(Error::NotInformationallyComplete {
            tolerance: INFO_COMPLETENESS_TOL,
            total: count,
            first: vanishing[0].clone(),
            vanishing,
        });
    }

    let weight = group.weight_phase();
    let used_least_squares = max_abs / min_abs > CONDITION_LIMIT;
    let raw = if used_least_squares {
        least_squares_estimate(group, probabilities, psi)?
    } else {
        quotient_estimate(group, probabilities, &fid)?
    };

    // Hermitize and renormalize; report (never silently clip) negativity.
    let mut rho = hermitize(&raw);
    let trace = rho.trace().re;
    if trace.abs() > 1e-12 {
        rho /= Complex64::new(trace, 0.0);
    }
    let min_eigenvalue = hermitian_eigenvalues(&rho)[0];

    let predicted = crate::channels::density_unchecked(group, psi, &rho)?;
    let residual = probabilities
        .iter()
        .zip(&predicted)
        .map(|(p, d)| (p - d * weight).abs())
        .fold(0.0, f64::max);

    Ok(Reconstruction {
        rho,
        residual,
        min_eigenvalue,
        used_least_squares,
    })
}

/// Phase-space quotient path: Fourier analysis over the conjugation
/// characters followed by division by the fiducial transform.
fn quotient_estimate(
    group: &FiniteLcaGroup,
    probabilities: &[f64],
    fid: &CVector,
) -> Result<CMatrix> {
    let n = group.order();
    let count = group.phase_count();
    let chars = group.char_table();
    let weight = group.weight_phase();

    // density values p(q) = prob(q)/weight, laid out as p[qc][qg]
    let density: Vec<f64> = probabilities.iter().map(|p| p / weight).collect();

    // c(q, r) = chi_r(g_q) conj(chi_q(g_r)); A(r) = (1/|G|) sum_q p(q) conj(c(q,r))
    // factorizes into two |G|^3 passes: first over q's character, then over
    // q's group element.
    let mut partial = CMatrix::zeros(n, n); // partial[qg, rg] = sum_qc p[(qc,qg)] chi_qc(g_r)
    for qg in 0..n {
        for rg in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for qc in 0..n {
                acc += chars[(qc, rg)] * density[qc * n + qg];
            }
            partial[(qg, rg)] = acc;
        }
    }
    let mut a = CVector::zeros(count);
    for rc in 0..n {
        for rg in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for qg in 0..n {
                acc += chars[(rc, qg)].conj() * partial[(qg, rg)];
            }
            a[rc * n + rg] = acc / Complex64::new(n as f64, 0.0);
        }
    }

    let mut f_rho = CVector::zeros(count);
    for r in 0..count {
        f_rho[r] = a[r] / fid[r].conj();
    }
    hs_inverse(group, &PhaseSpaceFunction::new(group.clone(), f_rho)?)
}

/// Dense fallback: solve prob(q) = Tr(rho E_q) for vec(rho) by SVD least
/// squares, with E_q the pre-weighted effects of the fiducial POVM.
fn least_squares_estimate(
    group: &FiniteLcaGroup,
    probabilities: &[f64],
    psi: &CVector,
) -> Result<CMatrix> {
    let n = group.order();
    let count = group.phase_count();
    let w = Complex64::new(group.weight_phase(), 0.0);
    let mut design = CMatrix::zeros(count, n * n);
    for (qi, q) in group.phase_points().enumerate() {
        let u_psi = crate::weyl::apply_weyl(group, &q, psi)?;
        // E_q[j, i] coefficient of rho[i, j] in Tr(rho E_q)
        for i in 0..n {
            for j in 0..n {
                design[(qi, i * n + j)] = w * u_psi[j] * u_psi[i].conj();
            }
        }
    }
    let b = CVector::from_fn(count, |i, _| Complex64::new(probabilities[i], 0.0));
    let svd = design.svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .expect("SVD least-squares solve cannot fail with computed U and V");
    Ok(CMatrix::from_fn(n, n, |i, j| x[i * n + j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, outer};

    fn z2() -> FiniteLcaGroup {
        FiniteLcaGroup::cyclic(2).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis_vector(n: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[i] = c(1.0, 0.0);
        v
    }

    /// Fixed pseudo-random Hermitian matrix (mixed-congruential fill).
    fn test_operator(n: usize, salt: u64) -> CMatrix {
        let mut state = salt.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn transform_of_projector_on_z2() {
        let g = z2();
        let rho = outer(&basis_vector(2, 0), &basis_vector(2, 0));
        let f = hs_transform(&g, &rho).unwrap();
        for q in g.phase_points() {
            let expected = if q.g == g.zero() { 1.0 } else { 0.0 };
            assert!((f.value_at(&q) - c(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn transform_of_maximally_mixed_is_delta_at_trivial_point() {
        let g = FiniteLcaGroup::new(vec![2, 2]).unwrap();
        let rho = CMatrix::identity(4, 4) * c(0.25, 0.0);
        let f = hs_transform(&g, &rho).unwrap();
        for q in g.phase_points() {
            let expected = if q == g.trivial_point() { 1.0 } else { 0.0 };
            assert!((f.value_at(&q) - c(expected, 0.0)).norm() < 1e-13);
        }

        // zero operator maps to the zero function
        let z = hs_transform(&g, &CMatrix::zeros(4, 4)).unwrap();
        assert!(z.weighted_norm_sqr() < 1e-28);
    }

    #[test]
    fn inverse_of_delta_at_trivial_point_is_half_identity_on_z2() {
        let g = z2();
        let mut values = CVector::zeros(4);
        values[0] = c(1.0, 0.0);
        let f = PhaseSpaceFunction::new(g.clone(), values).unwrap();
        let rho = hs_inverse(&g, &f).unwrap();
        assert!(max_abs_diff(&rho, &(CMatrix::identity(2, 2) * c(0.5, 0.0))) < 1e-14);

        let zero = PhaseSpaceFunction::new(g.clone(), CVector::zeros(4)).unwrap();
        assert!(crate::linalg::max_abs(&hs_inverse(&g, &zero).unwrap()) < 1e-30);
    }

    #[test]
    fn round_trips_both_ways() {
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        let rho = test_operator(6, 17);
        let f = hs_transform(&g, &rho).unwrap();
        let back = hs_inverse(&g, &f).unwrap();
        assert!(max_abs_diff(&back, &rho) < 1e-12);

        let values = CVector::from_fn(36, |i, _| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()));
        let ff = PhaseSpaceFunction::new(g.clone(), values).unwrap();
        let op = hs_inverse(&g, &ff).unwrap();
        let again = hs_transform(&g, &op).unwrap();
        assert!((again.values() - ff.values()).norm() < 1e-11);
    }

    #[test]
    fn basis_functions_match_transform_and_closed_form() {
        let g = FiniteLcaGroup::cyclic(3).unwrap();
        for j in g.elements() {
            for k in g.elements() {
                let f = basis_function(&g, &j, &k).unwrap();
                // dual route: transform of the matrix unit |j><k|
                let unit = outer(&basis_vector(3, g.index_of(&j)), &basis_vector(3, g.index_of(&k)));
                let via_transform = hs_transform(&g, &unit).unwrap();
                assert!((f.values() - via_transform.values()).norm() < 1e-13);
                // closed form chi(k) [j = k + g]
                for q in g.phase_points() {
                    let expected = if g.add(&k, &q.g).unwrap() == j {
                        g.char_eval(&q.chi, &k).unwrap()
                    } else {
                        c(0.0, 0.0)
                    };
                    assert!((f.value_at(&q) - expected).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn basis_gram_matrix_is_identity_on_z3() {
        let g = FiniteLcaGroup::cyclic(3).unwrap();
        let fns: Vec<_> = g
            .elements()
            .flat_map(|j| g.elements().map(move |k| (j.clone(), k)))
            .collect();
        for (j, k) in &fns {
            for (jp, kp) in &fns {
                let inner = basis_function(&g, j, k)
                    .unwrap()
                    .weighted_inner(&basis_function(&g, jp, kp).unwrap());
                let expected = if j == jp && k == kp { 1.0 } else { 0.0 };
                assert!(
                    (inner - c(expected, 0.0)).norm() < 1e-13,
                    "Gram deviation at ({j:?},{k:?}) vs ({jp:?},{kp:?})"
                );
            }
        }
    }

    #[test]
    fn off_diagonal_basis_function_vanishes_at_g_zero() {
        let g = FiniteLcaGroup::cyclic(3).unwrap();
        let j = g.element(&[1]).unwrap();
        let k = g.element(&[2]).unwrap();
        let f = basis_function(&g, &j, &k).unwrap();
        for chi in g.characters() {
            let q = PhasePoint {
                chi,
                g: g.zero(),
            };
            assert!(f.value_at(&q).norm() < 1e-15);
        }
    }

    #[test]
    fn parseval_pairing_examples() {
        let g = z2();
        let p0 = outer(&basis_vector(2, 0), &basis_vector(2, 0));
        let p1 = outer(&basis_vector(2, 1), &basis_vector(2, 1));
        let got = parseval_pairing(&g, &p0, &p0).unwrap();
        assert!((got - c(1.0, 0.0)).norm() < 1e-13);
        // disjoint-support rank-1 operators pair to zero
        let got = parseval_pairing(&g, &p0, &p1).unwrap();
        assert!(got.norm() < 1e-13);

        // random pair against the direct trace on |G| = 4
        let g4 = FiniteLcaGroup::cyclic(4).unwrap();
        let rho = test_operator(4, 5);
        let sigma = test_operator(4, 9);
        let got = parseval_pairing(&g4, &rho, &sigma).unwrap();
        let expected = (&rho * sigma.adjoint()).trace();
        assert!((got - expected).norm() < 1e-11);
    }

    #[test]
    fn parseval_norm_identity() {
        for moduli in [vec![2u32], vec![3], vec![4], vec![3, 2], vec![2, 2, 2]] {
            let g = FiniteLcaGroup::new(moduli).unwrap();
            let n = g.order();
            let rho = test_operator(n, 42 + n as u64);
            let f = hs_transform(&g, &rho).unwrap();
            let frob: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
            assert!(
                (f.weighted_norm_sqr() - frob).abs() <= 1e-11 * frob.max(1.0),
                "Parseval failed for |G| = {n}"
            );
        }
    }

    #[test]
    fn reconstruct_round_trip_on_z3() {
        let g = FiniteLcaGroup::cyclic(3).unwrap();
        // informationally complete fiducial: non-real amplitudes break the
        // symmetries that zero out the transform
        let mut psi = CVector::from_column_slice(&[c(0.8, 0.1), c(0.3, -0.4), c(0.2, 0.25)]);
        psi /= c(psi.norm(), 0.0);
        // a valid test state
        let raw = test_operator(3, 23);
        let herm = hermitize(&(&raw * raw.adjoint()));
        let rho = &herm / c(herm.trace().re, 0.0);

        let density = crate::channels::density_unchecked(&g, &psi, &rho).unwrap();
        let probs: Vec<f64> = density.iter().map(|d| d * g.weight_phase()).collect();
        let rec = reconstruct_state(&g, &probs, &psi).unwrap();
        assert!(!rec.used_least_squares);
        assert!(max_abs_diff(&rec.rho, &rho) < 1e-9);
        assert!(rec.residual < 1e-9);
        assert!(rec.min_eigenvalue > -1e-8);
    }

    #[test]
    fn reconstruct_uniform_statistics_gives_maximally_mixed() {
        let g = FiniteLcaGroup::cyclic(3).unwrap();
        let mut psi = CVector::from_column_slice(&[c(0.8, 0.1), c(0.3, -0.4), c(0.2, 0.25)]);
        psi /= c(psi.norm(), 0.0);
        let probs = vec![1.0 / 9.0; 9];
        let rec = reconstruct_state(&g, &probs, &psi).unwrap();
        let expected = CMatrix::identity(3, 3) * c(1.0 / 3.0, 0.0);
        assert!(max_abs_diff(&rec.rho, &expected) < 1e-10);
    }

    #[test]
    fn least_squares_path_agrees_with_the_quotient() {
        let g = FiniteLcaGroup::cyclic(3).unwrap();
        let mut psi = CVector::from_column_slice(&[c(0.8, 0.1), c(0.3, -0.4), c(0.2, 0.25)]);
        psi /= c(psi.norm(), 0.0);
        let raw = test_operator(3, 77);
        let herm = hermitize(&(&raw * raw.adjoint()));
        let rho = &herm / c(herm.trace().re, 0.0);
        let density = crate::channels::density_unchecked(&g, &psi, &rho).unwrap();
        let probs: Vec<f64> = density.iter().map(|d| d * g.weight_phase()).collect();

        let fid = fiducial_transform(&g, &psi).unwrap();
        let via_quotient = quotient_estimate(&g, &probs, &fid).unwrap();
        let via_ls = least_squares_estimate(&g, &probs, &psi).unwrap();
        assert!(max_abs_diff(&via_quotient, &rho) < 1e-10);
        assert!(max_abs_diff(&via_ls, &rho) < 1e-9);
    }

    #[test]
    fn reconstruct_rejects_delta_fiducial_on_z2() {
        let g = z2();
        let psi = basis_vector(2, 0);
        // the delta fiducial's transform vanishes at both g = 1 points
        let probs = vec![0.25; 4];
        match reconstruct_state(&g, &probs, &psi) {
            Err(Error::NotInformationallyComplete { vanishing, .. }) => {
                assert_eq!(vanishing.len(), 2);
                for p in &vanishing {
                    assert_eq!(p.g, g.element(&[1]).unwrap());
                }
            }
            other => panic!("expected NotInformationallyComplete, got {other:?}"),
        }
    }

    #[test]
    fn transform_rejects_wrong_shapes() {
        let g = z2();
        assert!(matches!(
            hs_transform(&g, &CMatrix::zeros(3, 3)),
            Err(Error::ShapeMismatch { .. })
        ));
        let other = FiniteLcaGroup::cyclic(3).unwrap();
        let f = PhaseSpaceFunction::new(other, CVector::zeros(9)).unwrap();
        assert!(hs_inverse(&g, &f).is_err());
        assert!(matches!(
            PhaseSpaceFunction::new(g, CVector::zeros(3)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn reconstruct_validates_input() {
        let g = z2();
        let mut psi = CVector::from_column_slice(&[c(0.9, 0.1), c(0.2, 0.4)]);
        psi /= c(psi.norm(), 0.0);
        assert!(matches!(
            reconstruct_state(&g, &[0.5, 0.5], &psi),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            reconstruct_state(&g, &[0.5, 0.5, 0.5, 0.5], &psi),
            Err(Error::ProbabilitiesNotNormalized { .. })
        ));
    }
}
