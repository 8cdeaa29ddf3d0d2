//! The projective unitary representation of dual(G) x G on C^{|G|}:
//! [U_{chi,g} f](h) = chi(h) f(h+g), its multiplication law, and state
//! conjugation.
//!
//! Direct substitution gives U_{chi,g} U_{chi',g'} = chi'(g) U_{chi chi', g+g'}.
//! Note the cocycle is chi'(g), evaluated on the *left* element; see
//! [`weyl_product_phase`].

use crate::error::{Error, Result};
use crate::group::{FiniteLcaGroup, PhasePoint};
use crate::linalg::{CMatrix, CVector};
use num_complex::Complex64;

/// A Weyl operator as a dense unitary matrix together with its phase point.
#[derive(Debug, Clone)]
pub struct WeylOperator {
    pub point: PhasePoint,
    pub matrix: CMatrix,
}

/// The matrix of U_{chi,g} in the delta basis: M[h, h'] = chi(h) [h' = h+g].
pub fn weyl_matrix(group: &FiniteLcaGroup, p: &PhasePoint) -> Result<WeylOperator> {
    let n = group.order();
    let mut m = CMatrix::zeros(n, n);
    for (hi, h) in group.elements().enumerate() {
        let col = group.index_of(&group.add(&h, &p.g)?);
        m[(hi, col)] = group.char_eval(&p.chi, &h)?;
    }
    Ok(WeylOperator {
        point: p.clone(),
        matrix: m,
    })
}

/// U_{chi,g} applied to a vector without materializing the matrix:
/// (U f)(h) = chi(h) f(h+g). O(|G|).
pub fn apply_weyl(group: &FiniteLcaGroup, p: &PhasePoint, f: &CVector) -> Result<CVector> {
    if f.len() != group.order() {
        return Err(Error::LengthMismatch {
            what: "function on G",
            expected: group.order(),
            found: f.len(),
        });
    }
    let mut out = CVector::zeros(group.order());
    for (hi, h) in group.elements().enumerate() {
        let src = group.index_of(&group.add(&h, &p.g)?);
        out[hi] = group.char_eval(&p.chi, &h)? * f[src];
    }
    Ok(out)
}

/// The multiplication law: returns (omega, r) with
/// U_p U_q = omega * U_r, omega = chi_q(g_p), r = (chi_p chi_q, g_p + g_q).
pub fn weyl_product_phase(
    group: &FiniteLcaGroup,
    p: &PhasePoint,
    q: &PhasePoint,
) -> Result<(Complex64, PhasePoint)> {
    let omega = group.char_eval(&q.chi, &p.g)?;
    let r = group.phase_add(p, q)?;
    Ok((omega, r))
}

/// The scalar c(p,q) with U_p U_q U_p^† = c(p,q) U_q. Conjugation fixes the
/// phase point; c(p,q) = chi_q(g_p) conj(chi_p(g_q)).
pub fn conjugation_phase(
    group: &FiniteLcaGroup,
    p: &PhasePoint,
    q: &PhasePoint,
) -> Result<Complex64> {
    let a = group.char_eval(&q.chi, &p.g)?;
    let b = group.char_eval(&p.chi, &q.g)?;
    Ok(a * b.conj())
}

/// U_p rho U_p^†. Preserves Hermiticity, trace, and the spectrum.
pub fn conjugate_state(
    group: &FiniteLcaGroup,
    p: &PhasePoint,
    rho: &CMatrix,
) -> Result<CMatrix> {
    let n = group.order();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::ShapeMismatch {
            what: "state matrix",
            expected: n,
            rows: rho.nrows(),
            cols: rho.ncols(),
        });
    }
    let u = weyl_matrix(group, p)?.matrix;
    Ok(&u * rho * u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, outer,CMatrix, CVector};

    fn z2() -> FiniteLcaGroup {
        FiniteLcaGroup::cyclic(2).unwrap()
    }

    fn point(group: &FiniteLcaGroup, chi: &[i64], g: &[i64]) -> PhasePoint {
        PhasePoint {
            chi: group.character(chi).unwrap(),
            g: group.element(g).unwrap(),
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weyl_matrix_is_pauli_x_and_z_on_z2() {
        let g = z2();
        let x = weyl_matrix(&g, &point(&g, &[0], &[1])).unwrap().matrix;
        let expected_x =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs_diff(&x, &expected_x) < 1e-14);

        let z = weyl_matrix(&g, &point(&g, &[1], &[0])).unwrap().matrix;
        let expected_z =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(max_abs_diff(&z, &expected_z) < 1e-14);

        let id = weyl_matrix(&g, &g.trivial_point()).unwrap().matrix;
        assert!(max_abs_diff(&id, &CMatrix::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn product_phase_matches_matrix_products_on_z2() {
        let g = z2();
        let z_point = point(&g, &[1], &[0]);
        let x_point = point(&g, &[0], &[1]);
        let z = weyl_matrix(&g, &z_point).unwrap().matrix;
        let x = weyl_matrix(&g, &x_point).unwrap().matrix;

        // Z * X = +1 * U_{(1),(1)}
        let (omega, r) = weyl_product_phase(&g, &z_point, &x_point).unwrap();
        assert!((omega - c(1.0, 0.0)).norm() < 1e-14);
        let ur = weyl_matrix(&g, &r).unwrap().matrix;
        assert!(max_abs_diff(&(&z * &x), &(ur.clone() * omega)) < 1e-14);
        let expected =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs_diff(&(&z * &x), &expected) < 1e-14);

        // X * Z = -1 * U_{(1),(1)}
        let (omega, r) = weyl_product_phase(&g, &x_point, &z_point).unwrap();
        assert!((omega - c(-1.0, 0.0)).norm() < 1e-14);
        let ur = weyl_matrix(&g, &r).unwrap().matrix;
        assert!(max_abs_diff(&(&x * &z), &(ur * omega)) < 1e-14);
    }

    #[test]
    fn identity_point_is_neutral_in_the_product() {
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        let q = point(&g, &[2, 1], &[1, 0]);
        let (omega, r) = weyl_product_phase(&g, &g.trivial_point(), &q).unwrap();
        assert!((omega - c(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(r, q);
    }

    #[test]
    fn apply_weyl_agrees_with_dense_matrix() {
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        let p = point(&g, &[1, 1], &[2, 1]);
        let u = weyl_matrix(&g, &p).unwrap().matrix;
        let f = CVector::from_fn(6, |i, _| c(i as f64 + 0.5, 0.25 * i as f64));
        let via_matrix = &u * &f;
        let direct = apply_weyl(&g, &p, &f).unwrap();
        assert!((via_matrix - direct).norm() < 1e-13);
    }

    #[test]
    fn conjugate_state_examples() {
        let g = z2();
        let e0 = CVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let e1 = CVector::from_column_slice(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let rho0 = outer(&e0, &e0);

        // identity point leaves the state alone
        let same = conjugate_state(&g, &g.trivial_point(), &rho0).unwrap();
        assert!(max_abs_diff(&same, &rho0) < 1e-14);

        // (chi=0, g=1) acts as X: |0><0| -> |1><1|
        let flipped = conjugate_state(&g, &point(&g, &[0], &[1]), &rho0).unwrap();
        assert!(max_abs_diff(&flipped, &outer(&e1, &e1)) < 1e-14);
    }

    #[test]
    fn conjugation_preserves_eigenvalues() {
        use crate::linalg::hermitian_eigenvalues;
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        // fixed Hermitian test state with distinct eigenvalues
        let mut rho = CMatrix::zeros(6, 6);
        for i in 0..6 {
            rho[(i, i)] = c((i + 1) as f64 / 21.0, 0.0);
        }
        rho[(0, 3)] = c(0.01, 0.02);
        rho[(3, 0)] = c(0.01, -0.02);
        let p = point(&g, &[2, 1], &[1, 1]);
        let sigma = conjugate_state(&g, &p, &rho).unwrap();
        let ev_a = hermitian_eigenvalues(&rho);
        let ev_b = hermitian_eigenvalues(&sigma);
        for (a, b) in ev_a.iter().zip(&ev_b) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((sigma.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn conjugate_state_rejects_wrong_shape() {
        let g = z2();
        let rho = CMatrix::zeros(3, 3);
        assert!(matches!(
            conjugate_state(&g, &g.trivial_point(), &rho),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
