//! Truncated-Fock realization of the continuous (G = R) example:
//! displacement operators, coherent states, the Husimi function, and
//! quadrature checks of the resolution of identity and of the phase relating
//! exp(ixq) exp(iyp) to a displacement.
//!
//! All checks state their validity regime |alpha|^2 <= dim/4; outside it the
//! matrix-exponential displaced vacuum departs from the closed-form
//! coherent amplitudes.

use crate::error::{Error, Result};
use crate::linalg::{exp_i_hermitian, frobenius_inner, hermiticity_deviation, CMatrix, CVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Residual limit above which the scalar phase relation is declared broken.
pub const PHASE_BLOCK_LIMIT: f64 = 1e-6;

/// Number basis |0>..|dim-1> with the truncated ladder operators.
#[derive(Debug, Clone)]
pub struct FockSpace {
    dim: usize,
    annihilation: CMatrix,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::TruncationTooSmall { dim, min: 2 });
        }
        let mut a = CMatrix::zeros(dim, dim);
        for n in 1..dim {
            a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Ok(Self {
            dim,
            annihilation: a,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn annihilation(&self) -> &CMatrix {
        &self.annihilation
    }

    pub fn creation(&self) -> CMatrix {
        self.annihilation.adjoint()
    }

    /// q = (a + a^†)/sqrt(2); Hermitian.
    pub fn position(&self) -> CMatrix {
        (&self.annihilation + self.annihilation.adjoint())
            * Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0)
    }

    /// p = i (a^† - a)/sqrt(2); Hermitian.
    pub fn momentum(&self) -> CMatrix {
        (self.annihilation.adjoint() - &self.annihilation)
            * Complex64::new(0.0, 1.0 / 2.0_f64.sqrt())
    }

    pub fn vacuum(&self) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[0] = Complex64::new(1.0, 0.0);
        v
    }
}

/// Truncation regime for displaced-vacuum constructions.
pub fn in_displacement_regime(alpha: Complex64, dim: usize) -> bool {
    alpha.norm_sqr() <= dim as f64 / 4.0
}

/// D(alpha) = exp(alpha a^† - conj(alpha) a). The generator is
/// skew-Hermitian, so the spectral exponential is unitary to machine
/// precision at every truncation.
pub fn displacement(alpha: Complex64, dim: usize) -> Result<CMatrix> {
    let fock = FockSpace::new(dim)?;
    let m = fock.creation() * alpha - fock.annihilation() * alpha.conj();
    // H = -i M is Hermitian; exp(M) = exp(i H)
    let h = m * Complex64::new(0.0, -1.0);
    debug_assert!(hermiticity_deviation(&h) < 1e-12);
    Ok(exp_i_hermitian(&h, 1.0))
}

/// The displaced vacuum D(alpha)|0>. `in_regime` is false when
/// |alpha|^2 > dim/4 and the truncation is no longer trustworthy.
#[derive(Debug, Clone)]
pub struct CoherentState {
    pub alpha: Complex64,
    pub vector: CVector,
    pub in_regime: bool,
}

pub fn coherent_state(alpha: Complex64, dim: usize) -> Result<CoherentState> {
    let d = displacement(alpha, dim)?;
    let fock = FockSpace::new(dim)?;
    Ok(CoherentState {
        alpha,
        vector: &d * fock.vacuum(),
        in_regime: in_displacement_regime(alpha, dim),
    })
}

/// Closed-form Fock amplitudes of the (untruncated) coherent state,
/// projected to the first `dim` levels: c_n = e^{-|alpha|^2/2} alpha^n/sqrt(n!).
/// Entries with n < dim are exact, so any top-left block of |alpha><alpha|
/// built from them is free of truncation artifacts.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v[0] = c;
    for n in 1..dim {
        c *= alpha / Complex64::new((n as f64).sqrt(), 0.0);
        v[n] = c;
    }
    v
}

fn check_square(rho: &CMatrix) -> Result<usize> {
    let n = rho.nrows();
    if rho.ncols() != n || n == 0 {
        return Err(Error::ShapeMismatch {
            what: "Fock-space state",
            expected: n.max(1),
            rows: rho.nrows(),
            cols: rho.ncols(),
        });
    }
    Ok(n)
}

fn husimi_unchecked(rho: &CMatrix, alpha: Complex64) -> f64 {
    let v = coherent_amplitudes(alpha, rho.nrows());
    v.dotc(&(rho * &v)).re / PI
}

/// Husimi function Q(alpha) = (1/pi) <alpha| rho |alpha>. Nonnegative for
/// PSD rho and normalized to 1 over the plane.
pub fn husimi(rho: &CMatrix, alpha: Complex64) -> Result<f64> {
    let n = check_square(rho)?;
    let dev = hermiticity_deviation(rho);
    if dev > 1e-8 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let _ = n;
    Ok(husimi_unchecked(rho, alpha))
}

fn check_quadrature(radius: f64, step: f64) -> Result<()> {
    // NaN fails both comparisons, so this also rejects non-finite inputs
    let ok = radius > 0.0 && step > 0.0 && radius.is_finite() && step.is_finite();
    if !ok {
        return Err(Error::InvalidQuadrature { radius, step });
    }
    Ok(())
}

/// Midpoint-rule lattice tiling the square [-radius, radius]^2. The covered
/// region depends only on radius (up to a ceil sliver), so halving the step
/// refines the same quadrature instead of re-cutting a disk boundary.
pub fn midpoint_square_grid(radius: f64, step: f64) -> Result<Vec<Complex64>> {
    check_quadrature(radius, step)?;
    let m = (radius / step).ceil() as i64;
    let mut grid = Vec::with_capacity((2 * m) as usize * (2 * m) as usize);
    for i in -m..m {
        for j in -m..m {
            grid.push(Complex64::new(
                (i as f64 + 0.5) * step,
                (j as f64 + 0.5) * step,
            ));
        }
    }
    Ok(grid)
}

/// Node-centered lattice over the same square (includes the origin).
pub fn node_square_grid(radius: f64, step: f64) -> Result<Vec<Complex64>> {
    check_quadrature(radius, step)?;
    let m = (radius / step).ceil() as i64;
    let mut grid = Vec::with_capacity((2 * m + 1) as usize * (2 * m + 1) as usize);
    for i in -m..=m {
        for j in -m..=m {
            grid.push(Complex64::new(i as f64 * step, j as f64 * step));
        }
    }
    Ok(grid)
}

/// Husimi values on the node-centered square grid, as (re, im, Q) triples
/// in row-major grid order.
pub fn husimi_grid(rho: &CMatrix, radius: f64, step: f64) -> Result<Vec<(f64, f64, f64)>> {
    check_square(rho)?;
    let dev = hermiticity_deviation(rho);
    if dev > 1e-8 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(node_square_grid(radius, step)?
        .into_iter()
        .map(|alpha| (alpha.re, alpha.im, husimi_unchecked(rho, alpha)))
        .collect())
}

/// Midpoint quadrature of the Husimi function over the square: step^2 * sum Q.
/// Approaches 1 as the square covers the state's support.
pub fn husimi_square_integral(rho: &CMatrix, radius: f64, step: f64) -> Result<f64> {
    check_square(rho)?;
    let dev = hermiticity_deviation(rho);
    if dev > 1e-8 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let sum: f64 = midpoint_square_grid(radius, step)?
        .into_iter()
        .map(|alpha| husimi_unchecked(rho, alpha))
        .sum();
    Ok(step * step * sum)
}

#[derive(Debug, Clone)]
pub struct ResolutionReport {
    pub dim: usize,
    pub radius: f64,
    pub step: f64,
    pub block: usize,
    pub grid_points: usize,
    /// max | (h^2/pi) sum |alpha><alpha| - I | over the top-left block.
    pub max_block_deviation: f64,
}

/// Quadrature check of the resolution of identity
/// (1/pi) integral |alpha><alpha| d^2alpha = I on the top-left `block` x
/// `block` corner. Uses closed-form coherent amplitudes, so the deviation
/// measures quadrature error (step + finite radius), not truncation error.
pub fn resolution_check(
    dim: usize,
    radius: f64,
    step: f64,
    block: usize,
) -> Result<ResolutionReport> {
    if dim < 2 {
        return Err(Error::TruncationTooSmall { dim, min: 2 });
    }
    if block == 0 || block > dim {
        return Err(Error::BlockTooLarge { block, dim });
    }
    let grid = midpoint_square_grid(radius, step)?;
    let mut acc = CMatrix::zeros(block, block);
    for &alpha in &grid {
        let v = coherent_amplitudes(alpha, block);
        for m in 0..block {
            for n in 0..block {
                acc[(m, n)] += v[m] * v[n].conj();
            }
        }
    }
    acc *= Complex64::new(step * step / PI, 0.0);
    let mut max_dev = 0.0_f64;
    for m in 0..block {
        for n in 0..block {
            let target = if m == n { 1.0 } else { 0.0 };
            max_dev = max_dev.max((acc[(m, n)] - Complex64::new(target, 0.0)).norm());
        }
    }
    Ok(ResolutionReport {
        dim,
        radius,
        step,
        block,
        grid_points: grid.len(),
        max_block_deviation: max_dev,
    })
}

#[derive(Debug, Clone)]
pub struct PhaseCheckReport {
    pub x: f64,
    pub y: f64,
    pub dim: usize,
    pub block: usize,
    /// Scalar fitted on the comparison block: exp(ixq) exp(iyp) = omega D(alpha).
    pub omega: Complex64,
    pub omega_modulus: f64,
    /// max |exp(ixq) exp(iyp) - omega D(alpha)| over the block.
    pub block_residual: f64,
    /// Baker-Campbell-Hausdorff candidate exp(-i x y / 2).
    pub bch_phase: Complex64,
    /// The printed candidate exp(-alpha^2 + conj(alpha)^2), alpha = (-y+ix)/sqrt(2).
    pub printed_phase: Complex64,
    pub omega_vs_bch: f64,
    pub omega_vs_printed: f64,
}

/// Default comparison block for [`weyl_phase_check`]: dim/6, at least 4.
pub fn default_phase_block(dim: usize) -> usize {
    (dim / 6).max(4)
}

/// Measure the scalar omega with exp(ixq) exp(iyp) = omega D(alpha),
/// alpha = (-y + ix)/sqrt(2), by a least-squares fit on the top-left block,
/// and report omega against both phase candidates. Errs when no unimodular
/// scalar fits the block to [`PHASE_BLOCK_LIMIT`] (truncation too coarse).
pub fn weyl_phase_check(x: f64, y: f64, dim: usize, block: usize) -> Result<PhaseCheckReport> {
    if dim < 8 {
        return Err(Error::TruncationTooSmall { dim, min: 8 });
    }
    if block == 0 || block > dim {
        return Err(Error::BlockTooLarge { block, dim });
    }
    let fock = FockSpace::new(dim)?;
    let left = exp_i_hermitian(&fock.position(), x) * exp_i_hermitian(&fock.momentum(), y);
    let alpha = Complex64::new(-y, x) / Complex64::new(2.0_f64.sqrt(), 0.0);
    let disp = displacement(alpha, dim)?;

    let a = left.view((0, 0), (block, block)).clone_owned();
    let d = disp.view((0, 0), (block, block)).clone_owned();
    let denom = frobenius_inner(&d, &d).re;
    let omega = frobenius_inner(&a, &d) / Complex64::new(denom, 0.0);
    let block_residual = crate::linalg::max_abs_diff(&a, &(d * omega));
    if block_residual > PHASE_BLOCK_LIMIT {
        return Err(Error::PhaseRelationBreakdown {
            residual: block_residual,
            limit: PHASE_BLOCK_LIMIT,
        });
    }

    let bch_phase = Complex64::from_polar(1.0, -x * y / 2.0);
    let printed_phase = (-alpha * alpha + alpha.conj() * alpha.conj()).exp();
    Ok(PhaseCheckReport {
        x,
        y,
        dim,
        block,
        omega,
        omega_modulus: omega.norm(),
        block_residual,
        bch_phase,
        printed_phase,
        omega_vs_bch: (omega - bch_phase).norm(),
        omega_vs_printed: (omega - printed_phase).norm(),
    })
}
