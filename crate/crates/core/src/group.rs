//! Finite Abelian groups G = Z_{n_1} x ... x Z_{n_k}, their characters, and
//! the Plancherel-normalized Fourier pair.
//!
//! The dual group is represented by the same moduli through the canonical
//! pairing chi_x(g) = exp(2*pi*i * sum_j x_j g_j / n_j). Haar weights are the
//! counting measure on G and 1/|G| per character on the dual, which makes the
//! Fourier transform below exactly unitary.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::fmt;

/// A finite product of cyclic groups, each factor of order >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLcaGroup {
    moduli: Vec<u32>,
    order: usize,
}

/// An element of G, stored as reduced residues (residues[j] in [0, n_j)).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    residues: Vec<u32>,
}

/// A character of G, identified with a dual-group element via the canonical
/// pairing; stored like a group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    residues: Vec<u32>,
}

/// A point (chi, g) of the phase space = dual(G) x G. Carries the mu-weight
/// 1/|G| through [`FiniteLcaGroup::weight_phase`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    pub chi: Character,
    pub g: GroupElement,
}

impl GroupElement {
    pub fn residues(&self) -> &[u32] {
        &self.residues
    }
}

impl Character {
    pub fn residues(&self) -> &[u32] {
        &self.residues
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(chi={:?}, g={:?})", self.chi.residues, self.g.residues)
    }
}

impl FiniteLcaGroup {
    pub fn new(moduli: Vec<u32>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::EmptyModuli);
        }
        let mut order: usize = 1;
        for &n in &moduli {
            if n < 2 {
                return Err(Error::ModulusTooSmall(n));
            }
            order *= n as usize;
        }
        Ok(Self { moduli, order })
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    /// |G|.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of phase points |dual(G) x G| = |G|^2.
    pub fn phase_count(&self) -> usize {
        self.order * self.order
    }

    /// Haar weight per point of G (counting measure).
    pub fn weight_g(&self) -> f64 {
        1.0
    }

    /// Haar weight per character of the dual group.
    pub fn weight_dual(&self) -> f64 {
        1.0 / self.order as f64
    }

    /// Product weight per phase point.
    pub fn weight_phase(&self) -> f64 {
        1.0 / self.order as f64
    }

    fn reduce(&self, residues: &[i64], what: &'static str) -> Result<Vec<u32>> {
        if residues.len() != self.moduli.len() {
            return Err(Error::LengthMismatch {
                what,
                expected: self.moduli.len(),
                found: residues.len(),
            });
        }
        Ok(residues
            .iter()
            .zip(&self.moduli)
            .map(|(&r, &n)| r.rem_euclid(n as i64) as u32)
            .collect())
    }

    /// Build an element from arbitrary integers, reducing mod the moduli.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        Ok(GroupElement {
            residues: self.reduce(residues, "group element residues")?,
        })
    }

    /// Build a character from arbitrary integers, reducing mod the moduli.
    pub fn character(&self, residues: &[i64]) -> Result<Character> {
        Ok(Character {
            residues: self.reduce(residues, "character residues")?,
        })
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.moduli.len()],
        }
    }

    pub fn trivial_character(&self) -> Character {
        Character {
            residues: vec![0; self.moduli.len()],
        }
    }

    pub fn trivial_point(&self) -> PhasePoint {
        PhasePoint {
            chi: self.trivial_character(),
            g: self.zero(),
        }
    }

    fn check_arity(&self, len: usize, what: &'static str) -> Result<()> {
        if len != self.moduli.len() {
            return Err(Error::LengthMismatch {
                what,
                expected: self.moduli.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// Componentwise sum mod the moduli.
    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_arity(a.residues.len(), "group element residues")?;
        self.check_arity(b.residues.len(), "group element residues")?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(GroupElement { residues })
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_arity(a.residues.len(), "group element residues")?;
        let residues = a
            .residues
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        Ok(GroupElement { residues })
    }

    /// Pointwise product of characters (sum of dual residues).
    pub fn char_mul(&self, a: &Character, b: &Character) -> Result<Character> {
        self.check_arity(a.residues.len(), "character residues")?;
        self.check_arity(b.residues.len(), "character residues")?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(Character { residues })
    }

    /// Complex conjugate character, i.e. the dual-group inverse.
    pub fn char_conj(&self, a: &Character) -> Result<Character> {
        self.check_arity(a.residues.len(), "character residues")?;
        let residues = a
            .residues
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        Ok(Character { residues })
    }

    /// chi(g) = exp(2*pi*i * sum_j x_j g_j / n_j). Unit modulus up to floating
    /// error; the angle is reduced mod 1 per factor before the exponential.
    pub fn char_eval(&self, chi: &Character, g: &GroupElement) -> Result<Complex64> {
        self.check_arity(chi.residues.len(), "character residues")?;
        self.check_arity(g.residues.len(), "group element residues")?;
        let mut frac = 0.0_f64;
        for ((&x, &r), &n) in chi.residues.iter().zip(&g.residues).zip(&self.moduli) {
            let prod = (x as u64 * r as u64) % n as u64;
            frac += prod as f64 / n as f64;
        }
        Ok(Complex64::from_polar(1.0, TAU * frac))
    }

    /// Mixed-radix index of an element; lexicographic in the residues.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        debug_assert_eq!(a.residues.len(), self.moduli.len());
        let mut idx = 0usize;
        for (&r, &n) in a.residues.iter().zip(&self.moduli) {
            idx = idx * n as usize + r as usize;
        }
        idx
    }

    pub fn char_index_of(&self, chi: &Character) -> usize {
        let mut idx = 0usize;
        for (&r, &n) in chi.residues.iter().zip(&self.moduli) {
            idx = idx * n as usize + r as usize;
        }
        idx
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        debug_assert!(index < self.order);
        let mut residues = vec![0u32; self.moduli.len()];
        for j in (0..self.moduli.len()).rev() {
            let n = self.moduli[j] as usize;
            residues[j] = (index % n) as u32;
            index /= n;
        }
        GroupElement { residues }
    }

    pub fn character_at(&self, index: usize) -> Character {
        Character {
            residues: self.element_at(index).residues,
        }
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(|i| self.element_at(i))
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        (0..self.order).map(|i| self.character_at(i))
    }

    /// All |G|^2 phase points, lexicographic by (chi residues, g residues).
    pub fn phase_points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.phase_count()).map(|i| self.phase_point_at(i))
    }

    pub fn phase_index(&self, p: &PhasePoint) -> usize {
        self.char_index_of(&p.chi) * self.order + self.index_of(&p.g)
    }

    pub fn phase_point_at(&self, index: usize) -> PhasePoint {
        debug_assert!(index < self.phase_count());
        PhasePoint {
            chi: self.character_at(index / self.order),
            g: self.element_at(index % self.order),
        }
    }

    /// Group law of the phase space: (chi, g) * (chi', g') = (chi chi', g + g').
    pub fn phase_add(&self, p: &PhasePoint, q: &PhasePoint) -> Result<PhasePoint> {
        Ok(PhasePoint {
            chi: self.char_mul(&p.chi, &q.chi)?,
            g: self.add(&p.g, &q.g)?,
        })
    }

    pub fn phase_neg(&self, p: &PhasePoint) -> Result<PhasePoint> {
        Ok(PhasePoint {
            chi: self.char_conj(&p.chi)?,
            g: self.neg(&p.g)?,
        })
    }

    /// All character values as a matrix: entry (x, g) = chi_x(g). This is
    /// the unnormalized DFT matrix of the group; hot loops index it instead
    /// of re-evaluating the exponential.
    pub fn char_table(&self) -> CMatrix {
        CMatrix::from_fn(self.order, self.order, |x, g| {
            self.char_eval(&self.character_at(x), &self.element_at(g))
                .expect("indices are in range by construction")
        })
    }

    fn check_len(&self, len: usize, what: &'static str) -> Result<()> {
        if len != self.order {
            return Err(Error::LengthMismatch {
                what,
                expected: self.order,
                found: len,
            });
        }
        Ok(())
    }

    /// Fourier transform F(f)(chi) = sum_g conj(chi(g)) f(g), direct summation.
    /// With the Haar weights above, ||F(f)||_dual = ||f||_G (Plancherel).
    pub fn fourier(&self, f: &CVector) -> Result<CVector> {
        self.check_len(f.len(), "function on G")?;
        let mut out = CVector::zeros(self.order);
        for (ci, chi) in self.characters().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (gi, g) in self.elements().enumerate() {
                acc += self.char_eval(&chi, &g)?.conj() * f[gi];
            }
            out[ci] = acc * self.weight_g();
        }
        Ok(out)
    }

    /// Inverse transform F^{-1}(fh)(g) = (1/|G|) sum_chi chi(g) fh(chi).
    pub fn inverse_fourier(&self, fhat: &CVector) -> Result<CVector> {
        self.check_len(fhat.len(), "function on the dual group")?;
        let mut out = CVector::zeros(self.order);
        for (gi, g) in self.elements().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ci, chi) in self.characters().enumerate() {
                acc += self.char_eval(&chi, &g)? * fhat[ci];
            }
            out[gi] = acc * Complex64::new(self.weight_dual(), 0.0);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;

    fn z2() -> FiniteLcaGroup {
        FiniteLcaGroup::cyclic(2).unwrap()
    }

    #[test]
    fn constructor_validates_moduli() {
        assert!(matches!(
            FiniteLcaGroup::new(vec![]),
            Err(Error::EmptyModuli)
        ));
        assert!(matches!(
            FiniteLcaGroup::new(vec![3, 1]),
            Err(Error::ModulusTooSmall(1))
        ));
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        assert_eq!(g.order(), 6);
    }

    #[test]
    fn add_examples() {
        let g = z2();
        let one = g.element(&[1]).unwrap();
        assert_eq!(g.add(&one, &one).unwrap(), g.zero());

        let g32 = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        let a = g32.element(&[2, 1]).unwrap();
        let sum = g32.add(&a, &a).unwrap();
        assert_eq!(sum.residues(), &[1, 0]);

        // identity
        assert_eq!(g32.add(&a, &g32.zero()).unwrap(), a);
    }

    #[test]
    fn add_rejects_foreign_elements() {
        let g32 = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        let g = z2();
        let a = g.element(&[1]).unwrap();
        let b = g32.element(&[1, 1]).unwrap();
        assert!(matches!(
            g32.add(&a, &b),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn char_eval_examples() {
        let g = z2();
        let chi = g.character(&[1]).unwrap();
        let one = g.element(&[1]).unwrap();
        let v = g.char_eval(&chi, &one).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        let g4 = FiniteLcaGroup::cyclic(4).unwrap();
        let chi = g4.character(&[1]).unwrap();
        let one = g4.element(&[1]).unwrap();
        let v = g4.char_eval(&chi, &one).unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-12);

        // trivial character is constantly 1
        let g6 = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        for e in g6.elements() {
            let v = g6.char_eval(&g6.trivial_character(), &e).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn element_reduction_is_idempotent() {
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        let a = g.element(&[-1, 7]).unwrap();
        assert_eq!(a.residues(), &[2, 1]);
        let again = g
            .element(&[a.residues()[0] as i64, a.residues()[1] as i64])
            .unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn indexing_round_trips_lexicographically() {
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        let mut seen = Vec::new();
        for (i, e) in g.elements().enumerate() {
            assert_eq!(g.index_of(&e), i);
            seen.push(e.residues().to_vec());
        }
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted, "enumeration must be lexicographic");
    }

    #[test]
    fn fourier_examples() {
        let g = z2();
        // delta_0 -> (1, 1)
        let mut f = CVector::zeros(2);
        f[0] = Complex64::new(1.0, 0.0);
        let fh = g.fourier(&f).unwrap();
        assert!((fh[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((fh[1] - Complex64::new(1.0, 0.0)).norm() < 1e-14);

        // constant (1, 1) -> (2, 0)
        let ones = CVector::from_element(2, Complex64::new(1.0, 0.0));
        let fh = g.fourier(&ones).unwrap();
        assert!((fh[0] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!(fh[1].norm() < 1e-14);

        // constant on Z_n -> n * delta_{chi = 0}, by character orthogonality
        for n in [3u32, 5, 8] {
            let g = FiniteLcaGroup::cyclic(n).unwrap();
            let ones = CVector::from_element(n as usize, Complex64::new(1.0, 0.0));
            let fh = g.fourier(&ones).unwrap();
            assert!((fh[0] - Complex64::new(n as f64, 0.0)).norm() < 1e-12);
            for k in 1..n as usize {
                assert!(fh[k].norm() < 1e-12, "n={n} k={k} got {}", fh[k]);
            }
        }
    }

    #[test]
    fn inverse_fourier_examples() {
        let g = z2();
        // (1, 1) on the dual -> delta_0
        let fh = CVector::from_element(2, Complex64::new(1.0, 0.0));
        let f = g.inverse_fourier(&fh).unwrap();
        assert!((f[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(f[1].norm() < 1e-14);

        // delta at the trivial character on Z_3 -> constant 1/3
        let g3 = FiniteLcaGroup::cyclic(3).unwrap();
        let mut fh = CVector::zeros(3);
        fh[0] = Complex64::new(1.0, 0.0);
        let f = g3.inverse_fourier(&fh).unwrap();
        for i in 0..3 {
            assert!((f[i] - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn fourier_rejects_wrong_length() {
        let g = z2();
        let f = CVector::zeros(3);
        assert!(matches!(
            g.fourier(&f),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            g.inverse_fourier(&f),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn phase_point_ordering_and_round_trip() {
        let g = FiniteLcaGroup::new(vec![3, 2]).unwrap();
        for (i, p) in g.phase_points().enumerate() {
            assert_eq!(g.phase_index(&p), i);
        }
        // the very first point is the trivial one
        assert_eq!(g.phase_point_at(0), g.trivial_point());
    }
}
