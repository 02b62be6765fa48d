//! Unitary involutions of the model: the grading P and the three
//! reflection symmetries P₁, P₂, P₃, plus bare Pauli actions.
//!
//! ```text
//! P  = 2^{−1/2}(σ₁+σ₃) ∘ (x ↔ y)        anticommutes with Q
//! P₁ = σ₁ ∘ (x → −x)                     commutes with Q
//! P₂ = σ₂ ∘ (x → −x, y → −y)             commutes with Q, anticommutes with P
//! P₃ = σ₃ ∘ (y → −y)                     commutes with Q
//! ```
//!
//! Each is a node permutation composed with a constant spin matrix. The
//! cell-centered grid is bitwise mirror-exact, so the permutations are
//! exact involutions; P₂ = 2i⁻¹[P₁,P₂]-type products stay exact because
//! multiplying by 0, ±1, ±i never rounds. Only the 1/√2 in P costs an
//! ulp. The pair (P, P₂) generates the degeneracy argument: both commute
//! with H, anticommute with each other, so every H-eigenvalue has even
//! multiplicity.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::grid::GridSpec;
use crate::operator::LinearMap;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::ONE;
const ZERO: Complex64 = Complex64::ZERO;

/// Node permutation composed with a constant 2×2 spin matrix:
/// out(k) = M · in(perm(k)) componentwise in spin.
#[derive(Debug, Clone)]
struct SpinPermutation {
    n2: usize,
    /// Read index per output node; an involution for every map here.
    perm: Vec<u32>,
    /// Row-major spin matrix [[m00, m01], [m10, m11]].
    m: [Complex64; 4],
    label: String,
}

impl SpinPermutation {
    fn identity_perm(n2: usize) -> Vec<u32> {
        (0..n2 as u32).collect()
    }
}

impl LinearMap for SpinPermutation {
    fn dim(&self) -> usize {
        2 * self.n2
    }

    fn is_hermitian(&self) -> bool {
        // All maps constructed in this module pair a Hermitian spin
        // matrix with a self-inverse permutation; the two factors act on
        // different tensor slots, so the composite is Hermitian.
        true
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let (up_in, down_in) = input.split_at(self.n2);
        let (up_out, down_out) = output.split_at_mut(self.n2);
        let [m00, m01, m10, m11] = self.m;
        for k in 0..self.n2 {
            let p = self.perm[k] as usize;
            let a = up_in[p];
            let b = down_in[p];
            up_out[k] = m00 * a + m01 * b;
            down_out[k] = m10 * a + m11 * b;
        }
    }
}

/// The grading P: spin matrix (σ₁+σ₃)/√2 composed with the coordinate
/// swap x ↔ y. Unitary, Hermitian, P² = 1, and PQ = −QP.
#[derive(Debug, Clone)]
pub struct Grading(SpinPermutation);

/// Builds the grading operator on `grid`.
pub fn grading(grid: &GridSpec) -> Grading {
    let n = grid.points_per_axis();
    let mut perm = vec![0u32; n * n];
    for iy in 0..n {
        for ix in 0..n {
            // Sampling at the swapped point (y, x) reads node (iy, ix).
            perm[iy * n + ix] = (ix * n + iy) as u32;
        }
    }
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Grading(SpinPermutation {
        n2: n * n,
        perm,
        m: [s, s, s, -s],
        label: "grading".into(),
    })
}

/// One of the reflection symmetries P₁, P₂, P₃.
#[derive(Debug, Clone)]
pub struct SpinReflection {
    core: SpinPermutation,
    index: u8,
}

impl SpinReflection {
    /// Which reflection this is (1, 2, or 3).
    pub fn index(&self) -> u8 {
        self.index
    }
}

/// Builds P₁ (σ₁ with x → −x), P₂ (σ₂ with both axes flipped), or
/// P₃ (σ₃ with y → −y). `index` must be 1, 2, or 3.
pub fn spin_reflection(grid: &GridSpec, index: u8) -> SpinReflection {
    assert!((1..=3).contains(&index), "reflection index must be 1, 2, or 3");
    let n = grid.points_per_axis();
    let flip = |i: usize| n - 1 - i;
    let mut perm = vec![0u32; n * n];
    for iy in 0..n {
        for ix in 0..n {
            let (rx, ry) = match index {
                1 => (flip(ix), iy),
                2 => (flip(ix), flip(iy)),
                _ => (ix, flip(iy)),
            };
            perm[iy * n + ix] = (ry * n + rx) as u32;
        }
    }
    let m = pauli_matrix(index);
    SpinReflection {
        core: SpinPermutation { n2: n * n, perm, m, label: format!("spin reflection {index}") },
        index,
    }
}

impl LinearMap for SpinReflection {
    fn dim(&self) -> usize {
        self.core.dim()
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.core.label()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        self.core.apply_into(input, output);
    }
}

impl LinearMap for Grading {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.0.label()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        self.0.apply_into(input, output);
    }
}

/// A bare Pauli matrix acting on spin only (identity on nodes). Used to
/// test spin locality of scalar comparison operators.
#[derive(Debug, Clone)]
pub struct PauliAction(SpinPermutation);

/// Builds σ₁, σ₂, or σ₃ ⊗ identity on `grid`. `index` must be 1, 2, or 3.
pub fn pauli(grid: &GridSpec, index: u8) -> PauliAction {
    assert!((1..=3).contains(&index), "Pauli index must be 1, 2, or 3");
    let n2 = grid.node_count();
    PauliAction(SpinPermutation {
        n2,
        perm: SpinPermutation::identity_perm(n2),
        m: pauli_matrix(index),
        label: format!("pauli {index}"),
    })
}

impl LinearMap for PauliAction {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.0.label()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        self.0.apply_into(input, output);
    }
}

fn pauli_matrix(index: u8) -> [Complex64; 4] {
    match index {
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => unreachable!("index validated by callers"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Bc;
    use crate::operator::{hermiticity_defect, random_vector, supercharge, vec_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::new(2.0, 10, Bc::Dirichlet, Bc::Dirichlet).unwrap()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn grading_squares_to_identity() {
        let g = grid();
        let p = grading(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = random_vector(p.dim(), &mut rng);
        let twice = p.apply(&p.apply(&v));
        assert!(max_diff(&twice, &v) <= 1e-15 * vec_norm(&v));
    }

    #[test]
    fn reflections_square_to_identity_bitwise() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for index in 1..=3 {
            let p = spin_reflection(&g, index);
            let v = random_vector(p.dim(), &mut rng);
            // Permutations are exact and ±1/±i products never round.
            assert_eq!(p.apply(&p.apply(&v)), v, "P{index} squared");
        }
    }

    #[test]
    fn reflection_commutator_closes_on_third() {
        // [P₁, P₂] = 2i P₃ exactly.
        let g = grid();
        let p1 = spin_reflection(&g, 1);
        let p2 = spin_reflection(&g, 2);
        let p3 = spin_reflection(&g, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let v = random_vector(p1.dim(), &mut rng);
        let lhs: Vec<_> = p1
            .apply(&p2.apply(&v))
            .iter()
            .zip(p2.apply(&p1.apply(&v)))
            .map(|(a, b)| a - b)
            .collect();
        let rhs: Vec<_> = p3.apply(&v).iter().map(|z| 2.0 * I * z).collect();
        assert!(max_diff(&lhs, &rhs) <= 1e-15 * vec_norm(&v));
    }

    #[test]
    fn grading_anticommutes_with_p2() {
        let g = grid();
        let p = grading(&g);
        let p2 = spin_reflection(&g, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let v = random_vector(p.dim(), &mut rng);
        let anti: Vec<_> = p
            .apply(&p2.apply(&v))
            .iter()
            .zip(p2.apply(&p.apply(&v)))
            .map(|(a, b)| a + b)
            .collect();
        assert!(vec_norm(&anti) <= 1e-15 * vec_norm(&v));
    }

    #[test]
    fn symmetries_are_hermitian() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        assert!(hermiticity_defect(&grading(&g), &mut rng, 8) <= 1e-13);
        for index in 1..=3 {
            assert!(hermiticity_defect(&spin_reflection(&g, index), &mut rng, 8) <= 1e-13);
            assert!(hermiticity_defect(&pauli(&g, index), &mut rng, 8) <= 1e-13);
        }
    }

    #[test]
    fn pauli_product_rule() {
        // σ₁σ₂ = iσ₃ applied to a random spinor field.
        let g = grid();
        let s1 = pauli(&g, 1);
        let s2 = pauli(&g, 2);
        let s3 = pauli(&g, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let v = random_vector(s1.dim(), &mut rng);
        let lhs = s1.apply(&s2.apply(&v));
        let rhs: Vec<_> = s3.apply(&v).iter().map(|z| I * z).collect();
        assert_eq!(lhs, rhs);
        for index in 1..=3 {
            let s = pauli(&g, index);
            assert_eq!(s.apply(&s.apply(&v)), v, "sigma {index} squared");
        }
    }

    #[test]
    fn supercharge_anticommutes_with_grading() {
        let g = grid();
        let q = supercharge(&g);
        let p = grading(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let v = random_vector(q.dim(), &mut rng);
        let qv = q.apply(&v);
        let anti: Vec<_> = q
            .apply(&p.apply(&v))
            .iter()
            .zip(p.apply(&qv))
            .map(|(a, b)| a + b)
            .collect();
        assert!(vec_norm(&anti) <= 1e-12 * vec_norm(&qv).max(1.0));
    }

    #[test]
    fn supercharge_commutes_with_reflections() {
        let g = grid();
        let q = supercharge(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let v = random_vector(q.dim(), &mut rng);
        let qv = q.apply(&v);
        for index in 1..=3 {
            let p = spin_reflection(&g, index);
            let comm: Vec<_> = q
                .apply(&p.apply(&v))
                .iter()
                .zip(p.apply(&qv))
                .map(|(a, b)| a - b)
                .collect();
            assert!(
                vec_norm(&comm) <= 1e-12 * vec_norm(&qv).max(1.0),
                "commutator with P{index}"
            );
        }
    }

    #[test]
    #[should_panic(expected = "reflection index")]
    fn reflection_index_out_of_range_panics() {
        spin_reflection(&grid(), 4);
    }
}
