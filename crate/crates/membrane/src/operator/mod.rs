//! Matrix-free linear operators on grid functions.
//!
//! Every operator in the crate — stencils, multiplication operators, the
//! model Hamiltonians, the symmetry involutions — implements [`LinearMap`]:
//! a dimension, a Hermiticity flag, a label, and an `apply` into a caller
//! buffer. Nothing ever assembles a matrix except the small-problem
//! helpers [`materialize`] and the dense oracle in [`crate::eigen`].
//!
//! Operators on two-component (spinor) fields use the block layout of
//! [`crate::field::SpinorField`]: the first `n_nodes` entries are the
//! spin-up component, the rest spin-down.

mod comparison;
mod model;
mod symmetry;

pub use comparison::{
    comparison_operator, comparison_operator_spinor, free_laplacian, free_partitioned_laplacian,
    oscillator_chain, partitioned_operator, partitioned_operator_with_cuts, region_operator,
    scalar_hamiltonian, ScalarSchrodinger, SpinDoubled,
};
pub use model::{
    hamiltonian, supercharge, supercharge_commutator, susy_hamiltonian, CommutatorMap,
    DirectHamiltonian, Supercharge, SusyHamiltonian,
};
pub use symmetry::{grading, pauli, spin_reflection, Grading, PauliAction, SpinReflection};

use num_complex::Complex64;

/// A linear operator applied matrix-free to complex coefficient vectors.
pub trait LinearMap {
    /// Length of the vectors the map acts on.
    fn dim(&self) -> usize;

    /// Whether ⟨u, Av⟩ = ⟨Au, v⟩ holds by construction. The eigensolver
    /// refuses maps that do not set this.
    fn is_hermitian(&self) -> bool;

    /// Human-readable name used in reports and error messages.
    fn label(&self) -> String;

    /// Writes A·input into output. Both slices must have length
    /// [`LinearMap::dim`]; output is overwritten.
    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]);

    /// Allocating convenience wrapper around [`LinearMap::apply_into`].
    fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; self.dim()];
        self.apply_into(input, &mut out);
        out
    }
}

/// Unweighted complex inner product ⟨u, v⟩ = Σ conj(uᵢ)·vᵢ.
pub fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Euclidean norm of a coefficient vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Assembles the dense matrix of a map by applying it to basis vectors.
/// Intended for tests and small oracles only.
pub fn materialize(op: &dyn LinearMap) -> nalgebra::DMatrix<Complex64> {
    let n = op.dim();
    let mut m = nalgebra::DMatrix::zeros(n, n);
    let mut e = vec![Complex64::ZERO; n];
    let mut col = vec![Complex64::ZERO; n];
    for j in 0..n {
        e[j] = Complex64::ONE;
        op.apply_into(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = Complex64::ZERO;
    }
    m
}

/// Relative adjoint defect max |⟨u,Av⟩ − ⟨Au,v⟩| / (‖Au‖‖v‖ + ‖u‖‖Av‖)
/// over seeded random pairs; ≈ machine epsilon for honestly Hermitian maps.
pub fn hermiticity_defect(op: &dyn LinearMap, rng: &mut impl rand::Rng, pairs: usize) -> f64 {
    let n = op.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let u = random_vector(n, rng);
        let v = random_vector(n, rng);
        let au = op.apply(&u);
        let av = op.apply(&v);
        let lhs = dot(&u, &av);
        let rhs = dot(&au, &v);
        let scale = vec_norm(&au) * vec_norm(&v) + vec_norm(&u) * vec_norm(&av);
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    worst
}

/// Statistical linearity check: relative defect of A(αu + βv) against
/// α·Au + β·Av over seeded random draws.
pub fn linearity_defect(op: &dyn LinearMap, rng: &mut impl rand::Rng, trials: usize) -> f64 {
    let n = op.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = random_vector(n, rng);
        let v = random_vector(n, rng);
        let alpha = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let beta = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let mixed: Vec<Complex64> =
            u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = op.apply(&mixed);
        let au = op.apply(&u);
        let av = op.apply(&v);
        let mut defect = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            defect += (lhs[i] - alpha * au[i] - beta * av[i]).norm_sqr();
            scale += lhs[i].norm_sqr();
        }
        if scale > 0.0 {
            worst = worst.max((defect / scale).sqrt());
        }
    }
    worst
}

/// Random complex vector with i.i.d. uniform(−1, 1) real and imaginary
/// parts (unnormalized); deterministic for a seeded generator.
pub fn random_vector(dim: usize, rng: &mut impl rand::Rng) -> Vec<Complex64> {
    use rand::distributions::Distribution;
    let uniform = rand::distributions::Uniform::new(-1.0f64, 1.0);
    (0..dim)
        .map(|_| Complex64::new(uniform.sample(rng), uniform.sample(rng)))
        .collect()
}
