//! The model operators: supercharge Q, the Hamiltonian in its two
//! discretizations, and multiplication-type commutator maps.
//!
//! With p = −i∂ the supercharge is
//!
//! ```text
//! Q = p_x σ₃ − p_y σ₁ − xy σ₂,        H = Q² = p² + x²y² + xσ₃ + yσ₁.
//! ```
//!
//! Two discrete Hamiltonians are provided. [`hamiltonian`] builds the
//! direct one — compact 5-point kinetic stencil plus exactly diagonal
//! potential and spin couplings — whose spectrum is what the zero-mode
//! searches probe. [`susy_hamiltonian`] applies the discrete Q twice, so
//! the supersymmetry relation H = Q² and every anticommutation identity
//! hold to rounding by construction; its price is a wide kinetic stencil
//! with a spurious checkerboard null direction at the grid scale. The two
//! agree to O(h²) on smooth fields, and the verification suite measures
//! exactly that.

use num_complex::Complex64;

use crate::grid::{coordinate_diagonal, second_difference_1d, GridError, GridSpec, SecondDifference1d};
use crate::operator::LinearMap;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Antisymmetric central first difference (v[i+1] − v[i−1])/(2h) with
/// plain truncation at the ends; multiplied by −i it is the Hermitian
/// discrete momentum.
#[derive(Debug, Clone)]
struct FirstDifference1d {
    n: usize,
    h: f64,
}

impl FirstDifference1d {
    /// Accumulates scale·(central difference of input) into output along
    /// a strided 1D section.
    fn apply_strided(
        &self,
        input: &[Complex64],
        output: &mut [Complex64],
        offset: usize,
        stride: usize,
        scale: Complex64,
    ) {
        let w = scale * (0.5 / self.h);
        for i in 0..self.n {
            let mut acc = Complex64::ZERO;
            if i + 1 < self.n {
                acc += input[offset + (i + 1) * stride];
            }
            if i > 0 {
                acc -= input[offset + (i - 1) * stride];
            }
            output[offset + i * stride] += acc * w;
        }
    }
}

/// Sweeps a 1D sub-operator over all rows (along x) of one spin block.
fn sweep_rows_first(
    d: &FirstDifference1d,
    n: usize,
    input: &[Complex64],
    output: &mut [Complex64],
    scale: Complex64,
) {
    for iy in 0..n {
        d.apply_strided(input, output, iy * n, 1, scale);
    }
}

/// Sweeps a 1D sub-operator over all columns (along y) of one spin block.
fn sweep_cols_first(
    d: &FirstDifference1d,
    n: usize,
    input: &[Complex64],
    output: &mut [Complex64],
    scale: Complex64,
) {
    for ix in 0..n {
        d.apply_strided(input, output, ix, n, scale);
    }
}

/// The discrete supercharge Q = p_xσ₃ − p_yσ₁ − xyσ₂ on spinor fields.
///
/// Hermitian: the real central difference is antisymmetric, so −i·D is
/// self-adjoint, and the Pauli factors are Hermitian constants.
#[derive(Debug, Clone)]
pub struct Supercharge {
    n: usize,
    diff: FirstDifference1d,
    /// x·y sampled per node.
    xy: Vec<f64>,
}

/// Builds the supercharge on `grid`.
pub fn supercharge(grid: &GridSpec) -> Supercharge {
    let n = grid.points_per_axis();
    let xy = coordinate_diagonal(grid, "xy", |x, y| x * y)
        .expect("xy is finite on every bounded grid")
        .values()
        .to_vec();
    Supercharge { n, diff: FirstDifference1d { n, h: grid.spacing() }, xy }
}

impl LinearMap for Supercharge {
    fn dim(&self) -> usize {
        2 * self.n * self.n
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        "supercharge".into()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let n2 = self.n * self.n;
        let (up_in, down_in) = input.split_at(n2);
        output.fill(Complex64::ZERO);
        let (up_out, down_out) = output.split_at_mut(n2);

        // p_x σ₃: −i ∂_x on up, +i ∂_x on down.
        sweep_rows_first(&self.diff, self.n, up_in, up_out, -I);
        sweep_rows_first(&self.diff, self.n, down_in, down_out, I);
        // −p_y σ₁: +i ∂_y of the opposite component.
        sweep_cols_first(&self.diff, self.n, down_in, up_out, I);
        sweep_cols_first(&self.diff, self.n, up_in, down_out, I);
        // −xy σ₂: +i·xy·down into up, −i·xy·up into down.
        for k in 0..n2 {
            let w = self.xy[k];
            up_out[k] += I * w * down_in[k];
            down_out[k] -= I * w * up_in[k];
        }
    }
}

/// The direct-discretization Hamiltonian p² + x²y² + xσ₃ + yσ₁ with a
/// compact 5-point kinetic stencil per spin component and exactly
/// diagonal potential/spin couplings.
#[derive(Debug, Clone)]
pub struct DirectHamiltonian {
    n: usize,
    kin_x: SecondDifference1d,
    kin_y: SecondDifference1d,
    /// x²y² per node.
    potential: Vec<f64>,
    /// x per node (σ₃ coupling).
    xs: Vec<f64>,
    /// y per node (σ₁ coupling).
    ys: Vec<f64>,
}

/// Builds the direct Hamiltonian; kinetic boundary rows follow the
/// grid's per-axis boundary conditions.
pub fn hamiltonian(grid: &GridSpec) -> DirectHamiltonian {
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let sample = |f: fn(f64, f64) -> f64, label: &str| {
        coordinate_diagonal(grid, label, f)
            .expect("polynomials are finite on bounded grids")
            .values()
            .to_vec()
    };
    DirectHamiltonian {
        n,
        kin_x: second_difference_1d(n, h, grid.bc_x()),
        kin_y: second_difference_1d(n, h, grid.bc_y()),
        potential: sample(|x, y| x * x * y * y, "x²y²"),
        xs: sample(|x, _| x, "x"),
        ys: sample(|_, y| y, "y"),
    }
}

impl DirectHamiltonian {
    fn apply_spin_block(&self, input: &[Complex64], output: &mut [Complex64]) {
        for iy in 0..self.n {
            self.kin_x.apply_strided(input, output, iy * self.n, 1);
        }
        for ix in 0..self.n {
            self.kin_y.apply_strided(input, output, ix, self.n);
        }
    }
}

impl LinearMap for DirectHamiltonian {
    fn dim(&self) -> usize {
        2 * self.n * self.n
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        "hamiltonian (direct)".into()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let n2 = self.n * self.n;
        let (up_in, down_in) = input.split_at(n2);
        output.fill(Complex64::ZERO);
        let (up_out, down_out) = output.split_at_mut(n2);
        self.apply_spin_block(up_in, up_out);
        self.apply_spin_block(down_in, down_out);
        for k in 0..n2 {
            let v = self.potential[k];
            let x = self.xs[k];
            let y = self.ys[k];
            up_out[k] += (v + x) * up_in[k] + y * down_in[k];
            down_out[k] += (v - x) * down_in[k] + y * up_in[k];
        }
    }
}

/// The SUSY-exact Hamiltonian: the discrete supercharge applied twice.
/// Positive semidefinite and exactly consistent with the symmetry
/// algebra, at the cost of a wide kinetic stencil.
#[derive(Debug, Clone)]
pub struct SusyHamiltonian {
    q: Supercharge,
}

/// Builds H as Q∘Q on `grid`.
pub fn susy_hamiltonian(grid: &GridSpec) -> SusyHamiltonian {
    SusyHamiltonian { q: supercharge(grid) }
}

impl SusyHamiltonian {
    pub fn supercharge(&self) -> &Supercharge {
        &self.q
    }
}

impl LinearMap for SusyHamiltonian {
    fn dim(&self) -> usize {
        self.q.dim()
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        "hamiltonian (squared supercharge)".into()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let mut scratch = vec![Complex64::ZERO; input.len()];
        self.q.apply_into(input, &mut scratch);
        self.q.apply_into(&scratch, output);
    }
}

/// Multiplication-type commutator map σ₃·∂ₓf − σ₁·∂_yf: diagonal in
/// space, 2×2 in spin. This is what the commutator i[Q, f] equals in the
/// continuum; comparing the two *is* the identity check in
/// [`crate::verify`].
#[derive(Debug, Clone)]
pub struct CommutatorMap {
    n2: usize,
    /// ∂ₓf per node.
    gx: Vec<f64>,
    /// ∂_yf per node.
    gy: Vec<f64>,
    label: String,
}

/// Builds σ₃·∂ₓf − σ₁·∂_yf from an analytically supplied gradient.
pub fn supercharge_commutator(
    grid: &GridSpec,
    label: &str,
    gradient: impl Fn(f64, f64) -> (f64, f64),
) -> Result<CommutatorMap, GridError> {
    let gx = coordinate_diagonal(grid, "∂ₓf", |x, y| gradient(x, y).0)?;
    let gy = coordinate_diagonal(grid, "∂_yf", |x, y| gradient(x, y).1)?;
    Ok(CommutatorMap {
        n2: grid.node_count(),
        gx: gx.values().to_vec(),
        gy: gy.values().to_vec(),
        label: label.to_string(),
    })
}

impl LinearMap for CommutatorMap {
    fn dim(&self) -> usize {
        2 * self.n2
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let (up_in, down_in) = input.split_at(self.n2);
        let (up_out, down_out) = output.split_at_mut(self.n2);
        for k in 0..self.n2 {
            let a = self.gx[k];
            let b = self.gy[k];
            up_out[k] = a * up_in[k] - b * down_in[k];
            down_out[k] = -a * down_in[k] - b * up_in[k];
        }
    }
}
