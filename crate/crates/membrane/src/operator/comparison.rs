//! Scalar comparison operators: the full-box scalar Schrödinger operator
//! p² + x²y², the spin-decoupled lower-bound operator
//! H_M = p² + x²y² − |g(x)| − |g(y)|, its restrictions to the four cut
//! regions, the interface-masked (direct-sum) variant used for
//! bracketing, and the 1D comparison oscillator p² + a²θ².
//!
//! All are assembled as weighted graph Laplacians plus a diagonal
//! potential. Per direction and per side, a node gains 1/h² on the
//! diagonal and a −1/h² coupling for every *connected* active neighbor;
//! a severed link (cut line, or a box edge under Neumann) contributes
//! nothing — the mirror-ghost convention — while a Dirichlet box edge
//! contributes 1/h² on the diagonal alone. Dropping an edge removes the
//! nonnegative form term |ψ_a − ψ_b|²/h², which is exactly why the
//! masked operator lower-bounds the full one (Neumann bracketing) at the
//! discrete level, not merely in the continuum limit.

use num_complex::Complex64;

use crate::cutoff::soft_threshold;
use crate::grid::{restrict_region, Bc, GridError, GridSpec, RegionSpec, RegionTag};
use crate::operator::LinearMap;

/// A real-symmetric operator "graph Laplacian + diagonal potential" on an
/// arbitrary finite node set, applied to one complex value per node.
#[derive(Debug, Clone)]
pub struct ScalarSchrodinger {
    label: String,
    /// Kinetic diagonal plus potential, per local node.
    diag: Vec<f64>,
    /// Potential alone, per local node (for inspection and tests).
    potential: Vec<f64>,
    /// Undirected couplings, each stored once.
    edges: Vec<(u32, u32)>,
    /// Off-diagonal weight, −1/h².
    coupling: f64,
    /// Node coordinates, per local node (1D chains store (θ, 0)).
    positions: Vec<(f64, f64)>,
}

impl ScalarSchrodinger {
    /// The sampled potential, indexed like the operator's local nodes.
    pub fn potential_values(&self) -> &[f64] {
        &self.potential
    }

    /// Coordinates of each local node.
    pub fn node_positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    /// Number of active nearest-neighbour couplings (each counted once).
    /// Masked assemblies have fewer edges than the full box.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The matrix as (diagonal, couplings) when the coupling graph is
    /// exactly the path 0–1–⋯–(n−1), as the 1D chain constructors build
    /// it. Masked or two-dimensional assemblies return `None`.
    pub fn tridiagonal_data(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.diag.len();
        if self.edges.len() + 1 != n {
            return None;
        }
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if (a, b) != (i as u32, (i + 1) as u32) {
                return None;
            }
        }
        Some((self.diag.clone(), vec![self.coupling; n - 1]))
    }
}

impl LinearMap for ScalarSchrodinger {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        for (o, (z, d)) in output.iter_mut().zip(input.iter().zip(&self.diag)) {
            *o = z * *d;
        }
        let c = self.coupling;
        for &(a, b) in &self.edges {
            let (a, b) = (a as usize, b as usize);
            output[a] += input[b] * c;
            output[b] += input[a] * c;
        }
    }
}

/// Assembles a masked graph-Laplacian Schrödinger operator on the 2D grid.
///
/// `active` selects the participating nodes (by global index);
/// `connected` may additionally sever links between two active neighbors.
/// A severed or inactive side follows `cut`: `Bc::Neumann` mirrors across
/// the cut (no term), `Bc::Dirichlet` absorbs (wall term on the diagonal).
/// Box-exit links follow the grid's per-axis boundary conditions.
fn assemble_2d(
    grid: &GridSpec,
    label: String,
    active: impl Fn(usize) -> bool,
    connected: impl Fn(usize, usize) -> bool,
    cut: Bc,
    potential_fn: impl Fn(f64, f64) -> f64,
) -> ScalarSchrodinger {
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);

    let mut local = vec![u32::MAX; n * n];
    let mut positions = Vec::new();
    for idx in 0..n * n {
        if active(idx) {
            local[idx] = positions.len() as u32;
            positions.push(grid.node_xy(idx));
        }
    }

    let mut diag = Vec::with_capacity(positions.len());
    let mut potential = Vec::with_capacity(positions.len());
    let mut edges = Vec::new();
    for idx in 0..n * n {
        if local[idx] == u32::MAX {
            continue;
        }
        let (ix, iy) = (idx % n, idx / n);
        let (x, y) = grid.node_xy(idx);
        let v = potential_fn(x, y);
        let mut d = v;
        let mut side = |neighbor: Option<usize>, bc: Bc| match neighbor {
            Some(nb) => {
                if local[nb] != u32::MAX && connected(idx, nb) {
                    d += inv_h2;
                    if nb > idx {
                        edges.push((local[idx], local[nb]));
                    }
                } else if cut == Bc::Dirichlet {
                    // Absorbing cut: the severed side acts as a wall.
                    d += inv_h2;
                }
                // Mirror cut (Bc::Neumann): severed or inactive neighbor
                // becomes a ghost copy, no term.
            }
            None => {
                if bc == Bc::Dirichlet {
                    d += inv_h2;
                }
            }
        };
        side((ix > 0).then(|| idx - 1), grid.bc_x());
        side((ix + 1 < n).then(|| idx + 1), grid.bc_x());
        side((iy > 0).then(|| idx - n), grid.bc_y());
        side((iy + 1 < n).then(|| idx + n), grid.bc_y());
        diag.push(d);
        potential.push(v);
    }

    ScalarSchrodinger { label, diag, potential, edges, coupling: -inv_h2, positions }
}

/// The crossover potential x²y² − |g(x; m)| − |g(y; m)| shared by the
/// comparison operator and all four region operators (the soft threshold
/// vanishes where a coordinate stays below the cut, so each restriction
/// reproduces its own closed form automatically).
fn crossover_potential(x: f64, y: f64, m: f64) -> f64 {
    x * x * y * y - soft_threshold(x, m).abs() - soft_threshold(y, m).abs()
}

/// Builds the scalar operator p² + x²y² on the full box (one value per
/// node, no spin index).
pub fn scalar_hamiltonian(grid: &GridSpec) -> ScalarSchrodinger {
    assemble_2d(
        grid,
        "scalar hamiltonian".into(),
        |_| true,
        |_, _| true,
        Bc::Neumann,
        |x, y| x * x * y * y,
    )
}

/// Builds the free kinetic operator p² (zero potential) on the full box.
/// Sanity anchor for bracketing: its Neumann ground value is exactly 0
/// (the constant mode).
pub fn free_laplacian(grid: &GridSpec) -> ScalarSchrodinger {
    assemble_2d(grid, "free laplacian".into(), |_| true, |_, _| true, Bc::Neumann, |_, _| 0.0)
}

/// Builds the scalar core of the comparison operator
/// p² + x²y² − |g(x; m)| − |g(y; m)| on the full box. Requires m > 0; m
/// need not be aligned to the grid (no restriction happens here).
pub fn comparison_operator(grid: &GridSpec, m: f64) -> Result<ScalarSchrodinger, GridError> {
    if !(m > 0.0) {
        return Err(GridError::NonPositiveCut(m));
    }
    Ok(assemble_2d(
        grid,
        format!("comparison operator m={m}"),
        |_| true,
        |_, _| true,
        Bc::Neumann,
        |x, y| crossover_potential(x, y, m),
    ))
}

/// Builds the comparison operator acting identically on both spin
/// components (dimension 2·n², matching spinor fields).
pub fn comparison_operator_spinor(grid: &GridSpec, m: f64) -> Result<SpinDoubled, GridError> {
    Ok(SpinDoubled { inner: comparison_operator(grid, m)? })
}

/// Builds the restriction of the comparison operator to one cut region,
/// with mirror-ghost (Neumann) conditions on the cut lines and the
/// grid's own conditions on box edges. The potential restricted to each
/// region reduces to its closed form: x²y² on the inner square, and
/// x²y² minus |x| and/or |y| plus the matching multiple of m outside.
pub fn region_operator(grid: &GridSpec, region: RegionSpec) -> Result<ScalarSchrodinger, GridError> {
    let restricted = restrict_region(grid, region)?;
    let m = region.m;
    Ok(assemble_2d(
        grid,
        format!("region {} operator m={m}", region.tag),
        |idx| restricted.local_index(idx).is_some(),
        |_, _| true,
        Bc::Neumann,
        |x, y| crossover_potential(x, y, m),
    ))
}

/// Builds the interface-masked comparison operator: same nodes and
/// potential as [`comparison_operator`], but every link crossing one of
/// the four cut lines |x| = m, |y| = m is severed. The result is the
/// direct sum of all region restrictions, so its lowest eigenvalue is
/// the minimum over the regions, and its quadratic form lower-bounds the
/// unmasked one exactly.
pub fn partitioned_operator(grid: &GridSpec, m: f64) -> Result<ScalarSchrodinger, GridError> {
    partitioned_operator_with_cuts(grid, m, Bc::Neumann)
}

/// Same node set and potential as [`partitioned_operator`], but with a
/// selectable condition on the four cut lines: `Bc::Neumann` mirrors
/// across each cut (every dropped link removes a non-negative form term,
/// so the ground value can only fall below the unmasked one),
/// `Bc::Dirichlet` absorbs at the cut (each severed side adds a wall
/// term, so the comparison direction flips).
pub fn partitioned_operator_with_cuts(
    grid: &GridSpec,
    m: f64,
    cut: Bc,
) -> Result<ScalarSchrodinger, GridError> {
    // Reuse the restriction validator: m must be positive, grid-aligned,
    // and inside the box for the mask to fall between node columns.
    restrict_region(grid, RegionSpec::new(RegionTag::I, m)?)?;
    let label = match cut {
        Bc::Neumann => format!("partitioned comparison operator m={m}"),
        Bc::Dirichlet => format!("partitioned comparison operator m={m} (absorbing cuts)"),
    };
    Ok(assemble_2d(
        grid,
        label,
        |_| true,
        cut_buckets(grid, m),
        cut,
        |x, y| crossover_potential(x, y, m),
    ))
}

/// Free Laplacian with the same severed links as [`partitioned_operator`]:
/// zero potential, mirror cuts. Every component keeps its constant mode,
/// so masking changes nothing at the bottom of the spectrum — both the
/// full and the masked free operator have Neumann ground value exactly 0.
pub fn free_partitioned_laplacian(grid: &GridSpec, m: f64) -> Result<ScalarSchrodinger, GridError> {
    restrict_region(grid, RegionSpec::new(RegionTag::I, m)?)?;
    Ok(assemble_2d(
        grid,
        format!("free partitioned laplacian m={m}"),
        |_| true,
        cut_buckets(grid, m),
        Bc::Neumann,
        |_, _| 0.0,
    ))
}

/// Predicate keeping only links whose endpoints lie on the same side of
/// every cut line |x| = m, |y| = m (links crossing a cut are severed).
fn cut_buckets(grid: &GridSpec, m: f64) -> impl Fn(usize, usize) -> bool + '_ {
    let bucket = move |idx: usize| {
        let (x, y) = grid.node_xy(idx);
        let side = |c: f64| {
            if c < -m {
                -1i8
            } else if c > m {
                1
            } else {
                0
            }
        };
        (side(x), side(y))
    };
    move |a, b| bucket(a) == bucket(b)
}

/// Builds the 1D comparison oscillator p² + a²θ² on [−l, l] with `n`
/// cell-centered nodes and the given boundary condition on both ends.
pub fn oscillator_chain(a: f64, l: f64, n: usize, bc: Bc) -> ScalarSchrodinger {
    assert!(n >= 2, "oscillator chain needs at least two nodes");
    assert!(l > 0.0 && a.is_finite(), "oscillator scale parameters must be positive/finite");
    let h = 2.0 * l / n as f64;
    let inv_h2 = 1.0 / (h * h);
    let node = |k: usize| 0.5 * h * ((2 * k + 1) as f64 - n as f64);
    let mut diag = Vec::with_capacity(n);
    let mut potential = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n - 1);
    for k in 0..n {
        let theta = node(k);
        let v = a * a * theta * theta;
        let mut d = v;
        if k > 0 {
            d += inv_h2;
        } else if bc == Bc::Dirichlet {
            d += inv_h2;
        }
        if k + 1 < n {
            d += inv_h2;
            edges.push((k as u32, (k + 1) as u32));
        } else if bc == Bc::Dirichlet {
            d += inv_h2;
        }
        diag.push(d);
        potential.push(v);
        positions.push((theta, 0.0));
    }
    ScalarSchrodinger {
        label: format!("oscillator chain a={a}"),
        diag,
        potential,
        edges,
        coupling: -inv_h2,
        positions,
    }
}

/// A scalar operator promoted to spinor fields by acting identically on
/// both spin components. Commutes with every pure spin map.
#[derive(Debug, Clone)]
pub struct SpinDoubled {
    inner: ScalarSchrodinger,
}

impl SpinDoubled {
    /// Wraps any scalar operator.
    pub fn new(inner: ScalarSchrodinger) -> Self {
        SpinDoubled { inner }
    }

    /// The scalar operator acting on each component.
    pub fn scalar(&self) -> &ScalarSchrodinger {
        &self.inner
    }
}

impl LinearMap for SpinDoubled {
    fn dim(&self) -> usize {
        2 * self.inner.dim()
    }

    fn is_hermitian(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("{} (spin-doubled)", self.inner.label)
    }

    fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let n = self.inner.dim();
        self.inner.apply_into(&input[..n], &mut output[..n]);
        self.inner.apply_into(&input[n..], &mut output[n..]);
    }
}
