//! Checks for the cutoff commutator identity, its undamping limit, the
//! discretization consistency of the two Hamiltonian routes, and the
//! quadratic-form bound against the comparison operator.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{params, VerificationReport, VerifyError};
use crate::cutoff::{huber, huber_slope, soft_threshold};
use crate::field::{Spin, SpinorField};
use crate::grid::{Bc, GridSpec};
use crate::operator::{
    comparison_operator_spinor, dot, hamiltonian, supercharge, supercharge_commutator,
    susy_hamiltonian, vec_norm, CommutatorMap, LinearMap,
};

/// Norm-fraction limit in the outer two cell rings above which a test
/// field is rejected as touching the boundary. The standard test fields
/// on half-length-6 boxes carry ≲ 1e-10 of their mass there; anything
/// past this limit means the box is too small for the chosen widths and
/// boundary terms would contaminate the interior identity being tested.
const BOUNDARY_GUARD: f64 = 1e-8;

/// Grid-weighted inner product ⟨a, b⟩ = h² Σ conj(a)·b.
fn inner_h(grid: &GridSpec, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    dot(a, b) * grid.spacing() * grid.spacing()
}

/// Grid-weighted norm h·‖v‖.
fn norm_h(grid: &GridSpec, v: &[Complex64]) -> f64 {
    grid.spacing() * vec_norm(v)
}

/// Multiplies both spin components pointwise by the scalar function f.
fn scalar_multiply(
    grid: &GridSpec,
    f: &impl Fn(f64, f64) -> f64,
    v: &[Complex64],
) -> Vec<Complex64> {
    let nn = grid.node_count();
    let mut out = vec![Complex64::default(); 2 * nn];
    for idx in 0..nn {
        let (x, y) = grid.node_xy(idx);
        let s = f(x, y);
        out[idx] = v[idx] * s;
        out[nn + idx] = v[nn + idx] * s;
    }
    out
}

/// Mixed-spin smooth test pair (φ, ψ): sums of interior Gaussian bumps
/// with different widths, centers, and a complex relative phase, so every
/// spin block of the identity is exercised. Both are unit-norm and
/// rejected if they touch the outer two cell rings.
fn test_field_pair(grid: &GridSpec) -> Result<(SpinorField, SpinorField), VerifyError> {
    let combine = |parts: &[(Complex64, SpinorField)]| -> SpinorField {
        let mut values = vec![Complex64::default(); 2 * grid.node_count()];
        for (w, f) in parts {
            for (acc, v) in values.iter_mut().zip(f.values()) {
                *acc += *w * v;
            }
        }
        let mut field = SpinorField::from_values(grid, values).expect("layout matches grid");
        field.normalize();
        field
    };
    let phi = combine(&[
        (Complex64::new(1.0, 0.0), SpinorField::gaussian(grid, 0.9, (0.25, -0.15), Spin::Up)),
        (Complex64::new(0.8, 0.0), SpinorField::gaussian(grid, 0.7, (-0.3, 0.2), Spin::Down)),
    ]);
    let psi = combine(&[
        (Complex64::new(1.0, 0.0), SpinorField::gaussian(grid, 1.0, (0.0, 0.0), Spin::Up)),
        (Complex64::new(0.0, 0.6), SpinorField::gaussian(grid, 0.8, (0.35, 0.3), Spin::Down)),
    ]);
    phi.require_interior(BOUNDARY_GUARD)?;
    psi.require_interior(BOUNDARY_GUARD)?;
    Ok((phi, psi))
}

/// Both sides of the multiplication-commutator identity on one grid:
/// LHS = i[⟨Qφ, fψ⟩ − ⟨fφ, Qψ⟩], RHS = ⟨φ, (σ₃∂ₓf − σ₁∂_yf)ψ⟩.
fn commutator_sides(
    grid: &GridSpec,
    f: &impl Fn(f64, f64) -> f64,
    cmap: &CommutatorMap,
    phi: &SpinorField,
    psi: &SpinorField,
) -> (Complex64, Complex64) {
    let q = supercharge(grid);
    let q_phi = q.apply(phi.values());
    let q_psi = q.apply(psi.values());
    let f_psi = scalar_multiply(grid, f, psi.values());
    let f_phi = scalar_multiply(grid, f, phi.values());
    let lhs = Complex64::i() * (inner_h(grid, &q_phi, &f_psi) - inner_h(grid, &f_phi, &q_psi));
    let rhs = inner_h(grid, phi.values(), &cmap.apply(psi.values()));
    (lhs, rhs)
}

/// Mean observed convergence order of a defect sequence across grids of
/// decreasing spacing.
fn mean_order(spacings: &[f64], defects: &[f64]) -> (Vec<f64>, f64) {
    let orders: Vec<f64> = defects
        .windows(2)
        .zip(spacings.windows(2))
        .map(|(d, h)| (d[0] / d[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let mean = orders.iter().sum::<f64>() / orders.len() as f64;
    (orders, mean)
}

fn validate_ascending(ns: &[usize]) -> Result<(), VerifyError> {
    if ns.len() < 2 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(VerifyError::BadSchedule(format!(
            "need at least two strictly increasing grid sizes, got {ns:?}"
        )));
    }
    Ok(())
}

/// Verifies the multiplication-commutator identity
/// i[⟨Qφ, fψ⟩ − ⟨fφ, Qψ⟩] = ⟨φ, (σ₃∂ₓf − σ₁∂_yf)ψ⟩
/// for a smooth bounded f, by measuring the defect across a schedule of
/// grids with halving spacing. The defect comes purely from the
/// difference stencil (the multiplication parts commute exactly), so it
/// must shrink at second order; the report's measured defect is the
/// deviation |observed order − 2| with tolerance 0.5.
pub fn check_commutator_identity(
    half_length: f64,
    points_schedule: &[usize],
    bc: Bc,
    function_label: &str,
    f: impl Fn(f64, f64) -> f64,
    gradient: impl Fn(f64, f64) -> (f64, f64),
) -> Result<VerificationReport, VerifyError> {
    validate_ascending(points_schedule)?;
    let mut defects = Vec::new();
    let mut spacings = Vec::new();
    let mut magnitudes = Vec::new();
    for &n in points_schedule {
        let grid = GridSpec::new(half_length, n, bc, bc)?;
        let cmap = supercharge_commutator(&grid, function_label, &gradient)?;
        let (phi, psi) = test_field_pair(&grid)?;
        let (lhs, rhs) = commutator_sides(&grid, &f, &cmap, &phi, &psi);
        defects.push((lhs - rhs).norm());
        magnitudes.push(rhs.norm());
        spacings.push(grid.spacing());
    }
    let (orders, mean) = mean_order(&spacings, &defects);
    Ok(VerificationReport::new(
        format!("commutator identity convergence ({function_label})"),
        params(&[
            ("half_length", half_length),
            ("finest_points", *points_schedule.last().unwrap() as f64),
        ]),
        (mean - 2.0).abs(),
        0.5,
    )
    .with_artifact("defects", defects)
    .with_artifact("observed_orders", orders)
    .with_artifact("identity_magnitudes", magnitudes)
    .with_artifact("spacings", spacings))
}

/// Degenerate case of the commutator identity: a constant f commutes
/// with the supercharge exactly, so both sides vanish to rounding. The
/// measured defect is absolute, tolerance 1e−14.
pub fn check_commutator_vanishes(
    half_length: f64,
    points: usize,
    bc: Bc,
    constant: f64,
) -> Result<VerificationReport, VerifyError> {
    let grid = GridSpec::new(half_length, points, bc, bc)?;
    let cmap = supercharge_commutator(&grid, "zero gradient", |_, _| (0.0, 0.0))?;
    let (phi, psi) = test_field_pair(&grid)?;
    let f = move |_: f64, _: f64| constant;
    let (lhs, rhs) = commutator_sides(&grid, &f, &cmap, &phi, &psi);
    Ok(VerificationReport::new(
        "commutator identity vanishes for constant function",
        params(&[
            ("half_length", half_length),
            ("points_per_axis", points as f64),
            ("constant", constant),
        ]),
        (lhs - rhs).norm(),
        1e-14,
    ))
}

/// Verifies that the direct Hamiltonian (stencil + potential) and the
/// supersymmetric route (apply the supercharge twice) agree up to
/// second-order discretization error: ‖(H_direct − H_susy)ψ‖ on a fixed
/// smooth Gaussian must shrink at observed order 2.0 ± 0.5 across the
/// schedule.
pub fn check_discretization_consistency(
    half_length: f64,
    points_schedule: &[usize],
    bc: Bc,
    width: f64,
) -> Result<VerificationReport, VerifyError> {
    validate_ascending(points_schedule)?;
    let mut defects = Vec::new();
    let mut spacings = Vec::new();
    for &n in points_schedule {
        let grid = GridSpec::new(half_length, n, bc, bc)?;
        let psi = SpinorField::gaussian(&grid, width, (0.0, 0.0), Spin::Up);
        let direct = hamiltonian(&grid).apply(psi.values());
        let susy = susy_hamiltonian(&grid).apply(psi.values());
        let diff: Vec<Complex64> = direct.iter().zip(&susy).map(|(a, b)| a - b).collect();
        defects.push(norm_h(&grid, &diff));
        spacings.push(grid.spacing());
    }
    let (orders, mean) = mean_order(&spacings, &defects);
    Ok(VerificationReport::new(
        "hamiltonian route consistency order",
        params(&[
            ("half_length", half_length),
            ("finest_points", *points_schedule.last().unwrap() as f64),
            ("gaussian_width", width),
        ]),
        (mean - 2.0).abs(),
        0.5,
    )
    .with_artifact("defects", defects)
    .with_artifact("observed_orders", orders)
    .with_artifact("spacings", spacings))
}

/// Verifies the undamping strong limit: as the damping rate ε decreases
/// to 0, the damped-slope commutator converges to the undamped limit
/// h'(x)σ₃ + h'(y)σ₁ on fixed test fields. The defect sequence must be
/// strictly decreasing, the final defect at most `ratio_tol` of the
/// first, the ε = 0 member must coincide exactly, and on a compactly
/// supported bump the defect must respect the explicit branch bound
/// 2ε·sup|h| over the support.
pub fn check_strong_limit(
    grid: &GridSpec,
    m: f64,
    eps_sequence: &[f64],
    ratio_tol: f64,
) -> Result<VerificationReport, VerifyError> {
    if eps_sequence.len() < 2
        || eps_sequence.windows(2).any(|w| w[1] >= w[0])
        || eps_sequence.iter().any(|&e| e <= 0.0)
    {
        return Err(VerifyError::BadSchedule(format!(
            "damping schedule must be strictly decreasing and positive, got {eps_sequence:?}"
        )));
    }
    let limit =
        supercharge_commutator(grid, "undamped slope commutator", |x, y| {
            (huber_slope(x, m), -huber_slope(y, m))
        })?;

    let fields = [
        SpinorField::gaussian(grid, 1.0, (0.0, 0.0), Spin::Up),
        SpinorField::gaussian(grid, 0.8, (0.5, -0.5), Spin::Down),
        SpinorField::bump(grid, 1.0, Spin::Up),
    ];
    let bump = &fields[2];
    // sup of the ramp over the bump's support, for the branch bound.
    let mut sup_ramp: f64 = 0.0;
    let nn = grid.node_count();
    for idx in 0..nn {
        if bump.values()[idx].norm_sqr() > 0.0 {
            let (x, y) = grid.node_xy(idx);
            sup_ramp = sup_ramp.max(huber(x, m).abs()).max(huber(y, m).abs());
        }
    }

    let defect_against_limit = |eps: f64| -> Result<(f64, f64), VerifyError> {
        let p = crate::cutoff::CutoffParams::new(m, eps)?;
        let damped = supercharge_commutator(grid, "damped slope commutator", |x, y| {
            p.pair_gradient(x, y)
        })?;
        let mut worst: f64 = 0.0;
        let mut bump_defect = 0.0;
        for (i, field) in fields.iter().enumerate() {
            let a = damped.apply(field.values());
            let b = limit.apply(field.values());
            let diff: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            let d = norm_h(grid, &diff);
            worst = worst.max(d);
            if i == 2 {
                bump_defect = d;
            }
        }
        Ok((worst, bump_defect))
    };

    let mut defects = Vec::new();
    let mut bump_margins = Vec::new();
    let mut gates_hold = true;
    for &eps in eps_sequence {
        let (worst, bump_defect) = defect_against_limit(eps)?;
        defects.push(worst);
        let bound = 2.0 * eps * sup_ramp;
        bump_margins.push(bound - bump_defect);
        if bump_defect > bound {
            gates_hold = false;
        }
    }
    let strictly_decreasing = defects.windows(2).all(|w| w[1] < w[0]);
    // The ε = 0 member must coincide with the limit operator exactly:
    // the damped slope formula reduces to the ramp slope identically.
    let p0 = crate::cutoff::CutoffParams::new(m, 0.0)?;
    let undamped = supercharge_commutator(grid, "zero damping commutator", |x, y| {
        p0.pair_gradient(x, y)
    })?;
    let mut exact_zero = 0.0_f64;
    for field in &fields {
        let a = undamped.apply(field.values());
        let b = limit.apply(field.values());
        let diff: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        exact_zero = exact_zero.max(norm_h(grid, &diff));
    }
    if exact_zero != 0.0 {
        gates_hold = false;
    }

    let ratio = defects.last().unwrap() / defects.first().unwrap();
    let measured = if strictly_decreasing && gates_hold { ratio } else { f64::INFINITY };
    Ok(VerificationReport::new(
        "strong limit of the damped commutator",
        params(&[
            ("half_length", grid.half_length()),
            ("points_per_axis", grid.points_per_axis() as f64),
            ("crossover_scale", m),
        ]),
        measured,
        ratio_tol,
    )
    .with_artifact("damping_rates", eps_sequence.to_vec())
    .with_artifact("defects", defects)
    .with_artifact("bump_bound_margins", bump_margins)
    .with_artifact("defect_at_zero_damping", vec![exact_zero]))
}

/// Pointwise data of the form-bound difference operator
/// g(x)σ₃ + g(y)σ₁ + (|g(x)| + |g(y)|)·Id with g the soft threshold.
struct DifferenceWeights {
    gx: Vec<f64>,
    gy: Vec<f64>,
    w: Vec<f64>,
}

impl DifferenceWeights {
    fn build(grid: &GridSpec, m: f64) -> Self {
        let nn = grid.node_count();
        let mut gx = Vec::with_capacity(nn);
        let mut gy = Vec::with_capacity(nn);
        let mut w = Vec::with_capacity(nn);
        for idx in 0..nn {
            let (x, y) = grid.node_xy(idx);
            let a = soft_threshold(x, m);
            let b = soft_threshold(y, m);
            gx.push(a);
            gy.push(b);
            w.push(a.abs() + b.abs());
        }
        Self { gx, gy, w }
    }

    /// ⟨ψ, Dψ⟩ with the grid weight.
    fn form(&self, grid: &GridSpec, v: &[Complex64]) -> f64 {
        let nn = grid.node_count();
        let (up, down) = v.split_at(nn);
        let h2 = grid.spacing() * grid.spacing();
        let mut acc = 0.0;
        for i in 0..nn {
            acc += (self.w[i] + self.gx[i]) * up[i].norm_sqr()
                + (self.w[i] - self.gx[i]) * down[i].norm_sqr()
                + 2.0 * self.gy[i] * (up[i].conj() * down[i]).re;
        }
        acc * h2
    }

    /// min over nodes of (|g(x)|+|g(y)|) − √(g(x)²+g(y)²) — the 2×2
    /// block of D at each node is PSD exactly when this is ≥ 0.
    fn pointwise_margin(&self) -> f64 {
        self.gx
            .iter()
            .zip(&self.gy)
            .zip(&self.w)
            .map(|((a, b), w)| w - (a * a + b * b).sqrt())
            .fold(f64::INFINITY, f64::min)
    }
}

/// One evaluation of the form-bound gap for a given field:
/// gap = ⟨ψ,Hψ⟩ − ⟨ψ,(h'(x)σ₃+h'(y)σ₁)ψ⟩ − ⟨ψ,H_Mψ⟩, plus the value of
/// the difference form that the gap must equal algebraically.
pub struct FormGap {
    pub gap: f64,
    pub difference_form: f64,
}

/// Computes the form-bound gap and its algebraic value for one field.
pub fn form_bound_gap(grid: &GridSpec, m: f64, psi: &SpinorField) -> Result<FormGap, VerifyError> {
    let h_op = hamiltonian(grid);
    let c0 = supercharge_commutator(grid, "slope part", |x, y| {
        (huber_slope(x, m), -huber_slope(y, m))
    })?;
    let hm = comparison_operator_spinor(grid, m)?;
    let weights = DifferenceWeights::build(grid, m);
    let v = psi.values();
    let gap = inner_h(grid, v, &h_op.apply(v)).re
        - inner_h(grid, v, &c0.apply(v)).re
        - inner_h(grid, v, &hm.apply(v)).re;
    Ok(FormGap { gap, difference_form: weights.form(grid, v) })
}

/// Verifies the quadratic-form bound: for random normalized fields,
/// ⟨ψ,(H − h'(x)σ₃ − h'(y)σ₁)ψ⟩ ≥ ⟨ψ,H_Mψ⟩ with gap ≥ −1e−10, and the
/// gap equals the form of the difference operator
/// g(x)σ₃ + g(y)σ₁ + |g(x)| + |g(y)| — which is PSD pointwise exactly.
pub fn check_form_bound(
    grid: &GridSpec,
    m: f64,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let h_op = hamiltonian(grid);
    let c0 = supercharge_commutator(grid, "slope part", |x, y| {
        (huber_slope(x, m), -huber_slope(y, m))
    })?;
    let hm = comparison_operator_spinor(grid, m)?;
    let weights = DifferenceWeights::build(grid, m);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    let mut worst_mismatch: f64 = 0.0;
    for _ in 0..trials {
        let psi = SpinorField::random(grid, &mut rng);
        let v = psi.values();
        let eh = inner_h(grid, v, &h_op.apply(v)).re;
        let ec = inner_h(grid, v, &c0.apply(v)).re;
        let em = inner_h(grid, v, &hm.apply(v)).re;
        let gap = eh - ec - em;
        let dform = weights.form(grid, v);
        let scale = eh.abs() + ec.abs() + em.abs() + 1.0;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
        worst_mismatch = worst_mismatch.max((gap - dform).abs() / scale);
    }

    let violation = (-min_gap).max(0.0);
    Ok(VerificationReport::new(
        "quadratic form bound against comparison operator",
        params(&[
            ("half_length", grid.half_length()),
            ("points_per_axis", grid.points_per_axis() as f64),
            ("crossover_scale", m),
            ("trials", trials as f64),
            ("seed", seed as f64),
        ]),
        violation.max(worst_mismatch),
        1e-10,
    )
    .with_artifact("min_gap", vec![min_gap])
    .with_artifact("max_gap", vec![max_gap])
    .with_artifact("identity_mismatch", vec![worst_mismatch])
    .with_artifact("pointwise_psd_margin", vec![weights.pointwise_margin()]))
}
