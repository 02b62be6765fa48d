//! Spectral lower-bound checks: Neumann bracketing over the four-region
//! partition, quantitative regional positivity with fitted constants,
//! and the 1D Neumann oscillator bound that powers the strip estimate.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{params, BoundFit, VerificationReport, VerifyError};
use crate::eigen::{
    smallest_eigenpairs, tridiagonal_smallest_eigenpairs, SolverConfig, SpectralResult,
};
use crate::grid::{Bc, GridSpec, RegionSpec, RegionTag};
use crate::operator::{
    comparison_operator, free_laplacian, free_partitioned_laplacian, oscillator_chain,
    partitioned_operator, partitioned_operator_with_cuts, region_operator, LinearMap,
    ScalarSchrodinger,
};

/// Certified ground value of a scalar operator: (λ_min, residual).
fn ground_value(op: &ScalarSchrodinger, tol: f64, seed: u64) -> Result<(f64, f64), VerifyError> {
    let res = ground_result(op, tol, seed)?;
    Ok((res.eigenvalues[0], res.residuals[0]))
}

/// Certified ground value of a 1D chain, solved directly from its
/// tridiagonal data (Sturm bisection plus inverse iteration, O(n))
/// instead of through the Krylov solver, whose subspace must grow to
/// the full dimension on these stiff single-line problems. The pair is
/// certified against the assembled operator's own action, so a mismatch
/// between the extracted matrix and the operator cannot pass silently.
fn chain_ground_value(
    op: &ScalarSchrodinger,
    tol: f64,
    seed: u64,
) -> Result<(f64, f64), VerifyError> {
    let (alphas, betas) =
        op.tridiagonal_data().expect("oscillator chains couple nodes along a single line");
    let (thetas, vecs) = tridiagonal_smallest_eigenpairs(&alphas, &betas, 1, seed);
    let theta = thetas[0];
    let x: Vec<Complex64> = vecs[0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut out = vec![Complex64::ZERO; x.len()];
    op.apply_into(&x, &mut out);
    let residual = out
        .iter()
        .zip(x.iter())
        .map(|(o, xi)| (o - theta * xi).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > tol {
        return Err(VerifyError::Unconverged { label: op.label(), worst_residual: residual });
    }
    Ok((theta, residual))
}

/// Certified ground solve keeping the eigenvector.
fn ground_result(op: &ScalarSchrodinger, tol: f64, seed: u64) -> Result<SpectralResult, VerifyError> {
    let cfg = SolverConfig::new(1).with_tol(tol).with_seed(seed);
    let res = smallest_eigenpairs(op, &cfg)?;
    if !res.all_converged() {
        return Err(VerifyError::Unconverged {
            label: op.label(),
            worst_residual: res.residuals.iter().cloned().fold(0.0, f64::max),
        });
    }
    Ok(res)
}

/// Verifies discrete Neumann bracketing: severing every link across the
/// four cut lines |x| = m, |y| = m removes non-negative quadratic-form
/// terms, so the masked (direct-sum) operator bounds the full comparison
/// operator from below *at every resolution*:
/// λ_min(full) ≥ λ_min(partitioned).
///
/// The check measures the margin across a spacing-halving schedule,
/// estimates the discretization tolerance from consecutive eigenvalue
/// movement (which must shrink at observed order ≥ 1), and runs two
/// controls: the potential-free split (both sides exactly 0) and the
/// absorbing-cut variant (which flips the comparison direction).
pub fn bracketing_test(
    half_length: f64,
    m: f64,
    points_schedule: &[usize],
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    if points_schedule.len() < 3 || points_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(VerifyError::BadSchedule(format!(
            "bracketing needs at least three strictly increasing grid sizes, got {points_schedule:?}"
        )));
    }
    let solver_tol = 1e-9;

    let mut spacings = Vec::new();
    let mut full_values = Vec::new();
    let mut part_values = Vec::new();
    let mut margins = Vec::new();
    for &n in points_schedule {
        let grid = GridSpec::new(half_length, n, Bc::Neumann, Bc::Neumann)?;
        let (full, _) = ground_value(&comparison_operator(&grid, m)?, solver_tol, seed)?;
        let (parts, _) = ground_value(&partitioned_operator(&grid, m)?, solver_tol, seed)?;
        spacings.push(grid.spacing());
        full_values.push(full);
        part_values.push(parts);
        margins.push(full - parts);
    }

    // Discretization tolerance: eigenvalue movement under h → h/2, which
    // must shrink at observed order ≥ 1.
    let movement: Vec<f64> = full_values
        .windows(2)
        .zip(part_values.windows(2))
        .map(|(f, p)| (f[1] - f[0]).abs() + (p[1] - p[0]).abs())
        .collect();
    let orders: Vec<f64> = movement
        .windows(2)
        .zip(spacings.windows(2))
        .map(|(d, h)| (d[0] / d[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let tol_disc = *movement.last().unwrap();
    let order_ok = orders.iter().all(|&o| o >= 1.0);

    // Control 1: the potential-free split costs nothing — both the full
    // and the masked free Neumann Laplacian sit at exactly 0.
    let coarse = GridSpec::new(half_length, points_schedule[0], Bc::Neumann, Bc::Neumann)?;
    let (free_full, _) = ground_value(&free_laplacian(&coarse), solver_tol, seed)?;
    let (free_parts, _) = ground_value(&free_partitioned_laplacian(&coarse, m)?, solver_tol, seed)?;
    let free_ok = free_full.abs() <= 1e-8 && free_parts.abs() <= 1e-8;

    // Control 2: absorbing (wall) cuts add non-negative terms instead of
    // removing them — the comparison direction must flip.
    let (absorbing, _) = ground_value(
        &partitioned_operator_with_cuts(&coarse, m, Bc::Dirichlet)?,
        solver_tol,
        seed,
    )?;
    let reversal_margin = absorbing - full_values[0];
    let reversal_ok = reversal_margin >= -solver_tol;

    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let margin_after_tol = margins.last().unwrap() - tol_disc;
    let gates = order_ok && free_ok && reversal_ok && margin_after_tol >= 0.0;
    let measured = if gates { (-min_margin).max(0.0) } else { f64::INFINITY };

    Ok(VerificationReport::new(
        "neumann bracketing over the four-region partition",
        params(&[
            ("half_length", half_length),
            ("cut_scale", m),
            ("finest_points", *points_schedule.last().unwrap() as f64),
            ("seed", seed as f64),
        ]),
        measured,
        solver_tol,
    )
    .with_artifact("spacings", spacings)
    .with_artifact("full_ground_values", full_values)
    .with_artifact("partitioned_ground_values", part_values)
    .with_artifact("margins", margins)
    .with_artifact("eigenvalue_movement", movement)
    .with_artifact("movement_orders", orders)
    .with_artifact("discretization_tolerance", vec![tol_disc])
    .with_artifact("margin_after_discretization_tolerance", vec![margin_after_tol])
    .with_artifact("free_split_ground_values", vec![free_full, free_parts])
    .with_artifact("absorbing_cut_reversal_margin", vec![reversal_margin]))
}

const REGION_TAGS: [RegionTag; 4] = [RegionTag::I, RegionTag::II, RegionTag::III, RegionTag::IV];

/// Ground data for one region restriction: (λ_min, residual,
/// outer-boundary norm fraction of the ground vector, outer-node share).
fn region_ground(
    grid: &GridSpec,
    tag: RegionTag,
    m: f64,
    tol: f64,
    seed: u64,
) -> Result<(f64, f64, f64, f64), VerifyError> {
    let op = region_operator(grid, RegionSpec::new(tag, m)?)?;
    let res = ground_result(&op, tol, seed)?;
    let vector = &res.eigenvectors.as_ref().expect("solver keeps vectors")[0];

    // Norm fraction in the outer two cell rings of the *box*, compared
    // with the region's share of nodes there. Strip regions legitimately
    // spread to the reflecting box edge along their flat direction, so
    // the diagnostic flags anomalous concentration (≫ the uniform
    // share), not mere contact.
    let l = grid.half_length();
    let h = grid.spacing();
    let outer = |x: f64, y: f64| x.abs() > l - 2.0 * h || y.abs() > l - 2.0 * h;
    let mut boundary_mass = 0.0;
    let mut total_mass = 0.0;
    let mut outer_nodes = 0usize;
    let positions = op.node_positions();
    for (v, &(x, y)) in vector.iter().zip(positions) {
        let w = v.norm_sqr();
        total_mass += w;
        if outer(x, y) {
            boundary_mass += w;
            outer_nodes += 1;
        }
    }
    let fraction = boundary_mass / total_mass;
    let share = outer_nodes as f64 / positions.len() as f64;
    Ok((res.eigenvalues[0], res.residuals[0], fraction, share))
}

/// Scans the four regional operators over a schedule of cut scales and
/// reports certified positivity per scale, the measured positivity
/// threshold, and the fitted constant of the strip bound
/// λ_min(second region) ≥ m − Ĉ·m⁻², checked for stability between the
/// two resolutions. The fourth region's positivity is additionally
/// confirmed by pointwise sampling of its closed-form potential.
pub fn region_positivity_scan(
    half_length: f64,
    m_list: &[f64],
    n_fine: usize,
    n_coarse: usize,
    seed: u64,
) -> Result<(Vec<VerificationReport>, BoundFit), VerifyError> {
    if m_list.is_empty() || m_list.windows(2).any(|w| w[1] <= w[0]) || m_list[0] <= 0.0 {
        return Err(VerifyError::BadSchedule(format!(
            "cut scales must be positive and strictly increasing, got {m_list:?}"
        )));
    }
    if n_coarse >= n_fine {
        return Err(VerifyError::BadSchedule(format!(
            "stability fit needs n_coarse < n_fine, got {n_coarse} ≥ {n_fine}"
        )));
    }
    let solver_tol = 1e-8;
    let fine = GridSpec::new(half_length, n_fine, Bc::Neumann, Bc::Neumann)?;
    let coarse = GridSpec::new(half_length, n_coarse, Bc::Neumann, Bc::Neumann)?;

    let mut reports = Vec::new();
    let mut strip_samples_fine = Vec::new();
    let mut strip_samples_coarse = Vec::new();
    let mut m_star = f64::NAN;
    for &m in m_list {
        let mut lambdas = Vec::new();
        let mut residuals = Vec::new();
        let mut fractions = Vec::new();
        let mut contaminated = false;
        for tag in REGION_TAGS {
            let (lambda, residual, fraction, share) = region_ground(&fine, tag, m, solver_tol, seed)?;
            // Anomalous boundary concentration: an order of magnitude
            // above the uniform share means the box truncates the
            // regional ground state.
            if fraction > 10.0 * share + 1e-12 {
                contaminated = true;
            }
            lambdas.push(lambda);
            residuals.push(residual);
            fractions.push(fraction);
        }
        let (strip_coarse, _, _, _) = region_ground(&coarse, RegionTag::II, m, solver_tol, seed)?;
        strip_samples_fine.push((m, lambdas[1]));
        strip_samples_coarse.push((m, strip_coarse));

        // Certified positivity: every true regional eigenvalue lies
        // within the residual of its Ritz value.
        let certified_defect = lambdas
            .iter()
            .zip(&residuals)
            .map(|(l, r)| r - l)
            .fold(f64::NEG_INFINITY, f64::max);
        let measured = if contaminated { f64::INFINITY } else { certified_defect };
        if measured <= 0.0 && m_star.is_nan() {
            m_star = m;
        }
        reports.push(
            VerificationReport::new(
                format!("regional positivity at cut scale {m}"),
                params(&[
                    ("half_length", half_length),
                    ("points_per_axis", n_fine as f64),
                    ("cut_scale", m),
                    ("seed", seed as f64),
                ]),
                measured,
                0.0,
            )
            .with_artifact("ground_values", lambdas)
            .with_artifact("residuals", residuals)
            .with_artifact("boundary_fractions", fractions)
            .with_artifact("inconclusive", vec![if contaminated { 1.0 } else { 0.0 }]),
        );
    }

    // Strip bound fit Ĉ = max_m (m − λ)·m², on both resolutions.
    let fit_constant = |samples: &[(f64, f64)]| -> f64 {
        samples.iter().map(|(m, l)| (m - l) * m * m).fold(0.0, f64::max)
    };
    let c_fine = fit_constant(&strip_samples_fine);
    let c_coarse = fit_constant(&strip_samples_coarse);
    let stability = (c_fine - c_coarse).abs() / c_fine.max(1e-12);
    let strip_margins: Vec<f64> = strip_samples_fine
        .iter()
        .map(|(m, l)| l - (m - c_fine / (m * m)))
        .collect();

    // Fourth-region pointwise floor: the closed-form potential
    // x²y² − |x| − |y| + 2m dominates (m³ − 2)·m + 2m on sampled points.
    let m_sample = 2.0_f64.min(*m_list.last().unwrap());
    let floor = (0.5 * m_sample.powi(3) - 1.0) * 2.0 * m_sample + 2.0 * m_sample;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut sampled_min = f64::INFINITY;
    for _ in 0..100_000 {
        let draw = |rng: &mut ChaCha8Rng| {
            let mag = m_sample + (half_length - m_sample) * rng.gen::<f64>();
            if rng.gen::<bool>() {
                mag
            } else {
                -mag
            }
        };
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let v = x * x * y * y - x.abs() - y.abs() + 2.0 * m_sample;
        sampled_min = sampled_min.min(v);
    }
    let sampling_ok = sampled_min >= floor - 1e-9;

    let summary_measured = if sampling_ok { stability } else { f64::INFINITY };
    reports.push(
        VerificationReport::new(
            "regional scan summary: strip constant stability",
            params(&[
                ("half_length", half_length),
                ("fine_points", n_fine as f64),
                ("coarse_points", n_coarse as f64),
                ("seed", seed as f64),
            ]),
            summary_measured,
            0.10,
        )
        .with_artifact("cut_scales", m_list.to_vec())
        .with_artifact("strip_ground_values", strip_samples_fine.iter().map(|s| s.1).collect())
        .with_artifact("fitted_constant_fine", vec![c_fine])
        .with_artifact("fitted_constant_coarse", vec![c_coarse])
        .with_artifact("strip_bound_margins", strip_margins)
        .with_artifact("positivity_threshold", vec![m_star])
        .with_artifact("corner_sampled_minimum", vec![sampled_min])
        .with_artifact("corner_closed_form_floor", vec![floor]),
    );

    let fit = BoundFit {
        samples: strip_samples_fine,
        fitted_constant: c_fine,
        bound_form: "M - C/M^2".into(),
    };
    Ok((reports, fit))
}

/// Verifies the 1D Neumann oscillator bound: the ground value of
/// p² + θ² on [−a, a] with Neumann ends approaches 1 from below, with
/// deficit 1 − λ_min(a) positive and bounded by Ĉ/a², where
/// Ĉ = max_a (1 − λ_min(a))·a² is fitted, never assumed, and must be
/// stable between the two resolutions. The scaled consequence
/// λ_min(p² + w²θ² on [−b, b]) ≥ |w| − Ĉ·b⁻² is spot-checked at b = 2
/// for slopes w chosen so the effective half-length √w·b of the
/// rescaled problem coincides with sampled half-lengths — the fitted
/// constant certifiably dominates the deficit exactly there, whereas
/// between samples the true deficit·a² curve can exceed the sampled
/// maximum (it peaks near a ≈ 1.4).
pub fn neumann_oscillator_bound(
    a_list: &[f64],
    n_coarse: usize,
    n_fine: usize,
    seed: u64,
) -> Result<(VerificationReport, BoundFit), VerifyError> {
    if a_list.is_empty() || a_list.windows(2).any(|w| w[1] <= w[0]) || a_list[0] <= 0.0 {
        return Err(VerifyError::BadSchedule(format!(
            "half-lengths must be positive and strictly increasing, got {a_list:?}"
        )));
    }
    if n_coarse >= n_fine {
        return Err(VerifyError::BadSchedule(format!(
            "stability fit needs n_coarse < n_fine, got {n_coarse} ≥ {n_fine}"
        )));
    }
    // Absolute residual target per chain. The rounding floor of a
    // computed residual is ~ ε‖A‖ and the stencil norm grows as 4/h²
    // (h = 2a/n), so finely resolved chains cannot certify 1e−10 in
    // absolute terms; the target sits a safe factor above each chain's
    // floor and never looser than the eigenvalue scales measured here.
    let chain_tol = |w: f64, a: f64, n: usize| -> f64 {
        let h = 2.0 * a / n as f64;
        let norm_est = 4.0 / (h * h) + w * w * a * a;
        (64.0 * f64::EPSILON * norm_est).max(1e-10)
    };

    let mut samples = Vec::new();
    let mut deficits_fine = Vec::new();
    let mut deficits_coarse = Vec::new();
    for &a in a_list {
        let (lf, _) = chain_ground_value(
            &oscillator_chain(1.0, a, n_fine, Bc::Neumann),
            chain_tol(1.0, a, n_fine),
            seed,
        )?;
        let (lc, _) = chain_ground_value(
            &oscillator_chain(1.0, a, n_coarse, Bc::Neumann),
            chain_tol(1.0, a, n_coarse),
            seed,
        )?;
        samples.push((a, lf));
        deficits_fine.push(1.0 - lf);
        deficits_coarse.push(1.0 - lc);
    }
    let fit = |deficits: &[f64]| -> f64 {
        deficits.iter().zip(a_list).map(|(d, a)| d * a * a).fold(0.0, f64::max)
    };
    let c_fine = fit(&deficits_fine);
    let c_coarse = fit(&deficits_coarse);
    let stability = (c_fine - c_coarse).abs() / c_fine.max(1e-12);

    let deficits_positive = deficits_fine.iter().all(|&d| d > 0.0);
    // At generous half-length the ground value must sit inside
    // [1 − 1e−4, 1): the boundary correction is exponentially small.
    let last_lambda = samples.last().unwrap().1;
    let window_ok = a_list.last().unwrap() < &16.0
        || (last_lambda >= 1.0 - 1e-4 && last_lambda < 1.0);

    // Scaled consequence at box half-width 2, slopes w = (a/2)² so the
    // rescaled problem reuses sampled half-lengths exactly.
    let scaled_box = 2.0;
    let slopes: Vec<f64> =
        a_list.iter().take(4).map(|a| (a / scaled_box) * (a / scaled_box)).collect();
    let mut scaled_values = Vec::new();
    let mut scaled_floors = Vec::new();
    let mut scaled_ok = true;
    for (i, &w) in slopes.iter().enumerate() {
        let tol_w = chain_tol(w, scaled_box, n_fine);
        let (lambda, _) =
            chain_ground_value(&oscillator_chain(w, scaled_box, n_fine, Bc::Neumann), tol_w, seed)?;
        let floor = w - c_fine / (scaled_box * scaled_box);
        // The exact-arithmetic margin is ≥ 0 at sampled slopes; the
        // numeric slack covers this chain's residual, the fitted
        // constant's inherited error (δĈ/4 = w·δλ at the matching
        // half-length), and rounding.
        let slack = 1e-9 + tol_w + w * chain_tol(1.0, a_list[i], n_fine);
        if lambda < floor - slack {
            scaled_ok = false;
        }
        scaled_values.push(lambda);
        scaled_floors.push(floor);
    }

    let gates = deficits_positive && window_ok && scaled_ok;
    let measured = if gates { stability } else { f64::INFINITY };
    let report = VerificationReport::new(
        "neumann oscillator deficit bound",
        params(&[
            ("fine_points", n_fine as f64),
            ("coarse_points", n_coarse as f64),
            ("seed", seed as f64),
        ]),
        measured,
        0.10,
    )
    .with_artifact("half_lengths", a_list.to_vec())
    .with_artifact("ground_values", samples.iter().map(|s| s.1).collect())
    .with_artifact("deficits", deficits_fine)
    .with_artifact("deficits_coarse", deficits_coarse)
    .with_artifact("fitted_constant_fine", vec![c_fine])
    .with_artifact("fitted_constant_coarse", vec![c_coarse])
    .with_artifact("scaled_slopes", slopes.clone())
    .with_artifact("scaled_ground_values", scaled_values)
    .with_artifact("scaled_floors", scaled_floors);

    let fit = BoundFit { samples, fitted_constant: c_fine, bound_form: "1 - C/a^2".into() };
    Ok((report, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::scalar_hamiltonian;

    #[test]
    fn bracketing_margin_is_nonnegative_with_first_order_tolerance() {
        let report = bracketing_test(4.0, 1.0, &[16, 32, 64], 42).unwrap();
        assert!(report.passed, "report {report:?}");
        let margins = &report.artifacts["margins"];
        assert!(margins.iter().all(|&m| m >= -1e-9), "margins {margins:?}");
        assert!(report.artifacts["movement_orders"].iter().all(|&o| o >= 1.0));
        assert!(report.artifacts["margin_after_discretization_tolerance"][0] >= 0.0);
    }

    #[test]
    fn bracketing_controls_hold() {
        let report = bracketing_test(4.0, 1.0, &[16, 32, 64], 42).unwrap();
        let free = &report.artifacts["free_split_ground_values"];
        assert!(free[0].abs() <= 1e-8 && free[1].abs() <= 1e-8, "free split {free:?}");
        assert!(report.artifacts["absorbing_cut_reversal_margin"][0] >= -1e-9);
    }

    #[test]
    fn bracketing_needs_three_resolutions_and_aligned_cut() {
        assert!(matches!(
            bracketing_test(4.0, 1.0, &[16, 32], 42),
            Err(VerifyError::BadSchedule(_))
        ));
        // m = 0.3 is not a multiple of h on any of these grids.
        assert!(matches!(
            bracketing_test(4.0, 0.3, &[16, 32, 64], 42),
            Err(VerifyError::Grid(_))
        ));
    }

    #[test]
    fn variational_sanity_nonnegative_potential_raises_ground_value() {
        let grid = GridSpec::new(3.0, 24, Bc::Neumann, Bc::Neumann).unwrap();
        let (free, _) = ground_value(&free_laplacian(&grid), 1e-9, 1).unwrap();
        let (with_potential, _) = ground_value(&scalar_hamiltonian(&grid), 1e-9, 1).unwrap();
        assert!(with_potential >= free - 1e-10);
    }

    #[test]
    fn regional_scan_certifies_positivity_and_stable_fit() {
        let (reports, fit) = region_positivity_scan(6.0, &[1.0, 2.0], 96, 48, 7).unwrap();
        assert_eq!(reports.len(), 3); // two scales + summary
        for r in &reports[..2] {
            assert!(r.passed, "report {r:?}");
            assert!(r.artifacts["ground_values"].iter().all(|&l| l > 0.0));
            assert_eq!(r.artifacts["inconclusive"], vec![0.0]);
        }
        let summary = &reports[2];
        assert!(summary.passed, "summary {summary:?}");
        assert_eq!(summary.artifacts["positivity_threshold"], vec![1.0]);
        assert!(fit.fitted_constant > 0.0 && fit.fitted_constant < 2.0);
        assert_eq!(fit.bound_form, "M - C/M^2");
        // Strip bound margins are ≥ 0 by construction of the max fit.
        assert!(summary.artifacts["strip_bound_margins"].iter().all(|&m| m >= -1e-12));
        // Corner sampling respects the closed-form floor.
        assert!(
            summary.artifacts["corner_sampled_minimum"][0]
                >= summary.artifacts["corner_closed_form_floor"][0] - 1e-9
        );
    }

    #[test]
    fn regional_scan_rejects_bad_schedules() {
        assert!(matches!(
            region_positivity_scan(6.0, &[], 48, 24, 7),
            Err(VerifyError::BadSchedule(_))
        ));
        assert!(matches!(
            region_positivity_scan(6.0, &[1.0, 2.0], 24, 48, 7),
            Err(VerifyError::BadSchedule(_))
        ));
        // Unresolvable cut scale: 1.1 is not a node-free cut line at n=48, L=6.
        assert!(matches!(
            region_positivity_scan(6.0, &[1.1], 48, 24, 7),
            Err(VerifyError::Grid(_))
        ));
    }

    #[test]
    fn oscillator_deficits_follow_inverse_square_law() {
        let (report, fit) =
            neumann_oscillator_bound(&[1.0, 2.0, 4.0, 8.0], 128, 256, 3).unwrap();
        assert!(report.passed, "report {report:?}");
        let deficits = &report.artifacts["deficits"];
        assert!(deficits.iter().all(|&d| d > 0.0), "deficits {deficits:?}");
        // The fitted constant lands near the known plateau of the
        // deficit law (dominated by the a=1 sample).
        assert!((fit.fitted_constant - 0.675).abs() < 0.03, "C = {}", fit.fitted_constant);
        assert_eq!(fit.bound_form, "1 - C/a^2");
        // Scaled spot checks hold with the fitted constant.
        let values = &report.artifacts["scaled_ground_values"];
        let floors = &report.artifacts["scaled_floors"];
        assert!(values.iter().zip(floors).all(|(v, f)| v >= &(f - 1e-9)));
    }

    #[test]
    fn oscillator_rejects_descending_half_lengths() {
        assert!(matches!(
            neumann_oscillator_bound(&[2.0, 1.0], 128, 256, 3),
            Err(VerifyError::BadSchedule(_))
        ));
    }
}
