//! Two-component complex grid functions.
//!
//! A [`SpinorField`] stores both spin components over a [`GridSpec`] in
//! block layout — the first n² entries are the spin-up values (x varies
//! fastest), the next n² the spin-down values. Norms and inner products
//! carry the h² volume weight, so they approximate the continuum L²
//! pairing and stay comparable across grid resolutions.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::grid::GridSpec;
use crate::operator::dot;

/// Spin component selector for single-component constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("value vector has length {got}, expected 2·n² = {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error(
        "field touches the box boundary: norm fraction {fraction:.3e} in the outer {cells} cells exceeds {limit:.1e}"
    )]
    TouchesBoundary { fraction: f64, cells: usize, limit: f64 },
}

/// A spinor-valued grid function ψ: nodes → ℂ².
#[derive(Debug, Clone)]
pub struct SpinorField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpinorField {
    /// The zero field.
    pub fn zero(grid: &GridSpec) -> Self {
        Self { grid: grid.clone(), values: vec![Complex64::ZERO; 2 * grid.node_count()] }
    }

    /// Wraps an existing coefficient vector (block layout, length 2n²).
    pub fn from_values(grid: &GridSpec, values: Vec<Complex64>) -> Result<Self, FieldError> {
        let expected = 2 * grid.node_count();
        if values.len() != expected {
            return Err(FieldError::WrongLength { got: values.len(), expected });
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Seeded random field with i.i.d. uniform(−1,1) real and imaginary
    /// parts in both components, then normalized to ‖ψ‖ = 1.
    pub fn random(grid: &GridSpec, rng: &mut impl Rng) -> Self {
        let values = crate::operator::random_vector(2 * grid.node_count(), rng);
        let mut field = Self { grid: grid.clone(), values };
        field.normalize();
        field
    }

    /// Isotropic Gaussian bump exp(−((x−cx)² + (y−cy)²)/(2w²)) placed in
    /// one spin component, normalized to ‖ψ‖ = 1.
    pub fn gaussian(grid: &GridSpec, width: f64, center: (f64, f64), spin: Spin) -> Self {
        let mut field = Self::zero(grid);
        let n2 = grid.node_count();
        let offset = match spin {
            Spin::Up => 0,
            Spin::Down => n2,
        };
        for idx in 0..n2 {
            let (x, y) = grid.node_xy(idx);
            let dx = x - center.0;
            let dy = y - center.1;
            let v = (-(dx * dx + dy * dy) / (2.0 * width * width)).exp();
            field.values[offset + idx] = Complex64::new(v, 0.0);
        }
        field.normalize();
        field
    }

    /// Smooth compactly supported bump exp(−1/(1 − r²/R²)) for r < R,
    /// zero outside, in one spin component; normalized. Useful when a
    /// check needs *exactly* compact support rather than Gaussian decay.
    pub fn bump(grid: &GridSpec, radius: f64, spin: Spin) -> Self {
        let mut field = Self::zero(grid);
        let n2 = grid.node_count();
        let offset = match spin {
            Spin::Up => 0,
            Spin::Down => n2,
        };
        for idx in 0..n2 {
            let (x, y) = grid.node_xy(idx);
            let r2 = (x * x + y * y) / (radius * radius);
            if r2 < 1.0 {
                field.values[offset + idx] = Complex64::new((-1.0 / (1.0 - r2)).exp(), 0.0);
            }
        }
        field.normalize();
        field
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Spin-up block (first n² entries).
    pub fn up(&self) -> &[Complex64] {
        &self.values[..self.grid.node_count()]
    }

    /// Spin-down block (last n² entries).
    pub fn down(&self) -> &[Complex64] {
        &self.values[self.grid.node_count()..]
    }

    /// Volume-weighted inner product ⟨ψ, φ⟩ = h² Σ conj(ψ)·φ.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let h = self.grid.spacing();
        dot(&self.values, &other.values) * (h * h)
    }

    /// Volume-weighted norm ‖ψ‖ = sqrt(h² Σ |ψ|²).
    pub fn norm(&self) -> f64 {
        let h = self.grid.spacing();
        h * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scales the field to unit norm (no-op on the zero field).
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for v in &mut self.values {
                *v *= inv;
            }
        }
    }

    /// |ψ|² summed over spin at each node (unweighted point density).
    pub fn point_density(&self) -> Vec<f64> {
        let n2 = self.grid.node_count();
        (0..n2)
            .map(|i| self.values[i].norm_sqr() + self.values[n2 + i].norm_sqr())
            .collect()
    }

    /// Fraction of the squared norm carried by nodes within `cells` grid
    /// cells of the box boundary.
    pub fn boundary_fraction(&self, cells: usize) -> f64 {
        let n = self.grid.points_per_axis();
        let density = self.point_density();
        let mut edge = 0.0;
        let mut total = 0.0;
        for (idx, d) in density.iter().enumerate() {
            let (ix, iy) = self.grid.node_position(idx);
            total += d;
            let ring = ix < cells || iy < cells || ix >= n - cells || iy >= n - cells;
            if ring {
                edge += d;
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }

    /// Fraction of the squared norm outside the disk of radius `r`.
    pub fn fraction_outside_radius(&self, r: f64) -> f64 {
        let density = self.point_density();
        let mut outside = 0.0;
        let mut total = 0.0;
        for (idx, d) in density.iter().enumerate() {
            let (x, y) = self.grid.node_xy(idx);
            total += d;
            if x * x + y * y > r * r {
                outside += d;
            }
        }
        if total > 0.0 {
            outside / total
        } else {
            0.0
        }
    }

    /// Rejects fields whose outer-two-cell norm fraction exceeds `limit`;
    /// convergence studies require test fields that do not see the wall.
    pub fn require_interior(&self, limit: f64) -> Result<(), FieldError> {
        let fraction = self.boundary_fraction(2);
        if fraction > limit {
            return Err(FieldError::TouchesBoundary { fraction, cells: 2, limit });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Bc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::new(4.0, 32, Bc::Dirichlet, Bc::Dirichlet).unwrap()
    }

    #[test]
    fn length_checked() {
        let g = grid();
        let bad = SpinorField::from_values(&g, vec![Complex64::ZERO; 7]);
        assert_eq!(bad.unwrap_err(), FieldError::WrongLength { got: 7, expected: 2048 });
    }

    #[test]
    fn norm_carries_volume_weight() {
        let g = grid();
        let mut f = SpinorField::zero(&g);
        f.values_mut()[0] = Complex64::new(3.0, 4.0);
        // Single entry of modulus 5: norm = h·5.
        assert!((f.norm() - g.spacing() * 5.0).abs() < 1e-15);
    }

    #[test]
    fn random_field_is_normalized_and_deterministic() {
        let g = grid();
        let mut rng1 = ChaCha8Rng::seed_from_u64(42);
        let mut rng2 = ChaCha8Rng::seed_from_u64(42);
        let a = SpinorField::random(&g, &mut rng1);
        let b = SpinorField::random(&g, &mut rng2);
        assert_eq!(a.values(), b.values());
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_is_spin_local_and_interior() {
        let g = grid();
        let f = SpinorField::gaussian(&g, 0.7, (0.0, 0.0), Spin::Up);
        assert!(f.down().iter().all(|z| *z == Complex64::ZERO));
        assert!((f.norm() - 1.0).abs() < 1e-12);
        // Width-0.7 bump at the origin of an L=4 box: the outer two cells
        // carry ~e^{−(3.5/0.7)²} ≈ 1e−11 of the density; interior.
        f.require_interior(1e-8).unwrap();

        let wide = SpinorField::gaussian(&g, 3.0, (0.0, 0.0), Spin::Up);
        assert!(wide.require_interior(1e-8).is_err());
    }

    #[test]
    fn bump_has_compact_support() {
        let g = grid();
        let f = SpinorField::bump(&g, 1.0, Spin::Up);
        for idx in 0..g.node_count() {
            let (x, y) = g.node_xy(idx);
            if x * x + y * y >= 1.0 {
                assert_eq!(f.up()[idx], Complex64::ZERO);
            }
        }
        assert!((f.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fractions_partition() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = SpinorField::random(&g, &mut rng);
        let inside = 1.0 - f.fraction_outside_radius(2.0);
        assert!(inside > 0.0 && inside < 1.0);
        assert!((f.fraction_outside_radius(0.0) - 1.0).abs() < 1e-12);
        assert_eq!(f.fraction_outside_radius(10.0), 0.0);
    }
}
