//! Uniform periodic collocation grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid of `n` points on `[0, L)` with periodic wrap-around.
///
/// `n` must be a power of two, at least 64, so that every profile carries
/// enough modes for spectral residual checks and the FFT stays radix-2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub const MIN_POINTS: usize = 64;

    pub fn new(n: usize, length: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < Self::MIN_POINTS {
            return Err(Error::domain(format!(
                "grid size must be a power of two >= {}, got {n}",
                Self::MIN_POINTS
            )));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::domain(format!("period must be positive, got {length}")));
        }
        Ok(Grid { n, length })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn period(&self) -> f64 {
        self.length
    }

    pub fn step(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Collocation points x_j = j L / n.
    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n).map(|j| j as f64 * h).collect()
    }

    /// Signed integer mode for FFT bin `j`: 0, 1, ..., n/2, -n/2+1, ..., -1.
    pub fn mode(&self, j: usize) -> i64 {
        debug_assert!(j < self.n);
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Physical frequency of FFT bin `j`: 2 pi mode / L.
    pub fn frequency(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.mode(j) as f64 / self.length
    }

    /// Largest retained mode magnitude (Nyquist).
    pub fn max_mode(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Trapezoid quadrature on the periodic grid; exact for trigonometric
    /// polynomials up to the grid resolution.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        values.iter().sum::<f64>() * self.step()
    }

    /// Discrete L^2 inner product h * sum(u v).
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.n);
        debug_assert_eq!(v.len(), self.n);
        u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() * self.step()
    }

    /// Discrete L^2 norm sqrt(h * sum u^2).
    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(100, 1.0).is_err());
        assert!(Grid::new(32, 1.0).is_err());
        assert!(Grid::new(64, 0.0).is_err());
        assert!(Grid::new(64, -1.0).is_err());
        assert!(Grid::new(64, f64::NAN).is_err());
        assert!(Grid::new(256, 2.0 * std::f64::consts::PI).is_ok());
    }

    #[test]
    fn modes_cover_lattice() {
        let g = Grid::new(64, 1.0).unwrap();
        assert_eq!(g.mode(0), 0);
        assert_eq!(g.mode(1), 1);
        assert_eq!(g.mode(32), 32);
        assert_eq!(g.mode(33), -31);
        assert_eq!(g.mode(63), -1);
    }

    #[test]
    fn quadrature_is_exact_for_trig() {
        let g = Grid::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let x = g.points();
        let cos2: Vec<f64> = x.iter().map(|&t| t.cos().powi(2)).collect();
        assert!((g.integrate(&cos2) - std::f64::consts::PI).abs() < 1e-12);
    }
}
