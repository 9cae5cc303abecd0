//! Dispersion-symbol evaluation and Fourier-multiplier application.
//!
//! Symbols are evaluated at the physical frequency 2 pi kappa / L of an
//! integer lattice mode kappa. All symbols here are even, real, and
//! symmetric, so multiplier application preserves realness.

pub mod operator;

pub use operator::{assemble_operator, diagonalize_operator, LinearizedOperator};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::Grid;

/// Hyperbolic-argument size beyond which coth/csch are replaced by their
/// asymptotes; exp(-700) is already far below the double-precision floor.
const CLAMP: f64 = 700.0;

/// Which 2x2 symbol family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymbolKind {
    /// m(k) = diag(k^2, k^2): second-derivative dispersion.
    Laplacian,
    /// Liu-Kubota-Ko finite-depth pair: m11 = k coth(k/w) - w on the
    /// diagonal, m12 = -k / sinh(k/w) off it. `w` is the reciprocal depth.
    Lkk { w: f64 },
    /// Scalar reduced Liu-Kubota-Ko multiplier theta(k, w) = m11 + m12,
    /// applied as diag(theta, theta).
    Theta { w: f64 },
    /// Benjamin-Ono multiplier |k| as diag(|k|, |k|).
    Bo,
}

/// Evaluator for the 2x2 symmetric dispersion symbol, with an optional
/// coercivity shift and the length scale mapping integer modes to
/// physical frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolMatrix {
    pub kind: SymbolKind,
    /// Additive multiple of the identity (sigma_0 >= 0).
    pub shift: f64,
    /// Spatial period L; mode kappa has frequency 2 pi kappa / L.
    pub length: f64,
}

/// coth evaluated through decaying exponentials; exact asymptote past the
/// clamp. Argument must be nonzero.
fn coth(z: f64) -> f64 {
    let az = z.abs();
    if az > CLAMP {
        return z.signum();
    }
    let e = (-2.0 * az).exp();
    z.signum() * (1.0 + e) / (1.0 - e)
}

/// 1/sinh through decaying exponentials; underflows cleanly to zero.
fn csch(z: f64) -> f64 {
    let az = z.abs();
    if az > CLAMP {
        return 0.0;
    }
    let e = (-az).exp();
    z.signum() * 2.0 * e / (1.0 - e * e)
}

/// Diagonal entry of the finite-depth symbol at physical frequency `xi`.
pub fn lkk_m11(xi: f64, w: f64) -> f64 {
    if xi == 0.0 {
        // xi coth(xi/w) -> w cancels the -w term.
        return 0.0;
    }
    xi * coth(xi / w) - w
}

/// Off-diagonal entry of the finite-depth symbol.
pub fn lkk_m12(xi: f64, w: f64) -> f64 {
    if xi == 0.0 {
        return -w;
    }
    -xi * csch(xi / w)
}

/// Reduced scalar multiplier theta(xi, w) = m11 + m12; theta(xi, 0) = |xi|.
pub fn theta(xi: f64, w: f64) -> f64 {
    if w == 0.0 {
        return xi.abs();
    }
    if xi == 0.0 {
        return -w;
    }
    if xi.abs() / w > CLAMP {
        return xi.abs() - w;
    }
    lkk_m11(xi, w) + lkk_m12(xi, w)
}

impl SymbolMatrix {
    pub fn new(kind: SymbolKind, length: f64) -> Self {
        SymbolMatrix { kind, shift: 0.0, length }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    /// Sobolev growth exponent of this symbol family.
    pub fn sobolev_index(&self) -> f64 {
        match self.kind {
            SymbolKind::Laplacian => 2.0,
            _ => 1.0,
        }
    }

    /// Raw 2x2 symbol at a physical frequency (shift included).
    pub fn entries(&self, xi: f64) -> [[f64; 2]; 2] {
        let s = self.shift;
        match self.kind {
            SymbolKind::Laplacian => [[xi * xi + s, 0.0], [0.0, xi * xi + s]],
            SymbolKind::Lkk { w } => {
                let d = lkk_m11(xi, w) + s;
                let o = lkk_m12(xi, w);
                [[d, o], [o, d]]
            }
            SymbolKind::Theta { w } => {
                let t = theta(xi, w) + s;
                [[t, 0.0], [0.0, t]]
            }
            SymbolKind::Bo => [[xi.abs() + s, 0.0], [0.0, xi.abs() + s]],
        }
    }

    /// Symbol at an integer lattice mode; errors outside |mode| <= n/2.
    pub fn evaluate(&self, mode: i64, n: usize) -> Result<[[f64; 2]; 2]> {
        if mode.unsigned_abs() as usize > n / 2 {
            return Err(Error::domain(format!(
                "mode {mode} outside truncated lattice |kappa| <= {}",
                n / 2
            )));
        }
        Ok(self.entries(self.frequency(mode)))
    }

    pub fn frequency(&self, mode: i64) -> f64 {
        2.0 * std::f64::consts::PI * mode as f64 / self.length
    }

    /// Eigenvalue of the symbol on the symmetric channel (1,1)/sqrt(2);
    /// for diagonal symbols this is just the diagonal entry.
    pub fn plus_channel(&self, xi: f64) -> f64 {
        let m = self.entries(xi);
        m[0][0] + m[0][1]
    }

    /// Eigenvalue on the antisymmetric channel (1,-1)/sqrt(2).
    pub fn minus_channel(&self, xi: f64) -> f64 {
        let m = self.entries(xi);
        m[0][0] - m[0][1]
    }

    /// Measured ellipticity constants over the truncated lattice:
    /// (c1, c2) with c1 |k|^s <= <m(k) w, w> <= c2 |k|^s for |k| >= 1
    /// (modes, not physical frequency), minimized/maximized over the
    /// symbol's eigenvalues.
    pub fn ellipticity_bounds(&self, n: usize) -> (f64, f64) {
        let s = self.sobolev_index();
        let mut c1 = f64::INFINITY;
        let mut c2 = 0.0_f64;
        for mode in 1..=(n as i64 / 2) {
            let xi = self.frequency(mode);
            let growth = (mode as f64).powf(s);
            for lam in [self.plus_channel(xi), self.minus_channel(xi)] {
                c1 = c1.min(lam / growth);
                c2 = c2.max(lam / growth);
            }
        }
        (c1, c2)
    }
}

/// Coercivity shift for the finite-depth symbol: clears the most negative
/// eigenvalue over the truncated lattice with a unit margin.
pub fn lkk_shift(w: f64, grid: &Grid) -> f64 {
    let mut min_theta = f64::INFINITY;
    for mode in 0..=grid.max_mode() {
        let xi = 2.0 * std::f64::consts::PI * mode as f64 / grid.period();
        min_theta = min_theta.min(theta(xi, w));
    }
    1.0 + (-min_theta).max(0.0)
}

/// Apply the 2x2 matrix multiplier to a pair of real fields: forward FFT,
/// per-mode matrix multiply, inverse FFT.
pub fn apply_multiplier(
    sym: &SymbolMatrix,
    grid: &Grid,
    u: &[Vec<f64>; 2],
) -> Result<[Vec<f64>; 2]> {
    let n = grid.len();
    if u[0].len() != n || u[1].len() != n {
        return Err(Error::shape(format!(
            "multiplier input lengths ({}, {}) do not match grid {n}",
            u[0].len(),
            u[1].len()
        )));
    }
    let mut a = fourier::dft(&u[0]);
    let mut b = fourier::dft(&u[1]);
    for j in 0..n {
        let m = sym.entries(grid.frequency(j));
        let (x, y) = (a[j], b[j]);
        a[j] = x * m[0][0] + y * m[0][1];
        b[j] = x * m[1][0] + y * m[1][1];
    }
    Ok([fourier::idft_real(&a), fourier::idft_real(&b)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn theta_reduces_to_absolute_value_at_zero_depth_parameter() {
        for &xi in &[-7.3, -1.0, 0.0, 2.5, 40.0] {
            assert_eq!(theta(xi, 0.0), xi.abs());
        }
    }

    #[test]
    fn theta_at_zero_mode_is_minus_w() {
        for &w in &[0.01, 0.2, 1.0] {
            assert_abs_diff_eq!(theta(0.0, w), -w, epsilon = 0.0);
        }
    }

    #[test]
    fn theta_converges_to_bo_pointwise() {
        for &xi in &[1.0, 3.0, 17.0] {
            let mut prev = f64::INFINITY;
            for &w in &[0.4, 0.2, 0.1, 0.05] {
                let gap = (theta(xi, w) - xi.abs()).abs();
                assert!(gap < prev, "gap should shrink with w at xi={xi}");
                prev = gap;
            }
            assert!(prev < 0.06);
        }
    }

    /// theta = xi tanh(xi / 2w) - w algebraically; the evaluated form must
    /// agree with that cancellation-free expression.
    #[test]
    fn theta_matches_tanh_identity() {
        for &w in &[0.05, 0.2, 1.0] {
            for mode in -128_i64..=128 {
                let xi = mode as f64;
                let reference = if xi == 0.0 { -w } else { xi * (xi / (2.0 * w)).tanh() - w };
                assert_abs_diff_eq!(theta(xi, w), reference, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn symbol_is_even_and_symmetric() {
        let syms = [
            SymbolMatrix::new(SymbolKind::Laplacian, 5.0),
            SymbolMatrix::new(SymbolKind::Lkk { w: 0.2 }, 5.0),
            SymbolMatrix::new(SymbolKind::Bo, 5.0),
        ];
        for sym in &syms {
            for mode in 1..=32_i64 {
                let p = sym.evaluate(mode, 64).unwrap();
                let m = sym.evaluate(-mode, 64).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        assert_abs_diff_eq!(p[i][j], m[i][j], epsilon = 0.0);
                        assert_abs_diff_eq!(p[i][j], p[j][i], epsilon = 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn evaluate_rejects_modes_outside_lattice() {
        let sym = SymbolMatrix::new(SymbolKind::Bo, 1.0);
        assert!(sym.evaluate(33, 64).is_err());
        assert!(sym.evaluate(-33, 64).is_err());
        assert!(sym.evaluate(32, 64).is_ok());
    }

    #[test]
    fn laplacian_multiplier_on_single_mode() {
        let grid = Grid::new(128, 4.0).unwrap();
        let sym = SymbolMatrix::new(SymbolKind::Laplacian, grid.period());
        let xi1 = 2.0 * std::f64::consts::PI / grid.period();
        let u0: Vec<f64> = grid.points().iter().map(|&x| (xi1 * x).cos()).collect();
        let zero = vec![0.0; grid.len()];
        let out = apply_multiplier(&sym, &grid, &[u0.clone(), zero]).unwrap();
        // Round-off in the input spectrum is amplified by the largest
        // symbol value (the Nyquist xi^2), so the floor sits near 1e-11.
        for j in 0..grid.len() {
            assert_abs_diff_eq!(out[0][j], xi1 * xi1 * u0[j], epsilon = 1e-10);
            assert_abs_diff_eq!(out[1][j], 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn constant_input_sees_zero_mode_matrix() {
        let grid = Grid::new(64, 2.0).unwrap();
        let w = 0.3;
        let sym = SymbolMatrix::new(SymbolKind::Lkk { w }, grid.period());
        let ones = vec![1.0; grid.len()];
        let halves = vec![0.5; grid.len()];
        let out = apply_multiplier(&sym, &grid, &[ones, halves]).unwrap();
        // m(0) = [[0, -w], [-w, 0]] acting on (1, 0.5).
        for j in 0..grid.len() {
            assert_abs_diff_eq!(out[0][j], -w * 0.5, epsilon = 1e-13);
            assert_abs_diff_eq!(out[1][j], -w * 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn shift_clears_lkk_spectrum() {
        let grid = Grid::new(256, 2.0 * std::f64::consts::PI).unwrap();
        for &w in &[0.02, 0.2, 1.0] {
            let shift = lkk_shift(w, &grid);
            let sym = SymbolMatrix::new(SymbolKind::Lkk { w }, grid.period()).with_shift(shift);
            for mode in 0..=grid.max_mode() {
                let xi = sym.frequency(mode);
                assert!(sym.plus_channel(xi) > 0.0);
                assert!(sym.minus_channel(xi) > 0.0);
            }
        }
    }

    #[test]
    fn mismatched_lengths_error() {
        let grid = Grid::new(64, 1.0).unwrap();
        let sym = SymbolMatrix::new(SymbolKind::Bo, 1.0);
        let bad = [vec![0.0; 32], vec![0.0; 64]];
        assert!(apply_multiplier(&sym, &grid, &bad).is_err());
    }
}
