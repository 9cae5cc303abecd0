//! Benjamin-Ono periodic wave and its Newton continuation to positive
//! reciprocal depth under the finite-depth multiplier.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::symbols::theta;

use super::newton::EvenNewton;
use super::{ScalarForm, ScalarWave};

const BO_RESIDUAL_TOL: f64 = 1e-8;
const CONTINUATION_TOL: f64 = 1e-9;
const NEWTON_MAX_ITER: usize = 40;

/// Explicit even wave of the deep-water (Hilbert transform) equation
/// H phi_x + omega phi - phi^2/2 = 0:
///
///   phi(x) = (4 pi / L) sinh(g) / (cosh(g) - cos(2 pi x / L)),
///   g = atanh(2 pi / (omega L)), valid for omega > 2 pi / L.
pub fn build_bo_wave(grid: Grid, omega: f64) -> Result<ScalarWave> {
    let length = grid.period();
    let ratio = 2.0 * std::f64::consts::PI / (omega * length);
    if !(omega.is_finite() && ratio > 0.0 && ratio < 1.0) {
        return Err(Error::domain(format!(
            "speed must exceed 2 pi / L = {}, got {omega}",
            2.0 * std::f64::consts::PI / length
        )));
    }
    let gamma = ratio.atanh();
    let scale = 4.0 * std::f64::consts::PI / length;
    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| {
            scale * gamma.sinh() / (gamma.cosh() - (2.0 * std::f64::consts::PI * x / length).cos())
        })
        .collect();

    let residual = lkk_residual(&grid, &values, omega, 0.0);
    if residual > BO_RESIDUAL_TOL {
        return Err(Error::Construction(format!(
            "deep-water wave residual {residual:.3e} exceeds {BO_RESIDUAL_TOL:.1e}"
        )));
    }
    Ok(ScalarWave::from_values(grid, values, omega, 0.0, ScalarForm::Bo, residual))
}

/// Discrete L^2 residual of theta_w(D) phi + omega phi - phi^2/2.
pub fn lkk_residual(grid: &Grid, values: &[f64], omega: f64, w: f64) -> f64 {
    let applied = crate::fourier::apply_real_multiplier(grid, values, |xi| theta(xi, w));
    let res: Vec<f64> = values
        .iter()
        .zip(&applied)
        .map(|(&p, &tp)| tp + omega * p - 0.5 * p * p)
        .collect();
    grid.norm(&res)
}

/// Continue an even profile to reciprocal depth `w` by Newton iteration on
/// the stationary equation with the finite-depth multiplier; evenness is
/// preserved exactly by working in the cosine subspace.
pub fn continue_lkk_wave(omega: f64, w: f64, initial: &ScalarWave) -> Result<ScalarWave> {
    if !(w.is_finite() && w >= 0.0) {
        return Err(Error::domain(format!("reciprocal depth must be >= 0, got {w}")));
    }
    let grid = initial.grid;
    let solver = EvenNewton::new(&grid, |xi| theta(xi, w), omega, 0.0);
    let out = solver.solve(
        &initial.values,
        |p| 0.5 * p * p,
        |p| p,
        CONTINUATION_TOL,
        NEWTON_MAX_ITER,
    )?;
    let residual = *out.history.last().unwrap();
    Ok(ScalarWave::from_values(
        grid,
        out.values,
        omega,
        0.0,
        ScalarForm::Lkk { w },
        residual,
    ))
}

/// Newton residual history of a continuation run, for convergence-rate
/// diagnostics.
pub fn continuation_history(omega: f64, w: f64, initial: &ScalarWave) -> Result<Vec<f64>> {
    let solver = EvenNewton::new(&initial.grid, |xi| theta(xi, w), omega, 0.0);
    let out = solver.solve(
        &initial.values,
        |p| 0.5 * p * p,
        |p| p,
        CONTINUATION_TOL,
        NEWTON_MAX_ITER,
    )?;
    Ok(out.history)
}
