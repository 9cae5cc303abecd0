//! Explicit cnoidal profile solving -phi'' + c phi - phi^2/2 = 0.

use crate::elliptic::{complete_elliptic_k, jacobi_elliptic, EllipticModulus};
use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::Grid;

use super::{ScalarForm, ScalarWave};

/// Residual bound accepted at construction (discrete L^2, N = 256).
const RESIDUAL_TOL: f64 = 1e-8;

/// Build the cnoidal wave of minimal period L = grid.period():
///
///   phi(x) = (16 K^2 / L^2)(sqrt(1 - k^2 + k^4) + 1 - 2 k^2)
///          + (48 K^2 k^2 / L^2) cn^2(2 K x / L, k)
///
/// traveling at c = (16 K^2 / L^2) sqrt(1 - k^2 + k^4), with zero
/// integration constant.
pub fn build_cnoidal_wave(grid: Grid, modulus: EllipticModulus) -> Result<ScalarWave> {
    let k = modulus.value();
    let length = grid.period();
    let big_k = complete_elliptic_k(k)?;
    let root = (1.0 - k * k + k.powi(4)).sqrt();
    let base = (16.0 * big_k * big_k / (length * length)) * (root + 1.0 - 2.0 * k * k);
    let amp = 48.0 * big_k * big_k * k * k / (length * length);
    let speed = 16.0 * big_k * big_k / (length * length) * root;

    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| {
            let t = jacobi_elliptic(2.0 * big_k * x / length, k)
                .expect("finite argument, modulus in (0,1)");
            base + amp * t.cn * t.cn
        })
        .collect();

    let residual = cnoidal_residual(&grid, &values, speed);
    if residual > RESIDUAL_TOL * (grid.len() as f64 / 256.0).max(1.0) {
        return Err(Error::Construction(format!(
            "cnoidal profile residual {residual:.3e} exceeds {RESIDUAL_TOL:.1e}"
        )));
    }

    Ok(ScalarWave::from_values(
        grid,
        values,
        speed,
        0.0,
        ScalarForm::Cnoidal { k },
        residual,
    ))
}

/// Discrete L^2 norm of -phi'' + c phi - phi^2 / 2 on the grid.
pub fn cnoidal_residual(grid: &Grid, values: &[f64], speed: f64) -> f64 {
    let second = fourier::derivative(grid, values, 2);
    let res: Vec<f64> = values
        .iter()
        .zip(&second)
        .map(|(&p, &pxx)| -pxx + speed * p - 0.5 * p * p)
        .collect();
    grid.norm(&res)
}
