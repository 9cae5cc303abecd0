//! Explicit dnoidal-family profile solving -phi'' + c phi - 2 phi^3 + A = 0.

use crate::elliptic::{complete_elliptic_k, jacobi_elliptic, EllipticModulus};
use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::Grid;

use super::{ScalarForm, ScalarWave};

const RESIDUAL_TOL: f64 = 1e-7;

/// Build the dnoidal-type wave of period L:
///
///   phi(x) = (4 K / (sqrt(2) L g(k))) dn^2(2Kx/L, k) / (1 + g2 sn^2(2Kx/L, k))
///
/// with g2 = sqrt(k^4 - k^2 + 1) + k^2 - 1 and
/// g(k) = sqrt(sqrt(k^4 - k^2 + 1) - k^2 + 1/2).
///
/// The speed is fixed by minimizing the equation residual over the two
/// candidate readings of the speed formula (one quadratic in K, one linear);
/// the quadratic reading validates and is the one attached.
pub fn build_dnoidal_wave(grid: Grid, modulus: EllipticModulus) -> Result<ScalarWave> {
    let k = modulus.value();
    let length = grid.period();
    let big_k = complete_elliptic_k(k)?;
    let root = (k.powi(4) - k * k + 1.0).sqrt();
    let gamma_sq = root + k * k - 1.0;
    let g = (root - k * k + 0.5).sqrt();
    let amp = 4.0 * big_k / (2.0_f64.sqrt() * length * g);

    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| {
            let t = jacobi_elliptic(2.0 * big_k * x / length, k)
                .expect("finite argument, modulus in (0,1)");
            amp * t.dn * t.dn / (1.0 + gamma_sq * t.sn * t.sn)
        })
        .collect();

    let a_const = -(32.0 * big_k.powi(3) / (3.0 * 3.0_f64.sqrt() * length.powi(3)))
        * (root - 2.0 * k * k + 1.0)
        * (2.0 * root + 2.0 * k * k - 1.0).sqrt();

    // Candidate speeds: quadratic-in-K and linear-in-K readings.
    let candidates = [
        16.0 * big_k * big_k / (length * length) * root,
        16.0 * big_k / (length * length) * root,
    ];
    let (speed, residual) = candidates
        .iter()
        .map(|&c| (c, dnoidal_residual(&grid, &values, c, a_const)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();

    if residual > RESIDUAL_TOL * (grid.len() as f64 / 256.0).max(1.0) {
        return Err(Error::Construction(format!(
            "dnoidal profile residual {residual:.3e} exceeds {RESIDUAL_TOL:.1e} \
             after speed disambiguation (k = {k})"
        )));
    }

    Ok(ScalarWave::from_values(
        grid,
        values,
        speed,
        a_const,
        ScalarForm::Dnoidal { k },
        residual,
    ))
}

/// Discrete L^2 norm of -phi'' + c phi - 2 phi^3 + A on the grid.
pub fn dnoidal_residual(grid: &Grid, values: &[f64], speed: f64, a_const: f64) -> f64 {
    let second = fourier::derivative(grid, values, 2);
    let res: Vec<f64> = values
        .iter()
        .zip(&second)
        .map(|(&p, &pxx)| -pxx + speed * p - 2.0 * p.powi(3) + a_const)
        .collect();
    grid.norm(&res)
}

/// Speed and integration constant of the dnoidal family as functions of the
/// modulus, for parameter-derivative computations.
pub fn dnoidal_parameters(length: f64, k: f64) -> Result<(f64, f64)> {
    let big_k = complete_elliptic_k(k)?;
    let root = (k.powi(4) - k * k + 1.0).sqrt();
    let speed = 16.0 * big_k * big_k / (length * length) * root;
    let a_const = -(32.0 * big_k.powi(3) / (3.0 * 3.0_f64.sqrt() * length.powi(3)))
        * (root - 2.0 * k * k + 1.0)
        * (2.0 * root + 2.0 * k * k - 1.0).sqrt();
    Ok((speed, a_const))
}
