//! Newton iteration on Fourier collocation restricted to the even subspace.
//!
//! Solves T phi + c phi - g(phi) + a = 0 for an even periodic phi, where
//! T is a scalar even Fourier multiplier. Working in the cosine basis keeps
//! evenness exact and removes the translation direction phi' (odd) from the
//! Jacobian, so the linearization is invertible at a transverse solution.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::Grid;

pub struct EvenNewton<'a> {
    grid: &'a Grid,
    /// Multiplier value per FFT bin.
    multiplier: Vec<f64>,
    /// Coefficient of the identity term (wave speed).
    linear_coeff: f64,
    /// Additive constant of the stationary equation.
    constant: f64,
    /// Cosine basis, n x (n/2 + 1).
    basis: DMatrix<f64>,
    /// Multiplier applied to the basis columns, plus the identity term.
    lin_basis: DMatrix<f64>,
}

#[derive(Debug)]
pub struct NewtonOutcome {
    pub values: Vec<f64>,
    /// Discrete L^2 residual after each evaluated iterate (index 0 is the
    /// initial guess).
    pub history: Vec<f64>,
    pub iterations: usize,
}

impl<'a> EvenNewton<'a> {
    pub fn new(
        grid: &'a Grid,
        multiplier: impl Fn(f64) -> f64,
        linear_coeff: f64,
        constant: f64,
    ) -> Self {
        let n = grid.len();
        let m = n / 2 + 1;
        let mult: Vec<f64> = (0..n).map(|j| multiplier(grid.frequency(j))).collect();

        let x = grid.points();
        let mut basis = DMatrix::<f64>::zeros(n, m);
        for col in 0..m {
            let xi = 2.0 * std::f64::consts::PI * col as f64 / grid.period();
            for row in 0..n {
                basis[(row, col)] = (xi * x[row]).cos();
            }
        }

        // (T + c I) applied to each cosine column: cos(kx) is an
        // eigenfunction of any even multiplier.
        let mut lin_basis = basis.clone();
        for col in 0..m {
            let xi = 2.0 * std::f64::consts::PI * col as f64 / grid.period();
            // Bin holding mode `col` is exactly `col`.
            debug_assert!((grid.frequency(col) - xi).abs() < 1e-12 * (1.0 + xi.abs()));
            let factor = mult[col] + linear_coeff;
            for row in 0..n {
                lin_basis[(row, col)] *= factor;
            }
        }

        EvenNewton { grid, multiplier: mult, linear_coeff, constant, basis, lin_basis }
    }

    /// Residual T phi + c phi - g(phi) + a on the grid.
    pub fn residual(&self, values: &[f64], g: &impl Fn(f64) -> f64) -> Vec<f64> {
        let mut coeffs = fourier::dft(values);
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c *= self.multiplier[j];
        }
        let t_phi = fourier::idft_real(&coeffs);
        values
            .iter()
            .zip(&t_phi)
            .map(|(&p, &tp)| tp + self.linear_coeff * p - g(p) + self.constant)
            .collect()
    }

    /// Run Newton from `initial` until the discrete L^2 residual drops
    /// below `tol`.
    pub fn solve(
        &self,
        initial: &[f64],
        g: impl Fn(f64) -> f64,
        g_prime: impl Fn(f64) -> f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<NewtonOutcome> {
        let n = self.grid.len();
        let m = n / 2 + 1;
        let mut phi = initial.to_vec();
        let mut history = Vec::with_capacity(max_iter + 1);

        for iter in 0..=max_iter {
            let res = self.residual(&phi, &g);
            let norm = self.grid.norm(&res);
            history.push(norm);
            if norm < tol {
                return Ok(NewtonOutcome { values: phi, history, iterations: iter });
            }
            if !norm.is_finite() {
                return Err(Error::Convergence(
                    "even-subspace Newton diverged to non-finite residual".into(),
                    norm,
                ));
            }
            if iter == max_iter {
                break;
            }

            // J = (T + c I - diag g'(phi)); restrict to the cosine basis by
            // Galerkin projection and solve the square system.
            let mut jc = self.lin_basis.clone();
            for col in 0..m {
                for row in 0..n {
                    jc[(row, col)] -= g_prime(phi[row]) * self.basis[(row, col)];
                }
            }
            let normal = self.basis.transpose() * &jc;
            let rhs = self.basis.transpose() * DVector::from_column_slice(&res);
            let lu = normal.lu();
            let delta = lu.solve(&(-rhs)).ok_or_else(|| {
                Error::Numerical(
                    "Newton linearization is singular (near a fold of the family)".into(),
                )
            })?;
            for row in 0..n {
                let mut acc = 0.0;
                for col in 0..m {
                    acc += self.basis[(row, col)] * delta[col];
                }
                phi[row] += acc;
            }
        }

        Err(Error::Convergence(
            format!("even-subspace Newton did not reach {tol:.1e} in {max_iter} iterations"),
            *history.last().unwrap(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Recover the explicit cnoidal solution of -phi'' + c phi - phi^2/2 = 0
    /// from a visibly perturbed copy of it.
    #[test]
    fn converges_on_kdv_type_equation() {
        let grid = Grid::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let wave = crate::waves::build_cnoidal_wave(
            grid,
            crate::elliptic::EllipticModulus::new(0.6).unwrap(),
        )
        .unwrap();
        let solver = EvenNewton::new(&grid, |xi| xi * xi, wave.speed, 0.0);
        let initial: Vec<f64> = wave
            .values
            .iter()
            .zip(grid.points())
            .map(|(&v, x)| v + 0.05 * x.cos())
            .collect();
        let out = solver
            .solve(&initial, |p| 0.5 * p * p, |p| p, 1e-11, 40)
            .unwrap();
        assert!(*out.history.last().unwrap() < 1e-11);
        let err: Vec<f64> = out.values.iter().zip(&wave.values).map(|(a, b)| a - b).collect();
        assert!(grid.norm(&err) < 1e-9, "did not return to the exact profile");
    }

    #[test]
    fn zero_steps_when_initial_guess_solves() {
        let grid = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let solver = EvenNewton::new(&grid, |xi| xi * xi, 1.0, 0.0);
        // Constant 2c solves c phi = phi^2/2.
        let initial = vec![2.0; grid.len()];
        let out = solver
            .solve(&initial, |p| 0.5 * p * p, |p| p, 1e-10, 10)
            .unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.values, initial);
    }

    #[test]
    fn reports_nonconvergence() {
        // A non-constant state cannot reach an exactly-zero residual, so an
        // unattainable tolerance must surface as a convergence error.
        let grid = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let wave = crate::waves::build_cnoidal_wave(
            grid,
            crate::elliptic::EllipticModulus::new(0.6).unwrap(),
        )
        .unwrap();
        let solver = EvenNewton::new(&grid, |xi| xi * xi, wave.speed, 0.0);
        let err = solver
            .solve(&wave.values, |p| 0.5 * p * p, |p| p, 1e-30, 3)
            .unwrap_err();
        assert!(matches!(err, Error::Convergence(_, _)));
    }
}
