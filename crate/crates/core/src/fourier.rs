//! FFT plumbing: transforms, spectral derivatives, and multiplier columns.
//!
//! Forward transforms are unnormalized (`sum u_j exp(-2 pi i j k / n)`);
//! the inverse divides by `n`. Plans are cached per size in a thread-local
//! planner so the utility entry points stay allocation-light outside hot
//! loops (the time stepper keeps its own plans).

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::Grid;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let dir = if inverse {
                    FftDirection::Inverse
                } else {
                    FftDirection::Forward
                };
                planner.plan_fft(n, dir)
            })
            .clone()
    })
}

/// Forward DFT of a real signal (unnormalized).
pub fn dft(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(values.len(), false).process(&mut buf);
    buf
}

/// Forward DFT of a complex signal in place (unnormalized).
pub fn dft_complex(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// Inverse DFT in place, normalized by 1/n.
pub fn idft_complex(buf: &mut [Complex64]) {
    let n = buf.len();
    plan(n, true).process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Inverse DFT of coefficients of a real signal; returns the real part.
pub fn idft_real(coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    idft_complex(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Largest relative imaginary leakage of an inverse transform, used to
/// validate that coefficient manipulations preserved conjugate symmetry.
pub fn imag_leakage(coeffs: &[Complex64]) -> f64 {
    let mut buf = coeffs.to_vec();
    idft_complex(&mut buf);
    let max_im = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let max_re = buf.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    if max_re == 0.0 {
        max_im
    } else {
        max_im / max_re
    }
}

/// Apply a real scalar Fourier multiplier `f(frequency)` to a real signal.
pub fn apply_real_multiplier(grid: &Grid, values: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut coeffs = dft(values);
    for (j, c) in coeffs.iter_mut().enumerate() {
        *c *= f(grid.frequency(j));
    }
    idft_real(&coeffs)
}

/// Spectral derivative of given order. Odd orders zero the Nyquist mode to
/// keep real output well-defined.
pub fn derivative(grid: &Grid, values: &[f64], order: u32) -> Vec<f64> {
    let n = grid.len();
    let mut coeffs = dft(values);
    for (j, c) in coeffs.iter_mut().enumerate() {
        let xi = grid.frequency(j);
        let factor = Complex64::new(0.0, xi).powu(order);
        *c *= factor;
        if order % 2 == 1 && j == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    idft_real(&coeffs)
}

/// First column of the real circulant matrix realizing the even real
/// multiplier `f(frequency)`; entry `t[r]` fills the matrix as
/// `T[a][b] = t[(a - b) mod n]`.
pub fn circulant_column(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = grid.len();
    let coeffs: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new(f(grid.frequency(j)), 0.0))
        .collect();
    let mut col = idft_real(&coeffs);
    // An even real symbol gives t[r] = t[n-r]; enforce exactly so the
    // assembled collocation matrix is symmetric to the last bit.
    for r in 1..=(n - 1) / 2 {
        let avg = 0.5 * (col[r] + col[n - r]);
        col[r] = avg;
        col[n - r] = avg;
    }
    col
}

/// Evaluate a real periodic signal at an arbitrary point by trigonometric
/// interpolation of its DFT coefficients.
pub fn interpolate(grid: &Grid, coeffs: &[Complex64], x: f64) -> f64 {
    let n = grid.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &c) in coeffs.iter().enumerate() {
        let mut weight = 1.0;
        // Split the Nyquist bin symmetrically between +n/2 and -n/2.
        if j == n / 2 {
            weight = 0.5;
            let xi = grid.frequency(j);
            let e_plus = Complex64::new(0.0, xi * x).exp();
            let e_minus = Complex64::new(0.0, -xi * x).exp();
            acc += c * weight * (e_plus + e_minus);
            continue;
        }
        let xi = grid.frequency(j);
        acc += c * weight * Complex64::new(0.0, xi * x).exp();
    }
    acc.re / n as f64
}

/// Translate a real signal by `shift` via the Fourier phase factor
/// exp(i k shift), so that the result samples `u(x + shift)`.
pub fn translate(grid: &Grid, values: &[f64], shift: f64) -> Vec<f64> {
    let n = grid.len();
    let mut coeffs = dft(values);
    for (j, c) in coeffs.iter_mut().enumerate() {
        if j == n / 2 {
            // Keep the Nyquist coefficient real: cos produces the even part
            // of the split +-n/2 pair.
            *c *= (grid.frequency(j) * shift).cos();
        } else {
            *c *= Complex64::new(0.0, grid.frequency(j) * shift).exp();
        }
    }
    idft_real(&coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid {
        Grid::new(128, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn derivative_of_sin_is_cos() {
        let g = grid();
        let x = g.points();
        let u: Vec<f64> = x.iter().map(|&t| (3.0 * t).sin()).collect();
        let du = derivative(&g, &u, 1);
        for (j, &t) in x.iter().enumerate() {
            assert_abs_diff_eq!(du[j], 3.0 * (3.0 * t).cos(), epsilon = 1e-10);
        }
    }

    #[test]
    fn second_derivative_matches_symbol() {
        let g = grid();
        let x = g.points();
        let u: Vec<f64> = x.iter().map(|&t| (5.0 * t).cos()).collect();
        let d2 = derivative(&g, &u, 2);
        for (j, &t) in x.iter().enumerate() {
            assert_abs_diff_eq!(d2[j], -25.0 * (5.0 * t).cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn translation_shifts_samples() {
        let g = grid();
        let x = g.points();
        let u: Vec<f64> = x.iter().map(|&t| (2.0 * t).sin() + 0.3 * (5.0 * t).cos()).collect();
        let shift = 0.4321;
        let v = translate(&g, &u, shift);
        for (j, &t) in x.iter().enumerate() {
            let exact = (2.0 * (t + shift)).sin() + 0.3 * (5.0 * (t + shift)).cos();
            assert_abs_diff_eq!(v[j], exact, epsilon = 1e-11);
        }
    }

    #[test]
    fn interpolation_agrees_with_closed_form() {
        let g = grid();
        let x = g.points();
        let u: Vec<f64> = x.iter().map(|&t| (4.0 * t).cos() - 2.0 * t.sin()).collect();
        let coeffs = dft(&u);
        for &p in &[0.1, 1.234, 5.9] {
            let exact = (4.0f64 * p).cos() - 2.0 * p.sin();
            assert_abs_diff_eq!(interpolate(&g, &coeffs, p), exact, epsilon = 1e-11);
        }
    }

    #[test]
    fn circulant_column_reproduces_multiplier() {
        let g = Grid::new(64, 3.0).unwrap();
        let sym = |xi: f64| xi * xi;
        let col = circulant_column(&g, sym);
        let x = g.points();
        let u: Vec<f64> = x
            .iter()
            .map(|&t| (2.0 * std::f64::consts::PI * 3.0 * t / 3.0).sin() + 0.5)
            .collect();
        let direct = apply_real_multiplier(&g, &u, sym);
        let n = g.len();
        for a in 0..n {
            let mut acc = 0.0;
            for b in 0..n {
                acc += col[(a + n - b) % n] * u[b];
            }
            assert_abs_diff_eq!(acc, direct[a], epsilon = 1e-9);
        }
    }
}
