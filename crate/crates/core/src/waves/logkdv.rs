//! Even periodic solutions of -phi'' + c phi - phi log(phi^2) + a = 0.
//!
//! The period is not prescribed: an orbit of the planar system around the
//! center equilibrium is selected by its amplitude, its period emerges from
//! the energy level, and Newton collocation on that period polishes the
//! profile to spectral accuracy.

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::newton::EvenNewton;
use super::{ScalarForm, ScalarWave};

const NEWTON_TOL: f64 = 1e-9;
const NEWTON_MAX_ITER: usize = 50;

/// Right-hand side of phi'' = f(phi) = c phi - phi log(phi^2) + a.
fn planar_rhs(phi: f64, c: f64, a: f64) -> f64 {
    c * phi - phi * (phi * phi).ln() + a
}

/// Derivative f'(phi) = c - log(phi^2) - 2.
fn planar_rhs_prime(phi: f64, c: f64) -> f64 {
    c - (phi * phi).ln() - 2.0
}

/// Separatrix threshold 2 e^{c/2 - 1}: the nonlinearity has a double root
/// exactly when |a| equals this value.
pub fn separatrix_threshold(c: f64) -> f64 {
    2.0 * (c / 2.0 - 1.0).exp()
}

/// The center equilibrium: the unique root of f above the critical point
/// e^{(c-2)/2}, around which the even periodic orbits wind.
pub fn center_equilibrium(c: f64, a: f64) -> Result<f64> {
    let crit = ((c - 2.0) / 2.0_f64).exp();
    if a + separatrix_threshold(c) <= 0.0 {
        return Err(Error::domain(format!(
            "no center equilibrium: a = {a} is at or below -2 e^(c/2 - 1) = {}",
            -separatrix_threshold(c)
        )));
    }
    // f decreases from its maximum at the critical point; bracket upward.
    let mut hi = crit.max(1e-12);
    while planar_rhs(hi, c, a) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numerical("equilibrium bracket expansion failed".into()));
        }
    }
    let mut lo = crit.max(1e-12);
    // Bisection then Newton polish.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if planar_rhs(mid, c, a) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..6 {
        let f = planar_rhs(root, c, a);
        let df = planar_rhs_prime(root, c);
        if df == 0.0 {
            break;
        }
        root -= f / df;
    }
    Ok(root)
}

/// One half-orbit of the planar system from (phi_eq + amplitude, 0) to the
/// opposite turning point: returns the full period and samples (x, phi)
/// over the half period.
fn shoot_half_orbit(c: f64, a: f64, amplitude: f64) -> Result<(f64, Vec<(f64, f64)>)> {
    let eq = center_equilibrium(c, a)?;
    if amplitude <= 0.0 {
        return Err(Error::domain("orbit amplitude must be positive"));
    }
    let start = eq + amplitude;
    // Linearized period sets the integration step.
    let omega_sq = -planar_rhs_prime(eq, c);
    if omega_sq <= 0.0 {
        return Err(Error::Numerical("equilibrium is not a center".into()));
    }
    let t_lin = 2.0 * std::f64::consts::PI / omega_sq.sqrt();
    let h = t_lin / 4000.0;

    let deriv = |y: [f64; 2]| [y[1], planar_rhs(y[0], c, a)];
    let mut y = [start, 0.0];
    let mut t = 0.0;
    let mut samples = vec![(0.0, start)];
    let max_steps = 400_000;
    for step in 0..max_steps {
        let k1 = deriv(y);
        let k2 = deriv([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = deriv([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = deriv([y[0] + h * k3[0], y[1] + h * k3[1]]);
        let y_next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        let t_next = t + h;
        if !y_next[0].is_finite() {
            return Err(Error::Numerical("phase-plane orbit escaped".into()));
        }
        if step > 4 && y[1] < 0.0 && y_next[1] >= 0.0 {
            // Turning point: refine the crossing time linearly in phi'.
            let frac = -y[1] / (y_next[1] - y[1]);
            let t_half = t + frac * h;
            let phi_end = y[0] + frac * (y_next[0] - y[0]);
            samples.push((t_half, phi_end));
            return Ok((2.0 * t_half, samples));
        }
        y = y_next;
        t = t_next;
        samples.push((t, y[0]));
    }
    Err(Error::Numerical(
        "phase-plane orbit did not close (no turning point found)".into(),
    ))
}

/// Interpolate half-orbit samples onto a collocation grid by even
/// reflection about x = 0.
fn seed_from_samples(grid: &Grid, samples: &[(f64, f64)], period: f64) -> Vec<f64> {
    let half = period / 2.0;
    grid.points()
        .iter()
        .map(|&x| {
            let t = if x <= half { x } else { period - x };
            // Linear interpolation in the sample table.
            match samples.binary_search_by(|(s, _)| s.partial_cmp(&t).unwrap()) {
                Ok(i) => samples[i].1,
                Err(i) => {
                    if i == 0 {
                        samples[0].1
                    } else if i >= samples.len() {
                        samples[samples.len() - 1].1
                    } else {
                        let (t0, p0) = samples[i - 1];
                        let (t1, p1) = samples[i];
                        p0 + (p1 - p0) * (t - t0) / (t1 - t0)
                    }
                }
            }
        })
        .collect()
}

fn validate_parameters(c: f64, a: f64) -> Result<()> {
    if !c.is_finite() || !a.is_finite() {
        return Err(Error::domain("parameters must be finite"));
    }
    let threshold = separatrix_threshold(c);
    if (a.abs() - threshold).abs() <= 1e-12 * threshold.max(1.0) {
        return Err(Error::domain(format!(
            "(c, a) = ({c}, {a}) lies on the separatrix threshold |a| = 2 e^(c/2-1) = {threshold}"
        )));
    }
    Ok(())
}

fn newton_polish(
    grid: &Grid,
    c: f64,
    a: f64,
    seed: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let solver = EvenNewton::new(grid, |xi| xi * xi, c, a);
    let g = |p: f64| p * (p * p).ln();
    let g_prime = |p: f64| (p * p).ln() + 2.0;
    let out = solver.solve(seed, g, g_prime, NEWTON_TOL, NEWTON_MAX_ITER)?;
    let residual = *out.history.last().unwrap();
    Ok((out.values, residual))
}

/// Build the even periodic wave for parameters (c, a) and the orbit of the
/// given amplitude; the emergent period becomes the grid period.
///
/// `amplitude = None` selects a quarter of the equilibrium height, a
/// mid-well orbit that stays well away from the separatrix.
pub fn build_logkdv_wave(
    n: usize,
    c: f64,
    a: f64,
    amplitude: Option<f64>,
) -> Result<ScalarWave> {
    validate_parameters(c, a)?;
    let eq = center_equilibrium(c, a)?;
    let amp = amplitude.unwrap_or(0.25 * eq);
    let (period, samples) = shoot_half_orbit(c, a, amp)?;
    let grid = Grid::new(n, period)?;
    let seed = seed_from_samples(&grid, &samples, period);
    let (values, residual) = newton_polish(&grid, c, a, &seed)?;
    Ok(ScalarWave::from_values(
        grid,
        values,
        c,
        a,
        ScalarForm::LogKdv { a, amplitude: amp, equilibrium: eq },
        residual,
    ))
}

/// Build the wave whose period is exactly `period`: a secant iteration on
/// the shooting amplitude seeds Newton collocation on the fixed grid, so
/// members of the (c, a) family share one period for differentiation.
pub fn build_logkdv_wave_with_period(
    n: usize,
    c: f64,
    a: f64,
    period: f64,
    amplitude_guess: Option<f64>,
) -> Result<ScalarWave> {
    validate_parameters(c, a)?;
    let eq = center_equilibrium(c, a)?;
    let mut amp = amplitude_guess.unwrap_or(0.25 * eq);

    // Secant on emergent_period(amplitude) - period.
    let (mut p0, _) = shoot_half_orbit(c, a, amp)?;
    let mut amp_prev = amp;
    let mut f_prev = p0 - period;
    amp *= if f_prev > 0.0 { 0.95 } else { 1.05 };
    let mut samples_best = None;
    for _ in 0..60 {
        let (p, samples) = shoot_half_orbit(c, a, amp)?;
        p0 = p;
        let f = p - period;
        samples_best = Some(samples);
        if f.abs() < 1e-8 * period {
            break;
        }
        let df = f - f_prev;
        let step = if df.abs() > 1e-300 { f * (amp - amp_prev) / df } else { 0.0 };
        amp_prev = amp;
        f_prev = f;
        amp = (amp - step).max(1e-8 * eq);
    }
    let drift = (p0 - period).abs() / period;
    if drift > 1e-6 {
        return Err(Error::Convergence(
            format!("period targeting stalled at relative drift {drift:.3e}"),
            drift,
        ));
    }

    let grid = Grid::new(n, period)?;
    let seed = seed_from_samples(&grid, samples_best.as_ref().unwrap(), period);
    let (values, residual) = newton_polish(&grid, c, a, &seed)?;

    // Guard against capture by a different orbit of the same period.
    let seed_dist = grid.norm(
        &values
            .iter()
            .zip(&seed)
            .map(|(a, b)| a - b)
            .collect::<Vec<f64>>(),
    ) / grid.norm(&seed).max(1e-300);
    if seed_dist > 0.1 {
        return Err(Error::Construction(format!(
            "period-targeted solve drifted to a different orbit (relative jump {seed_dist:.2e})"
        )));
    }

    Ok(ScalarWave::from_values(
        grid,
        values,
        c,
        a,
        ScalarForm::LogKdv { a, amplitude: amp, equilibrium: eq },
        residual,
    ))
}

/// A phase-plane orbit polyline for export.
#[derive(Debug, Clone)]
pub struct PlanarOrbit {
    pub amplitude: f64,
    /// (phi, phi') samples around the full closed orbit.
    pub points: Vec<(f64, f64)>,
    pub period: f64,
    pub min_phi: f64,
}

/// Closed orbits around the center for a range of amplitudes, as data for
/// phase-portrait plots. The first entry is the equilibrium point itself.
pub fn phase_plane_orbits(
    c: f64,
    a: f64,
    count: usize,
    max_amplitude: Option<f64>,
) -> Result<Vec<PlanarOrbit>> {
    validate_parameters(c, a)?;
    let eq = center_equilibrium(c, a)?;
    let a_max = max_amplitude.unwrap_or(0.6 * eq);
    let mut orbits = vec![PlanarOrbit {
        amplitude: 0.0,
        points: vec![(eq, 0.0)],
        period: 0.0,
        min_phi: eq,
    }];
    for i in 1..=count {
        let amp = a_max * i as f64 / count as f64;
        let (period, samples) = shoot_half_orbit(c, a, amp)?;
        // Reconstruct phi' from the samples by differencing, then mirror
        // the half orbit to close the loop.
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2 * samples.len());
        for w in samples.windows(2) {
            let (t0, p0) = w[0];
            let (t1, p1) = w[1];
            pts.push((p0, (p1 - p0) / (t1 - t0)));
        }
        pts.push((samples.last().unwrap().1, 0.0));
        let mut mirrored: Vec<(f64, f64)> =
            pts.iter().rev().map(|&(p, v)| (p, -v)).collect();
        let mut full = pts;
        full.append(&mut mirrored);
        let min_phi = full.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        orbits.push(PlanarOrbit { amplitude: amp, points: full, period, min_phi });
    }
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equilibrium_closed_form_at_zero_constant() {
        // c phi = phi log(phi^2) gives phi = e^{c/2}.
        let eq = center_equilibrium(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(eq, (0.5_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn threshold_matches_double_root_of_nonlinearity() {
        // f'(phi) = 0 at phi = e^{(c-2)/2}; f at that point vanishes exactly
        // when a = -2 e^{c/2 - 1}.
        for &c in &[0.5, 1.0, 2.0] {
            let crit = ((c - 2.0) / 2.0_f64).exp();
            let a = -separatrix_threshold(c);
            assert_abs_diff_eq!(planar_rhs(crit, c, a), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(planar_rhs_prime(crit, c), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_threshold_parameters() {
        let c = 1.0;
        let a = -separatrix_threshold(c);
        assert!(build_logkdv_wave(64, c, a, None).is_err());
    }

    #[test]
    fn reference_orbit_stays_above_one() {
        let wave = build_logkdv_wave(256, 1.0, 2.0, Some(0.5)).unwrap();
        assert!(wave.residual < 1e-9, "residual {}", wave.residual);
        assert!(wave.min_value() > 1.0);
        // Emergent period near the prototype value.
        assert!((wave.grid.period() - 3.7648).abs() < 1e-2);
    }

    #[test]
    fn profile_is_even() {
        let wave = build_logkdv_wave(256, 1.0, 2.0, None).unwrap();
        assert!(wave.oddness() < 1e-12, "oddness {}", wave.oddness());
    }

    #[test]
    fn period_targeting_reproduces_base_family_member() {
        let base = build_logkdv_wave(128, 1.0, 2.0, Some(0.5)).unwrap();
        let re =
            build_logkdv_wave_with_period(128, 1.0, 2.0, base.grid.period(), Some(0.45))
                .unwrap();
        let diff: Vec<f64> = base
            .values
            .iter()
            .zip(&re.values)
            .map(|(a, b)| a - b)
            .collect();
        assert!(base.grid.norm(&diff) < 1e-8);
    }
}
