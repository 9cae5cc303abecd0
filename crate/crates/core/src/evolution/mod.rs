//! Pseudospectral time evolution, conserved-quantity monitoring, and the
//! stability experiment around a reference wave.

pub mod distance;
pub mod etdrk4;

pub use distance::{orbital_distance, orbital_distance_bruteforce, orbital_distance_detailed};
pub use etdrk4::{cfl_limit, Etdrk4};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::Grid;
use crate::symbols::apply_multiplier;
use crate::system::{SystemKind, SystemSpec};
use crate::waves::WaveProfile;

/// Imaginary contamination above this (relative) aborts a run.
const LEAKAGE_TOL: f64 = 1e-10;
/// Positivity floor for the logarithmic nonlinearity.
const LOG_POSITIVITY_FLOOR: f64 = 1e-8;

/// One sampled row of a simulation history.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HistoryRow {
    pub t: f64,
    pub energy: f64,
    pub momentum: f64,
    pub mass: f64,
    pub rho: f64,
}

/// Evolving solution pair with its diagnostics history.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub grid: Grid,
    pub u: [Vec<f64>; 2],
    pub t: f64,
    pub dt: f64,
    pub history: Vec<HistoryRow>,
    /// Largest relative imaginary leakage seen at sampling times.
    pub max_leakage: f64,
}

impl SimulationState {
    pub fn max_rho(&self) -> f64 {
        self.history.iter().map(|r| r.rho).fold(0.0, f64::max)
    }

    /// Worst relative drift of each invariant against its initial value.
    pub fn invariant_drift(&self) -> (f64, f64, f64) {
        let first = match self.history.first() {
            Some(row) => *row,
            None => return (0.0, 0.0, 0.0),
        };
        let rel = |now: f64, then: f64| (now - then).abs() / then.abs().max(1e-300);
        let mut worst = (0.0_f64, 0.0_f64, 0.0_f64);
        for row in &self.history {
            worst.0 = worst.0.max(rel(row.energy, first.energy));
            worst.1 = worst.1.max(rel(row.momentum, first.momentum));
            worst.2 = worst.2.max(rel(row.mass, first.mass));
        }
        worst
    }

    /// History CSV with columns (t, E, F, M, rho), 17 significant digits.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("t,E,F,M,rho\n");
        for row in &self.history {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                row.t, row.energy, row.momentum, row.mass, row.rho
            ));
        }
        out
    }
}

/// Conserved quantities of the flow: energy, momentum, and mass,
/// E = int (1/2 <M u, u> - R(u)), F = 1/2 int <u, u>, M = int <u, 1>,
/// all by trapezoid quadrature (exact for trigonometric polynomials).
pub fn conserved_quantities(
    grid: &Grid,
    system: &SystemSpec,
    u: &[Vec<f64>; 2],
) -> Result<(f64, f64, f64)> {
    let sym = system.symbol(grid.period());
    let mu = apply_multiplier(&sym, grid, u)?;
    let mut energy = 0.0;
    let mut momentum = 0.0;
    let mut mass = 0.0;
    let log_system = matches!(system.kind, SystemKind::LogKdv);
    for j in 0..grid.len() {
        let (a, b) = (u[0][j], u[1][j]);
        if log_system && a * a * b * b <= 0.0 {
            return Err(Error::domain(
                "logarithmic energy density undefined where a component vanishes",
            ));
        }
        energy += 0.5 * (mu[0][j] * a + mu[1][j] * b) - system.r(a, b);
        momentum += 0.5 * (a * a + b * b);
        mass += a + b;
    }
    let h = grid.step();
    Ok((energy * h, momentum * h, mass * h))
}

/// Configuration of a stability run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Perturbation size delta in the energy norm.
    pub delta: f64,
    pub seed: u64,
    /// Verdict threshold: bounded iff max rho <= k_ratio * delta.
    pub k_ratio: f64,
    /// Advective constant in the admissibility bound for dt.
    pub cfl_constant: f64,
    /// History sampling stride in steps.
    pub sample_every: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dt: 1e-3,
            horizon: 10.0,
            delta: 1e-3,
            seed: 7,
            k_ratio: 10.0,
            cfl_constant: 2000.0,
            sample_every: 100,
        }
    }
}

/// Band-limited, zero-mean, seeded random pair with unit energy norm.
pub fn smooth_perturbation(grid: &Grid, sobolev: f64, seed: u64) -> [Vec<f64>; 2] {
    let n = grid.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = (n / 8).max(2) as i64;
    let mut components: [Vec<f64>; 2] = [vec![0.0; n], vec![0.0; n]];
    for comp in components.iter_mut() {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for mode in 1..band {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            let c = Complex64::new(re, im);
            coeffs[mode as usize] = c;
            coeffs[n - mode as usize] = c.conj();
        }
        *comp = fourier::idft_real(&coeffs);
    }
    // Normalize in the H^{s/2} pair norm.
    let norm = pair_energy_norm(grid, &components, sobolev);
    for comp in components.iter_mut() {
        for v in comp.iter_mut() {
            *v /= norm;
        }
    }
    components
}

/// H^{s/2} x H^{s/2} norm of a pair.
pub fn pair_energy_norm(grid: &Grid, u: &[Vec<f64>; 2], sobolev: f64) -> f64 {
    let parseval = grid.period() / (grid.len() as f64).powi(2);
    let mut acc = 0.0;
    for comp in u {
        let hat = fourier::dft(comp);
        for (j, c) in hat.iter().enumerate() {
            let xi = grid.frequency(j);
            acc += (1.0 + xi * xi).powf(sobolev / 2.0) * c.norm_sqr();
        }
    }
    (acc * parseval).sqrt()
}

/// Evolve the wave plus a seeded perturbation, logging invariants and the
/// translation-minimized distance to the reference orbit.
pub fn stability_experiment(
    wave: &WaveProfile,
    system: &SystemSpec,
    config: &ExperimentConfig,
) -> Result<SimulationState> {
    let grid = wave.grid;
    let limit = cfl_limit(&grid, system, config.cfl_constant);
    if config.dt > limit {
        return Err(Error::domain(format!(
            "dt = {} exceeds the advective bound {limit:.6e} (constant {})",
            config.dt, config.cfl_constant
        )));
    }
    let sobolev = system.sobolev_index();
    let mut u0 = wave.values.clone();
    if config.delta != 0.0 {
        let pert = smooth_perturbation(&grid, sobolev, config.seed);
        for c in 0..2 {
            for j in 0..grid.len() {
                u0[c][j] += config.delta * pert[c][j];
            }
        }
    }
    if matches!(system.kind, SystemKind::LogKdv) {
        let min = u0
            .iter()
            .flat_map(|c| c.iter())
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min < LOG_POSITIVITY_FLOOR {
            return Err(Error::domain(format!(
                "logarithmic flow requires strictly positive data (min {min:.3e})"
            )));
        }
    }

    let stepper = Etdrk4::new(grid, system.clone(), config.dt)?;
    let mut state_hat = [fourier::dft(&u0[0]), fourier::dft(&u0[1])];
    let steps = (config.horizon / config.dt).round() as usize;
    let mut sim = SimulationState {
        grid,
        u: u0,
        t: 0.0,
        dt: config.dt,
        history: Vec::new(),
        max_leakage: 0.0,
    };

    let sample = |sim: &mut SimulationState,
                      state_hat: &[Vec<Complex64>; 2],
                      t: f64|
     -> Result<()> {
        let leakage = fourier::imag_leakage(&state_hat[0])
            .max(fourier::imag_leakage(&state_hat[1]));
        sim.max_leakage = sim.max_leakage.max(leakage);
        if leakage > LEAKAGE_TOL {
            return Err(Error::Numerical(format!(
                "imaginary leakage {leakage:.3e} exceeds {LEAKAGE_TOL:.1e} at t = {t}"
            )));
        }
        let u = [
            fourier::idft_real(&state_hat[0]),
            fourier::idft_real(&state_hat[1]),
        ];
        if u.iter().flat_map(|c| c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::BlowUp(t));
        }
        if matches!(system.kind, SystemKind::LogKdv) {
            let min = u.iter().flat_map(|c| c.iter()).cloned().fold(f64::INFINITY, f64::min);
            if min < LOG_POSITIVITY_FLOOR {
                return Err(Error::domain(format!(
                    "positivity lost at t = {t} (min {min:.3e})"
                )));
            }
        }
        let (e, f, m) = conserved_quantities(&sim.grid, system, &u)?;
        let rho = orbital_distance(&sim.grid, &u, &wave.values, sobolev)?;
        if let Some(last) = sim.history.last() {
            debug_assert!(t > last.t);
        }
        sim.history.push(HistoryRow { t, energy: e, momentum: f, mass: m, rho });
        sim.u = u;
        sim.t = t;
        Ok(())
    };

    sample(&mut sim, &state_hat, 0.0)?;
    for step in 1..=steps {
        stepper.step(&mut state_hat)?;
        let t = step as f64 * config.dt;
        if step % config.sample_every == 0 || step == steps {
            sample(&mut sim, &state_hat, t)?;
        }
    }
    Ok(sim)
}

/// Verdict of a run: "bounded" when the orbit never strays past
/// k_ratio * delta (or an absolute floor for the unperturbed case).
pub fn bounded_verdict(sim: &SimulationState, delta: f64, k_ratio: f64) -> bool {
    let bound = if delta == 0.0 { 1e-5 } else { k_ratio * delta };
    sim.max_rho() <= bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticModulus;
    use crate::waves::{
        build_cnoidal_wave, build_coupling_reduction, solve_coupling_cubic, CouplingCoeffs,
        MuRoots,
    };

    fn kdv_wave_and_system() -> (WaveProfile, SystemSpec) {
        let grid = Grid::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let scalar = build_cnoidal_wave(grid, EllipticModulus::new(0.5).unwrap()).unwrap();
        let coeffs = CouplingCoeffs::Kdv([1.0, 1.0, 0.0, 0.0]);
        let mu = match solve_coupling_cubic(&coeffs).unwrap() {
            MuRoots::Roots(r) => r.into_iter().fold(f64::NEG_INFINITY, f64::max),
            MuRoots::All => unreachable!(),
        };
        let red = build_coupling_reduction(&coeffs, mu).unwrap();
        (
            WaveProfile::proportional(&scalar, &red).unwrap(),
            SystemSpec::kdv([1.0, 1.0, 0.0, 0.0]),
        )
    }

    #[test]
    fn constant_pair_quadrature_closed_forms() {
        let grid = Grid::new(64, 3.0).unwrap();
        let sys = SystemSpec::kdv([0.0, 0.0, 0.0, 0.0]);
        let a = 1.7;
        let u = [vec![a; grid.len()], vec![a; grid.len()]];
        let (_, f, m) = conserved_quantities(&grid, &sys, &u).unwrap();
        let length = grid.period();
        assert!((f - a * a * length).abs() < 1e-12);
        assert!((m - 2.0 * a * length).abs() < 1e-12);
    }

    #[test]
    fn single_mode_energy_parseval() {
        // u = (cos(x), 0) with the second-derivative symbol and R = 0:
        // E = 1/2 * xi^2 * |u|^2 = 1/2 * 1 * L/2.
        let grid = Grid::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let sys = SystemSpec::kdv([0.0, 0.0, 0.0, 0.0]);
        let u = [
            grid.points().iter().map(|&x| x.cos()).collect::<Vec<f64>>(),
            vec![0.0; grid.len()],
        ];
        let (e, _, _) = conserved_quantities(&grid, &sys, &u).unwrap();
        let expected = 0.5 * grid.period() / 2.0;
        assert!((e - expected).abs() < 1e-12, "E = {e} expected {expected}");
    }

    #[test]
    fn cfl_guard_rejects_large_step() {
        let (wave, sys) = kdv_wave_and_system();
        let config = ExperimentConfig { dt: 0.05, ..Default::default() };
        assert!(stability_experiment(&wave, &sys, &config).is_err());
    }

    #[test]
    fn unperturbed_wave_stays_on_orbit() {
        let (wave, sys) = kdv_wave_and_system();
        let config = ExperimentConfig {
            dt: 1e-3,
            horizon: 1.0,
            delta: 0.0,
            sample_every: 200,
            ..Default::default()
        };
        let sim = stability_experiment(&wave, &sys, &config).unwrap();
        assert!(sim.max_rho() < 1e-6, "rho = {}", sim.max_rho());
        assert!(bounded_verdict(&sim, 0.0, 10.0));
        let (de, df, dm) = sim.invariant_drift();
        assert!(de < 1e-9 && df < 1e-9 && dm < 1e-9, "{de} {df} {dm}");
    }

    #[test]
    fn perturbation_is_deterministic_and_normalized() {
        let grid = Grid::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let p1 = smooth_perturbation(&grid, 2.0, 42);
        let p2 = smooth_perturbation(&grid, 2.0, 42);
        assert_eq!(p1[0], p2[0]);
        assert_eq!(p1[1], p2[1]);
        let norm = pair_energy_norm(&grid, &p1, 2.0);
        assert!((norm - 1.0).abs() < 1e-12);
        // Zero mean.
        assert!(grid.integrate(&p1[0]).abs() < 1e-12);
        assert!(grid.integrate(&p1[1]).abs() < 1e-12);
        let p3 = smooth_perturbation(&grid, 2.0, 43);
        assert_ne!(p1[0], p3[0]);
    }
}
