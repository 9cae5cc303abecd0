//! The Vakhitov-Kolokolov-type hypothesis: construct Phi as a parameter
//! derivative of the wave family, verify L Phi = Q'(phi) for the conserved
//! functional Q, and check the sign of I = <L Phi, Phi>.

use serde::{Deserialize, Serialize};

use crate::elliptic::EllipticModulus;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectral::{symmetric_eigen_sorted, GAP_TOL_FACTOR};
use crate::symbols::operator::{assemble_operator, LinearizedOperator};
use crate::system::SystemSpec;
use crate::waves::coupling::{build_coupling_reduction, CouplingCoeffs};
use crate::waves::{
    build_bo_wave, build_cnoidal_wave, build_dnoidal_wave, build_logkdv_wave,
    build_logkdv_wave_with_period, continue_lkk_wave, ScalarWave, WaveProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMethod {
    /// Centered finite differences along the wave family (with Richardson
    /// extrapolation at step ratio 2).
    FamilyFd,
    /// Linear solve of L Phi = Q'(phi) on the complement of the kernel.
    Solve,
}

/// Verification record for the sign condition I = <L Phi, Phi> < 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct H2Report {
    /// Quadratic form <L Phi, Phi> with the assembled operator.
    pub i_value: f64,
    /// Same quantity through <Q'(phi), Phi>; must agree with `i_value`.
    pub i_functional: f64,
    /// <L Phi, phi'>; vanishes by parity.
    pub orthogonality: f64,
    /// |L Phi - Q'(phi)| / |Q'(phi)|.
    pub q_residual: f64,
    pub derivative_method: DerivativeMethod,
    pub h2_verdict: bool,
    pub l_phi_norm: f64,
    pub phi_prime_norm: f64,
    pub detail: H2Detail,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "kebab-case")]
pub enum H2Detail {
    Kdv {
        /// d/dc of the squared norm of the reduced profile; positive on the
        /// whole family.
        d_norm_sq_dc: f64,
    },
    Mkdv {
        /// Modulus-derivative pairing whose negativity gives I < 0.
        i_tilde: f64,
    },
    LogKdv {
        k_value: f64,
        k_reference: f64,
    },
    Lkk {
        d_norm_sq_domega: f64,
        w: f64,
    },
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

fn richardson_vec(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(&c, &f)| (4.0 * f - c) / 3.0)
        .collect()
}

fn centered(plus: &[f64], minus: &[f64], step: f64) -> Vec<f64> {
    plus.iter()
        .zip(minus)
        .map(|(p, m)| (p - m) / (2.0 * step))
        .collect()
}

fn stack(pair: &[Vec<f64>; 2]) -> Vec<f64> {
    pair[0].iter().chain(pair[1].iter()).cloned().collect()
}

fn finish_report(
    op: &LinearizedOperator,
    wave: &WaveProfile,
    phi_cap: &[f64],
    q_prime: &[f64],
    detail: H2Detail,
) -> H2Report {
    let h = op.grid.step();
    let l_phi = op.apply(phi_cap);
    let i_value = l_phi.iter().zip(phi_cap).map(|(a, b)| a * b).sum::<f64>() * h;
    let i_functional = q_prime.iter().zip(phi_cap).map(|(a, b)| a * b).sum::<f64>() * h;
    let d = wave.derivative();
    let dp = stack(&d);
    let orthogonality = l_phi.iter().zip(&dp).map(|(a, b)| a * b).sum::<f64>() * h;
    let l_phi_norm = (l_phi.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    let phi_prime_norm = (dp.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    let q_norm = (q_prime.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    let q_residual = (l_phi
        .iter()
        .zip(q_prime)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        * h)
        .sqrt()
        / q_norm.max(1e-300);
    let h2_verdict = i_value < 0.0
        && orthogonality.abs() < 1e-8 * l_phi_norm * phi_prime_norm
        && q_residual < 1e-5;
    H2Report {
        i_value,
        i_functional,
        orthogonality,
        q_residual,
        derivative_method: DerivativeMethod::FamilyFd,
        h2_verdict,
        l_phi_norm,
        phi_prime_norm,
        detail,
    }
}

/// Phi for the coupled KdV family: the speed derivative of the wave pair,
/// computed along the modulus with the chain rule through c(k).
/// Q = -F (negative momentum), so Q'(phi) = -(phi_1, phi_2).
pub fn build_phi_kdv(
    b: [f64; 4],
    mu: f64,
    grid: Grid,
    k: f64,
    delta_k: f64,
) -> Result<(Vec<f64>, H2Report)> {
    if !(k - delta_k > 0.0 && k + delta_k < 1.0) {
        return Err(Error::domain(format!(
            "modulus stencil k +- {delta_k} around {k} leaves (0, 1)"
        )));
    }
    let coeffs = CouplingCoeffs::Kdv(b);
    let reduction = build_coupling_reduction(&coeffs, mu)?;
    let system = SystemSpec::kdv(b);

    let wave_at = |kk: f64| -> Result<ScalarWave> {
        build_cnoidal_wave(grid, EllipticModulus::new(kk)?)
    };
    let center = wave_at(k)?;
    let (wp, wm) = (wave_at(k + delta_k)?, wave_at(k - delta_k)?);
    let (wp2, wm2) = (wave_at(k + delta_k / 2.0)?, wave_at(k - delta_k / 2.0)?);

    let dphi_dk = richardson_vec(
        &centered(&wp.values, &wm.values, delta_k),
        &centered(&wp2.values, &wm2.values, delta_k / 2.0),
    );
    let dc_dk = richardson(
        (wp.speed - wm.speed) / (2.0 * delta_k),
        (wp2.speed - wm2.speed) / delta_k,
    );
    let dnorm_dk = richardson(
        (wp.norm_sq() - wm.norm_sq()) / (2.0 * delta_k),
        (wp2.norm_sq() - wm2.norm_sq()) / delta_k,
    );
    let d_norm_sq_dc = dnorm_dk / dc_dk;

    // Pair components are phi_tilde / xi; Phi = (d phi_1/dc)(1, mu).
    let xi = reduction.scale;
    let dphi1_dc: Vec<f64> = dphi_dk.iter().map(|v| v / (dc_dk * xi)).collect();
    let phi_cap: Vec<f64> = dphi1_dc
        .iter()
        .chain(dphi1_dc.iter().map(|v| mu * *v).collect::<Vec<_>>().iter())
        .cloned()
        .collect();

    let pair = WaveProfile::proportional(&center, &reduction)?;
    let op = assemble_operator(&pair, &system)?;
    let q_prime: Vec<f64> = pair.values[0]
        .iter()
        .map(|v| -v)
        .chain(pair.values[1].iter().map(|v| -v))
        .collect();
    let report = finish_report(&op, &pair, &phi_cap, &q_prime, H2Detail::Kdv { d_norm_sq_dc });
    Ok((phi_cap, report))
}

/// Phi for the modified KdV family: the modulus derivative of the pair.
/// Q'(phi) = -(c'(k) phi_1 + A_1'(k))(1, mu); the sign of I matches the
/// sign of the reduced pairing I-tilde because the change of variables has
/// positive scale.
pub fn build_phi_mkdv(
    d: [f64; 5],
    mu: f64,
    grid: Grid,
    k: f64,
    delta_k: f64,
) -> Result<(Vec<f64>, H2Report)> {
    if !(k - delta_k > 0.0 && k + delta_k < 1.0) {
        return Err(Error::domain(format!(
            "modulus stencil k +- {delta_k} around {k} leaves (0, 1)"
        )));
    }
    let coeffs = CouplingCoeffs::Mkdv(d);
    let reduction = build_coupling_reduction(&coeffs, mu)?;
    let system = SystemSpec::mkdv(d);
    let alpha = (6.0 / reduction.scale).sqrt();

    let wave_at =
        |kk: f64| -> Result<ScalarWave> { build_dnoidal_wave(grid, EllipticModulus::new(kk)?) };
    let center = wave_at(k)?;
    let (wp, wm) = (wave_at(k + delta_k)?, wave_at(k - delta_k)?);
    let (wp2, wm2) = (wave_at(k + delta_k / 2.0)?, wave_at(k - delta_k / 2.0)?);

    let dphi_dk = richardson_vec(
        &centered(&wp.values, &wm.values, delta_k),
        &centered(&wp2.values, &wm2.values, delta_k / 2.0),
    );
    let dc_dk = richardson(
        (wp.speed - wm.speed) / (2.0 * delta_k),
        (wp2.speed - wm2.speed) / delta_k,
    );
    let da_dk = richardson(
        (wp.constant - wm.constant) / (2.0 * delta_k),
        (wp2.constant - wm2.constant) / delta_k,
    );

    // I-tilde = -< c'(k) phi_tilde + A'(k), d phi_tilde / dk >.
    let h = grid.step();
    let i_tilde = -center
        .values
        .iter()
        .zip(&dphi_dk)
        .map(|(&p, &dp)| (dc_dk * p + da_dk) * dp)
        .sum::<f64>()
        * h;

    let dphi1_dk: Vec<f64> = dphi_dk.iter().map(|v| alpha * v).collect();
    let phi_cap: Vec<f64> = dphi1_dk
        .iter()
        .cloned()
        .chain(dphi1_dk.iter().map(|v| mu * v))
        .collect();

    let pair = WaveProfile::proportional(&center, &reduction)?;
    let op = assemble_operator(&pair, &system)?;
    let da1_dk = alpha * da_dk;
    let q_prime: Vec<f64> = pair.values[0]
        .iter()
        .map(|v| -(dc_dk * v + da1_dk))
        .chain(pair.values[0].iter().map(|v| -mu * (dc_dk * v + da1_dk)))
        .collect();
    let report = finish_report(&op, &pair, &phi_cap, &q_prime, H2Detail::Mkdv { i_tilde });
    Ok((phi_cap, report))
}

/// Parameter derivatives of the logarithmic family at fixed emergent
/// period, and the quadratic form K built from them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogKdvFamilyDerivatives {
    /// d phi / dc on the grid.
    pub eta: Vec<f64>,
    /// d phi / da on the grid.
    pub beta: Vec<f64>,
    pub m_c: f64,
    pub m_a: f64,
    pub f_c: f64,
    pub f_a: f64,
    /// Mass of the pair wave, 2 * integral of phi.
    pub m_val: f64,
    /// Momentum of the pair wave, integral of phi^2.
    pub f_val: f64,
    pub c: f64,
    pub a: f64,
    pub period: f64,
    /// Residual period mismatches across the re-solved family members.
    pub period_drift: f64,
}

impl LogKdvFamilyDerivatives {
    /// K(x, y) = x^2 F_c + 2 x y M_c + y^2 M_A (using F_A = M_c).
    pub fn k_form(&self, x: f64, y: f64) -> f64 {
        x * x * self.f_c + 2.0 * x * y * self.m_c + y * y * self.m_a
    }

    /// K at the distinguished direction (1, a/2) and its closed-form
    /// reference a M / 4 + F; both positive when a > 0.
    pub fn k_check(&self) -> (f64, f64) {
        (
            self.k_form(1.0, self.a / 2.0),
            self.a * self.m_val / 4.0 + self.f_val,
        )
    }

    pub fn h2_verdict(&self) -> bool {
        self.k_check().0 > 0.0
    }
}

/// Differentiate the logarithmic family at fixed period: each perturbed
/// member is re-solved with a period-targeting amplitude search before the
/// centered differences are taken.
pub fn logkdv_family_derivatives(
    n: usize,
    c: f64,
    a: f64,
    delta: f64,
    amplitude: Option<f64>,
) -> Result<LogKdvFamilyDerivatives> {
    let base = build_logkdv_wave(n, c, a, amplitude)?;
    let period = base.grid.period();
    let base_amp = match base.form {
        crate::waves::ScalarForm::LogKdv { amplitude, .. } => amplitude,
        _ => unreachable!(),
    };

    let solve = |cc: f64, aa: f64| -> Result<ScalarWave> {
        build_logkdv_wave_with_period(n, cc, aa, period, Some(base_amp))
    };

    let cp = solve(c + delta, a)?;
    let cm = solve(c - delta, a)?;
    let cp2 = solve(c + delta / 2.0, a)?;
    let cm2 = solve(c - delta / 2.0, a)?;
    let ap = solve(c, a + delta)?;
    let am = solve(c, a - delta)?;
    let ap2 = solve(c, a + delta / 2.0)?;
    let am2 = solve(c, a - delta / 2.0)?;

    let period_drift = [&cp, &cm, &cp2, &cm2, &ap, &am, &ap2, &am2]
        .iter()
        .map(|w| (w.grid.period() - period).abs() / period)
        .fold(0.0, f64::max);
    if period_drift > 1e-6 {
        return Err(Error::Construction(format!(
            "family members drifted {period_drift:.3e} in period"
        )));
    }

    let eta = richardson_vec(
        &centered(&cp.values, &cm.values, delta),
        &centered(&cp2.values, &cm2.values, delta / 2.0),
    );
    let beta = richardson_vec(
        &centered(&ap.values, &am.values, delta),
        &centered(&ap2.values, &am2.values, delta / 2.0),
    );

    let grid = base.grid;
    let mass = |w: &ScalarWave| grid.integrate(&w.values);
    let momentum = |w: &ScalarWave| grid.inner(&w.values, &w.values);

    let m_c = 2.0
        * richardson(
            (mass(&cp) - mass(&cm)) / (2.0 * delta),
            (mass(&cp2) - mass(&cm2)) / delta,
        );
    let m_a = 2.0
        * richardson(
            (mass(&ap) - mass(&am)) / (2.0 * delta),
            (mass(&ap2) - mass(&am2)) / delta,
        );
    let f_c = richardson(
        (momentum(&cp) - momentum(&cm)) / (2.0 * delta),
        (momentum(&cp2) - momentum(&cm2)) / delta,
    );
    let f_a = richardson(
        (momentum(&ap) - momentum(&am)) / (2.0 * delta),
        (momentum(&ap2) - momentum(&am2)) / delta,
    );

    Ok(LogKdvFamilyDerivatives {
        eta,
        beta,
        m_c,
        m_a,
        f_c,
        f_a,
        m_val: 2.0 * mass(&base),
        f_val: momentum(&base),
        c,
        a,
        period,
        period_drift,
    })
}

/// Full sign-condition report for the logarithmic system using
/// Phi = eta + (a/2) beta in both components and Q = -(F + (a/2) M).
pub fn logkdv_h2(
    n: usize,
    c: f64,
    a: f64,
    delta: f64,
    amplitude: Option<f64>,
) -> Result<(LogKdvFamilyDerivatives, H2Report)> {
    let family = logkdv_family_derivatives(n, c, a, delta, amplitude)?;
    let base = build_logkdv_wave(n, c, a, amplitude)?;
    let pair = WaveProfile::symmetric_pair(&base)?;
    let system = SystemSpec::log_kdv();
    let op = assemble_operator(&pair, &system)?;

    let y = a / 2.0;
    let component: Vec<f64> = family
        .eta
        .iter()
        .zip(&family.beta)
        .map(|(e, b)| e + y * b)
        .collect();
    let phi_cap: Vec<f64> = component.iter().chain(component.iter()).cloned().collect();
    let q_prime: Vec<f64> = base
        .values
        .iter()
        .map(|v| -(v + y))
        .chain(base.values.iter().map(|v| -(v + y)))
        .collect();

    let (k_value, k_reference) = family.k_check();
    let report = finish_report(
        &op,
        &pair,
        &phi_cap,
        &q_prime,
        H2Detail::LogKdv { k_value, k_reference },
    );
    Ok((family, report))
}

/// Sign condition for the nonlocal family: I = <L Phi, Phi> with
/// Phi = (d phi/d omega, d phi/d omega); negativity is equivalent to
/// d/d omega of the squared norm being positive.
pub fn check_h2_lkk(
    grid: Grid,
    omega: f64,
    w: f64,
    delta: f64,
) -> Result<(Vec<f64>, H2Report)> {
    let wave_at = |om: f64| -> Result<ScalarWave> {
        let bo = build_bo_wave(grid, om)?;
        if w == 0.0 {
            Ok(bo)
        } else {
            continue_lkk_wave(om, w, &bo)
        }
    };
    let center = wave_at(omega)?;
    let (wp, wm) = (wave_at(omega + delta)?, wave_at(omega - delta)?);
    let (wp2, wm2) = (wave_at(omega + delta / 2.0)?, wave_at(omega - delta / 2.0)?);

    let eta = richardson_vec(
        &centered(&wp.values, &wm.values, delta),
        &centered(&wp2.values, &wm2.values, delta / 2.0),
    );
    let d_norm_sq_domega = richardson(
        (wp.norm_sq() - wm.norm_sq()) / (2.0 * delta),
        (wp2.norm_sq() - wm2.norm_sq()) / delta,
    );

    let pair = WaveProfile::symmetric_pair(&center)?;
    let system = SystemSpec::lkk(w);
    let op = assemble_operator(&pair, &system)?;
    let phi_cap: Vec<f64> = eta.iter().chain(eta.iter()).cloned().collect();
    let q_prime: Vec<f64> = center
        .values
        .iter()
        .map(|v| -v)
        .chain(center.values.iter().map(|v| -v))
        .collect();
    let report = finish_report(
        &op,
        &pair,
        &phi_cap,
        &q_prime,
        H2Detail::Lkk { d_norm_sq_domega, w },
    );
    Ok((phi_cap, report))
}

/// Cross-check route for Phi: solve L Phi = Q'(phi) by eigendecomposition
/// with the near-kernel deflated.
pub fn solve_phi(op: &LinearizedOperator, q_prime: &[f64]) -> Result<Vec<f64>> {
    if q_prime.len() != op.matrix.nrows() {
        return Err(Error::shape("right-hand side does not match operator"));
    }
    let (values, vectors) = symmetric_eigen_sorted(op.matrix.clone());
    let radius = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let gap_tol = GAP_TOL_FACTOR * radius;
    let mut phi = vec![0.0; q_prime.len()];
    for (idx, &lambda) in values.iter().enumerate() {
        if lambda.abs() <= gap_tol {
            continue;
        }
        let v = vectors.column(idx);
        let coeff: f64 = v.iter().zip(q_prime).map(|(a, b)| a * b).sum::<f64>() / lambda;
        for (p, vi) in phi.iter_mut().zip(v.iter()) {
            *p += coeff * vi;
        }
    }
    Ok(phi)
}
