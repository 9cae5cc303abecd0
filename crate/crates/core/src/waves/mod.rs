//! Construction of periodic traveling-wave profiles for the four systems,
//! including the proportional-wave coupling reduction.

pub mod cnoidal;
pub mod coupling;
pub mod dnoidal;
pub mod lkk;
pub mod logkdv;
pub mod newton;

pub use cnoidal::build_cnoidal_wave;
pub use coupling::{
    build_coupling_reduction, eigen_coupling, solve_coupling_cubic, CouplingCoeffs,
    CouplingEigen, CouplingKind, CouplingReduction, MuRoots,
};
pub use dnoidal::build_dnoidal_wave;
pub use lkk::{build_bo_wave, continue_lkk_wave};
pub use logkdv::{build_logkdv_wave, build_logkdv_wave_with_period};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::Grid;

/// A single-component reduced wave profile: the scalar function produced by
/// the change of variables that collapses a proportional two-component wave
/// to one equation.
#[derive(Debug, Clone)]
pub struct ScalarWave {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub coeffs: Vec<Complex64>,
    /// Wave speed of the scalar equation (omega for the nonlocal family).
    pub speed: f64,
    /// Integration constant of the scalar equation.
    pub constant: f64,
    pub form: ScalarForm,
    /// Discrete L^2 residual of the defining equation at construction.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum ScalarForm {
    Cnoidal { k: f64 },
    Dnoidal { k: f64 },
    LogKdv { a: f64, amplitude: f64, equilibrium: f64 },
    Bo,
    Lkk { w: f64 },
}

impl ScalarWave {
    pub(crate) fn from_values(
        grid: Grid,
        values: Vec<f64>,
        speed: f64,
        constant: f64,
        form: ScalarForm,
        residual: f64,
    ) -> Self {
        let coeffs = fourier::dft(&values);
        ScalarWave { grid, values, coeffs, speed, constant, form, residual }
    }

    /// Spatial derivative, spectrally accurate.
    pub fn derivative(&self) -> Vec<f64> {
        fourier::derivative(&self.grid, &self.values, 1)
    }

    /// Discrete L^2 norm squared over one period.
    pub fn norm_sq(&self) -> f64 {
        self.grid.inner(&self.values, &self.values)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest magnitude among DFT bins of odd (sine) symmetry; zero for an
    /// even profile.
    pub fn oddness(&self) -> f64 {
        let scale = self.values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        self.coeffs
            .iter()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
            / (self.grid.len() as f64)
            / scale
    }
}

/// Construction metadata for a two-component wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum WaveParams {
    Kdv { k: f64, mu: f64, xi: f64 },
    Mkdv { k: f64, mu: f64, zeta: f64, a_tilde: f64 },
    LogKdv { c: f64, a: f64, amplitude: f64 },
    Bo { omega: f64 },
    Lkk { omega: f64, w: f64 },
}

impl WaveParams {
    pub fn system_tag(&self) -> &'static str {
        match self {
            WaveParams::Kdv { .. } => "kdv",
            WaveParams::Mkdv { .. } => "mkdv",
            WaveParams::LogKdv { .. } => "logkdv",
            WaveParams::Bo { .. } | WaveParams::Lkk { .. } => "lkk",
        }
    }
}

/// A periodic traveling wave of the two-component system: grid samples and
/// DFT coefficients per component, period, speed, integration constants,
/// and the construction metadata.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub grid: Grid,
    pub values: [Vec<f64>; 2],
    pub coeffs: [Vec<Complex64>; 2],
    pub speed: f64,
    pub constants: (f64, f64),
    pub mu: f64,
    pub params: WaveParams,
}

impl WaveProfile {
    fn from_components(
        grid: Grid,
        values: [Vec<f64>; 2],
        speed: f64,
        constants: (f64, f64),
        mu: f64,
        params: WaveParams,
    ) -> Self {
        let coeffs = [fourier::dft(&values[0]), fourier::dft(&values[1])];
        WaveProfile { grid, values, coeffs, speed, constants, mu, params }
    }

    /// Assemble the proportional pair (alpha phi, mu alpha phi) from a
    /// reduced scalar wave; the second component is constructed by exact
    /// pointwise scaling, never recomputed.
    pub fn proportional(scalar: &ScalarWave, reduction: &CouplingReduction) -> Result<Self> {
        let (alpha, params, a1) = match (&scalar.form, reduction.kind) {
            (ScalarForm::Cnoidal { k }, CouplingKind::Kdv) => {
                let alpha = 1.0 / reduction.scale;
                // xi A1 = constant of the scalar equation.
                let a1 = scalar.constant / reduction.scale;
                (
                    alpha,
                    WaveParams::Kdv { k: *k, mu: reduction.mu, xi: reduction.scale },
                    a1,
                )
            }
            (ScalarForm::Dnoidal { k }, CouplingKind::Mkdv) => {
                let alpha = (6.0 / reduction.scale).sqrt();
                // constant = sqrt(zeta/6) A1.
                let a1 = scalar.constant * alpha;
                (
                    alpha,
                    WaveParams::Mkdv {
                        k: *k,
                        mu: reduction.mu,
                        zeta: reduction.scale,
                        a_tilde: scalar.constant,
                    },
                    a1,
                )
            }
            _ => {
                return Err(Error::Construction(
                    "scalar wave family does not match the coupling reduction".into(),
                ))
            }
        };
        let first: Vec<f64> = scalar.values.iter().map(|v| alpha * v).collect();
        let second: Vec<f64> = first.iter().map(|v| reduction.mu * v).collect();
        Ok(Self::from_components(
            scalar.grid,
            [first, second],
            scalar.speed,
            (a1, reduction.mu * a1),
            reduction.mu,
            params,
        ))
    }

    /// Assemble the equal pair (phi, phi) used by the logarithmic and
    /// nonlocal systems.
    pub fn symmetric_pair(scalar: &ScalarWave) -> Result<Self> {
        let params = match scalar.form {
            ScalarForm::LogKdv { a, amplitude, .. } => {
                WaveParams::LogKdv { c: scalar.speed, a, amplitude }
            }
            ScalarForm::Bo => WaveParams::Bo { omega: scalar.speed },
            ScalarForm::Lkk { w } => WaveParams::Lkk { omega: scalar.speed, w },
            _ => {
                return Err(Error::Construction(
                    "proportional reductions need coupling data; use WaveProfile::proportional"
                        .into(),
                ))
            }
        };
        let a = scalar.constant;
        Ok(Self::from_components(
            scalar.grid,
            [scalar.values.clone(), scalar.values.clone()],
            scalar.speed,
            (a, a),
            1.0,
            params,
        ))
    }

    /// Pair derivative (phi_1', phi_2').
    pub fn derivative(&self) -> [Vec<f64>; 2] {
        [
            fourier::derivative(&self.grid, &self.values[0], 1),
            fourier::derivative(&self.grid, &self.values[1], 1),
        ]
    }

    /// Relative defect between stored samples and stored DFT coefficients.
    pub fn dft_consistency(&self) -> f64 {
        let mut worst = 0.0_f64;
        for c in 0..2 {
            let back = fourier::idft_real(&self.coeffs[c]);
            let scale = self.values[c].iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
            for (a, b) in back.iter().zip(&self.values[c]) {
                worst = worst.max((a - b).abs() / scale);
            }
        }
        worst
    }

    /// JSON document for external consumption.
    pub fn to_document(&self) -> WaveDocument {
        WaveDocument {
            system: self.params.system_tag().to_string(),
            l: self.grid.period(),
            c: self.speed,
            a1: self.constants.0,
            a2: self.constants.1,
            mu: self.mu,
            params: self.params.clone(),
            grid: [self.values[0].clone(), self.values[1].clone()],
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    /// Two-column CSV (x, value) for one component; floats carry 17
    /// significant digits so they round-trip exactly.
    pub fn component_csv(&self, component: usize) -> String {
        let mut out = String::from("x,value\n");
        let x = self.grid.points();
        for (xj, vj) in x.iter().zip(&self.values[component]) {
            out.push_str(&format!("{:.16e},{:.16e}\n", xj, vj));
        }
        out
    }
}

/// Serialized form of a wave profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveDocument {
    pub system: String,
    #[serde(rename = "L")]
    pub l: f64,
    pub c: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    pub mu: f64,
    pub params: WaveParams,
    pub grid: [Vec<f64>; 2],
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_pair_has_exact_component_ratio() {
        let scalar = build_cnoidal_wave(
            Grid::new(128, 2.0 * std::f64::consts::PI).unwrap(),
            crate::elliptic::EllipticModulus::new(0.5).unwrap(),
        )
        .unwrap();
        let coeffs = CouplingCoeffs::Kdv([1.0, 1.0, 0.0, 0.0]);
        let mu = match solve_coupling_cubic(&coeffs).unwrap() {
            MuRoots::Roots(r) => r.into_iter().fold(f64::NEG_INFINITY, f64::max),
            MuRoots::All => unreachable!(),
        };
        let red = build_coupling_reduction(&coeffs, mu).unwrap();
        let pair = WaveProfile::proportional(&scalar, &red).unwrap();
        for j in 0..pair.grid.len() {
            // Constructed, not recomputed: the ratio is exact.
            assert_eq!(pair.values[1][j], mu * pair.values[0][j]);
        }
        assert!(pair.dft_consistency() < 1e-12);
    }

    #[test]
    fn json_document_carries_schema_fields() {
        let scalar = build_cnoidal_wave(
            Grid::new(64, 2.0 * std::f64::consts::PI).unwrap(),
            crate::elliptic::EllipticModulus::new(0.4).unwrap(),
        )
        .unwrap();
        let pair = WaveProfile::symmetric_pair(&ScalarWave {
            form: ScalarForm::Bo,
            ..scalar
        })
        .unwrap();
        let json = pair.to_json().unwrap();
        for key in ["system", "\"L\"", "\"c\"", "\"A1\"", "\"A2\"", "\"mu\"", "params", "grid"] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
