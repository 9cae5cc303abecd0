//! The four coupled dispersive systems: nonlinearity data and dispersion
//! symbol selection.

use serde::{Deserialize, Serialize};

use crate::symbols::{SymbolKind, SymbolMatrix};

/// Which coupled system is being studied.
///
/// All four fit `u_t + (grad R(u) - M u)_x = 0` for a 2x2 symmetric
/// Fourier-multiplier `M` and a smooth `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "kebab-case")]
pub enum SystemKind {
    /// Coupled KdV: cubic polynomial `R` with coefficients `B1..B4`,
    /// dispersion -d^2/dx^2 in each component.
    Kdv { b: [f64; 4] },
    /// Coupled modified KdV: quartic `R` with coefficients `D1..D5`.
    Mkdv { d: [f64; 5] },
    /// Logarithmically coupled KdV.
    LogKdv,
    /// Liu-Kubota-Ko internal-wave system; `w` is the reciprocal layer
    /// depth (w = 0 is the Benjamin-Ono deep-water limit).
    Lkk { w: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
}

impl SystemSpec {
    pub fn new(kind: SystemKind) -> Self {
        SystemSpec { kind }
    }

    pub fn kdv(b: [f64; 4]) -> Self {
        Self::new(SystemKind::Kdv { b })
    }

    pub fn mkdv(d: [f64; 5]) -> Self {
        Self::new(SystemKind::Mkdv { d })
    }

    pub fn log_kdv() -> Self {
        Self::new(SystemKind::LogKdv)
    }

    pub fn lkk(w: f64) -> Self {
        Self::new(SystemKind::Lkk { w })
    }

    /// Sobolev growth exponent `s` of the dispersion symbol; the energy
    /// space is `H^{s/2} x H^{s/2}`.
    pub fn sobolev_index(&self) -> f64 {
        match self.kind {
            SystemKind::Kdv { .. } | SystemKind::Mkdv { .. } | SystemKind::LogKdv => 2.0,
            SystemKind::Lkk { .. } => 1.0,
        }
    }

    /// Dispersion symbol evaluator on a grid of period `length`.
    pub fn symbol(&self, length: f64) -> SymbolMatrix {
        let kind = match self.kind {
            SystemKind::Kdv { .. } | SystemKind::Mkdv { .. } | SystemKind::LogKdv => {
                SymbolKind::Laplacian
            }
            SystemKind::Lkk { w } => SymbolKind::Lkk { w },
        };
        SymbolMatrix::new(kind, length)
    }

    /// Nonlinear potential R(u1, u2).
    pub fn r(&self, u1: f64, u2: f64) -> f64 {
        match &self.kind {
            SystemKind::Kdv { b } => {
                b[0] / 3.0 * u1.powi(3)
                    + b[1] / 2.0 * u1 * u1 * u2
                    + b[2] * u1 * u2 * u2
                    + b[3] / 3.0 * u2.powi(3)
            }
            SystemKind::Mkdv { d } => {
                d[0] / 4.0 * u1.powi(4)
                    + d[1] / 3.0 * u1.powi(3) * u2
                    + d[2] / 2.0 * u1 * u1 * u2 * u2
                    + d[3] * u1 * u2.powi(3)
                    + d[4] / 4.0 * u2.powi(4)
            }
            SystemKind::LogKdv => 0.5 * u1 * u2 * (u1 * u1 * u2 * u2).ln() - u1 * u2,
            SystemKind::Lkk { .. } => (u1.powi(3) + u2.powi(3)) / 6.0,
        }
    }

    /// Gradient of R.
    pub fn grad_r(&self, u1: f64, u2: f64) -> (f64, f64) {
        match &self.kind {
            SystemKind::Kdv { b } => (
                b[0] * u1 * u1 + b[1] * u1 * u2 + b[2] * u2 * u2,
                0.5 * b[1] * u1 * u1 + 2.0 * b[2] * u1 * u2 + b[3] * u2 * u2,
            ),
            SystemKind::Mkdv { d } => (
                d[0] * u1.powi(3)
                    + d[1] * u1 * u1 * u2
                    + d[2] * u1 * u2 * u2
                    + d[3] * u2.powi(3),
                d[1] / 3.0 * u1.powi(3)
                    + d[2] * u1 * u1 * u2
                    + 3.0 * d[3] * u1 * u2 * u2
                    + d[4] * u2.powi(3),
            ),
            SystemKind::LogKdv => {
                let log_sq = (u1 * u1 * u2 * u2).ln();
                (0.5 * u2 * log_sq, 0.5 * u1 * log_sq)
            }
            SystemKind::Lkk { .. } => (0.5 * u1 * u1, 0.5 * u2 * u2),
        }
    }

    /// Hessian of R, symmetric 2x2.
    pub fn hess_r(&self, u1: f64, u2: f64) -> [[f64; 2]; 2] {
        match &self.kind {
            SystemKind::Kdv { b } => {
                let off = b[1] * u1 + 2.0 * b[2] * u2;
                [[2.0 * b[0] * u1 + b[1] * u2, off], [off, 2.0 * b[2] * u1 + 2.0 * b[3] * u2]]
            }
            SystemKind::Mkdv { d } => {
                let off = d[1] * u1 * u1 + 2.0 * d[2] * u1 * u2 + 3.0 * d[3] * u2 * u2;
                [
                    [3.0 * d[0] * u1 * u1 + 2.0 * d[1] * u1 * u2 + d[2] * u2 * u2, off],
                    [off, d[2] * u1 * u1 + 6.0 * d[3] * u1 * u2 + 3.0 * d[4] * u2 * u2],
                ]
            }
            SystemKind::LogKdv => {
                let off = 0.5 * (u1 * u1 * u2 * u2).ln() + 1.0;
                [[u2 / u1, off], [off, u1 / u2]]
            }
            SystemKind::Lkk { .. } => [[u1, 0.0], [0.0, u2]],
        }
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            SystemKind::Kdv { .. } => "kdv",
            SystemKind::Mkdv { .. } => "mkdv",
            SystemKind::LogKdv => "logkdv",
            SystemKind::Lkk { .. } => "lkk",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// grad R by finite differences of R, Hessian by finite differences of
    /// grad R; catches transcription slips in the closed forms.
    #[test]
    fn gradient_and_hessian_consistent_with_r() {
        let systems = [
            SystemSpec::kdv([1.0, -0.7, 0.3, 2.0]),
            SystemSpec::mkdv([0.9, 0.4, -1.1, 0.2, 1.3]),
            SystemSpec::log_kdv(),
            SystemSpec::lkk(0.1),
        ];
        let h = 1e-6;
        for sys in &systems {
            for &(u1, u2) in &[(1.3, 0.9), (2.0, 1.7), (0.8, 1.1)] {
                let (g1, g2) = sys.grad_r(u1, u2);
                let fd1 = (sys.r(u1 + h, u2) - sys.r(u1 - h, u2)) / (2.0 * h);
                let fd2 = (sys.r(u1, u2 + h) - sys.r(u1, u2 - h)) / (2.0 * h);
                assert_abs_diff_eq!(g1, fd1, epsilon = 1e-6);
                assert_abs_diff_eq!(g2, fd2, epsilon = 1e-6);

                let hess = sys.hess_r(u1, u2);
                let (gp1, _) = sys.grad_r(u1 + h, u2);
                let (gm1, _) = sys.grad_r(u1 - h, u2);
                let (gp2, gq2) = sys.grad_r(u1, u2 + h);
                let (gm2, gq2m) = sys.grad_r(u1, u2 - h);
                assert_abs_diff_eq!(hess[0][0], (gp1 - gm1) / (2.0 * h), epsilon = 1e-5);
                assert_abs_diff_eq!(hess[0][1], (gp2 - gm2) / (2.0 * h), epsilon = 1e-5);
                assert_abs_diff_eq!(hess[1][1], (gq2 - gq2m) / (2.0 * h), epsilon = 1e-5);
            }
        }
    }
}
