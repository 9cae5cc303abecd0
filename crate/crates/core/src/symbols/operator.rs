//! Dense collocation assembly of the linearized operator
//! L = M + c Id - Hess R(phi) around a traveling wave, and its reduction
//! to scalar blocks along the coupling eigenbasis.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::Grid;
use crate::system::{SystemKind, SystemSpec};
use crate::waves::coupling::{eigen_coupling, symmetric_pair_basis, CouplingReduction};
use crate::waves::WaveProfile;

/// Dense real-symmetric 2N x 2N collocation matrix of the linearized
/// operator, ordered as the two field components stacked.
#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    pub matrix: DMatrix<f64>,
    pub grid: Grid,
    pub system: SystemSpec,
    pub speed: f64,
}

impl LinearizedOperator {
    pub fn n(&self) -> usize {
        self.grid.len()
    }

    /// Apply to a stacked pair vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n2 = 2 * self.n();
        debug_assert_eq!(v.len(), n2);
        let mut out = vec![0.0; n2];
        for i in 0..n2 {
            let mut acc = 0.0;
            for j in 0..n2 {
                acc += self.matrix[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Quadratic form <L v, v> under the discrete L^2 pairing.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let lv = self.apply(v);
        lv.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() * self.grid.step()
    }

    /// Relative symmetry defect of the assembled matrix.
    pub fn symmetry_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut num = 0.0_f64;
        let mut den = 0.0_f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                num += (m[(i, j)] - m[(j, i)]).powi(2);
                den += m[(i, j)].powi(2);
            }
        }
        (num / den.max(1e-300)).sqrt()
    }

    /// Row-major CSV dump with a descriptive header comment.
    pub fn to_csv(&self) -> String {
        let n2 = 2 * self.n();
        let mut out = format!(
            "# linearized operator: n={} L={:.16e} system={} speed={:.16e} rows={}\n",
            self.n(),
            self.grid.period(),
            self.system.tag(),
            self.speed,
            n2
        );
        for i in 0..n2 {
            let row: Vec<String> =
                (0..n2).map(|j| format!("{:.16e}", self.matrix[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Fill the dense circulant realizing an even real multiplier.
fn circulant(grid: &Grid, symbol: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let n = grid.len();
    let col = fourier::circulant_column(grid, symbol);
    DMatrix::from_fn(n, n, |a, b| col[(a + n - b) % n])
}

/// Assemble L = M + c Id - Hess R(phi) for the wave and system.
///
/// The multiplier blocks are realized as real circulants (conjugation of
/// the diagonal symbol by the DFT), the potential blocks are diagonal in
/// physical space.
pub fn assemble_operator(
    wave: &WaveProfile,
    system: &SystemSpec,
) -> Result<LinearizedOperator> {
    if wave.params.system_tag() != system.tag() {
        return Err(Error::Construction(format!(
            "wave built for system '{}' cannot feed operator of system '{}'",
            wave.params.system_tag(),
            system.tag()
        )));
    }
    if let SystemKind::LogKdv = system.kind {
        let positive = wave
            .values
            .iter()
            .all(|component| component.iter().all(|&v| v > 0.0));
        if !positive {
            return Err(Error::domain(
                "logarithmic Hessian needs strictly positive profiles on the grid",
            ));
        }
    }

    let grid = wave.grid;
    let n = grid.len();
    let sym = system.symbol(grid.period());
    let t11 = circulant(&grid, |xi| sym.entries(xi)[0][0]);
    let t12 = circulant(&grid, |xi| sym.entries(xi)[0][1]);
    let t22 = circulant(&grid, |xi| sym.entries(xi)[1][1]);

    let mut matrix = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            matrix[(i, j)] = t11[(i, j)];
            matrix[(i, j + n)] = t12[(i, j)];
            matrix[(i + n, j)] = t12[(i, j)];
            matrix[(i + n, j + n)] = t22[(i, j)];
        }
    }
    for i in 0..n {
        let hess = system.hess_r(wave.values[0][i], wave.values[1][i]);
        matrix[(i, i)] += wave.speed - hess[0][0];
        matrix[(i, i + n)] -= hess[0][1];
        matrix[(i + n, i)] -= hess[1][0];
        matrix[(i + n, i + n)] += wave.speed - hess[1][1];
    }

    Ok(LinearizedOperator { matrix, grid, system: system.clone(), speed: wave.speed })
}

/// Conjugate the operator by the coupling eigenbasis and return the two
/// scalar N x N blocks; errors if the conjugated matrix is not block
/// diagonal to tolerance (the wave is not proportional).
///
/// For the proportional families the basis comes from the reduction; the
/// equal-pair families use the fixed 45-degree rotation.
pub fn diagonalize_operator(
    op: &LinearizedOperator,
    reduction: Option<&CouplingReduction>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let basis = match (&op.system.kind, reduction) {
        (SystemKind::Kdv { .. }, Some(red)) | (SystemKind::Mkdv { .. }, Some(red)) => {
            eigen_coupling(red).basis
        }
        (SystemKind::LogKdv, _) | (SystemKind::Lkk { .. }, _) => symmetric_pair_basis(),
        _ => {
            return Err(Error::Construction(
                "diagonalization needs the coupling reduction for polynomial systems".into(),
            ))
        }
    };

    let n = op.n();
    let block = |bi: usize, bj: usize| -> DMatrix<f64> {
        let mut out = DMatrix::<f64>::zeros(n, n);
        for p in 0..2 {
            for q in 0..2 {
                let weight = basis[p][bi] * basis[q][bj];
                if weight == 0.0 {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] += weight * op.matrix[(p * n + i, q * n + j)];
                    }
                }
            }
        }
        out
    };

    let b11 = block(0, 0);
    let b22 = block(1, 1);
    let b12 = block(0, 1);

    let off = b12.norm();
    let scale = b11.norm().max(b22.norm()).max(1e-300);
    if off / scale > 1e-8 {
        return Err(Error::Construction(format!(
            "operator is not block-diagonal in the coupling basis \
             (relative off-diagonal norm {:.3e}); wave is not proportional",
            off / scale
        )));
    }
    Ok((b11, b22))
}
