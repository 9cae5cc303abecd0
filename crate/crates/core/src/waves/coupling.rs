//! Proportionality constants for coupled waves: the coupling relation, its
//! real roots, and the reduced 2x2 coupling matrix with its eigenstructure.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residual bound for an accepted root, relative to the polynomial scale.
const ROOT_RESIDUAL_TOL: f64 = 1e-10;
/// Roots closer than this are merged.
const ROOT_DEDUP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    Kdv,
    Mkdv,
}

/// Nonlinearity coefficients entering the coupling relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingCoeffs {
    Kdv([f64; 4]),
    Mkdv([f64; 5]),
}

impl CouplingCoeffs {
    pub fn kind(&self) -> CouplingKind {
        match self {
            CouplingCoeffs::Kdv(_) => CouplingKind::Kdv,
            CouplingCoeffs::Mkdv(_) => CouplingKind::Mkdv,
        }
    }

    /// Ascending coefficients of the polynomial whose real roots are the
    /// admissible proportionality constants mu.
    ///
    /// Kdv: mu (B1 + B2 mu + B3 mu^2) = B2/2 + 2 B3 mu + B4 mu^2.
    /// Mkdv: mu (D1 + D2 mu + D3 mu^2 + D4 mu^3)
    ///       = D2/3 + D3 mu + 3 D4 mu^2 + D5 mu^3.
    fn polynomial(&self) -> Vec<f64> {
        match self {
            CouplingCoeffs::Kdv([b1, b2, b3, b4]) => {
                vec![-b2 / 2.0, b1 - 2.0 * b3, b2 - b4, *b3]
            }
            CouplingCoeffs::Mkdv([d1, d2, d3, d4, d5]) => {
                vec![-d2 / 3.0, d1 - d3, d2 - 3.0 * d4, d3 - d5, *d4]
            }
        }
    }
}

/// Real roots of the coupling relation, or the sentinel for an identically
/// satisfied (degenerate) relation.
#[derive(Debug, Clone, PartialEq)]
pub enum MuRoots {
    /// Every mu satisfies the relation.
    All,
    Roots(Vec<f64>),
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_deriv(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

/// All real roots of a low-degree real polynomial: companion-matrix
/// eigenvalues followed by a Newton polish, deduplicated.
fn real_roots(mut coeffs: Vec<f64>) -> MuRoots {
    let scale = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return MuRoots::All;
    }
    // Strip numerically vanishing leading coefficients.
    while coeffs.len() > 1 && coeffs.last().unwrap().abs() < 1e-14 * scale {
        coeffs.pop();
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return MuRoots::Roots(Vec::new());
    }

    let lead = coeffs[degree];
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[i] / lead;
    }
    let eigen = companion.complex_eigenvalues();

    let deriv = poly_deriv(&coeffs);
    let mut roots: Vec<f64> = Vec::new();
    for lambda in eigen.iter() {
        if lambda.im.abs() > 1e-8 * (1.0 + lambda.norm()) {
            continue;
        }
        // Newton polish on the real axis.
        let mut x = lambda.re;
        for _ in 0..8 {
            let f = poly_eval(&coeffs, x);
            let df = poly_eval(&deriv, x);
            if df == 0.0 {
                break;
            }
            let step = f / df;
            x -= step;
            if step.abs() < 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
        let local_scale: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() * x.abs().max(1.0).powi(i as i32))
            .sum();
        if poly_eval(&coeffs, x).abs() > ROOT_RESIDUAL_TOL * local_scale {
            continue;
        }
        if !roots.iter().any(|r| (r - x).abs() < ROOT_DEDUP_TOL * (1.0 + x.abs())) {
            roots.push(x);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    MuRoots::Roots(roots)
}

/// Real solutions mu of the coupling relation for the given coefficients.
pub fn solve_coupling_cubic(coeffs: &CouplingCoeffs) -> Result<MuRoots> {
    let all_zero = match coeffs {
        CouplingCoeffs::Kdv(b) => b.iter().all(|&v| v == 0.0),
        CouplingCoeffs::Mkdv(d) => d.iter().all(|&v| v == 0.0),
    };
    if all_zero {
        return Err(Error::domain("coupling coefficients must not all vanish"));
    }
    Ok(real_roots(coeffs.polynomial()))
}

/// The reduction of the coupled system at a proportional wave: the scale of
/// the change of variables and the symmetric coupling matrix whose
/// eigenvalues control the linearized operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReduction {
    pub kind: CouplingKind,
    pub mu: f64,
    /// xi = 2(B1 + B2 mu + B3 mu^2) or zeta = 3(D1 + D2 mu + D3 mu^2 + D4 mu^3).
    pub scale: f64,
    /// D or H, symmetric.
    pub matrix: [[f64; 2]; 2],
    pub det: f64,
}

pub fn build_coupling_reduction(coeffs: &CouplingCoeffs, mu: f64) -> Result<CouplingReduction> {
    match coeffs {
        CouplingCoeffs::Kdv([b1, b2, b3, b4]) => {
            let xi = 2.0 * (b1 + b2 * mu + b3 * mu * mu);
            if xi.abs() < 1e-14 {
                return Err(Error::Degenerate(format!(
                    "kdv reduction scale xi = {xi} vanishes at mu = {mu}"
                )));
            }
            let off = b2 + 2.0 * mu * b3;
            let m = [
                [(2.0 * b1 + mu * b2) / xi, off / xi],
                [off / xi, (2.0 * b3 + 2.0 * mu * b4) / xi],
            ];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            Ok(CouplingReduction { kind: CouplingKind::Kdv, mu, scale: xi, matrix: m, det })
        }
        CouplingCoeffs::Mkdv([d1, d2, d3, d4, d5]) => {
            let zeta = 3.0 * (d1 + d2 * mu + d3 * mu * mu + d4 * mu * mu * mu);
            if zeta <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "mkdv reduction requires zeta > 0, got {zeta} at mu = {mu}"
                )));
            }
            let off = d2 + 2.0 * mu * d3 + 3.0 * mu * mu * d4;
            let m = [
                [(3.0 * d1 + 2.0 * mu * d2 + mu * mu * d3) / zeta, off / zeta],
                [off / zeta, (d3 + 6.0 * mu * d4 + 3.0 * mu * mu * d5) / zeta],
            ];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            Ok(CouplingReduction { kind: CouplingKind::Mkdv, mu, scale: zeta, matrix: m, det })
        }
    }
}

/// Eigenstructure of the coupling matrix. For a valid reduction the
/// eigenvalues are exactly {1, det}; the basis columns are normalized
/// eigenvectors forming an orthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingEigen {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Columns are the eigenvectors of lambda1 and lambda2.
    pub basis: [[f64; 2]; 2],
}

pub fn eigen_coupling(reduction: &CouplingReduction) -> CouplingEigen {
    let [[a, b], [_, d]] = reduction.matrix;
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let lam_hi = 0.5 * (tr + disc);
    let lam_lo = 0.5 * (tr - disc);

    let eigvec = |lam: f64| -> [f64; 2] {
        // Pick the numerically larger residual row formulation.
        let v1 = [b, lam - a];
        let v2 = [lam - d, b];
        let n1 = (v1[0] * v1[0] + v1[1] * v1[1]).sqrt();
        let n2 = (v2[0] * v2[0] + v2[1] * v2[1]).sqrt();
        let v = if n1 >= n2 { [v1[0] / n1, v1[1] / n1] } else { [v2[0] / n2, v2[1] / n2] };
        v
    };

    let (lambda1, lambda2) = if (lam_hi - 1.0).abs() <= (lam_lo - 1.0).abs() {
        (lam_hi, lam_lo)
    } else {
        (lam_lo, lam_hi)
    };

    if disc < 1e-14 * (1.0 + tr.abs()) {
        // Degenerate pair: any orthonormal basis diagonalizes.
        return CouplingEigen { lambda1, lambda2, basis: [[1.0, 0.0], [0.0, 1.0]] };
    }

    let mut v1 = eigvec(lambda1);
    // Orient the first eigenvector toward positive first component, the
    // second perpendicular with a right-handed basis.
    if v1[0] < 0.0 || (v1[0] == 0.0 && v1[1] < 0.0) {
        v1 = [-v1[0], -v1[1]];
    }
    let v2 = [-v1[1], v1[0]];
    CouplingEigen { lambda1, lambda2, basis: [[v1[0], v2[0]], [v1[1], v2[1]]] }
}

/// The 45-degree rotation diagonalizing equal-diagonal coupling matrices;
/// this is the `basis` produced for the logarithmic and nonlocal systems
/// where the proportional pair is (phi, phi).
pub fn symmetric_pair_basis() -> [[f64; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[s, -s], [s, s]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kdv_identity_quadratic_case() {
        // mu = mu^2 has roots {0, 1}.
        let roots = solve_coupling_cubic(&CouplingCoeffs::Kdv([1.0, 0.0, 0.0, 1.0])).unwrap();
        match roots {
            MuRoots::Roots(r) => {
                assert_eq!(r.len(), 2);
                assert_abs_diff_eq!(r[0], 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(r[1], 1.0, epsilon = 1e-12);
            }
            MuRoots::All => panic!("not degenerate"),
        }
    }

    #[test]
    fn kdv_quadratic_formula_case() {
        // (1,1,0,0): mu^2 + mu - 1/2 = 0.
        let roots = solve_coupling_cubic(&CouplingCoeffs::Kdv([1.0, 1.0, 0.0, 0.0])).unwrap();
        let expected = [(-1.0 - 3.0_f64.sqrt()) / 2.0, (-1.0 + 3.0_f64.sqrt()) / 2.0];
        match roots {
            MuRoots::Roots(r) => {
                assert_eq!(r.len(), 2);
                assert_abs_diff_eq!(r[0], expected[0], epsilon = 1e-12);
                assert_abs_diff_eq!(r[1], expected[1], epsilon = 1e-12);
            }
            MuRoots::All => panic!("not degenerate"),
        }
    }

    #[test]
    fn mkdv_cubic_identity_case() {
        // mu = mu^3 has roots {-1, 0, 1}.
        let roots =
            solve_coupling_cubic(&CouplingCoeffs::Mkdv([1.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        match roots {
            MuRoots::Roots(r) => {
                assert_eq!(r.len(), 3);
                assert_abs_diff_eq!(r[0], -1.0, epsilon = 1e-10);
                assert_abs_diff_eq!(r[1], 0.0, epsilon = 1e-10);
                assert_abs_diff_eq!(r[2], 1.0, epsilon = 1e-10);
            }
            MuRoots::All => panic!("not degenerate"),
        }
    }

    #[test]
    fn degenerate_relation_yields_sentinel() {
        // B = (1, 0, 0, 0) with mu polynomial mu*1 = 0 -> root 0 only... use
        // a genuinely identically-zero relation instead: B2=B4=0, B1=2*B3
        // makes p(mu) = B3 mu^3 + ... check the truly-zero case (0,0,0,0)
        // errors, and an all-zero polynomial via crafted coefficients.
        assert!(solve_coupling_cubic(&CouplingCoeffs::Kdv([0.0; 4])).is_err());
        // Kdv(2,0,1,0) hmm -> p = [0, 2-2, 0-0, 1] not zero; build directly:
        let p = real_roots(vec![0.0, 0.0, 0.0, 0.0]);
        assert_eq!(p, MuRoots::All);
    }

    #[test]
    fn no_real_root_gives_empty_list() {
        // p(mu) = mu^2 + 1 via kdv coefficients: need B3=0, B2-B4 = 1,
        // B1-2B3 = 0, -B2/2 = 1 -> B2 = -2, B4 = -3, B1 = 0.
        let roots = solve_coupling_cubic(&CouplingCoeffs::Kdv([0.0, -2.0, 0.0, -3.0])).unwrap();
        assert_eq!(roots, MuRoots::Roots(vec![]));
    }

    #[test]
    fn decoupled_kdv_reduction_is_identity() {
        let coeffs = CouplingCoeffs::Kdv([1.0, 0.0, 0.0, 1.0]);
        let red = build_coupling_reduction(&coeffs, 1.0).unwrap();
        assert_abs_diff_eq!(red.scale, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix[0][0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix[1][1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix[0][1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(red.det, 1.0, epsilon = 1e-15);
        let eig = eigen_coupling(&red);
        assert_abs_diff_eq!(eig.lambda1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.lambda2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mkdv_pure_cubic_reduction_at_mu_zero() {
        // Hand evaluation of the matrix formula at (1,0,0,0,1), mu = 0:
        // zeta = 3, H = (1/3)[[3, 0], [0, 0]], det H = 0, eigenvalues {1, 0}.
        let coeffs = CouplingCoeffs::Mkdv([1.0, 0.0, 0.0, 0.0, 1.0]);
        let red = build_coupling_reduction(&coeffs, 0.0).unwrap();
        assert_abs_diff_eq!(red.scale, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix[0][0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix[1][1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(red.det, 0.0, epsilon = 1e-15);
        let eig = eigen_coupling(&red);
        assert_abs_diff_eq!(eig.lambda1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.lambda2, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mkdv_rejects_nonpositive_zeta() {
        let coeffs = CouplingCoeffs::Mkdv([-1.0, 0.0, 0.0, 0.0, -1.0]);
        assert!(build_coupling_reduction(&coeffs, 0.0).is_err());
    }

    #[test]
    fn kdv_rejects_zero_xi() {
        // xi = 2(B1 + B2 mu + B3 mu^2) = 0 at mu = -1 for B = (1,1,0,*).
        let coeffs = CouplingCoeffs::Kdv([1.0, 1.0, 0.0, 0.0]);
        assert!(build_coupling_reduction(&coeffs, -1.0).is_err());
    }

    #[test]
    fn coupling_eigenbasis_is_orthogonal_and_diagonalizes() {
        let coeffs = CouplingCoeffs::Kdv([1.0, 1.0, 0.0, 0.0]);
        let mu = (-1.0 + 3.0_f64.sqrt()) / 2.0;
        let red = build_coupling_reduction(&coeffs, mu).unwrap();
        let eig = eigen_coupling(&red);
        assert_abs_diff_eq!(eig.lambda1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.lambda2, red.det, epsilon = 1e-12);
        let o = eig.basis;
        // O^T O = Id.
        for i in 0..2 {
            for j in 0..2 {
                let dot = o[0][i] * o[0][j] + o[1][i] * o[1][j];
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expected, epsilon = 1e-12);
            }
        }
        // O^T M O diagonal with (lambda1, lambda2).
        let m = red.matrix;
        let mut diag = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for p in 0..2 {
                    for q in 0..2 {
                        acc += o[p][i] * m[p][q] * o[q][j];
                    }
                }
                diag[i][j] = acc;
            }
        }
        assert_abs_diff_eq!(diag[0][0], eig.lambda1, epsilon = 1e-12);
        assert_abs_diff_eq!(diag[1][1], eig.lambda2, epsilon = 1e-12);
        assert_abs_diff_eq!(diag[0][1], 0.0, epsilon = 1e-12);
        // The unit-eigenvalue eigenvector is parallel to (1, mu).
        let norm = (1.0 + mu * mu).sqrt();
        assert_abs_diff_eq!(o[0][0], 1.0 / norm, epsilon = 1e-10);
        assert_abs_diff_eq!(o[1][0], mu / norm, epsilon = 1e-10);
    }
}
