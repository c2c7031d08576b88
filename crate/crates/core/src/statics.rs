//! Leading-order estimation limits for a stationary perturbed eigenstate:
//! SLDs, the QFI matrix, Uhlmann curvature, the scalar bound `B = Tr[Q^-1]`
//! and the quantumness `R = ||i Q^-1 D||`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianOperator, StateVector, C64};
use crate::perturbation::{half_angle, overlaps, AngleDecomposition, FirstOrderCorrection, OverlapMatrix, PerturbationProblem};

/// Relative eigenvalue cutoff below which `Q` is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-10;
/// Absolute floor: a one-parameter `Q` has no scale to be relative to.
pub const SINGULAR_FLOOR: f64 = 1e-20;
/// Slack allowed above one before `R` is reported unclipped.
pub const R_SLACK: f64 = 1e-9;

/// Real symmetric QFI matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QfiMatrix(DMatrix<f64>);

impl QfiMatrix {
    /// Symmetrizes the input.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "QFI matrix" });
        }
        Ok(Self((&m + m.transpose()) * 0.5))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[(mu, nu)]
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.0.clone()).eigenvalues.iter().cloned().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Number of eigenvalues above the cutoff.
    pub fn rank(&self) -> usize {
        numerical_rank(&self.eigenvalues())
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        let eig = SymmetricEigen::new(self.0.clone());
        let rank = numerical_rank(eig.eigenvalues.as_slice());
        if rank < self.dim() {
            return Err(Error::SingularQfim { rank, dim: self.dim() });
        }
        let inv_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x));
        Ok(&eig.eigenvectors * inv_diag * eig.eigenvectors.transpose())
    }
}

fn numerical_rank(eigenvalues: &[f64]) -> usize {
    let max = eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = (SINGULAR_TOL * max).max(SINGULAR_FLOOR);
    eigenvalues.iter().filter(|&&x| x > cut).count()
}

/// Real antisymmetric Uhlmann curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct UhlmannMatrix(DMatrix<f64>);

impl UhlmannMatrix {
    /// Antisymmetrizes the input.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "Uhlmann matrix" });
        }
        Ok(Self((&m - m.transpose()) * 0.5))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[(mu, nu)]
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

#[derive(Clone, Debug)]
pub struct EstimationReport {
    pub qfim: QfiMatrix,
    pub uhlmann: UhlmannMatrix,
    /// `Tr[Q^-1]`, or `+inf` when `Q` is singular.
    pub bound_b: f64,
    /// `None` when `Q` is singular.
    pub quantumness_r: Option<f64>,
    pub slds: Option<Vec<HermitianOperator>>,
}

impl EstimationReport {
    /// Never fails on a singular `Q`; the singularity is recorded in `bound_b`.
    pub fn from_matrices(qfim: QfiMatrix, uhlmann: UhlmannMatrix) -> Self {
        let bound_b = bound_b(&qfim).unwrap_or(f64::INFINITY);
        let quantumness_r = quantumness_r(&qfim, &uhlmann).ok();
        Self {
            qfim,
            uhlmann,
            bound_b,
            quantumness_r,
            slds: None,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.bound_b.is_infinite()
    }

    /// Turns a singular report into [`Error::SingularQfim`].
    pub fn checked(self) -> Result<Self> {
        if self.is_singular() {
            return Err(Error::SingularQfim {
                rank: self.qfim.rank(),
                dim: self.qfim.dim(),
            });
        }
        Ok(self)
    }
}

/// `Q = 4N`
pub fn qfi_single(c: &FirstOrderCorrection) -> f64 {
    4.0 * c.squared_norm()
}

/// `L = 2 sqrt(N) [|psi0><phi| + |phi><psi0| + 2 lambda sqrt(N) |phi><phi|]`
pub fn sld_single(c: &FirstOrderCorrection, lambda: f64) -> Result<HermitianOperator> {
    let phi = c.direction().ok_or(Error::ZeroCorrection { index: 0 })?;
    let psi0 = c.unperturbed();
    let sn = c.squared_norm().sqrt();
    let m = (psi0.outer(phi) + phi.outer(psi0) + phi.outer(phi).scale(2.0 * lambda * sn)).scale(2.0 * sn);
    HermitianOperator::hermitian_part(&m)
}

/// `L = 2 (|d psi><psi| + |psi><d psi|)` for a pure-state family.
pub fn pure_state_sld(psi: &StateVector, dpsi: &StateVector) -> Result<HermitianOperator> {
    if psi.dim() != dpsi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: dpsi.dim(),
        });
    }
    HermitianOperator::hermitian_part(&(dpsi.outer(psi) + psi.outer(dpsi)).scale(2.0))
}

fn gram(corrections: &[FirstOrderCorrection]) -> Result<ComplexMatrix> {
    let p = corrections.len();
    let mut g = ComplexMatrix::zeros(p, p);
    for mu in 0..p {
        for nu in 0..p {
            g[(mu, nu)] = corrections[mu].raw().inner(corrections[nu].raw())?;
        }
    }
    Ok(g)
}

/// `Q_{mu nu} = 4 sqrt(N_mu N_nu) Re omega_{mu nu}`, evaluated as the real
/// part of the Gram matrix of the raw corrections.
pub fn qfim_static(corrections: &[FirstOrderCorrection]) -> Result<QfiMatrix> {
    if corrections.is_empty() {
        return Err(Error::NoPerturbations);
    }
    QfiMatrix::new(gram(corrections)?.map(|z| 4.0 * z.re))
}

/// `D_{mu nu} = 4 sqrt(N_mu N_nu) Im omega_{mu nu}`
pub fn uhlmann_static(corrections: &[FirstOrderCorrection]) -> Result<UhlmannMatrix> {
    if corrections.is_empty() {
        return Err(Error::NoPerturbations);
    }
    UhlmannMatrix::new(gram(corrections)?.map(|z| 4.0 * z.im))
}

/// `B = Tr[Q^-1]`
pub fn bound_b(q: &QfiMatrix) -> Result<f64> {
    Ok(q.inverse()?.trace())
}

fn clip_r(r: f64) -> f64 {
    if r > 1.0 && r <= 1.0 + R_SLACK {
        1.0
    } else {
        r
    }
}

/// Quantumness. Two parameters use `sqrt(det D / det Q)`; larger models use
/// [`quantumness_r_general`].
pub fn quantumness_r(q: &QfiMatrix, d: &UhlmannMatrix) -> Result<f64> {
    if q.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: d.dim(),
        });
    }
    match q.dim() {
        1 => {
            q.inverse()?;
            Ok(0.0)
        }
        2 => {
            q.inverse()?;
            let det_q = q.matrix().determinant();
            let det_d = d.get(0, 1) * d.get(0, 1);
            Ok(clip_r((det_d / det_q).sqrt()))
        }
        _ => quantumness_r_general(q, d),
    }
}

/// Largest absolute eigenvalue of `i Q^-1 D`, computed from the hermitian
/// matrix `Q^-1/2 (iD) Q^-1/2` that shares its spectrum.
pub fn quantumness_r_general(q: &QfiMatrix, d: &UhlmannMatrix) -> Result<f64> {
    q.inverse()?;
    let eig = SymmetricEigen::new(q.matrix().clone());
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()))
        * eig.eigenvectors.transpose();
    let inv_sqrt_c = inv_sqrt.map(|x| C64::new(x, 0.0));
    let id = d.matrix().map(|x| C64::new(0.0, x));
    let m = &inv_sqrt_c * id * &inv_sqrt_c;
    let spec = hermitian_eig(&HermitianOperator::hermitian_part(&m)?)?;
    let r = spec.eigenvalues().iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(clip_r(r))
}

/// Explicit two-parameter SLDs on the basis `{|psi0>, |j>, |k>}` embedded in the
/// full space. Returns `(L1, L2)`.
pub fn sld_two_param_explicit(
    dec: &AngleDecomposition,
    n1: f64,
    n2: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<(HermitianOperator, HermitianOperator)> {
    let (c1, s1) = half_angle(dec.theta1);
    let (c2, s2) = half_angle(dec.theta2);
    let (g, f) = (dec.gamma, dec.varphi);
    let r1 = n1.sqrt();
    let r2 = n2.sqrt();
    let r12 = (n1 * n2).sqrt();
    let re = |x: f64| C64::new(x, 0.0);
    let e = |phase: f64| C64::from_polar(1.0, phase);

    let cross = e(-(g + f)) * (c1 * s2) + e(g) * (c2 * s1);

    let mut a = ComplexMatrix::zeros(3, 3);
    a[(1, 1)] = re(4.0 * (lambda1 * n1 * c1 * c1 + lambda2 * r12 * c1 * c2 * g.cos()));
    a[(2, 2)] = re(4.0 * (lambda1 * n1 * s1 * s1 + lambda2 * r12 * s1 * s2 * (g + f).cos()));
    a[(0, 1)] = re(2.0 * r1 * c1);
    a[(1, 0)] = a[(0, 1)];
    a[(0, 2)] = re(2.0 * r1 * s1);
    a[(2, 0)] = a[(0, 2)];
    a[(1, 2)] = re(4.0 * lambda1 * n1 * c1 * s1) + cross * (2.0 * lambda2 * r12);
    a[(2, 1)] = a[(1, 2)].conj();

    let mut b = ComplexMatrix::zeros(3, 3);
    b[(1, 1)] = re(4.0 * (lambda2 * n2 * c2 * c2 + lambda1 * r12 * c1 * c2 * g.cos()));
    b[(2, 2)] = re(4.0 * (lambda2 * n2 * s2 * s2 + lambda1 * r12 * s1 * s2 * (g + f).cos()));
    b[(0, 1)] = e(-g) * (2.0 * r2 * c2);
    b[(1, 0)] = b[(0, 1)].conj();
    b[(0, 2)] = e(-(g + f)) * (2.0 * r2 * s2);
    b[(2, 0)] = b[(0, 2)].conj();
    b[(1, 2)] = e(-f) * (4.0 * lambda2 * n2 * c2 * s2) + cross * (2.0 * lambda1 * r12);
    b[(2, 1)] = b[(1, 2)].conj();

    let basis = [&dec.unperturbed, &dec.basis_j, &dec.basis_k];
    let embed = |m: &ComplexMatrix| -> Result<HermitianOperator> {
        let dim = dec.unperturbed.dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for r in 0..3 {
            for c in 0..3 {
                if m[(r, c)] != C64::new(0.0, 0.0) {
                    out += basis[r].outer(basis[c]) * m[(r, c)];
                }
            }
        }
        HermitianOperator::hermitian_part(&out)
    };
    Ok((embed(&a)?, embed(&b)?))
}

/// Everything the static scheme reports for one problem.
#[derive(Clone, Debug)]
pub struct StaticAnalysis {
    pub corrections: Vec<FirstOrderCorrection>,
    /// `None` if some correction vanishes.
    pub overlaps: Option<OverlapMatrix>,
    pub report: EstimationReport,
}

impl StaticAnalysis {
    pub fn squared_norms(&self) -> Vec<f64> {
        self.corrections.iter().map(|c| c.squared_norm()).collect()
    }
}

/// Leading-order static report; SLDs are given at `lambda = 0`.
pub fn analyze_static(p: &PerturbationProblem) -> Result<StaticAnalysis> {
    let corrections = p.corrections()?;
    let qfim = qfim_static(&corrections)?;
    let uhlmann = uhlmann_static(&corrections)?;
    let psi0 = p.unperturbed_state();
    let slds = corrections
        .iter()
        .map(|c| pure_state_sld(&psi0, c.raw()))
        .collect::<Result<Vec<_>>>()?;
    let mut report = EstimationReport::from_matrices(qfim, uhlmann);
    report.slds = Some(slds);
    let overlaps = overlaps(&corrections).ok();
    Ok(StaticAnalysis {
        corrections,
        overlaps,
        report,
    })
}
