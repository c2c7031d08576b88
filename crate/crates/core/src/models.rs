//! Preset systems: a qubit with one or two couplings, a spin-1 qutrit with
//! two couplings and a harmonic oscillator with cubic and quartic
//! anharmonicities (natural units, `hbar = m = omega = 1`). Also the
//! closed-form reference values those systems are checked against.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, StateVector, C64};
use crate::perturbation::PerturbationProblem;

pub const DEFAULT_FOCK_DIM: usize = 16;
/// Corrections reach Fock level 4 and `K_2^2` on the vacuum reaches level 8.
pub const MIN_FOCK_DIM: usize = 8;
/// Levels this close to the Fock cutoff are not trusted for dynamics.
pub const TRUNCATION_MARGIN: usize = 4;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn op(dim: usize, entries: &[C64]) -> HermitianOperator {
    HermitianOperator::new(ComplexMatrix::from_row_slice(dim, dim, entries)).expect("preset operator is hermitian")
}

pub fn sigma_x() -> HermitianOperator {
    op(2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> HermitianOperator {
    op(2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

/// `|0>` is the first basis vector, eigenvalue `+1`.
pub fn sigma_z() -> HermitianOperator {
    op(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Spin-1 matrices in the `S_z` basis ordered `m = +1, 0, -1`.
pub fn spin1_x() -> HermitianOperator {
    let r = 1.0 / SQRT_2;
    let z = c(0.0, 0.0);
    op(3, &[z, c(r, 0.0), z, c(r, 0.0), z, c(r, 0.0), z, c(r, 0.0), z])
}

pub fn spin1_y() -> HermitianOperator {
    let r = 1.0 / SQRT_2;
    let z = c(0.0, 0.0);
    op(3, &[z, c(0.0, -r), z, c(0.0, r), z, c(0.0, -r), z, c(0.0, r), z])
}

pub fn spin1_z() -> HermitianOperator {
    let z = c(0.0, 0.0);
    op(3, &[c(1.0, 0.0), z, z, z, z, z, z, z, c(-1.0, 0.0)])
}

/// Truncated annihilation operator, `a|n> = sqrt(n)|n-1>`.
pub fn annihilation(dim: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

/// `a^dag a + 1/2`
pub fn harmonic_h0(dim: usize) -> HermitianOperator {
    HermitianOperator::new(DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| {
        c(n as f64 + 0.5, 0.0)
    })))
    .expect("diagonal real matrix")
}

/// `x^power` with `x = (a + a^dag)/sqrt(2)`, projected onto the first `dim`
/// Fock levels. Built in a padded space so every kept element is exact.
pub fn position_power(power: usize, dim: usize) -> HermitianOperator {
    let big = dim + power;
    let a = annihilation(big);
    let x = (&a + a.adjoint()).scale(1.0 / SQRT_2);
    let mut acc = ComplexMatrix::identity(big, big);
    for _ in 0..power {
        acc = &acc * &x;
    }
    HermitianOperator::hermitian_part(&acc.view((0, 0), (dim, dim)).into_owned()).expect("finite")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// `sigma_z + lambda sigma_x`
    Qubit1Param,
    /// `sigma_z + lambda1 sigma_x + lambda2 (cos a sigma_x + sin a sigma_y)`
    Qubit2Param,
    /// `S_z + lambda1 S_x + lambda2 (cos a S_x + sin a S_y)`
    Qutrit2Param,
    /// `(p^2 + x^2)/2 + eps1 x^3 + eps2 x^4`
    Anharmonic2Param,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub alpha: f64,
    pub fock_dim: usize,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            alpha: 0.0,
            fock_dim: DEFAULT_FOCK_DIM,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_fock_dim(mut self, fock_dim: usize) -> Self {
        self.fock_dim = fock_dim;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha must be finite, got {}", self.alpha)));
        }
        if self.kind == ModelKind::Anharmonic2Param && self.fock_dim < MIN_FOCK_DIM {
            return Err(Error::InvalidArgument(format!(
                "fock_dim must be at least {MIN_FOCK_DIM}, got {}",
                self.fock_dim
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ModelKind::Qubit1Param | ModelKind::Qubit2Param => 2,
            ModelKind::Qutrit2Param => 3,
            ModelKind::Anharmonic2Param => self.fock_dim,
        }
    }

    /// Number of low-lying levels whose matrix elements are free of truncation effects.
    pub fn trusted_levels(&self) -> usize {
        match self.kind {
            ModelKind::Anharmonic2Param => self.fock_dim.saturating_sub(TRUNCATION_MARGIN),
            _ => self.dim(),
        }
    }

    /// Computational-basis index of the perturbed eigenstate: `|0>` for the
    /// qubit, `|1,0>` for the qutrit, the vacuum for the oscillator.
    pub fn reference_basis_index(&self) -> usize {
        match self.kind {
            ModelKind::Qubit1Param | ModelKind::Qubit2Param => 0,
            ModelKind::Qutrit2Param => 1,
            ModelKind::Anharmonic2Param => 0,
        }
    }

    /// Default probe for the dynamical scheme. For the qubit it is
    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`; the other models start
    /// in their reference eigenstate and ignore the angles.
    pub fn probe_state(&self, theta: f64, phi: f64) -> Result<StateVector> {
        match self.kind {
            ModelKind::Qubit1Param | ModelKind::Qubit2Param => StateVector::from_slice(&[
                c((0.5 * theta).cos(), 0.0),
                C64::from_polar((0.5 * theta).sin(), phi),
            ]),
            _ => StateVector::basis(self.dim(), self.reference_basis_index()),
        }
    }
}

/// Index in the ascending spectrum of `h0` of the eigenvector closest to a basis vector.
fn level_of_basis_state(p_h0: &HermitianOperator, basis_index: usize) -> Result<usize> {
    let spec = crate::linalg::hermitian_eig(p_h0)?;
    let target = StateVector::basis(p_h0.dim(), basis_index)?;
    let mut best = (0, -1.0);
    for i in 0..spec.dim() {
        let w = spec.eigenvector(i)?.inner(&target)?.norm();
        if w > best.1 {
            best = (i, w);
        }
    }
    Ok(best.0)
}

pub fn build(spec: &ModelSpec) -> Result<PerturbationProblem> {
    spec.validate()?;
    let (ca, sa) = (spec.alpha.cos(), spec.alpha.sin());
    let (h0, perturbations) = match spec.kind {
        ModelKind::Qubit1Param => (sigma_z(), vec![sigma_x()]),
        ModelKind::Qubit2Param => {
            let h2 = sigma_x().scaled(ca).linear_combination(&[sa], &[sigma_y()])?;
            (sigma_z(), vec![sigma_x(), h2])
        }
        ModelKind::Qutrit2Param => {
            let h2 = spin1_x().scaled(ca).linear_combination(&[sa], &[spin1_y()])?;
            (spin1_z(), vec![spin1_x(), h2])
        }
        ModelKind::Anharmonic2Param => {
            let d = spec.fock_dim;
            (harmonic_h0(d), vec![position_power(3, d), position_power(4, d)])
        }
    };
    let level = level_of_basis_state(&h0, spec.reference_basis_index())?;
    PerturbationProblem::new(h0, perturbations, level)
}

/// `Q(t) = 4 sin^2 t [1 - cos^2(t + phi) sin^2 theta]` for the one-coupling qubit.
pub fn reference_qubit_dynamic_qfi(t: f64, theta: f64, phi: f64) -> f64 {
    let s = t.sin();
    let cp = (t + phi).cos();
    let st = theta.sin();
    4.0 * s * s * (1.0 - cp * cp * st * st)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoParamReference {
    pub q: [[f64; 2]; 2],
    pub b: f64,
    pub r: f64,
}

/// Static qutrit: `Q = 4 [[1, cos a], [cos a, 1]]`, `B = csc^2(a)/2`, `R = 0`.
pub fn reference_qutrit_static(alpha: f64) -> TwoParamReference {
    let ca = alpha.cos();
    let sa = alpha.sin();
    TwoParamReference {
        q: [[4.0, 4.0 * ca], [4.0 * ca, 4.0]],
        b: 1.0 / (2.0 * sa * sa),
        r: 0.0,
    }
}

/// Dynamical qutrit from `|1,0>`: `Q = 16 sin^2(t/2) [[1, cos a], [cos a, 1]]`,
/// `B = 1 / (8 sin^2(t/2) sin^2 a)`, `R = 0`.
pub fn reference_qutrit_dynamic(t: f64, alpha: f64) -> TwoParamReference {
    let s = (0.5 * t).sin();
    let pre = 16.0 * s * s;
    let ca = alpha.cos();
    let sa = alpha.sin();
    TwoParamReference {
        q: [[pre, pre * ca], [pre * ca, pre]],
        b: 1.0 / (8.0 * s * s * sa * sa),
        r: 0.0,
    }
}

/// Static anharmonic oscillator: `(N1, N2, B) = (29/24, 39/32, 466/1131)`.
pub fn reference_anharmonic_static() -> (f64, f64, f64) {
    (29.0 / 24.0, 39.0 / 32.0, 466.0 / 1131.0)
}

/// Dynamical anharmonic oscillator from the vacuum: `(Q11, Q22, Q12)`.
pub fn reference_anharmonic_dynamic(t: f64) -> (f64, f64, f64) {
    let q11 = 29.0 / 3.0 - 9.0 * t.cos() - 2.0 / 3.0 * (3.0 * t).cos();
    let s = t.sin();
    let q22 = 3.0 * (7.0 + (2.0 * t).cos()) * s * s;
    (q11, q22, 0.0)
}
