//! First-order Rayleigh-Schrodinger corrections for a non-degenerate level of
//! `H0 + sum_mu lambda_mu H_mu`, the overlaps between them, and the
//! three-state angle parametrization used for two couplings.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianOperator, SpectralDecomposition, StateVector, C64};

/// Relative gap (in units of the spectral spread) below which two levels are
/// treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Couplings below this magnitude do not trigger the degeneracy error.
pub const COUPLING_TOL: f64 = 1e-12;
/// `|omega|` within this distance of one means the corrections are parallel.
pub const PARALLEL_TOL: f64 = 1e-10;
/// Squared norms at or below this are treated as a vanishing correction.
pub const ZERO_NORM_TOL: f64 = 1e-28;

#[derive(Clone, Debug)]
pub struct PerturbationProblem {
    h0: HermitianOperator,
    perturbations: Vec<HermitianOperator>,
    level: usize,
    spectrum: SpectralDecomposition,
}

impl PerturbationProblem {
    /// `level` indexes the ascending spectrum of `h0`.
    pub fn new(h0: HermitianOperator, perturbations: Vec<HermitianOperator>, level: usize) -> Result<Self> {
        if perturbations.is_empty() {
            return Err(Error::NoPerturbations);
        }
        let dim = h0.dim();
        if let Some(bad) = perturbations.iter().find(|h| h.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if level >= dim {
            return Err(Error::LevelOutOfRange { level, dim });
        }
        let spectrum = hermitian_eig(&h0)?;
        Ok(Self {
            h0,
            perturbations,
            level,
            spectrum,
        })
    }

    pub fn h0(&self) -> &HermitianOperator {
        &self.h0
    }

    pub fn perturbations(&self) -> &[HermitianOperator] {
        &self.perturbations
    }

    pub fn parameter_count(&self) -> usize {
        self.perturbations.len()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn unperturbed_state(&self) -> StateVector {
        self.spectrum
            .eigenvector(self.level)
            .expect("level validated at construction")
    }

    /// `H0 + sum_mu lambdas[mu] H_mu`
    pub fn hamiltonian(&self, lambdas: &[f64]) -> Result<HermitianOperator> {
        self.check_lambdas(lambdas)?;
        self.h0.linear_combination(lambdas, &self.perturbations)
    }

    pub(crate) fn check_lambdas(&self, lambdas: &[f64]) -> Result<()> {
        if lambdas.len() != self.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: self.parameter_count(),
                found: lambdas.len(),
            });
        }
        Ok(())
    }

    /// All corrections, in parameter order.
    pub fn corrections(&self) -> Result<Vec<FirstOrderCorrection>> {
        (0..self.parameter_count())
            .map(|mu| first_order_correction(self, mu))
            .collect()
    }
}

/// `|psi^1_mu> = sqrt(N_mu) |phi^1_mu>`, together with the unperturbed state it corrects.
#[derive(Clone, Debug)]
pub struct FirstOrderCorrection {
    raw: StateVector,
    squared_norm: f64,
    direction: Option<StateVector>,
    unperturbed: StateVector,
}

impl FirstOrderCorrection {
    pub fn from_raw(raw: StateVector, unperturbed: StateVector) -> Result<Self> {
        if raw.dim() != unperturbed.dim() {
            return Err(Error::DimensionMismatch {
                expected: unperturbed.dim(),
                found: raw.dim(),
            });
        }
        let squared_norm = raw.norm_squared();
        let direction = if squared_norm > ZERO_NORM_TOL {
            Some(raw.scale(C64::new(1.0 / squared_norm.sqrt(), 0.0)))
        } else {
            None
        };
        Ok(Self {
            raw,
            squared_norm,
            direction,
            unperturbed,
        })
    }

    pub fn raw(&self) -> &StateVector {
        &self.raw
    }

    pub fn squared_norm(&self) -> f64 {
        self.squared_norm
    }

    pub fn direction(&self) -> Option<&StateVector> {
        self.direction.as_ref()
    }

    pub fn unperturbed(&self) -> &StateVector {
        &self.unperturbed
    }

    pub fn is_zero(&self) -> bool {
        self.direction.is_none()
    }

    fn direction_or_err(&self, index: usize) -> Result<&StateVector> {
        self.direction.as_ref().ok_or(Error::ZeroCorrection { index })
    }
}

/// `|psi^1_n> = sum_{m != n} <m|H_mu|n> / (E_n - E_m) |m>`
pub fn first_order_correction(p: &PerturbationProblem, mu: usize) -> Result<FirstOrderCorrection> {
    let h = p.perturbations.get(mu).ok_or(Error::ParameterOutOfRange {
        index: mu,
        count: p.parameter_count(),
    })?;
    let spec = &p.spectrum;
    let n = p.level;
    let energies = spec.eigenvalues();
    let coupled = spec.to_eigenbasis(h.matrix());
    let tol = DEGENERACY_TOL * spec.spread();

    let mut coeffs = DVector::<C64>::zeros(p.dim());
    for m in (0..p.dim()).filter(|&m| m != n) {
        let gap = energies[n] - energies[m];
        let coupling = coupled[(m, n)];
        if gap.abs() <= tol {
            if coupling.norm() > COUPLING_TOL {
                return Err(Error::Degeneracy {
                    level: n,
                    other: m,
                    parameter: mu,
                    gap: gap.abs(),
                    coupling: coupling.norm(),
                });
            }
            continue;
        }
        coeffs[m] = coupling / gap;
    }
    let raw = StateVector::new(spec.eigenvectors() * coeffs)?;
    FirstOrderCorrection::from_raw(raw, p.unperturbed_state())
}

/// Hermitian matrix of `omega_{mu nu} = <phi^1_mu|phi^1_nu>`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix(ComplexMatrix);

impl OverlapMatrix {
    pub fn get(&self, mu: usize, nu: usize) -> C64 {
        self.0[(mu, nu)]
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn overlaps(corrections: &[FirstOrderCorrection]) -> Result<OverlapMatrix> {
    let dirs = corrections
        .iter()
        .enumerate()
        .map(|(i, c)| c.direction_or_err(i))
        .collect::<Result<Vec<_>>>()?;
    let p = dirs.len();
    let mut m = ComplexMatrix::zeros(p, p);
    for mu in 0..p {
        m[(mu, mu)] = C64::new(1.0, 0.0);
        for nu in mu + 1..p {
            let w = dirs[mu].inner(dirs[nu])?;
            m[(mu, nu)] = w;
            m[(nu, mu)] = w.conj();
        }
    }
    Ok(OverlapMatrix(m))
}

/// Two normalized corrections written on an orthonormal pair `{|j>, |k>}`:
///
/// ```text
/// |phi^1_1> = cos(theta1/2) |j> + sin(theta1/2) |k>
/// |phi^1_2> = e^{i gamma} [cos(theta2/2) |j> + e^{i varphi} sin(theta2/2) |k>]
/// ```
///
/// so that `omega = c1 c2 e^{i gamma} + s1 s2 e^{i (gamma + varphi)}`.
#[derive(Clone, Debug)]
pub struct AngleDecomposition {
    pub unperturbed: StateVector,
    pub basis_j: StateVector,
    pub basis_k: StateVector,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma: f64,
    pub varphi: f64,
}

impl AngleDecomposition {
    pub fn overlap(&self) -> C64 {
        let (c1, s1) = half_angle(self.theta1);
        let (c2, s2) = half_angle(self.theta2);
        C64::from_polar(c1 * c2, self.gamma) + C64::from_polar(s1 * s2, self.gamma + self.varphi)
    }

    /// Rebuilds `(|phi^1_1>, |phi^1_2>)` from the angles and basis.
    pub fn reconstruct(&self) -> Result<(StateVector, StateVector)> {
        let (c1, s1) = half_angle(self.theta1);
        let (c2, s2) = half_angle(self.theta2);
        let phi1 = self
            .basis_j
            .scale(C64::new(c1, 0.0))
            .axpy(C64::new(s1, 0.0), &self.basis_k)?;
        let phi2 = self
            .basis_j
            .scale(C64::from_polar(c2, self.gamma))
            .axpy(C64::from_polar(s2, self.gamma + self.varphi), &self.basis_k)?;
        Ok((phi1, phi2))
    }
}

pub(crate) fn half_angle(theta: f64) -> (f64, f64) {
    ((0.5 * theta).cos(), (0.5 * theta).sin())
}

fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Phase `e^{i p}` with `p` in `(-pi/2, pi/2]` that turns `z` real.
fn real_making_phase(z: C64) -> C64 {
    let mut p = z.arg();
    if p > 0.5 * PI {
        p -= PI;
    } else if p <= -0.5 * PI {
        p += PI;
    }
    C64::from_polar(1.0, p)
}

fn largest_component_positive(v: StateVector) -> StateVector {
    let amps = v.amplitudes();
    let max = amps.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match amps.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        Some(z) if z.norm() > 0.0 => {
            let ph = z.conj() / z.norm();
            v.scale(ph)
        }
        _ => v,
    }
}

/// Solves for `(theta1, theta2, gamma, varphi)` given two non-parallel corrections.
///
/// The pair `{|j>, |k>}` is fixed by projecting onto the span the coordinate axis
/// with the largest weight there (lowest index on ties) to get `|j>`, and taking
/// `|k>` orthogonal to it with its largest component real positive. Phases of
/// `|j>`, `|k>` are then adjusted by the smallest rotation that makes the
/// coefficients of `|phi^1_1>` real with `sin(theta1/2) >= 0`; the sign of
/// `cos(theta2/2)` follows that of `cos(theta1/2)`.
pub fn angle_decomposition(c1: &FirstOrderCorrection, c2: &FirstOrderCorrection) -> Result<AngleDecomposition> {
    let d1 = c1.direction_or_err(0)?;
    let d2 = c2.direction_or_err(1)?;
    let omega = d1.inner(d2)?;
    if omega.norm() >= 1.0 - PARALLEL_TOL {
        return Err(Error::ParallelCorrections {
            overlap_modulus: omega.norm(),
        });
    }
    let e1 = d1.clone();
    let e2 = d2.axpy(-omega, &e1)?.normalize()?;

    // coordinate axis with the largest projection onto span{e1, e2}
    let weights: Vec<f64> = e1
        .amplitudes()
        .iter()
        .zip(e2.amplitudes().iter())
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .collect();
    let wmax = weights.iter().cloned().fold(0.0, f64::max);
    let axis = weights.iter().position(|&w| w >= wmax - 1e-12).unwrap_or(0);

    let a = e1.amplitudes()[axis].conj();
    let b = e2.amplitudes()[axis].conj();
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let mut j = e1.scale(a).axpy(b, &e2)?;
    let mut k = largest_component_positive(e1.scale(-b.conj()).axpy(a.conj(), &e2)?);

    let tol = 1e-12;
    let a1 = j.inner(d1)?;
    if a1.norm() > tol {
        j = j.scale(real_making_phase(a1));
    }
    let b1 = k.inner(d1)?;
    if b1.norm() > tol {
        k = k.scale(real_making_phase(b1));
    }
    let mut a1 = j.inner(d1)?.re;
    let mut b1 = k.inner(d1)?.re;
    if b1 < 0.0 {
        k = k.scale(C64::new(-1.0, 0.0));
        b1 = -b1;
    }
    if b1 <= tol && a1 < 0.0 {
        j = j.scale(C64::new(-1.0, 0.0));
        a1 = -a1;
    }
    let theta1 = wrap_angle(2.0 * b1.atan2(a1));

    let a2 = j.inner(d2)?;
    let b2 = k.inner(d2)?;
    let s2 = b2.norm();
    let c2_sign = if a1 < -tol && s2 > tol { -1.0 } else { 1.0 };
    let c2 = c2_sign * a2.norm();
    let theta2 = wrap_angle(2.0 * s2.atan2(c2));
    let (gamma, varphi) = if a2.norm() > tol {
        let gamma = a2.arg() - if c2 < 0.0 { PI } else { 0.0 };
        let varphi = if s2 > tol { b2.arg() - gamma } else { 0.0 };
        (gamma, varphi)
    } else {
        (b2.arg(), 0.0)
    };

    Ok(AngleDecomposition {
        unperturbed: c1.unperturbed.clone(),
        basis_j: j,
        basis_k: k,
        theta1,
        theta2,
        gamma: wrap_angle(gamma),
        varphi: wrap_angle(varphi),
    })
}

/// `|psi^0> + sum_mu lambda_mu |psi^1_mu>` without normalization.
pub fn first_order_state(p: &PerturbationProblem, lambdas: &[f64]) -> Result<StateVector> {
    p.check_lambdas(lambdas)?;
    let mut psi = p.unperturbed_state();
    for (mu, &lam) in lambdas.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        let c = first_order_correction(p, mu)?;
        psi = psi.axpy(C64::new(lam, 0.0), c.raw())?;
    }
    Ok(psi)
}

/// The normalized first-order perturbed eigenstate.
pub fn perturbed_state(p: &PerturbationProblem, lambdas: &[f64]) -> Result<StateVector> {
    let size = lambdas.iter().map(|l| l * l).sum::<f64>().sqrt();
    if size > 0.1 {
        log::warn!("|lambda| = {size} is not small; first-order state may be inaccurate");
    }
    first_order_state(p, lambdas)?.normalize()
}
