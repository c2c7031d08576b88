//! Exact reference computations: dense diagonalization, exact evolution and
//! finite-difference Fisher information. Nothing here uses perturbation theory.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, HermitianOperator, StateVector, C64};
use crate::perturbation::PerturbationProblem;
use crate::statics::{QfiMatrix, UhlmannMatrix};

pub const DEFAULT_STEP: f64 = 1e-4;
pub const PATH_STEPS: usize = 4;
/// Step-halving disagreement above which a finite-difference estimate is rejected.
pub const STEP_HALVING_TOL: f64 = 0.1;
/// Scale below which disagreements are measured in absolute terms.
const FD_SCALE_FLOOR: f64 = 1e-6;

fn assemble(h0: &HermitianOperator, perturbations: &[HermitianOperator], lambdas: &[f64]) -> Result<HermitianOperator> {
    if perturbations.is_empty() {
        return Err(Error::NoPerturbations);
    }
    if lambdas.len() != perturbations.len() {
        return Err(Error::DimensionMismatch {
            expected: perturbations.len(),
            found: lambdas.len(),
        });
    }
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFinite { what: "coupling vector" });
    }
    h0.linear_combination(lambdas, perturbations)
}

/// Eigenvector of `h0 + sum lambda_mu H_mu` continuously connected to level
/// `level` of `h0`. The coupling path is walked in [`PATH_STEPS`] equal steps,
/// following the eigenvector of largest overlap.
pub fn exact_eigenstate(
    h0: &HermitianOperator,
    perturbations: &[HermitianOperator],
    lambdas: &[f64],
    level: usize,
) -> Result<StateVector> {
    let h = assemble(h0, perturbations, lambdas)?;
    let start_spec = hermitian_eig(h0)?;
    if level >= start_spec.dim() {
        return Err(Error::LevelOutOfRange {
            level,
            dim: start_spec.dim(),
        });
    }
    let start = start_spec.eigenvector(level)?;
    if lambdas.iter().all(|&l| l == 0.0) {
        return Ok(start);
    }
    let mut tracked = start.clone();
    for step in 1..=PATH_STEPS {
        let spec = if step == PATH_STEPS {
            hermitian_eig(&h)?
        } else {
            let f = step as f64 / PATH_STEPS as f64;
            let scaled: Vec<f64> = lambdas.iter().map(|l| l * f).collect();
            hermitian_eig(&h0.linear_combination(&scaled, perturbations)?)?
        };
        let mut best: Option<(StateVector, f64)> = None;
        for i in 0..spec.dim() {
            let v = spec.eigenvector(i)?;
            let w = v.inner(&tracked)?.norm_sqr();
            if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
                best = Some((v, w));
            }
        }
        let (v, w) = best.ok_or(Error::Empty)?;
        // above one half no other eigenvector can compete
        if w <= 0.5 {
            return Err(Error::LevelTracking { level, step });
        }
        tracked = v;
    }
    let ov = start.inner(&tracked)?;
    if ov.norm() == 0.0 {
        return Err(Error::LevelTracking { level, step: PATH_STEPS });
    }
    Ok(tracked.scale(ov.conj() / ov.norm()))
}

/// [`exact_eigenstate`] for the problem's own operators and level.
pub fn exact_problem_eigenstate(p: &PerturbationProblem, lambdas: &[f64]) -> Result<StateVector> {
    exact_eigenstate(p.h0(), p.perturbations(), lambdas, p.level())
}

/// Fidelity-based QFI estimate and its step-halved and extrapolated companions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityQfi {
    pub value: f64,
    pub half_step: f64,
    pub extrapolated: f64,
}

fn fidelity_quotient<F>(family: &F, lam: f64, eps: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<StateVector>,
{
    let a = family(lam - 0.5 * eps)?;
    let b = family(lam + 0.5 * eps)?;
    let ov = a.inner(&b)?.norm_sqr() / (a.norm_squared() * b.norm_squared());
    if !ov.is_finite() {
        return Err(Error::NonFinite { what: "fidelity overlap" });
    }
    Ok(4.0 * (1.0 - ov) / (eps * eps))
}

/// Bures form `4 [1 - |<psi(lam - eps/2)|psi(lam + eps/2)>|^2] / eps^2`.
pub fn fidelity_qfi<F>(family: F, lam: f64, eps: f64) -> Result<FidelityQfi>
where
    F: Fn(f64) -> Result<StateVector>,
{
    if !(eps > 0.0 && eps.is_finite()) || !lam.is_finite() {
        return Err(Error::InvalidArgument(format!("need finite lam and eps > 0, got {lam}, {eps}")));
    }
    let value = fidelity_quotient(&family, lam, eps)?;
    let half_step = fidelity_quotient(&family, lam, 0.5 * eps)?;
    Ok(FidelityQfi {
        value,
        half_step,
        extrapolated: (4.0 * half_step - value) / 3.0,
    })
}

fn aligned<F>(family: &F, lam: &[f64], reference: &StateVector) -> Result<StateVector>
where
    F: Fn(&[f64]) -> Result<StateVector>,
{
    let s = family(lam)?.normalize()?;
    if s.dim() != reference.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            found: s.dim(),
        });
    }
    s.align_phase_to(reference)
}

fn fd_geometric_tensor<F>(family: &F, lam: &[f64], psi: &StateVector, eps: f64) -> Result<DMatrix<C64>>
where
    F: Fn(&[f64]) -> Result<StateVector>,
{
    let p = lam.len();
    let mut derivs = Vec::with_capacity(p);
    for mu in 0..p {
        let mut up = lam.to_vec();
        let mut down = lam.to_vec();
        up[mu] += eps;
        down[mu] -= eps;
        let plus = aligned(family, &up, psi)?;
        let minus = aligned(family, &down, psi)?;
        derivs.push(plus.axpy(C64::new(-1.0, 0.0), &minus)?.scale(C64::new(0.5 / eps, 0.0)));
    }
    let mut g = DMatrix::zeros(p, p);
    for mu in 0..p {
        let a = derivs[mu].inner(psi)?;
        for nu in 0..p {
            let b = psi.inner(&derivs[nu])?;
            g[(mu, nu)] = derivs[mu].inner(&derivs[nu])? - a * b;
        }
    }
    if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { what: "finite-difference tensor" });
    }
    Ok(g)
}

/// Central-difference QFIM and Uhlmann matrix of a pure-state family,
/// `4 Re` and `4 Im` of `<d_mu psi|d_nu psi> - <d_mu psi|psi><psi|d_nu psi>`.
/// The result at `eps` is cross-checked against `eps/2`.
pub fn fd_qfim<F>(family: F, lam: &[f64], eps: f64) -> Result<(QfiMatrix, UhlmannMatrix)>
where
    F: Fn(&[f64]) -> Result<StateVector>,
{
    if lam.is_empty() {
        return Err(Error::NoPerturbations);
    }
    if !(eps > 0.0 && eps.is_finite()) || lam.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument(format!("need finite lam and eps > 0, got eps = {eps}")));
    }
    let psi = family(lam)?.normalize()?;
    let g = fd_geometric_tensor(&family, lam, &psi, eps)?;
    let g_half = fd_geometric_tensor(&family, lam, &psi, 0.5 * eps)?;
    let scale = g.iter().map(|z| z.norm()).fold(0.0, f64::max).max(FD_SCALE_FLOOR);
    let disagreement = (&g - &g_half).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
    if disagreement > STEP_HALVING_TOL {
        return Err(Error::StepTooSmall { eps, disagreement });
    }
    let q = QfiMatrix::new(g.map(|z| 4.0 * z.re))?;
    let d = UhlmannMatrix::new(g.map(|z| 4.0 * z.im))?;
    Ok((q, d))
}

/// `lambda -> exp(-i H(lambda) t) psi0`, evolved exactly through a dense eigendecomposition.
pub fn exact_evolved_family<'a>(
    p: &'a PerturbationProblem,
    psi0: &StateVector,
    t: f64,
) -> impl Fn(&[f64]) -> Result<StateVector> + 'a {
    let psi0 = psi0.clone();
    move |lam: &[f64]| {
        let h = p.hamiltonian(lam)?;
        hermitian_eig(&h)?.evolve(t, &psi0)
    }
}

/// `lambda -> ` the exact eigenstate continuously connected to the problem's level.
pub fn exact_ground_family(p: &PerturbationProblem) -> impl Fn(&[f64]) -> Result<StateVector> + '_ {
    move |lam: &[f64]| exact_problem_eigenstate(p, lam)
}
