//! Interaction-picture sensing with an evolved probe.
//!
//! To first order in the couplings the interaction-picture propagator is
//! `1 - i sum_mu lambda_mu K_mu(t)` with `K_mu(t) = int_0^t U0^dag(s) H_mu U0(s) ds`;
//! time ordering only enters at second order and is dropped. The QFI matrix
//! is then four times the covariance matrix of the `K_mu` in the probe state.

use crate::error::{Error, Result};
use crate::linalg::{
    default_panels, hermitian_eig, integrate_operator, ComplexMatrix, HermitianOperator, SpectralDecomposition, StateVector, C64,
};
use crate::perturbation::PerturbationProblem;
use crate::statics::{analyze_static, EstimationReport, QfiMatrix, UhlmannMatrix};

/// `sin(x) / x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[derive(Clone, Debug)]
pub struct KOperator {
    pub op: HermitianOperator,
    pub time: f64,
    pub parameter_index: usize,
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// Closed form in the eigenbasis of `H0`:
/// `[K]_{mn} = [H_mu]_{mn} t e^{i D t / 2} sinc(D t / 2)` with `D = E_m - E_n`.
pub fn k_operator_spectral(
    spec: &SpectralDecomposition,
    h_mu: &HermitianOperator,
    t: f64,
    parameter_index: usize,
) -> Result<KOperator> {
    check_time(t)?;
    if h_mu.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: h_mu.dim(),
        });
    }
    let e = spec.eigenvalues();
    let mut k = spec.to_eigenbasis(h_mu.matrix());
    for m in 0..spec.dim() {
        for n in 0..spec.dim() {
            let half = 0.5 * (e[m] - e[n]) * t;
            k[(m, n)] *= C64::from_polar(t * sinc(half), half);
        }
    }
    Ok(KOperator {
        op: HermitianOperator::hermitian_part(&spec.from_eigenbasis(&k))?,
        time: t,
        parameter_index,
    })
}

/// Quadrature of `U0^dag(s) H_mu U0(s)` over `[0, t]`. `panels = None` uses the
/// default density.
pub fn k_operator_quadrature(
    h0: &HermitianOperator,
    h_mu: &HermitianOperator,
    t: f64,
    panels: Option<usize>,
    parameter_index: usize,
) -> Result<KOperator> {
    check_time(t)?;
    if h_mu.dim() != h0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h0.dim(),
            found: h_mu.dim(),
        });
    }
    let spec = hermitian_eig(h0)?;
    let panels = panels.unwrap_or_else(|| default_panels(0.0, t));
    let integrand = |s: f64| -> ComplexMatrix {
        let u = spec.propagator(s);
        u.adjoint() * h_mu.matrix() * u
    };
    let k = integrate_operator(integrand, 0.0, t, panels)?;
    Ok(KOperator {
        op: HermitianOperator::hermitian_part(&k)?,
        time: t,
        parameter_index,
    })
}

/// `Q(t) = 4 [<K^2> - <K>^2]` in the probe state.
pub fn qfi_dynamic_single(psi0: &StateVector, k: &KOperator) -> Result<f64> {
    let kpsi = psi0.apply(k.op.matrix())?;
    let mean = psi0.inner(&kpsi)?.re;
    Ok((4.0 * (kpsi.norm_squared() - mean * mean)).max(0.0))
}

/// Leading-order dynamical QFI matrix, Uhlmann curvature `D_{mu nu} = 4 Im<K_mu K_nu>`,
/// bound and quantumness. A singular `Q` is recorded in the report (`bound_b = inf`).
pub fn qfim_dynamic(psi0: &StateVector, ks: &[KOperator]) -> Result<EstimationReport> {
    if ks.is_empty() {
        return Err(Error::NoPerturbations);
    }
    let t = ks[0].time;
    if ks.iter().any(|k| k.time != t) {
        return Err(Error::InvalidArgument("all K operators must share one time".into()));
    }
    let vs = ks
        .iter()
        .map(|k| psi0.apply(k.op.matrix()))
        .collect::<Result<Vec<_>>>()?;
    let means = vs
        .iter()
        .map(|v| psi0.inner(v).map(|z| z.re))
        .collect::<Result<Vec<_>>>()?;
    let p = ks.len();
    let mut q = nalgebra::DMatrix::zeros(p, p);
    let mut d = nalgebra::DMatrix::zeros(p, p);
    for mu in 0..p {
        for nu in mu..p {
            let g = vs[mu].inner(&vs[nu])?;
            q[(mu, nu)] = 4.0 * (g.re - means[mu] * means[nu]);
            q[(nu, mu)] = q[(mu, nu)];
            d[(mu, nu)] = 4.0 * g.im;
            d[(nu, mu)] = -d[(mu, nu)];
        }
    }
    Ok(EstimationReport::from_matrices(QfiMatrix::new(q)?, UhlmannMatrix::new(d)?))
}

/// All `K_mu(t)` of a problem through the spectral closed form.
pub fn k_operators(p: &PerturbationProblem, t: f64) -> Result<Vec<KOperator>> {
    p.perturbations()
        .iter()
        .enumerate()
        .map(|(mu, h)| k_operator_spectral(p.spectrum(), h, t, mu))
        .collect()
}

pub fn dynamic_report(p: &PerturbationProblem, psi0: &StateVector, t: f64) -> Result<EstimationReport> {
    qfim_dynamic(psi0, &k_operators(p, t)?)
}

#[derive(Clone, Debug)]
pub struct TimeScan {
    pub times: Vec<f64>,
    /// One entry per time; numerical failures at a point are kept, not raised.
    pub reports: Vec<Result<EstimationReport>>,
    /// Static bound of the level the probe starts in, when the probe is that eigenstate.
    pub static_reference: Option<f64>,
}

impl TimeScan {
    /// `B(t)`, with `inf` for singular or failed points.
    pub fn bounds(&self) -> Vec<f64> {
        self.reports
            .iter()
            .map(|r| r.as_ref().map(|r| r.bound_b).unwrap_or(f64::INFINITY))
            .collect()
    }

    /// Grid index and value of the smallest finite `B`.
    pub fn minimum(&self) -> Option<(usize, f64)> {
        self.bounds()
            .into_iter()
            .enumerate()
            .filter(|(_, b)| b.is_finite())
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Grid intervals `[t_i, t_{i+1}]` over which `B - level` changes sign.
    pub fn sign_changes(&self, level: f64) -> Vec<(f64, f64)> {
        let b = self.bounds();
        (0..b.len().saturating_sub(1))
            .filter(|&i| (b[i] < level) != (b[i + 1] < level))
            .map(|i| (self.times[i], self.times[i + 1]))
            .collect()
    }
}

fn probe_matches_level(p: &PerturbationProblem, psi0: &StateVector) -> bool {
    let reference = p.unperturbed_state();
    reference
        .inner(psi0)
        .map(|z| (z.norm() - 1.0).abs() < 1e-10)
        .unwrap_or(false)
}

/// Evaluates the dynamical report on every grid time.
pub fn scan_time(p: &PerturbationProblem, psi0: &StateVector, times: &[f64]) -> Result<TimeScan> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    if psi0.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: psi0.dim(),
        });
    }
    let reports = times.iter().map(|&t| dynamic_report(p, psi0, t)).collect();
    let static_reference = if probe_matches_level(p, psi0) {
        analyze_static(p)
            .ok()
            .map(|a| a.report.bound_b)
            .filter(|b| b.is_finite())
    } else {
        None
    };
    Ok(TimeScan {
        times: times.to_vec(),
        reports,
        static_reference,
    })
}

/// `n` equally spaced times from `t_min` to `t_max` inclusive.
pub fn linear_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(t_min < t_max) {
        return Err(Error::InvalidArgument(format!(
            "grid needs t_min < t_max and at least two points, got [{t_min}, {t_max}] x {n}"
        )));
    }
    let h = (t_max - t_min) / (n - 1) as f64;
    Ok((0..n).map(|i| t_min + i as f64 * h).collect())
}

fn bound_at(p: &PerturbationProblem, psi0: &StateVector, t: f64) -> f64 {
    dynamic_report(p, psi0, t)
        .map(|r| r.bound_b)
        .unwrap_or(f64::INFINITY)
}

/// Times where `B(t)` crosses `level`, found by bisection inside each grid
/// interval of `scan` that brackets a sign change.
pub fn locate_crossings(
    p: &PerturbationProblem,
    psi0: &StateVector,
    scan: &TimeScan,
    level: f64,
    tol: f64,
) -> Vec<f64> {
    scan.sign_changes(level)
        .into_iter()
        .map(|(mut lo, mut hi)| {
            let below_lo = bound_at(p, psi0, lo) < level;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if (bound_at(p, psi0, mid) < level) == below_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Golden-section refinement of the smallest `B(t)` on the scan. Returns `(t, B)`.
pub fn locate_minimum(p: &PerturbationProblem, psi0: &StateVector, scan: &TimeScan, tol: f64) -> Option<(f64, f64)> {
    let (i, _) = scan.minimum()?;
    let lo_i = i.saturating_sub(1);
    let hi_i = (i + 1).min(scan.times.len() - 1);
    let (mut a, mut b) = (scan.times[lo_i], scan.times[hi_i]);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = bound_at(p, psi0, x1);
    let mut f2 = bound_at(p, psi0, x2);
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = bound_at(p, psi0, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = bound_at(p, psi0, x2);
        }
    }
    let t = 0.5 * (a + b);
    Some((t, bound_at(p, psi0, t)))
}
