//! Dense complex linear algebra used by every estimation routine: hermitian
//! operators and their spectral decomposition, exact unitary evolution,
//! expectation values and Gauss-Legendre quadrature of operator-valued
//! integrands.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Relative tolerance on `max |A - A^dag|` accepted at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Gauss-Legendre nodes per quadrature panel.
pub const GL_NODES: usize = 8;

/// Default number of quadrature panels per unit of integration length.
pub const PANELS_PER_UNIT: f64 = 16.0;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Largest entry modulus.
pub fn max_abs_entry(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_square_finite(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::Empty);
    }
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { what: "matrix" });
    }
    Ok(())
}

/// A square complex matrix that is hermitian to within [`HERMITICITY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square_finite(&matrix)?;
        let scale = max_abs_entry(&matrix);
        let deviation = max_abs_entry(&(&matrix - matrix.adjoint()));
        if deviation > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian { deviation, scale });
        }
        Ok(Self(matrix))
    }

    /// Takes the hermitian part `(A + A^dag) / 2` without checking `A`.
    /// Used for operators that are hermitian analytically but carry round-off.
    pub fn hermitian_part(matrix: &ComplexMatrix) -> Result<Self> {
        check_square_finite(matrix)?;
        Ok(Self((matrix + matrix.adjoint()).scale(0.5)))
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    /// `self + sum_k weights[k] * terms[k]`.
    pub fn linear_combination(&self, weights: &[f64], terms: &[HermitianOperator]) -> Result<Self> {
        if weights.len() != terms.len() {
            return Err(Error::DimensionMismatch {
                expected: terms.len(),
                found: weights.len(),
            });
        }
        let mut out = self.0.clone();
        for (w, t) in weights.iter().zip(terms) {
            if t.dim() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: t.dim(),
                });
            }
            out += t.0.scale(*w);
        }
        Ok(Self(out))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_entry(&self.0)
    }
}

/// Ket with complex amplitudes. May be unnormalized (first-order corrections).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty);
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { what: "state vector" });
        }
        Ok(Self(amplitudes))
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        Self::new(amplitudes)?.normalize()
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::LevelOutOfRange { level: index, dim });
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self(v))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-10
    }

    pub fn normalize(self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self(self.0.unscale(n)))
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.0.dotc(&other.0))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: C64, other: &StateVector) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self(&self.0 + other.0.map(|z| z * factor)))
    }

    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self> {
        if op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.ncols(),
                found: self.dim(),
            });
        }
        Ok(Self(op * &self.0))
    }

    /// `|self><other|`
    pub fn outer(&self, other: &StateVector) -> ComplexMatrix {
        &self.0 * other.0.adjoint()
    }

    /// Multiplies by the phase that makes `<reference|self>` real and non-negative.
    pub fn align_phase_to(&self, reference: &StateVector) -> Result<Self> {
        let ov = reference.inner(self)?;
        if ov.norm() == 0.0 {
            return Ok(self.clone());
        }
        Ok(self.scale(ov.conj() / ov.norm()))
    }

    /// `min_phi || self - e^{i phi} other ||`
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let aligned = other.align_phase_to(self)?;
        Ok((&self.0 - &aligned.0).norm())
    }
}

/// Ascending eigenvalues and orthonormal eigenvector columns of a hermitian
/// operator. Each eigenvector's largest-magnitude component is real positive.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, index: usize) -> Result<StateVector> {
        if index >= self.dim() {
            return Err(Error::LevelOutOfRange {
                level: index,
                dim: self.dim(),
            });
        }
        StateVector::new(self.eigenvectors.column(index).into_owned())
    }

    /// `E_max - E_min`
    pub fn spread(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(e);
        }
        scaled * v.adjoint()
    }

    /// `V f(Lambda) V^dag` for a complex function of the eigenvalues.
    pub fn apply_function<F: Fn(f64) -> C64>(&self, f: F) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            let fe = f(e);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fe);
        }
        scaled * v.adjoint()
    }

    /// `U(t) = exp(-i H t)`
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.apply_function(|e| C64::new(0.0, -e * t).exp())
    }

    /// Changes an operator into the eigenbasis: `V^dag A V`.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }

    /// Inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &self.eigenvectors * a * self.eigenvectors.adjoint()
    }

    pub fn evolve(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let coeffs = self.eigenvectors.adjoint() * psi.amplitudes();
        let phased = DVector::from_iterator(
            self.dim(),
            coeffs
                .iter()
                .zip(&self.eigenvalues)
                .map(|(c, &e)| c * C64::new(0.0, -e * t).exp()),
        );
        StateVector::new(&self.eigenvectors * phased)
    }
}

fn fix_phase(column: &mut nalgebra::DVectorViewMut<'_, C64>) {
    let max = column.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    // first component within round-off of the maximum, so ties resolve by index
    let pivot = column
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-9))
        .unwrap_or(0);
    let z = column[pivot];
    let phase = z.conj() / z.norm();
    column.iter_mut().for_each(|c| *c *= phase);
}

pub fn hermitian_eig(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    let m = a.matrix().clone();
    let norm = a.max_abs();
    let eig = nalgebra::SymmetricEigen::try_new(m, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNoConvergence { norm })?;
    let dim = a.dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut eigenvectors = ComplexMatrix::zeros(dim, dim);
    let mut eigenvalues = Vec::with_capacity(dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        fix_phase(&mut eigenvectors.column_mut(dst));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `exp(-i H t) psi` through the spectral decomposition of `H`.
pub fn evolve(h: &HermitianOperator, t: f64, psi: &StateVector) -> Result<StateVector> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    hermitian_eig(h)?.evolve(t, psi)
}

/// `<psi|A|psi>`
pub fn expectation(psi: &StateVector, a: &ComplexMatrix) -> Result<C64> {
    if a.nrows() != psi.dim() || a.ncols() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: a.nrows(),
        });
    }
    Ok(psi.amplitudes().dotc(&(a * psi.amplitudes())))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub fn default_panels(t_lo: f64, t_hi: f64) -> usize {
    ((t_hi - t_lo) * PANELS_PER_UNIT).ceil().max(1.0) as usize
}

/// Entrywise composite Gauss-Legendre quadrature (8 nodes per panel) of a
/// matrix-valued integrand over `[t_lo, t_hi]`.
pub fn integrate_operator<F>(mut f: F, t_lo: f64, t_hi: f64, panels: usize) -> Result<ComplexMatrix>
where
    F: FnMut(f64) -> ComplexMatrix,
{
    if !(t_hi >= t_lo) || !t_lo.is_finite() || !t_hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must satisfy t_lo <= t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    if panels == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one panel".into()));
    }
    let (nodes, weights) = gauss_legendre(GL_NODES);
    let width = (t_hi - t_lo) / panels as f64;
    let mut acc: Option<ComplexMatrix> = None;
    for p in 0..panels {
        let mid = t_lo + (p as f64 + 0.5) * width;
        for (x, w) in nodes.iter().zip(&weights) {
            let s = mid + 0.5 * width * x;
            let sample = f(s);
            if sample.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand { at: s });
            }
            let term = sample.scale(0.5 * width * w);
            match acc.as_mut() {
                None => acc = Some(term),
                Some(a) => {
                    if a.shape() != term.shape() {
                        return Err(Error::DimensionMismatch {
                            expected: a.nrows(),
                            found: term.nrows(),
                        });
                    }
                    *a += term;
                }
            }
        }
    }
    acc.ok_or(Error::Empty)
}
