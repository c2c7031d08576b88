//! JSON Hamiltonian files.
//!
//! ```json
//! { "dim": 2,
//!   "h0": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
//!   "perturbations": [[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]],
//!   "level": 1,
//!   "probe": [[1, 0], [0, 0]] }
//! ```
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs. `level` indexes
//! the ascending spectrum of `h0` (default 0). `probe` is the initial state of
//! the dynamical scheme (default: the unperturbed eigenstate).

use std::path::Path;

use serde::Deserialize;
use weakmetro::{ComplexMatrix, HermitianOperator, PerturbationProblem, StateVector, C64};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub dim: usize,
    pub h0: Vec<Vec<[f64; 2]>>,
    pub perturbations: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub level: usize,
    #[serde(default)]
    pub probe: Option<Vec<[f64; 2]>>,
}

fn matrix(dim: usize, rows: &[Vec<[f64; 2]>], what: &str) -> Result<ComplexMatrix, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Validation(format!("{what} must be a {dim}x{dim} matrix")));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
        let [re, im] = rows[r][c];
        C64::new(re, im)
    }))
}

impl HamiltonianFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("bad Hamiltonian file: {e}")))
    }

    pub fn problem(&self) -> Result<PerturbationProblem, CliError> {
        if self.dim == 0 {
            return Err(CliError::Validation("dim must be positive".into()));
        }
        let h0 = HermitianOperator::new(matrix(self.dim, &self.h0, "h0")?)?;
        let perts = self
            .perturbations
            .iter()
            .enumerate()
            .map(|(i, m)| Ok(HermitianOperator::new(matrix(self.dim, m, &format!("perturbations[{i}]"))?)?))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(PerturbationProblem::new(h0, perts, self.level)?)
    }

    pub fn probe(&self) -> Result<Option<StateVector>, CliError> {
        let Some(amps) = &self.probe else {
            return Ok(None);
        };
        if amps.len() != self.dim {
            return Err(CliError::Validation(format!("probe must have {} amplitudes", self.dim)));
        }
        let v: Vec<C64> = amps.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        Ok(Some(StateVector::from_slice(&v)?.normalize()?))
    }
}
